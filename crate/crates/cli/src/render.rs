//! Plain-text rendering: one `path: value` line per leaf, arrays of scalars inline.

use serde_json::Value;

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("({})", xs.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn walk(path: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) if looks_like_vector(map) => line(path, &vector(map), out),
        Value::Object(map) => {
            if map.is_empty() {
                line(path, "{}", out);
            }
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(&p, x, out);
            }
        }
        Value::Array(xs) if !is_flat(v) => {
            if xs.is_empty() {
                line(path, "[]", out);
            }
            for (i, x) in xs.iter().enumerate() {
                walk(&format!("{path}[{i}]"), x, out);
            }
        }
        Value::Array(xs) if xs.is_empty() => line(path, "[]", out),
        _ => line(path, &scalar(v), out),
    }
}

fn line(path: &str, value: &str, out: &mut String) {
    if path.is_empty() {
        out.push_str(value);
    } else {
        out.push_str(path);
        out.push_str(": ");
        out.push_str(value);
    }
    out.push('\n');
}

fn looks_like_vector(map: &serde_json::Map<String, Value>) -> bool {
    map.len() == 3 && map.contains_key("r") && map.contains_key("div") && map.contains_key("s")
}

/// Mukai vectors print as (r, Δ, s) with Δ either aH or [Δ·H, Δ²].
fn vector(map: &serde_json::Map<String, Value>) -> String {
    let div = match &map["div"] {
        Value::Object(d) if d.contains_key("exact") => match scalar(&d["exact"]).as_str() {
            "0" => "0".to_string(),
            "1" => "H".to_string(),
            "-1" => "-H".to_string(),
            a => format!("{a}H"),
        },
        Value::Object(d) => format!("[Δ.H={}, Δ²={}]", scalar(&d["hdeg"]), scalar(&d["sq"])),
        other => scalar(other),
    };
    format!("({}, {}, {})", scalar(&map["r"]), div, scalar(&map["s"]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens() {
        let v = json!({"x": "1/2", "walls": [{"t": "0", "d": {"r": 1, "div": {"exact": -1}, "s": 3}}], "ok": true});
        assert_eq!(text(&v), "ok: true\nwalls[0].d: (1, -H, 3)\nwalls[0].t: 0\nx: 1/2\n");
        assert_eq!(text(&json!([[1, 3], [2, 2]])), "[0]: (1, 3)\n[1]: (2, 2)\n");
    }
}
