use mukai_forge::atlas::{self, TwistTriple};
use mukai_forge::charge::{self, ChargeParams, FixedPair};
use mukai_forge::kuznetsov::{self, KuLattice};
use mukai_forge::num::{fmt_rat, json_int_matrix, JsonInt, Rat};
use mukai_forge::surd::QuadSurd;
use mukai_forge::walls::{self, Mode};
use mukai_forge::{pair, square};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::{replay, AtlasCmd, ChargeCmd, CliError, Command, IsometryArgs, KuCmd, ModeArg, PairArgs, Report, WallsCmd};

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn rat(q: &Rat) -> Value {
    Value::String(fmt_rat(q))
}

/// Rational surds print as plain rational strings.
fn surd(x: &QuadSurd) -> Value {
    match x.as_rational() {
        Some(q) => rat(q),
        None => to_json(x),
    }
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Abstract => Mode::Abstract,
    }
}

fn lattice(name: &str) -> Result<KuLattice, CliError> {
    Ok(name.parse::<KuLattice>()?)
}

pub fn run(cmd: &Command, cfg: &Config) -> Result<Report, CliError> {
    match cmd {
        Command::Pair(a) => pair_cmd(a, cfg),
        Command::Isometry(a) => isometry_cmd(a, cfg),
        Command::Charge(c) => charge_cmd(c, cfg),
        Command::Walls(c) => walls_cmd(c, cfg),
        Command::Ku(c) => ku_cmd(c),
        Command::Atlas(c) => atlas_cmd(c),
        Command::Replay(a) => replay::run(&a.suite, a.cases.as_deref()),
    }
}

fn pair_cmd(a: &PairArgs, cfg: &Config) -> Result<Report, CliError> {
    let d = cfg.degree(a.degree.degree, a.degree.surface.as_deref())?;
    a.v.check_feasible(d)?;
    let mut out = json!({ "degree": d, "v": a.v, "square_v": to_json(&JsonInt(square(&a.v, d))) });
    if let Some(w) = &a.w {
        w.check_feasible(d)?;
        out["w"] = to_json(w);
        out["square_w"] = to_json(&JsonInt(square(w, d)));
        out["pairing"] = to_json(&JsonInt(pair(&a.v, w, d)?));
    }
    Ok(Report::ok(out))
}

fn isometry_cmd(a: &IsometryArgs, cfg: &Config) -> Result<Report, CliError> {
    let d = cfg.degree(a.degree.degree, a.degree.surface.as_deref())?;
    let t = cfg.isometry(&a.name, d)?;
    let mut out = json!({
        "name": a.name,
        "isometry": t,
        "exact_matrix": json_int_matrix(&t.exact_matrix()),
    });
    if let Some(v) = &a.apply {
        out["image"] = to_json(&t.apply(v)?);
    }
    if a.fixed_lattice {
        out["fixed_lattice"] = to_json(&t.fixed_lattice());
    }
    if let Some(n) = a.order {
        out["order"] = to_json(&t.order(n));
    }
    if let Some(v) = &a.perp {
        let rest = t.restrict_to_perp(v)?;
        out["perp"] = to_json(&rest);
        out["perp_fixed"] = to_json(&rest.fixed_part());
    }
    Ok(Report::ok(out))
}

fn charge_cmd(c: &ChargeCmd, cfg: &Config) -> Result<Report, CliError> {
    let out = match c {
        ChargeCmd::FixedPair { isometry, degree } => {
            let d = cfg.degree(degree.degree, degree.surface.as_deref())?;
            let t = cfg.isometry(isometry, d)?;
            let fp = charge::fixed_pair(&t);
            match &fp {
                FixedPair::Unique { x, y } => json!({ "x": surd(x), "y": rat(y), "status": fp.status() }),
                _ => json!({ "status": fp.status() }),
            }
        }
        ChargeCmd::Eval { x, y, vector, degree } => {
            let d = cfg.degree(degree.degree, degree.surface.as_deref())?;
            let p = ChargeParams::new(x.clone(), y.clone())?;
            let (re, im) = charge::eval(&p, vector, d)?;
            json!({ "re": rat(&re), "im": rat(&im) })
        }
        ChargeCmd::Obstruction { x, y, degree, bx } => {
            let d = cfg.degree(degree.degree, degree.surface.as_deref())?;
            let p = ChargeParams::new(x.clone(), y.clone())?;
            let ob = charge::spherical_obstruction(&p, d, *bx)?;
            json!({ "hits": ob.hits, "certified": ob.certified, "status": ob.status() })
        }
    };
    Ok(Report::ok(out))
}

fn family_degree(cfg: &Config, family: &str, degree: Option<u32>) -> Result<(charge::CharteredFamily, u32), CliError> {
    let (f, fd) = cfg.family(family)?;
    match degree {
        Some(d) if d != fd => Err(mukai_forge::Error::DegreeMismatch { expected: fd, found: d }.into()),
        _ => Ok((f, fd)),
    }
}

fn walls_cmd(c: &WallsCmd, cfg: &Config) -> Result<Report, CliError> {
    let out = match c {
        WallsCmd::Find { family, vector, degree, t, mode: m, bound } => {
            let (f, d) = family_degree(cfg, family, *degree)?;
            let search = walls::find_walls(&f, vector, d, mode(*m), &t.0, &t.1, *bound)?;
            json!({
                "family": family,
                "vector": vector,
                "t_range": [rat(&t.0), rat(&t.1)],
                "mode": mode(*m),
                "search": search,
            })
        }
        WallsCmd::Hw { family, vector, degree, t0 } => {
            let (f, d) = family_degree(cfg, family, *degree)?;
            let hw = walls::hyperbolic_lattice(&f, vector, d, t0)?;
            let class = walls::classify_wall(&hw, vector, d)?;
            json!({ "t0": rat(t0), "hw": hw, "classification": class })
        }
    };
    Ok(Report::ok(out))
}

fn ku_cmd(c: &KuCmd) -> Result<Report, CliError> {
    let out = match c {
        KuCmd::Fiber { lattice: name, target, mode: m, square_min } => {
            let lat = lattice(name)?;
            let target = lat.class(target.0, target.1);
            let fib = kuznetsov::fiber(lat, &target, lat.degree(), mode(*m), *square_min)?;
            json!({ "lattice": lat, "target": target, "mode": mode(*m), "square_min": square_min, "fiber": fib })
        }
        KuCmd::Forg { lattice: name, vector } => {
            let lat = lattice(name)?;
            json!({ "lattice": lat, "vector": vector, "class": kuznetsov::forg(lat, vector, lat.degree())? })
        }
        KuCmd::Inf { lattice: name, class } => {
            let lat = lattice(name)?;
            let c = lat.class(class.0, class.1);
            json!({ "lattice": lat, "class": c, "vector": kuznetsov::inf(lat, &c)? })
        }
        KuCmd::Verify { lattice: name, samples, seed } => {
            let lats = if name == "all" { KuLattice::ALL.to_vec() } else { vec![lattice(name)?] };
            let reports = lats
                .into_iter()
                .map(|l| kuznetsov::verify_identities(l, *samples, *seed))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = reports.iter().all(|r| r.ok());
            let rep = json!({ "ok": ok, "reports": reports });
            return Ok(Report { code: if ok { 0 } else { 1 }, ..Report::ok(rep) });
        }
    };
    Ok(Report::ok(out))
}

fn atlas_cmd(c: &AtlasCmd) -> Result<Report, CliError> {
    let out = match c {
        AtlasCmd::Rotations { dmax, nmax } => to_json(&atlas::classify_rotation_involutions(*dmax, *nmax)),
        AtlasCmd::Fibonacci { nmax } => {
            let triples = atlas::fibonacci_solutions(*nmax)?;
            to_json(&triples.iter().map(|t| (t.a, t.b, t.c)).collect::<Vec<_>>())
        }
        AtlasCmd::Vieta { t, bound } => to_json(&atlas::vieta_solve(*t, *bound)),
        AtlasCmd::Og10 => to_json(&atlas::og10_check()),
        AtlasCmd::Twist { a, b, c, d } => {
            let t = TwistTriple::new(*a, *b, *c, *d)?;
            json!({
                "triple": t,
                "condition": t.condition(),
                "involution": atlas::is_twist_involution(&t)?,
            })
        }
        AtlasCmd::FamilyPair { n } => {
            let (x, y) = atlas::fixed_pair_family(*n)?;
            let t = atlas::family_triple(*n)?;
            let solver = atlas::fixed_pair_of_triple(&t)?;
            json!({
                "n": n,
                "triple": t,
                "formula": { "x": rat(&x), "y": rat(&y) },
                "solver": solver.as_ref().map(|(sx, sy)| json!({ "x": rat(sx), "y": rat(sy) })),
                "agree": solver == Some((x, y)),
            })
        }
    };
    Ok(Report::ok(out))
}
