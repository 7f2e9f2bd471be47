#![allow(dead_code)]

use std::collections::BTreeSet;

use mukai_forge::atlas::fibonacci_solutions;
use mukai_forge::charge::{family_eval, CharteredFamily};
use mukai_forge::num::{int, Rat};
use mukai_forge::walls::{hyperbolic_lattice, WallReport};
use mukai_forge::{square, LatticeIsometry, MukaiVector};
use num_traits::{Signed, Zero};

pub fn v(r: i64, a: i64, s: i64) -> MukaiVector {
    MukaiVector::exact(r, a, s)
}

/// Every isometry the crate constructs for degree parameter d, with a label.
pub fn constructed_isometries(d: u32) -> Vec<(String, LatticeIsometry)> {
    let mut out = vec![
        ("identity".to_string(), LatticeIsometry::identity(d)),
        ("shift".to_string(), LatticeIsometry::shift(d)),
        ("tensor_h".to_string(), LatticeIsometry::tensor_h(d)),
        ("rotation".to_string(), LatticeIsometry::rotation(d)),
        ("twist(1,0,1)".to_string(), LatticeIsometry::twist(&v(1, 0, 1), d).unwrap()),
        ("twist(1,H,d+1)".to_string(), LatticeIsometry::twist(&v(1, 1, d as i64 + 1), d).unwrap()),
    ];
    match d {
        2 => out.push(("tau_q".into(), LatticeIsometry::tau_q())),
        5 => {
            out.push(("tau_1".into(), LatticeIsometry::tau_1()));
            out.push(("tau_2".into(), LatticeIsometry::tau_2()));
            out.push(("o_gm".into(), LatticeIsometry::o_gm()));
            for t in fibonacci_solutions(6).unwrap() {
                out.push((format!("-tau_U{:?}", (t.a, t.b, t.c)), t.isometry().unwrap()));
            }
        }
        _ => {}
    }
    let composite = out[2].1.then(&out[4].1).then(&out[1].1).inverse();
    out.push(("composite".into(), composite));
    out
}

/// Independent check of one report: decomposition, exact slope equality at t,
/// imaginary parts strictly between, both squares ≥ −2, membership in H_W.
pub fn reverify_wall(f: &CharteredFamily, target: &MukaiVector, d: u32, lo: &Rat, hi: &Rat, w: &WallReport) -> Result<(), String> {
    let t = &w.t.0;
    if t < lo || t > hi {
        return Err(format!("t = {t} outside [{lo}, {hi}]"));
    }
    let (re_v, im_v) = family_eval(f, target, d).map_err(|e| e.to_string())?;
    let hw = hyperbolic_lattice(f, target, d, t).map_err(|e| e.to_string())?;
    if hw.coordinates(target).is_none() {
        return Err("target not in H_W".into());
    }
    let mut pairs = vec![(w.destabilizer.clone(), w.quotient.clone())];
    pairs.extend(w.other_pairs.iter().map(|p| (p.destabilizer.clone(), p.quotient.clone())));
    for (a, b) in pairs {
        if a.add(&b, d).map_err(|e| e.to_string())? != *target {
            return Err(format!("{a} + {b} ≠ {target}"));
        }
        let (re_a, im_a) = family_eval(f, &a, d).map_err(|e| e.to_string())?;
        if !(im_a.is_positive() && im_a < im_v) {
            return Err(format!("im({a}) = {im_a} not inside (0, {im_v})"));
        }
        if re_a.eval(t) * &im_v != re_v.eval(t) * &im_a {
            return Err(format!("slopes of {a} and {target} differ at t = {t}"));
        }
        for x in [&a, &b] {
            if square(x, d) < int(-2) {
                return Err(format!("square({x}) < −2"));
            }
        }
        if hw.coordinates(&a).is_none() {
            return Err(format!("{a} not in H_W"));
        }
    }
    Ok(())
}

/// Brute-force walls: every exact w in the box with 0 < im(w) < im(v), slope
/// equality at some t in [lo, hi], and square(w), square(v − w) ≥ −2.
pub fn brute_walls(f: &CharteredFamily, target: &MukaiVector, d: u32, lo: &Rat, hi: &Rat, radius: i64) -> BTreeSet<(Rat, MukaiVector)> {
    let (re_v, im_v) = family_eval(f, target, d).unwrap();
    let mut out = BTreeSet::new();
    for r in -radius..=radius {
        for a in -radius..=radius {
            for s in -radius..=radius {
                let w = v(r, a, s);
                let (re_w, im_w) = family_eval(f, &w, d).unwrap();
                if !(im_w.is_positive() && im_w < im_v) {
                    continue;
                }
                let k = &re_w.slope.0 * &im_v - &re_v.slope.0 * &im_w;
                let c = &re_w.intercept.0 * &im_v - &re_v.intercept.0 * &im_w;
                if k.is_zero() {
                    continue;
                }
                let t = -c / k;
                if &t < lo || &t > hi {
                    continue;
                }
                let q = target.sub(&w, d).unwrap();
                if square(&w, d) >= int(-2) && square(&q, d) >= int(-2) {
                    out.insert((t, w));
                }
            }
        }
    }
    out
}

/// (t, class) for both members of every reported pair.
pub fn reported_classes(walls: &[WallReport]) -> BTreeSet<(Rat, MukaiVector)> {
    let mut out = BTreeSet::new();
    for w in walls {
        out.insert((w.t.0.clone(), w.destabilizer.clone()));
        out.insert((w.t.0.clone(), w.quotient.clone()));
        for p in &w.other_pairs {
            out.insert((w.t.0.clone(), p.destabilizer.clone()));
            out.insert((w.t.0.clone(), p.quotient.clone()));
        }
    }
    out
}
