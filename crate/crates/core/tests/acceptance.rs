//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use mukai_forge::atlas::{
    classify_rotation_involutions, expected_rotation_involutions, family_triple, fibonacci_solutions,
    fixed_pair_family, fixed_pair_of_triple, is_twist_involution, og10_check, vieta_solve,
};
use mukai_forge::charge::{fixed_pair, gm_family_1, gm_family_2, quartic_family, CharteredFamily, FixedPair};
use mukai_forge::kuznetsov::{fiber, forg, inf, KuLattice};
use mukai_forge::matrix::{self, hnf};
use mukai_forge::num::{int, rat, Int, Rat};
use mukai_forge::surd::QuadSurd;
use mukai_forge::walls::{find_walls, Mode, WallType};
use mukai_forge::{hodge_feasible, pair, square, LatticeIsometry, MukaiVector};
use num_integer::Roots;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::{constructed_isometries, reverify_wall, v};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn c1_fixed_pairs() -> Check {
    let cases = [
        ("tau_q", LatticeIsometry::tau_q(), rat(1, 2), rat(-1, 2)),
        ("tau_1", LatticeIsometry::tau_1(), rat(1, 5), rat(-2, 5)),
        ("tau_2", LatticeIsometry::tau_2(), rat(1, 5), rat(-3, 5)),
    ];
    for (name, t, x, y) in cases {
        let want = FixedPair::Unique { x: QuadSurd::rational(x), y };
        let got = fixed_pair(&t);
        ensure!(got == want, "{name}: {got:?}");
    }
    Ok(())
}

fn c2_fixed_lattices() -> Check {
    let rows = |vs: &[MukaiVector]| hnf(&vs.iter().map(|b| b.coords().unwrap()).collect::<Vec<_>>());
    let cases = [
        ("tau_q", LatticeIsometry::tau_q(), [v(1, 0, -1), v(1, -1, 1)]),
        ("tau_1", LatticeIsometry::tau_1(), [v(1, 0, -1), v(2, -1, 2)]),
        ("tau_2", LatticeIsometry::tau_2(), [v(1, -1, 4), v(-2, 1, -2)]),
    ];
    for (name, t, span) in cases {
        let got = t.fixed_lattice();
        ensure!(rows(&got) == rows(&span), "{name}: fixed lattice {got:?}");
        for b in &got {
            ensure!(t.apply(b).unwrap() == *b, "{name} moves {b}");
        }
    }
    Ok(())
}

fn c3_composites() -> Check {
    // closed formulas on (r, a, s) with Δ = aH, Δ·H = 2d·a
    let tau_q = |r: i64, a: i64, s: i64| {
        let dh = 4 * a;
        v(-r - 2 * s - dh, r + s + dh - a, -2 * r - s - dh)
    };
    let tau_1 = |r: i64, a: i64, s: i64| {
        let dh = 10 * a;
        v(-4 * r - 5 * s - 2 * dh, 2 * r + 2 * s + dh - a, -5 * r - 4 * s - 2 * dh)
    };
    let tau_2 = |r: i64, a: i64, s: i64| {
        let dh = 10 * a;
        v(-9 * r - 5 * s - 3 * dh, 6 * r + 3 * s + 2 * dh - a, -20 * r - 9 * s - 6 * dh)
    };
    let tw = |r, a, s, d| LatticeIsometry::twist(&v(r, a, s), d).unwrap();
    let pi_q = {
        let step = LatticeIsometry::tensor_h(2).then(&tw(1, 0, 1, 2));
        step.then(&step).then(&LatticeIsometry::shift(2))
    };
    let pi_1 = LatticeIsometry::tensor_h(5).then(&tw(2, 1, 3, 5)).then(&tw(1, 0, 1, 5)).then(&LatticeIsometry::shift(5));
    let pi_2 = LatticeIsometry::tensor_h(5).then(&tw(1, 0, 1, 5)).then(&tw(2, -1, 3, 5)).then(&LatticeIsometry::shift(5));
    let cases: [(&str, LatticeIsometry, &dyn Fn(i64, i64, i64) -> MukaiVector); 3] =
        [("Π_q", pi_q, &tau_q), ("Π_1", pi_1, &tau_1), ("Π_2", pi_2, &tau_2)];
    for (name, comp, formula) in cases {
        for (r, a, s) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
            let got = comp.apply(&v(r, a, s)).unwrap();
            ensure!(got == formula(r, a, s), "{name} on ({r},{a},{s}): {got}");
        }
    }
    ensure!(LatticeIsometry::tau_q().apply(&v(0, 0, 1)).unwrap() == v(-2, 1, -1), "tau_q(0,0,1)");
    Ok(())
}

fn c4_kuznetsov() -> Check {
    for lat in KuLattice::ALL {
        let d = lat.degree();
        for (a, b) in [(1, 0), (0, 1)] {
            let c = lat.class(a, b);
            let back = forg(lat, &inf(lat, &c).unwrap(), d).unwrap();
            ensure!(back == lat.class(2 * a, 2 * b), "{lat}: forg(inf{c}) = {back}");
        }
        let tau = lat.involution();
        let mut run = runner(100);
        run.run(&(-60i64..=60, -60i64..=60, -60i64..=60), |(r, a, s)| {
            let x = v(r, a, s);
            let lhs = inf(lat, &forg(lat, &x, d).unwrap()).unwrap();
            let rhs = x.add(&tau.apply(&x).unwrap(), d).unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| format!("{lat}: {e}"))?;
    }
    Ok(())
}

fn c5_fibers() -> Check {
    let q = KuLattice::Qds;
    let g = KuLattice::Gm1;
    let cases = [
        (q, q.class(0, -1), vec![v(1, 0, 0), v(-1, 1, -2)]),
        (q, q.class(-2, 0), vec![v(-1, 1, -3), v(1, 0, -1), v(3, -1, 1)]),
        (g, g.class(-1, 0), vec![v(3, -1, 2), v(-2, 1, -3)]),
    ];
    for (lat, target, mut want) in cases {
        want.sort();
        let got = fiber(lat, &target, lat.degree(), Mode::Exact, -2).map_err(|e| e.to_string())?;
        ensure!(got == want, "{lat} over {target}: {got:?}");
    }
    Ok(())
}

fn c6_walls() -> Check {
    let (zero, ten) = (rat(0, 1), rat(10, 1));
    let run = |f: &CharteredFamily, x: &MukaiVector, d| find_walls(f, x, d, Mode::Exact, &zero, &ten, None).map_err(|e| e.to_string());
    let pairs = |w: &mukai_forge::walls::WallReport| (w.t.0.clone(), w.destabilizer.clone(), w.quotient.clone(), w.classification.kind);

    let u1 = run(&quartic_family(), &v(1, 0, -1), 2)?;
    ensure!(u1.walls.is_empty() && u1.certified, "u1: {} walls, certified {}", u1.walls.len(), u1.certified);

    let two_u1 = run(&quartic_family(), &v(2, 0, -2), 2)?;
    let got: Vec<_> = two_u1.walls.iter().map(pairs).collect();
    ensure!(got == vec![(rat(0, 1), v(3, -1, 1), v(-1, 1, -3), WallType::Flopping)], "2u1: {got:?}");
    ensure!(two_u1.walls.iter().all(|w| !w.totally_semistable.totally_semistable), "2u1 wall marked totally semistable");

    let line = run(&quartic_family(), &v(0, 1, -2), 2)?;
    let got: Vec<_> = line.walls.iter().map(pairs).collect();
    let want = vec![
        (rat(0, 1), v(1, 0, 0), v(-1, 1, -2), WallType::Divisorial),
        (rat(1, 1), v(1, 0, 1), v(-1, 1, -3), WallType::Flopping),
    ];
    ensure!(got == want, "(0,H,-2): {got:?}");

    let gm = run(&gm_family_2(), &v(1, 0, -2), 5)?;
    let got: Vec<_> = gm.walls.iter().map(pairs).collect();
    ensure!(got == vec![(rat(1, 5), v(2, -1, 3), v(-1, 1, -5), WallType::Flopping)], "(1,0,-2): {got:?}");

    let none = run(&gm_family_2(), &v(2, -1, 2), 5)?;
    ensure!(none.walls.is_empty() && none.certified, "(2,-H,2): {} walls", none.walls.len());
    Ok(())
}

fn c7_appendix() -> Check {
    let rot = classify_rotation_involutions(50, 12);
    ensure!(rot == expected_rotation_involutions(50, 12), "rotation sweep: {rot:?}");
    ensure!(rot.iter().all(|&(d, _)| d <= 3), "rotation sweep reports d ≥ 4");

    let fam = fibonacci_solutions(10).map_err(|e| e.to_string())?;
    ensure!(fam.len() == 12, "{} triples", fam.len());
    ensure!((fam[0].a, fam[0].b, fam[0].c) == (2, -1, 3) && (fam[1].a, fam[1].b, fam[1].c) == (3, -1, 2), "n=0 triples");
    for t in &fam {
        ensure!(2 * t.b * t.b * 5 - 2 * t.a * t.c == -2, "{t:?} not spherical");
        ensure!(t.condition(), "{t:?} fails the involution condition");
        ensure!(is_twist_involution(t).unwrap(), "{t:?}: matrix square is not the identity");
    }

    // oracle: y = (t·x − √((t²−4)x² − 4))/2 is the only candidate with y ≤ x
    let brute = |t: i64, bound: u64| -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for x in 1..=bound as i128 {
            let disc = (t as i128 * t as i128 - 4) * x * x - 4;
            if disc < 0 {
                continue;
            }
            let root = disc.sqrt();
            if root * root != disc || (t as i128 * x - root) % 2 != 0 {
                continue;
            }
            let y = (t as i128 * x - root) / 2;
            if y >= 1 && y <= x {
                out.push((x as u64, y as u64));
            }
        }
        out
    };
    let got = vieta_solve(3, 1_000_000);
    ensure!(got == brute(3, 1_000_000), "vieta t=3 differs from brute force: {got:?}");
    for t in [1, 2, 4, 5, 6] {
        ensure!(vieta_solve(t, 10_000).is_empty() && brute(t, 10_000).is_empty(), "vieta t={t} not empty");
    }
    Ok(())
}

fn c8_og10() -> Check {
    let rep = og10_check();
    ensure!(rep.passed, "no equivalence witness");
    let g = matrix::from_i64(&[&[-4, 6], &[6, -6]]);
    ensure!(rep.gram.gram == g, "Gram {:?}", rep.gram.gram);
    let p = matrix::from_i64(&[&[1, 0], &[1, 1]]);
    ensure!(matrix::congruence(&g, &p) == matrix::from_i64(&[&[2, 0], &[0, -6]]), "PᵀGP ≠ diag(2,−6)");
    ensure!(rep.det.0 == int(-12), "det {}", rep.det.0);
    Ok(())
}

fn exact_vec(r: i64) -> impl Strategy<Value = MukaiVector> {
    (-r..=r, -r..=r, -r..=r).prop_map(|(a, b, c)| v(a, b, c))
}

fn abstract_vec(d: u32) -> impl Strategy<Value = MukaiVector> {
    (-20i64..=20, -40i64..=40, -200i64..=200, -20i64..=20)
        .prop_map(|(r, h, sq, s)| MukaiVector::abstract_vector(r, h, 2 * sq, s))
        .prop_filter("Hodge feasible", move |x| hodge_feasible(&x.div, d))
}

fn c9_properties() -> Check {
    for d in [1u32, 2, 3, 5] {
        let isos = constructed_isometries(d);
        let n = isos.len();
        runner(1000)
            .run(&(0..n, exact_vec(50), exact_vec(50)), |(i, x, y)| {
                let t = &isos[i].1;
                prop_assert_eq!(pair(&t.apply(&x).unwrap(), &t.apply(&y).unwrap(), d).unwrap(), pair(&x, &y, d).unwrap());
                Ok(())
            })
            .map_err(|e| format!("pairing preservation, d={d}: {e}"))?;
        runner(1000)
            .run(&(0..n, abstract_vec(d)), |(i, x)| {
                let img = isos[i].1.apply(&x).unwrap();
                prop_assert!(hodge_feasible(&img.div, d));
                prop_assert_eq!(square(&img, d), square(&x, d));
                Ok(())
            })
            .map_err(|e| format!("Hodge closure, d={d}: {e}"))?;
        runner(1000)
            .run(&prop_oneof![exact_vec(1000), abstract_vec(d)], |x| {
                prop_assert!((square(&x, d) % Int::from(2)) == Int::from(0));
                Ok(())
            })
            .map_err(|e| format!("square parity, d={d}: {e}"))?;
    }
    let families = [(quartic_family(), 2u32), (gm_family_1(), 5), (gm_family_2(), 5)];
    runner(1000)
        .run(&(0..3usize, exact_vec(4), 0i64..=12), |(i, x, hi)| {
            let (f, d) = &families[i];
            let (_, im) = mukai_forge::charge::family_eval(f, &x, *d).unwrap();
            prop_assume!(im != Rat::from(int(0)));
            let x = if im < Rat::from(int(0)) { x.neg() } else { x };
            let (lo, hi) = (rat(0, 1), rat(hi, 4));
            let search = find_walls(f, &x, *d, Mode::Exact, &lo, &hi, None).unwrap();
            for w in &search.walls {
                if let Err(e) = reverify_wall(f, &x, *d, &lo, &hi, w) {
                    return Err(TestCaseError::fail(e));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("wall re-verification: {e}"))?;
    Ok(())
}

fn c10_cross_solver() -> Check {
    for n in (0..=10).step_by(2) {
        let t = family_triple(n).map_err(|e| e.to_string())?;
        let solver = fixed_pair_of_triple(&t).map_err(|e| e.to_string())?;
        let formula = fixed_pair_family(n).map_err(|e| e.to_string())?;
        ensure!(solver == Some(formula.clone()), "n={n}: solver {solver:?}, formula {formula:?}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("fixed pairs of tau_q, tau_1, tau_2", c1_fixed_pairs),
        ("fixed lattices up to Hermite form", c2_fixed_lattices),
        ("generator composites match the closed formulas", c3_composites),
        ("forg∘inf = 2 and inf∘forg = 1 + τ", c4_kuznetsov),
        ("exact fibers over −μ2, −2μ1, −κ1", c5_fibers),
        ("wall examples and classifications", c6_walls),
        ("rotation sweep, Fibonacci families, Vieta jumping", c7_appendix),
        ("rank-2 invariant lattice equivalence", c8_og10),
        ("randomized property suites", c9_properties),
        ("family fixed pairs agree with the solver", c10_cross_solver),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({:.2?})", i + 1, start.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
