//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p escqkd --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use escqkd::attacks::{
    average_clone_fidelity, bb84_reference_cloner, clone_overlaps, clone_symmetry_penalty, optimize_cloner,
    paper_trine_cloner, AnnealConfig, AttackSpec,
};
use escqkd::frames::{entangled_realization, frame_potential, make_bb84, make_simplex, make_trine, povm_from_frame};
use escqkd::info::{key_rate_bounds, mutual_information, observed_error_rate, JointDistribution, Var};
use escqkd::rates::{compare, tolerable_error, uniform_grid, Bound, Scenario, THRESHOLD_TOL};
use escqkd::Protocol;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Check {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} (tol {tol:e})")
    })
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn frame_algebra() -> Check {
    let trine = make_trine();
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                close("trine overlap", trine.state(j).overlap_sq(trine.state(k)), 0.25, 1e-12)?;
            }
        }
    }
    close(
        "V_1(trine)",
        frame_potential(&trine, 1).map_err(|e| e.to_string())?,
        4.5,
        1e-12,
    )?;
    close(
        "V_1(bb84)",
        frame_potential(&make_bb84(), 1).map_err(|e| e.to_string())?,
        8.0,
        1e-12,
    )?;

    let mut frames = vec![trine, make_bb84()];
    for d in 2..=5 {
        frames.push(make_simplex(d).map_err(|e| e.to_string())?);
    }
    for f in &frames {
        let povm = povm_from_frame(f).map_err(|e| e.to_string())?;
        ensure(povm.identity_residual() <= 1e-12, || {
            format!("{} POVM residual {:e}", f.label(), povm.identity_residual())
        })?;
        let phi = entangled_realization(f).map_err(|e| e.to_string())?;
        let target = DMatrix::<Complex64>::identity(f.dim(), f.dim()) / Complex64::from(f.dim() as f64);
        let r = max_abs_diff(&phi.reduced_a(), &target).max(max_abs_diff(&phi.reduced_b(), &target));
        ensure(r <= 1e-10, || format!("{} reduced-state residual {r:e}", f.label()))?;
    }
    Ok(())
}

fn ir(protocol: Protocol, q: f64) -> Result<JointDistribution, String> {
    AttackSpec::intercept_resend(q)
        .and_then(|a| a.joint(protocol))
        .map_err(|e| e.to_string())
}

fn clone_attack(protocol: Protocol, q: f64) -> Result<JointDistribution, String> {
    let u = match protocol {
        Protocol::Trine => paper_trine_cloner(),
        Protocol::Bb84 => bb84_reference_cloner(),
    };
    AttackSpec::clone(q, u)
        .and_then(|a| a.joint(protocol))
        .map_err(|e| e.to_string())
}

fn no_eavesdropping() -> Check {
    let trine = key_rate_bounds(&ir(Protocol::Trine, 0.0)?);
    let expected = 3f64.log2() - 1.0;
    close("trine lower", trine.lower, expected, 1e-9)?;
    close("trine upper", trine.upper, expected, 1e-9)?;
    let bb84 = key_rate_bounds(&ir(Protocol::Bb84, 0.0)?);
    close("bb84 lower", bb84.lower, 0.5, 1e-9)?;
    close("bb84 upper", bb84.upper, 0.5, 1e-9)?;
    ensure(trine.lower > bb84.lower, || "trine intercept not above bb84".into())
}

// Squared overlaps between trine states (T) and dual-trine states (D), from
// the geometry alone: T-T and D-D are 1 on the diagonal and 1/4 otherwise,
// T-D is 0 on the diagonal and 3/4 otherwise.
fn same_family(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.25
    }
}

fn cross_family(i: usize, j: usize) -> f64 {
    if i == j {
        0.0
    } else {
        0.75
    }
}

fn intercept_resend_statistics() -> Check {
    let j = ir(Protocol::Trine, 1.0)?;
    ensure(j.sizes() == [3, 3, 6], || format!("trine q=1 sizes {:?}", j.sizes()))?;
    for a in 0..3 {
        for b in 0..3 {
            for e in 0..6 {
                let want = if e < 3 {
                    2.0 / 27.0 * cross_family(a, e) * same_family(e, b)
                } else {
                    2.0 / 27.0 * same_family(a, e - 3) * cross_family(e - 3, b)
                };
                close(&format!("p({a},{b},{e})"), j.get(a, b, e), want, 1e-12)?;
            }
        }
    }
    for q in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        let t = observed_error_rate(&ir(Protocol::Trine, q)?, Protocol::Trine).map_err(|e| e.to_string())?;
        close(&format!("trine E({q})"), t, q / 6.0, 1e-10)?;
        let b = observed_error_rate(&ir(Protocol::Bb84, q)?, Protocol::Bb84).map_err(|e| e.to_string())?;
        close(&format!("bb84 E({q})"), b, q / 8.0, 1e-10)?;
    }
    let iae = mutual_information(&j, Var::A, Var::E);
    let ibe = mutual_information(&j, Var::B, Var::E);
    close("I(A:E) - I(B:E)", iae - ibe, 0.0, 1e-9)
}

fn thresholds() -> Check {
    let trine = Scenario::intercept_resend(Protocol::Trine);
    let bb84 = Scenario::intercept_resend(Protocol::Bb84);
    let t = tolerable_error(&trine, Bound::Lower, THRESHOLD_TOL).map_err(|e| e.to_string())?;
    ensure((0.08..=0.10).contains(&t.error_rate), || {
        format!("trine threshold {} outside [0.08, 0.10]", t.error_rate)
    })?;
    let b = tolerable_error(&bb84, Bound::Lower, THRESHOLD_TOL).map_err(|e| e.to_string())?;
    ensure(b.error_rate < t.error_rate, || {
        format!("bb84 threshold {} not below trine {}", b.error_rate, t.error_rate)
    })?;
    let grid = uniform_grid(101).map_err(|e| e.to_string())?;
    let report = compare(&trine, &bb84, &grid).map_err(|e| e.to_string())?;
    ensure(report.error_grid.len() == 101, || {
        "common grid is not 101 points".into()
    })?;
    ensure(
        report.lower == escqkd::rates::Dominance::First && report.upper == escqkd::rates::Dominance::First,
        || format!("dominance lower {:?}, upper {:?}", report.lower, report.upper),
    )
}

fn cloning_fixtures() -> Check {
    let u = paper_trine_cloner();
    ensure(u.unitarity_residual() <= 1e-14, || {
        format!("unitarity residual {:e}", u.unitarity_residual())
    })?;
    let overlaps = clone_overlaps(&u, &make_trine()).map_err(|e| e.to_string())?;
    for w in overlaps.windows(2) {
        close("per-state overlap spread", w[0] - w[1], 0.0, 1e-12)?;
    }
    for protocol in Protocol::ALL {
        for q in uniform_grid(101).map_err(|e| e.to_string())? {
            let lower = key_rate_bounds(&clone_attack(protocol, q)?).lower;
            ensure(lower > 0.0, || {
                format!("{protocol} clone lower bound {lower} at q = {q}")
            })?;
        }
    }
    let b = key_rate_bounds(&clone_attack(Protocol::Trine, 1.0)?);
    close("I(A:E) - I(A:B)", b.i_ae - b.i_ab, 0.0, 1e-9)?;
    ensure(b.i_be < b.i_ab, || {
        format!("I(B:E) = {} not below I(A:B) = {}", b.i_be, b.i_ab)
    })
}

fn optimizer_reproduction() -> Check {
    let config = AnnealConfig::default();
    let trine = make_trine();
    let u = paper_trine_cloner();
    let reference = average_clone_fidelity(&u, &trine).map_err(|e| e.to_string())?
        - config.penalty_weight * clone_symmetry_penalty(&u, &trine).map_err(|e| e.to_string())?;
    let t = optimize_cloner(&trine, &config).map_err(|e| e.to_string())?;
    ensure(t.objective >= reference - 1e-3, || {
        format!("trine objective {} below reference {reference} - 1e-3", t.objective)
    })?;
    ensure(t.penalty < 1e-6, || format!("trine penalty {:e}", t.penalty))?;
    let b = optimize_cloner(&make_bb84(), &config).map_err(|e| e.to_string())?;
    ensure(b.penalty < 1e-6, || format!("bb84 penalty {:e}", b.penalty))?;
    close("bb84 - trine objective", b.objective - t.objective, 0.0, 2e-3)
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_escqkd"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(output.status.success(), || {
        format!("escqkd {args:?} failed: {}", String::from_utf8_lossy(&output.stderr))
    })?;
    Ok(output.stdout)
}

fn snapshot(dir: &Path, args: &[&str], files: &[&str]) -> Result<Vec<Vec<u8>>, String> {
    let mut out = vec![run_cli(dir, args)?];
    for f in files {
        out.push(std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))?);
    }
    Ok(out)
}

fn determinism() -> Check {
    let cases: [(&[&str], &[&str]); 2] = [
        (
            &["fig1", "--out", "fig1"],
            &[
                "fig1/trine_intercept-resend.csv",
                "fig1/bb84_intercept-resend.csv",
                "fig1/fig1.gp",
            ],
        ),
        (&["clone-opt", "--seed", "42", "--out", "u.txt"], &["u.txt"]),
    ];
    for (args, files) in cases {
        let first = tempfile::tempdir().map_err(|e| e.to_string())?;
        let second = tempfile::tempdir().map_err(|e| e.to_string())?;
        let a = snapshot(first.path(), args, files)?;
        let b = snapshot(second.path(), args, files)?;
        ensure(a == b, || format!("escqkd {args:?} output differs between runs"))?;
    }
    Ok(())
}

fn random_joint(rng: &mut ChaCha8Rng) -> JointDistribution {
    let sizes = [rng.random_range(1..5), rng.random_range(1..5), rng.random_range(1..7)];
    let mut w: Vec<f64> = (0..sizes.iter().product())
        .map(|_| {
            if rng.random::<f64>() < 0.2 {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    JointDistribution::new(sizes, w.into_iter().map(|x| x / total).collect()).unwrap()
}

fn padded(j: &JointDistribution, ne: usize) -> impl Fn(usize, usize, usize) -> f64 + '_ {
    move |a, b, e| {
        if e < j.sizes()[2] && e < ne {
            j.get(a, b, e)
        } else {
            0.0
        }
    }
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let j = random_joint(&mut rng);
        for (x, y) in [(Var::A, Var::B), (Var::A, Var::E), (Var::B, Var::E)] {
            let xy = mutual_information(&j, x, y);
            let yx = mutual_information(&j, y, x);
            ensure(xy >= -1e-12, || format!("case {case}: I({x:?}:{y:?}) = {xy}"))?;
            close(&format!("case {case}: MI symmetry"), xy, yx, 1e-12)?;
        }
        let b = key_rate_bounds(&j);
        ensure(b.lower <= b.upper + 1e-12, || {
            format!("case {case}: lower {} > upper {}", b.lower, b.upper)
        })?;
    }

    type Attack = fn(Protocol, f64) -> Result<JointDistribution, String>;
    let attacks: [(&str, Attack); 2] = [("intercept-resend", ir), ("clone", clone_attack)];
    for (name, attack) in attacks {
        for protocol in Protocol::ALL {
            let zero = attack(protocol, 0.0)?;
            let full = attack(protocol, 1.0)?;
            let [na, nb, ne] = zero.sizes();
            let (p0, p1) = (padded(&zero, ne), padded(&full, ne));
            let e0 = observed_error_rate(&zero, protocol).map_err(|e| e.to_string())?;
            let e1 = observed_error_rate(&full, protocol).map_err(|e| e.to_string())?;
            for q in [0.05, 0.25, 0.5, 0.8, 0.95] {
                let mid = attack(protocol, q)?;
                ensure(mid.sizes() == zero.sizes(), || {
                    format!("{protocol} {name}: alphabet changed at q = {q}")
                })?;
                for a in 0..na {
                    for b in 0..nb {
                        for e in 0..ne {
                            let want = (1.0 - q) * p0(a, b, e) + q * p1(a, b, e);
                            close(
                                &format!("{protocol} {name} p({a},{b},{e}) at q={q}"),
                                mid.get(a, b, e),
                                want,
                                1e-10,
                            )?;
                        }
                    }
                }
                let err = observed_error_rate(&mid, protocol).map_err(|e| e.to_string())?;
                close(
                    &format!("{protocol} {name} E({q})"),
                    err,
                    (1.0 - q) * e0 + q * e1,
                    1e-10,
                )?;
            }
        }
    }
    Ok(())
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            name: "1. frame algebra",
            limit: secs(1),
            check: frame_algebra,
        },
        Criterion {
            name: "2. no-eavesdropping rates",
            limit: secs(1),
            check: no_eavesdropping,
        },
        Criterion {
            name: "3. intercept-resend statistics",
            limit: secs(1),
            check: intercept_resend_statistics,
        },
        Criterion {
            name: "4. thresholds and dominance",
            limit: secs(5),
            check: thresholds,
        },
        Criterion {
            name: "5. cloning fixtures",
            limit: secs(1),
            check: cloning_fixtures,
        },
        Criterion {
            name: "6. optimizer reproduction",
            limit: secs(60),
            check: optimizer_reproduction,
        },
        Criterion {
            name: "7. determinism",
            limit: None,
            check: determinism,
        },
        Criterion {
            name: "8. property suites",
            limit: None,
            check: property_suites,
        },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut result = (c.check)();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, c.limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(()) => println!("[PASS] {} ({elapsed:.2?})", c.name),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {} ({elapsed:.2?}): {msg}", c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
