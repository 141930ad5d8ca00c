//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use cftlab::conformal::InvariantQuantity;
use cftlab::invariants::IdentityId;
use cftlab::lie::{p_value, pn_table};
use cftlab::scalar::Scalar;
use cftlab::spinor::Dim;
use cftlab::suites::{
    conservation_checks, cross_form_checks, generator_checks, identity_checks, invariance_checks, quantity_checks,
    run_checks, wick_checks, Backend, Check, Config, Expect, SuiteReport, ALL_KINDS, STANEV_TOLERANCE,
};

const SEED: u64 = 20240611;

struct Verdict {
    pass: bool,
    detail: String,
}

fn exact(dim: Dim, trials: usize) -> Config {
    Config::new(dim, trials, SEED, Backend::Exact)
}

fn keep(checks: Vec<Check>, names: &[&str]) -> Vec<Check> {
    checks.into_iter().filter(|c| names.contains(&c.name.as_str())).collect()
}

/// Failed checks with counts, or a pass count.
fn summary(r: &SuiteReport) -> String {
    let bad: Vec<String> = r
        .checks
        .iter()
        .filter(|c| c.failures > 0)
        .map(|c| format!("{} ({}/{} failed, e.g. {})", c.check, c.failures, c.trials, short(&c.worst)))
        .collect();
    if bad.is_empty() {
        format!("{} checks x {} trials, all pass", r.checks.len(), r.trials)
    } else {
        bad.join("; ")
    }
}

fn short(s: &str) -> String {
    if s.len() > 40 {
        format!("{}...", &s[..40])
    } else {
        s.to_string()
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    use IdentityId::*;
    let four =
        [Ppp, Podd, Box4, Lrel, Tr4, Pconj, Rpp, PprOuter, PprMixed, ZetaNull, O1o2, Null, Inprod, Exch, Star, Fab];
    let three = [Gog, Zeta3d, Exch, Ppp];
    let names4: Vec<&str> = four.iter().map(|i| i.name()).collect();
    let names3: Vec<&str> = three.iter().map(|i| i.name()).collect();
    let c4 = exact(Dim::Four, 200);
    let c3 = exact(Dim::Three, 200);
    let r4 = run_checks("identities", &c4, &keep(identity_checks(&c4), &names4));
    let r3 = run_checks("identities", &c3, &keep(identity_checks(&c3), &names3));
    let t = start.elapsed();
    let count = r4.checks.len() + r3.checks.len();
    let ok = r4.passed() && r3.passed() && count == names4.len() + names3.len() && t < Duration::from_secs(60);
    Verdict {
        pass: ok,
        detail: format!("4D: {}; 3D: {}; {:.1} s (limit 60 s)", summary(&r4), summary(&r3), t.as_secs_f64()),
    }
}

fn criterion_2() -> Verdict {
    use InvariantQuantity::*;
    let cfg = exact(Dim::Four, 100);
    // RL is tested literally: invariance under arbitrary words.
    let q = vec![
        ("P12".to_string(), P(0, 1)),
        ("P21".to_string(), P(1, 0)),
        ("L3_12".to_string(), L(2, 0, 1)),
        ("RL13".to_string(), Rl(0)),
        ("RL23".to_string(), Rl(1)),
    ];
    let mut checks = quantity_checks(&cfg, "literal", &ALL_KINDS, q);
    checks.extend(keep(
        invariance_checks(&cfg),
        &["inversion_squared", "special_conformal", "covariance:RL13", "covariance:RL23"],
    ));
    let r = run_checks("invariance", &cfg, &checks);
    let covariant =
        ["covariance:RL13", "covariance:RL23"].iter().all(|n| r.outcome(n).is_some_and(|o| o.failures == 0));
    Verdict {
        pass: r.passed(),
        detail: format!("{}; RL covariance law (weight 1/rho, -x3^2) holds: {covariant}", summary(&r)),
    }
}

fn criterion_3() -> Verdict {
    let cfg = exact(Dim::Four, 100);
    let checks = generator_checks(&cfg);
    let controls = checks.iter().filter(|c| c.expect == Expect::NonZero).count();
    let r = run_checks("generator", &cfg, &checks);
    Verdict {
        pass: r.passed() && controls > 0,
        detail: format!("{}; {controls} wrong-dimension controls", summary(&r)),
    }
}

fn criterion_4() -> Verdict {
    let c4 = exact(Dim::Four, 100);
    let c3 = exact(Dim::Three, 100);
    let r4 = run_checks("conservation", &c4, &conservation_checks(&c4));
    let r3 = run_checks("conservation", &c3, &conservation_checks(&c3));
    let stanev = r4.outcome("divergence:STANEV4").expect("4D suite probes STANEV4");
    // Float residuals render as plain reals.
    let worst: f64 = stanev.worst.parse::<f64>().map(f64::abs).unwrap_or(f64::NAN);
    let flag = if worst <= STANEV_TOLERANCE { "within" } else { "outside" };
    Verdict {
        pass: r4.passed() && r3.passed(),
        detail: format!(
            "4D: {}; 3D: {}; STANEV4 divergence (informational) max {:.2e}, {flag} {:.0e}",
            summary(&r4),
            summary(&r3),
            worst,
            STANEV_TOLERANCE
        ),
    }
}

fn criterion_5() -> Verdict {
    let cfg = exact(Dim::Four, 100);
    match wick_checks(&cfg) {
        Ok(checks) => {
            let r = run_checks("wick", &cfg, &checks);
            Verdict { pass: r.passed(), detail: summary(&r) }
        }
        Err(e) => Verdict { pass: false, detail: format!("calibration failed: {e}") },
    }
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut problems = Vec::new();
    match pn_table(4, 6) {
        Ok(rows) => {
            for row in &rows {
                for e in &row.entries {
                    let positive = e.value.is_exact() && e.value.to_complex().re > 0.0;
                    let want_positive = e.m as usize >= row.n;
                    if e.value.is_zero() == want_positive || (want_positive && !positive) || !e.value.is_real() {
                        problems.push(format!("p_{}({}) = {}", row.n, e.m, e.value));
                    }
                }
                if !row.residuals_vanish() {
                    problems.push(format!("row {} falling-factorial residual nonzero", row.n));
                }
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    for m in 1..=6u32 {
        match p_value(1, m) {
            Ok(v) if v == Scalar::int(m as i64) => {}
            other => problems.push(format!("p_1({m}) = {other:?}")),
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(60) {
        problems.push("runtime over 60 s".into());
    }
    let detail = if problems.is_empty() {
        format!("n <= 4, m <= 6: sign pattern, fit and p_1(m) = m hold; {:.2} s", t.as_secs_f64())
    } else {
        problems.join("; ")
    };
    Verdict { pass: problems.is_empty(), detail }
}

fn criterion_7() -> Verdict {
    use IdentityId::*;
    let cfg = exact(Dim::Three, 200);
    let names: Vec<&str> = [Real3d, Ppp, Cyclic3d, Gam, Gog, Zeta3d].iter().map(|i| i.name()).collect();
    let mut checks = keep(identity_checks(&cfg), &names);
    checks.push(Check::new("real_spinors", Expect::Zero, |rng| {
        let f = cftlab::frame::random_frame(rng, Dim::Three, 3, cftlab::suites::DEFAULT_BOUND);
        let v = (0..3).flat_map(|i| [f.lam(i).clone(), f.lam_bar(i).clone()]).flatten().map(|c| c.im_part());
        Ok(cftlab::suites::Sample::new(cftlab::invariants::worst(v), f))
    }));
    let r = run_checks("3d", &cfg, &checks);
    Verdict { pass: r.passed() && r.checks.len() == names.len() + 1, detail: summary(&r) }
}

fn criterion_8() -> Verdict {
    let cfg = exact(Dim::Four, 100);
    match cross_form_checks(&cfg) {
        Ok(checks) => {
            let r = run_checks("cross-form", &cfg, &checks);
            Verdict { pass: r.passed(), detail: summary(&r) }
        }
        Err(e) => Verdict { pass: false, detail: format!("calibration failed: {e}") },
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("identity suite", criterion_1),
        ("conformal invariance", criterion_2),
        ("generator suite", criterion_3),
        ("conservation", criterion_4),
        ("wick oracle", criterion_5),
        ("lie model", criterion_6),
        ("3d reduction", criterion_7),
        ("cross-form equalities", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        if !v.pass {
            failed += 1;
        }
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {} ({:.1} s)", k + 1, v.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
