mod common;

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fed_core::generators;
use fed_core::magic_state::{
    assign_thetas, total_energy, ClosedForm, ThetaAssignment, DEFAULT_ZZ_CAP,
};
use fed_core::matching::{self, FractionBox};
use fed_core::oracle::{
    build_chi, epr_lambda_max, optimize_thetas, verify_fm_bound, SpectrumOptions,
    VariationalOptions, P, Q, Z,
};
use fed_core::ratio::{self, certify, CertifyOptions};
use fed_core::rational::{int, ratio as q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, random_graph, random_matching};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Floating-point allowance when comparing two separately evaluated doubles.
const ROUNDING: f64 = 1e-12;

const REGULAR_TABLE: [(usize, f64, f64); 9] = [
    (2, 0.872, 0.324),
    (3, 0.894, 0.203),
    (4, 0.912, 0.147),
    (5, 0.924, 0.115),
    (6, 0.934, 0.0945),
    (7, 0.942, 0.080),
    (8, 0.948, 0.0692),
    (9, 0.953, 0.061),
    (10, 0.957, 0.0544),
];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(
        took < limit,
        format!("{detail}; took {took:.2?}, limit {limit:?}"),
    )?;
    Ok(format!("{detail} in {took:.2?}"))
}

fn regular_table() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        for (d, r_want, k_want) in REGULAR_TABLE {
            let sol = ratio::solve_rd(d).map_err(|e| e.to_string())?;
            let dr = (sol.r - r_want).abs();
            let dk = (sol.kappa_star - k_want).abs();
            ensure(
                dr <= 1e-3 && dk <= 1e-3,
                format!(
                    "d={d}: r={:.5} (want {r_want}), kappa={:.5} (want {k_want})",
                    sol.r, sol.kappa_star
                ),
            )?;
            worst = worst.max(dr).max(dk);
        }
        Ok(format!("d=2..10 max deviation {worst:.2e}"))
    })
}

fn golden_constants() -> Outcome {
    let sol = ratio::solve_r0();
    let r_want = ratio::PHI / 2.0;
    let k_want = 0.5 * ratio::PHI.ln();
    ensure(
        (sol.r - r_want).abs() <= 1e-4 && (sol.kappa_star - k_want).abs() <= 1e-4,
        format!("r0={:.6} kappa0={:.6}", sol.r, sol.kappa_star),
    )?;
    Ok(format!("r0={:.6} kappa0={:.6}", sol.r, sol.kappa_star))
}

fn monotonicity() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut prev = 0.0;
        for d in 2..=50 {
            let r = ratio::solve_rd(d).map_err(|e| e.to_string())?.r;
            ensure(r > prev, format!("r_{d}={r} not above r_{}={prev}", d - 1))?;
            prev = r;
        }
        Ok(format!("r_2 < ... < r_50 = {prev:.5}"))
    })
}

fn worked_examples() -> Outcome {
    let mut notes = Vec::new();

    let k36 = fixture("k36.edges");
    let qh = matching::qhfm(&k36).map_err(|e| e.to_string())?;
    let cert = certify(&k36, &qh, &CertifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        cert.guarantee >= 0.934,
        format!("K36 guarantee {:.5} < .934", cert.guarantee),
    )?;
    notes.push(format!("K36 guarantee {:.4}", cert.guarantee));

    let sol = ratio::solve_r_interval(0.2, 0.8).map_err(|e| e.to_string())?;
    ensure(
        (sol.r - 0.868).abs() <= 2e-3,
        format!("r_(1.25,5)={:.5}", sol.r),
    )?;
    notes.push(format!("r_(1.25,5)={:.4}", sol.r));

    let ex4 = fixture("example4.edges");
    ensure(ex4.edge_count() == 7, "example4 fixture must have 7 edges")?;
    let fbox = FractionBox::from_degrees(&q(5, 4), &int(5)).map_err(|e| e.to_string())?;
    let cfm = matching::constrained_fm(&ex4, &fbox).map_err(|e| e.to_string())?;
    ensure(
        *cfm.value() == q(13, 5),
        format!("constrained value {}", cfm.value()),
    )?;
    notes.push(format!("constrained FM {}", cfm.value()));

    let qh4 = matching::qhfm(&ex4).map_err(|e| e.to_string())?;
    let quality = matching::quality(&ex4, &qh4).map_err(|e| e.to_string())?;
    ensure(
        quality.s_hat == q(9, 10),
        format!("example4 s_hat {}", quality.s_hat),
    )?;
    notes.push(format!("example4 s_hat {}", quality.s_hat));

    let fig1 = fixture("fig1_book.edges");
    let qh1 = matching::qhfm(&fig1).map_err(|e| e.to_string())?;
    let quality = matching::quality(&fig1, &qh1).map_err(|e| e.to_string())?;
    ensure(
        fig1.edge_count() == 9
            && *qh1.value() == q(9, 5)
            && quality.mwfm_value == int(2)
            && quality.s_hat == q(54, 55),
        format!(
            "fig1: edges {} qhFM {} MWFM {} s_hat {}",
            fig1.edge_count(),
            qh1.value(),
            quality.mwfm_value,
            quality.s_hat
        ),
    )?;
    notes.push(format!("fig1 s_hat {}", quality.s_hat));
    Ok(notes.join(", "))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE0);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for case in 0..200 {
        let g = random_graph(&mut rng, 10, false);
        let thetas = (0..g.edge_count())
            .map(|_| rng.gen_range(0.0..=FRAC_PI_4))
            .collect();
        let th = ThetaAssignment::from_angles(&g, thetas).map_err(|e| e.to_string())?;
        let psi = build_chi(&g, &th, 10).map_err(|e| e.to_string())?;
        let cf = ClosedForm::new(&g, &th).map_err(|e| e.to_string())?;
        for (id, e) in g.edges().iter().enumerate() {
            let pairs = [
                (cf.qp(id), psi.expect_pair(&Q, e.u, &P, e.v)),
                (cf.pq(id), psi.expect_pair(&P, e.u, &Q, e.v)),
                (cf.zz(id, DEFAULT_ZZ_CAP), psi.expect_pair(&Z, e.u, &Z, e.v)),
            ];
            for (closed, exact) in pairs {
                let closed = closed.map_err(|e| e.to_string())?;
                let err = (closed - exact.re).abs().max(exact.im.abs());
                worst = worst.max(err);
                ensure(
                    err <= 1e-9,
                    format!("case {case} edge {id}: closed {closed} vs statevector {exact}"),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} expectations, max error {worst:.1e}"))
}

fn fm_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1);
    let mut min_slack = f64::INFINITY;
    for case in 0..100 {
        let g = random_graph(&mut rng, 10, case % 2 == 1);
        let report = verify_fm_bound(&g, &SpectrumOptions::default()).map_err(|e| e.to_string())?;
        ensure(
            report.slack >= -1e-8,
            format!(
                "case {case}: slack {} (lambda {})",
                report.slack, report.lambda_max
            ),
        )?;
        min_slack = min_slack.min(report.slack);
    }
    Ok(format!(
        "100 graphs (50 weighted), min slack {min_slack:.3e}"
    ))
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x72);
    let mut min_margin = f64::INFINITY;
    for case in 0..100 {
        let g = random_graph(&mut rng, 10, false);
        let fm = matching::qhfm(&g).map_err(|e| e.to_string())?;
        let cert = certify(&g, &fm, &CertifyOptions::default()).map_err(|e| e.to_string())?;
        let lambda = epr_lambda_max(&g, &SpectrumOptions::default())
            .map_err(|e| e.to_string())?
            .lambda_max;
        let achieved = cert.energy.expect("energy evaluated") / lambda;
        let margin = achieved - cert.guarantee;
        ensure(
            margin >= -1e-9,
            format!(
                "case {case}: energy/lambda {achieved} below guarantee {}",
                cert.guarantee
            ),
        )?;
        min_margin = min_margin.min(margin);
    }
    Ok(format!(
        "100 graphs, min(energy/lambda - guarantee) {min_margin:.3e}"
    ))
}

fn claim_k22() -> Outcome {
    let g = generators::complete_bipartite(2, 2);
    let res = optimize_thetas(
        &g,
        &VariationalOptions {
            restarts: 32,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let max_restart = res
        .restarts
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(
        (res.ratio - ratio::R2).abs() <= 1e-3 && max_restart <= ratio::R2 + 1e-3,
        format!("best {:.6}, max restart {max_restart:.6}", res.ratio),
    )?;
    Ok(format!(
        "best ratio {:.6} over {} restarts (r2 {:.6})",
        res.ratio,
        res.restarts.len(),
        ratio::R2
    ))
}

fn per_edge_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0);
    let mut edges = 0usize;
    let mut violations = Vec::new();
    for case in 0..200 {
        let g = random_graph(&mut rng, 10, case % 3 == 2);
        let fm = random_matching(&mut rng, &g);
        let kappa = rng.gen_range(0.01..3.0);
        let th = assign_thetas(&g, &fm, kappa).map_err(|e| e.to_string())?;
        let report = total_energy(&g, &th, DEFAULT_ZZ_CAP).map_err(|e| e.to_string())?;
        edges += report.edges.len();
        for e in report.bound_violations(ROUNDING) {
            let r = &report.edges[e];
            violations.push(format!(
                "case {case} edge {e}: g={} T={}",
                r.g,
                r.t_bound.unwrap_or(f64::NAN)
            ));
        }
    }
    ensure(
        violations.is_empty(),
        format!("{} violations: {}", violations.len(), violations.join("; ")),
    )?;
    Ok(format!(
        "200 instances, {edges} edges, 0 violations beyond {ROUNDING:e} rounding"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "table of r_d and kappa_d for d=2..10 (+-0.001, <10s)",
            regular_table,
        ),
        (
            "golden-ratio constants r0 and kappa0 (1e-4)",
            golden_constants,
        ),
        ("r_d strictly increasing for d=2..50 (<60s)", monotonicity),
        (
            "worked examples (K36, interval, constrained, s_hat)",
            worked_examples,
        ),
        (
            "closed form vs statevector on 200 graphs (1e-9)",
            oracle_equivalence,
        ),
        (
            "matching upper bound slack >= -1e-8 on 100 graphs",
            fm_bound,
        ),
        (
            "energy/lambda_max >= guarantee - 1e-9 on 100 graphs",
            soundness,
        ),
        (
            "K22 variational ratio within 1e-3 of r2, never above",
            claim_k22,
        ),
        ("per-edge lower bound on 200 instances", per_edge_bound),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
