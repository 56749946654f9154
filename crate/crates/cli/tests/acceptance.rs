//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use mubent::criteria::{
    enclosure_check, i_m_conjugate, isotropic_state, isotropic_threshold, schmidt_i2, schmidt_i2_direct,
    BellDiagonalCoeffs, ImOptions,
};
use mubent::cv::{
    cv_criterion_with, cv_threshold, squeezed_quadrant_probs, squeezed_quadrant_probs_closed_form, CvMethod,
    Observable, SqueezedParams,
};
use mubent::io::write_density;
use mubent::mubs::{construct_mub_set, quartic_sum};
use mubent::multipartite::{aharonov_noise_threshold, aharonov_state, aharonov_threshold_bisection, anticorrelation};
use mubent::optimize::{maximize_im, OptimizerConfig};
use mubent::qmath::{kron, random_pure_state_from, random_unitary_from, seeded_rng, DensityMatrix};
use mubent_cli::{cmd_sample, MubSource, SampleArgs};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(outcome: Outcome, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    match (outcome, limit) {
        (Ok(d), Some(l)) if elapsed > l => Err(format!("{d}; runtime {elapsed:.1?} exceeds {l:?}")),
        (o, _) => o,
    }
}

fn mub_construction() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4, 5, 7, 9, 11, 13] {
        let set = construct_mub_set(d).map_err(|e| e.to_string())?;
        if set.len() != d + 1 {
            return Err(format!("d = {d}: {} bases", set.len()));
        }
        for k in 0..=d {
            for l in k + 1..=d {
                for u in set.basis(k).vectors() {
                    for v in set.basis(l).vectors() {
                        worst = worst.max((u.inner(v).norm_sqr() - 1.0 / d as f64).abs());
                    }
                }
            }
        }
    }
    check(worst < 1e-10, format!("worst | |<i|j>|^2 - 1/d | = {worst:.2e}"))
}

fn isotropic_thresholds() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 5, 7] {
        let set = construct_mub_set(d).map_err(|e| e.to_string())?;
        for m in 2..=d + 1 {
            let t = isotropic_threshold(&set.take(m).unwrap()).map_err(|e| e.to_string())?;
            worst = worst.max((t - 1.0 / m as f64).abs());
        }
    }
    check(worst < 1e-7, format!("max |alpha* - 1/m| = {worst:.2e} (m = d+1 gives 1/(d+1))"))
}

fn two_mub_half_noise() -> Outcome {
    let set = construct_mub_set(3).unwrap().take(2).unwrap();
    let t = isotropic_threshold(&set).map_err(|e| e.to_string())?;
    check((t - 0.5).abs() < 1e-7, format!("d = 3, m = 2 threshold {t:.10}"))
}

fn random_product<R: Rng>(d: usize, rng: &mut R) -> DensityMatrix {
    let a = random_pure_state_from(d, rng).unwrap();
    let b = random_pure_state_from(d, rng).unwrap();
    a.kron(&b).projector()
}

fn separable_soundness() -> Outcome {
    let mut rng = seeded_rng(2024);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for d in [2, 3, 5] {
        let set = construct_mub_set(d).unwrap();
        for _ in 0..10_000 {
            let r = i_m_conjugate(&random_product(d, &mut rng), &set, ImOptions::default()).unwrap();
            worst = worst.max(r.margin);
            violations += r.violated as usize;
        }
    }
    let config = OptimizerConfig {
        restarts: 2,
        max_sweeps: 4,
        seed: 7,
        ..OptimizerConfig::default()
    };
    let mut opt_worst = f64::NEG_INFINITY;
    let mut opt_violations = 0;
    for i in 0..1000 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let set = construct_mub_set(d).unwrap();
        let weights: Vec<f64> = (0..3).map(|_| -rng.gen::<f64>().ln()).collect();
        let total: f64 = weights.iter().sum();
        let mut rho = random_product(d, &mut rng);
        let mut acc = weights[0] / total;
        for w in &weights[1..] {
            let p = acc / (acc + w / total);
            rho = DensityMatrix::mix(p, &rho, &random_product(d, &mut rng)).unwrap();
            acc += w / total;
        }
        let r = maximize_im(&rho, &set, &OptimizerConfig { seed: i, ..config.clone() }).unwrap();
        opt_worst = opt_worst.max(r.margin);
        opt_violations += r.violated as usize;
    }
    check(
        violations == 0 && opt_violations == 0,
        format!(
            "3x10^4 product states: {violations} violations (max margin {worst:.2e}); \
             10^3 optimised mixtures: {opt_violations} violations (max margin {opt_worst:.2e})"
        ),
    )
}

fn quartic_bound() -> Outcome {
    let mut rng = seeded_rng(11);
    let mut worst = f64::NEG_INFINITY;
    for d in [2, 3, 5] {
        let set = construct_mub_set(d).unwrap();
        let bound = mubent::criteria::separable_bound(d + 1, d);
        for _ in 0..10_000 {
            let psi = random_pure_state_from(d, &mut rng).unwrap();
            worst = worst.max(quartic_sum(&psi, &set).unwrap() - bound);
        }
    }
    check(worst <= 1e-9, format!("max (quartic sum - (1 + (m-1)/d)) = {worst:.2e}"))
}

fn schmidt_closed_form_check() -> Outcome {
    let mut rng = seeded_rng(5);
    let mut worst: f64 = 0.0;
    let mut misses = 0;
    for d in 2..=8 {
        for _ in 0..1000 {
            let support = rng.gen_range(2..=d);
            let mut raw: Vec<f64> = (0..d)
                .map(|i| if i < support { rng.gen::<f64>() + 1e-3 } else { 0.0 })
                .collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            raw.iter_mut().for_each(|x| *x /= norm);
            let closed = schmidt_i2(&raw, d).unwrap();
            let direct = schmidt_i2_direct(&raw, d).unwrap();
            worst = worst.max((closed - direct).abs());
            if direct <= 1.0 + 1.0 / d as f64 {
                misses += 1;
            }
        }
    }
    check(
        worst < 1e-10 && misses == 0,
        format!("max |closed - direct| = {worst:.2e}; {misses} entangled vectors undetected"),
    )
}

fn bell_enclosure() -> Outcome {
    let mut rng = seeded_rng(3);
    let mut worst: f64 = 0.0;
    for d in [2, 3, 5] {
        let set = construct_mub_set(d).unwrap();
        for _ in 0..1000 {
            let c = BellDiagonalCoeffs::random(d, &mut rng).unwrap();
            let r = enclosure_check(&c, &set).unwrap();
            worst = worst.max((r.report.value - r.closed_form).abs());
        }
    }
    check(worst < 1e-8, format!("max |I_(d+1) - (1 + h d)| = {worst:.2e} (Weyl-aligned labelling)"))
}

fn aharonov_thresholds() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [3, 4] {
        for m in 2..=n + 1 {
            let closed = aharonov_noise_threshold(n, m).unwrap();
            let direct = aharonov_threshold_bisection(n, m).map_err(|e| e.to_string())?;
            worst = worst.max((closed - direct).abs());
        }
    }
    let a = aharonov_noise_threshold(3, 4).unwrap();
    let b = aharonov_noise_threshold(3, 2).unwrap();
    check(
        worst < 1e-7 && (a - 5.0 / 14.0).abs() < 1e-12 && (b - 4.0 / 7.0).abs() < 1e-12,
        format!("max |closed - bisection| = {worst:.2e}; n=3: m=4 -> {a:.10}, m=2 -> {b:.10}"),
    )
}

fn common_rotation_invariance() -> Outcome {
    let s = aharonov_state(3).unwrap();
    let comp = vec![mubent::mubs::Basis::computational(3); 3];
    let mut rng = seeded_rng(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = random_unitary_from(3, &mut rng).unwrap();
        let a = anticorrelation(&s.rotate_all(&u).unwrap(), &comp).unwrap();
        worst = worst.max((a - 1.0).abs());
    }
    check(worst < 1e-9, format!("max |A - 1| = {worst:.2e}"))
}

fn cv_criterion() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=50 {
        let params = SqueezedParams::new(i as f64 * 0.1).unwrap();
        for obs in [Observable::Position, Observable::Momentum] {
            let q = squeezed_quadrant_probs(params, obs).map_err(|e| e.to_string())?;
            let c = squeezed_quadrant_probs_closed_form(params, obs);
            for (x, y) in q.p.iter().flatten().zip(c.p.iter().flatten()) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let at = |r: f64| cv_criterion_with(SqueezedParams::new(r).unwrap(), CvMethod::Quadrature).map(|x| x.value);
    let i0 = at(0.0).map_err(|e| e.to_string())?;
    let i5 = at(5.0).map_err(|e| e.to_string())?;
    let t = cv_threshold().map_err(|e| e.to_string())?;
    check(
        worst < 1e-7 && (i0 - 1.0).abs() < 1e-8 && i5 > 1.99 && t.paths_agree,
        format!(
            "grid max |quad - closed| = {worst:.2e}; I(0) = {i0:.10}; I(5) = {i5:.8}; \
             r* quadrature = {:.7}, closed form = {:.7}; published 0.3279, deviation {:+.7}",
            t.quadrature, t.closed_form, t.deviation
        ),
    )
}

fn optimizer_recovery() -> Outcome {
    let mut rng = seeded_rng(42);
    let u = random_unitary_from(3, &mut rng).unwrap();
    let v = random_unitary_from(3, &mut rng).unwrap();
    let rho = isotropic_state(3, 0.6).unwrap().conjugated_by(&kron(&u, &v).unwrap()).unwrap();
    let set = construct_mub_set(3).unwrap();
    let r = maximize_im(&rho, &set, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let target = 44.0 / 15.0;
    check(
        r.value >= target - 1e-3,
        format!("best I_4 = {:.8} (target {target:.8} - 1e-3)", r.value),
    )
}

fn sampling_consistency() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("phi2.json");
    write_density(&path, &isotropic_state(2, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let mut inside = 0;
    for seed in 0..100 {
        let args = SampleArgs {
            state: path.clone(),
            source: MubSource {
                mubs: None,
                d: Some(2),
                m: Some(3),
            },
            shots: 1_000_000,
            seed,
            conjugate_b: true,
        };
        let e = cmd_sample(&args).map_err(|e| e.to_string())?;
        if (e.value - 3.0).abs() <= 3.0 * e.standard_error {
            inside += 1;
        }
    }
    check(inside >= 95, format!("{inside}/100 seeds within 3 standard errors of 3"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("MUB construction", mub_construction, Some(1)),
        ("isotropic thresholds", isotropic_thresholds, Some(30)),
        ("two-MUB 50% noise", two_mub_half_noise, None),
        ("separable soundness", separable_soundness, Some(300)),
        ("quartic-sum bound", quartic_bound, None),
        ("Schmidt closed form", schmidt_closed_form_check, None),
        ("Bell-diagonal enclosure", bell_enclosure, None),
        ("Aharonov thresholds", aharonov_thresholds, Some(120)),
        ("U^n invariance", common_rotation_invariance, None),
        ("CV criterion", cv_criterion, None),
        ("optimizer recovery", optimizer_recovery, Some(60)),
        ("sampling consistency", sampling_consistency, None),
    ];
    let mut failures = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = within_time(outcome, elapsed, limit.map(Duration::from_secs));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} ({:.2} s)", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
