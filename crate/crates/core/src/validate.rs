//! Self-check suite comparing every closed form against the exact engine.
//!
//! Each check draws randomized inputs from a seeded generator, measures the
//! worst deviation from the claimed identity, and compares it against the
//! tolerance the identity is supposed to hold at. The CLI's `validate`
//! subcommand prints one line per check; the same seed reproduces the same
//! deviations exactly.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::protocols::{
    build_target_mes, formula_p_ecp1, formula_p_ecp2, run_ecp1_stages, run_ecp2_stages,
    Ecp1Params, Ecp2Params, ThetaParams,
};
use crate::state::{BranchTerm, CoherentSuperposition, ModeLabel, ToleranceConfig};

/// Result of one validation check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn from_deviation(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        CheckResult { name, max_deviation, tolerance, passed: max_deviation <= tolerance }
    }
}

/// Run the full suite with a fixed seed.
pub fn run_all_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    vec![
        check_n1_gram(&mut rng),
        check_n2_gram(&mut rng),
        check_n3_gram(&mut rng),
        check_n4_gram(&mut rng),
        check_n5_gram(&mut rng),
        check_target_norm(&mut rng),
        check_ecp1_probability(&mut rng),
        check_ecp2_probability(&mut rng),
        check_ecp1_fidelity(&mut rng),
        check_ecp2_fidelity(&mut rng),
        check_sqrt2_amplitudes(&mut rng),
        check_bs_unitarity(&mut rng),
        check_swap_unitarity(&mut rng),
        check_bs_involution(&mut rng),
        check_canonicalize(&mut rng),
    ]
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn coefficient(rng: &mut ChaCha12Rng) -> f64 {
    let magnitude = rng.gen_range(0.1..1.0);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

fn alpha(rng: &mut ChaCha12Rng) -> f64 {
    rng.gen_range(0.2..3.0)
}

/// The four cluster amplitude patterns over (a, b, c, d).
fn cluster_amps(a: f64) -> [[C64; 4]; 4] {
    [
        [c(a), c(a), c(a), c(a)],
        [c(-a), c(-a), c(a), c(a)],
        [c(a), c(a), c(-a), c(-a)],
        [c(-a), c(-a), c(-a), c(-a)],
    ]
}

fn gram_state(coefficients: &[f64], amps: &[Vec<C64>]) -> CoherentSuperposition {
    let modes: Vec<ModeLabel> =
        (0..amps[0].len()).map(|i| ModeLabel::new(format!("m{i}"))).collect();
    let terms = coefficients
        .iter()
        .zip(amps)
        .map(|(&coeff, amp)| BranchTerm::new(c(coeff), amp.clone()).unwrap())
        .collect();
    CoherentSuperposition::new(modes, terms).unwrap()
}

/// ∣N²·(Gram norm² of the unnormalized state) − 1∣ over random draws.
fn n_constant_deviation(
    rng: &mut ChaCha12Rng,
    draws: usize,
    build: impl Fn(&mut ChaCha12Rng) -> (f64, CoherentSuperposition),
) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let (n, unnormalized) = build(rng);
        worst = worst.max((n * n * unnormalized.norm_squared() - 1.0).abs());
    }
    worst
}

fn check_n1_gram(rng: &mut ChaCha12Rng) -> CheckResult {
    let dev = n_constant_deviation(rng, 100, |rng| {
        let (a, b, g) = (alpha(rng), coefficient(rng), coefficient(rng));
        let p = Ecp1Params::new(a, b, g).unwrap();
        let amps = cluster_amps(a).map(|row| row.to_vec());
        (crate::protocols::n1(&p).unwrap(), gram_state(&[b, b, g, -g], &amps))
    });
    CheckResult::from_deviation("n1 vs gram norm", dev, 1e-12)
}

fn check_n2_gram(rng: &mut ChaCha12Rng) -> CheckResult {
    let dev = n_constant_deviation(rng, 100, |rng| {
        let (a, b, g) = (alpha(rng), coefficient(rng), coefficient(rng));
        let p = Ecp1Params::new(a, b, g).unwrap();
        let amps = vec![vec![c(a)], vec![c(-a)]];
        (crate::protocols::n2(&p).unwrap(), gram_state(&[b, g], &amps))
    });
    CheckResult::from_deviation("n2 vs gram norm", dev, 1e-12)
}

fn ecp2_draw(rng: &mut ChaCha12Rng) -> Ecp2Params {
    let a = alpha(rng);
    Ecp2Params::new(a, coefficient(rng), coefficient(rng), coefficient(rng), coefficient(rng))
        .unwrap()
}

fn check_n3_gram(rng: &mut ChaCha12Rng) -> CheckResult {
    let dev = n_constant_deviation(rng, 100, |rng| {
        let q = ecp2_draw(rng);
        let amps = cluster_amps(q.alpha()).map(|row| row.to_vec());
        let coefficients = [q.beta(), q.gamma(), q.delta(), -q.eta()];
        (crate::protocols::n3(&q).unwrap(), gram_state(&coefficients, &amps))
    });
    CheckResult::from_deviation("n3 vs gram norm", dev, 1e-12)
}

fn check_n4_gram(rng: &mut ChaCha12Rng) -> CheckResult {
    let dev = n_constant_deviation(rng, 100, |rng| {
        let q = ecp2_draw(rng);
        let a = q.alpha();
        let amps = vec![
            vec![c(a), c(a)],
            vec![c(a), c(-a)],
            vec![c(-a), c(a)],
            vec![c(-a), c(-a)],
        ];
        let coefficients = [q.beta(), q.gamma(), q.delta(), q.eta()];
        (crate::protocols::n4(&q).unwrap(), gram_state(&coefficients, &amps))
    });
    CheckResult::from_deviation("n4 vs gram norm", dev, 1e-12)
}

fn check_n5_gram(rng: &mut ChaCha12Rng) -> CheckResult {
    let dev = n_constant_deviation(rng, 100, |rng| {
        let q = ecp2_draw(rng);
        let a = q.alpha();
        let amps = vec![vec![c(a)], vec![c(-a)]];
        let coefficients = [q.beta() * q.gamma(), q.delta() * q.eta()];
        (crate::protocols::n5(&q).unwrap(), gram_state(&coefficients, &amps))
    });
    CheckResult::from_deviation("n5 vs gram norm", dev, 1e-12)
}

fn check_target_norm(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mes = build_target_mes(alpha(rng)).unwrap();
        worst = worst.max((mes.norm_squared() - 1.0).abs());
    }
    CheckResult::from_deviation("target state unit norm", worst, 1e-12)
}

fn relative(p_exact: f64, p_formula: f64) -> f64 {
    (p_exact - p_formula).abs() / p_formula.max(1e-30)
}

fn check_ecp1_probability(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = Ecp1Params::new(rng.gen_range(0.3..3.0), coefficient(rng), coefficient(rng))
            .unwrap();
        let run = run_ecp1_stages(&p).unwrap();
        worst = worst.max(relative(run.p_exact, formula_p_ecp1(&p).unwrap()));
    }
    CheckResult::from_deviation("ecp1 exact vs closed-form probability", worst, 1e-9)
}

fn theta_draw(rng: &mut ChaCha12Rng) -> ThetaParams {
    let span = std::f64::consts::FRAC_PI_2 - 0.2;
    ThetaParams::new(
        0.1 + rng.gen_range(0.0..span),
        0.1 + rng.gen_range(0.0..span),
        0.1 + rng.gen_range(0.0..span),
    )
    .unwrap()
}

fn check_ecp2_probability(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let q = Ecp2Params::from_theta(rng.gen_range(0.3..3.0), &theta_draw(rng)).unwrap();
        let run = run_ecp2_stages(&q).unwrap();
        worst = worst.max(relative(run.p_exact, formula_p_ecp2(&q).unwrap()));
    }
    CheckResult::from_deviation("ecp2 exact vs closed-form probability", worst, 1e-9)
}

fn check_ecp1_fidelity(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = Ecp1Params::new(rng.gen_range(0.3..3.0), coefficient(rng), coefficient(rng))
            .unwrap();
        let run = run_ecp1_stages(&p).unwrap();
        worst = worst.max((run.final_fidelity - 1.0).abs());
    }
    CheckResult::from_deviation("ecp1 final fidelity", worst, 1e-10)
}

fn check_ecp2_fidelity(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let q = Ecp2Params::from_theta(rng.gen_range(0.3..3.0), &theta_draw(rng)).unwrap();
        let run = run_ecp2_stages(&q).unwrap();
        worst = worst.max((run.final_fidelity - 1.0).abs());
    }
    CheckResult::from_deviation("ecp2 final fidelity", worst, 1e-10)
}

/// Every post-selected amplitude in the concentrated modes has magnitude √2·α.
fn check_sqrt2_amplitudes(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let a = rng.gen_range(0.3..3.0);
        let expect = std::f64::consts::SQRT_2 * a;

        let p = Ecp1Params::new(a, coefficient(rng), coefficient(rng)).unwrap();
        let run = run_ecp1_stages(&p).unwrap();
        let selected = &run.stages[2].state;
        let e1 = selected.mode_index(&ModeLabel::from("e1")).unwrap();
        for t in selected.terms() {
            worst = worst.max((t.amplitudes[e1].norm() - expect).abs());
        }

        let q = Ecp2Params::from_theta(a, &theta_draw(rng)).unwrap();
        let run = run_ecp2_stages(&q).unwrap();
        for stage in [&run.stages[2], &run.stages[3]] {
            for label in ["c1", "f1", "g1"] {
                let idx = stage.state.mode_index(&ModeLabel::from(label)).unwrap();
                for t in stage.state.terms() {
                    worst = worst.max((t.amplitudes[idx].norm() - expect).abs());
                }
            }
        }
    }
    CheckResult::from_deviation("post-selected amplitudes are sqrt2·alpha", worst, 1e-12)
}

fn random_state(rng: &mut ChaCha12Rng) -> CoherentSuperposition {
    let n_modes = rng.gen_range(2..=6);
    let n_terms = rng.gen_range(1..=16);
    let modes: Vec<ModeLabel> = (0..n_modes).map(|i| ModeLabel::new(format!("m{i}"))).collect();
    let terms = (0..n_terms)
        .map(|_| {
            let coeff = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let amps = (0..n_modes)
                .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            BranchTerm::new(coeff, amps).unwrap()
        })
        .collect();
    CoherentSuperposition::new(modes, terms).unwrap()
}

fn check_bs_unitarity(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(rng);
        let out = s
            .beam_splitter(&s.modes()[0].clone(), &s.modes()[1].clone())
            .unwrap();
        let n = s.norm_squared();
        worst = worst.max((out.norm_squared() - n).abs() / n.max(1.0));
    }
    CheckResult::from_deviation("beam splitter preserves norm", worst, 1e-12)
}

fn check_swap_unitarity(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(rng);
        let out = s.swap_modes(&s.modes()[0].clone(), &s.modes()[1].clone()).unwrap();
        let n = s.norm_squared();
        worst = worst.max((out.norm_squared() - n).abs() / n.max(1.0));
    }
    CheckResult::from_deviation("swap preserves norm", worst, 1e-12)
}

/// Applying the beam splitter map twice returns every amplitude pair.
fn check_bs_involution(rng: &mut ChaCha12Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(rng);
        let (i, j) = (s.modes()[0].clone(), s.modes()[1].clone());
        let twice = s.beam_splitter(&i, &j).unwrap().beam_splitter(&i, &j).unwrap();
        for (t0, t1) in s.terms().iter().zip(twice.terms()) {
            for (a0, a1) in t0.amplitudes.iter().zip(&t1.amplitudes) {
                worst = worst.max((a0 - a1).norm());
            }
        }
    }
    CheckResult::from_deviation("beam splitter twice is the identity", worst, 1e-12)
}

/// Canonicalization is idempotent and leaves Gram contractions unchanged
/// relative to the raw term list.
fn check_canonicalize(rng: &mut ChaCha12Rng) -> CheckResult {
    let tol = ToleranceConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let base = random_state(rng);
        // Duplicate some terms so canonicalization has merges to do.
        let mut raw = base.terms().to_vec();
        for t in base.terms().iter().take(3) {
            raw.push(t.clone());
        }
        let state = CoherentSuperposition::new(base.modes().to_vec(), raw.clone()).unwrap();
        if state != state.canonicalized(&tol) {
            worst = worst.max(1.0);
        }
        // Independent contraction of the raw list against a probe.
        let probe = random_state_with_modes(rng, base.mode_count());
        let mut raw_ip = C64::new(0.0, 0.0);
        for t in &raw {
            for pt in probe.terms() {
                let mut exponent = C64::new(0.0, 0.0);
                for (u, v) in pt.amplitudes.iter().zip(&t.amplitudes) {
                    exponent +=
                        C64::new(-0.5 * (u.norm_sqr() + v.norm_sqr()), 0.0) + u.conj() * v;
                }
                raw_ip += pt.coefficient.conj() * t.coefficient * exponent.exp();
            }
        }
        worst = worst.max((probe.inner_product(&state).unwrap() - raw_ip).norm());
    }
    CheckResult::from_deviation("canonicalize idempotent and gram-preserving", worst, 1e-10)
}

fn random_state_with_modes(rng: &mut ChaCha12Rng, n_modes: usize) -> CoherentSuperposition {
    let modes: Vec<ModeLabel> = (0..n_modes).map(|i| ModeLabel::new(format!("p{i}"))).collect();
    let terms = (0..rng.gen_range(1..=8))
        .map(|_| {
            let coeff = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let amps = (0..n_modes)
                .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            BranchTerm::new(coeff, amps).unwrap()
        })
        .collect();
    CoherentSuperposition::new(modes, terms).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_suite_passes_every_check() {
        for check in run_all_checks(7) {
            assert!(
                check.passed,
                "{} failed: deviation {:e} > tolerance {:e}",
                check.name, check.max_deviation, check.tolerance
            );
        }
    }

    #[test]
    fn identical_seeds_reproduce_identical_deviations() {
        let a = run_all_checks(42);
        let b = run_all_checks(42);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.max_deviation.to_bits(), y.max_deviation.to_bits());
        }
    }

    #[test]
    fn different_seeds_change_the_draws() {
        let a = run_all_checks(1);
        let b = run_all_checks(2);
        assert!(a.iter().zip(&b).any(|(x, y)| x.max_deviation != y.max_deviation));
    }
}
