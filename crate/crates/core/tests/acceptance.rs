//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use ecsim::dsl::{execute_circuit, format_program, parse_circuit};
use ecsim::protocols::{
    self, formula_p_ecp1, formula_p_ecp2, run_ecp1_stages, run_ecp2_stages, Ecp1Params,
    Ecp2Params, ThetaParams,
};
use ecsim::sweep::{sweep_ecp1_csv, sweep_ecp2_csv, SweepProtocol, SweepSpec};
use ecsim::{BranchTerm, CoherentSuperposition, ModeLabel};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn conclude(criterion: &str, passed: bool, detail: &str) {
    println!("[acceptance] {criterion}: {} ({detail})", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "{criterion}: {detail}");
}

fn within_budget(start: Instant, budget: Duration) -> (bool, String) {
    let elapsed = start.elapsed();
    (elapsed <= budget, format!("{:.2}s of {:.0?} budget", elapsed.as_secs_f64(), budget))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn state_from(coefficients: &[f64], amps: &[Vec<f64>]) -> CoherentSuperposition {
    let modes: Vec<ModeLabel> =
        (0..amps[0].len()).map(|i| ModeLabel::new(format!("m{i}"))).collect();
    let terms = coefficients
        .iter()
        .zip(amps)
        .map(|(&coeff, amp)| {
            BranchTerm::new(c(coeff), amp.iter().map(|&a| c(a)).collect()).unwrap()
        })
        .collect();
    CoherentSuperposition::new(modes, terms).unwrap()
}

fn cluster_amps(a: f64) -> Vec<Vec<f64>> {
    vec![
        vec![a, a, a, a],
        vec![-a, -a, a, a],
        vec![a, a, -a, -a],
        vec![-a, -a, -a, -a],
    ]
}

fn coefficient(rng: &mut ChaCha12Rng) -> f64 {
    let magnitude = rng.gen_range(0.1..1.0);
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Criterion 1: the Gram norm² of each unnormalized paper state equals 1/N²
/// for N₁–N₅, within 1e-12 relative, over 100 random draws. Runtime < 1 s.
#[test]
fn criterion_1_normalization_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.gen_range(0.2..3.0);
        let (b, g) = (coefficient(&mut rng), coefficient(&mut rng));
        let (d, e) = (coefficient(&mut rng), coefficient(&mut rng));
        let p = Ecp1Params::new(a, b, g).unwrap();
        let q = Ecp2Params::new(a, b, g, d, e).unwrap();

        let gram_n1 = state_from(&[b, b, g, -g], &cluster_amps(a)).norm_squared();
        let gram_n2 = state_from(&[b, g], &[vec![a], vec![-a]]).norm_squared();
        let gram_n3 = state_from(&[b, g, d, -e], &cluster_amps(a)).norm_squared();
        let gram_n4 = state_from(
            &[b, g, d, e],
            &[vec![a, a], vec![a, -a], vec![-a, a], vec![-a, -a]],
        )
        .norm_squared();
        let gram_n5 = state_from(&[b * g, d * e], &[vec![a], vec![-a]]).norm_squared();

        for (n, gram) in [
            (protocols::n1(&p).unwrap(), gram_n1),
            (protocols::n2(&p).unwrap(), gram_n2),
            (protocols::n3(&q).unwrap(), gram_n3),
            (protocols::n4(&q).unwrap(), gram_n4),
            (protocols::n5(&q).unwrap(), gram_n5),
        ] {
            // N = 1/√gram ⇔ N²·gram = 1; the deviation is already relative.
            worst = worst.max((n * n * gram - 1.0).abs());
        }
    }
    let (in_time, timing) = within_budget(start, Duration::from_secs(1));
    conclude(
        "criterion 1 (normalization oracle N1–N5)",
        worst <= 1e-12 && in_time,
        &format!("max rel dev {worst:.3e} vs 1e-12, {timing}"),
    );
}

/// Criterion 2: p_exact from the ECP1 pipeline equals 4|N₁N₂βγ|² within 1e-9
/// relative on a 3×50 (α, β) grid. Runtime < 1 s.
#[test]
fn criterion_2_ecp1_probability_identity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for i in 0..50 {
            let beta = (i + 1) as f64 / 51.0;
            let gamma = (1.0 - beta * beta).sqrt();
            let p = Ecp1Params::new(alpha, beta, gamma).unwrap();
            let run = run_ecp1_stages(&p).unwrap();
            let formula = formula_p_ecp1(&p).unwrap();
            worst = worst.max((run.p_exact - formula).abs() / formula.max(1e-30));
        }
    }
    let (in_time, timing) = within_budget(start, Duration::from_secs(1));
    conclude(
        "criterion 2 (ECP1 probability identity)",
        worst <= 1e-9 && in_time,
        &format!("max rel dev {worst:.3e} vs 1e-9, {timing}"),
    );
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

/// Criterion 3: p_exact from the ECP2 pipeline equals 4|N₃N₄N₅βγδη|² within
/// 1e-9 relative on 200 random θ draws at α ∈ {0.5, 1, 2}. Runtime < 5 s.
#[test]
fn criterion_3_ecp2_probability_identity() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let theta = theta_draw(&mut rng);
        for alpha in [0.5, 1.0, 2.0] {
            let q = Ecp2Params::from_theta(alpha, &theta).unwrap();
            let run = run_ecp2_stages(&q).unwrap();
            let formula = formula_p_ecp2(&q).unwrap();
            worst = worst.max((run.p_exact - formula).abs() / formula.max(1e-30));
        }
    }
    let (in_time, timing) = within_budget(start, Duration::from_secs(5));
    conclude(
        "criterion 3 (ECP2 probability identity)",
        worst <= 1e-9 && in_time,
        &format!("max rel dev {worst:.3e} vs 1e-9, {timing}"),
    );
}

/// Criterion 4: final states of both pipelines have fidelity 1 within 1e-10
/// against the maximally entangled pattern, over the criteria-2/3 draws.
#[test]
fn criterion_4_final_fidelity() {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for i in 0..50 {
            let beta = (i + 1) as f64 / 51.0;
            let p = Ecp1Params::new(alpha, beta, (1.0 - beta * beta).sqrt()).unwrap();
            worst = worst.max((run_ecp1_stages(&p).unwrap().final_fidelity - 1.0).abs());
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    for _ in 0..200 {
        let theta = theta_draw(&mut rng);
        for alpha in [0.5, 1.0, 2.0] {
            let q = Ecp2Params::from_theta(alpha, &theta).unwrap();
            worst = worst.max((run_ecp2_stages(&q).unwrap().final_fidelity - 1.0).abs());
        }
    }
    conclude(
        "criterion 4 (final fidelity against the cluster target)",
        worst <= 1e-10,
        &format!("max |1 − F| {worst:.3e} vs 1e-10"),
    );
}

/// Criterion 5: stage term counts are exactly 8/8/4/4/4 for ECP1 and
/// 32/32/4/4/4/4 for ECP2.
#[test]
fn criterion_5_structure_counts() {
    let p = Ecp1Params::new(0.5, 0.6, 0.8).unwrap();
    let counts1: Vec<usize> = run_ecp1_stages(&p)
        .unwrap()
        .stages
        .iter()
        .map(|s| s.state.term_count())
        .collect();
    let q = Ecp2Params::new(1.3, 0.4, 0.5, 0.6, 0.48989794855663565).unwrap();
    let counts2: Vec<usize> = run_ecp2_stages(&q)
        .unwrap()
        .stages
        .iter()
        .map(|s| s.state.term_count())
        .collect();
    let passed = counts1 == [8, 8, 4, 4, 4] && counts2 == [32, 32, 4, 4, 4, 4];
    conclude(
        "criterion 5 (stage term counts)",
        passed,
        &format!("ecp1 {counts1:?}, ecp2 {counts2:?}"),
    );
}

/// Criterion 6: 201-point sweeps at α ∈ {0.5, 1, 2} show the peak P strictly
/// increasing with α and the peak's β location non-decreasing; additionally
/// P(α=2, β=1/√2) = 1/(2(1+e^{−8})) within 1e-9. Runtime < 2 s.
#[test]
fn criterion_6_beta_sweep_reproduction() {
    let start = Instant::now();
    let spec = SweepSpec::new(SweepProtocol::Ecp1, vec![0.5, 1.0, 2.0], 201, 0.0).unwrap();
    let csv = sweep_ecp1_csv(&spec).unwrap();
    let mut peaks: Vec<(f64, f64)> = Vec::new(); // (peak P, peak β) per α block
    for block in 0..3 {
        let mut best = (f64::MIN, 0.0);
        for row in csv.lines().skip(1 + block * 201).take(201) {
            let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
            if fields[4] > best.0 {
                best = (fields[4], fields[1]);
            }
        }
        peaks.push(best);
    }
    let peaks_increase = peaks[0].0 < peaks[1].0 && peaks[1].0 < peaks[2].0;
    let locations_non_decreasing = peaks[0].1 <= peaks[1].1 && peaks[1].1 <= peaks[2].1;

    let p = Ecp1Params::new(2.0, SQRT_HALF, SQRT_HALF).unwrap();
    let expect = 1.0 / (2.0 * (1.0 + (-8.0f64).exp()));
    let formula_dev = (formula_p_ecp1(&p).unwrap() - expect).abs() / expect;
    let exact_dev = (run_ecp1_stages(&p).unwrap().p_exact - expect).abs() / expect;

    let (in_time, timing) = within_budget(start, Duration::from_secs(2));
    conclude(
        "criterion 6 (β-sweep peak structure)",
        peaks_increase
            && locations_non_decreasing
            && formula_dev <= 1e-9
            && exact_dev <= 1e-9
            && in_time,
        &format!(
            "peaks {:.6}@β={:.3} < {:.6}@β={:.3} < {:.6}@β={:.3}, P(2,1/√2) rel dev {:.2e}, {timing}",
            peaks[0].0, peaks[0].1, peaks[1].0, peaks[1].1, peaks[2].0, peaks[2].1,
            formula_dev.max(exact_dev)
        ),
    );
}

/// Criterion 7: the 101×101 θ sweep at θ₃ = π/6, α = 2 vanishes on the θ₁ = 0
/// and θ₂ = 0 boundaries, is strictly positive in the interior, and the CSV is
/// byte-deterministic across runs.
#[test]
fn criterion_7_theta_sweep_reproduction() {
    let spec =
        SweepSpec::new(SweepProtocol::Ecp2, vec![2.0], 101, std::f64::consts::FRAC_PI_6).unwrap();
    let csv = sweep_ecp2_csv(&spec).unwrap();
    let again = sweep_ecp2_csv(&spec).unwrap();
    let deterministic = csv == again;

    let mut boundary_zero = true;
    let mut interior_positive = true;
    let mut rows = 0;
    for row in csv.lines().skip(1) {
        rows += 1;
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        let (t1, t2, p_exact) = (fields[1], fields[2], fields[9]);
        if t1 == 0.0 || t2 == 0.0 {
            boundary_zero &= p_exact == 0.0;
        } else if t1 < std::f64::consts::FRAC_PI_2 && t2 < std::f64::consts::FRAC_PI_2 {
            interior_positive &= p_exact > 0.0;
        }
    }
    conclude(
        "criterion 7 (θ-sweep boundaries and determinism)",
        deterministic && boundary_zero && interior_positive && rows == 101 * 101,
        &format!(
            "{rows} rows, boundary zeros {boundary_zero}, interior positive {interior_positive}, deterministic {deterministic}"
        ),
    );
}

/// Criterion 8: at the post-selection stage every concentrated-mode amplitude
/// has magnitude √2·α within 1e-12 (mode e1 for ECP1; c1, f1, g1 for ECP2 both
/// before and after the swap).
#[test]
fn criterion_8_sqrt2_amplitudes() {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let expect = std::f64::consts::SQRT_2 * alpha;

        let p = Ecp1Params::new(alpha, 0.6, 0.8).unwrap();
        let run = run_ecp1_stages(&p).unwrap();
        let stage = &run.stages[2].state;
        let e1 = stage.mode_index(&ModeLabel::from("e1")).unwrap();
        for t in stage.terms() {
            worst = worst.max((t.amplitudes[e1].norm() - expect).abs());
        }

        let q = Ecp2Params::new(alpha, 0.5, 0.5, 0.5, 0.5).unwrap();
        let run = run_ecp2_stages(&q).unwrap();
        for stage in [&run.stages[2].state, &run.stages[3].state] {
            for label in ["c1", "f1", "g1"] {
                let idx = stage.mode_index(&ModeLabel::from(label)).unwrap();
                for t in stage.terms() {
                    worst = worst.max((t.amplitudes[idx].norm() - expect).abs());
                }
            }
        }
    }
    conclude(
        "criterion 8 (√2·α amplitudes at the concentration stage)",
        worst <= 1e-12,
        &format!("max dev {worst:.3e} vs 1e-12"),
    );
}

/// Criterion 9: engine properties — beam splitter and swap preserve norm² on
/// 500 random states within 1e-12; composing the beam-splitter map with itself
/// returns every amplitude pair (the algebraic result of applying the 50:50
/// map twice); canonicalization is idempotent; the DSL round-trips
/// parse ∘ format structurally; and the bundled circuits reproduce the
/// pipeline reports within 1e-10.
#[test]
fn criterion_9_engine_properties() {
    let mut rng = ChaCha12Rng::seed_from_u64(17);
    let mut norm_dev: f64 = 0.0;
    let mut compose_dev: f64 = 0.0;
    let mut canonical_ok = true;
    for _ in 0..500 {
        let n_modes = rng.gen_range(2..=6);
        let modes: Vec<ModeLabel> =
            (0..n_modes).map(|i| ModeLabel::new(format!("m{i}"))).collect();
        let terms: Vec<BranchTerm> = (0..rng.gen_range(1..=16))
            .map(|_| {
                let coeff = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let amps = (0..n_modes)
                    .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                    .collect();
                BranchTerm::new(coeff, amps).unwrap()
            })
            .collect();
        let s = CoherentSuperposition::new(modes, terms).unwrap();
        let (i, j) = (s.modes()[0].clone(), s.modes()[1].clone());
        let n = s.norm_squared();

        let bs = s.beam_splitter(&i, &j).unwrap();
        norm_dev = norm_dev.max((bs.norm_squared() - n).abs() / n.max(1.0));
        let swapped = s.swap_modes(&i, &j).unwrap();
        norm_dev = norm_dev.max((swapped.norm_squared() - n).abs() / n.max(1.0));

        let twice = bs.beam_splitter(&i, &j).unwrap();
        for (t0, t1) in s.terms().iter().zip(twice.terms()) {
            for (a0, a1) in t0.amplitudes.iter().zip(&t1.amplitudes) {
                compose_dev = compose_dev.max((a0 - a1).norm());
            }
        }

        canonical_ok &= s == s.canonicalized(&Default::default());
    }

    let circuits = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits");
    let mut round_trip_ok = true;
    let mut report_dev: f64 = 0.0;
    for name in ["ecp1.circ", "ecp2.circ"] {
        let source = std::fs::read_to_string(circuits.join(name)).unwrap();
        let program = parse_circuit(&source, name).unwrap();
        let reparsed = parse_circuit(&format_program(&program), name).unwrap();
        round_trip_ok &= program.structurally_equals(&reparsed);

        let execution = execute_circuit(&program).unwrap();
        let (p_pipeline, fidelity_pipeline) = if name == "ecp1.circ" {
            // same value the bundled circuit spells out as a decimal literal
            let p = Ecp1Params::new(2.0, SQRT_HALF, SQRT_HALF).unwrap();
            let run = run_ecp1_stages(&p).unwrap();
            (run.p_exact, run.final_fidelity)
        } else {
            let q = Ecp2Params::new(2.0, 0.8660254037844387, 0.3535533905932738, 0.25, 0.25)
                .unwrap();
            let run = run_ecp2_stages(&q).unwrap();
            (run.p_exact, run.final_fidelity)
        };
        report_dev = report_dev.max((execution.cumulative_probability - p_pipeline).abs());
        let fidelity = execution.snapshots[0].fidelity.unwrap();
        report_dev = report_dev.max((fidelity - fidelity_pipeline).abs());
    }

    conclude(
        "criterion 9 (engine and DSL properties)",
        norm_dev <= 1e-12
            && compose_dev <= 1e-12
            && canonical_ok
            && round_trip_ok
            && report_dev <= 1e-10,
        &format!(
            "norm dev {norm_dev:.3e}, BS∘BS dev {compose_dev:.3e}, canonicalize idempotent {canonical_ok}, round-trip {round_trip_ok}, circ-vs-pipeline dev {report_dev:.3e}"
        ),
    );
}
