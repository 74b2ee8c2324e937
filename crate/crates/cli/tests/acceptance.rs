//! Acceptance suite: every headline claim of the package, checked end to
//! end at its stated tolerance. One test (and one printed PASS line) per
//! criterion; run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use std::time::Instant;

use num_complex::Complex64;

use ctrw_cli::parallel::simulate_ensemble_parallel;
use ctrw_core::model::{MixedSpec, ProcessSpec};
use ctrw_core::presets;
use ctrw_core::rng::{RandomSource, SubstreamRng};
use ctrw_core::simulate::{
    empirical_sign_fraction, simulate_path, EnsembleStats, InitialSign, SimConfig,
};
use ctrw_core::spectral::{first_moment, fl_propagator, invert_laplace, Conditioning};
use ctrw_core::{optimal_r, solve_unbiased_q0, JumpLaw};

fn sim_cfg(n_paths: u64, seed: u64) -> SimConfig {
    SimConfig {
        n_paths,
        horizon: 1.0,
        grid_points: 11,
        master_seed: seed,
        initial_sign: InitialSign::Stationary,
    }
}

fn mean_at_horizon(stats: &EnsembleStats) -> (f64, f64) {
    let last = stats.t_grid.len() - 1;
    (stats.mean[last], stats.stderr[last])
}

fn mc_drift(spec: &ProcessSpec, n_paths: u64, seed: u64) -> (f64, f64) {
    let stats = simulate_ensemble_parallel(spec, &sim_cfg(n_paths, seed)).unwrap();
    mean_at_horizon(&stats)
}

/// Random mixture with both components exactly unbiased and a strictly
/// positive drift enhancement, so the interior optimum exists.
fn random_unbiased_mix(rng: &mut SubstreamRng) -> MixedSpec {
    loop {
        let q1 = 0.05 + 0.9 * rng.uniform();
        let q2 = 0.05 + 0.9 * rng.uniform();
        let gamma1 = 0.3 + 12.0 * rng.uniform();
        let eta1 = 0.3 + 12.0 * rng.uniform();
        let gamma2 = 0.3 + 12.0 * rng.uniform();
        let mu1 = q1 / gamma1 - (1.0 - q1) / eta1;
        let mu2 = -q2 * mu1 / (1.0 - q1);
        let denom = q2 / gamma2 - mu2;
        if denom <= 1e-3 {
            continue;
        }
        let eta2 = (1.0 - q2) / denom;
        if !(0.05..=200.0).contains(&eta2) {
            continue;
        }
        let gamma0 = 0.3 + 8.0 * rng.uniform();
        let eta0 = 0.3 + 8.0 * rng.uniform();
        let q0 = solve_unbiased_q0(gamma0, eta0).unwrap();
        if q0 * mu1 + (1.0 - q0) * mu2 < 1e-3 {
            continue;
        }
        let lambda = 1.0 + 30.0 * rng.uniform();
        return MixedSpec::new(
            rng.uniform(),
            lambda,
            JumpLaw::new(q0, gamma0, eta0).unwrap(),
            JumpLaw::new(q1, gamma1, eta1).unwrap(),
            JumpLaw::new(q2, gamma2, eta2).unwrap(),
        )
        .unwrap();
    }
}

#[test]
fn criterion_1_baseline_reproduction() {
    let started = Instant::now();
    let mix = presets::baseline();

    // closed forms: mu_a(1) = mu_b(1) = 0 and mu(1) = 9/8 at machine precision
    assert_eq!(mix.a().drift(1.0).unwrap(), 0.0);
    assert!(mix.b().drift(1.0).unwrap().abs() < 1e-12);
    assert!((mix.drift(1.0).unwrap() - 1.125).abs() < 1e-12);

    // Monte Carlo agreement over 1e5 paths, 3 standard errors
    for (name, spec, target) in [
        ("A", ProcessSpec::Memoryless(*mix.a()), 0.0),
        ("B", ProcessSpec::SignMemory(*mix.b()), 0.0),
        ("AB", ProcessSpec::Mixed(mix), 1.125),
    ] {
        let (mean, stderr) = mc_drift(&spec, 100_000, 1001);
        assert!(
            (mean - target).abs() < 3.0 * stderr,
            "{name}: {mean} vs {target} (3se = {})",
            3.0 * stderr
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: baseline drifts exact (0, 0, 9/8) and matched by 1e5-path MC in {:.1?}",
        elapsed
    );
}

#[test]
fn criterion_2_shift_reverses_component_drifts_only() {
    let eps = 0.02;
    let lambda = presets::LAMBDA;

    // closed forms at eps = 0.02
    let mu_a = presets::shifted_drift_a(eps, lambda, 1.0);
    let mu_b = presets::shifted_drift_b(eps, lambda, 1.0);
    let mu_mix = presets::shifted_drift_mix(eps, lambda, 1.0);
    assert!((mu_a - -0.8).abs() < 1e-12);
    assert!((mu_b - -0.2075).abs() < 1e-12);
    assert!((mu_mix - 0.600125).abs() < 1e-12);

    // Monte Carlo: both components negative, mixture positive, each beyond
    // 3 standard errors and within 3 of its closed form
    let mix = presets::shifted(eps).unwrap();
    let runs = [
        ("A", ProcessSpec::Memoryless(*mix.a()), mu_a),
        ("B", ProcessSpec::SignMemory(*mix.b()), mu_b),
        ("AB", ProcessSpec::Mixed(mix), mu_mix),
    ];
    for (name, spec, target) in runs {
        let (mean, stderr) = mc_drift(&spec, 100_000, 2002);
        assert!(
            (mean - target).abs() < 3.0 * stderr,
            "{name}: {mean} vs {target}"
        );
        if target < 0.0 {
            assert!(mean + 3.0 * stderr < 0.0, "{name} not negative: {mean}");
        } else {
            assert!(mean - 3.0 * stderr > 0.0, "{name} not positive: {mean}");
        }
    }
    println!(
        "[PASS] criterion 2: shifted drifts (-0.8, -0.2075, +0.600125) exact; MC shows two losers mixing into a winner"
    );
}

#[test]
fn criterion_3_positivity_threshold() {
    let root = presets::shifted_positivity_root();
    assert!(
        (root - 0.0425).abs() <= 5e-4,
        "root {root} not 0.0425 to two significant figures"
    );

    // 4e5-path runs bracket the threshold: negative at 0.05, positive at 0.03
    let above = presets::shifted(0.05).unwrap();
    let (mean, stderr) = mc_drift(&ProcessSpec::Mixed(above), 400_000, 3003);
    assert!(mean + 3.0 * stderr < 0.0, "eps=0.05: {mean} +- {stderr}");

    let below = presets::shifted(0.03).unwrap();
    let (mean, stderr) = mc_drift(&ProcessSpec::Mixed(below), 400_000, 3004);
    assert!(mean - 3.0 * stderr > 0.0, "eps=0.03: {mean} +- {stderr}");
    println!(
        "[PASS] criterion 3: positivity root {root:.6} ~ 0.0425; 4e5-path MC negative at eps=0.05, positive at eps=0.03"
    );
}

#[test]
fn criterion_4_noise_level_controls_the_sign() {
    let r_star = presets::noise_threshold();
    assert_eq!(r_star, 83.0 / 1638.0);
    assert!((r_star - 0.0507).abs() < 1e-4);
    let at_star = presets::noise_controlled(r_star).unwrap();
    assert!(at_star.drift(1.0).unwrap().abs() < 1e-12);

    let low = presets::noise_controlled(0.02).unwrap();
    let (mean, stderr) = mc_drift(&ProcessSpec::Mixed(low), 100_000, 4004);
    assert!(mean + 3.0 * stderr < 0.0, "r=0.02: {mean} +- {stderr}");

    let high = presets::noise_controlled(0.2).unwrap();
    let (mean, stderr) = mc_drift(&ProcessSpec::Mixed(high), 100_000, 4005);
    assert!(mean - 3.0 * stderr > 0.0, "r=0.2: {mean} +- {stderr}");
    println!(
        "[PASS] criterion 4: drift sign flips at r = 83/1638; MC negative at r=0.02, positive at r=0.2"
    );
}

#[test]
fn criterion_5_optimal_mixing_probability() {
    // equal persistence probabilities put the optimum exactly at 1/2
    for q in [0.1, 0.5, 0.8, 0.97] {
        assert_eq!(optimal_r(q, q), 0.5);
    }

    let mut rng = SubstreamRng::new(0xACCE97, 0);
    for trial in 0..50 {
        let mix = random_unbiased_mix(&mut rng);
        let r_star = optimal_r(mix.b().law_pos().q(), mix.b().law_neg().q());

        // 1e-3-step grid search over the mixing probability
        let mut best_r = 0.0;
        let mut best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let r = k as f64 / 1000.0;
            let drift = mix.with_r(r).unwrap().drift(1.0).unwrap();
            if drift > best {
                best = drift;
                best_r = r;
            }
        }
        assert!(
            (best_r - r_star).abs() <= 1e-3 + 1e-12,
            "trial {trial}: argmax {best_r} vs optimal {r_star}"
        );

        let derivative = mix.with_r(r_star).unwrap().drift_derivative(1.0).unwrap();
        assert!(
            derivative.abs() <= 1e-9,
            "trial {trial}: derivative {derivative} at the optimum"
        );
    }
    println!(
        "[PASS] criterion 5: optimal_r(q,q) = 1/2 exactly; grid search confirms the optimum and a vanishing derivative on 50 random unbiased mixtures"
    );
}

#[test]
fn criterion_6_stationary_sign_probabilities() {
    let parameter_sets: [(&str, MixedSpec); 3] = [
        ("baseline", presets::baseline()),
        ("shifted", presets::shifted(0.02).unwrap()),
        ("noise r=0.2", presets::noise_controlled(0.2).unwrap()),
    ];
    let cfg = sim_cfg(30_000, 6006);
    for (name, mix) in parameter_sets {
        for (process, spec) in [
            ("A", ProcessSpec::Memoryless(*mix.a())),
            ("B", ProcessSpec::SignMemory(*mix.b())),
            ("AB", ProcessSpec::Mixed(mix)),
        ] {
            let expected = spec.positive_sign_probability().unwrap();
            let measured = empirical_sign_fraction(&spec, &cfg).unwrap();
            assert!(
                (measured.fraction - expected).abs() < 3.0 * measured.stderr,
                "{name}/{process}: {} vs {expected} (se {})",
                measured.fraction,
                measured.stderr
            );
        }
    }

    // the mixture limits hold exactly
    let base = presets::baseline();
    let at_zero = base.with_r(0.0).unwrap();
    assert_eq!(at_zero.alpha().unwrap(), base.b().beta().unwrap());
    let at_one = base.with_r(1.0).unwrap();
    assert_eq!(at_one.alpha().unwrap(), base.a().law().q());
    println!(
        "[PASS] criterion 6: empirical sign fractions match q0/beta/alpha on all parameter sets; alpha(0) = beta and alpha(1) = q0 exactly"
    );
}

#[test]
fn criterion_7_spectral_consistency() {
    let mix = presets::baseline();
    let specs = [
        ProcessSpec::Memoryless(*mix.a()),
        ProcessSpec::SignMemory(*mix.b()),
        ProcessSpec::Mixed(mix),
    ];

    // (a) normalization: 1/s at omega = 0, within 1e-12
    for spec in &specs {
        for s in [
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.7),
            Complex64::new(3.0, -2.0),
        ] {
            for cond in [
                Conditioning::GivenPositive,
                Conditioning::GivenNegative,
                Conditioning::Unconditional,
            ] {
                let value = fl_propagator(spec, 0.0, s, cond).unwrap();
                assert!((value - 1.0 / s).norm() < 1e-12);
            }
        }
    }

    // (b) finite-difference moments match the closed-form mean transform on
    // randomized (generally biased) specs, 1e-8 relative
    let mut rng = SubstreamRng::new(0x7007, 0);
    for _ in 0..20 {
        let m = MixedSpec::new(
            rng.uniform(),
            0.5 + 20.0 * rng.uniform(),
            JumpLaw::new(rng.uniform(), 0.3 + 6.0 * rng.uniform(), 0.3 + 6.0 * rng.uniform())
                .unwrap(),
            JumpLaw::new(rng.uniform(), 0.3 + 6.0 * rng.uniform(), 0.3 + 6.0 * rng.uniform())
                .unwrap(),
            JumpLaw::new(rng.uniform(), 0.3 + 6.0 * rng.uniform(), 0.3 + 6.0 * rng.uniform())
                .unwrap(),
        )
        .unwrap();
        let s = Complex64::new(0.5 + 3.0 * rng.uniform(), 0.0);
        for (spec, rate) in [
            (ProcessSpec::Memoryless(*m.a()), m.a().drift(1.0).unwrap()),
            (ProcessSpec::SignMemory(*m.b()), m.b().drift(1.0).unwrap()),
            (ProcessSpec::Mixed(m), m.drift(1.0).unwrap()),
        ] {
            let moment =
                first_moment(|w| fl_propagator(&spec, w, s, Conditioning::Unconditional))
                    .unwrap();
            let target = rate / (s * s);
            assert!(
                (moment - target).norm() <= 1e-8 * target.norm().max(1.0),
                "{moment} vs {target}"
            );
        }
    }

    // (c) inversion of the memoryless transform matches the
    // exp(lambda t (h~ - 1)) closed form, 1e-8 relative
    let a = *mix.a();
    for omega in [0.3, 0.5] {
        for t in [0.25, 0.5, 1.0] {
            let inverted = invert_laplace(|s| a.fl_propagator(omega, s), t, 1e-9).unwrap();
            let exact = (a.lambda() * t * (a.law().cf(omega) - 1.0)).exp();
            assert!(
                (inverted - exact).norm() < 1e-8 * exact.norm(),
                "omega={omega} t={t}: {inverted} vs {exact}"
            );
        }
    }

    // (d) inverted B and AB characteristic functions match Monte Carlo on a
    // 5x5 (omega, t) grid within 3 MC standard errors
    let omegas = [0.2, 0.5, 0.8, 1.1, 1.4];
    let times = [0.2, 0.4, 0.6, 0.8, 1.0];
    let n_paths = 100_000u64;
    for (name, spec) in [
        ("B", ProcessSpec::SignMemory(*mix.b())),
        ("AB", ProcessSpec::Mixed(mix)),
    ] {
        // one ensemble; per-path values at all grid times
        let mut sums = [[Complex64::new(0.0, 0.0); 5]; 5];
        let mut sq = [[0.0f64; 5]; 5];
        for i in 0..n_paths {
            let mut path_rng = SubstreamRng::new(7007 + (name.len() as u64), i);
            let path = simulate_path(&spec, 1.0, InitialSign::Stationary, &mut path_rng).unwrap();
            for (ti, &t) in times.iter().enumerate() {
                let x = path.value_at(t);
                for (wi, &w) in omegas.iter().enumerate() {
                    let (s, c) = (w * x).sin_cos();
                    sums[ti][wi] += Complex64::new(c, s);
                    sq[ti][wi] += c * c + s * s;
                }
            }
        }
        for (ti, &t) in times.iter().enumerate() {
            for (wi, &w) in omegas.iter().enumerate() {
                let n = n_paths as f64;
                let mc = sums[ti][wi] / n;
                let var = (sq[ti][wi] / n - mc.norm_sqr()).max(0.0);
                let stderr = (var / n).sqrt();
                let inverted = invert_laplace(
                    |s| fl_propagator(&spec, w, s, Conditioning::Unconditional),
                    t,
                    1e-8,
                )
                .unwrap();
                assert!(
                    (inverted - mc).norm() < 3.0 * stderr,
                    "{name} omega={w} t={t}: {inverted} vs {mc} (se {stderr})"
                );
            }
        }
    }
    println!(
        "[PASS] criterion 7: propagators normalize, moments match to 1e-8, inversion matches the compound-Poisson form to 1e-8 and MC characteristic functions on a 5x5 grid"
    );
}

#[test]
fn criterion_8_mixture_is_not_a_superposition() {
    let mix = presets::baseline();
    let superposed =
        mix.r() * mix.a().drift(1.0).unwrap() + (1.0 - mix.r()) * mix.b().drift(1.0).unwrap();
    assert!(superposed.abs() < 1e-12);
    assert!((mix.drift(1.0).unwrap() - 1.125).abs() < 1e-12);
    println!(
        "[PASS] criterion 8: r mu_a + (1-r) mu_b = 0 while the mixture drifts at 9/8 per unit time"
    );
}
