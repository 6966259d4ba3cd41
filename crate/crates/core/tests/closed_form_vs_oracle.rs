use catodyne_core::exactclicks::{amp_cat_lo, amp_coherent_lo, joint_distribution};
use catodyne_core::numkernel::poisson_pmf;
use catodyne_core::oracle::amplitude_bruteforce;
use catodyne_core::states::cat_norm;
use catodyne_core::{CatParity, Complex64, LocalOscillator, SignalState};
use proptest::prelude::*;

const VECTOR_CUTOFF: usize = 80;

fn signals() -> Vec<SignalState> {
    vec![
        SignalState::Vacuum,
        SignalState::coherent(0.8, 0.0),
        SignalState::coherent(1.6, 0.0),
        SignalState::fock(1),
        SignalState::fock(2),
        SignalState::fock(3),
    ]
}

fn max_deviation(lo: &LocalOscillator, signal: &SignalState, max_total: u64) -> f64 {
    let lo_vec = lo.to_fock(VECTOR_CUTOFF).unwrap();
    let sig_vec = signal.to_fock(VECTOR_CUTOFF).unwrap();
    let mut worst: f64 = 0.0;
    for n in 0..=max_total {
        for m in 0..=max_total - n {
            let closed = match lo.kind() {
                catodyne_core::LoKind::Cat(p) => amp_cat_lo(n, m, lo.beta(), p, signal).unwrap(),
                _ => amp_coherent_lo(n, m, lo.beta(), signal).unwrap(),
            };
            let brute = amplitude_bruteforce(n, m, &sig_vec, &lo_vec).unwrap();
            worst = worst.max((closed - brute).norm());
        }
    }
    worst
}

#[test]
fn closed_forms_agree_with_fock_space_sum() {
    for beta in [0.5, 1.0, 2.0] {
        let los = [
            LocalOscillator::coherent(beta, 0.0).unwrap(),
            LocalOscillator::cat(CatParity::Plus, beta, 0.0).unwrap(),
            LocalOscillator::cat(CatParity::Minus, beta, 0.0).unwrap(),
        ];
        for lo in &los {
            for signal in signals() {
                let dev = max_deviation(lo, &signal, 40);
                assert!(dev <= 1e-8, "{lo} {signal}: {dev:e}");
            }
        }
    }
}

#[test]
fn rotated_oscillator_agrees_with_fock_space_sum() {
    let lo = LocalOscillator::cat(CatParity::Minus, 1.4, 0.9).unwrap();
    let signal = SignalState::coherent(0.3, -0.7);
    assert!(max_deviation(&lo, &signal, 30) <= 1e-10);
    let lo = LocalOscillator::coherent(1.1, -2.0).unwrap();
    assert!(max_deviation(&lo, &SignalState::fock(4), 30) <= 1e-10);
}

#[test]
fn cat_marginals_with_vacuum() {
    // one detector alone sees Poisson(m; |β|²/2) (1 ± (−1)^m e^{−|β|²}) / (1 ± e^{−2|β|²}),
    // which tends to the plain Poisson law as the oscillator grows
    for beta in [1.0f64, 3.0, 5.0] {
        for parity in [CatParity::Plus, CatParity::Minus] {
            let lo = LocalOscillator::cat(parity, beta, 0.0).unwrap();
            let joint = joint_distribution(&lo, &SignalState::Vacuum, None, 1.0).unwrap();
            let mean = beta * beta / 2.0;
            let s = parity.sign();
            for marginal in [joint.marginal_n(), joint.marginal_m()] {
                for (k, p) in marginal.iter().enumerate() {
                    let alt = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let want = poisson_pmf(k as u64, mean) * (1.0 + s * alt * (-beta * beta).exp())
                        / (1.0 + s * (-2.0 * beta * beta).exp());
                    assert!((p - want).abs() <= 1e-12, "β={beta} {parity} k={k}: {p} vs {want}");
                    if beta >= 5.0 {
                        assert!((p - poisson_pmf(k as u64, mean)).abs() <= 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn cat_vacuum_closed_form() {
    // |A|² = Poisson(n;λ) Poisson(m;λ) |1 ± (−1)^{n+m}|² / 𝒩±²
    let beta = 1.7f64;
    let lam = beta * beta / 2.0;
    for parity in [CatParity::Plus, CatParity::Minus] {
        let norm = cat_norm(parity, beta).unwrap();
        for n in 0..20u64 {
            for m in 0..20u64 {
                let interference = 1.0 + parity.sign() * if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                let want = poisson_pmf(n, lam) * poisson_pmf(m, lam) * interference.powi(2) / norm.powi(2);
                let got = amp_cat_lo(n, m, Complex64::new(beta, 0.0), parity, &SignalState::Vacuum)
                    .unwrap()
                    .norm_sqr();
                assert!((got - want).abs() <= 1e-14, "{n} {m}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_coherent_signals_match_oracle(b in 0.3f64..2.5, th in -3.0f64..3.0, re in -1.5f64..1.5, im in -1.5f64..1.5, cat in 0usize..3) {
        let lo = match cat {
            0 => LocalOscillator::coherent(b, th),
            1 => LocalOscillator::cat(CatParity::Plus, b, th),
            _ => LocalOscillator::cat(CatParity::Minus, b, th),
        }
        .unwrap();
        prop_assert!(max_deviation(&lo, &SignalState::coherent(re, im), 24) <= 1e-10);
    }
}
