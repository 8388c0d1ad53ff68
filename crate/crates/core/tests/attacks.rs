use usnc_core::adversary::{
    binding_success, hiding_advantage, less_noisy_bob, midpoint_attack, weight_code, window_attack, Context, Mode,
};
use usnc_core::bounds::{delta_b_bound, delta_h_bound};
use usnc_core::channel::UsncParams;
use usnc_core::entropy::cond_min_entropy;
use usnc_core::gf2::{BitString, LinearCode};
use usnc_core::oracle::typical_intersection_exact;
use usnc_core::protocol::CommitConfig;

fn hamming_cfg(m: usize) -> CommitConfig {
    CommitConfig::new(LinearCode::hamming_7_4(), m, 0.25, 0.1).unwrap()
}

#[test]
fn hiding_advantage_shrinks_with_view_noise() {
    let cfg = hamming_cfg(1);
    let (m0, m1) = (BitString::zeros(1), BitString::ones(1));
    let grid = [0.0, 0.05, 0.1, 0.2, 0.25];
    let values: Vec<f64> = grid
        .iter()
        .map(|&p_b| {
            let bob = less_noisy_bob(p_b, 7).unwrap();
            hiding_advantage(&bob, &cfg, &m0, &m1, Mode::Exact, Context::Exploratory).unwrap().value
        })
        .collect();
    assert!((values[0] - 1.0).abs() < 1e-12);
    for pair in values.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "{values:?}");
    }
}

#[test]
fn certified_views_respect_the_hiding_bound() {
    for m in [1usize, 2] {
        let cfg = hamming_cfg(m);
        let m0 = BitString::zeros(m);
        let m1 = BitString::ones(m);
        for p_b in [0.1, 0.2, 0.25] {
            let mut bob = less_noisy_bob(p_b, 7).unwrap();
            let l_b = cond_min_entropy(&bob.view().joint_with_uniform_input().unwrap()).unwrap();
            let params = UsncParams { n: 7, p: 0.25, eps_a: 0.0, l_a: 0.0, eps_b: 0.0, l_b };
            assert!(bob.certify(&params).unwrap().passed);
            let adv = hiding_advantage(&bob, &cfg, &m0, &m1, Mode::Exact, Context::BoundComparison).unwrap().value;
            assert!(adv <= delta_h_bound(7.0, m as f64, 4.0, l_b, 0.0), "m={m} p_b={p_b}: {adv}");
        }
    }
}

#[test]
fn uncertified_views_are_refused_for_bound_comparison() {
    let cfg = hamming_cfg(1);
    let bob = less_noisy_bob(0.1, 7).unwrap();
    let (m0, m1) = (BitString::zeros(1), BitString::ones(1));
    assert!(hiding_advantage(&bob, &cfg, &m0, &m1, Mode::Exact, Context::BoundComparison).is_err());
}

#[test]
fn hiding_modes_agree() {
    let cfg = hamming_cfg(2);
    let (m0, m1) = (BitString::from_u64(1, 2), BitString::from_u64(2, 2));
    for p_b in [0.05, 0.2] {
        let bob = less_noisy_bob(p_b, 7).unwrap();
        let exact = hiding_advantage(&bob, &cfg, &m0, &m1, Mode::Exact, Context::Exploratory).unwrap().value;
        let mc = hiding_advantage(&bob, &cfg, &m0, &m1, Mode::MonteCarlo { samples: 5000, seed: 1 }, Context::Exploratory)
            .unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.standard_error, "{exact} vs {mc:?}");
    }
}

#[test]
fn binding_modes_agree_and_respect_bound() {
    let code = weight_code(14, 4).unwrap();
    let x1 = code.encode(&BitString::ones(1)).unwrap();
    let cfg = CommitConfig::relaxed(code, 1, 0.25, 0.05).unwrap();
    let zero = BitString::zeros(14);
    for spread in [0.1, 0.25] {
        let mut s = midpoint_attack(&cfg, &zero, &x1, spread).unwrap();
        let l_a = -s.channel().law(0).max().log2();
        s.certify(&UsncParams { n: 14, p: 0.25, eps_a: 0.0, l_a, eps_b: 0.0, l_b: 0.0 }).unwrap();
        let exact = binding_success(&s, &cfg, Mode::Exact, Context::BoundComparison).unwrap().value;
        let mc = binding_success(&s, &cfg, Mode::MonteCarlo { samples: 50_000, seed: 7 }, Context::BoundComparison).unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.standard_error, "{exact} vs {mc:?}");
        assert!(exact <= delta_b_bound(14.0, 0.05, 4.0 / 28.0, 0.25, l_a, 0.0).unwrap());
    }
}

#[test]
fn window_attack_wins_exactly_on_the_intersection() {
    let code = weight_code(14, 6).unwrap();
    let x1 = code.encode(&BitString::ones(1)).unwrap();
    let cfg = CommitConfig::relaxed(code, 1, 0.25, 0.05).unwrap();
    let zero = BitString::zeros(14);
    let s = window_attack(&cfg, &zero, &x1).unwrap();
    let v = binding_success(&s, &cfg, Mode::Exact, Context::Exploratory).unwrap().value;
    assert!((v - 1.0).abs() < 1e-12);
    let size = typical_intersection_exact(0.25, 0.05, &zero, &x1).unwrap() as f64;
    assert!((-s.channel().law(0).max().log2() - size.log2()).abs() < 1e-12);
}
