use proptest::prelude::*;

use entmix::applications::{
    agwn_1d_condentropy_bound, fano_rhs, grid_bayes_error, landauer_bounds, landauer_heat_oracle, ChannelSpec,
    EnergeticsSpec,
};
use entmix::bounds::{
    c_tilde, deficit_lower, deficit_upper_tv, gaussian_entropy_tail, gaussian_entropy_tail_1d, gaussian_norm_tail,
    gaussian_norm_tail_1d, k_phi, TailModel,
};
use entmix::density::{auto_certificate, component_entropy, gaussian_tail, ComponentDensity, MixtureModel, RadialProfile};
use entmix::divergence::{skew_chi2, skew_divergence, total_variation, DensityPair, DivergenceSpec};
use entmix::numerics::{mc_expectation, std_normal_cdf, McSpec, QuadratureSpec};
use entmix::oracle::{deficit_paths, mixture_entropy, OracleSpec};

fn weights(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let last: f64 = w[..w.len() - 1].iter().sum();
    *w.last_mut().unwrap() = 1.0 - last;
    w
}

fn mixture_1d() -> impl Strategy<Value = MixtureModel> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.1f64..1.0, n),
                prop::collection::vec(-4.0f64..4.0, n),
                prop::collection::vec(0.3f64..2.0, n),
            )
        })
        .prop_map(|(w, m, s)| {
            let comps = m.iter().zip(&s).map(|(&mu, &sg)| ComponentDensity::gaussian(vec![mu], sg).unwrap()).collect();
            MixtureModel::new(weights(&w), comps).unwrap()
        })
}

fn gauss_pair() -> impl Strategy<Value = DensityPair> {
    (-2.0f64..2.0, 0.5f64..1.5, -2.0f64..2.0, 0.5f64..1.5).prop_map(|(m1, s1, m2, s2)| {
        DensityPair::components(
            ComponentDensity::gaussian(vec![m1], s1).unwrap(),
            ComponentDensity::gaussian(vec![m2], s2).unwrap(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_pdf_matches_direct_sum(m in mixture_1d(), z in -6.0f64..6.0) {
        let direct: f64 = m.weights().iter().zip(m.components())
            .map(|(p, c)| p * c.log_pdf(&[z]).unwrap().exp()).sum();
        let l = m.log_pdf(&[z]).unwrap();
        prop_assert!((l.exp() - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn complement_remixes_to_mixture(m in mixture_1d(), z in -6.0f64..6.0) {
        prop_assume!(m.len() >= 2);
        let f = m.log_pdf(&[z]).unwrap().exp();
        for j in 0..m.len() {
            let pj = m.weights()[j];
            let fj = m.components()[j].log_pdf(&[z]).unwrap().exp();
            let fc = m.mixture_complement(j).unwrap().log_pdf(&[z]).unwrap().exp();
            prop_assert!((pj * fj + (1.0 - pj) * fc - f).abs() <= 1e-12 * f.max(1e-300));
        }
    }

    #[test]
    fn gaussian_tail_monotone(d in 1usize..6, a in 0.0f64..8.0, b in 0.0f64..8.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gaussian_tail(d, hi).unwrap() <= gaussian_tail(d, lo).unwrap());
        prop_assert_eq!(gaussian_tail(d, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn phi_symmetry(t in -8.0f64..8.0) {
        prop_assert!((std_normal_cdf(t) + std_normal_cdf(-t) - 1.0).abs() <= 1e-14);
        let q = gaussian_tail(1, t.abs()).unwrap();
        prop_assert!((q - 2.0 * (1.0 - std_normal_cdf(t.abs()))).abs() <= 1e-12);
    }

    #[test]
    fn appendix_norm_bound_homogeneous(d in 2usize..5, sigma in 0.2f64..5.0, lambda in 0.0f64..6.0) {
        let a = gaussian_norm_tail(d, sigma, lambda).unwrap();
        let b = sigma * gaussian_norm_tail(d, 1.0, lambda / sigma).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
    }

    #[test]
    fn c_tilde_non_increasing_with_single_overlap(
        d in 1usize..4, sigma in 0.3f64..2.0, l1 in 0.2f64..6.0, dl in 0.01f64..3.0, h in -2.0f64..3.0, k in 0.0f64..5.0
    ) {
        let tail = TailModel::gaussian(d, sigma).unwrap();
        let a = c_tilde(&tail, h, k, l1, 1.0, 1, d, true).unwrap().value;
        let b = c_tilde(&tail, h, k, l1 + dl, 1.0, 1, d, true).unwrap().value;
        // With h < 0 the entropy term may increase; the bound is on each
        // factor, so only compare when M + h ≥ 0.
        prop_assume!(1.0 + h >= 0.0);
        prop_assert!(b <= a + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mixture_integrates_to_one(m in mixture_1d()) {
        let spec = OracleSpec::default();
        let ln_f = |z: f64| m.log_pdf(&[z]).unwrap();
        let mass = entmix::numerics::integrate_1d(|z| ln_f(z).exp(), f64::NEG_INFINITY, f64::INFINITY, &spec.quadrature).unwrap();
        prop_assert!((mass.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn three_routes_and_eq_bounds(m in mixture_1d()) {
        let paths = deficit_paths(&m, &OracleSpec::default()).unwrap();
        prop_assert!(paths.worst_ratio() <= 1.0);
        let d = paths.via_divergences;
        let slack = d.error + 1e-9;
        prop_assert!(d.value >= -slack);
        prop_assert!(d.value <= m.weight_entropy() + slack);
    }

    #[test]
    fn translation_mixture_entropy_is_at_most_hp_plus_h(
        raw in prop::collection::vec(0.1f64..1.0, 2..5), sigma in 0.3f64..2.0, shift in -3.0f64..3.0
    ) {
        let n = raw.len();
        let means: Vec<Vec<f64>> = (0..n).map(|k| vec![shift * k as f64]).collect();
        let m = MixtureModel::gaussian_translates(weights(&raw), &means, sigma).unwrap();
        let h = mixture_entropy(&m, &OracleSpec::default()).unwrap();
        let hc = component_entropy(&m.components()[0]).unwrap();
        prop_assert!(h.value <= m.weight_entropy() + hc + h.error + 1e-9);
    }

    #[test]
    fn skew_derivative_identity(pair in gauss_pair(), ti in 0usize..3) {
        let t = [0.2, 0.5, 0.8][ti];
        let spec = DivergenceSpec::quadrature(QuadratureSpec::with_tol(1e-12));
        let h = 1e-4;
        let up = skew_divergence(&pair, t + h, &spec).unwrap().value;
        let dn = skew_divergence(&pair, t - h, &spec).unwrap().value;
        let chi = skew_chi2(&pair, t, &spec).unwrap().value;
        prop_assert!(((up - dn) / (2.0 * h) - (t - 1.0) * chi).abs() <= 1e-5);
    }

    #[test]
    fn skew_inequalities(pair in gauss_pair(), t in 0.05f64..0.95) {
        let spec = DivergenceSpec::default();
        let s = skew_divergence(&pair, t, &spec).unwrap().value;
        let chi = skew_chi2(&pair, t, &spec).unwrap().value;
        let tv = total_variation(&pair, &spec).unwrap().value;
        prop_assert!(s <= (1.0 - t).powi(2) * chi + 1e-9);
        prop_assert!(chi <= tv / (t * (1.0 - t)) + 1e-9);
        prop_assert!(s <= -t.ln() * tv + 1e-9);
        let rev = skew_chi2(&pair.swapped(), 1.0 - t, &spec).unwrap().value;
        prop_assert!((chi - rev).abs() <= 1e-8);
    }

    #[test]
    fn skew_is_decreasing_and_convex(pair in gauss_pair(), t in 0.1f64..0.8, dt in 0.02f64..0.1) {
        let spec = DivergenceSpec::default();
        let a = skew_divergence(&pair, t, &spec).unwrap().value;
        let b = skew_divergence(&pair, t + dt, &spec).unwrap().value;
        let c = skew_divergence(&pair, t + 2.0 * dt, &spec).unwrap().value;
        prop_assert!(b <= a + 1e-10 && c <= b + 1e-10);
        prop_assert!(b <= 0.5 * (a + c) + 1e-10);
    }

    #[test]
    fn sandwich_holds(
        n in 2usize..5, sigma in 0.4f64..1.5, gap in 1.0f64..8.0, raw in prop::collection::vec(0.1f64..1.0, 5)
    ) {
        let means: Vec<Vec<f64>> = (0..n).map(|k| vec![gap * k as f64]).collect();
        let m = MixtureModel::gaussian_translates(weights(&raw[..n]), &means, sigma).unwrap();
        let spec = DivergenceSpec::default();
        let cert = auto_certificate(&m).unwrap();
        prop_assert!(cert.is_verified());
        let lower = deficit_lower(&m, &cert, &spec.quadrature).unwrap();
        let upper = deficit_upper_tv(&m, &spec).unwrap();
        let oracle = deficit_paths(&m, &spec).unwrap().via_divergences;
        prop_assert!(lower.value <= oracle.value + oracle.error + 1e-9);
        prop_assert!(oracle.value <= upper.value + oracle.error + 1e-9);
        prop_assert!(upper.value <= m.weight_entropy());
    }

    #[test]
    fn oracle_below_agwn_bound(n in 2usize..6, lambda in 0.3f64..2.0, sigma in 0.3f64..1.5) {
        let model = ChannelSpec::uniform_grid(n, lambda, sigma).unwrap().model().unwrap();
        let h = entmix::oracle::conditional_entropy_x_given_z(&model, &OracleSpec::default()).unwrap();
        let b = agwn_1d_condentropy_bound(lambda, sigma).unwrap();
        prop_assert!(h.value <= b.value + h.error);
        // Fano at the exact Bayes error also bounds H(X|Z).
        let fano = fano_rhs(grid_bayes_error(n, lambda, sigma).unwrap(), n).unwrap();
        prop_assert!(h.value <= fano + h.error + 1e-12);
    }

    #[test]
    fn landauer_band_contains_heat(u in 0.5f64..3.5, p0 in 0.05f64..0.95, p1 in 0.0f64..1.0) {
        let s = EnergeticsSpec::new(u, 1.0, p0, p1).unwrap();
        let heat = landauer_heat_oracle(&s, &OracleSpec::default()).unwrap();
        prop_assert!(landauer_bounds(&s).unwrap().contains(heat.value, heat.error + 1e-9));
    }
}

#[test]
fn c_tilde_overlap_term_can_grow_with_lambda() {
    // The (M−1)(1 − 𝒯(λτ)) term increases with λ, so C̃ is not monotone once
    // M ≥ 2 and τ > 1.
    let tail = TailModel::gaussian(1, 1.0).unwrap();
    let a = c_tilde(&tail, 1.4, 0.1, 0.3, 4.0, 10, 1, true).unwrap().value;
    let b = c_tilde(&tail, 1.4, 0.1, 0.4, 4.0, 10, 1, true).unwrap().value;
    assert!(b > a, "{a} {b}");
}

#[test]
fn appendix_bounds_dominate_on_grid() {
    let q = QuadratureSpec::default();
    for d in [1usize, 2] {
        for sigma in [0.5, 1.0, 2.0] {
            for lambda in [0.5, 1.0, 2.0, 4.0] {
                let p = RadialProfile::Gaussian { sigma };
                let ent = p.radial_integral(d, lambda, |_, lp| -lp * lp.exp(), &q).unwrap().value;
                let norm = p.radial_integral(d, lambda, |r, lp| r * lp.exp(), &q).unwrap().value;
                let (eb, nb) = if d == 1 {
                    (gaussian_entropy_tail_1d(sigma, lambda).unwrap(), gaussian_norm_tail_1d(sigma, lambda).unwrap())
                } else {
                    (gaussian_entropy_tail(d, sigma, lambda).unwrap(), gaussian_norm_tail(d, sigma, lambda).unwrap())
                };
                assert!(ent <= eb + 1e-12, "entropy d={d} σ={sigma} λ={lambda}");
                assert!(norm <= nb + 1e-12, "norm d={d} σ={sigma} λ={lambda}");
            }
        }
    }
}

#[test]
fn k_phi_integral_against_mc_in_two_dimensions() {
    struct Iso2;
    impl entmix::numerics::Sampler for Iso2 {
        fn dim(&self) -> usize {
            2
        }
        fn sample(&self, rng: &mut entmix::numerics::McRng, out: &mut [f64]) {
            use rand_distr::{Distribution, StandardNormal};
            for x in out.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
        }
    }
    let g = RadialProfile::Gaussian { sigma: 1.0 };
    let (lambda, tau) = (1.5, 1.3);
    let k = k_phi(&g, 2, lambda, tau, 1, lambda, &QuadratureSpec::default()).unwrap().value;
    let log_part = (2.0 * tau.ln() + (g.sup_norm(2) + (3.0 / lambda).powi(2) / std::f64::consts::PI).ln())
        * gaussian_tail(2, lambda).unwrap().sqrt();
    let integral = ((k - log_part) / 2.0).powi(2);
    let mc = mc_expectation(
        &Iso2,
        |w| {
            let r = (w[0] * w[0] + w[1] * w[1]).sqrt();
            if r > lambda {
                (1.0 + (lambda * tau + tau * tau * r) / lambda).ln().powi(2)
            } else {
                0.0
            }
        },
        &McSpec::new(5, 400_000, 8),
    )
    .unwrap();
    assert!((integral - mc.value).abs() < 3.0 * mc.error, "{integral} vs {mc:?}");
}
