//! Lower bound on the concavity deficit: H(p) − C̃(W), clamped at 0.

use crate::density::{common_base, verify_separation, ComponentDensity, MixtureModel, RadialProfile, SeparationCertificate};
use crate::error::{Error, Result};
use crate::numerics::special::unit_ball_volume;
use crate::numerics::{Estimate, QuadratureSpec};

use super::report::{BoundKind, BoundReport};
use super::tail::TailModel;

/// Constant c of the well-spaced sum lemma.
pub const SPACING_CONSTANT: f64 = 3.0;

/// M(‖φ‖_∞ + (3/λ)^d ω_d⁻¹): bounds Σ_x φ(x) over a λ-spaced set with
/// overlap M.
pub fn well_spaced_sum_bound(profile: &RadialProfile, lambda: f64, m: usize, d: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::input(format!("lambda must be positive, got {lambda}")));
    }
    profile.check_dim(d)?;
    Ok(m as f64 * (profile.sup_norm(d) + (SPACING_CONSTANT / lambda).powi(d as i32) / unit_ball_volume(d)))
}

/// M((λ + ε + 2τ|w|)/λ)^d: bounds #{l : |T_ij(w) − T_lj(w)| < ε}.
pub fn counting_bound(lambda: f64, eps: f64, tau: f64, m: usize, w_norm: f64, d: usize) -> Result<f64> {
    if !(lambda > 0.0 && eps > 0.0) {
        return Err(Error::input("lambda and epsilon must be positive"));
    }
    if !(w_norm >= 0.0) {
        return Err(Error::input("|w| must be >= 0"));
    }
    Ok(m as f64 * ((lambda + eps + 2.0 * tau * w_norm) / lambda).powi(d as i32))
}

/// K(φ) = ln[τ^d M(‖φ‖_∞ + (3/ε)^d ω_d⁻¹)]·P^{1/2}(|W| > λ)
///      + d·(∫_{|w|>λ} φ ln²[1 + (ετ + τ²|w|)/λ] dw)^{1/2}.
///
/// The integral is reduced to one dimension with the surface factor
/// d·ω_d·r^{d−1}. Pass `eps = lambda` for the default form.
pub fn k_phi(
    profile: &RadialProfile,
    d: usize,
    lambda: f64,
    tau: f64,
    m: usize,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(lambda > 0.0 && eps > 0.0) {
        return Err(Error::input("lambda and epsilon must be positive"));
    }
    if !(tau >= 1.0) {
        return Err(Error::input(format!("tau must be >= 1, got {tau}")));
    }
    if m == 0 {
        return Err(Error::input("M must be >= 1"));
    }
    profile.check_dim(d)?;
    let df = d as f64;
    let tail = profile.tail(d, lambda)?;
    let log_term = (df * tau.ln() + (m as f64).ln()
        + (profile.sup_norm(d) + (SPACING_CONSTANT / eps).powi(d as i32) / unit_ball_volume(d)).ln())
        * tail.sqrt();
    let integral = profile.radial_integral(
        d,
        lambda,
        |r, lp| {
            let l = (1.0 + (eps * tau + tau * tau * r) / lambda).ln();
            lp.exp() * l * l
        },
        spec,
    )?;
    let root = integral.value.max(0.0).sqrt();
    let root_err = if root > 0.0 { integral.error / (2.0 * root) } else { integral.error.sqrt() };
    Ok(Estimate::quadrature(log_term + df * root, df * root_err))
}

/// C̃(W) = (M−1)(1 − 𝒯(λτ)) + 𝒯(λ)(M + h(W)) + 𝒯^{1/2}(λ)(√d + K(φ)).
///
/// `verified` should come from [`crate::density::verify_separation`]; an
/// unverified certificate yields a non-binding report.
#[allow(clippy::too_many_arguments)]
pub fn c_tilde(
    tail: &TailModel,
    h_base: f64,
    k: f64,
    lambda: f64,
    tau: f64,
    m: usize,
    d: usize,
    verified: bool,
) -> Result<BoundReport> {
    if !(lambda > 0.0) || m == 0 || !(tau >= 1.0) {
        return Err(Error::input("need lambda > 0, M >= 1, tau >= 1"));
    }
    if d != tail.dim() {
        return Err(Error::Dimension { expected: tail.dim(), got: d });
    }
    let mf = m as f64;
    let t_lam = tail.tail(lambda)?;
    let t_lam_tau = tail.tail(lambda * tau)?;
    let overlap = (mf - 1.0) * (1.0 - t_lam_tau);
    let entropy_term = t_lam * (mf + h_base);
    let root_term = t_lam.sqrt() * ((d as f64).sqrt() + k);
    let value = overlap + entropy_term + root_term;
    Ok(BoundReport::new(BoundKind::Gap, value)
        .precondition("separation certificate verified", verified)
        .input("lambda", lambda)
        .input("tau", tau)
        .input("M", mf)
        .input("d", d as f64)
        .input("h_base", h_base)
        .input("k_phi", k)
        .detail("tail_lambda", t_lam)
        .detail("tail_lambda_tau", t_lam_tau)
        .detail("overlap_term", overlap)
        .detail("entropy_term", entropy_term)
        .detail("root_term", root_term))
}

/// Entropy of a base profile: closed form when known, radial quadrature otherwise.
pub(crate) fn profile_entropy(profile: &RadialProfile, d: usize, spec: &QuadratureSpec) -> Result<f64> {
    match profile.entropy(d) {
        Some(h) => Ok(h),
        None => Ok(profile.radial_integral(d, 0.0, |_, lp| -lp * lp.exp(), spec)?.value),
    }
}

/// Lower bound H(p) − C̃(W) on h(f) − Σ p_i h(f_i), clamped at 0.
pub fn deficit_lower(model: &MixtureModel, cert: &SeparationCertificate, spec: &QuadratureSpec) -> Result<BoundReport> {
    deficit_lower_eps(model, cert, cert.lambda(), spec)
}

/// [`deficit_lower`] with an explicit ε in K(φ).
pub fn deficit_lower_eps(
    model: &MixtureModel,
    cert: &SeparationCertificate,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<BoundReport> {
    let base = common_base(model)?;
    let d = model.dim();
    let verified = verify_separation(model, cert)?;
    let (lambda, tau, m) = (cert.lambda(), cert.tau(), cert.m());
    let h_base = profile_entropy(&base.profile, d, spec)?;
    let k = k_phi(&base.profile, d, lambda, tau, m, eps, spec)?;
    let tail = TailModel::for_profile(&base.profile, d)?;
    let ct = c_tilde(&tail, h_base, k.value, lambda, tau, m, d, verified)?;
    let hp = model.weight_entropy();
    let mut report = BoundReport::new(BoundKind::LowerDeficit, hp - ct.value)
        .precondition("separation certificate verified", verified)
        .precondition("common log-concave base", base.profile.is_log_concave())
        .input("lambda", lambda)
        .input("tau", tau)
        .input("M", m as f64)
        .input("epsilon", eps)
        .input("d", d as f64)
        .detail("entropy_p", hp)
        .detail("c_tilde", ct.value)
        .detail("k_phi", k.value)
        .detail("h_base", h_base)
        .detail("model_tau", base.tau);
    for (key, v) in &ct.details {
        report = report.detail(key, *v);
    }
    Ok(report.clamp_below(0.0))
}

/// Varentropy Var(−ln φ(X)) of a component, X ~ φ.
///
/// The surprisal of A W + b differs from that of W by the constant ln|det A|,
/// so the value is the base profile's varentropy, computed by radial
/// quadrature in any dimension.
pub fn varentropy(c: &ComponentDensity, spec: &QuadratureSpec) -> Result<Estimate> {
    let (profile, map) = c.as_pushforward();
    let d = map.dim();
    let h = profile.radial_integral(d, 0.0, |_, lp| -lp * lp.exp(), spec)?;
    let v = profile.radial_integral(
        d,
        0.0,
        |_, lp| {
            let s = -lp - h.value;
            s * s * lp.exp()
        },
        spec,
    )?;
    let est = Estimate::quadrature(v.value, v.error + 2.0 * h.error * h.value.abs().max(1.0));
    let d_f = d as f64;
    if profile.is_log_concave() && est.value > d_f + 1e-6 + est.error {
        return Err(Error::InternalConsistency(format!(
            "varentropy {} exceeds d = {d} for a log-concave density",
            est.value
        )));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{certify, gaussian_tail};
    use crate::numerics::special::std_normal_pdf;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn well_spaced_sum_on_grid() {
        let g = RadialProfile::Gaussian { sigma: 1.0 };
        for lambda in [0.25, 0.5, 1.0, 2.0] {
            let direct: f64 = (-200..=200).map(|k| std_normal_pdf(2.0 * lambda * k as f64)).sum();
            assert!(direct <= well_spaced_sum_bound(&g, lambda, 1, 1).unwrap());
            let b1 = well_spaced_sum_bound(&g, lambda, 1, 1).unwrap();
            let b2 = well_spaced_sum_bound(&g, lambda, 2, 1).unwrap();
            assert!((b2 - 2.0 * b1).abs() < 1e-15);
        }
    }

    #[test]
    fn well_spaced_uniform_is_packing_count() {
        for d in 1..=3 {
            let radius = 1.7;
            let lambda = 0.4;
            let u = RadialProfile::UniformBall { radius };
            let b = well_spaced_sum_bound(&u, lambda, 1, d).unwrap();
            let count = 1.0 + (SPACING_CONSTANT * radius / lambda).powi(d as i32);
            let vol = unit_ball_volume(d) * radius.powi(d as i32);
            assert!((b * vol - count).abs() < 1e-12 * count);
        }
    }

    #[test]
    fn counting_bound_cases() {
        assert!((counting_bound(0.7, 0.7, 1.0, 1, 0.0, 3).unwrap() - 8.0).abs() < 1e-12);
        // 2λ grid of translations, τ = 1: count points within ε of the image of w.
        let lambda = 0.5;
        let pts: Vec<f64> = (-50..=50).map(|k| 2.0 * lambda * k as f64).collect();
        for &(w, eps) in &[(0.0, 0.5), (0.3, 1.0), (2.0, 0.2), (5.0, 3.0)] {
            for &xi in &pts[40..60] {
                let count = pts.iter().filter(|&&xl| ((w + xi) - (w + xl)).abs() < eps).count();
                assert!(count as f64 <= counting_bound(lambda, eps, 1.0, 1, w, 1).unwrap());
            }
        }
        let mut prev = 0.0;
        for k in 0..20 {
            let v = counting_bound(1.0, 0.5, 1.3, 2, k as f64 * 0.3, 2).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn k_phi_limits() {
        let g = RadialProfile::Gaussian { sigma: 1.0 };
        let k = k_phi(&g, 1, 12.0, 1.0, 1, 12.0, &q()).unwrap();
        assert!(k.value.abs() < 1e-6, "{k:?}");
        let k1 = k_phi(&g, 1, 1.0, 1.0, 1, 1.0, &q()).unwrap();
        assert!(k1.value.is_finite() && k1.value > 0.0);
        assert!((g.sup_norm(2) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    struct StdNormal;

    impl crate::numerics::Sampler for StdNormal {
        fn dim(&self) -> usize {
            1
        }
        fn sample(&self, rng: &mut crate::numerics::McRng, out: &mut [f64]) {
            use rand_distr::{Distribution, StandardNormal};
            out[0] = StandardNormal.sample(rng);
        }
    }

    #[test]
    fn k_phi_tail_integral_matches_mc() {
        let g = RadialProfile::Gaussian { sigma: 1.0 };
        let k = k_phi(&g, 1, 1.0, 1.0, 1, 1.0, &q()).unwrap().value;
        let tail = gaussian_tail(1, 1.0).unwrap();
        let log_part = (g.sup_norm(1) + 3.0 / unit_ball_volume(1)).ln() * tail.sqrt();
        let integral = (k - log_part).powi(2);
        let mc = crate::numerics::mc_expectation(
            &StdNormal,
            |w| {
                let r = w[0].abs();
                if r > 1.0 {
                    (2.0 + r).ln().powi(2)
                } else {
                    0.0
                }
            },
            &crate::numerics::McSpec::new(11, 400_000, 4),
        )
        .unwrap();
        assert!((integral - mc.value).abs() < 3.0 * mc.error, "{integral} vs {mc:?}");
    }

    #[test]
    fn c_tilde_reductions() {
        let tail = TailModel::gaussian(1, 1.0).unwrap();
        let h = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        let k = k_phi(&RadialProfile::Gaussian { sigma: 1.0 }, 1, 3.0, 1.0, 1, 3.0, &q()).unwrap().value;
        let r = c_tilde(&tail, h, k, 3.0, 1.0, 1, 1, true).unwrap();
        let t3 = gaussian_tail(1, 3.0).unwrap();
        let want = t3 * (1.0 + h) + t3.sqrt() * (1.0 + k);
        assert!((r.value - want).abs() < 1e-15);
        assert_eq!(r.get("overlap_term"), Some(0.0));
        let unverified = c_tilde(&tail, h, k, 3.0, 1.0, 1, 1, false).unwrap();
        assert!(!unverified.binding);
        // Far out the tail terms vanish and only (M − 1) remains.
        let far = c_tilde(&tail, h, 0.0, 60.0, 1.0, 4, 1, true).unwrap();
        assert!((far.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_for_separated_grid() {
        let means: Vec<Vec<f64>> = (0..4).map(|k| vec![12.0 * k as f64]).collect();
        let m = MixtureModel::gaussian_translates(vec![0.25; 4], &means, 1.0).unwrap();
        let cert = certify(&m, SeparationCertificate::new(6.0, 1, 1.0).unwrap()).unwrap();
        assert!(cert.is_verified());
        let r = deficit_lower(&m, &cert, &q()).unwrap();
        assert!(r.binding && !r.clamped);
        assert!((r.value - 4f64.ln()).abs() < 1e-3, "{}", r.value);
    }

    #[test]
    fn lower_bound_gates() {
        let m = MixtureModel::gaussian_translates(vec![0.5, 0.5], &[vec![0.0], vec![0.5]], 1.0).unwrap();
        let cert = SeparationCertificate::new(2.0, 1, 1.0).unwrap();
        let r = deficit_lower(&m, &cert, &q()).unwrap();
        assert!(!r.binding);
        let single = MixtureModel::single(ComponentDensity::gaussian(vec![0.0], 1.0).unwrap());
        let r = deficit_lower(&single, &SeparationCertificate::new(1.0, 1, 1.0).unwrap(), &q()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.clamped);
    }

    #[test]
    fn varentropy_values() {
        for (d, sigma) in [(1, 0.3), (1, 2.0), (2, 1.0), (3, 0.7)] {
            let c = ComponentDensity::gaussian(vec![0.0; d], sigma).unwrap();
            let v = varentropy(&c, &q()).unwrap();
            assert!((v.value - d as f64 / 2.0).abs() < 1e-8, "d={d}: {}", v.value);
        }
        let unif = ComponentDensity::pushforward(
            RadialProfile::UniformBall { radius: 2.0 },
            crate::density::AffineMap::translation(&[0.0, 0.0]),
        )
        .unwrap();
        assert!(varentropy(&unif, &q()).unwrap().value.abs() < 1e-12);
        let exp = ComponentDensity::pushforward(
            RadialProfile::Exponential { scale: 0.4 },
            crate::density::AffineMap::translation(&[0.0, 0.0]),
        )
        .unwrap();
        assert!((varentropy(&exp, &q()).unwrap().value - 2.0).abs() < 1e-7);
    }
}
