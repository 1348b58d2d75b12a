//! f-divergences between mixtures and their skewed variants.
//!
//! With u, v the densities of μ, ν:
//!
//! * `S_t(μ‖ν) = D(μ ‖ tμ + (1−t)ν)`
//! * `χ²_t(μ;ν) = ∫ (u − v)² / (t u + (1−t) v)`
//! * `JSD(μ‖ν) = ½ D(μ‖m) + ½ D(ν‖m)`, m = (μ+ν)/2
//!
//! Integrals run by quadrature for d ≤ 2 and by Monte Carlo above. Where both
//! densities are below 1e-300 the point is dropped. Where the reference
//! density is exactly zero under positive mass the result is `+∞`.

mod generator;

use std::cell::Cell;
use std::f64::consts::LN_2;

pub use generator::{skewed_generator, ConvexGenerator};

use crate::density::{integrate_domain, ComponentDensity, Domain, MixtureModel};
use crate::error::{Error, Result};
use crate::numerics::special::log_add_exp;
use crate::numerics::{mc_expectation, std_normal_cdf, Estimate, McSpec, Method, QuadratureSpec};

/// ln(1e-300)
const LN_TINY: f64 = -690.775_527_898_213_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Quadrature for d ≤ 2, Monte Carlo otherwise.
    #[default]
    Auto,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceSpec {
    pub quadrature: QuadratureSpec,
    pub mc: McSpec,
    pub backend: Backend,
    /// Use closed forms where available (equal-σ Gaussian TV).
    pub closed_forms: bool,
}

impl Default for DivergenceSpec {
    fn default() -> Self {
        DivergenceSpec {
            quadrature: QuadratureSpec::default(),
            mc: McSpec::default(),
            backend: Backend::Auto,
            closed_forms: true,
        }
    }
}

impl DivergenceSpec {
    pub fn quadrature(spec: QuadratureSpec) -> Self {
        DivergenceSpec { quadrature: spec, ..Default::default() }
    }

    pub fn monte_carlo(mc: McSpec) -> Self {
        DivergenceSpec { mc, backend: Backend::MonteCarlo, ..Default::default() }
    }

    fn use_mc(&self, dim: usize) -> bool {
        match self.backend {
            Backend::Auto => dim > 2,
            Backend::Quadrature => false,
            Backend::MonteCarlo => true,
        }
    }
}

/// Two probability measures of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub mu: MixtureModel,
    pub nu: MixtureModel,
}

impl DensityPair {
    pub fn new(mu: MixtureModel, nu: MixtureModel) -> Result<Self> {
        if mu.dim() != nu.dim() {
            return Err(Error::Dimension { expected: mu.dim(), got: nu.dim() });
        }
        Ok(DensityPair { mu, nu })
    }

    pub fn components(mu: ComponentDensity, nu: ComponentDensity) -> Result<Self> {
        DensityPair::new(MixtureModel::single(mu), MixtureModel::single(nu))
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn swapped(&self) -> DensityPair {
        DensityPair { mu: self.nu.clone(), nu: self.mu.clone() }
    }
}

/// Which measure Monte Carlo draws from.
#[derive(Clone, Copy)]
enum Proposal {
    Mu,
    Midpoint,
}

/// ∫ g(ln u, ln v) dz. `g` returns +∞ to flag a non-dominated point.
fn pair_integral<G>(pair: &DensityPair, spec: &DivergenceSpec, proposal: Proposal, g: G) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let eval = |z: &[f64]| -> f64 {
        let lu = pair.mu.ln_pdf_unchecked(z);
        let lv = pair.nu.ln_pdf_unchecked(z);
        if lu < LN_TINY && lv < LN_TINY {
            return 0.0;
        }
        g(lu, lv)
    };
    if spec.use_mc(pair.dim()) {
        let mid;
        let infinite = std::sync::atomic::AtomicBool::new(false);
        let (sampler, ln_q): (&MixtureModel, Box<dyn Fn(&[f64]) -> f64 + Sync>) = match proposal {
            Proposal::Mu => (&pair.mu, Box::new(|z: &[f64]| pair.mu.ln_pdf_unchecked(z))),
            Proposal::Midpoint => {
                mid = MixtureModel::blend(&pair.mu, &pair.nu, 0.5)?;
                (&mid, Box::new(|z: &[f64]| {
                    log_add_exp(pair.mu.ln_pdf_unchecked(z), pair.nu.ln_pdf_unchecked(z)) - LN_2
                }))
            }
        };
        let est = mc_expectation(
            sampler,
            |z| {
                let v = eval(z);
                if v == f64::INFINITY {
                    infinite.store(true, std::sync::atomic::Ordering::Relaxed);
                    return 0.0;
                }
                if v == 0.0 {
                    return 0.0;
                }
                v * (-ln_q(z)).exp()
            },
            &spec.mc,
        )?;
        if infinite.load(std::sync::atomic::Ordering::Relaxed) {
            return Ok(Estimate { value: f64::INFINITY, error: 0.0, method: est.method });
        }
        return Ok(est);
    }
    let domain = Domain::covering(&[&pair.mu, &pair.nu])?;
    let infinite = Cell::new(false);
    let est = integrate_domain(
        &domain,
        |z| {
            let v = eval(z);
            if v == f64::INFINITY {
                infinite.set(true);
                return 0.0;
            }
            v
        },
        &spec.quadrature,
    )?;
    if infinite.get() {
        return Ok(Estimate { value: f64::INFINITY, error: 0.0, method: Method::Quadrature });
    }
    Ok(est)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::input(format!("t must lie in [0,1], got {t}")));
    }
    Ok(())
}

/// u·(ln u − ln w), with the conventions 0·ln 0 = 0 and u > 0 = w → +∞.
#[inline]
fn kl_term(lu: f64, lw: f64) -> f64 {
    if lu == f64::NEG_INFINITY {
        return 0.0;
    }
    if lw == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    lu.exp() * (lu - lw)
}

/// D(μ‖ν) = ∫ u ln(u/v).
pub fn kl(pair: &DensityPair, spec: &DivergenceSpec) -> Result<Estimate> {
    pair_integral(pair, spec, Proposal::Mu, kl_term)
}

/// ½∫|u − v|, in [0, 1].
pub fn total_variation(pair: &DensityPair, spec: &DivergenceSpec) -> Result<Estimate> {
    if spec.closed_forms {
        if let Some(tv) = gaussian_tv_closed_form(pair) {
            return Ok(Estimate::exact(tv));
        }
    }
    let est = pair_integral(pair, spec, Proposal::Mu, |lu, lv| 0.5 * (lu.exp() - lv.exp()).abs())?;
    Ok(Estimate { value: est.value.clamp(0.0, 1.0), ..est })
}

/// 2Φ(Δ/2σ) − 1 for two single Gaussians with equal σ at mean distance Δ.
pub fn gaussian_tv_closed_form(pair: &DensityPair) -> Option<f64> {
    if pair.mu.len() != 1 || pair.nu.len() != 1 {
        return None;
    }
    match (&pair.mu.components()[0], &pair.nu.components()[0]) {
        (ComponentDensity::Gaussian(a), ComponentDensity::Gaussian(b)) if a.sigma() == b.sigma() => {
            let delta: f64 = a.mean().iter().zip(b.mean()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            Some(2.0 * std_normal_cdf(delta / (2.0 * a.sigma())) - 1.0)
        }
        _ => None,
    }
}

/// S_t(μ‖ν) = D(μ ‖ tμ + (1−t)ν). S_0 is D(μ‖ν), S_1 = 0.
pub fn skew_divergence(pair: &DensityPair, t: f64, spec: &DivergenceSpec) -> Result<Estimate> {
    check_t(t)?;
    if t == 1.0 {
        return Ok(Estimate::exact(0.0));
    }
    if t == 0.0 {
        return kl(pair, spec);
    }
    let (lt, l1t) = (t.ln(), (1.0 - t).ln());
    let est = pair_integral(pair, spec, Proposal::Mu, |lu, lv| {
        kl_term(lu, log_add_exp(lt + lu, l1t + lv))
    })?;
    Ok(est)
}

/// χ²_t(μ;ν) = ∫ (u − v)²/(t u + (1−t) v). t = 0 is Pearson χ²(μ‖ν), t = 1 Neyman.
pub fn skew_chi2(pair: &DensityPair, t: f64, spec: &DivergenceSpec) -> Result<Estimate> {
    check_t(t)?;
    let (lt, l1t) = (t.ln(), (1.0 - t).ln());
    pair_integral(pair, spec, Proposal::Midpoint, |lu, lv| {
        let lm = log_add_exp(lt + lu, l1t + lv);
        let (hi, lo) = if lu >= lv { (lu, lv) } else { (lv, lu) };
        if lm == f64::NEG_INFINITY {
            return if hi == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
        }
        // (u − v)² / m = e^{2·hi − lm} (1 − e^{lo − hi})²
        let r = -(lo - hi).exp_m1();
        (2.0 * hi - lm).exp() * r * r
    })
}

/// Jensen–Shannon divergence, in [0, ln 2].
pub fn jsd(pair: &DensityPair, spec: &DivergenceSpec) -> Result<Estimate> {
    let est = pair_integral(pair, spec, Proposal::Midpoint, |lu, lv| {
        let lm = log_add_exp(lu, lv) - LN_2;
        0.5 * (kl_term(lu, lm) + kl_term(lv, lm))
    })?;
    Ok(est)
}

fn check_alpha_w(alpha: &[f64], w: &[f64]) -> Result<f64> {
    if alpha.is_empty() || alpha.len() != w.len() {
        return Err(Error::input("alpha and w must be non-empty and of equal length"));
    }
    if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::input(format!("alpha entries must lie in [0,1], got {a}")));
    }
    if let Some(x) = w.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::input(format!("weights must be positive, got {x}")));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::input(format!("weights sum to {s}, not 1")));
    }
    Ok(alpha.iter().zip(w).map(|(a, x)| a * x).sum())
}

/// Σ_i w_i D((1−α_i)μ + α_i ν ‖ (1−ᾱ)μ + ᾱν), ᾱ = Σ w_i α_i.
pub fn generalized_jsd(pair: &DensityPair, alpha: &[f64], w: &[f64], spec: &DivergenceSpec) -> Result<Estimate> {
    let abar = check_alpha_w(alpha, w)?;
    let mix = |a: f64, lu: f64, lv: f64| -> f64 {
        if a == 0.0 {
            lu
        } else if a == 1.0 {
            lv
        } else {
            log_add_exp((1.0 - a).ln() + lu, a.ln() + lv)
        }
    };
    let terms: Vec<(f64, f64)> = alpha.iter().copied().zip(w.iter().copied()).collect();
    let est = pair_integral(pair, spec, Proposal::Midpoint, |lu, lv| {
        let lbar = mix(abar, lu, lv);
        terms.iter().map(|&(a, wi)| wi * kl_term(mix(a, lu, lv), lbar)).sum()
    })?;
    Ok(est)
}

/// D_f(μ‖ν) = ∫ v f(u/v) for a validated convex generator.
pub fn f_divergence(pair: &DensityPair, g: &ConvexGenerator, spec: &DivergenceSpec) -> Result<Estimate> {
    pair_integral(pair, spec, Proposal::Midpoint, |lu, lv| {
        if lv == f64::NEG_INFINITY {
            return if lu == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
        }
        lv.exp() * g.eval((lu - lv).exp())
    })
}

/// Generalized JSD computed as Σ_i w_i D_{f̂_i}(μ‖ν) with f̂_i the skew of
/// x ln x at r = 1 − α_i, t = 1 − ᾱ.
pub fn generalized_jsd_via_generators(
    pair: &DensityPair,
    alpha: &[f64],
    w: &[f64],
    spec: &DivergenceSpec,
) -> Result<Estimate> {
    let abar = check_alpha_w(alpha, w)?;
    let kl = ConvexGenerator::kl();
    let gens = alpha
        .iter()
        .map(|a| skewed_generator(&kl, 1.0 - a, 1.0 - abar))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(ConvexGenerator, f64)> = gens.into_iter().zip(w.iter().copied()).collect();
    pair_integral(pair, spec, Proposal::Midpoint, |lu, lv| {
        if lv == f64::NEG_INFINITY {
            return if lu == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
        }
        let x = (lu - lv).exp();
        lv.exp() * terms.iter().map(|(g, wi)| wi * g.eval(x)).sum::<f64>()
    })
}

/// Lin's bound JSD ≤ TV·ln 2.
pub fn lin_bound(tv: f64) -> f64 {
    tv * LN_2
}

/// Reverse Pinsker: when dμ/dγ ≤ 1/β, TV(μ, γ) ≥ (1−β)/ln(1/β) · D(μ‖γ).
pub fn reverse_pinsker_lower(beta: f64, kl: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::input(format!("beta must lie in (0,1), got {beta}")));
    }
    Ok((1.0 - beta) / (1.0 / beta).ln() * kl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{AffineMap, RadialProfile};

    fn gauss(m: f64, s: f64) -> ComponentDensity {
        ComponentDensity::gaussian(vec![m], s).unwrap()
    }

    fn unif(lo: f64, hi: f64) -> ComponentDensity {
        ComponentDensity::pushforward(
            RadialProfile::UniformBall { radius: 1.0 },
            AffineMap::scaled_translation(0.5 * (hi - lo), &[0.5 * (lo + hi)]).unwrap(),
        )
        .unwrap()
    }

    fn q() -> DivergenceSpec {
        DivergenceSpec { closed_forms: false, ..Default::default() }
    }

    #[test]
    fn kl_closed_forms() {
        let p = DensityPair::components(gauss(0.0, 1.0), gauss(2.0, 1.0)).unwrap();
        assert!((kl(&p, &q()).unwrap().value - 2.0).abs() < 1e-8);
        let same = DensityPair::components(gauss(0.0, 1.0), gauss(0.0, 1.0)).unwrap();
        assert!(kl(&same, &q()).unwrap().value.abs() < 1e-12);
        for s in [0.5f64, 2.0, 3.0] {
            let p = DensityPair::components(gauss(0.0, 1.0), gauss(0.0, s)).unwrap();
            let want = s.ln() + 1.0 / (2.0 * s * s) - 0.5;
            assert!((kl(&p, &q()).unwrap().value - want).abs() < 1e-8, "sigma {s}");
        }
    }

    #[test]
    fn tv_closed_form_and_quadrature_agree() {
        for a in [0.25, 1.0, 2.0] {
            let p = DensityPair::components(gauss(-a, 1.0), gauss(a, 1.0)).unwrap();
            let cf = total_variation(&p, &DivergenceSpec::default()).unwrap();
            let quad = total_variation(&p, &q()).unwrap();
            assert_eq!(cf.method, Method::ClosedForm);
            assert!((cf.value - (std_normal_cdf(a) - std_normal_cdf(-a))).abs() < 1e-15);
            assert!((cf.value - quad.value).abs() < 1e-9, "a = {a}");
        }
        let p = DensityPair::components(gauss(-1.0, 1.0), gauss(1.0, 1.0)).unwrap();
        assert!((total_variation(&p, &q()).unwrap().value - 0.682_689_492_137_086).abs() < 1e-9);
    }

    #[test]
    fn disjoint_uniforms_are_exact() {
        let p = DensityPair::components(unif(0.0, 1.0), unif(2.0, 3.0)).unwrap();
        let s = q();
        for t in [0.2, 0.5, 0.8] {
            let st = skew_divergence(&p, t, &s).unwrap().value;
            assert!((st + t.ln()).abs() < 1e-10, "S_{t} = {st}");
            let chi = skew_chi2(&p, t, &s).unwrap().value;
            assert!((chi - 1.0 / (t * (1.0 - t))).abs() < 1e-10);
        }
        assert!((jsd(&p, &s).unwrap().value - LN_2).abs() < 1e-10);
        assert!((total_variation(&p, &s).unwrap().value - 1.0).abs() < 1e-10);
        assert!(kl(&p, &s).unwrap().value.is_infinite());
        assert!(skew_chi2(&p, 0.0, &s).unwrap().value.is_infinite());
    }

    #[test]
    fn chi2_endpoints() {
        for mu in [0.5f64, 1.0, 1.5] {
            let p = DensityPair::components(gauss(0.0, 1.0), gauss(mu, 1.0)).unwrap();
            let pearson = skew_chi2(&p, 0.0, &q()).unwrap().value;
            assert!((pearson - ((mu * mu).exp() - 1.0)).abs() < 1e-8);
            let neyman = skew_chi2(&p, 1.0, &q()).unwrap().value;
            let swapped = skew_chi2(&p.swapped(), 0.0, &q()).unwrap().value;
            assert!((neyman - swapped).abs() < 1e-8);
        }
    }

    #[test]
    fn skew_endpoints_and_range() {
        let p = DensityPair::components(gauss(0.0, 1.0), gauss(1.5, 0.7)).unwrap();
        assert_eq!(skew_divergence(&p, 1.0, &q()).unwrap().value, 0.0);
        let s0 = skew_divergence(&p, 0.0, &q()).unwrap().value;
        assert!((s0 - kl(&p, &q()).unwrap().value).abs() < 1e-14);
        for t in [0.1, 0.5, 0.9] {
            let s = skew_divergence(&p, t, &q()).unwrap().value;
            assert!(s >= 0.0 && s <= -t.ln());
        }
        assert!(skew_divergence(&p, 1.5, &q()).is_err());
        assert!(skew_chi2(&p, -0.1, &q()).is_err());
    }

    #[test]
    fn generalized_jsd_special_cases() {
        let p = DensityPair::components(gauss(0.0, 1.0), gauss(1.3, 1.0)).unwrap();
        let g = generalized_jsd(&p, &[0.0, 1.0], &[0.5, 0.5], &q()).unwrap().value;
        assert!((g - jsd(&p, &q()).unwrap().value).abs() < 1e-9);
        let flat = generalized_jsd(&p, &[0.3, 0.3, 0.3], &[0.2, 0.3, 0.5], &q()).unwrap().value;
        assert!(flat.abs() < 1e-12);
        assert!(generalized_jsd(&p, &[0.1], &[0.5], &q()).is_err());
        assert!(generalized_jsd(&p, &[0.1, 0.2], &[1.0, 0.0], &q()).is_err());
    }

    #[test]
    fn f_divergence_matches_named_divergences() {
        let p = DensityPair::components(gauss(0.0, 1.0), gauss(0.8, 1.2)).unwrap();
        let s = q();
        let kl_f = f_divergence(&p, &ConvexGenerator::kl(), &s).unwrap().value;
        assert!((kl_f - kl(&p, &s).unwrap().value).abs() < 1e-8);
        let tv_f = f_divergence(&p, &ConvexGenerator::total_variation(), &s).unwrap().value;
        assert!((tv_f - total_variation(&p, &s).unwrap().value).abs() < 1e-8);
        let pe = f_divergence(&p, &ConvexGenerator::pearson(), &s).unwrap().value;
        assert!((pe - skew_chi2(&p, 0.0, &s).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_backend_agrees_with_quadrature() {
        let p = DensityPair::components(gauss(0.0, 1.0), gauss(1.0, 1.0)).unwrap();
        let mc = DivergenceSpec::monte_carlo(McSpec::new(11, 100_000, 4));
        for (name, quad, est) in [
            ("kl", kl(&p, &q()).unwrap(), kl(&p, &mc).unwrap()),
            ("jsd", jsd(&p, &q()).unwrap(), jsd(&p, &mc).unwrap()),
            ("chi2", skew_chi2(&p, 0.5, &q()).unwrap(), skew_chi2(&p, 0.5, &mc).unwrap()),
            ("skew", skew_divergence(&p, 0.3, &q()).unwrap(), skew_divergence(&p, 0.3, &mc).unwrap()),
        ] {
            assert!((quad.value - est.value).abs() <= 4.0 * est.error, "{name}: {quad:?} vs {est:?}");
        }
    }
}
