//! Discrete-input additive-noise channels Z = X + W: hypothesis testing,
//! Fano's inequality and constellation gap bounds.

use serde::Serialize;

use crate::bounds::{mixture_tv_spread, BoundKind, BoundReport};
use crate::density::{gaussian_tail, ComponentDensity, MixtureModel, SeparationCertificate};
use crate::divergence::DivergenceSpec;
use crate::error::{Error, Result};
use crate::numerics::special::{binary_entropy, unit_ball_volume};
use crate::numerics::Estimate;
use crate::oracle::{conditional_entropy_x_given_z, OracleSpec};

/// Constellation points x_i with prior p and a noise template W; component i
/// is the law of x_i + W.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    points: Vec<Vec<f64>>,
    prior: Vec<f64>,
    noise: ComponentDensity,
}

impl ChannelSpec {
    pub fn new(points: Vec<Vec<f64>>, prior: Vec<f64>, noise: ComponentDensity) -> Result<Self> {
        if points.len() != prior.len() {
            return Err(Error::input("need one prior weight per point"));
        }
        if points.is_empty() {
            return Err(Error::input("constellation is empty"));
        }
        for p in &points {
            if p.len() != noise.dim() {
                return Err(Error::Dimension { expected: noise.dim(), got: p.len() });
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::input(format!("points {j} and {i} coincide")));
                }
            }
        }
        let spec = ChannelSpec { points, prior, noise };
        spec.model()?;
        Ok(spec)
    }

    /// N points {2λ, 4λ, …, 2Nλ} with uniform prior and N(0, σ²) noise.
    pub fn uniform_grid(n: usize, lambda: f64, sigma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::input("need at least one point"));
        }
        if !(lambda > 0.0) {
            return Err(Error::input("lambda must be positive"));
        }
        let points = (1..=n).map(|k| vec![2.0 * lambda * k as f64]).collect();
        ChannelSpec::new(points, vec![1.0 / n as f64; n], ComponentDensity::gaussian(vec![0.0], sigma)?)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn noise(&self) -> &ComponentDensity {
        &self.noise
    }

    /// Half the smallest distance between two points.
    pub fn lambda(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in 0..i {
                let d2: f64 = self.points[i].iter().zip(&self.points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.min(d2.sqrt());
            }
        }
        0.5 * best
    }

    /// The output density Σ p_i law(x_i + W).
    pub fn model(&self) -> Result<MixtureModel> {
        let comps = self.points.iter().map(|x| self.noise.translated(x)).collect::<Result<Vec<_>>>()?;
        MixtureModel::new(self.prior.clone(), comps)
    }
}

/// H(e) + P(e) ln(#X − 1).
pub fn fano_rhs(p_error: f64, support_size: usize) -> Result<f64> {
    if support_size < 2 {
        return Err(Error::input(format!("support size must be >= 2, got {support_size}")));
    }
    if !(0.0..=1.0).contains(&p_error) {
        return Err(Error::input(format!("error probability must lie in [0,1], got {p_error}")));
    }
    let tail = if p_error > 0.0 { p_error * ((support_size - 1) as f64).ln() } else { 0.0 };
    Ok(binary_entropy(p_error) + tail)
}

/// Bayes error of the nearest-point rule on N evenly spaced points at
/// spacing 2λ with N(0, σ²) noise: P(|Z| ≥ λ/σ)(1 − 1/N).
pub fn grid_bayes_error(n: usize, lambda: f64, sigma: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::input("need N >= 2"));
    }
    if !(lambda > 0.0 && sigma > 0.0) {
        return Err(Error::input("lambda and sigma must be positive"));
    }
    Ok(gaussian_tail(1, lambda / sigma)? * (1.0 - 1.0 / n as f64))
}

/// Bayes error on the unit-spaced grid {1, …, N}: P(|Z| ≥ 1/(2σ))(1 − 1/N).
pub fn uniform_grid_bayes_error(n: usize, sigma: f64) -> Result<f64> {
    grid_bayes_error(n, 0.5, sigma)
}

/// (1 − 𝒯_f) H(p): no estimator of X from Z has a smaller Fano right-hand side.
pub fn tv_fano_estimator_bound(model: &MixtureModel, spec: &DivergenceSpec) -> Result<BoundReport> {
    let hp = model.weight_entropy();
    if model.len() < 2 {
        return Ok(BoundReport::new(BoundKind::Gap, 0.0).precondition("n >= 2", false));
    }
    let (t_f, _, _) = mixture_tv_spread(model, spec)?;
    Ok(BoundReport::new(BoundKind::Gap, (1.0 - t_f) * hp)
        .precondition("n >= 2", true)
        .input("n", model.len() as f64)
        .detail("t_f", t_f)
        .detail("entropy_p", hp))
}

/// ln[3 e^{u²+3}(1 + √(9π/2)/u)], evaluated without overflow.
pub fn agwn_constant(u: f64) -> f64 {
    3f64.ln() + u * u + 3.0 + (1.0 + (4.5 * std::f64::consts::PI).sqrt() / u).ln()
}

/// H(X | X + W) ≤ ln[3e^{(λ/σ)²+3}(1 + √(9π/2) σ/λ)]·P(|𝒵| > λ/σ) for
/// points 2λ apart on the line.
pub fn agwn_1d_condentropy_bound(lambda: f64, sigma: f64) -> Result<BoundReport> {
    if !(lambda > 0.0 && sigma > 0.0) {
        return Err(Error::input("lambda and sigma must be positive"));
    }
    let u = lambda / sigma;
    let c = agwn_constant(u);
    let p = gaussian_tail(1, u)?;
    Ok(BoundReport::new(BoundKind::ConditionalEntropyUpper, c * p)
        .input("lambda", lambda)
        .input("sigma", sigma)
        .detail("constant", c)
        .detail("tail", p))
}

/// J_d for d ≥ 2 and J_1 for d = 1, as displayed (see the module tests for
/// the t → ∞ limit of J_1).
pub fn gaussian_j(lambda: f64, sigma: f64, tau: f64, m: usize, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::input("dimension must be >= 1"));
    }
    if !(lambda > 0.0 && sigma > 0.0 && tau >= 1.0) || m == 0 {
        return Err(Error::input("need lambda, sigma > 0, tau >= 1, M >= 1"));
    }
    let (u, mf, df) = (lambda / sigma, m as f64, d as f64);
    if d == 1 {
        return Ok(u * u + mf + 2.0
            + tau.ln()
            + mf.ln()
            + (1.0 + tau + tau * tau + tau * tau * sigma / (lambda * lambda)).ln()
            + (1.0 + (4.5 * std::f64::consts::PI).sqrt() / u).ln());
    }
    let spread = 1.0 + tau + tau * tau + tau * tau * df * sigma / lambda;
    let packing = 1.0 + (3.0 * (2.0 * std::f64::consts::PI).sqrt() / u).powi(d as i32) / unit_ball_volume(d);
    Ok(u * u + mf + df * (tau.ln() + 1.0) + mf.ln() + df * spread.ln() + packing.ln())
}

/// H(X|Y) ≤ (M−1) P(|W| ≤ τλ) + J_d P(|W| > λ) for W ~ N(0, σ²I_d).
pub fn gaussian_hx_given_y_bound(cert: &SeparationCertificate, sigma: f64, d: usize) -> Result<BoundReport> {
    let (lambda, tau, m) = (cert.lambda(), cert.tau(), cert.m());
    let j = gaussian_j(lambda, sigma, tau, m, d)?;
    let inside = 1.0 - gaussian_tail(d, tau * lambda / sigma)?;
    let outside = gaussian_tail(d, lambda / sigma)?;
    let value = (m as f64 - 1.0) * inside + j * outside;
    Ok(BoundReport::new(BoundKind::ConditionalEntropyUpper, value)
        .precondition("separation certificate verified", cert.is_verified())
        .input("lambda", lambda)
        .input("tau", tau)
        .input("M", m as f64)
        .input("sigma", sigma)
        .input("d", d as f64)
        .detail("j", j)
        .detail("p_inside_tau_lambda", inside)
        .detail("p_outside_lambda", outside))
}

/// Constellation gap bounds for N evenly spaced points (spacing 2λ) under
/// N(0, σ²) noise, in nats. The value is the gap p_o H(X) + h(p_o), an upper
/// bound on H(X|Z).
pub fn ozarow_wyner_bound(n: usize, lambda: f64, sigma: f64) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::input("need N >= 2"));
    }
    if !(lambda > 0.0 && sigma > 0.0) {
        return Err(Error::input("lambda and sigma must be positive"));
    }
    let nf = n as f64;
    let u = lambda / sigma;
    let k = 0.5 * u * u * (1.0 - 1.0 / (nf * nf));
    if !(k > 0.0) {
        return Err(Error::input(format!("K must be positive, got {k}")));
    }
    let p_o = (-k).exp() / (std::f64::consts::PI * k).sqrt();
    let hx = nf.ln();
    let snr = u * u * (nf * nf - 1.0) / 3.0;
    let c = 0.5 * snr.ln_1p();
    let alpha2 = nf * nf / (1.0 + snr);
    let second = c - 0.5 * (std::f64::consts::PI * std::f64::consts::E / 6.0).ln() - 0.5 * ((1.0 + alpha2) / alpha2).ln();
    let valid = p_o <= 1.0;
    let gap = if valid { p_o * hx + binary_entropy(p_o) } else { hx };
    let mut r = BoundReport::new(BoundKind::Gap, gap.min(hx))
        .precondition("p_o <= 1", valid)
        .input("N", nf)
        .input("lambda", lambda)
        .input("sigma", sigma)
        .detail("k", k)
        .detail("p_o", p_o)
        .detail("entropy_x", hx)
        .detail("capacity_c", c)
        .detail("alpha", alpha2.sqrt())
        .detail("second_form_mi_lower", second)
        .detail("second_form_gap", (hx - second).max(0.0));
    if gap > hx {
        r = r.detail("unclamped_value", gap);
        r.clamped = true;
    }
    Ok(r)
}

/// One row of the channel comparison table. All bounds are upper bounds on
/// H(X|Z) in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRow {
    pub n: usize,
    pub lambda: f64,
    pub sigma: f64,
    pub oracle: Option<Estimate>,
    pub paper_bound: f64,
    pub fano_bound: f64,
    pub ozwy_bound: f64,
    pub bayes_error: f64,
}

/// Compares the bounds on H(X|Z) for the uniform grid channel. The oracle is
/// only evaluated when `with_oracle` is set.
pub fn channel_comparison(n: usize, lambda: f64, sigma: f64, with_oracle: bool, spec: &OracleSpec) -> Result<ChannelRow> {
    let oracle = if with_oracle {
        let model = ChannelSpec::uniform_grid(n, lambda, sigma)?.model()?;
        Some(conditional_entropy_x_given_z(&model, spec)?)
    } else {
        None
    };
    let pe = grid_bayes_error(n, lambda, sigma)?;
    Ok(ChannelRow {
        n,
        lambda,
        sigma,
        oracle,
        paper_bound: agwn_1d_condentropy_bound(lambda, sigma)?.value,
        fano_bound: fano_rhs(pe, n)?,
        ozwy_bound: ozarow_wyner_bound(n, lambda, sigma)?.value,
        bayes_error: pe,
    })
}

/// Smallest N in [2, limit] from which Fano's right-hand side at the Bayes
/// error stays above the paper bound through `limit`.
pub fn fano_crossover(lambda: f64, sigma: f64, limit: usize) -> Result<Option<usize>> {
    let paper = agwn_1d_condentropy_bound(lambda, sigma)?.value;
    let mut first = None;
    for n in 2..=limit {
        let fano = fano_rhs(grid_bayes_error(n, lambda, sigma)?, n)?;
        if fano > paper {
            first.get_or_insert(n);
        } else {
            first = None;
        }
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::certify;
    use std::f64::consts::LN_2;

    #[test]
    fn fano_examples() {
        assert_eq!(fano_rhs(0.0, 10).unwrap(), 0.0);
        assert!((fano_rhs(0.5, 2).unwrap() - LN_2).abs() < 1e-15);
        let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        assert!((fano_rhs(0.1, 1000).unwrap() - (h + 0.1 * 999f64.ln())).abs() < 1e-14);
        assert!(fano_rhs(0.1, 1).is_err());
    }

    #[test]
    fn bayes_error_examples() {
        let want = 0.5 * 0.617_075_077_451_974;
        assert!((uniform_grid_bayes_error(2, 1.0).unwrap() - want).abs() < 1e-13);
        assert!(uniform_grid_bayes_error(5, 1e-3).unwrap() < 1e-300);
        let big = uniform_grid_bayes_error(1_000_000, 0.7).unwrap();
        assert!((big - gaussian_tail(1, 0.5 / 0.7).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn bayes_error_matches_quadrature() {
        // Nearest-point rule on {1..N}: integrate P(correct | x) directly.
        let sigma = 0.6;
        let n = 5;
        let spec = ChannelSpec::new(
            (1..=n).map(|k| vec![k as f64]).collect(),
            vec![0.2; 5],
            ComponentDensity::gaussian(vec![0.0], sigma).unwrap(),
        )
        .unwrap();
        let q = crate::numerics::QuadratureSpec::default();
        let mut correct = 0.0;
        for (k, comp) in spec.model().unwrap().components().iter().enumerate() {
            let x = (k + 1) as f64;
            let lo = if k == 0 { f64::NEG_INFINITY } else { x - 0.5 };
            let hi = if k + 1 == n { f64::INFINITY } else { x + 0.5 };
            correct += 0.2 * crate::numerics::integrate_1d(|z| comp.log_pdf(&[z]).unwrap().exp(), lo, hi, &q).unwrap().value;
        }
        assert!((1.0 - correct - uniform_grid_bayes_error(n, sigma).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn tv_fano_examples() {
        let s = DivergenceSpec::default();
        let same = MixtureModel::gaussian_translates(vec![0.5, 0.5], &[vec![0.0], vec![0.0]], 1.0).unwrap();
        assert!((tv_fano_estimator_bound(&same, &s).unwrap().value - LN_2).abs() < 1e-12);
        let far = MixtureModel::gaussian_translates(vec![0.5, 0.5], &[vec![0.0], vec![20.0]], 1.0).unwrap();
        assert!(tv_fano_estimator_bound(&far, &s).unwrap().value < 1e-12);
        let pair = MixtureModel::gaussian_translates(vec![0.5, 0.5], &[vec![-1.0], vec![1.0]], 1.0).unwrap();
        let want = (1.0 - 0.682_689_492_137_085_9) * LN_2;
        assert!((tv_fano_estimator_bound(&pair, &s).unwrap().value - want).abs() < 1e-9);
    }

    #[test]
    fn agwn_examples() {
        let b = agwn_1d_condentropy_bound(3.0, 1.0).unwrap();
        let model = ChannelSpec::uniform_grid(2, 3.0, 1.0).unwrap().model().unwrap();
        let oracle = conditional_entropy_x_given_z(&model, &OracleSpec::default()).unwrap();
        assert!(oracle.value <= b.value);
        let mut prev = f64::INFINITY;
        for u in 4..=10 {
            let v = agwn_1d_condentropy_bound(u as f64, 1.0).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-18);
        // σ = 0.3, λ = ½.
        let v = agwn_1d_condentropy_bound(0.5, 0.3).unwrap().value;
        assert!((v - 0.7700).abs() < 5e-3, "{v}");
    }

    #[test]
    fn j1_limit_recovers_agwn() {
        let (lambda, sigma) = (1.2, 0.8);
        let target = agwn_constant(lambda / sigma);
        let mut prev_gap = f64::INFINITY;
        for t in [1.0, 10.0, 100.0, 1e4] {
            let gap = gaussian_j(t * lambda, t * sigma, 1.0, 1, 1).unwrap() - target;
            assert!(gap > 0.0 && gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-4);
    }

    #[test]
    fn hx_given_y_bounds_dominate_oracle() {
        let model = ChannelSpec::uniform_grid(3, 1.0, 1.0).unwrap().model().unwrap();
        let cert = certify(&model, SeparationCertificate::new(1.0, 1, 1.0).unwrap()).unwrap();
        let b = gaussian_hx_given_y_bound(&cert, 1.0, 1).unwrap();
        assert!(b.binding);
        assert_eq!(b.value, b.get("j").unwrap() * b.get("p_outside_lambda").unwrap());
        let oracle = conditional_entropy_x_given_z(&model, &OracleSpec::default()).unwrap();
        assert!(oracle.value <= b.value);

        let pts: Vec<Vec<f64>> = [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0), (6.0, 6.0)].iter().map(|&(a, b)| vec![a, b]).collect();
        let channel = ChannelSpec::new(pts, vec![0.25; 4], ComponentDensity::gaussian(vec![0.0, 0.0], 1.0).unwrap()).unwrap();
        let model = channel.model().unwrap();
        let cert = certify(&model, SeparationCertificate::new(3.0, 1, 1.0).unwrap()).unwrap();
        let b = gaussian_hx_given_y_bound(&cert, 1.0, 2).unwrap();
        let oracle = conditional_entropy_x_given_z(&model, &OracleSpec::default()).unwrap();
        assert!(b.binding && oracle.value <= b.value, "{} vs {}", oracle.value, b.value);
    }

    #[test]
    fn ozwy_examples() {
        let r = ozarow_wyner_bound(8, 1.0 / std::f64::consts::SQRT_2 / (1.0 - 1.0 / 64.0f64).sqrt(), 1.0).unwrap();
        assert!((r.get("k").unwrap() - 0.25).abs() < 1e-12);
        let r = ozarow_wyner_bound(4, (2.0f64 / (1.0 - 1.0 / 16.0)).sqrt(), 1.0).unwrap();
        assert!((r.get("p_o").unwrap() - (-1.0f64).exp() / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        let far = ozarow_wyner_bound(8, 12.0, 1.0).unwrap();
        assert!(far.value < 1e-20);
        // At N = 8 the p_o form is the smaller gap at λ = 3; the paper bound
        // only overtakes it near λ ≈ 9.3.
        let paper = agwn_1d_condentropy_bound(3.0, 1.0).unwrap().value;
        let ozwy = ozarow_wyner_bound(8, 3.0, 1.0).unwrap().value;
        assert!((paper - 0.037_556_901_834_986).abs() < 1e-12);
        assert!((ozwy - 0.028_191_494_734_407).abs() < 1e-12);
        let paper = agwn_1d_condentropy_bound(10.0, 1.0).unwrap().value;
        assert!(paper < ozarow_wyner_bound(8, 10.0, 1.0).unwrap().value);
        let weak = ozarow_wyner_bound(8, 0.1, 1.0).unwrap();
        assert!(!weak.binding);
        // Scale invariance in (λ, σ).
        let a = ozarow_wyner_bound(16, 2.0, 1.0).unwrap().value;
        let b = ozarow_wyner_bound(16, 6.0, 3.0).unwrap().value;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn channel_row_at_small_noise() {
        let row = channel_comparison(1000, 0.5, 0.3, false, &OracleSpec::default()).unwrap();
        assert!((row.fano_bound - 0.975).abs() < 2e-3, "{}", row.fano_bound);
        assert!(row.paper_bound < row.fano_bound);
        let n0 = fano_crossover(0.5, 0.3, 2000).unwrap().unwrap();
        assert!(n0 > 2 && n0 <= 1000);
    }
}
