//! Tail-integral bounds for W ~ N(0, σ²I_d).

use std::f64::consts::{E, PI};

use crate::density::gaussian_tail;
use crate::error::{Error, Result};

fn check(sigma: f64, lambda: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::input(format!("sigma must be positive, got {sigma}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::input(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(())
}

fn need_d2(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::input(format!("this form needs d >= 2, got {d}; use the 1-d variant")));
    }
    Ok(())
}

/// Bound on −∫_{|w|>λ} φ_σ ln φ_σ for d ≥ 2:
/// (d/2 ln(2πe²σ²) + λ²/σ²)·P(|W| > λ).
pub fn gaussian_entropy_tail(d: usize, sigma: f64, lambda: f64) -> Result<f64> {
    need_d2(d)?;
    check(sigma, lambda)?;
    let p = gaussian_tail(d, lambda / sigma)?;
    Ok((0.5 * d as f64 * (2.0 * PI * E * E * sigma * sigma).ln() + (lambda / sigma).powi(2)) * p)
}

/// Bound on −∫_{|w|>λ} φ_σ ln φ_σ for d = 1:
/// (λ²/σ² + 2 + ln(√(2π)σ))·P(|W| > λ).
pub fn gaussian_entropy_tail_1d(sigma: f64, lambda: f64) -> Result<f64> {
    check(sigma, lambda)?;
    if lambda == 0.0 {
        return Err(Error::input("lambda must be positive"));
    }
    let p = gaussian_tail(1, lambda / sigma)?;
    Ok(((lambda / sigma).powi(2) + 2.0 + ((2.0 * PI).sqrt() * sigma).ln()) * p)
}

/// Bound on ∫_{|w|>λ} |w| φ_σ for d ≥ 2: (λ + dσ)·P(|W| > λ).
pub fn gaussian_norm_tail(d: usize, sigma: f64, lambda: f64) -> Result<f64> {
    need_d2(d)?;
    check(sigma, lambda)?;
    Ok((lambda + d as f64 * sigma) * gaussian_tail(d, lambda / sigma)?)
}

/// Bound on ∫_{|w|>λ} |w| φ_σ for d = 1: (λ + σ²/λ)·P(|W| > λ).
pub fn gaussian_norm_tail_1d(sigma: f64, lambda: f64) -> Result<f64> {
    check(sigma, lambda)?;
    if lambda == 0.0 {
        return Err(Error::input("lambda must be positive"));
    }
    Ok((lambda + sigma * sigma / lambda) * gaussian_tail(1, lambda / sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::RadialProfile;
    use crate::numerics::QuadratureSpec;

    fn entropy_oracle(d: usize, sigma: f64, lambda: f64) -> f64 {
        let p = RadialProfile::Gaussian { sigma };
        p.radial_integral(d, lambda, |_, lp| -lp * lp.exp(), &QuadratureSpec::default()).unwrap().value
    }

    fn norm_oracle(d: usize, sigma: f64, lambda: f64) -> f64 {
        let p = RadialProfile::Gaussian { sigma };
        p.radial_integral(d, lambda, |r, lp| r * lp.exp(), &QuadratureSpec::default()).unwrap().value
    }

    #[test]
    fn bounds_dominate_oracles() {
        for sigma in [0.5, 1.0, 2.0] {
            for lambda in [0.5, 1.0, 2.0, 4.0] {
                let e1 = gaussian_entropy_tail_1d(sigma, lambda).unwrap();
                assert!(entropy_oracle(1, sigma, lambda) <= e1 + 1e-12, "σ={sigma} λ={lambda}");
                let n1 = gaussian_norm_tail_1d(sigma, lambda).unwrap();
                assert!(norm_oracle(1, sigma, lambda) <= n1 + 1e-12);
                let e2 = gaussian_entropy_tail(2, sigma, lambda).unwrap();
                assert!(entropy_oracle(2, sigma, lambda) <= e2 + 1e-12, "σ={sigma} λ={lambda}");
                let n2 = gaussian_norm_tail(2, sigma, lambda).unwrap();
                assert!(norm_oracle(2, sigma, lambda) <= n2 + 1e-12);
            }
        }
    }

    #[test]
    fn spot_checks() {
        assert!(entropy_oracle(2, 1.0, 2.0) <= gaussian_entropy_tail(2, 1.0, 2.0).unwrap());
        assert!(entropy_oracle(1, 1.0, 3.0) <= gaussian_entropy_tail_1d(1.0, 3.0).unwrap());
        assert!(gaussian_entropy_tail(3, 1.0, 60.0).unwrap() < 1e-300);
        assert!(gaussian_entropy_tail_1d(1.0, 60.0).unwrap() < 1e-300);
        // λ = 0: E|W| ≤ dσ.
        for d in 2..=4 {
            let b = gaussian_norm_tail(d, 1.0, 0.0).unwrap();
            assert!((b - d as f64).abs() < 1e-15);
            assert!(norm_oracle(d, 1.0, 0.0) <= b);
        }
        assert!(gaussian_entropy_tail(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn norm_bound_is_homogeneous() {
        for (sigma, lambda) in [(0.5, 1.0), (2.0, 3.0), (1.7, 0.4)] {
            let a = gaussian_norm_tail(2, sigma, lambda).unwrap();
            let b = sigma * gaussian_norm_tail(2, 1.0, lambda / sigma).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.max(1.0));
            let a = gaussian_norm_tail_1d(sigma, lambda).unwrap();
            let b = sigma * gaussian_norm_tail_1d(1.0, lambda / sigma).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.max(1.0));
        }
    }
}
