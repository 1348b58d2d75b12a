//! Heat dissipated when resetting a bit held in a Gaussian bistable well
//! f_p = p N(a, σ²) + (1 − p) N(−a, σ²).

use serde::{Deserialize, Serialize};

use crate::density::{gaussian_tail, MixtureModel};
use crate::error::{Error, Result};
use crate::numerics::special::binary_entropy;
use crate::numerics::Estimate;
use crate::oracle::{mutual_information, OracleSpec};

use super::channel::agwn_constant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergeticsSpec {
    /// Well half-separation.
    pub a: f64,
    pub sigma: f64,
    /// Probability of bit 1 before the reset.
    pub p0: f64,
    /// Probability of bit 1 after the reset.
    pub p1: f64,
    #[serde(default = "unit", rename = "kBT")]
    pub kbt: f64,
}

fn unit() -> f64 {
    1.0
}

impl EnergeticsSpec {
    pub fn new(a: f64, sigma: f64, p0: f64, p1: f64) -> Result<Self> {
        let s = EnergeticsSpec { a, sigma, p0, p1, kbt: 1.0 };
        s.validate()?;
        Ok(s)
    }

    /// Random bit erased to a deterministic one: p0 = ½, p1 = 0.
    pub fn erasure(a: f64, sigma: f64) -> Result<Self> {
        EnergeticsSpec::new(a, sigma, 0.5, 0.0)
    }

    pub fn with_kbt(mut self, kbt: f64) -> Result<Self> {
        self.kbt = kbt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.sigma > 0.0) {
            return Err(Error::input("a and sigma must be positive"));
        }
        if !(0.0..=1.0).contains(&self.p0) || !(0.0..=1.0).contains(&self.p1) {
            return Err(Error::input("p0 and p1 must lie in [0,1]"));
        }
        if !(self.kbt > 0.0 && self.kbt.is_finite()) {
            return Err(Error::input("kBT must be positive"));
        }
        Ok(())
    }

    /// The well density f_p.
    pub fn well(&self, p: f64) -> Result<Option<MixtureModel>> {
        if p <= 0.0 || p >= 1.0 {
            return Ok(None);
        }
        MixtureModel::gaussian_translates(vec![p, 1.0 - p], &[vec![self.a], vec![-self.a]], self.sigma).map(Some)
    }
}

/// The band E Q₀ ∈ [central + C_L P, central + C_U P], P = P(|𝒵| > a/σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauerBand {
    /// kBT (H(p0) − H(p1)).
    pub central: f64,
    pub lower: f64,
    pub upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub tail: f64,
}

impl LandauerBand {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lower - slack && x <= self.upper + slack
    }
}

/// C_L = −kBT(L − H(p1)), C_U = kBT(L − H(p0)) with
/// L = ln[3e^{(a/σ)²+3}(1 + √(9π/2) σ/a)]. For p0 = ½ the upper constant is
/// kBT ln[(3/2)e^{(a/σ)²+3}(…)].
pub fn landauer_bounds(spec: &EnergeticsSpec) -> Result<LandauerBand> {
    spec.validate()?;
    let u = spec.a / spec.sigma;
    let l = agwn_constant(u);
    let (h0, h1) = (binary_entropy(spec.p0), binary_entropy(spec.p1));
    let c_lower = -spec.kbt * (l - h1);
    let c_upper = spec.kbt * (l - h0);
    let tail = gaussian_tail(1, u)?;
    let central = spec.kbt * (h0 - h1);
    Ok(LandauerBand {
        central,
        lower: central + c_lower * tail,
        upper: central + c_upper * tail,
        c_lower,
        c_upper,
        tail,
    })
}

/// kBT (I(Z_{p0}; X_{p0}) − I(Z_{p1}; X_{p1})), the quasistatic heat. A
/// deterministic bit carries no information.
pub fn landauer_heat_oracle(spec: &EnergeticsSpec, oracle: &OracleSpec) -> Result<Estimate> {
    spec.validate()?;
    let mi = |p: f64| -> Result<Estimate> {
        match spec.well(p)? {
            Some(m) => mutual_information(&m, oracle),
            None => Ok(Estimate::exact(0.0)),
        }
    };
    let (i0, i1) = (mi(spec.p0)?, mi(spec.p1)?);
    Ok(i0.combine(1.0, i1, -1.0).scale(spec.kbt))
}
