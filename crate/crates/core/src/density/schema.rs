//! JSON model files.
//!
//! ```json
//! {"dim": 1, "weights": [0.5, 0.5],
//!  "components": [{"type": "gaussian", "mean": [-1.0], "sigma": 1.0},
//!                 {"type": "pushforward", "base": "uniform_ball", "A": [[2.0]], "b": [3.0]}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{AffineMap, ComponentDensity, MixtureModel, RadialProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseName {
    Gaussian,
    UniformBall,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Gaussian {
        mean: Vec<f64>,
        sigma: f64,
    },
    Pushforward {
        base: BaseName,
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        /// σ, radius or exponential scale of the base; defaults to 1.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base_scale: Option<f64>,
    },
}

impl ComponentSpec {
    pub fn build(&self) -> Result<ComponentDensity> {
        match self {
            ComponentSpec::Gaussian { mean, sigma } => ComponentDensity::gaussian(mean.clone(), *sigma),
            ComponentSpec::Pushforward { base, a, b, base_scale } => {
                let s = base_scale.unwrap_or(1.0);
                let profile = match base {
                    BaseName::Gaussian => RadialProfile::Gaussian { sigma: s },
                    BaseName::UniformBall => RadialProfile::UniformBall { radius: s },
                    BaseName::Exponential => RadialProfile::Exponential { scale: s },
                };
                ComponentDensity::pushforward(profile, AffineMap::from_rows(a, b)?)
            }
        }
    }
}

impl MixtureSpec {
    pub fn build(&self) -> Result<MixtureModel> {
        if self.dim == 0 {
            return Err(Error::input("dim must be >= 1"));
        }
        let comps = self.components.iter().map(|c| c.build()).collect::<Result<Vec<_>>>()?;
        if let Some(c) = comps.iter().find(|c| c.dim() != self.dim) {
            return Err(Error::Dimension { expected: self.dim, got: c.dim() });
        }
        MixtureModel::new(self.weights.clone(), comps)
    }
}

impl MixtureModel {
    pub fn from_json(text: &str) -> Result<MixtureModel> {
        let spec: MixtureSpec =
            serde_json::from_str(text).map_err(|e| Error::input(format!("model JSON: {e}")))?;
        spec.build()
    }

    /// The model as a [`MixtureSpec`]; custom profiles have no JSON form.
    pub fn to_spec(&self) -> Result<MixtureSpec> {
        let components = self
            .components()
            .iter()
            .map(|c| match c {
                ComponentDensity::Gaussian(g) => {
                    Ok(ComponentSpec::Gaussian { mean: g.mean().to_vec(), sigma: g.sigma() })
                }
                ComponentDensity::Pushforward { profile, map } => {
                    let (base, s) = match profile {
                        RadialProfile::Gaussian { sigma } => (BaseName::Gaussian, *sigma),
                        RadialProfile::UniformBall { radius } => (BaseName::UniformBall, *radius),
                        RadialProfile::Exponential { scale } => (BaseName::Exponential, *scale),
                        RadialProfile::Custom(_) => {
                            return Err(Error::unsupported("custom profiles cannot be serialized"))
                        }
                    };
                    let m = map.matrix();
                    let a = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
                    Ok(ComponentSpec::Pushforward {
                        base,
                        a,
                        b: map.offset().to_vec(),
                        base_scale: if s == 1.0 { None } else { Some(s) },
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MixtureSpec { dim: self.dim(), weights: self.weights().to_vec(), components })
    }
}
