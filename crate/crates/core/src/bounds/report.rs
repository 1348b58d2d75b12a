use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperDeficit,
    LowerDeficit,
    ConditionalEntropyUpper,
    Tail,
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Precondition {
    pub label: String,
    pub met: bool,
}

/// A bound value with its preconditions and the inputs that produced it.
///
/// `binding` is false as soon as one precondition is unmet; such a value is
/// reported but does not certify anything. `clamped` records that the raw
/// value was moved to a trivial limit (e.g. a negative lower bound raised to 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub binding: bool,
    pub clamped: bool,
    pub preconditions: Vec<Precondition>,
    pub inputs: BTreeMap<String, f64>,
    pub details: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(kind: BoundKind, value: f64) -> Self {
        BoundReport {
            kind,
            value,
            binding: true,
            clamped: false,
            preconditions: Vec::new(),
            inputs: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn precondition(mut self, label: &str, met: bool) -> Self {
        self.preconditions.push(Precondition { label: label.to_string(), met });
        self.binding = self.binding && met;
        self
    }

    pub fn input(mut self, key: &str, v: f64) -> Self {
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.to_string(), v);
        self
    }

    /// Raises the value to `floor` if it lies below, recording the clamp.
    pub fn clamp_below(mut self, floor: f64) -> Self {
        if self.value < floor {
            self.details.insert("unclamped_value".into(), self.value);
            self.value = floor;
            self.clamped = true;
        }
        self
    }

    /// Lowers the value to `ceiling` if it lies above, recording the clamp.
    pub fn clamp_above(mut self, ceiling: f64) -> Self {
        if self.value > ceiling {
            self.details.insert("unclamped_value".into(), self.value);
            self.value = ceiling;
            self.clamped = true;
        }
        self
    }

    pub fn preconditions_met(&self) -> bool {
        self.preconditions.iter().all(|p| p.met)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.details.get(key).or_else(|| self.inputs.get(key)).copied()
    }
}
