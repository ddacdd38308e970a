use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::MapError;
use crate::circuit::DurationModel;

const BUNDLED: &str = include_str!("../../hardware/two_cluster.toml");

/// Data capacity of a QPU: fixed, or `"auto"` for `ceil(N / k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Capacity {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpuSpec {
    pub id: u32,
    pub data_capacity: Capacity,
    pub epr_slots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub qpu_a: u32,
    pub qpu_b: u32,
    pub channels: usize,
}

/// Target architecture: all-to-all QPUs joined by EPR-generating links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    pub qpus: Vec<QpuSpec>,
    #[serde(default)]
    pub links: Vec<LinkSpec>,
    #[serde(default)]
    pub durations: DurationModel,
}

impl HardwareSpec {
    pub fn from_toml(text: &str) -> Result<Self, MapError> {
        let spec: Self = toml::from_str(text).map_err(|e| MapError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Two clusters of `ceil(N/2)` data slots plus two EPR slots each.
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED).expect("bundled hardware spec is valid")
    }

    pub fn bundled_toml() -> &'static str {
        BUNDLED
    }

    pub fn validate(&self) -> Result<(), MapError> {
        let err = |m: String| Err(MapError::Spec(m));
        if self.qpus.is_empty() {
            return err("no QPUs".into());
        }
        for (i, q) in self.qpus.iter().enumerate() {
            if self.qpus[..i].iter().any(|p| p.id == q.id) {
                return err(format!("duplicate QPU id {}", q.id));
            }
            if q.data_capacity == Capacity::Fixed(0) {
                return err(format!("QPU {} has zero data capacity", q.id));
            }
        }
        for l in &self.links {
            let a = self.index_of(l.qpu_a);
            let b = self.index_of(l.qpu_b);
            let (Some(a), Some(b)) = (a, b) else {
                return err(format!("link {}-{} names an unknown QPU", l.qpu_a, l.qpu_b));
            };
            if a == b {
                return err(format!("link {}-{} is a self-loop", l.qpu_a, l.qpu_b));
            }
            if l.channels == 0 {
                return err(format!("link {}-{} has no channels", l.qpu_a, l.qpu_b));
            }
            for q in [a, b] {
                if self.qpus[q].epr_slots == 0 {
                    return err(format!("linked QPU {} has no EPR slots", self.qpus[q].id));
                }
            }
        }
        if self.qpus.len() > 1 && self.links.is_empty() {
            return err("several QPUs but no links".into());
        }
        if let Some(f) = self.durations.invalid_field() {
            return err(format!("duration {f} must be positive"));
        }
        Ok(())
    }

    fn index_of(&self, id: u32) -> Option<usize> {
        self.qpus.iter().position(|q| q.id == id)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Concrete capacities and slot numbering for an `n`-qubit circuit.
    pub fn resolve(&self, n: usize) -> Result<Hardware, MapError> {
        self.validate()?;
        let k = self.qpus.len();
        let auto = n.div_ceil(k).max(1);
        let data_capacity: Vec<usize> = self
            .qpus
            .iter()
            .map(|q| match q.data_capacity {
                Capacity::Fixed(c) => c,
                Capacity::Auto(_) => auto,
            })
            .collect();
        let capacity: usize = data_capacity.iter().sum();
        if n > capacity {
            return Err(MapError::TooWide { n, capacity });
        }
        let mut slot_base = Vec::with_capacity(k);
        let mut qpu_of_slot = Vec::new();
        for (j, q) in self.qpus.iter().enumerate() {
            slot_base.push(qpu_of_slot.len());
            qpu_of_slot.extend(std::iter::repeat_n(j, data_capacity[j] + q.epr_slots));
        }
        Ok(Hardware {
            data_capacity,
            epr_slots: self.qpus.iter().map(|q| q.epr_slots).collect(),
            slot_base,
            qpu_of_slot,
            channels: self.links.iter().map(|l| l.channels).sum(),
            durations: self.durations.clone(),
        })
    }
}

/// A [`HardwareSpec`] resolved against a circuit width. Physical slots are
/// numbered QPU by QPU.
#[derive(Debug, Clone, PartialEq)]
pub struct Hardware {
    pub data_capacity: Vec<usize>,
    pub epr_slots: Vec<usize>,
    pub slot_base: Vec<usize>,
    pub qpu_of_slot: Vec<usize>,
    /// Total EPR channels over all links.
    pub channels: usize,
    pub durations: DurationModel,
}

impl Hardware {
    pub fn num_qpus(&self) -> usize {
        self.data_capacity.len()
    }

    pub fn num_slots(&self) -> usize {
        self.qpu_of_slot.len()
    }

    pub fn slots_of(&self, qpu: usize) -> std::ops::Range<usize> {
        let start = self.slot_base[qpu];
        start..start + self.data_capacity[qpu] + self.epr_slots[qpu]
    }

    /// EPR pairs the links can supply in a window of width `dt`.
    pub fn epr_limit(&self, dt: f64) -> usize {
        self.channels * (dt / self.durations.epr_period).ceil() as usize
    }
}
