use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permgroup::{ListedGroup, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypError {
    #[error("color classes do not partition 0..{0}")]
    NotAPartition(usize),
    #[error("color {color}: {reason}")]
    InvalidGroup { color: usize, reason: String },
    #[error("hyperedge {index}: vertex {vertex} out of range")]
    VertexOutOfRange { index: usize, vertex: usize },
    #[error("hyperedge {index}: multiplicity must be at least 1")]
    ZeroMultiplicity { index: usize },
    #[error("malformed instance: {0}")]
    Json(String),
}

/// A multi-hypergraph with colored vertices and an explicitly listed group
/// per color class. Group elements act on positions within their class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredMultiHypergraph {
    pub vertex_count: usize,
    pub color_classes: Vec<Vec<usize>>,
    pub listed_groups: Vec<Vec<Permutation>>,
    /// Vertex sets with multiplicities; repeated sets add up.
    pub hyperedges: Vec<(Vec<usize>, u64)>,
}

/// Per color, the sorted class positions a hyperedge meets.
pub type Traces = Vec<Vec<u32>>;

impl ColoredMultiHypergraph {
    pub fn colors(&self) -> usize {
        self.color_classes.len()
    }

    /// `(color, position)` of every vertex.
    pub(crate) fn slots(&self) -> Result<Vec<(usize, usize)>, HypError> {
        let mut slot = vec![(usize::MAX, 0); self.vertex_count];
        let mut covered = 0;
        for (c, class) in self.color_classes.iter().enumerate() {
            for (k, &v) in class.iter().enumerate() {
                if v >= self.vertex_count || slot[v].0 != usize::MAX {
                    return Err(HypError::NotAPartition(self.vertex_count));
                }
                slot[v] = (c, k);
                covered += 1;
            }
        }
        if covered != self.vertex_count {
            return Err(HypError::NotAPartition(self.vertex_count));
        }
        Ok(slot)
    }

    /// Checks the partition, the listed groups (identity, degree, no
    /// duplicates, closure for groups up to 5000 elements) and hyperedges.
    pub fn listed(&self) -> Result<Vec<ListedGroup>, HypError> {
        if self.listed_groups.len() != self.color_classes.len() {
            return Err(HypError::InvalidGroup {
                color: self.listed_groups.len().min(self.color_classes.len()),
                reason: "one listed group per color class is required".into(),
            });
        }
        self.slots()?;
        for (index, (e, m)) in self.hyperedges.iter().enumerate() {
            if let Some(&vertex) = e.iter().find(|&&v| v >= self.vertex_count) {
                return Err(HypError::VertexOutOfRange { index, vertex });
            }
            if *m == 0 {
                return Err(HypError::ZeroMultiplicity { index });
            }
        }
        self.listed_groups
            .iter()
            .zip(&self.color_classes)
            .enumerate()
            .map(|(color, (els, class))| {
                let g = ListedGroup::new(class.len(), els.clone())
                    .map_err(|reason| HypError::InvalidGroup { color, reason })?;
                if g.len() <= 5000 {
                    g.check_closure().map_err(|reason| HypError::InvalidGroup { color, reason })?;
                }
                Ok(g)
            })
            .collect()
    }

    /// Distinct hyperedges as trace tuples with summed multiplicities.
    pub fn merged_traces(&self) -> Result<BTreeMap<Traces, BigUint>, HypError> {
        let slot = self.slots()?;
        let mut out: BTreeMap<Traces, BigUint> = BTreeMap::new();
        for (e, m) in &self.hyperedges {
            let mut t: Traces = vec![Vec::new(); self.colors()];
            for &v in e {
                let (c, k) = slot[v];
                t[c].push(k as u32);
            }
            for tc in &mut t {
                tc.sort_unstable();
                tc.dedup();
            }
            *out.entry(t).or_default() += BigUint::from(*m);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let form = JsonForm {
            vertex_count: self.vertex_count,
            color_classes: self
                .color_classes
                .iter()
                .map(|c| c.iter().map(|v| v + 1).collect())
                .collect(),
            groups: self
                .listed_groups
                .iter()
                .map(|g| g.iter().map(Permutation::to_cycle_string).collect())
                .collect(),
            hyperedges: self
                .hyperedges
                .iter()
                .map(|(e, m)| JsonEdge {
                    vertices: e.iter().map(|v| v + 1).collect(),
                    multiplicity: *m,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&form).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HypError> {
        let form: JsonForm = serde_json::from_str(text).map_err(|e| HypError::Json(e.to_string()))?;
        let one_based = |v: usize| v.checked_sub(1).ok_or_else(|| HypError::Json("vertices are 1-based".into()));
        let color_classes = form
            .color_classes
            .iter()
            .map(|c| c.iter().map(|&v| one_based(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let listed_groups = form
            .groups
            .iter()
            .zip(&color_classes)
            .map(|(g, class)| {
                g.iter()
                    .map(|s| Permutation::parse_cycles(class.len(), s).map_err(|e| HypError::Json(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let hyperedges = form
            .hyperedges
            .iter()
            .map(|e| Ok((e.vertices.iter().map(|&v| one_based(v)).collect::<Result<_, _>>()?, e.multiplicity)))
            .collect::<Result<Vec<_>, HypError>>()?;
        let x = ColoredMultiHypergraph {
            vertex_count: form.vertex_count,
            color_classes,
            listed_groups,
            hyperedges,
        };
        x.listed()?;
        Ok(x)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonForm {
    vertex_count: usize,
    color_classes: Vec<Vec<usize>>,
    /// Cycle notation on 1-based positions within the class.
    groups: Vec<Vec<String>>,
    hyperedges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    vertices: Vec<usize>,
    #[serde(default = "one")]
    multiplicity: u64,
}

fn one() -> u64 {
    1
}
