use super::{CausalModel, ValueIdx, VarId};

/// Evidence that a child's equation depends on a parent: two settings of the
/// parent that, with the other parents held fixed, yield different outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWitness {
    /// Fixed values of the child's other parents, in parent order.
    pub others: Vec<(VarId, ValueIdx)>,
    pub parent_values: (ValueIdx, ValueIdx),
    pub outputs: (ValueIdx, ValueIdx),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub parent: VarId,
    pub child: VarId,
    pub witness: EdgeWitness,
}

/// Semantic dependency graph of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraph {
    edges: Vec<Edge>,
}

impl CausalGraph {
    pub(crate) fn from_model(model: &CausalModel) -> Self {
        let mut edges = Vec::new();
        for child in model.endogenous() {
            let c = model.compiled(child);
            let radices: Vec<usize> = c.parents.iter().map(|p| model.range(*p).len()).collect();
            for (i, &parent) in c.parents.iter().enumerate() {
                if let Some(witness) = find_witness(c, &radices, i) {
                    edges.push(Edge {
                        parent,
                        child,
                        witness,
                    });
                }
            }
        }
        edges.sort_by_key(|e| (e.child, e.parent));
        CausalGraph { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, parent: VarId, child: VarId) -> bool {
        self.edges.iter().any(|e| e.parent == parent && e.child == child)
    }

    pub fn parents_of(&self, child: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.edges.iter().filter(move |e| e.child == child).map(|e| e.parent)
    }
}

fn find_witness(
    c: &super::Compiled,
    radices: &[usize],
    i: usize,
) -> Option<EdgeWitness> {
    let mut digits = vec![0 as ValueIdx; radices.len()];
    loop {
        if digits[i] == 0 {
            let base = c.lookup(&digits);
            for alt in 1..radices[i] as ValueIdx {
                let mut d2 = digits.clone();
                d2[i] = alt;
                let out = c.lookup(&d2);
                if out != base {
                    let others = c
                        .parents
                        .iter()
                        .zip(&digits)
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, (p, d))| (*p, *d))
                        .collect();
                    return Some(EdgeWitness {
                        others,
                        parent_values: (0, alt),
                        outputs: (base, out),
                    });
                }
            }
        }
        // advance
        let mut k = radices.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            digits[k] += 1;
            if (digits[k] as usize) < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}
