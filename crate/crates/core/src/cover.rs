//! Open covers by vertex sets, their overlap subcomplexes and nerve.
//!
//! An open set is given by a set of vertices and stands for the induced
//! subcomplex on it: a simplex belongs to `U_{i1...in}` when all of its vertices
//! lie in every `U_i` of the tuple.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::simplicial::SimplicialComplex;

/// Induced subcomplex on the common vertices of a tuple of open sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    indices: Vec<usize>,
    vertices: Vec<usize>,
    // simplices[q]: sorted ids of the q-simplices inside the overlap
    simplices: Vec<Vec<usize>>,
}

impl Overlap {
    fn induced(complex: &SimplicialComplex, indices: Vec<usize>, member: &[bool]) -> Self {
        let vertices = (0..complex.vertex_count()).filter(|&v| member[v]).collect();
        let mut simplices = Vec::new();
        for q in 0..=complex.top_dimension() {
            let ids: Vec<usize> = complex
                .simplices(q)
                .iter()
                .enumerate()
                .filter(|(_, s)| s.iter().all(|&v| member[v]))
                .map(|(id, _)| id)
                .collect();
            if ids.is_empty() {
                break;
            }
            simplices.push(ids);
        }
        Self { indices, vertices, simplices }
    }

    /// Cover indices of this overlap (empty for the whole complex).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Highest dimension with a simplex inside the overlap, if any.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    /// Sorted ids of the `q`-simplices inside the overlap.
    pub fn simplices(&self, q: usize) -> &[usize] {
        self.simplices.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, q: usize, id: usize) -> bool {
        self.simplices(q).binary_search(&id).is_ok()
    }

    fn per_dimension(&self) -> &[Vec<usize>] {
        &self.simplices
    }
}

/// Finite cover of a simplicial complex by vertex sets.
#[derive(Clone, Debug)]
pub struct Cover {
    complex: Arc<SimplicialComplex>,
    sets: Vec<Vec<usize>>,
    whole: Overlap,
    empty: Overlap,
    overlaps: BTreeMap<Vec<usize>, Overlap>,
    nerve: Vec<Vec<usize>>,
}

impl PartialEq for Cover {
    fn eq(&self, other: &Self) -> bool {
        self.sets == other.sets && (Arc::ptr_eq(&self.complex, &other.complex) || self.complex == other.complex)
    }
}

impl Cover {
    /// Builds a cover; each set is sorted and deduplicated. Every vertex and
    /// every simplex of the complex must lie in at least one set.
    pub fn new(complex: Arc<SimplicialComplex>, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(invalid("a cover needs at least one open set"));
        }
        let nv = complex.vertex_count();
        let mut members = Vec::with_capacity(sets.len());
        let mut canonical = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(invalid(format!("open set {i} is empty")));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= nv) {
                return Err(invalid(format!("open set {i} names vertex {v}, complex has {nv}")));
            }
            let mut member = vec![false; nv];
            for &v in &set {
                member[v] = true;
            }
            members.push(member);
            canonical.push(set);
        }
        for q in 0..=complex.top_dimension() {
            for s in complex.simplices(q) {
                if !members.iter().any(|m| s.iter().all(|&v| m[v])) {
                    return Err(invalid(format!("simplex {s:?} lies in no open set")));
                }
            }
        }

        let mut overlaps = BTreeMap::new();
        let mut stack: Vec<(Vec<usize>, Vec<bool>)> =
            (0..canonical.len()).rev().map(|i| (vec![i], members[i].clone())).collect();
        while let Some((tuple, member)) = stack.pop() {
            let last = *tuple.last().unwrap();
            for j in ((last + 1)..canonical.len()).rev() {
                let next: Vec<bool> = member.iter().zip(&members[j]).map(|(a, b)| *a && *b).collect();
                if next.iter().any(|&b| b) {
                    let mut t = tuple.clone();
                    t.push(j);
                    stack.push((t, next));
                }
            }
            let overlap = Overlap::induced(&complex, tuple.clone(), &member);
            overlaps.insert(tuple, overlap);
        }
        let mut nerve: Vec<Vec<usize>> = overlaps.keys().cloned().collect();
        nerve.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        let whole = Overlap::induced(&complex, Vec::new(), &vec![true; nv]);
        let empty = Overlap { indices: Vec::new(), vertices: Vec::new(), simplices: Vec::new() };
        Ok(Self { complex, sets: canonical, whole, empty, overlaps, nerve })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Overlap subcomplex of the given open sets. Index order is irrelevant;
    /// the empty tuple denotes the whole complex.
    pub fn overlap(&self, indices: &[usize]) -> Result<&Overlap> {
        if indices.is_empty() {
            return Ok(&self.whole);
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(format!("repeated cover index in {indices:?}")));
        }
        if let Some(&i) = sorted.iter().find(|&&i| i >= self.sets.len()) {
            return Err(invalid(format!("cover index {i} out of range ({} sets)", self.sets.len())));
        }
        Ok(self.overlaps.get(&sorted).unwrap_or(&self.empty))
    }

    /// All strictly increasing index tuples with a nonempty overlap, ordered by
    /// length and then lexicographically.
    pub fn nerve(&self) -> &[Vec<usize>] {
        &self.nerve
    }

    /// Nerve tuples of exactly `n` indices; `n = 0` yields the empty tuple.
    pub fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        self.nerve.iter().filter(|t| t.len() == n).cloned().collect()
    }

    /// Diagnoses the good-cover assumption: every nonempty overlap should be
    /// acyclic. Failures are warnings, never errors.
    pub fn check_good_cover(&self) -> GoodCoverReport {
        let overlaps = self
            .nerve
            .iter()
            .map(|t| {
                let o = &self.overlaps[t];
                let betti = self.complex.betti_numbers(o.per_dimension());
                let acyclic = betti.first() == Some(&1) && betti.iter().skip(1).all(|&b| b == 0);
                OverlapDiagnostic {
                    indices: t.clone(),
                    betti,
                    status: if acyclic { CoverStatus::Ok } else { CoverStatus::Warn },
                }
            })
            .collect();
        GoodCoverReport { overlaps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverStatus {
    Ok,
    Warn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapDiagnostic {
    pub indices: Vec<usize>,
    /// `b_0, b_1, ...` up to the overlap's dimension.
    pub betti: Vec<usize>,
    pub status: CoverStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodCoverReport {
    pub overlaps: Vec<OverlapDiagnostic>,
}

impl GoodCoverReport {
    pub fn is_good(&self) -> bool {
        self.overlaps.iter().all(|o| o.status == CoverStatus::Ok)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &OverlapDiagnostic> {
        self.overlaps.iter().filter(|o| o.status == CoverStatus::Warn)
    }

    pub fn diagnostic(&self, indices: &[usize]) -> Option<&OverlapDiagnostic> {
        self.overlaps.iter().find(|o| o.indices == indices)
    }
}

impl fmt::Display for GoodCoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.overlaps {
            let status = match o.status {
                CoverStatus::Ok => "ok",
                CoverStatus::Warn => "WARN",
            };
            writeln!(f, "{:?} betti={:?} {status}", o.indices, o.betti)?;
        }
        Ok(())
    }
}
