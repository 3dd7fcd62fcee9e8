//! Randomized check of the double-complex identities `δ² = 0`, `d̄² = 0`,
//! `δd̄ + d̄δ = 0` and `D² = 0` on small seeded complexes and covers.

use std::fmt;
use std::sync::Arc;

use crate::bicomplex::{big_d_with, cech_delta, dbar_with, BigradedCochain, DbarSign, TotalCochain};
use crate::cover::Cover;
use crate::error::Result;
use crate::rng::Lcg64;
use crate::simplicial::SimplicialComplex;

/// Residuals above this count as failures.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    DeltaSquared,
    DbarSquared,
    Anticommutator,
    TotalSquared,
}

impl Identity {
    pub const ALL: [Identity; 4] = [Self::DeltaSquared, Self::DbarSquared, Self::Anticommutator, Self::TotalSquared];
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DeltaSquared => "delta^2",
            Self::DbarSquared => "dbar^2",
            Self::Anticommutator => "delta dbar + dbar delta",
            Self::TotalSquared => "D^2",
        })
    }
}

/// One failed identity in one trial.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trial: usize,
    pub identity: Identity,
    pub residual: f64,
    pub bidegree: (usize, usize),
    pub top_simplices: Vec<Vec<usize>>,
    pub cover: Vec<Vec<usize>>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "trial {}: {} residual {:.3e} from bidegree {:?}",
            self.trial, self.identity, self.residual, self.bidegree
        )?;
        writeln!(f, "  top simplices: {:?}", self.top_simplices)?;
        write!(f, "  cover: {:?}", self.cover)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelfcheckSummary {
    pub trials: usize,
    pub passed: usize,
    /// Largest residual seen per identity, in [`Identity::ALL`] order.
    pub max_residuals: [f64; 4],
    pub failures: Vec<Counterexample>,
}

impl SelfcheckSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// A random complex of dimension 1 to 3 on 4 to 8 vertices, built from random top simplices.
pub fn random_complex(rng: &mut Lcg64) -> Result<(SimplicialComplex, Vec<Vec<usize>>)> {
    let nv = rng.range(4, 8);
    let dim = rng.range(1, 3);
    let count = rng.range(2, 6);
    let mut tops = Vec::with_capacity(count);
    for _ in 0..count {
        let mut s: Vec<usize> = Vec::with_capacity(dim + 1);
        while s.len() < dim + 1 {
            let v = rng.range(0, nv - 1);
            if !s.contains(&v) {
                s.push(v);
            }
        }
        s.sort_unstable();
        tops.push(s);
    }
    let complex = SimplicialComplex::from_top_simplices(nv, tops.clone())?;
    Ok((complex, tops))
}

/// A random cover with 2 to 4 sets in which every top simplex lies in some set.
pub fn random_cover(complex: Arc<SimplicialComplex>, tops: &[Vec<usize>], rng: &mut Lcg64) -> Result<Cover> {
    let nsets = rng.range(2, 4);
    let mut members = vec![vec![false; complex.vertex_count()]; nsets];
    for set in members.iter_mut() {
        set[rng.range(0, complex.vertex_count() - 1)] = true;
    }
    for s in tops {
        let i = rng.range(0, nsets - 1);
        for &v in s {
            members[i][v] = true;
        }
    }
    for v in 0..complex.vertex_count() {
        let i = rng.range(0, nsets - 1);
        members[i][v] = true;
        for set in members.iter_mut() {
            if rng.chance(0.3) {
                set[v] = true;
            }
        }
    }
    let sets =
        members.into_iter().map(|m| m.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()).collect();
    Cover::new(complex, sets)
}

fn record(
    summary_max: &mut f64,
    failures: &mut Vec<(Identity, f64, (usize, usize))>,
    id: Identity,
    r: f64,
    bideg: (usize, usize),
) {
    *summary_max = summary_max.max(r);
    if r.is_nan() || r >= IDENTITY_TOL {
        failures.push((id, r, bideg));
    }
}

fn sum_norm(a: &BigradedCochain, b: &BigradedCochain) -> f64 {
    let mut s = a.clone();
    s.add_scaled(b, 1.0);
    s.sup_norm()
}

/// Runs `trials` seeded trials. With [`DbarSign::Unsigned`] the anticommutator
/// and `D²` checks are expected to fail.
pub fn run(seed: u64, trials: usize, rule: DbarSign) -> Result<SelfcheckSummary> {
    let mut rng = Lcg64::new(seed);
    let mut summary = SelfcheckSummary { trials, ..Default::default() };
    for trial in 0..trials {
        let (complex, tops) = random_complex(&mut rng)?;
        let cover = random_cover(Arc::new(complex), &tops, &mut rng)?;
        let top = cover.complex().top_dimension();
        let mut failures = Vec::new();
        let [m_delta, m_dbar, m_anti, m_total] = &mut summary.max_residuals;

        for p in 0..=top {
            for n in 0..=cover.len() {
                let c = BigradedCochain::random(p, n, &cover, &mut rng, 1.0);
                let dc = cech_delta(&c, &cover)?;
                record(m_delta, &mut failures, Identity::DeltaSquared, cech_delta(&dc, &cover)?.sup_norm(), (p, n));
                let bc = dbar_with(&c, &cover, rule)?;
                record(m_dbar, &mut failures, Identity::DbarSquared, dbar_with(&bc, &cover, rule)?.sup_norm(), (p, n));
                let anti = sum_norm(&cech_delta(&bc, &cover)?, &dbar_with(&dc, &cover, rule)?);
                record(m_anti, &mut failures, Identity::Anticommutator, anti, (p, n));
            }
        }
        for degree in 0..=top + 1 {
            let h = TotalCochain::random(degree, &cover, &mut rng, 1.0, &[]);
            let dd = big_d_with(&big_d_with(&h, &cover, rule)?, &cover, rule)?;
            record(m_total, &mut failures, Identity::TotalSquared, dd.sup_norm(), (degree, 0));
        }

        if failures.is_empty() {
            summary.passed += 1;
        } else {
            for (identity, residual, bidegree) in failures {
                summary.failures.push(Counterexample {
                    trial,
                    identity,
                    residual,
                    bidegree,
                    top_simplices: tops.clone(),
                    cover: cover.sets().to_vec(),
                });
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_random_data() {
        let s = run(42, 25, DbarSign::Alternating).unwrap();
        assert!(s.all_passed(), "{:?}", s.failures.first());
        assert!(s.max_residuals.iter().all(|&r| r < IDENTITY_TOL));
    }

    #[test]
    fn unsigned_dbar_breaks_anticommutation_by_order_one() {
        let s = run(42, 5, DbarSign::Unsigned).unwrap();
        assert_eq!(s.passed, 0);
        assert!(s.max_residuals[0] < IDENTITY_TOL);
        assert!(s.max_residuals[1] < IDENTITY_TOL);
        assert!(s.max_residuals[2] > 0.1);
        assert!(s.max_residuals[3] > 0.1);
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let s = run(1, 0, DbarSign::Alternating).unwrap();
        assert!(s.all_passed());
        assert_eq!(s.passed, 0);
    }

    #[test]
    fn random_covers_cover() {
        let mut rng = Lcg64::new(7);
        for _ in 0..500 {
            let (k, tops) = random_complex(&mut rng).unwrap();
            random_cover(Arc::new(k), &tops, &mut rng).unwrap();
        }
    }
}
