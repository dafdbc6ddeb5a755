//! GL_g(ℤ)-equivalence of positive definite forms by backtracking over
//! minimal-vector images (Plesken–Souvignier style): candidate images of
//! the standard basis are the vectors of the right norms, pruned by the
//! exact Gram conditions.

use num_traits::Signed;

use crate::exact::{transform, IntVector, QuadForm, UnimodularMap};
use crate::shortvec::{minimal_vectors, vectors_below};
use crate::{Error, Rat, Result};

struct Search<'a> {
    q1: &'a QuadForm,
    q2: &'a QuadForm,
    /// candidates[j]: vectors v (both signs) with q1(v) = q2[j][j]
    candidates: Vec<Vec<IntVector>>,
    chosen: Vec<IntVector>,
    count_all: bool,
    found: Option<UnimodularMap>,
    count: usize,
}

impl<'a> Search<'a> {
    fn run(&mut self, level: usize) {
        let g = self.q1.g();
        if level == g {
            let cols = self.chosen.clone();
            let u = UnimodularMap::from_columns(&cols)
                .expect("Gram-compatible full image is unimodular");
            debug_assert_eq!(&transform(self.q1, &u).unwrap(), self.q2);
            self.count += 1;
            if self.found.is_none() {
                self.found = Some(u);
            }
            return;
        }
        for idx in 0..self.candidates[level].len() {
            if !self.count_all && self.found.is_some() {
                return;
            }
            let cand = self.candidates[level][idx].clone();
            let ok = (0..level).all(|i| {
                self.q1.bilin(&self.chosen[i], &cand) == *self.q2.at(i, level)
            });
            if ok {
                self.chosen.push(cand);
                self.run(level + 1);
                self.chosen.pop();
            }
        }
    }
}

fn norm_candidates(q1: &QuadForm, q2: &QuadForm) -> Result<Vec<Vec<IntVector>>> {
    let g = q1.g();
    let bound = (0..g)
        .map(|j| q2.at(j, j).clone())
        .max()
        .expect("g ≥ 1");
    let pool = vectors_below(q1, &bound)?;
    let per_slot = (0..g)
        .map(|j| {
            let target = q2.at(j, j);
            let mut v: Vec<IntVector> = Vec::new();
            for x in &pool {
                if q1.eval(x) == *target {
                    v.push(x.clone());
                    v.push(x.negated());
                }
            }
            v
        })
        .collect();
    Ok(per_slot)
}

/// Witness U with Uᵀ G₁ U = G₂, if the forms are equivalent. Exact
/// invariants (minimum, determinant, kissing number) screen first; the
/// decision is completed by exhaustive backtracking.
pub fn is_equivalent(q1: &QuadForm, q2: &QuadForm) -> Result<Option<UnimodularMap>> {
    if q1.g() != q2.g() {
        return Err(Error::DimensionMismatch("equivalence test".into()));
    }
    let mv1 = minimal_vectors(q1)?;
    let mv2 = minimal_vectors(q2)?;
    is_equivalent_given(q1, &mv1, q2, &mv2)
}

/// Same decision with the minimal vectors already in hand.
pub(crate) fn is_equivalent_given(
    q1: &QuadForm,
    mv1: &crate::shortvec::MinVecSet,
    q2: &QuadForm,
    mv2: &crate::shortvec::MinVecSet,
) -> Result<Option<UnimodularMap>> {
    if mv1.minimum != mv2.minimum || mv1.kissing != mv2.kissing {
        return Ok(None);
    }
    if q1.det() != q2.det() {
        return Ok(None);
    }
    if pair_value_profile(q1, &mv1.reps) != pair_value_profile(q2, &mv2.reps) {
        return Ok(None);
    }
    let candidates = norm_candidates(q1, q2)?;
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let mut s = Search {
        q1,
        q2,
        candidates,
        chosen: Vec::new(),
        count_all: false,
        found: None,
        count: 0,
    };
    s.run(0);
    Ok(s.found)
}

/// Order of the stabilizer {U ∈ GL_g(ℤ) : Uᵀ G U = G}.
pub fn automorphism_order(q: &QuadForm) -> Result<usize> {
    minimal_vectors(q)?; // positive definiteness gate
    let candidates = norm_candidates(q, q)?;
    let mut s = Search {
        q1: q,
        q2: q,
        candidates,
        chosen: Vec::new(),
        count_all: true,
        found: None,
        count: 0,
    };
    s.run(0);
    Ok(s.count)
}

/// Sorted multiset of |xᵀ G y| over pairs of minimal-vector
/// representatives; a cheap GL-invariant used for screening.
pub(crate) fn pair_value_profile(q: &QuadForm, reps: &[IntVector]) -> Vec<Rat> {
    let mut vals = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            vals.push(q.bilin(&reps[i], &reps[j]).abs());
        }
    }
    vals.sort();
    vals
}
