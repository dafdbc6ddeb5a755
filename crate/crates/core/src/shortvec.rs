//! Exact shortest-vector enumeration for positive definite rational forms.
//!
//! The enumeration is Fincke–Pohst over a rational Cholesky-style
//! decomposition q(x) = Σ dᵢ (xᵢ + Σ_{j>i} cᵢⱼ xⱼ)². Per-coordinate
//! integer intervals are obtained from integer square roots with exact
//! predicate fix-up, so no floating point enters any accept/reject
//! decision.

use num_integer::Integer as _;
use num_traits::{Signed, Zero};

use crate::exact::{Definiteness, IntVector, QuadForm};
use crate::{Error, Int, Rat, Result};

/// The arithmetical minimum of a form together with one canonical
/// representative per ± pair of minimal vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinVecSet {
    /// m(q), the least value of q on nonzero integer vectors.
    pub minimum: Rat,
    /// One representative per ± pair: first nonzero coordinate positive,
    /// sorted lexicographically.
    pub reps: Vec<IntVector>,
    /// 2 · |reps|.
    pub kissing: usize,
}

struct Ldl {
    d: Vec<Rat>,        // positive pivots
    c: Vec<Vec<Rat>>,   // c[i][j] for j > i
}

fn ldl(q: &QuadForm) -> Option<Ldl> {
    let g = q.g();
    let mut a: Vec<Vec<Rat>> = q.rows();
    let mut d = Vec::with_capacity(g);
    let mut c = vec![vec![Rat::zero(); g]; g];
    for i in 0..g {
        let pivot = a[i][i].clone();
        if !pivot.is_positive() {
            return None;
        }
        for j in i + 1..g {
            c[i][j] = &a[i][j] / &pivot;
        }
        for k in i + 1..g {
            for l in k..g {
                let sub = &a[i][k] * &a[i][l] / &pivot;
                a[k][l] -= &sub;
                if l != k {
                    a[l][k] = a[k][l].clone();
                }
            }
        }
        d.push(pivot);
    }
    Some(Ldl { d, c })
}

/// floor(sqrt(r)) for a nonnegative rational, exact.
fn floor_sqrt_rat(r: &Rat) -> Int {
    debug_assert!(!r.is_negative());
    let prod = r.numer() * r.denom();
    prod.sqrt().div_floor(r.denom())
}

/// Largest integer n with n ≤ c + sqrt(r); requires r ≥ 0.
fn floor_plus_sqrt(c: &Rat, r: &Rat) -> Int {
    let mut n = c.floor().to_integer() + floor_sqrt_rat(r) + Int::from(2);
    loop {
        // n ≤ c + sqrt(r)  ⟺  (n − c) ≤ 0 or (n − c)² ≤ r
        let t = Rat::from_integer(n.clone()) - c;
        if !t.is_positive() || &t * &t <= *r {
            return n;
        }
        n -= 1;
    }
}

fn enumerate(q: &QuadForm, bound: &Rat, out: &mut Vec<IntVector>) -> Result<()> {
    let g = q.g();
    let Some(ldl) = ldl(q) else {
        return Err(Error::NotPositiveDefinite);
    };
    if !bound.is_positive() {
        return Ok(());
    }

    let mut x = vec![Int::zero(); g];
    // remaining[i] = bound − Σ_{k>i} d_k (x_k + center_k)², updated as we descend
    fn descend(
        ldl: &Ldl,
        g: usize,
        level: usize,
        budget: &Rat,
        x: &mut Vec<Int>,
        out: &mut Vec<IntVector>,
        q: &QuadForm,
        bound: &Rat,
    ) {
        // center for this level given the already-fixed deeper coordinates
        let mut center = Rat::zero();
        for j in level + 1..g {
            center += &ldl.c[level][j] * Rat::from_integer(x[j].clone());
        }
        let r = budget / &ldl.d[level];
        let hi = floor_plus_sqrt(&(-center.clone()), &r);
        let lo = -floor_plus_sqrt(&center, &r);
        let mut v = lo;
        while v <= hi {
            x[level] = v.clone();
            let t = Rat::from_integer(v.clone()) + &center;
            let used = &ldl.d[level] * &t * &t;
            debug_assert!(used <= *budget);
            let next_budget = budget - &used;
            if level == 0 {
                // accept canonical ± representative only
                if let Some(first) = x.iter().find(|c| !c.is_zero()) {
                    if first.is_positive() {
                        let vec = IntVector::new(x.clone());
                        debug_assert!(q.eval(&vec) <= *bound);
                        out.push(vec);
                    }
                }
            } else {
                descend(ldl, g, level - 1, &next_budget, x, out, q, bound);
            }
            v += 1;
        }
        x[level] = Int::zero();
    }

    descend(&ldl, g, g - 1, bound, &mut x, out, q, bound);
    Ok(())
}

/// All ± pair representatives of nonzero integer x with q(x) ≤ bound,
/// sorted lexicographically. Requires q positive definite (the rational
/// Cholesky decomposition doubles as the exact definiteness gate).
pub fn vectors_below(q: &QuadForm, bound: &Rat) -> Result<Vec<IntVector>> {
    let mut out = Vec::new();
    enumerate(q, bound, &mut out)?;
    out.sort();
    Ok(out)
}

/// The arithmetical minimum m(q) and the full set of minimal vectors,
/// one canonical representative per ± pair.
pub fn minimal_vectors(q: &QuadForm) -> Result<MinVecSet> {
    // the smallest diagonal entry is an upper bound for the minimum
    let bound = (0..q.g())
        .map(|i| q.at(i, i).clone())
        .min()
        .expect("g ≥ 1");
    let mut all = Vec::new();
    enumerate(q, &bound, &mut all)?;
    let minimum = all
        .iter()
        .map(|x| q.eval(x))
        .min()
        .expect("a unit vector attains the diagonal bound");
    let mut reps: Vec<IntVector> = all
        .into_iter()
        .filter(|x| q.eval(x) == minimum)
        .collect();
    reps.sort();
    let kissing = 2 * reps.len();
    Ok(MinVecSet {
        minimum,
        reps,
        kissing,
    })
}

/// Minimal vectors when an upper bound for the minimum is already known
/// to be attained (the enumeration tree is cut at that bound).
pub(crate) fn minimal_vectors_with_bound(q: &QuadForm, bound: &Rat) -> Result<MinVecSet> {
    let mut all = Vec::new();
    enumerate(q, bound, &mut all)?;
    let minimum = all
        .iter()
        .map(|x| q.eval(x))
        .min()
        .ok_or_else(|| Error::Certification("bound not attained by any vector".into()))?;
    let mut reps: Vec<IntVector> = all
        .into_iter()
        .filter(|x| q.eval(x) == minimum)
        .collect();
    reps.sort();
    let kissing = 2 * reps.len();
    Ok(MinVecSet {
        minimum,
        reps,
        kissing,
    })
}
