//! Toric singularity certificates for cones of the perfect fan. A cone
//! whose generators all lie on the affine hyperplane z = 1 of a linear
//! functional z is Q-Gorenstein; it is canonical when no lattice point of
//! the cone has z < 1 and terminal when the only lattice points with
//! z ≤ 1 are the generators themselves. Both conditions are decided by an
//! exhaustive box scan of the polytope σ ∩ {z ≤ level} with exact
//! membership checks.

use num_traits::{One, Signed, Zero};

use crate::exact::matrix::smith_normal_form;
use crate::exact::{
    lp_solve, pair, Definiteness, LinearProgram, LpOutcome, QuadForm, SymLatticePoint,
};
use crate::perfection::{PerfectFormRecord, PolyCone};
use crate::shortvec::minimal_vectors;
use crate::{Error, Int, Rat, Result};

/// Default ceiling on the number of box-scan candidates.
pub const DEFAULT_SCAN_BUDGET: u128 = 100_000_000;

/// A cone of the fan together with the height functional that puts every
/// generator on the level-one hyperplane.
#[derive(Debug, Clone)]
pub struct ToricCone {
    cone: PolyCone,
    /// z(B) = pair(height, B); equals 1 on every generator
    height: QuadForm,
}

/// Exact toric classification at the Q-Gorenstein hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    Smooth,
    Terminal,
    CanonicalNotTerminal,
    NotCanonical,
}

impl std::fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SingularityClass::Smooth => "smooth",
            SingularityClass::Terminal => "terminal",
            SingularityClass::CanonicalNotTerminal => "canonical-not-terminal",
            SingularityClass::NotCanonical => "not-canonical",
        };
        write!(f, "{s}")
    }
}

impl ToricCone {
    pub fn new(cone: PolyCone, height: QuadForm) -> Result<Self> {
        if cone.generators().is_empty() {
            return Err(Error::InvalidArgument("empty generator list".into()));
        }
        for gen in cone.generators() {
            if pair(&height, gen)? != Rat::one() {
                return Err(Error::InvalidArgument(
                    "height functional is not one on every generator".into(),
                ));
            }
        }
        Ok(Self { cone, height })
    }

    /// The full perfect cone of a catalogued class, with the class form
    /// (scaled by 1/minimum) as the height.
    pub fn from_record(rec: &PerfectFormRecord) -> Result<Self> {
        let height = rec.form.scaled(&rec.minvecs.minimum.clone().recip());
        Self::new(rec.cone.clone(), height)
    }

    /// The face of a catalogued cone carried by a generator subset.
    pub fn face_of_record(rec: &PerfectFormRecord, indices: &[usize]) -> Result<Self> {
        let face = rec.cone.restricted(indices)?;
        let height = rec.form.scaled(&rec.minvecs.minimum.clone().recip());
        Self::new(face, height)
    }

    /// A cone from an explicit perfect form: generators are its minimal
    /// vector squares, height is the form over its minimum.
    pub fn from_form(q: &QuadForm) -> Result<Self> {
        let mv = minimal_vectors(q)?;
        let cone = crate::perfection::cone_of_minvecs(q.g(), &mv)?;
        let height = q.scaled(&mv.minimum.recip());
        Self::new(cone, height)
    }

    pub fn cone(&self) -> &PolyCone {
        &self.cone
    }

    pub fn height_form(&self) -> &QuadForm {
        &self.height
    }

    pub fn z(&self, b: &SymLatticePoint) -> Result<Rat> {
        pair(&self.height, b)
    }
}

fn in_cone(gens: &[SymLatticePoint], b: &SymLatticePoint) -> Result<bool> {
    let columns: Vec<Vec<Rat>> = gens
        .iter()
        .map(|g| g.sym_vec().into_iter().map(Rat::from_integer).collect())
        .collect();
    let target: Vec<Rat> = b.sym_vec().into_iter().map(Rat::from_integer).collect();
    let lp = LinearProgram::nonneg_combination(&columns, &target);
    match lp_solve(&lp)? {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible { .. } => Ok(false),
        LpOutcome::Unbounded { .. } => Err(Error::Certification(
            "feasibility program cannot be unbounded".into(),
        )),
    }
}

/// All nonzero lattice points B of the cone with z(B) ≤ level, by an
/// exhaustive scan of the integer bounding box of σ ∩ {z ≤ level}
/// followed by exact membership tests. `level` is clamped to (0, 2] as a
/// resource guard; `budget` bounds the number of scanned candidates.
pub fn lattice_points_below(
    tc: &ToricCone,
    level: &Rat,
    budget: u128,
) -> Result<Vec<SymLatticePoint>> {
    if !level.is_positive() || *level > crate::rat_int(2) {
        return Err(Error::InvalidArgument(
            "level must lie in (0, 2]".into(),
        ));
    }
    let g = tc.cone.g();
    let dim = crate::exact::sym_dim(g);
    // vertices of the polytope: 0 and level·gen for each generator
    let mut lo = vec![Int::zero(); dim];
    let mut hi = vec![Int::zero(); dim];
    for gen in tc.cone.generators() {
        for (k, c) in gen.sym_vec().iter().enumerate() {
            let scaled = level * Rat::from_integer(c.clone());
            let fl = scaled.floor().to_integer();
            let ce = scaled.ceil().to_integer();
            if fl < lo[k] {
                lo[k] = fl;
            }
            if ce > hi[k] {
                hi[k] = ce;
            }
        }
    }
    let mut count: u128 = 1;
    for k in 0..dim {
        let width = (&hi[k] - &lo[k] + Int::one())
            .to_string()
            .parse::<u128>()
            .map_err(|_| Error::BudgetExceeded {
                candidates: u128::MAX,
                budget,
            })?;
        count = count.checked_mul(width).ok_or(Error::BudgetExceeded {
            candidates: u128::MAX,
            budget,
        })?;
    }
    if count > budget {
        return Err(Error::BudgetExceeded {
            candidates: count,
            budget,
        });
    }

    let mut out = Vec::new();
    let mut coords = lo.clone();
    'scan: loop {
        let b = SymLatticePoint::from_sym_vec(g, &coords)?;
        if !b.is_zero() && tc.z(&b)? <= *level {
            // cheap semidefiniteness filter before the membership program
            let psd = !matches!(b.to_form().definiteness(), Definiteness::Indefinite);
            if psd && in_cone(tc.cone.generators(), &b)? {
                out.push(b);
            }
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == dim {
                break 'scan;
            }
            coords[k] += 1;
            if coords[k] <= hi[k] {
                break;
            }
            coords[k] = lo[k].clone();
            k += 1;
        }
    }
    out.sort();
    Ok(out)
}

/// Exact toric classification of the cone.
///
/// Smooth means the generators extend to a basis of the ambient lattice
/// (simplicial with unit Smith index); terminal and canonical follow the
/// z ≤ 1 / z < 1 lattice-point criteria.
pub fn classify_singularity(tc: &ToricCone, budget: u128) -> Result<SingularityClass> {
    let gens = tc.cone.generators();
    let rows: Vec<Vec<Int>> = gens.iter().map(|g| g.sym_vec()).collect();
    let snf = smith_normal_form(&rows);
    let rank = snf.divisors.iter().filter(|d| !d.is_zero()).count();
    let simplicial = rank == gens.len();
    if simplicial && snf.divisors.iter().all(|d| d.is_zero() || d.is_one()) {
        return Ok(SingularityClass::Smooth);
    }

    let one = Rat::one();
    let pts = lattice_points_below(tc, &one, budget)?;
    let mut gen_sorted: Vec<SymLatticePoint> = gens.to_vec();
    gen_sorted.sort();
    if pts == gen_sorted {
        return Ok(SingularityClass::Terminal);
    }
    let below_one = pts
        .iter()
        .any(|b| tc.z(b).map(|z| z < one).unwrap_or(false));
    if below_one {
        Ok(SingularityClass::NotCanonical)
    } else {
        Ok(SingularityClass::CanonicalNotTerminal)
    }
}

/// Desk-scale verification that a positive definite form, viewed as a
/// linear functional on the semidefinite cone, attains its small lattice
/// values only at rank-one points: every nonzero PSD integer matrix with
/// entries in [−box, box] and pairing ≤ m(q) has rank one.
pub fn verify_minima_rank1(q: &QuadForm, box_bound: i64) -> Result<bool> {
    if box_bound < 2 {
        return Err(Error::InvalidArgument("box bound must be at least 2".into()));
    }
    let mv = minimal_vectors(q)?;
    let g = q.g();
    let dim = crate::exact::sym_dim(g);
    let width = (2 * box_bound + 1) as u128;
    let mut total: u128 = 1;
    for _ in 0..dim {
        total = total
            .checked_mul(width)
            .ok_or(Error::BudgetExceeded {
                candidates: u128::MAX,
                budget: 1_000_000_000,
            })?;
    }
    if total > 1_000_000_000 {
        return Err(Error::BudgetExceeded {
            candidates: total,
            budget: 1_000_000_000,
        });
    }

    let mut coords = vec![Int::from(-box_bound); dim];
    let lo = Int::from(-box_bound);
    let hi = Int::from(box_bound);
    'scan: loop {
        let b = SymLatticePoint::from_sym_vec(g, &coords)?;
        if !b.is_zero() {
            let analysis = b.to_form().analyze();
            let psd = !matches!(analysis.class, Definiteness::Indefinite);
            if psd && pair(q, &b)? <= mv.minimum && analysis.rank != 1 {
                return Ok(false);
            }
        }
        let mut k = 0;
        loop {
            if k == dim {
                break 'scan;
            }
            coords[k] += 1;
            if coords[k] <= hi {
                break;
            }
            coords[k] = lo.clone();
            k += 1;
        }
    }
    Ok(true)
}
