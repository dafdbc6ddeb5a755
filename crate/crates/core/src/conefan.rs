//! The perfect cone fan as a decomposition of the positive semidefinite
//! cone: locating the cone containing a lattice form (with an exact
//! nonnegative-combination certificate), the co-core height, block sums,
//! the one-variable extension, and rank stratification.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::exact::matrix::smith_normal_form;
use crate::exact::{
    lp_solve, pair, rank1, transform, Definiteness, IntVector, LinearProgram, LpOutcome,
    QuadForm, SymLatticePoint, UnimodularMap,
};
use crate::perfection::{
    complete_to_perfect, cone_of_minvecs, enumerate_perfect, is_equivalent, neighbor_across,
    PerfectFormRecord, PolyCone,
};
use crate::shortvec::{minimal_vectors, MinVecSet};
use crate::{Error, Int, Rat, Result};

/// Catalogs of perfect-form classes for every rank up to a bound; the
/// read-only context all fan operations share.
pub struct FanContext {
    catalogs: BTreeMap<usize, Vec<PerfectFormRecord>>,
}

impl FanContext {
    pub fn new(g_max: usize, jobs: Option<usize>) -> Result<Self> {
        let mut catalogs = BTreeMap::new();
        for g in 1..=g_max {
            catalogs.insert(g, enumerate_perfect(g, jobs)?);
        }
        Ok(Self { catalogs })
    }

    pub fn catalog(&self, g: usize) -> Result<&[PerfectFormRecord]> {
        self.catalogs
            .get(&g)
            .map(|v| v.as_slice())
            .ok_or(Error::UnsupportedRank(g, "no catalog of this rank in the context"))
    }

    pub fn g_max(&self) -> usize {
        self.catalogs.keys().copied().max().unwrap_or(0)
    }
}

/// Exact certificate that a lattice form lies in a cone of the fan.
#[derive(Debug, Clone)]
pub struct ConeMembershipCertificate {
    /// index into the catalog of `form.g()`-dimensional classes
    pub class_id: usize,
    /// twist U with transform(class form, U) = primitive scaling of `form`
    pub twist: UnimodularMap,
    /// factor s with `form` = s · transform(class form, twist)
    pub scale: Rat,
    /// the located perfect form (minimum 2 walk scale)
    pub form: QuadForm,
    /// m(form)
    pub minimum: Rat,
    /// minimal-vector representatives of `form`, canonical order — the
    /// roots of the cone's generators
    pub roots: Vec<IntVector>,
    /// λ ≥ 0 with B = Σ λᵢ rootᵢ·rootᵢᵀ, indexed like `roots`
    pub coefficients: Vec<Rat>,
    /// facet normals crossed by the locating walk, in the coordinates the
    /// walk ran in (reduced coordinates for singular inputs)
    pub path: Vec<QuadForm>,
}

impl ConeMembershipCertificate {
    /// Re-verifies the certificate by exact substitution.
    pub fn verify(&self, b: &SymLatticePoint) -> bool {
        if self.roots.len() != self.coefficients.len() {
            return false;
        }
        if self.coefficients.iter().any(|l| l.is_negative()) {
            return false;
        }
        let g = b.g();
        let mut sum = vec![Rat::zero(); g * g];
        for (root, lam) in self.roots.iter().zip(&self.coefficients) {
            let Ok(sq) = rank1(root) else {
                return false;
            };
            if sq.g() != g {
                return false;
            }
            for i in 0..g {
                for j in 0..g {
                    sum[i * g + j] += lam * Rat::from_integer(sq.at(i, j).clone());
                }
            }
        }
        for i in 0..g {
            for j in 0..g {
                if sum[i * g + j] != Rat::from_integer(b.at(i, j).clone()) {
                    return false;
                }
            }
        }
        true
    }
}

fn membership_lambda(roots: &[IntVector], b: &SymLatticePoint) -> Result<Option<Vec<Rat>>> {
    let columns: Vec<Vec<Rat>> = roots
        .iter()
        .map(|x| {
            Ok(rank1(x)?
                .sym_vec()
                .into_iter()
                .map(Rat::from_integer)
                .collect())
        })
        .collect::<Result<_>>()?;
    let target: Vec<Rat> = b.sym_vec().into_iter().map(Rat::from_integer).collect();
    let lp = LinearProgram::nonneg_combination(&columns, &target);
    match lp_solve(&lp)? {
        LpOutcome::Optimal { point, .. } => Ok(Some(point)),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded { .. } => Err(Error::Certification(
            "membership feasibility program cannot be unbounded".into(),
        )),
    }
}

/// Walk through the fan of full-rank cones from the root-lattice seed,
/// crossing the lexicographically least violated facet until the target
/// is inside. Requires b positive definite.
fn walk_full_rank(
    b: &SymLatticePoint,
    _ctx: &FanContext,
) -> Result<(QuadForm, MinVecSet, Vec<Rat>, Vec<QuadForm>)> {
    let g = b.g();
    let mut q = QuadForm::root_form_a(g);
    let mut carried: Option<MinVecSet> = None;
    let mut path: Vec<QuadForm> = Vec::new();
    for _ in 0..100_000 {
        let mv = match carried.take() {
            Some(mv) => mv,
            None => minimal_vectors(&q)?,
        };
        if let Some(lambda) = membership_lambda(&mv.reps, b)? {
            return Ok((q, mv, lambda, path));
        }
        let cone = cone_of_minvecs(g, &mv)?;
        let violated: Vec<usize> = (0..cone.facets().len())
            .filter(|&i| {
                pair(&cone.facets()[i].normal, b)
                    .map(|v| v.is_negative())
                    .unwrap_or(false)
            })
            .collect();
        let &facet = violated
            .iter()
            .min_by(|&&a, &&c| cone.facets()[a].normal.cmp(&cone.facets()[c].normal))
            .ok_or_else(|| {
                Error::Certification("membership failed with no violated facet".into())
            })?;
        let normal = cone.facets()[facet].normal.clone();
        let (_, q_next, mv_next) = neighbor_across(&q, &mv, &cone, facet)?;
        path.push(normal);
        q = q_next;
        carried = Some(mv_next);
    }
    Err(Error::Certification("cone walk did not terminate".into()))
}

/// Unimodular W whose first r columns complement the kernel of b and whose
/// last g−r columns span it, so Wᵀ b W = diag(b_r, 0) with b_r positive
/// definite of size r.
fn kernel_split(b: &SymLatticePoint) -> Result<(UnimodularMap, SymLatticePoint)> {
    let g = b.g();
    let snf = smith_normal_form(&b.rows());
    let mut nonzero = Vec::new();
    let mut zero = Vec::new();
    for j in 0..g {
        if j < snf.divisors.len() && !snf.divisors[j].is_zero() {
            nonzero.push(j);
        } else {
            zero.push(j);
        }
    }
    let cols: Vec<IntVector> = nonzero
        .iter()
        .chain(zero.iter())
        .map(|&j| IntVector::new((0..g).map(|i| snf.right[i][j].clone()).collect()))
        .collect();
    let w = UnimodularMap::from_columns(&cols)?;
    let r = nonzero.len();
    let wt = w.transpose();
    let full = b.conjugated(&wt)?; // Wᵀ B W
    for i in 0..g {
        for j in 0..g {
            if (i >= r || j >= r) && !full.at(i, j).is_zero() {
                return Err(Error::Certification(
                    "kernel split left mass outside the leading block".into(),
                ));
            }
        }
    }
    let mut top = vec![Int::zero(); r * r];
    for i in 0..r {
        for j in 0..r {
            top[i * r + j] = full.at(i, j).clone();
        }
    }
    Ok((w, SymLatticePoint::new(r, top)?))
}

/// Locates the cone of the fan containing a nonzero positive semidefinite
/// lattice form and returns an exact membership certificate.
pub fn locate_cone(b: &SymLatticePoint, ctx: &FanContext) -> Result<ConeMembershipCertificate> {
    if b.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = b.g();
    if ctx.g_max() < g {
        return Err(Error::UnsupportedRank(g, "context catalogs are too small"));
    }
    let analysis = b.to_form().analyze();
    let rank = match analysis.class {
        Definiteness::Indefinite => return Err(Error::NotPositiveSemidefinite),
        Definiteness::PositiveDefinite => g,
        Definiteness::PositiveSemidefinite { rank } => rank,
    };

    let (q_located, mv, lambda, path) = if rank == g {
        walk_full_rank(b, ctx)?
    } else {
        // reduce to the positive definite block, walk there, lift back
        let (w, b_r) = kernel_split(b)?;
        let (q_r, _, _, path) = walk_full_rank(&b_r, ctx)?;
        let pad = QuadForm::identity(g - rank).scaled(&crate::rat_int(2));
        let lifted = q_r.block_sum(&pad);
        let (q_perfect, _) = complete_to_perfect(&lifted)?;
        // undo the base change: q(x) := q_perfect(Wᵀ x)
        let wt = w.transpose();
        let q_back = transform(&q_perfect, &wt)?;
        let mv = minimal_vectors(&q_back)?;
        let lambda = membership_lambda(&mv.reps, b)?.ok_or_else(|| {
            Error::Certification("lifted cone does not contain the input".into())
        })?;
        (q_back, mv, lambda, path)
    };

    // identify the located form in the catalog
    let (prim, t) = q_located.primitive_integer_form();
    let catalog = ctx.catalog(g)?;
    let mut found = None;
    for (id, class) in catalog.iter().enumerate() {
        if let Some(u) = is_equivalent(&class.form, &prim)? {
            found = Some((id, u));
            break;
        }
    }
    let (class_id, twist) = found.ok_or_else(|| {
        Error::Certification("located perfect form missing from the catalog".into())
    })?;
    let scale = t.recip();

    let cert = ConeMembershipCertificate {
        class_id,
        twist,
        scale,
        form: q_located,
        minimum: mv.minimum.clone(),
        roots: mv.reps.clone(),
        coefficients: lambda,
        path,
    };
    if !cert.verify(b) {
        return Err(Error::Certification(
            "membership certificate failed substitution".into(),
        ));
    }
    Ok(cert)
}

/// Support value of the co-core at B: ⟨q, B⟩ / m(q) for the perfect form
/// q whose cone contains B. Equals 1 exactly on primitive rank-one points
/// and exceeds 1 on every semidefinite lattice form of rank ≥ 2.
pub fn cocore_height(b: &SymLatticePoint, ctx: &FanContext) -> Result<Rat> {
    let cert = locate_cone(b, ctx)?;
    Ok(pair(&cert.form, b)? / &cert.minimum)
}

/// Block-diagonal sum. When the two minima agree, the minimal vectors of
/// the sum are certified (by re-enumeration) to be the embedded disjoint
/// union of the two minimal sets.
pub fn direct_sum(q1: &QuadForm, q2: &QuadForm) -> Result<QuadForm> {
    let mv1 = minimal_vectors(q1)?;
    let mv2 = minimal_vectors(q2)?;
    let sum = q1.block_sum(q2);
    if mv1.minimum == mv2.minimum {
        let mv = minimal_vectors(&sum)?;
        let mut expected = embedded_union(&mv1.reps, q1.g(), &mv2.reps, q2.g());
        expected.sort();
        if mv.reps != expected {
            return Err(Error::Certification(
                "minimal vectors of a block sum are not the embedded union".into(),
            ));
        }
    }
    Ok(sum)
}

fn embedded_union(
    left: &[IntVector],
    g1: usize,
    right: &[IntVector],
    g2: usize,
) -> Vec<IntVector> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    for x in left {
        let mut c = x.coords().to_vec();
        c.extend(std::iter::repeat(Int::zero()).take(g2));
        out.push(IntVector::new(c));
    }
    for y in right {
        let mut c = vec![Int::zero(); g1];
        c.extend(y.coords().iter().cloned());
        out.push(IntVector::new(c));
    }
    out
}

/// One-variable extension f ↦ f + m(f)·x², whose minimal vectors are
/// exactly min(f) plus the new unit vector. When the input is perfect the
/// perfection rank increments by exactly one; both facts are certified by
/// re-enumeration before returning.
pub fn extend(q: &QuadForm) -> Result<QuadForm> {
    let mv = minimal_vectors(q)?;
    let g = q.g();
    let tail = QuadForm::new(1, vec![mv.minimum.clone()])?;
    let ext = q.block_sum(&tail);
    let mv_ext = minimal_vectors(&ext)?;
    let mut expected = embedded_union(&mv.reps, g, &[IntVector::from_i64(&[1])], 1);
    expected.sort();
    if mv_ext.reps != expected || mv_ext.minimum != mv.minimum {
        return Err(Error::Certification(
            "extension changed the minimal set unexpectedly".into(),
        ));
    }
    let old_rank = crate::perfection::perfection_rank_of(&mv);
    let new_rank = crate::perfection::perfection_rank_of(&mv_ext);
    if new_rank != old_rank + 1 {
        return Err(Error::Certification(
            "extension did not raise the perfection rank by one".into(),
        ));
    }
    Ok(ext)
}

/// Rank of a relative-interior point of the cone (the sum of its
/// generators): the r for which the cone lives in the closed rank-r
/// stratum and meets its interior.
pub fn interior_rank(cone: &PolyCone) -> Result<usize> {
    if cone.generators().is_empty() {
        return Err(Error::InvalidArgument("empty generator list".into()));
    }
    let mut sum = SymLatticePoint::zero(cone.g());
    for gen in cone.generators() {
        sum = sum.add(gen)?;
    }
    Ok(sum.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perfection::perfect_cone;
    use crate::rat_int;

    fn ctx2() -> FanContext {
        FanContext::new(2, None).unwrap()
    }

    #[test]
    fn locate_identity_in_hexagonal_cone() {
        let ctx = ctx2();
        let b = SymLatticePoint::from_i64_rows(&[&[1, 0], &[0, 1]]).unwrap();
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b));
        assert!(cert.path.is_empty()); // seed cone already contains it
        assert_eq!(cocore_height(&b, &ctx).unwrap(), rat_int(2));
    }

    #[test]
    fn locate_generator_is_trivial() {
        let ctx = ctx2();
        let b = rank1(&IntVector::from_i64(&[1, 0])).unwrap();
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b));
        let nonzero: Vec<&Rat> = cert
            .coefficients
            .iter()
            .filter(|l| !l.is_zero())
            .collect();
        assert_eq!(nonzero, vec![&rat_int(1)]);
        assert_eq!(cocore_height(&b, &ctx).unwrap(), rat_int(1));
    }

    #[test]
    fn locate_in_seed_cone_with_full_support() {
        let ctx = ctx2();
        let b = SymLatticePoint::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap();
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b));
        assert!(cert.path.is_empty());
        assert_eq!(
            cert.form,
            QuadForm::from_i64_rows(&[&[2, -1], &[-1, 2]]).unwrap()
        );
        assert_eq!(cert.coefficients, vec![rat_int(1), rat_int(1), rat_int(1)]);
        assert_eq!(cocore_height(&b, &ctx).unwrap(), rat_int(3));
    }

    #[test]
    fn locate_after_one_crossing() {
        let ctx = ctx2();
        let b = SymLatticePoint::from_i64_rows(&[&[1, -1], &[-1, 2]]).unwrap();
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b));
        assert_eq!(cert.path.len(), 1);
        assert_eq!(
            cert.form,
            QuadForm::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap()
        );
        assert_eq!(cocore_height(&b, &ctx).unwrap(), rat_int(2));
    }

    #[test]
    fn scaled_rank_one_heights() {
        let ctx = ctx2();
        for k in 1..=4i64 {
            let b = rank1(&IntVector::from_i64(&[1, -2]))
                .unwrap()
                .scaled(&Int::from(k));
            assert_eq!(cocore_height(&b, &ctx).unwrap(), rat_int(k));
        }
    }

    #[test]
    fn singular_input_reduces_and_lifts() {
        let ctx = FanContext::new(3, None).unwrap();
        // rank-2 form embedded in g = 3
        let b = SymLatticePoint::from_i64_rows(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 0]]).unwrap();
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b));
        let h = cocore_height(&b, &ctx).unwrap();
        assert_eq!(h, rat_int(3));
    }

    #[test]
    fn indefinite_and_zero_rejected() {
        let ctx = ctx2();
        let h = SymLatticePoint::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(matches!(
            locate_cone(&h, &ctx),
            Err(Error::NotPositiveSemidefinite)
        ));
        assert!(matches!(
            locate_cone(&SymLatticePoint::zero(2), &ctx),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn direct_sum_equal_minima() {
        let a2 = QuadForm::root_form_a(2);
        let a3 = QuadForm::root_form_a(3);
        let s = direct_sum(&a2, &a3).unwrap();
        let mv = minimal_vectors(&s).unwrap();
        assert_eq!(mv.minimum, rat_int(2));
        assert_eq!(mv.kissing, 6 + 12);
    }

    #[test]
    fn direct_sum_unequal_minima() {
        let a2 = QuadForm::root_form_a(2);
        let scaled = a2.scaled(&rat_int(3));
        let s = direct_sum(&a2, &scaled).unwrap();
        let mv = minimal_vectors(&s).unwrap();
        assert_eq!(mv.minimum, rat_int(2));
        assert_eq!(mv.kissing, 6); // only the first block contributes
    }

    #[test]
    fn extension_examples() {
        let hexagonal = QuadForm::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap();
        let e = extend(&hexagonal).unwrap();
        assert_eq!(
            e,
            QuadForm::from_i64_rows(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 2]]).unwrap()
        );
        let mv = minimal_vectors(&e).unwrap();
        assert_eq!(mv.kissing, 8);
        assert_eq!(crate::perfection::perfection_rank(&e).unwrap(), 4);
    }

    #[test]
    fn shared_facet_heights_agree() {
        // supporting-hyperplane equality: a point on a shared facet has the
        // same support value through either of the two adjacent forms
        for g in 2..=3usize {
            for rec in crate::perfection::enumerate_perfect(g, None).unwrap() {
                let m_rec = &rec.minvecs.minimum;
                for link in rec.neighbors.iter().take(4) {
                    let facet = &rec.cone.facets()[link.facet];
                    let mut b = SymLatticePoint::zero(g);
                    for &i in &facet.incident {
                        b = b.add(&rec.cone.generators()[i]).unwrap();
                    }
                    let (_, q_nb, _) = crate::perfection::neighbor_across(
                        &rec.form,
                        &rec.minvecs,
                        &rec.cone,
                        link.facet,
                    )
                    .unwrap();
                    let m_nb = minimal_vectors(&q_nb).unwrap().minimum;
                    let h_here = pair(&rec.form, &b).unwrap() / m_rec;
                    let h_there = pair(&q_nb, &b).unwrap() / m_nb;
                    assert_eq!(h_here, h_there);
                }
            }
        }
    }

    #[test]
    fn interior_rank_cases() {
        let cone = perfect_cone(&QuadForm::root_form_a(2)).unwrap();
        assert_eq!(interior_rank(&cone).unwrap(), 2);
        let face = cone
            .restricted(&[0])
            .unwrap();
        assert_eq!(interior_rank(&face).unwrap(), 1);
    }
}
