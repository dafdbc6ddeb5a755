//! Perfect forms and their cones: the perfection test, the cone spanned
//! by the rank-one squares of the minimal vectors, facet enumeration,
//! Voronoi's contiguity (neighbor) step, equivalence testing, and the
//! complete enumeration of perfect forms of a given rank with a closure
//! certificate.

mod dd;
mod isometry;

pub use isometry::{automorphism_order, is_equivalent};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact::matrix::RatMat;
use crate::exact::{
    rank1, sym_dim, Definiteness, IntVector, QuadForm, SymLatticePoint, UnimodularMap,
};
use crate::shortvec::{minimal_vectors, MinVecSet};
use crate::{Error, Int, Rat, Result};

/// A facet of a polyhedral cone: inward normal (primitive integer Gram)
/// plus the indices of the generators lying on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: QuadForm,
    pub incident: Vec<usize>,
}

/// A cone in the lattice of symmetric bilinear forms, given by rank-one
/// generators x·xᵀ with their root vectors and its facet description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCone {
    g: usize,
    roots: Vec<IntVector>,
    generators: Vec<SymLatticePoint>,
    facets: Vec<Facet>,
}

impl PolyCone {
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn roots(&self) -> &[IntVector] {
        &self.roots
    }

    pub fn generators(&self) -> &[SymLatticePoint] {
        &self.generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Dimension of the linear span of the generators.
    pub fn span_rank(&self) -> usize {
        let rows: Vec<Vec<Rat>> = self
            .generators
            .iter()
            .map(|b| {
                b.sym_vec()
                    .into_iter()
                    .map(Rat::from_integer)
                    .collect()
            })
            .collect();
        RatMat::from_rows(&rows).rank()
    }

    /// Sub-cone on a subset of the generators (a face when the subset is
    /// the incident set of a facet intersection). Facet data is not
    /// recomputed.
    pub fn restricted(&self, indices: &[usize]) -> Result<PolyCone> {
        let mut roots = Vec::new();
        let mut generators = Vec::new();
        for &i in indices {
            if i >= self.roots.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.roots.len(),
                });
            }
            roots.push(self.roots[i].clone());
            generators.push(self.generators[i].clone());
        }
        Ok(PolyCone {
            g: self.g,
            roots,
            generators,
            facets: Vec::new(),
        })
    }

    /// All proper nonempty faces as generator index sets, computed as
    /// intersections of facet incident sets (plus the facets themselves),
    /// together with the full cone.
    pub fn face_index_sets(&self) -> Vec<Vec<usize>> {
        use std::collections::BTreeSet;
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let all: Vec<usize> = (0..self.generators.len()).collect();
        seen.insert(all);
        let mut frontier: Vec<Vec<usize>> = self
            .facets
            .iter()
            .map(|f| f.incident.clone())
            .filter(|v| !v.is_empty())
            .collect();
        while let Some(face) = frontier.pop() {
            if !seen.insert(face.clone()) {
                continue;
            }
            for f in &self.facets {
                let inter: Vec<usize> = face
                    .iter()
                    .copied()
                    .filter(|i| f.incident.contains(i))
                    .collect();
                if !inter.is_empty() && inter != face && !seen.contains(&inter) {
                    frontier.push(inter);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// Cone from explicit roots and their squares, without facet data.
pub fn cone_from_parts(
    g: usize,
    roots: Vec<IntVector>,
    generators: Vec<SymLatticePoint>,
) -> PolyCone {
    cone_from_parts_with_facets(g, roots, generators, Vec::new())
}

/// Cone from fully explicit parts (used when reloading catalogs).
pub fn cone_from_parts_with_facets(
    g: usize,
    roots: Vec<IntVector>,
    generators: Vec<SymLatticePoint>,
    facets: Vec<Facet>,
) -> PolyCone {
    PolyCone {
        g,
        roots,
        generators,
        facets,
    }
}

/// GL-invariant screening key of a perfect-form class, computed on the
/// primitive integer representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InvariantKey {
    pub g: usize,
    pub det: Int,
    pub minimum: Int,
    pub kissing: usize,
    /// sorted multiset of |xᵀGy| over pairs of minimal-vector reps
    pub pair_profile: Vec<Rat>,
}

pub fn invariant_key(form: &QuadForm, mv: &MinVecSet) -> InvariantKey {
    let det = form.det();
    debug_assert!(det.is_integer());
    debug_assert!(mv.minimum.is_integer());
    InvariantKey {
        g: form.g(),
        det: det.to_integer(),
        minimum: mv.minimum.to_integer(),
        kissing: mv.kissing,
        pair_profile: isometry::pair_value_profile(form, &mv.reps),
    }
}

/// A neighbor link of a catalogued class across one facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborLink {
    pub facet: usize,
    pub class: usize,
    /// U with Uᵀ · (class form) · U = contiguous form (primitive scale).
    pub witness: UnimodularMap,
}

/// One catalogued equivalence class of perfect forms.
#[derive(Debug, Clone)]
pub struct PerfectFormRecord {
    /// canonical representative: primitive integer Gram
    pub form: QuadForm,
    pub minvecs: MinVecSet,
    pub cone: PolyCone,
    pub key: InvariantKey,
    /// one link per crossable facet, in facet order
    pub neighbors: Vec<NeighborLink>,
    pub aut_order: Option<usize>,
}

/// Dimension of span{x·xᵀ : x ∈ min(q)}.
pub fn perfection_rank(q: &QuadForm) -> Result<usize> {
    let mv = minimal_vectors(q)?;
    Ok(perfection_rank_of(&mv))
}

pub(crate) fn perfection_rank_of(mv: &MinVecSet) -> usize {
    let rows: Vec<Vec<Rat>> = mv
        .reps
        .iter()
        .map(|x| {
            rank1(x)
                .expect("minimal vectors are nonzero")
                .sym_vec()
                .into_iter()
                .map(Rat::from_integer)
                .collect()
        })
        .collect();
    RatMat::from_rows(&rows).rank()
}

/// A form is perfect when its minimal-vector squares span the whole
/// g(g+1)/2-dimensional space of symmetric forms — equivalently, when it
/// is determined by its minimum and minimal vectors.
pub fn is_perfect(q: &QuadForm) -> Result<bool> {
    Ok(perfection_rank(q)? == sym_dim(q.g()))
}

/// The perfect cone σ(q): generators are the rank-one squares of min(q),
/// facets come from exact double description. Full-dimensional exactly
/// when q is perfect.
pub fn perfect_cone(q: &QuadForm) -> Result<PolyCone> {
    let mv = minimal_vectors(q)?;
    cone_of_minvecs(q.g(), &mv)
}

pub(crate) fn cone_of_minvecs(g: usize, mv: &MinVecSet) -> Result<PolyCone> {
    let roots = mv.reps.clone();
    let generators: Vec<SymLatticePoint> =
        roots.iter().map(|x| rank1(x).expect("nonzero")).collect();
    let gen_vecs: Vec<Vec<Int>> = generators.iter().map(|b| b.sym_vec()).collect();
    let dd_facets = dd::dual_description(&gen_vecs, sym_dim(g))?;
    let facets = dd_facets
        .into_iter()
        .map(|f| {
            let rat: Vec<Rat> = f.normal.iter().map(|x| Rat::from_integer(x.clone())).collect();
            let (normal, _) = QuadForm::from_functional_vec(g, &rat)?.primitive_integer_form();
            Ok(Facet {
                normal,
                incident: f.incident,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyCone {
        g,
        roots,
        generators,
        facets,
    })
}

/// Largest ρ > 0 with m(q + ρ·dir) = m(q), together with the form and its
/// minimal vectors at that ρ. Requires dir ≥ 0 on min(q) with at least one
/// zero, so the minimum is pinned at m for small ρ.
pub(crate) fn max_step(
    q: &QuadForm,
    mv: &MinVecSet,
    dir: &QuadForm,
) -> Result<(Rat, QuadForm, MinVecSet)> {
    let m = &mv.minimum;
    let mut pinned = false;
    for x in &mv.reps {
        let d = dir.eval(x);
        if d.is_negative() {
            return Err(Error::Certification(
                "step direction decreases a minimal vector".into(),
            ));
        }
        if d.is_zero() {
            pinned = true;
        }
    }
    if !pinned {
        return Err(Error::Certification(
            "step direction vanishes on no minimal vector".into(),
        ));
    }

    // Evaluates one candidate ρ. Good means the minimum is still m with
    // no minimal vector beyond the zero set (ρ < ρ_max); Exact means the
    // minimum is m and a new vector with dir < 0 has joined (ρ = ρ_max);
    // Beyond carries the violating vectors (ρ > ρ_max).
    enum Probe {
        Good,
        Exact(QuadForm, MinVecSet),
        Beyond(Vec<IntVector>),
    }
    let evaluate = |rho: &Rat| -> Result<Probe> {
        let qu = q.add_scaled(rho, dir)?;
        let analysis = qu.analyze();
        match analysis.class {
            Definiteness::PositiveDefinite => {
                // the zero-set vectors keep the value m, so the minimum
                // is ≤ m and the enumeration can be cut there
                let mvu = crate::shortvec::minimal_vectors_with_bound(&qu, m)?;
                debug_assert!(mvu.minimum <= *m);
                if mvu.minimum == *m {
                    if mvu.reps.iter().any(|x| dir.eval(x).is_negative()) {
                        Ok(Probe::Exact(qu, mvu))
                    } else {
                        Ok(Probe::Good)
                    }
                } else {
                    Ok(Probe::Beyond(mvu.reps))
                }
            }
            _ => Ok(Probe::Beyond(vec![analysis
                .nonpositive_witness
                .expect("non-definite forms carry a witness")])),
        }
    };
    // (m − q(v)) / dir(v): where v starts violating the minimum.
    let root_of = |v: &IntVector| -> Option<Rat> {
        let dv = dir.eval(v);
        dv.is_negative().then(|| (m.clone() - q.eval(v)) / dv)
    };

    // Phase A: grow by doubling until a bad value brackets the target.
    let mut lo = Rat::zero();
    let mut hi = Rat::one();
    let mut bracketed = false;
    for _ in 0..200 {
        match evaluate(&hi)? {
            Probe::Good => {
                lo = hi.clone();
                hi *= crate::rat_int(2);
            }
            Probe::Exact(qu, mvu) => return Ok((hi, qu, mvu)),
            Probe::Beyond(_) => {
                bracketed = true;
                break;
            }
        }
    }
    if !bracketed {
        return Err(Error::Certification(
            "step direction admits no finite maximal step".into(),
        ));
    }

    // Phase B: the target lies in (lo, hi]. Alternate exact root probes
    // (which can land on the target exactly) with bisection (which keeps
    // the probe values, and hence all intermediate vectors and roots, of
    // small bit size).
    let mut pending: Option<Rat> = None;
    let mut just_rooted = false;
    for _ in 0..10_000 {
        let use_root = !just_rooted
            && pending
                .as_ref()
                .map(|r| *r > lo && *r < hi)
                .unwrap_or(false);
        let probe = if use_root {
            just_rooted = true;
            pending.take().expect("checked above")
        } else {
            just_rooted = false;
            (lo.clone() + &hi) / crate::rat_int(2)
        };
        match evaluate(&probe)? {
            Probe::Good => {
                lo = probe;
            }
            Probe::Exact(qu, mvu) => return Ok((probe, qu, mvu)),
            Probe::Beyond(violating) => {
                hi = probe;
                let mut best: Option<Rat> = None;
                for v in &violating {
                    if let Some(root) = root_of(v) {
                        if best.as_ref().map(|b| root < *b).unwrap_or(true) {
                            best = Some(root);
                        }
                    }
                }
                // every violating vector yields a root below hi but not
                // below the target, so it is the next candidate to try
                pending = best;
            }
        }
    }
    Err(Error::Certification(
        "contiguity step did not converge".into(),
    ))
}

/// Voronoi's contiguity step: the perfect form across the given facet of
/// σ(q). Returns (ρ, q′, min(q′)) with q′ = q + ρ·R, where R is the facet
/// normal; the result is certified exactly before being returned.
pub fn neighbor_across(
    q: &QuadForm,
    mv: &MinVecSet,
    cone: &PolyCone,
    facet_index: usize,
) -> Result<(Rat, QuadForm, MinVecSet)> {
    let facet = cone.facets.get(facet_index).ok_or(Error::IndexOutOfRange {
        index: facet_index,
        len: cone.facets.len(),
    })?;
    if facet.incident.is_empty() {
        return Err(Error::InvalidArgument(
            "facet lies on the boundary of the semidefinite cone; no contiguous form".into(),
        ));
    }
    let (rho, q_new, mv_new) = max_step(q, mv, &facet.normal)?;

    // contiguity certificate
    if mv_new.minimum != mv.minimum {
        return Err(Error::Certification("neighbor changed the minimum".into()));
    }
    let mut on_facet: Vec<IntVector> = mv_new
        .reps
        .iter()
        .filter(|x| facet.normal.eval(x).is_zero())
        .cloned()
        .collect();
    on_facet.sort();
    let mut expected: Vec<IntVector> = facet
        .incident
        .iter()
        .map(|&i| cone.roots[i].clone())
        .collect();
    expected.sort();
    if on_facet != expected {
        return Err(Error::Certification(
            "shared facet minimal vectors do not match".into(),
        ));
    }
    if !mv_new
        .reps
        .iter()
        .any(|x| facet.normal.eval(x).is_negative())
    {
        return Err(Error::Certification(
            "no minimal vector appeared beyond the facet".into(),
        ));
    }
    Ok((rho, q_new, mv_new))
}

/// Record-level neighbor step (the facet indices refer to `rec.cone`).
pub fn neighbor(rec: &PerfectFormRecord, facet_index: usize) -> Result<QuadForm> {
    let (_, q, _) = neighbor_across(&rec.form, &rec.minvecs, &rec.cone, facet_index)?;
    Ok(q)
}

/// Grows a positive definite form to a perfect one without losing any of
/// its minimal vectors (min(result) ⊇ min(input), same minimum).
pub fn complete_to_perfect(q: &QuadForm) -> Result<(QuadForm, MinVecSet)> {
    let mut form = q.clone();
    let mut mv = minimal_vectors(&form)?;
    let n = sym_dim(form.g());
    for _ in 0..=n {
        let rank = perfection_rank_of(&mv);
        if rank == n {
            return Ok((form, mv));
        }
        // direction orthogonal to every minimal-vector square
        let rows: Vec<Vec<Rat>> = mv
            .reps
            .iter()
            .map(|x| {
                rank1(x)
                    .expect("nonzero")
                    .sym_vec()
                    .into_iter()
                    .map(Rat::from_integer)
                    .collect()
            })
            .collect();
        let null = RatMat::from_rows(&rows).nullspace();
        let phi = null
            .first()
            .ok_or_else(|| Error::Certification("imperfect form with full span".into()))?;
        let (h, _) = QuadForm::from_functional_vec(form.g(), phi)?.primitive_integer_form();
        let stepped = match max_step(&form, &mv, &h) {
            Ok(res) => res,
            Err(_) => max_step(&form, &mv, &h.scaled(&crate::rat_int(-1)))?,
        };
        let (_, new_form, new_mv) = stepped;
        if new_mv.kissing <= mv.kissing {
            return Err(Error::Certification(
                "perfection step did not enlarge the minimal set".into(),
            ));
        }
        form = new_form;
        mv = new_mv;
    }
    Err(Error::Certification(
        "perfection completion did not terminate".into(),
    ))
}

fn build_record(prim: QuadForm, with_aut: bool) -> Result<PerfectFormRecord> {
    let mv = minimal_vectors(&prim)?;
    let cone = cone_of_minvecs(prim.g(), &mv)?;
    let key = invariant_key(&prim, &mv);
    let aut = if with_aut {
        Some(automorphism_order(&prim)?)
    } else {
        None
    };
    Ok(PerfectFormRecord {
        form: prim,
        minvecs: mv,
        cone,
        key,
        neighbors: Vec::new(),
        aut_order: aut,
    })
}

/// Complete enumeration of perfect-form classes of rank g by Voronoi's
/// graph traversal from the root-lattice seed. The returned catalog is in
/// canonical order and every facet of every class carries a neighbor link
/// into the catalog: the closure certificate.
///
/// `jobs` bounds the worker threads used for the per-facet neighbor
/// steps; the output is identical for every thread count.
pub fn enumerate_perfect(g: usize, jobs: Option<usize>) -> Result<Vec<PerfectFormRecord>> {
    if !(1..=7).contains(&g) {
        return Err(Error::UnsupportedRank(g, "perfect-form enumeration supports 1 ≤ g ≤ 7"));
    }
    let with_aut = g <= 5;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let (seed, _) = QuadForm::root_form_a(g).primitive_integer_form();
    let mut classes: Vec<PerfectFormRecord> = vec![build_record(seed, with_aut)?];
    let mut next = 0usize;
    while next < classes.len() {
        let crossable: Vec<usize> = classes[next]
            .cone
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.incident.is_empty())
            .map(|(i, _)| i)
            .collect();
        let current = classes[next].clone();
        let neighbor_forms: Vec<(usize, QuadForm, MinVecSet)> = pool.install(|| {
            crossable
                .par_iter()
                .map(|&i| {
                    let (_, q, mv) =
                        neighbor_across(&current.form, &current.minvecs, &current.cone, i)?;
                    let (prim, t) = q.primitive_integer_form();
                    // the primitive rescale shares the minimal vectors
                    let prim_mv = MinVecSet {
                        minimum: mv.minimum * t,
                        reps: mv.reps,
                        kissing: mv.kissing,
                    };
                    Ok((i, prim, prim_mv))
                })
                .collect::<Result<Vec<_>>>()
        })?;

        for (facet, prim, prim_mv) in neighbor_forms {
            let prim_key = invariant_key(&prim, &prim_mv);
            let mut linked = None;
            for (id, class) in classes.iter().enumerate() {
                if class.key != prim_key {
                    continue;
                }
                if let Some(u) =
                    isometry::is_equivalent_given(&class.form, &class.minvecs, &prim, &prim_mv)?
                {
                    linked = Some((id, u));
                    break;
                }
            }
            let (class_id, witness) = match linked {
                Some(l) => l,
                None => {
                    let rec = build_record(prim.clone(), with_aut)?;
                    classes.push(rec);
                    let id = classes.len() - 1;
                    (id, UnimodularMap::identity(g))
                }
            };
            classes[next].neighbors.push(NeighborLink {
                facet,
                class: class_id,
                witness,
            });
        }
        next += 1;
    }

    // canonical order: invariant key, then the deterministic discovery index
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| classes[a].key.cmp(&classes[b].key).then(a.cmp(&b)));
    let mut relabel = vec![0usize; classes.len()];
    for (new_id, &old_id) in order.iter().enumerate() {
        relabel[old_id] = new_id;
    }
    let mut sorted: Vec<PerfectFormRecord> = Vec::with_capacity(classes.len());
    for &old_id in &order {
        let mut rec = classes[old_id].clone();
        for link in &mut rec.neighbors {
            link.class = relabel[link.class];
        }
        sorted.push(rec);
    }
    Ok(sorted)
}
