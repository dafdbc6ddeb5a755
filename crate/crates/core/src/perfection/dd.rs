//! Double description: facet normals of a full-dimensional pointed cone
//! given by integer generators. The dual cone's extreme rays are built
//! incrementally (Fukuda–Prodon style) with the combinatorial adjacency
//! test; everything stays in exact integer/rational arithmetic. Incidence
//! masks are single machine words, which caps the generator count at 64 —
//! enough for every perfect cone of rank ≤ 7.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::exact::matrix::RatMat;
use crate::{Error, Int, Rat, Result};

#[derive(Debug, Clone)]
pub(crate) struct DdFacet {
    /// Primitive integer normal in functional coordinates: dot(normal, gen) ≥ 0
    /// for every generator, with equality exactly on the incident set.
    pub normal: Vec<Int>,
    pub incident: Vec<usize>,
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(v: &mut Vec<Int>) {
    let mut g = Int::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

struct Ray {
    coords: Vec<Int>,
    /// bit t set when the ray vanishes on the t-th processed generator
    zero_mask: u64,
}

fn zero_mask_of(coords: &[Int], processed: &[&Vec<Int>]) -> u64 {
    let mut mask = 0u64;
    for (t, g) in processed.iter().enumerate() {
        if dot(coords, g).is_zero() {
            mask |= 1 << t;
        }
    }
    mask
}

/// Extreme rays of {φ : φ·genᵢ ≥ 0 ∀i} for generators spanning the full
/// space: exactly the facet normals of cone(generators).
pub(crate) fn dual_description(gens: &[Vec<Int>], dim: usize) -> Result<Vec<DdFacet>> {
    if gens.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    if gens.len() > 64 {
        return Err(Error::InvalidArgument(
            "facet enumeration supports at most 64 generators".into(),
        ));
    }
    for g in gens {
        if g.len() != dim {
            return Err(Error::DimensionMismatch("generator length".into()));
        }
    }

    // greedy maximal independent subset in input order
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(g.iter().map(|x| Rat::from_integer(x.clone())).collect());
        let m = RatMat::from_rows(&trial);
        if m.rank() == trial.len() {
            rows = trial;
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return Err(Error::NotPerfect);
    }

    // initial simplicial dual: columns of M⁻¹ where M has the chosen
    // generators as rows
    let m = RatMat::from_rows(&rows);
    let minv = m.inverse().expect("chosen rows are independent");
    let mut processed: Vec<&Vec<Int>> = chosen.iter().map(|&i| &gens[i]).collect();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rat> = (0..dim).map(|i| minv.at(i, j).clone()).collect();
            let mut den = Int::from(1);
            for c in &col {
                den = den.lcm(c.denom());
            }
            let mut v: Vec<Int> = col
                .iter()
                .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
                .collect();
            primitive(&mut v);
            let zero_mask = zero_mask_of(&v, &processed);
            Ray { coords: v, zero_mask }
        })
        .collect();

    for (i, gen) in gens.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let signs: Vec<Int> = rays.iter().map(|r| dot(&r.coords, gen)).collect();
        let tbit = 1u64 << processed.len();
        if signs.iter().all(|s| !s.is_negative()) {
            processed.push(gen);
            for (r, s) in rays.iter_mut().zip(&signs) {
                if s.is_zero() {
                    r.zero_mask |= tbit;
                }
            }
            continue;
        }

        let pos: Vec<usize> = (0..rays.len()).filter(|&k| signs[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| signs[k].is_negative()).collect();
        let min_common = (dim as u32).saturating_sub(2);
        let mut new_rays: Vec<Vec<Int>> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero_mask & rays[n].zero_mask;
                // rank of the common tight set must be dim − 2; the
                // popcount bound is a cheap necessary condition
                if common.count_ones() < min_common {
                    continue;
                }
                // adjacency: no third ray's zero set contains the common set
                let dominated = rays.iter().enumerate().any(|(k, r)| {
                    k != p && k != n && common & !r.zero_mask == 0
                });
                if dominated {
                    continue;
                }
                let mut combo: Vec<Int> = (0..dim)
                    .map(|t| &signs[p] * &rays[n].coords[t] - &signs[n] * &rays[p].coords[t])
                    .collect();
                primitive(&mut combo);
                new_rays.push(combo);
            }
        }

        processed.push(gen);
        let mut kept: Vec<Ray> = Vec::new();
        for (k, r) in rays.into_iter().enumerate() {
            if !signs[k].is_negative() {
                let mut r = r;
                if signs[k].is_zero() {
                    r.zero_mask |= tbit;
                }
                kept.push(r);
            }
        }
        for v in new_rays {
            // recompute the mask exactly against all processed generators
            let zero_mask = zero_mask_of(&v, &processed);
            if !kept.iter().any(|r| r.coords == v) {
                kept.push(Ray {
                    coords: v,
                    zero_mask,
                });
            }
        }
        rays = kept;
    }

    let mut facets: Vec<DdFacet> = rays
        .into_iter()
        .map(|r| {
            let mut incident = Vec::new();
            for (i, g) in gens.iter().enumerate() {
                let d = dot(&r.coords, g);
                if d.is_negative() {
                    return Err(Error::Certification(
                        "dual ray violates a generator".into(),
                    ));
                }
                if d.is_zero() {
                    incident.push(i);
                }
            }
            Ok(DdFacet {
                normal: r.coords,
                incident,
            })
        })
        .collect::<Result<_>>()?;
    facets.sort_by(|a, b| a.normal.cmp(&b.normal));
    facets.dedup_by(|a, b| a.normal == b.normal);
    Ok(facets)
}
