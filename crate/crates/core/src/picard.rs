//! Arithmetic on the rank-2 Picard group spanned by the weight-one
//! modular class M and the reduced boundary divisor D (or its level-n
//! counterpart): intersections with the two extremal curve classes,
//! nef/ample predicates, the canonical class, slopes, and the coefficient
//! equations used by the product decomposition of boundary restrictions.
//!
//! A note on orientation: the ample criterion is implemented as
//! a > 12·b > 0 at level one (equivalently a > (12/n)·b with b > 0 at
//! level n). One printed source states the inequality as 12a > b > 0,
//! which is inconsistent with the nef threshold a ≥ 12 for b = 1 and with
//! the canonical class (g+1)M − D being ample exactly for g ≥ 12; the
//! transposed orientation used here is the unique one compatible with
//! both.

use num_traits::{One, Signed, Zero};

use crate::{Error, Int, Rat, Result};

/// The divisor class aM − bD on the genus-g compactification (level-one
/// coordinates), or aM − bD⁽ⁿ⁾ at level n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub a: Rat,
    pub b: Rat,
    pub g: u32,
    pub n: u32,
}

impl DivisorClass {
    pub fn new(a: Rat, b: Rat, g: u32, n: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidArgument("genus must be at least 2".into()));
        }
        if n < 1 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        Ok(Self { a, b, g, n })
    }

    pub fn from_i64(a: i64, b: i64, g: u32, n: u32) -> Result<Self> {
        Self::new(crate::rat_int(a), crate::rat_int(b), g, n)
    }

    /// Pulls a level-n class down to level-one coordinates: the boundary
    /// pulls back by a factor n, so aM − bD⁽ⁿ⁾ is the pullback of
    /// aM − (b/n)D.
    pub fn to_level_one(&self) -> DivisorClass {
        DivisorClass {
            a: self.a.clone(),
            b: &self.b / crate::rat_int(self.n as i64),
            g: self.g,
            n: 1,
        }
    }
}

/// The two extremal curve classes: the varying elliptic factor (C1) and a
/// fiber curve of the contraction to the minimal compactification (C2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveClass {
    C1,
    C2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionSign {
    Negative,
    Zero,
    Positive,
}

impl std::fmt::Display for IntersectionSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IntersectionSign::Negative => "negative",
            IntersectionSign::Zero => "zero",
            IntersectionSign::Positive => "positive",
        };
        write!(f, "{s}")
    }
}

/// (aM − bD)·C₁ = a/12 − b, from M·C₁ = 1/12 and D·C₁ = 1. Level-n
/// classes must be pulled down first.
pub fn intersect_c1(d: &DivisorClass) -> Result<Rat> {
    if d.n != 1 {
        return Err(Error::InvalidArgument(
            "intersection with C1 is defined in level-one coordinates; convert with to_level_one"
                .into(),
        ));
    }
    Ok(&d.a / crate::rat_int(12) - &d.b)
}

/// Sign of (aM − bD)·C₂. M is trivial on C₂ and D·C₂ < 0 with
/// unspecified magnitude, so only the sign of b is reportable.
pub fn intersect_c2_sign(d: &DivisorClass) -> IntersectionSign {
    if d.b.is_zero() {
        IntersectionSign::Zero
    } else if d.b.is_positive() {
        IntersectionSign::Positive
    } else {
        IntersectionSign::Negative
    }
}

/// Nef ⟺ nonnegative on both extremal rays: b ≥ 0 and a ≥ (12/n)·b.
pub fn is_nef(d: &DivisorClass) -> bool {
    if d.b.is_negative() {
        return false;
    }
    let n = crate::rat_int(d.n as i64);
    &d.a * n >= &d.b * crate::rat_int(12)
}

/// Ample ⟺ strictly positive on both extremal rays: b > 0 and
/// a > (12/n)·b.
pub fn is_ample(d: &DivisorClass) -> bool {
    if !d.b.is_positive() {
        return false;
    }
    let n = crate::rat_int(d.n as i64);
    &d.a * n > &d.b * crate::rat_int(12)
}

/// The canonical class (g+1)M − D⁽ⁿ⁾ in level-n coordinates.
pub fn canonical_class(g: u32, n: u32) -> Result<DivisorClass> {
    DivisorClass::from_i64(g as i64 + 1, 1, g, n)
}

/// Slope a/b of the class aM − bD: weight over boundary vanishing order.
pub fn slope(d: &DivisorClass) -> Result<Rat> {
    if !d.b.is_positive() {
        return Err(Error::InvalidArgument(
            "slope is defined only for b > 0".into(),
        ));
    }
    Ok(&d.a / &d.b)
}

/// Whether the graded ring of forms of this slope is finitely generated
/// by the ampleness threshold: slope strictly above 12 in level-one
/// coordinates.
pub fn slope_ring_finitely_generated(d: &DivisorClass) -> Result<bool> {
    let lvl1 = d.to_level_one();
    Ok(slope(&lvl1)? > crate::rat_int(12))
}

/// Coefficients for the boundary product decomposition: the smallest
/// positive integer n with n² > p·s, then b = s/n² and c = 1 − p·b, which
/// satisfy c + p·b = 1 and b·n² = s with b, c > 0.
pub fn product_coefficients(p: u64, s: &Rat) -> Result<(u64, Rat, Rat)> {
    if p < 1 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    if !s.is_positive() {
        return Err(Error::InvalidArgument("s must be positive".into()));
    }
    let ps = s * crate::rat_int(p as i64);
    // floor(sqrt(ps)) then walk up to the strict threshold
    let mut n = (ps.numer() * ps.denom()).sqrt() / ps.denom();
    if n.is_zero() {
        n = Int::one();
    }
    loop {
        let nn = Rat::from_integer(&n * &n);
        if nn > ps {
            break;
        }
        n += 1;
    }
    let n_u64: u64 = n.to_string().parse().map_err(|_| {
        Error::InvalidArgument("product coefficient index overflows u64".into())
    })?;
    let b = s / Rat::from_integer(&n * &n);
    let c = Rat::one() - &b * crate::rat_int(p as i64);
    debug_assert!(b.is_positive() && c.is_positive());
    debug_assert_eq!(&b * Rat::from_integer(&n * &n), *s);
    debug_assert_eq!(&c + &b * crate::rat_int(p as i64), Rat::one());
    Ok((n_u64, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_int;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn dc(a: i64, b: i64, n: u32) -> DivisorClass {
        DivisorClass::from_i64(a, b, 4, n).unwrap()
    }

    #[test]
    fn c1_intersections() {
        assert_eq!(intersect_c1(&dc(12, 1, 1)).unwrap(), rat_int(0));
        assert_eq!(intersect_c1(&dc(13, 1, 1)).unwrap(), q(1, 12));
        assert_eq!(intersect_c1(&dc(1, 0, 1)).unwrap(), q(1, 12));
        assert!(intersect_c1(&dc(12, 1, 2)).is_err());
        assert_eq!(
            intersect_c1(&dc(12, 2, 2).to_level_one()).unwrap(),
            rat_int(0)
        );
    }

    #[test]
    fn c2_signs() {
        assert_eq!(intersect_c2_sign(&dc(12, 1, 1)), IntersectionSign::Positive);
        assert_eq!(intersect_c2_sign(&dc(1, 0, 1)), IntersectionSign::Zero);
        assert_eq!(intersect_c2_sign(&dc(0, -1, 1)), IntersectionSign::Negative);
    }

    #[test]
    fn nef_and_ample_thresholds() {
        assert!(is_nef(&dc(12, 1, 1)));
        assert!(!is_ample(&dc(12, 1, 1)));
        assert!(!is_nef(&dc(11, 1, 1)));
        assert!(is_ample(&dc(13, 1, 1)));
        // M itself is nef but not ample
        assert!(is_nef(&dc(1, 0, 1)));
        assert!(!is_ample(&dc(1, 0, 1)));
        // level two halves the threshold
        assert!(!is_nef(&dc(1, 1, 2)));
        assert!(is_nef(&dc(6, 1, 2)));
        assert!(!is_ample(&dc(6, 1, 2)));
        assert!(is_ample(&dc(7, 1, 2)));
        // negative boundary coefficient is never nef
        assert!(!is_nef(&dc(20, -1, 1)));
    }

    #[test]
    fn canonical_class_thresholds() {
        let k12 = canonical_class(12, 1).unwrap();
        assert_eq!((k12.a.clone(), k12.b.clone()), (rat_int(13), rat_int(1)));
        assert!(is_ample(&k12));
        let k11 = canonical_class(11, 1).unwrap();
        assert!(is_nef(&k11) && !is_ample(&k11));
        let k5_2 = canonical_class(5, 2).unwrap();
        assert_eq!(k5_2.a, rat_int(6));
        assert!(is_nef(&k5_2) && !is_ample(&k5_2));
    }

    #[test]
    fn slopes() {
        assert_eq!(slope(&dc(12, 1, 1)).unwrap(), rat_int(12));
        assert_eq!(slope(&dc(13, 1, 1)).unwrap(), rat_int(13));
        assert!(slope_ring_finitely_generated(&dc(13, 1, 1)).unwrap());
        assert!(!slope_ring_finitely_generated(&dc(12, 1, 1)).unwrap());
        assert_eq!(slope(&dc(24, 2, 1)).unwrap(), rat_int(12));
        assert!(slope(&dc(12, 0, 1)).is_err());
    }

    #[test]
    fn homogeneity_and_cone_characterization() {
        for (a, b) in [(12i64, 1i64), (13, 1), (7, 2), (25, 2), (1, 0)] {
            let d = dc(a, b, 1);
            let scaled = DivisorClass::new(
                d.a.clone() * rat_int(5),
                d.b.clone() * rat_int(5),
                d.g,
                d.n,
            )
            .unwrap();
            assert_eq!(is_nef(&d), is_nef(&scaled));
            assert_eq!(is_ample(&d), is_ample(&scaled));
            if is_ample(&d) {
                assert!(is_nef(&d));
            }
            // nef ⟺ nonnegative against both curve classes
            let nef_by_curves = !intersect_c1(&d).unwrap().is_negative()
                && intersect_c2_sign(&d) != IntersectionSign::Negative;
            assert_eq!(is_nef(&d), nef_by_curves);
        }
    }

    #[test]
    fn product_coefficient_examples() {
        let (n, b, c) = product_coefficients(3, &rat_int(1)).unwrap();
        assert_eq!((n, b, c), (2, q(1, 4), q(1, 4)));
        let (n, b, c) = product_coefficients(1, &rat_int(1)).unwrap();
        assert_eq!((n, b, c), (2, q(1, 4), q(3, 4)));
        let (n, b, c) = product_coefficients(6, &rat_int(2)).unwrap();
        assert_eq!((n, b, c), (4, q(1, 8), q(1, 4)));
    }

    #[test]
    fn invalid_inputs() {
        assert!(DivisorClass::from_i64(1, 1, 1, 1).is_err());
        assert!(product_coefficients(0, &rat_int(1)).is_err());
        assert!(product_coefficients(3, &rat_int(-1)).is_err());
    }
}
