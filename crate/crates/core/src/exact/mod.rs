//! Exact rational arithmetic on symmetric matrices and integer vectors:
//! quadratic forms, symmetric lattice points, the duality pairing, the
//! unimodular group action, and exact definiteness analysis.

pub(crate) mod matrix;
mod lp;

pub use lp::{
    lp_solve, verify_feasible_point, verify_infeasibility_certificate, verify_unbounded_ray,
    Constraint, ConstraintOp, LinearProgram, LpOutcome, VarSign,
};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Int, Rat, Result};
use matrix::RatMat;

/// Number of independent entries of a symmetric g×g matrix.
pub fn sym_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

/// Index of (i, j), i ≤ j, in the row-major upper-triangle layout.
pub fn sym_index(g: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < g);
    i * g - i * (i + 1) / 2 + j
}

fn gcd_all<'a, I: Iterator<Item = &'a Int>>(items: I) -> Int {
    let mut acc = Int::zero();
    for x in items {
        acc = acc.gcd(x);
    }
    acc
}

fn lcm_of_denominators(items: &[Rat]) -> Int {
    let mut acc = Int::one();
    for x in items {
        acc = acc.lcm(x.denom());
    }
    acc
}

/// An integer column vector together with its primitivity flag
/// (gcd of the coordinates is one).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector {
    coords: Vec<Int>,
    primitive: bool,
}

impl IntVector {
    pub fn new(coords: Vec<Int>) -> Self {
        let g = gcd_all(coords.iter());
        let primitive = g.is_one();
        Self { coords, primitive }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    /// Flips the sign if needed so the first nonzero coordinate is positive.
    pub fn canonical_sign(&self) -> IntVector {
        match self.coords.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => {
                IntVector::new(self.coords.iter().map(|x| -x.clone()).collect())
            }
            _ => self.clone(),
        }
    }

    pub fn negated(&self) -> IntVector {
        IntVector::new(self.coords.iter().map(|x| -x.clone()).collect())
    }

    /// Divides by the gcd of the coordinates; zero stays zero.
    pub fn primitive_part(&self) -> IntVector {
        let g = gcd_all(self.coords.iter());
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntVector::new(self.coords.iter().map(|x| x / &g).collect())
    }
}

/// A symmetric g×g matrix of integers: a point of the lattice of
/// integer-valued symmetric bilinear forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymLatticePoint {
    g: usize,
    entries: Vec<Int>, // row-major g×g, symmetric
}

impl SymLatticePoint {
    pub fn new(g: usize, entries: Vec<Int>) -> Result<Self> {
        if g == 0 || entries.len() != g * g {
            return Err(Error::DimensionMismatch(format!(
                "expected {g}×{g} entries"
            )));
        }
        for i in 0..g {
            for j in 0..i {
                if entries[i * g + j] != entries[j * g + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { g, entries })
    }

    pub fn from_rows(rows: &[Vec<Int>]) -> Result<Self> {
        let g = rows.len();
        let mut entries = Vec::with_capacity(g * g);
        for row in rows {
            if row.len() != g {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().cloned());
        }
        Self::new(g, entries)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn zero(g: usize) -> Self {
        Self {
            g,
            entries: vec![Int::zero(); g * g],
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.entries[i * self.g + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn rows(&self) -> Vec<Vec<Int>> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }

    /// Upper-triangle coordinates (i ≤ j), row-major; an isomorphism with
    /// ℤ^{g(g+1)/2} identifying the lattice of symmetric integer matrices.
    pub fn sym_vec(&self) -> Vec<Int> {
        let mut v = Vec::with_capacity(sym_dim(self.g));
        for i in 0..self.g {
            for j in i..self.g {
                v.push(self.at(i, j).clone());
            }
        }
        v
    }

    pub fn from_sym_vec(g: usize, v: &[Int]) -> Result<Self> {
        if v.len() != sym_dim(g) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} symmetric coordinates",
                sym_dim(g)
            )));
        }
        let mut entries = vec![Int::zero(); g * g];
        for i in 0..g {
            for j in i..g {
                let x = v[sym_index(g, i, j)].clone();
                entries[i * g + j] = x.clone();
                entries[j * g + i] = x;
            }
        }
        Self::new(g, entries)
    }

    pub fn add(&self, other: &SymLatticePoint) -> Result<SymLatticePoint> {
        if self.g != other.g {
            return Err(Error::DimensionMismatch("sym point addition".into()));
        }
        Ok(SymLatticePoint {
            g: self.g,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scaled(&self, c: &Int) -> SymLatticePoint {
        SymLatticePoint {
            g: self.g,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn to_form(&self) -> QuadForm {
        QuadForm {
            g: self.g,
            gram: self
                .entries
                .iter()
                .map(|e| Rat::from_integer(e.clone()))
                .collect(),
        }
    }

    /// U B Uᵀ, the lattice-side companion of [`transform`].
    pub fn conjugated(&self, u: &UnimodularMap) -> Result<SymLatticePoint> {
        if self.g != u.g {
            return Err(Error::DimensionMismatch("conjugation".into()));
        }
        let g = self.g;
        let mut ub = vec![Int::zero(); g * g];
        for i in 0..g {
            for j in 0..g {
                let mut acc = Int::zero();
                for k in 0..g {
                    acc += u.at(i, k) * self.at(k, j);
                }
                ub[i * g + j] = acc;
            }
        }
        let mut out = vec![Int::zero(); g * g];
        for i in 0..g {
            for j in 0..g {
                let mut acc = Int::zero();
                for k in 0..g {
                    acc += &ub[i * g + k] * u.at(j, k);
                }
                out[i * g + j] = acc;
            }
        }
        SymLatticePoint::new(g, out)
    }

    pub fn rank(&self) -> usize {
        self.to_form().rat_mat().rank()
    }
}

/// A quadratic form on ℤ^g stored as its symmetric rational Gram matrix G,
/// acting by q(x) = xᵀ G x.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    g: usize,
    gram: Vec<Rat>, // row-major g×g, symmetric
}

/// Exact definiteness classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite { rank: usize },
    Indefinite,
}

impl std::fmt::Display for Definiteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Definiteness::PositiveDefinite => write!(f, "positive-definite"),
            Definiteness::PositiveSemidefinite { rank } => {
                write!(f, "positive-semidefinite (rank {rank})")
            }
            Definiteness::Indefinite => write!(f, "indefinite"),
        }
    }
}

/// Full output of the exact congruence-diagonalization analysis.
#[derive(Debug, Clone)]
pub struct DefAnalysis {
    pub class: Definiteness,
    pub rank: usize,
    /// Primitive integer kernel basis; populated in the semidefinite cases.
    pub kernel: Vec<IntVector>,
    /// A primitive integer vector with q(v) ≤ 0 (< 0 when indefinite,
    /// = 0 when singular); `None` exactly when positive definite.
    pub nonpositive_witness: Option<IntVector>,
}

impl QuadForm {
    pub fn new(g: usize, gram: Vec<Rat>) -> Result<Self> {
        if g == 0 || gram.len() != g * g {
            return Err(Error::DimensionMismatch(format!(
                "expected {g}×{g} entries"
            )));
        }
        for i in 0..g {
            for j in 0..i {
                if gram[i * g + j] != gram[j * g + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { g, gram })
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Result<Self> {
        let g = rows.len();
        let mut gram = Vec::with_capacity(g * g);
        for row in rows {
            if row.len() != g {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            gram.extend(row.iter().cloned());
        }
        Self::new(g, gram)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| crate::rat_int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn identity(g: usize) -> Self {
        let mut gram = vec![Rat::zero(); g * g];
        for i in 0..g {
            gram[i * g + i] = Rat::one();
        }
        Self { g, gram }
    }

    /// Gram matrix of the root lattice A_g (tridiagonal 2 / −1), the
    /// classical perfect seed form in every rank.
    pub fn root_form_a(g: usize) -> Self {
        let mut gram = vec![Rat::zero(); g * g];
        for i in 0..g {
            gram[i * g + i] = crate::rat_int(2);
            if i + 1 < g {
                gram[i * g + i + 1] = crate::rat_int(-1);
                gram[(i + 1) * g + i] = crate::rat_int(-1);
            }
        }
        Self { g, gram }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.gram[i * self.g + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.g)
            .map(|i| (0..self.g).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }

    pub(crate) fn rat_mat(&self) -> RatMat {
        RatMat::new(self.g, self.g, self.gram.clone())
    }

    pub fn eval(&self, x: &IntVector) -> Rat {
        self.bilin(x, x)
    }

    pub fn bilin(&self, x: &IntVector, y: &IntVector) -> Rat {
        assert_eq!(x.dim(), self.g);
        assert_eq!(y.dim(), self.g);
        let mut acc = Rat::zero();
        for i in 0..self.g {
            for j in 0..self.g {
                if !x.coords[i].is_zero() && !y.coords[j].is_zero() {
                    acc += self.at(i, j) * Rat::from_integer(&x.coords[i] * &y.coords[j]);
                }
            }
        }
        acc
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.g);
        let mut acc = Rat::zero();
        for i in 0..self.g {
            for j in 0..self.g {
                acc += self.at(i, j) * &x[i] * &x[j];
            }
        }
        acc
    }

    pub fn scaled(&self, c: &Rat) -> QuadForm {
        QuadForm {
            g: self.g,
            gram: self.gram.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &QuadForm) -> Result<QuadForm> {
        if self.g != other.g {
            return Err(Error::DimensionMismatch("form addition".into()));
        }
        Ok(QuadForm {
            g: self.g,
            gram: self
                .gram
                .iter()
                .zip(&other.gram)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// self + c · dir
    pub fn add_scaled(&self, c: &Rat, dir: &QuadForm) -> Result<QuadForm> {
        self.add(&dir.scaled(c))
    }

    /// Block-diagonal sum with another form.
    pub fn block_sum(&self, other: &QuadForm) -> QuadForm {
        let g = self.g + other.g;
        let mut gram = vec![Rat::zero(); g * g];
        for i in 0..self.g {
            for j in 0..self.g {
                gram[i * g + j] = self.at(i, j).clone();
            }
        }
        for i in 0..other.g {
            for j in 0..other.g {
                gram[(self.g + i) * g + (self.g + j)] = other.at(i, j).clone();
            }
        }
        QuadForm { g, gram }
    }

    pub fn det(&self) -> Rat {
        // clear denominators, Bareiss, scale back
        let d = lcm_of_denominators(&self.gram);
        let int_rows: Vec<Vec<Int>> = (0..self.g)
            .map(|i| {
                (0..self.g)
                    .map(|j| {
                        let scaled = self.at(i, j) * Rat::from_integer(d.clone());
                        debug_assert!(scaled.is_integer());
                        scaled.to_integer()
                    })
                    .collect()
            })
            .collect();
        let det_scaled = matrix::int_det(&int_rows);
        Rat::new(det_scaled, d.pow(self.g as u32))
    }

    pub fn is_integer_matrix(&self) -> bool {
        self.gram.iter().all(|e| e.is_integer())
    }

    /// The unique positive rescaling with integer entries of gcd one,
    /// together with the factor t such that `prim = t · self`.
    pub fn primitive_integer_form(&self) -> (QuadForm, Rat) {
        let d = lcm_of_denominators(&self.gram);
        let nums: Vec<Int> = self
            .gram
            .iter()
            .map(|e| (e * Rat::from_integer(d.clone())).to_integer())
            .collect();
        let content = gcd_all(nums.iter());
        let t = if content.is_zero() {
            Rat::from_integer(d)
        } else {
            Rat::new(d, content)
        };
        (self.scaled(&t), t)
    }

    /// Upper-triangle coordinates of the Gram matrix.
    pub fn sym_vec(&self) -> Vec<Rat> {
        let mut v = Vec::with_capacity(sym_dim(self.g));
        for i in 0..self.g {
            for j in i..self.g {
                v.push(self.at(i, j).clone());
            }
        }
        v
    }

    /// Coordinates of q as a linear functional on symmetric lattice points
    /// in their upper-triangle basis: diagonal entries once, off-diagonal
    /// entries doubled, so that dot(functional, B.sym_vec()) = pair(q, B).
    pub fn functional_vec(&self) -> Vec<Rat> {
        let mut v = Vec::with_capacity(sym_dim(self.g));
        for i in 0..self.g {
            for j in i..self.g {
                if i == j {
                    v.push(self.at(i, j).clone());
                } else {
                    v.push(self.at(i, j) * crate::rat_int(2));
                }
            }
        }
        v
    }

    /// Inverse of [`functional_vec`].
    pub fn from_functional_vec(g: usize, v: &[Rat]) -> Result<Self> {
        if v.len() != sym_dim(g) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} functional coordinates",
                sym_dim(g)
            )));
        }
        let half = Rat::new(Int::one(), Int::from(2));
        let mut gram = vec![Rat::zero(); g * g];
        for i in 0..g {
            for j in i..g {
                let x = &v[sym_index(g, i, j)];
                let e = if i == j { x.clone() } else { x * &half };
                gram[i * g + j] = e.clone();
                gram[j * g + i] = e;
            }
        }
        QuadForm::new(g, gram)
    }

    pub fn definiteness(&self) -> Definiteness {
        self.analyze().class
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.definiteness(), Definiteness::PositiveDefinite)
    }

    /// Exact congruence diagonalization E G Eᵀ = D. Classification, rank,
    /// kernel basis and (when not definite) a nonpositive witness vector
    /// all come out of the same elimination.
    pub fn analyze(&self) -> DefAnalysis {
        let g = self.g;
        let mut a = self.rat_mat();
        let mut e = RatMat::identity(g);

        // congruence row+column operation helpers
        let swap = |a: &mut RatMat, e: &mut RatMat, i: usize, j: usize| {
            a.swap_rows(i, j);
            for r in 0..g {
                a.data.swap(r * g + i, r * g + j);
            }
            e.swap_rows(i, j);
        };
        let add_multiple = |a: &mut RatMat, e: &mut RatMat, i: usize, c: &Rat, j: usize| {
            // row_i += c row_j ; col_i += c col_j
            for k in 0..g {
                let v = a.at(j, k).clone() * c;
                *a.at_mut(i, k) += v;
            }
            for k in 0..g {
                let v = a.at(k, j).clone() * c;
                *a.at_mut(k, i) += v;
            }
            for k in 0..g {
                let v = e.at(j, k).clone() * c;
                *e.at_mut(i, k) += v;
            }
        };

        let mut k = 0;
        while k < g {
            if let Some(p) = (k..g).find(|&i| !a.at(i, i).is_zero()) {
                swap(&mut a, &mut e, k, p);
            } else {
                // all remaining diagonal entries vanish
                let mut off = None;
                'search: for i in k..g {
                    for j in i + 1..g {
                        if !a.at(i, j).is_zero() {
                            off = Some((i, j));
                            break 'search;
                        }
                    }
                }
                match off {
                    None => break, // trailing block zero: done
                    Some((i, j)) => {
                        // make a nonzero diagonal entry: row/col i += row/col j
                        add_multiple(&mut a, &mut e, i, &Rat::one(), j);
                        swap(&mut a, &mut e, k, i);
                    }
                }
            }
            let pivot = a.at(k, k).clone();
            for i in k + 1..g {
                if !a.at(i, k).is_zero() {
                    let c = -(a.at(i, k).clone() / &pivot);
                    add_multiple(&mut a, &mut e, i, &c, k);
                }
            }
            k += 1;
        }

        let witness_vec = |e: &RatMat, i: usize| -> IntVector {
            let row: Vec<Rat> = (0..g).map(|j| e.at(i, j).clone()).collect();
            let d = lcm_of_denominators(&row);
            IntVector::new(
                row.iter()
                    .map(|x| (x * Rat::from_integer(d.clone())).to_integer())
                    .collect(),
            )
            .primitive_part()
        };

        let diag: Vec<Rat> = (0..g).map(|i| a.at(i, i).clone()).collect();
        let mut rank = 0;
        let mut negative = None;
        let mut kernel_rows = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if d.is_negative() {
                negative.get_or_insert(i);
            }
            if !d.is_zero() {
                rank += 1;
            } else {
                kernel_rows.push(i);
            }
        }

        if let Some(i) = negative {
            let w = witness_vec(&e, i);
            debug_assert!(self.eval(&w).is_negative());
            return DefAnalysis {
                class: Definiteness::Indefinite,
                rank,
                kernel: Vec::new(),
                nonpositive_witness: Some(w),
            };
        }

        let kernel: Vec<IntVector> = kernel_rows.iter().map(|&i| witness_vec(&e, i)).collect();
        if rank == g {
            DefAnalysis {
                class: Definiteness::PositiveDefinite,
                rank,
                kernel,
                nonpositive_witness: None,
            }
        } else {
            let w = kernel.first().cloned();
            DefAnalysis {
                class: Definiteness::PositiveSemidefinite { rank },
                rank,
                kernel,
                nonpositive_witness: w,
            }
        }
    }
}

/// A g×g integer matrix with determinant ±1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnimodularMap {
    g: usize,
    entries: Vec<Int>, // row-major
}

impl UnimodularMap {
    pub fn new(g: usize, entries: Vec<Int>) -> Result<Self> {
        if g == 0 || entries.len() != g * g {
            return Err(Error::DimensionMismatch(format!(
                "expected {g}×{g} entries"
            )));
        }
        let rows: Vec<Vec<Int>> = (0..g)
            .map(|i| entries[i * g..(i + 1) * g].to_vec())
            .collect();
        let det = matrix::int_det(&rows);
        if det.abs() != Int::one() {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Self { g, entries })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let g = rows.len();
        let mut entries = Vec::with_capacity(g * g);
        for row in rows {
            if row.len() != g {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(row.iter().map(|&x| Int::from(x)));
        }
        Self::new(g, entries)
    }

    /// Builds from column vectors without re-checking symmetry; the
    /// determinant check still applies.
    pub fn from_columns(cols: &[IntVector]) -> Result<Self> {
        let g = cols.len();
        for c in cols {
            if c.dim() != g {
                return Err(Error::DimensionMismatch("column length".into()));
            }
        }
        let mut entries = vec![Int::zero(); g * g];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..g {
                entries[i * g + j] = c.coords()[i].clone();
            }
        }
        Self::new(g, entries)
    }

    pub fn identity(g: usize) -> Self {
        let mut entries = vec![Int::zero(); g * g];
        for i in 0..g {
            entries[i * g + i] = Int::one();
        }
        Self { g, entries }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.entries[i * self.g + j]
    }

    pub fn rows(&self) -> Vec<Vec<Int>> {
        (0..self.g)
            .map(|i| self.entries[i * self.g..(i + 1) * self.g].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> UnimodularMap {
        let g = self.g;
        let mut entries = vec![Int::zero(); g * g];
        for i in 0..g {
            for j in 0..g {
                entries[j * g + i] = self.entries[i * g + j].clone();
            }
        }
        UnimodularMap { g, entries }
    }

    pub fn mul(&self, other: &UnimodularMap) -> Result<UnimodularMap> {
        if self.g != other.g {
            return Err(Error::DimensionMismatch("map composition".into()));
        }
        let g = self.g;
        let mut entries = vec![Int::zero(); g * g];
        for i in 0..g {
            for j in 0..g {
                let mut acc = Int::zero();
                for k in 0..g {
                    acc += self.at(i, k) * other.at(k, j);
                }
                entries[i * g + j] = acc;
            }
        }
        Ok(UnimodularMap { g, entries })
    }

    /// Exact integer inverse (exists by unimodularity).
    pub fn inverse(&self) -> UnimodularMap {
        let rat = RatMat::new(
            self.g,
            self.g,
            self.entries
                .iter()
                .map(|e| Rat::from_integer(e.clone()))
                .collect(),
        );
        let inv = rat.inverse().expect("unimodular matrices are invertible");
        let entries: Vec<Int> = inv
            .data
            .iter()
            .map(|e| {
                debug_assert!(e.is_integer());
                e.to_integer()
            })
            .collect();
        UnimodularMap {
            g: self.g,
            entries,
        }
    }

    /// U · x
    pub fn apply(&self, x: &IntVector) -> Result<IntVector> {
        if x.dim() != self.g {
            return Err(Error::DimensionMismatch("vector application".into()));
        }
        Ok(IntVector::new(
            (0..self.g)
                .map(|i| {
                    let mut acc = Int::zero();
                    for k in 0..self.g {
                        acc += self.at(i, k) * &x.coords()[k];
                    }
                    acc
                })
                .collect(),
        ))
    }
}

/// Duality pairing ⟨q, B⟩ = Σᵢⱼ Gᵢⱼ Bᵢⱼ, so that ⟨q, x·xᵀ⟩ = q(x).
pub fn pair(q: &QuadForm, b: &SymLatticePoint) -> Result<Rat> {
    if q.g != b.g {
        return Err(Error::DimensionMismatch("pairing".into()));
    }
    let mut acc = Rat::zero();
    for i in 0..q.g {
        for j in 0..q.g {
            let e = b.at(i, j);
            if !e.is_zero() {
                acc += q.at(i, j) * Rat::from_integer(e.clone());
            }
        }
    }
    Ok(acc)
}

/// The rank-one square x·xᵀ of a nonzero integer vector.
pub fn rank1(x: &IntVector) -> Result<SymLatticePoint> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = x.dim();
    let mut entries = vec![Int::zero(); g * g];
    for i in 0..g {
        for j in 0..g {
            entries[i * g + j] = &x.coords()[i] * &x.coords()[j];
        }
    }
    SymLatticePoint::new(g, entries)
}

/// Base change q ↦ (gram UᵀGU), the right action of GL_g(ℤ) on forms.
pub fn transform(q: &QuadForm, u: &UnimodularMap) -> Result<QuadForm> {
    if q.g != u.g {
        return Err(Error::DimensionMismatch("transform".into()));
    }
    let g = q.g;
    // GU
    let mut gu = vec![Rat::zero(); g * g];
    for i in 0..g {
        for j in 0..g {
            let mut acc = Rat::zero();
            for k in 0..g {
                let e = u.at(k, j);
                if !e.is_zero() {
                    acc += q.at(i, k) * Rat::from_integer(e.clone());
                }
            }
            gu[i * g + j] = acc;
        }
    }
    // Uᵀ(GU)
    let mut out = vec![Rat::zero(); g * g];
    for i in 0..g {
        for j in 0..g {
            let mut acc = Rat::zero();
            for k in 0..g {
                let e = u.at(k, i);
                if !e.is_zero() {
                    acc += &gu[k * g + j] * Rat::from_integer(e.clone());
                }
            }
            out[i * g + j] = acc;
        }
    }
    QuadForm::new(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> QuadForm {
        QuadForm::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let q = a2();
        let b = rank1(&IntVector::from_i64(&[1, -1])).unwrap();
        assert_eq!(b, SymLatticePoint::from_i64_rows(&[&[1, -1], &[-1, 1]]).unwrap());
        assert_eq!(pair(&q, &b).unwrap(), crate::rat_int(2));
        let id = SymLatticePoint::from_i64_rows(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(pair(&q, &id).unwrap(), crate::rat_int(4));
        let zero = SymLatticePoint::zero(2);
        assert_eq!(pair(&q, &zero).unwrap(), crate::rat_int(0));
    }

    #[test]
    fn pairing_equals_evaluation() {
        let q = a2();
        for coords in [[1i64, 0], [0, 1], [1, -1], [2, 3], [-1, 4]] {
            let x = IntVector::from_i64(&coords);
            let b = rank1(&x).unwrap();
            assert_eq!(pair(&q, &b).unwrap(), q.eval(&x));
        }
    }

    #[test]
    fn rank1_examples() {
        let s = rank1(&IntVector::from_i64(&[1, 0])).unwrap();
        assert_eq!(s, SymLatticePoint::from_i64_rows(&[&[1, 0], &[0, 0]]).unwrap());
        let t = rank1(&IntVector::from_i64(&[2, 0])).unwrap();
        assert_eq!(t, SymLatticePoint::from_i64_rows(&[&[4, 0], &[0, 0]]).unwrap());
        assert!(!IntVector::from_i64(&[2, 0]).is_primitive());
        assert!(IntVector::from_i64(&[1, -1]).is_primitive());
        assert!(matches!(
            rank1(&IntVector::from_i64(&[0, 0])),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn definiteness_examples() {
        assert_eq!(a2().definiteness(), Definiteness::PositiveDefinite);
        let s = QuadForm::from_i64_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(
            s.definiteness(),
            Definiteness::PositiveSemidefinite { rank: 1 }
        );
        let h = QuadForm::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(h.definiteness(), Definiteness::Indefinite);
    }

    #[test]
    fn analyze_witnesses_reverify() {
        let h = QuadForm::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        let w = h.analyze().nonpositive_witness.unwrap();
        assert!(h.eval(&w).is_negative());

        let s = QuadForm::from_i64_rows(&[&[1, 1], &[1, 1]]).unwrap();
        let an = s.analyze();
        assert_eq!(an.kernel.len(), 1);
        let k = &an.kernel[0];
        assert!(s.eval(k).is_zero());
        // kernel in the matrix sense too
        for i in 0..2 {
            let mut acc = Rat::zero();
            for j in 0..2 {
                acc += s.at(i, j) * Rat::from_integer(k.coords()[j].clone());
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn transform_examples() {
        let q = a2();
        let swap = UnimodularMap::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(transform(&q, &swap).unwrap(), q);
        let shear = UnimodularMap::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let got = transform(&QuadForm::identity(2), &shear).unwrap();
        assert_eq!(
            got,
            QuadForm::from_i64_rows(&[&[1, 1], &[1, 2]]).unwrap()
        );
        let id = UnimodularMap::identity(2);
        assert_eq!(transform(&q, &id).unwrap(), q);
    }

    #[test]
    fn unimodular_rejects_and_inverts() {
        assert!(matches!(
            UnimodularMap::from_i64_rows(&[&[2, 0], &[0, 1]]),
            Err(Error::NotUnimodular(_))
        ));
        let u = UnimodularMap::from_i64_rows(&[&[1, 2], &[0, 1]]).unwrap();
        let inv = u.inverse();
        assert_eq!(u.mul(&inv).unwrap(), UnimodularMap::identity(2));
    }

    #[test]
    fn adjoint_identity_small() {
        let q = a2();
        let u = UnimodularMap::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let b = SymLatticePoint::from_i64_rows(&[&[3, 1], &[1, 2]]).unwrap();
        let lhs = pair(&transform(&q, &u).unwrap(), &b).unwrap();
        let rhs = pair(&q, &b.conjugated(&u).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn primitive_integer_scaling() {
        let q = QuadForm::from_rows(&[
            vec![Rat::new(Int::from(4), Int::from(3)), Rat::new(Int::from(2), Int::from(3))],
            vec![Rat::new(Int::from(2), Int::from(3)), Rat::new(Int::from(4), Int::from(3))],
        ])
        .unwrap();
        let (prim, t) = q.primitive_integer_form();
        assert_eq!(prim, QuadForm::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap());
        assert_eq!(q.scaled(&t), prim);
    }

    #[test]
    fn sym_vec_roundtrip_and_functional() {
        let b = SymLatticePoint::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap();
        let v = b.sym_vec();
        assert_eq!(v, vec![Int::from(2), Int::from(1), Int::from(2)]);
        assert_eq!(SymLatticePoint::from_sym_vec(2, &v).unwrap(), b);

        let q = a2();
        let f = q.functional_vec();
        let dot: Rat = f
            .iter()
            .zip(b.sym_vec())
            .map(|(a, x)| a * Rat::from_integer(x))
            .sum();
        assert_eq!(dot, pair(&q, &b).unwrap());
        assert_eq!(QuadForm::from_functional_vec(2, &f).unwrap(), q);
    }
}
