//! Dense complex operators and vectors.
//!
//! `Operator` is a row-major dense matrix over `Complex64` and is the single
//! carrier for Hamiltonians, noise coefficients, semigroup values and flow
//! unitaries. All inner products are anti-linear in the first argument.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with explicit dimensions, entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "operator dimensions must be positive");
        Operator {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Operator::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Operator::from_entries",
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", entries.len()),
            });
        }
        Ok(Operator {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a square matrix from real row data, convenient in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Operator {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Operator::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v;
        }
        m
    }

    /// Rank-one operator |a⟩⟨b|, mapping x to ⟨b, x⟩ a.
    pub fn outer(a: &HVector, b: &HVector) -> Self {
        let mut m = Operator::zeros(a.dim(), b.dim());
        for i in 0..a.dim() {
            for j in 0..b.dim() {
                m.entries[i * b.dim() + j] = a.entries[i] * b.entries[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn add(&self, other: &Operator) -> Operator {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = vec![ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out[dst + j] += a * other.entries[row + j];
                }
            }
        }
        Operator {
            rows: self.rows,
            cols: other.cols,
            entries: out,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        let mut out = vec![ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.entries[i * self.cols + j].conj();
            }
        }
        Operator {
            rows: self.cols,
            cols: self.rows,
            entries: out,
        }
    }

    pub fn transpose(&self) -> Operator {
        let mut out = vec![ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.entries[i * self.cols + j];
            }
        }
        Operator {
            rows: self.cols,
            cols: self.rows,
            entries: out,
        }
    }

    pub fn conj(&self) -> Operator {
        Operator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.entries[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum, used by the matrix exponential scaling.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0_f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += self.entries[i * self.cols + j].norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() < tol
    }

    pub fn apply(&self, v: &HVector) -> HVector {
        assert_eq!(self.cols, v.dim(), "apply shape mismatch");
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let row = i * self.cols;
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc += self.entries[row + j] * v.entries[j];
            }
            out[i] = acc;
        }
        HVector { entries: out }
    }

    /// Reads the matrix as a vector in C^{rows*cols}, row-major.
    pub fn vectorize(&self) -> HVector {
        HVector {
            entries: self.entries.clone(),
        }
    }
}

/// Vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HVector {
    entries: Vec<C64>,
}

impl HVector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        HVector {
            entries: vec![ZERO; dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut v = HVector::zeros(dim);
        v.entries[index] = ONE;
        v
    }

    pub fn from_entries(entries: Vec<C64>) -> Self {
        assert!(!entries.is_empty());
        HVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.entries[i] = v;
    }

    /// Inner product, anti-linear in `self`.
    pub fn inner(&self, other: &HVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: C64) -> HVector {
        HVector {
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &HVector) -> HVector {
        assert_eq!(self.dim(), other.dim());
        HVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HVector) -> HVector {
        assert_eq!(self.dim(), other.dim());
        HVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> HVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// Kronecker product; the left factor is the slow index.
    pub fn tensor(&self, other: &HVector) -> HVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        HVector { entries: out }
    }
}

/// Kronecker product A ⊗ B; the left factor is the slow index.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = vec![ZERO; rows * cols];
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let av = a.entries[ia * a.cols + ja];
            if av == ZERO {
                continue;
            }
            for ib in 0..b.rows {
                let dst = (ia * b.rows + ib) * cols + ja * b.cols;
                let src = ib * b.cols;
                for jb in 0..b.cols {
                    out[dst + jb] = av * b.entries[src + jb];
                }
            }
        }
    }
    Operator {
        rows,
        cols,
        entries: out,
    }
}

/// Compression of an operator on a product space to the second factor:
/// the returned M satisfies ⟨ξ₁, M ξ₂⟩ = ⟨u⊗ξ₁, A (v⊗ξ₂)⟩ for all ξ₁, ξ₂.
///
/// `A` must be square of size `dim_first * dim_second`; `u`, `v` live on the
/// first factor. The operator norm of the result is bounded by
/// ‖A‖·‖u‖·‖v‖.
pub fn slice(a: &Operator, dim_first: usize, dim_second: usize, u: &HVector, v: &HVector) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows != dim_first * dim_second {
        return Err(Error::DimensionMismatch {
            context: "slice",
            expected: format!("operator of size {}", dim_first * dim_second),
            actual: format!("{}", a.rows),
        });
    }
    if u.dim() != dim_first || v.dim() != dim_first {
        return Err(Error::DimensionMismatch {
            context: "slice",
            expected: format!("vectors of dim {}", dim_first),
            actual: format!("{} and {}", u.dim(), v.dim()),
        });
    }
    let n = a.rows;
    let mut out = Operator::zeros(dim_second, dim_second);
    for p in 0..dim_first {
        let up = u.entries[p].conj();
        if up == ZERO {
            continue;
        }
        for q in 0..dim_first {
            let c = up * v.entries[q];
            if c == ZERO {
                continue;
            }
            for i in 0..dim_second {
                let row = (p * dim_second + i) * n + q * dim_second;
                let dst = i * dim_second;
                for j in 0..dim_second {
                    out.entries[dst + j] += c * a.entries[row + j];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the second tensor factor: B_{ij} = Σ_k A_{(i,k),(j,k)}.
pub fn partial_trace_second(a: &Operator, dim_first: usize, dim_second: usize) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows != dim_first * dim_second {
        return Err(Error::DimensionMismatch {
            context: "partial_trace_second",
            expected: format!("operator of size {}", dim_first * dim_second),
            actual: format!("{}", a.rows),
        });
    }
    let n = a.rows;
    let mut out = Operator::zeros(dim_first, dim_first);
    for i in 0..dim_first {
        for j in 0..dim_first {
            let mut acc = ZERO;
            for k in 0..dim_second {
                acc += a.entries[(i * dim_second + k) * n + j * dim_second + k];
            }
            out.entries[i * dim_first + j] = acc;
        }
    }
    Ok(out)
}
