//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! [`Operator`] is the carrier for every state, effect and unitary in the
//! crate. It wraps a square `DMatrix<Complex64>` and optionally records the
//! tensor factor dimensions of the space it acts on, which is what
//! [`Operator::partial_trace`] needs.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    dims: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    entries: DVector<C64>,
}

/// Result of a Hermitian eigendecomposition, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: Operator,
}

impl Operator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat, dims: None })
    }

    pub(crate) fn from_square(mat: DMatrix<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat, dims: None }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_square(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_square(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_square(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_square(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self::from_square(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    /// Attaches tensor factor dimensions; their product must equal `dim`.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if product != self.dim() || dims.is_empty() {
            return Err(Error::InvalidDims {
                dims,
                dim: self.dim(),
            });
        }
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn without_dims(mut self) -> Self {
        self.dims = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.dims.as_deref()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.mat[(row, col)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            dims: self.dims.clone(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            mat: &self.mat * c,
            dims: self.dims.clone(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// `U · self · U†`
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        let mut out = u * &(self * &u.adjoint());
        out.dims = self.dims.clone().or_else(|| u.dims.clone());
        out
    }

    /// `U† · self · U`
    pub fn conjugate_by_adjoint(&self, u: &Operator) -> Self {
        let mut out = &u.adjoint() * &(self * u);
        out.dims = self.dims.clone().or_else(|| u.dims.clone());
        out
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Entrywise residual of `U U† - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self * &self.adjoint();
        prod.max_abs_diff(&Operator::identity(self.dim()))
    }

    /// Entrywise residual of `P² - P` together with the Hermiticity residual.
    pub fn projection_residual(&self) -> f64 {
        let sq = self * self;
        sq.max_abs_diff(self).max(self.hermiticity_residual())
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.projection_residual() <= tol
    }

    /// `(A + A†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self {
            mat: (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0),
            dims: self.dims.clone(),
        }
    }

    /// Spectral norm (largest singular value).
    pub fn norm(&self) -> f64 {
        self.mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Real-symmetric-embedding free rank: number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > tol).count()
    }

    pub fn tensor(&self, other: &Operator) -> Self {
        tensor(self, other)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.dim(), "dimension mismatch");
        Vector {
            entries: &self.mat * &v.entries,
        }
    }

    /// `⟨v|A|v⟩`
    pub fn expectation(&self, v: &Vector) -> C64 {
        v.inner(&self.apply(v))
    }

    /// Trace over every factor not listed in `keep`.
    ///
    /// The result carries the kept factor dimensions in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let dims = self.dims.as_ref().ok_or(Error::MissingDims)?;
        let factors = dims.len();
        for &k in keep {
            if k >= factors {
                return Err(Error::FactorOutOfRange { index: k, factors });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..factors).filter(|i| !kept.contains(i)).collect();

        let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
        let out_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();

        // strides of the full row-major multi-index
        let mut strides = vec![1usize; factors];
        for i in (0..factors.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let offset = |sel: &[usize], sel_dims: &[usize], mut flat: usize| -> usize {
            let mut off = 0;
            for pos in (0..sel.len()).rev() {
                let digit = flat % sel_dims[pos];
                flat /= sel_dims[pos];
                off += digit * strides[sel[pos]];
            }
            off
        };
        let kept_offsets: Vec<usize> = (0..out_dim)
            .map(|k| offset(&kept, &kept_dims, k))
            .collect();
        let traced_offsets: Vec<usize> = (0..traced_dim)
            .map(|t| offset(&traced, &traced_dims, t))
            .collect();

        let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &traced_offsets {
                    acc += self.mat[(ro + t, co + t)];
                }
                out[(r, c)] = acc;
            }
        }
        let op = Operator::from_square(out);
        if kept_dims.is_empty() {
            Ok(op)
        } else {
            op.with_dims(kept_dims)
        }
    }

    pub fn expm(&self) -> Result<Operator> {
        expm(self)
    }

    pub fn eigh(&self) -> Result<Eigh> {
        eigh(self)
    }

    /// Smallest and largest eigenvalue of a Hermitian operator.
    pub fn spectral_range(&self) -> Result<(f64, f64)> {
        let e = eigh(self)?;
        Ok((e.values[0], *e.values.last().unwrap()))
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
            dims: self.dims.clone().or_else(|| rhs.dims.clone()),
        }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
            dims: self.dims.clone().or_else(|| rhs.dims.clone()),
        }
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
            dims: self.dims.clone().or_else(|| rhs.dims.clone()),
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            mat: -&self.mat,
            dims: self.dims.clone(),
        }
    }
}

impl Vector {
    pub fn new(entries: Vec<C64>) -> Self {
        Self {
            entries: DVector::from_vec(entries),
        }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = DVector::zeros(dim);
        v[k] = ONE;
        Self { entries: v }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn get(&self, k: usize) -> C64 {
        self.entries[k]
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::UNIT_VECTOR
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            entries: &self.entries / C64::new(n, 0.0),
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Vector) -> C64 {
        self.entries.dotc(&other.entries)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }

    pub fn add(&self, other: &Vector) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn tensor(&self, other: &Vector) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    /// `|self⟩⟨self|` without normalisation.
    pub fn projector(&self) -> Operator {
        Operator::from_square(&self.entries * self.entries.adjoint())
    }

    /// `|self⟩⟨other|`
    pub fn outer(&self, other: &Vector) -> Operator {
        assert_eq!(self.dim(), other.dim());
        Operator::from_square(&self.entries * other.entries.adjoint())
    }
}

/// Kronecker product; factor metadata is concatenated.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone().unwrap_or_else(|| vec![a.dim()]);
    dims.extend(b.dims.clone().unwrap_or_else(|| vec![b.dim()]));
    Operator {
        mat: a.mat.kronecker(&b.mat),
        dims: Some(dims),
    }
}

pub fn tensor_all(ops: &[&Operator]) -> Operator {
    let mut iter = ops.iter();
    let first = (*iter.next().expect("at least one factor")).clone();
    let first = if first.dims.is_none() {
        let d = first.dim();
        first.with_dims(vec![d]).expect("trivial factor list")
    } else {
        first
    };
    iter.fold(first, |acc, op| tensor(&acc, op))
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` on factor `position`.
pub fn embed(op: &Operator, position: usize, dims: &[usize]) -> Result<Operator> {
    if position >= dims.len() {
        return Err(Error::FactorOutOfRange {
            index: position,
            factors: dims.len(),
        });
    }
    if op.dim() != dims[position] {
        return Err(Error::DimensionMismatch {
            expected: dims[position],
            found: op.dim(),
        });
    }
    let before: usize = dims[..position].iter().product();
    let after: usize = dims[position + 1..].iter().product();
    let mat = DMatrix::<C64>::identity(before, before)
        .kronecker(&op.mat)
        .kronecker(&DMatrix::<C64>::identity(after, after));
    Operator::from_square(mat).with_dims(dims.to_vec())
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eigh(h: &Operator) -> Result<Eigh> {
    let residual = h.hermiticity_residual();
    if residual > tol::HERMITIAN {
        return Err(Error::NotHermitian { residual });
    }
    let sym = h.hermitian_part().mat;
    let eig = SymmetricEigen::new(sym);
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigh {
        values,
        vectors: Operator::from_square(vectors),
    })
}

impl Eigh {
    pub fn reconstruct(&self) -> Operator {
        let d: Vec<f64> = self.values.clone();
        let v = &self.vectors;
        &(v * &Operator::real_diagonal(&d)) * &v.adjoint()
    }

    pub fn vector(&self, k: usize) -> Vector {
        Vector {
            entries: self.vectors.mat.column(k).into_owned(),
        }
    }

    /// Projection onto the span of eigenvectors whose eigenvalue satisfies `pred`.
    pub fn spectral_projection(&self, pred: impl Fn(f64) -> bool) -> Operator {
        let n = self.values.len();
        let mut p = DMatrix::<C64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            if pred(lambda) {
                let col = self.vectors.mat.column(k);
                p += col * col.adjoint();
            }
        }
        Operator::from_square(p)
    }

    /// `f(H)` by spectral calculus.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Operator {
        let diag: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        &(v * &Operator::diagonal(&diag)) * &v.adjoint()
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
///
/// Zero entries of block-structured generators stay exactly zero: the
/// products, sums and the pivoted LU solve never mix blocks.
pub fn expm(a: &Operator) -> Result<Operator> {
    let n = a.dim();
    let norm = one_norm(&a.mat);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scale = C64::new(2f64.powi(-squarings), 0.0);
    let x = &a.mat * scale;
    let id = DMatrix::<C64>::identity(n, n);
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;

    let u_inner = &x6 * (&x6 * b(13) + &x4 * b(11) + &x2 * b(9));
    let u = &x * (u_inner + &x6 * b(7) + &x4 * b(5) + &x2 * b(3) + &id * b(1));
    let v_inner = &x6 * (&x6 * b(12) + &x4 * b(10) + &x2 * b(8));
    let v = v_inner + &x6 * b(6) + &x4 * b(4) + &x2 * b(2) + &id * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::SingularPade)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(Operator {
        mat: r,
        dims: a.dims.clone(),
    })
}
