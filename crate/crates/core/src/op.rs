//! Dense complex matrices, bipartite index bookkeeping, partial traces and
//! Hermitian eigendecomposition with degeneracy clustering.
//!
//! The composite index convention is fixed globally: the basis vector of a
//! bipartite space with first-factor index `i` and second-factor index `k`
//! sits at position `i * d2 + k`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Frobenius deviation below which a quantity is treated as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Relative tolerance for Hermiticity preconditions.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense square complex matrix with an optional human-readable label.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
    label: Option<String>,
}

impl Operator {
    /// Wraps a square matrix. Fails on non-square or empty input.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::InvalidArgument(format!(
                "operator matrix must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat, label: None })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            mat: DMatrix::from_fn(dim, dim, f),
            label: None,
        }
    }

    /// Builds an operator from row-major real/imaginary pairs.
    pub fn from_row_major(dim: usize, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "row-major entry list",
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            C64::new(re, im)
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
            label: None,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, value: C64) {
        self.mat[(i, j)] = value;
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            label: None,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            mat: &self.mat * factor,
            label: None,
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.mat
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Frobenius distance to the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Frobenius norm of `A† A - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        (self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(d, d)).norm()
    }

    /// Rejects operators that are not unitary within `tol * sqrt(dim)`.
    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tol * (self.dim() as f64).sqrt() {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    fn require_same_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator addition dimension mismatch");
        Operator {
            mat: &self.mat + &rhs.mat,
            label: None,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator subtraction dimension mismatch");
        Operator {
            mat: &self.mat - &rhs.mat,
            label: None,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product dimension mismatch");
        Operator {
            mat: &self.mat * &rhs.mat,
            label: None,
        }
    }
}

/// Kronecker product in the fixed `i * d2 + k` index convention.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    Operator {
        mat: a.matrix().kronecker(b.matrix()),
        label: None,
    }
}

/// `ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.require_same_dim(b, "commutator")?;
    Ok(&(a * b) - &(b * a))
}

/// `ab + ba`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.require_same_dim(b, "anticommutator")?;
    Ok(&(a * b) + &(b * a))
}

/// Dimensions of a bipartite splitting `H1 (x) H2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteDims {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteDims {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument(
                "bipartite dimensions must be positive".into(),
            ));
        }
        Ok(Self { d1, d2 })
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    /// Composite basis index of `(i, k)` with `i` in the first factor.
    pub fn joint(&self, i: usize, k: usize) -> usize {
        i * self.d2 + k
    }

    pub fn swapped(&self) -> Self {
        Self {
            d1: self.d2,
            d2: self.d1,
        }
    }

    pub fn check(&self, op: &Operator, context: &'static str) -> Result<()> {
        if op.dim() != self.total() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.total(),
                found: op.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace over the selected factor.
pub fn partial_trace(rho: &Operator, dims: BipartiteDims, over: Subsystem) -> Result<Operator> {
    dims.check(rho, "partial_trace input")?;
    let (d1, d2) = (dims.d1, dims.d2);
    match over {
        Subsystem::First => Ok(Operator::from_fn(d2, |k, l| {
            (0..d1).map(|i| rho.entry(dims.joint(i, k), dims.joint(i, l))).sum()
        })),
        Subsystem::Second => Ok(Operator::from_fn(d1, |i, j| {
            (0..d2).map(|k| rho.entry(dims.joint(i, k), dims.joint(j, k))).sum()
        })),
    }
}

/// Unitary permutation mapping `H1 (x) H2` onto `H2 (x) H1`.
pub fn swap_operator(dims: BipartiteDims) -> Operator {
    let mut s = Operator::zeros(dims.total());
    for i in 0..dims.d1 {
        for k in 0..dims.d2 {
            s.set_entry(dims.swapped().joint(k, i), dims.joint(i, k), C64::new(1.0, 0.0));
        }
    }
    s
}

/// One degenerate eigenvalue cluster of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct SpectralCluster {
    pub eigenvalue: f64,
    pub projector: Operator,
}

/// Eigendecomposition with near-degenerate eigenvalues merged into clusters,
/// sorted by ascending eigenvalue.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub clusters: Vec<SpectralCluster>,
    pub source_dim: usize,
}

impl SpectralDecomposition {
    /// `sum_lambda lambda * P_lambda`.
    pub fn reconstruct(&self) -> Operator {
        let mut out = Operator::zeros(self.source_dim);
        for c in &self.clusters {
            out = &out + &c.projector.scale(C64::new(c.eigenvalue, 0.0));
        }
        out
    }

    /// `sum_lambda P_lambda B P_lambda`.
    pub fn pinch(&self, b: &Operator) -> Result<Operator> {
        if b.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                context: "pinching input",
                expected: self.source_dim,
                found: b.dim(),
            });
        }
        let mut out = Operator::zeros(self.source_dim);
        for c in &self.clusters {
            out = &out + &(&(&c.projector * b) * &c.projector);
        }
        Ok(out)
    }
}

/// Default degeneracy threshold used when the caller has no better scale.
pub fn default_degeneracy_tol(a: &Operator) -> f64 {
    1e-8 * a.operator_norm().max(1.0)
}

/// Eigendecomposition of a Hermitian operator; eigenvalues closer than
/// `degeneracy_tol` are merged into a single cluster projector.
pub fn hermitian_spectral(a: &Operator, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    let norm = a.frobenius_norm();
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NotHermitian {
            deviation: deviation / norm.max(1.0),
        });
    }
    let dim = a.dim();
    // Symmetrize away float-level asymmetry before calling the eigensolver.
    let sym = (a.matrix() + a.matrix().adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut clusters: Vec<SpectralCluster> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>, clusters: &mut Vec<SpectralCluster>| {
        if members.is_empty() {
            return;
        }
        let mean: f64 =
            members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / members.len() as f64;
        let mut proj = DMatrix::<C64>::zeros(dim, dim);
        for &i in members.iter() {
            let v = eig.eigenvectors.column(i);
            proj += &v * v.adjoint();
        }
        clusters.push(SpectralCluster {
            eigenvalue: mean,
            projector: Operator { mat: proj, label: None },
        });
        members.clear();
    };

    for &i in &order {
        if let Some(&last) = members.last() {
            if (eig.eigenvalues[i] - eig.eigenvalues[last]).abs() > degeneracy_tol {
                flush(&mut members, &mut clusters);
            }
        }
        members.push(i);
    }
    flush(&mut members, &mut clusters);

    Ok(SpectralDecomposition {
        clusters,
        source_dim: dim,
    })
}

/// `exp(-i h dt)` for Hermitian `h`, via the spectral decomposition.
pub fn hermitian_evolution(h: &Operator, dt: f64) -> Result<Operator> {
    let spec = hermitian_spectral(h, default_degeneracy_tol(h))?;
    let mut out = Operator::zeros(h.dim());
    for c in &spec.clusters {
        let phase = C64::from_polar(1.0, -c.eigenvalue * dt);
        out = &out + &c.projector.scale(phase);
    }
    Ok(out)
}

/// Pauli matrices, used throughout the tests and the signalling benchmark.
pub fn pauli_x() -> Operator {
    Operator::from_row_major(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::from_row_major(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]).unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::from_row_major(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]).unwrap()
}

pub fn hadamard() -> Operator {
    let h = 1.0 / 2.0_f64.sqrt();
    Operator::from_row_major(2, &[(h, 0.0), (h, 0.0), (h, 0.0), (-h, 0.0)]).unwrap()
}

/// CNOT with the control in the first factor, in the global index convention.
pub fn cnot() -> Operator {
    let mut u = Operator::zeros(4);
    let one = C64::new(1.0, 0.0);
    u.set_entry(0, 0, one);
    u.set_entry(1, 1, one);
    u.set_entry(2, 3, one);
    u.set_entry(3, 2, one);
    u
}
