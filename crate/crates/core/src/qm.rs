//! Density matrices, observables, CPTP channels, Lüders nonselective
//! measurement, and the random ensembles used by the sampling checkers.

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::op::{
    default_degeneracy_tol, hermitian_spectral, tensor_product, BipartiteDims, Operator,
    SpectralDecomposition, C64,
};
use crate::rng::{complex_gaussian, substream};

/// Positivity slack on the smallest eigenvalue: Gaussian constructions are
/// positive analytically but eigensolvers return tiny negatives.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let norm = op.frobenius_norm().max(1.0);
        if op.hermiticity_deviation() > 1e-10 * norm {
            return Err(Error::NotHermitian {
                deviation: op.hermiticity_deviation() / norm,
            });
        }
        let trace = op.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let spec = hermitian_spectral(&op, 0.0)?;
        let min_eig = spec
            .clusters
            .iter()
            .map(|c| c.eigenvalue)
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { op })
    }

    /// Rank-one state from a (not necessarily normalized) vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let dim = amplitudes.len();
        let op = Operator::from_fn(dim, |i, j| amplitudes[i] * amplitudes[j].conj() / norm_sq);
        Self::new(op)
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// The Bell state (|00> + |11>) / sqrt(2) on two qubits.
pub fn bell_phi_plus() -> DensityMatrix {
    let h = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    DensityMatrix::pure(&[h, zero, zero, h]).expect("Bell state is a valid pure state")
}

/// CPTP map given by a nonempty list of equal-dimension Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus: Vec<Operator>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<Operator>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let dim = first.dim();
        let mut sum = Operator::zeros(dim);
        for k in &kraus {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator list",
                    expected: dim,
                    found: k.dim(),
                });
            }
            sum = &sum + &(&k.dagger() * k);
        }
        let deviation = (&sum - &Operator::identity(dim)).frobenius_norm();
        if deviation > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving: deviation {deviation:.3e}"
            )));
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![Operator::identity(dim)],
        }
    }

    /// The Lüders channel of a spectral decomposition: Kraus list {P_lambda}.
    pub fn from_projectors(spec: &SpectralDecomposition) -> Result<Self> {
        Self::new(spec.clusters.iter().map(|c| c.projector.clone()).collect())
    }

    pub fn kraus(&self) -> &[Operator] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }
}

/// Hermitian operator together with its clustered spectral decomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    op: Operator,
    spectral: SpectralDecomposition,
}

impl Observable {
    pub fn new(op: Operator) -> Result<Self> {
        let tol = default_degeneracy_tol(&op);
        Self::with_degeneracy_tol(op, tol)
    }

    pub fn with_degeneracy_tol(op: Operator, degeneracy_tol: f64) -> Result<Self> {
        let spectral = hermitian_spectral(&op, degeneracy_tol)?;
        Ok(Self { op, spectral })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// `sum_k K rho K^dag`.
pub fn apply_channel(psi: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply_channel",
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    let mut out = Operator::zeros(rho.dim());
    for k in psi.kraus() {
        out = &out + &(&(k * rho.op()) * &k.dagger());
    }
    DensityMatrix::new(out)
}

/// Lifts a channel on the first factor to the joint space: K -> K (x) I.
pub fn lift_to_first(psi: &KrausChannel, dims: BipartiteDims) -> Result<KrausChannel> {
    if psi.dim() != dims.d1 {
        return Err(Error::DimensionMismatch {
            context: "lift_to_first",
            expected: dims.d1,
            found: psi.dim(),
        });
    }
    let id2 = Operator::identity(dims.d2);
    KrausChannel::new(
        psi.kraus()
            .iter()
            .map(|k| tensor_product(k, &id2))
            .collect(),
    )
}

/// Lüders nonselective measurement: rho -> sum_x P_x rho P_x.
pub fn nonselective_measurement(obs: &Observable, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "nonselective_measurement",
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    DensityMatrix::new(obs.spectral().pinch(rho.op())?)
}

fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng))
}

/// Random density matrix: normalized G G^dag with G standard complex Gaussian.
pub fn random_density_from(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let p = &g * g.adjoint();
    let trace = p.trace();
    let op = Operator::from_matrix(p / trace).expect("square by construction");
    DensityMatrix::new(op).expect("Wishart construction is a valid density matrix")
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phase of each
/// diagonal R entry divided out of the corresponding column.
pub fn random_unitary_from(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] /= phase;
        }
    }
    Operator::from_matrix(q).expect("square by construction")
}

/// Random Hermitian observable: (G + G^dag) / 2 of a Ginibre matrix.
pub fn random_hermitian_from(dim: usize, rng: &mut ChaCha8Rng) -> Observable {
    let g = ginibre(dim, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let op = Operator::from_matrix(h).expect("square by construction");
    Observable::new(op).expect("Hermitian by construction")
}

/// Random CPTP channel with `n_kraus` Kraus operators, via Ginibre matrices
/// normalized by the inverse square root of their quadratic sum.
pub fn random_channel_from(dim: usize, n_kraus: usize, rng: &mut ChaCha8Rng) -> KrausChannel {
    assert!(n_kraus >= 1, "need at least one Kraus operator");
    let gs: Vec<DMatrix<C64>> = (0..n_kraus).map(|_| ginibre(dim, rng)).collect();
    let mut s = DMatrix::<C64>::zeros(dim, dim);
    for g in &gs {
        s += g.adjoint() * g;
    }
    let s_op = Operator::from_matrix(s).expect("square by construction");
    let spec = hermitian_spectral(&s_op, 0.0).expect("Hermitian by construction");
    let mut inv_sqrt = Operator::zeros(dim);
    for c in &spec.clusters {
        inv_sqrt = &inv_sqrt + &c.projector.scale(C64::new(1.0 / c.eigenvalue.sqrt(), 0.0));
    }
    let kraus = gs
        .into_iter()
        .map(|g| {
            let k = Operator::from_matrix(g).expect("square by construction");
            &k * &inv_sqrt
        })
        .collect();
    KrausChannel::new(kraus).expect("normalized by construction")
}

/// Seeded wrappers (sample index 0 of the seed's stream family).
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    random_density_from(dim, &mut substream(seed, 0))
}

pub fn random_unitary(dim: usize, seed: u64) -> Operator {
    random_unitary_from(dim, &mut substream(seed, 0))
}

pub fn random_hermitian(dim: usize, seed: u64) -> Observable {
    random_hermitian_from(dim, &mut substream(seed, 0))
}

pub fn random_channel(dim: usize, n_kraus: usize, seed: u64) -> KrausChannel {
    random_channel_from(dim, n_kraus, &mut substream(seed, 0))
}
