//! Conditions (C) and (MC), the block/dilation criterion, the constructive
//! tensor factorization of a bipartite unitary, an independent
//! operator-Schmidt oracle, and the covariance reordering identity for
//! factorized dynamics.

use crate::error::{Error, Result};
use crate::op::{
    hermitian_evolution, partial_trace, tensor_product, BipartiteDims, Operator, Subsystem, C64,
};
use crate::qm::{
    apply_channel, lift_to_first, random_channel_from,
    random_density_from, random_hermitian_from, DensityMatrix, KrausChannel, Observable,
};
use crate::rng::substream;

/// Default relative tolerance for the analytic block criterion.
pub const ANALYTIC_TOL: f64 = 1e-8;

/// Default tolerance for the sampled marginal comparisons.
pub const SAMPLED_TOL: f64 = 1e-7;

/// Unitarity precondition tolerance (scaled by sqrt(dim) internally).
pub const UNITARY_TOL: f64 = 1e-9;

/// Block form of a bipartite unitary: blocks[k][l] = (I (x) <k|) U (I (x) |l>).
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub dims: BipartiteDims,
    pub blocks: Vec<Vec<Operator>>,
}

impl BlockDecomposition {
    /// Reassembles sum_{k,l} blocks[k][l] (x) |k><l|.
    pub fn reassemble(&self) -> Operator {
        let d2 = self.dims.d2;
        Operator::from_fn(self.dims.total(), |row, col| {
            let (i, k) = (row / d2, row % d2);
            let (j, l) = (col / d2, col % d2);
            self.blocks[k][l].entry(i, j)
        })
    }
}

/// Decomposes a unitary on H1 (x) H2 into its d2 x d2 grid of H1 blocks.
pub fn block_decompose(u: &Operator, dims: BipartiteDims) -> Result<BlockDecomposition> {
    dims.check(u, "block_decompose input")?;
    u.require_unitary(UNITARY_TOL)?;
    let (d1, d2) = (dims.d1, dims.d2);
    let blocks = (0..d2)
        .map(|k| {
            (0..d2)
                .map(|l| {
                    Operator::from_fn(d1, |i, j| u.entry(dims.joint(i, k), dims.joint(j, l)))
                })
                .collect()
        })
        .collect();
    Ok(BlockDecomposition { dims, blocks })
}

/// The dilation data of Theorem-style factorization: for each block pair,
/// the identity coefficient of B_{k'l'}^dag B_{kl} and the residual of that
/// multiple-of-identity claim.
#[derive(Clone, Debug)]
pub struct LambdaTensor {
    pub dims: BipartiteDims,
    values: Vec<C64>,
    residuals: Vec<f64>,
}

impl LambdaTensor {
    fn index(&self, k: usize, kp: usize, l: usize, lp: usize) -> usize {
        let d2 = self.dims.d2;
        ((k * d2 + kp) * d2 + l) * d2 + lp
    }

    /// tr(blocks[k'][l']^dag blocks[k][l]) / d1.
    pub fn value(&self, k: usize, kp: usize, l: usize, lp: usize) -> C64 {
        self.values[self.index(k, kp, l, lp)]
    }

    /// Frobenius norm of blocks[k'][l']^dag blocks[k][l] - value * I.
    pub fn residual(&self, k: usize, kp: usize, l: usize, lp: usize) -> f64 {
        self.residuals[self.index(k, kp, l, lp)]
    }

    /// The largest residual and the index tuple attaining it.
    pub fn max_residual(&self) -> ((usize, usize, usize, usize), f64) {
        let d2 = self.dims.d2;
        let mut best = ((0, 0, 0, 0), f64::NEG_INFINITY);
        for k in 0..d2 {
            for kp in 0..d2 {
                for l in 0..d2 {
                    for lp in 0..d2 {
                        let r = self.residual(k, kp, l, lp);
                        if r > best.1 {
                            best = ((k, kp, l, lp), r);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Computes the lambda tensor of a block decomposition.
pub fn lambda_tensor(bd: &BlockDecomposition) -> LambdaTensor {
    let (d1, d2) = (bd.dims.d1, bd.dims.d2);
    let mut values = Vec::with_capacity(d2 * d2 * d2 * d2);
    let mut residuals = Vec::with_capacity(d2 * d2 * d2 * d2);
    for k in 0..d2 {
        for kp in 0..d2 {
            for l in 0..d2 {
                for lp in 0..d2 {
                    let prod = &bd.blocks[kp][lp].dagger() * &bd.blocks[k][l];
                    let lambda = prod.trace() / C64::new(d1 as f64, 0.0);
                    let residual = (&prod - &Operator::identity(d1).scale(lambda)).frobenius_norm();
                    values.push(lambda);
                    residuals.push(residual);
                }
            }
        }
    }
    LambdaTensor {
        dims: bd.dims,
        values,
        residuals,
    }
}

/// Verdict of the analytic (MC) criterion.
#[derive(Clone, Debug)]
pub enum McVerdict {
    Holds { max_residual: f64 },
    Violated {
        witness: (usize, usize, usize, usize),
        residual: f64,
    },
}

impl McVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, McVerdict::Holds { .. })
    }
}

/// Analytic check of (MC): every block pair must pass the dilation test,
/// i.e. all lambda-tensor residuals must vanish within tol * ||u||_F.
pub fn check_mc_analytic(u: &Operator, dims: BipartiteDims, tol: f64) -> Result<McVerdict> {
    let bd = block_decompose(u, dims)?;
    let lt = lambda_tensor(&bd);
    let (witness, residual) = lt.max_residual();
    if residual <= tol * u.frobenius_norm() {
        Ok(McVerdict::Holds {
            max_residual: residual,
        })
    } else {
        Ok(McVerdict::Violated { witness, residual })
    }
}

/// Verdict of a sampled marginal comparison.
#[derive(Clone, Debug)]
pub enum SampledVerdict {
    Holds { max_deviation: f64 },
    Violated {
        sample: u64,
        deviation: f64,
        witness_state: DensityMatrix,
        witness_observable: Option<Observable>,
    },
}

impl SampledVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SampledVerdict::Holds { .. })
    }

    pub fn deviation(&self) -> f64 {
        match self {
            SampledVerdict::Holds { max_deviation } => *max_deviation,
            SampledVerdict::Violated { deviation, .. } => *deviation,
        }
    }
}

fn bob_marginal(u: &Operator, dims: BipartiteDims, rho: &Operator) -> Result<Operator> {
    let evolved = &(u * rho) * &u.dagger();
    partial_trace(&evolved, dims, Subsystem::First)
}

/// Deviation of Bob's marginal caused by a nonselective Alice measurement
/// before the joint unitary. This is the direct two-sided evaluation of (MC).
pub fn mc_deviation(
    u: &Operator,
    dims: BipartiteDims,
    rho: &DensityMatrix,
    alice: &Observable,
) -> Result<f64> {
    dims.check(u, "mc_deviation unitary")?;
    if alice.dim() != dims.d1 {
        return Err(Error::DimensionMismatch {
            context: "Alice observable",
            expected: dims.d1,
            found: alice.dim(),
        });
    }
    let plain = bob_marginal(u, dims, rho.op())?;
    let lifted = lift_to_first(&KrausChannel::from_projectors(alice.spectral())?, dims)?;
    let measured = apply_channel(&lifted, rho)?;
    let after = bob_marginal(u, dims, measured.op())?;
    Ok((&plain - &after).frobenius_norm())
}

/// Sampled check of (MC) over random (state, Alice observable) pairs; one
/// RNG substream per sample index.
pub fn check_mc_sampled(
    u: &Operator,
    dims: BipartiteDims,
    n_samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SampledVerdict> {
    u.require_unitary(UNITARY_TOL)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("nSamples must be >= 1".into()));
    }
    let mut max_deviation: f64 = 0.0;
    for sample in 0..n_samples {
        let mut rng = substream(seed, sample);
        let rho = random_density_from(dims.total(), &mut rng);
        let alice = random_hermitian_from(dims.d1, &mut rng);
        let deviation = mc_deviation(u, dims, &rho, &alice)?;
        if deviation > tol {
            return Ok(SampledVerdict::Violated {
                sample,
                deviation,
                witness_state: rho,
                witness_observable: Some(alice),
            });
        }
        max_deviation = max_deviation.max(deviation);
    }
    Ok(SampledVerdict::Holds { max_deviation })
}

/// Deviation of Bob's marginal caused by an arbitrary Alice channel: the
/// general condition (C) for one (channel, state) pair.
pub fn c_deviation(
    u: &Operator,
    dims: BipartiteDims,
    psi: &KrausChannel,
    rho: &DensityMatrix,
) -> Result<f64> {
    let plain = bob_marginal(u, dims, rho.op())?;
    let lifted = lift_to_first(psi, dims)?;
    let shifted = apply_channel(&lifted, rho)?;
    let after = bob_marginal(u, dims, shifted.op())?;
    Ok((&plain - &after).frobenius_norm())
}

/// Check of (C) over every supplied (channel, state) pair; when either list
/// is empty, `n_samples` random draws fill it in (seeded substreams).
pub fn check_c_sampled(
    u: &Operator,
    dims: BipartiteDims,
    channels: &[KrausChannel],
    states: &[DensityMatrix],
    n_samples: u64,
    seed: u64,
    tol: f64,
) -> Result<SampledVerdict> {
    dims.check(u, "check_c_sampled unitary")?;
    u.require_unitary(UNITARY_TOL)?;
    if (channels.is_empty() || states.is_empty()) && n_samples == 0 {
        return Err(Error::InvalidArgument(
            "nSamples must be >= 1 when no channels or states are supplied".into(),
        ));
    }
    let mut own_channels = Vec::new();
    let mut own_states = Vec::new();
    if channels.is_empty() {
        for i in 0..n_samples {
            own_channels.push(random_channel_from(dims.d1, 2, &mut substream(seed, 2 * i)));
        }
    }
    if states.is_empty() {
        for i in 0..n_samples {
            own_states.push(random_density_from(
                dims.total(),
                &mut substream(seed, 2 * i + 1),
            ));
        }
    }
    let channels = if channels.is_empty() { &own_channels[..] } else { channels };
    let states = if states.is_empty() { &own_states[..] } else { states };

    let mut max_deviation: f64 = 0.0;
    let mut sample: u64 = 0;
    for psi in channels {
        if psi.dim() != dims.d1 {
            return Err(Error::DimensionMismatch {
                context: "check_c_sampled channel",
                expected: dims.d1,
                found: psi.dim(),
            });
        }
        for rho in states {
            let deviation = c_deviation(u, dims, psi, rho)?;
            if deviation > tol {
                return Ok(SampledVerdict::Violated {
                    sample,
                    deviation,
                    witness_state: rho.clone(),
                    witness_observable: None,
                });
            }
            max_deviation = max_deviation.max(deviation);
            sample += 1;
        }
    }
    Ok(SampledVerdict::Holds { max_deviation })
}

/// Outcome of the constructive factorization.
#[derive(Clone, Debug)]
pub enum FactorizationResult {
    Product {
        u1: Operator,
        u2: Operator,
        phase: f64,
        reconstruction_error: f64,
    },
    NotProduct {
        witness: (usize, usize, usize, usize),
        residual: f64,
    },
}

impl FactorizationResult {
    pub fn is_product(&self) -> bool {
        matches!(self, FactorizationResult::Product { .. })
    }
}

/// Constructive factorization: if the analytic criterion holds, extracts
/// U1 from the best-conditioned diagonal block and U2 from the overlaps of
/// the remaining blocks, with a fixed global-phase convention.
pub fn factorize_unitary(
    u: &Operator,
    dims: BipartiteDims,
    tol: f64,
) -> Result<FactorizationResult> {
    let bd = block_decompose(u, dims)?;
    let lt = lambda_tensor(&bd);
    let (witness, residual) = lt.max_residual();
    if residual > ANALYTIC_TOL * u.frobenius_norm() {
        return Ok(FactorizationResult::NotProduct { witness, residual });
    }

    let (d1, d2) = (dims.d1, dims.d2);
    // Pivot: diagonal entry of largest magnitude, for conditioning of B/sqrt(lambda).
    let (mut k0, mut l0, mut best) = (0usize, 0usize, -1.0f64);
    for k in 0..d2 {
        for l in 0..d2 {
            let mag = lt.value(k, k, l, l).norm();
            if mag > best {
                best = mag;
                k0 = k;
                l0 = l;
            }
        }
    }
    let lambda0 = lt.value(k0, k0, l0, l0);
    let sqrt_lambda0 = lambda0.sqrt();
    let mut u1 = bd.blocks[k0][l0].scale(C64::new(1.0, 0.0) / sqrt_lambda0);

    let mut u2 = Operator::from_fn(d2, |k, l| {
        (&u1.dagger() * &bd.blocks[k][l]).trace() / C64::new(d1 as f64, 0.0)
    });

    // Global phase convention: largest-magnitude entry of u1 real positive.
    let mut pivot = C64::new(0.0, 0.0);
    for i in 0..d1 {
        for j in 0..d1 {
            if u1.entry(i, j).norm() > pivot.norm() {
                pivot = u1.entry(i, j);
            }
        }
    }
    let alpha = pivot / pivot.norm();
    u1 = u1.scale(alpha.conj());
    u2 = u2.scale(alpha);

    // Residual global phase of the reconstruction.
    let product = tensor_product(&u1, &u2);
    let overlap = (&product.dagger() * u).trace();
    let phase = overlap.arg();
    let reconstruction_error =
        (u - &product.scale(C64::from_polar(1.0, phase))).frobenius_norm();

    let threshold = tol * (dims.total() as f64).sqrt();
    if reconstruction_error > threshold
        || u1.unitarity_deviation() > 1e-9 * (d1 as f64).sqrt().max(1.0) * 10.0
        || u2.unitarity_deviation() > 1e-9 * (d2 as f64).sqrt().max(1.0) * 10.0
    {
        return Err(Error::InternalInconsistency(format!(
            "dilation criterion holds (max residual {residual:.3e}) but reconstruction \
             error is {reconstruction_error:.3e} against threshold {threshold:.3e}"
        )));
    }
    Ok(FactorizationResult::Product {
        u1,
        u2,
        phase,
        reconstruction_error,
    })
}

/// Operator-Schmidt rank via the reshuffled singular value decomposition.
/// Rank 1 is equivalent to tensor-product form; this is the independent
/// oracle for the factorization path.
pub fn operator_schmidt_rank(
    u: &Operator,
    dims: BipartiteDims,
    tol: f64,
) -> Result<(usize, Vec<f64>)> {
    dims.check(u, "operator_schmidt_rank input")?;
    let (d1, d2) = (dims.d1, dims.d2);
    let m = nalgebra::DMatrix::<C64>::from_fn(d1 * d1, d2 * d2, |row, col| {
        let (i, ip) = (row / d1, row % d1);
        let (k, l) = (col / d2, col % d2);
        u.entry(dims.joint(i, k), dims.joint(ip, l))
    });
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tol * top).count();
    Ok((rank, sv))
}

/// Verdict of the covariance reordering identity.
#[derive(Clone, Debug)]
pub enum CovarianceVerdict {
    Consistent {
        deviation: f64,
        composition_residual: f64,
    },
    Inconsistent {
        deviation: f64,
        composition_residual: f64,
    },
}

impl CovarianceVerdict {
    pub fn consistent(&self) -> bool {
        matches!(self, CovarianceVerdict::Consistent { .. })
    }
}

fn covariance_inner(
    evolution: impl Fn(f64, f64) -> Result<Operator>,
    dims: BipartiteDims,
    psi: &KrausChannel,
    rho: &DensityMatrix,
    times: (f64, f64, f64),
    tol: f64,
) -> Result<CovarianceVerdict> {
    let (t0, t1, t2) = times;
    if !(t0 <= t1 && t1 <= t2) {
        return Err(Error::InvalidArgument(
            "times must satisfy t0 <= t1 <= t2".into(),
        ));
    }
    if rho.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            context: "covariance state",
            expected: dims.total(),
            found: rho.dim(),
        });
    }
    let u01 = evolution(t0, t1)?;
    let u12 = evolution(t1, t2)?;
    let u02 = evolution(t0, t2)?;
    let composition_residual = (&u02 - &(&u12 * &u01)).frobenius_norm();

    // Left side: free evolution all the way, then the local operation.
    let evolved = &(&u02 * rho.op()) * &u02.dagger();
    let lifted = lift_to_first(psi, dims)?;
    let end_state = apply_channel(&lifted, &DensityMatrix::new(evolved)?)?;
    let lhs = partial_trace(end_state.op(), dims, Subsystem::First)?;

    // Right side: evolve to t1, apply the operation, evolve to t2.
    let mid = DensityMatrix::new(&(&u01 * rho.op()) * &u01.dagger())?;
    let mid = apply_channel(&lifted, &mid)?;
    let late = &(&u12 * mid.op()) * &u12.dagger();
    let rhs = partial_trace(&late, dims, Subsystem::First)?;

    let deviation = (&lhs - &rhs).frobenius_norm();
    if deviation <= tol && composition_residual <= 1e-9 {
        Ok(CovarianceVerdict::Consistent {
            deviation,
            composition_residual,
        })
    } else {
        Ok(CovarianceVerdict::Inconsistent {
            deviation,
            composition_residual,
        })
    }
}

/// Appendix-style reordering identity for factorized dynamics
/// U_{a,b} = exp(-i h1 (b-a)) (x) exp(-i h2 (b-a)): applying a local Alice
/// operation at t1 or at t2 leaves Bob's marginal at t2 unchanged.
pub fn check_covariance_reordering(
    h1: &Observable,
    h2: &Observable,
    psi: &KrausChannel,
    rho: &DensityMatrix,
    times: (f64, f64, f64),
    tol: f64,
) -> Result<CovarianceVerdict> {
    let dims = BipartiteDims::new(h1.dim(), h2.dim())?;
    covariance_inner(
        |a, b| {
            Ok(tensor_product(
                &hermitian_evolution(h1.op(), b - a)?,
                &hermitian_evolution(h2.op(), b - a)?,
            ))
        },
        dims,
        psi,
        rho,
        times,
        tol,
    )
}

/// Same check with an arbitrary joint Hamiltonian; non-factorized generators
/// supply the counterexample showing the identity needs factorized dynamics.
pub fn check_covariance_reordering_joint(
    h: &Observable,
    dims: BipartiteDims,
    psi: &KrausChannel,
    rho: &DensityMatrix,
    times: (f64, f64, f64),
    tol: f64,
) -> Result<CovarianceVerdict> {
    if h.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            context: "joint Hamiltonian",
            expected: dims.total(),
            found: h.dim(),
        });
    }
    covariance_inner(
        |a, b| hermitian_evolution(h.op(), b - a),
        dims,
        psi,
        rho,
        times,
        tol,
    )
}
