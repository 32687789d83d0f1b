//! Signalling protocol: Alice either does nothing or performs a nonselective
//! measurement, the joint unitary runs, and Bob reads an observable. Exact
//! marginal distributions, total variation distance, and a seeded Monte Carlo
//! layer quantify how well Bob can recover Alice's bit.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nosignal::UNITARY_TOL;
use crate::op::{partial_trace, BipartiteDims, Operator, Subsystem};
use crate::qm::{
    apply_channel, lift_to_first, DensityMatrix, KrausChannel, Observable,
};
use crate::rng::substream;

/// Full specification of one protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    pub dims: BipartiteDims,
    pub initial_state: DensityMatrix,
    pub alice_observable: Observable,
    pub joint_unitary: Operator,
    pub bob_observable: Observable,
    pub shots: u64,
    pub seed: u64,
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        self.dims.check(&self.joint_unitary, "protocol joint unitary")?;
        self.joint_unitary.require_unitary(UNITARY_TOL)?;
        if self.initial_state.dim() != self.dims.total() {
            return Err(Error::DimensionMismatch {
                context: "protocol initial state",
                expected: self.dims.total(),
                found: self.initial_state.dim(),
            });
        }
        if self.alice_observable.dim() != self.dims.d1 {
            return Err(Error::DimensionMismatch {
                context: "protocol Alice observable",
                expected: self.dims.d1,
                found: self.alice_observable.dim(),
            });
        }
        if self.bob_observable.dim() != self.dims.d2 {
            return Err(Error::DimensionMismatch {
                context: "protocol Bob observable",
                expected: self.dims.d2,
                found: self.bob_observable.dim(),
            });
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        Ok(())
    }
}

/// Report of one simulated protocol. The shots-for-error entries use the
/// two-sample discrimination bound shots >= 2 ln(2/delta) / tv^2.
#[derive(Clone, Debug, Serialize)]
pub struct SignalReport {
    pub bob_dist_no_measure: Vec<f64>,
    pub bob_dist_measure: Vec<f64>,
    pub tv_exact: f64,
    pub tv_empirical: f64,
    pub shots: u64,
    pub seed: u64,
    pub shots_for_error: Vec<ShotsForError>,
    pub bound: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShotsForError {
    pub epsilon: f64,
    pub delta: f64,
    /// None means unbounded: the exact distributions coincide and no number
    /// of shots distinguishes them.
    pub shots: Option<u64>,
}

/// Half the l1 distance between two distributions of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn cluster_probabilities(bob_state: &Operator, bob: &Observable) -> Vec<f64> {
    bob.spectral()
        .clusters
        .iter()
        .map(|c| (&c.projector * bob_state).trace().re.max(0.0))
        .collect()
}

/// Exact Bob outcome distributions for the two branches: `p0` when Alice does
/// nothing, `p1` after her nonselective measurement. Outcomes are indexed by
/// the spectral clusters of Bob's observable, ascending eigenvalue.
pub fn bob_marginal_distributions(spec: &ProtocolSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let u = &spec.joint_unitary;
    let marginal = |rho: &Operator| -> Result<Operator> {
        let evolved = &(u * rho) * &u.dagger();
        partial_trace(&evolved, spec.dims, Subsystem::First)
    };

    let p0 = cluster_probabilities(&marginal(spec.initial_state.op())?, &spec.bob_observable);

    let luders = KrausChannel::from_projectors(spec.alice_observable.spectral())?;
    let lifted = lift_to_first(&luders, spec.dims)?;
    let measured = apply_channel(&lifted, &spec.initial_state)?;
    let p1 = cluster_probabilities(&marginal(measured.op())?, &spec.bob_observable);

    for p in [&p0, &p1] {
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InternalInconsistency(format!(
                "Bob distribution sums to {total}, expected 1"
            )));
        }
    }
    Ok((p0, p1))
}

fn sample_counts(p: &[f64], shots: u64, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<u64> {
    // Inverse CDF on the exact distribution.
    let mut counts = vec![0u64; p.len()];
    for _ in 0..shots {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut idx = p.len() - 1;
        for (i, &pi) in p.iter().enumerate() {
            acc += pi;
            if r < acc {
                idx = i;
                break;
            }
        }
        counts[idx] += 1;
    }
    counts
}

/// Default (epsilon, delta) pairs reported by `simulate_protocol`.
pub const DEFAULT_ERROR_TARGETS: [(f64, f64); 3] = [(0.01, 0.01), (0.01, 0.001), (0.05, 0.001)];

/// Runs the protocol: exact distributions, `shots` seeded Monte Carlo draws
/// per branch, and the shots-for-error table.
pub fn simulate_protocol(spec: &ProtocolSpec) -> Result<SignalReport> {
    let (p0, p1) = bob_marginal_distributions(spec)?;
    let tv_exact = total_variation(&p0, &p1);

    // Branch 0 samples from substream 0, branch 1 from substream 1.
    let c0 = sample_counts(&p0, spec.shots, &mut substream(spec.seed, 0));
    let c1 = sample_counts(&p1, spec.shots, &mut substream(spec.seed, 1));
    let f0: Vec<f64> = c0.iter().map(|&c| c as f64 / spec.shots as f64).collect();
    let f1: Vec<f64> = c1.iter().map(|&c| c as f64 / spec.shots as f64).collect();
    let tv_empirical = total_variation(&f0, &f1);

    let shots_for_error = DEFAULT_ERROR_TARGETS
        .iter()
        .map(|&(epsilon, delta)| ShotsForError {
            epsilon,
            delta,
            shots: if tv_exact > 1e-10 {
                Some((2.0 * (2.0 / delta).ln() / (tv_exact * tv_exact)).ceil() as u64)
            } else {
                None
            },
        })
        .collect();

    Ok(SignalReport {
        bob_dist_no_measure: p0,
        bob_dist_measure: p1,
        tv_exact,
        tv_empirical,
        shots: spec.shots,
        seed: spec.seed,
        shots_for_error,
        bound: "two-sample discrimination: shots >= 2 ln(2/delta) / tv^2 \
                (Hoeffding, frequency threshold at tv/2)"
            .into(),
    })
}

/// The benchmark protocol: CNOT on a Bell pair, Alice measures sigma_x,
/// Bob reads sigma_z.
pub fn cnot_bell_benchmark(shots: u64, seed: u64) -> ProtocolSpec {
    ProtocolSpec {
        dims: BipartiteDims::new(2, 2).expect("static dims"),
        initial_state: crate::qm::bell_phi_plus(),
        alice_observable: Observable::new(crate::op::pauli_x()).expect("Pauli is Hermitian"),
        joint_unitary: crate::op::cnot(),
        bob_observable: Observable::new(crate::op::pauli_z()).expect("Pauli is Hermitian"),
        shots,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::{pauli_z, tensor_product};
    use crate::qm::random_unitary;

    #[test]
    fn cnot_bell_sigma_x_benchmark() {
        let spec = cnot_bell_benchmark(10_000, 7);
        let (p0, p1) = bob_marginal_distributions(&spec).unwrap();
        // Bob outcomes are ordered by ascending sigma_z eigenvalue, so the
        // +1 outcome (|0>) is index 1: p0 concentrates there.
        assert!(p0[0].abs() < 1e-12 && (p0[1] - 1.0).abs() < 1e-12);
        assert!((p1[0] - 0.5).abs() < 1e-12 && (p1[1] - 0.5).abs() < 1e-12);
        assert!((total_variation(&p0, &p1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cnot_bell_sigma_z_does_not_signal() {
        // The sigma_z / sigma_z observable pair happens not to signal through
        // CNOT on the Bell state; a single passing pair is not (MC).
        let mut spec = cnot_bell_benchmark(100, 7);
        spec.alice_observable = Observable::new(pauli_z()).unwrap();
        let (p0, p1) = bob_marginal_distributions(&spec).unwrap();
        assert!(total_variation(&p0, &p1) < 1e-12);
        assert!((p0[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorized_unitary_never_signals() {
        let mut spec = cnot_bell_benchmark(100, 9);
        spec.joint_unitary = tensor_product(&random_unitary(2, 31), &random_unitary(2, 32));
        let (p0, p1) = bob_marginal_distributions(&spec).unwrap();
        assert!(total_variation(&p0, &p1) < 1e-10);
        let report = simulate_protocol(&spec).unwrap();
        assert!(report.shots_for_error.iter().all(|e| e.shots.is_none()));
    }

    #[test]
    fn empirical_tv_concentrates() {
        let spec = cnot_bell_benchmark(10_000, 11);
        let report = simulate_protocol(&spec).unwrap();
        assert!((report.tv_empirical - 0.5).abs() <= 0.02);
        assert!(report.shots_for_error.iter().all(|e| e.shots.is_some()));
    }

    #[test]
    fn empirical_tv_scales_with_shots() {
        // Deviation from the exact value shrinks roughly like shots^-1/2;
        // averaged over seeds it must decrease across decades.
        let mut avg = Vec::new();
        for shots in [100u64, 1_000, 10_000] {
            let mut total = 0.0;
            for seed in 0..8 {
                let spec = cnot_bell_benchmark(shots, 50 + seed);
                let report = simulate_protocol(&spec).unwrap();
                total += (report.tv_empirical - report.tv_exact).abs();
            }
            avg.push(total / 8.0);
        }
        assert!(avg[0] > avg[1] && avg[1] > avg[2], "deviations {avg:?}");
    }

    #[test]
    fn same_seed_reproduces_report() {
        let spec = cnot_bell_benchmark(500, 13);
        let a = simulate_protocol(&spec).unwrap();
        let b = simulate_protocol(&spec).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn coarse_graining_never_increases_tv() {
        // Merge two Bob outcome bins and compare: data processing sanity.
        let spec = cnot_bell_benchmark(100, 17);
        let (p0, p1) = bob_marginal_distributions(&spec).unwrap();
        let merge = |p: &[f64]| vec![p[0] + p[1]];
        assert!(total_variation(&merge(&p0), &merge(&p1)) <= total_variation(&p0, &p1) + 1e-15);
    }
}
