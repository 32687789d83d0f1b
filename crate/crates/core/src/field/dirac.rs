//! Minimal 1+1-dimensional two-component Dirac mode model.
//!
//! Representation choice: gamma^0 = sigma_z, gamma^1 = i sigma_y, so
//! pslash = gamma^0 omega - gamma^1 k. Spinors u = (pslash + m) chi and
//! v = (pslash - m) chi are normalized to u^dag u = 2 omega, which pins the
//! equal-time anticommutator to the truncated delta
//! {psi_a(t,x), psi_b^dag(t,y)} = delta_ab (1/L) sum_n e^{i k_n (x-y)}.
//!
//! Sharp mode cutoffs reproduce that contract exactly but behave like a
//! Dirichlet kernel away from coincidence: the massless components of the
//! anticommutator do not decay pointwise as n_max grows. The triangular
//! window g_n = 1 - |n| / (n_max + 1) (Fejér weights, no new parameter)
//! restores pointwise decay and is used for all refinement statements.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::field::fock::{state_add, state_sub, FieldExpansion, Ladder, ModeSystem, Term};
use crate::field::{FieldClass, FieldModel, SpacetimePoint, Statistics};
use crate::op::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Sharp,
    Triangular,
}

pub type Spinor = [C64; 2];
pub type Kernel = Matrix2<C64>;

/// Two-component Dirac mode model in the periodic box.
#[derive(Clone, Copy, Debug)]
pub struct DiracModeModel {
    pub mass: f64,
    pub box_length: f64,
    pub n_max: i64,
    pub statistics: Statistics,
    pub window: Window,
}

impl DiracModeModel {
    pub fn new(mass: f64, box_length: f64, n_max: i64, window: Window) -> Result<Self> {
        if !(mass > 0.0) || !(box_length > 0.0) || n_max < 0 {
            return Err(Error::InvalidArgument(
                "Dirac model needs positive mass, box length and n_max >= 0".into(),
            ));
        }
        Ok(Self {
            mass,
            box_length,
            n_max,
            statistics: Statistics::Fermi,
            window,
        })
    }

    /// The excluded-statistics variant of Theorem-style case analysis:
    /// the same spinor structure quantized with commutators.
    pub fn bose_variant(mut self) -> Self {
        self.statistics = Statistics::Bose;
        self
    }

    pub fn mode_numbers(&self) -> impl Iterator<Item = i64> {
        -self.n_max..=self.n_max
    }

    pub fn momentum(&self, n: i64) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.box_length
    }

    pub fn frequency(&self, n: i64) -> f64 {
        let k = self.momentum(n);
        (k * k + self.mass * self.mass).sqrt()
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.n_max + 1) as usize
    }

    /// Window weight of mode n.
    pub fn weight(&self, n: i64) -> f64 {
        match self.window {
            Window::Sharp => 1.0,
            Window::Triangular => 1.0 - n.abs() as f64 / (self.n_max as f64 + 1.0),
        }
    }

    /// Positive- and negative-frequency spinors of mode n.
    pub fn spinors(&self, n: i64) -> (Spinor, Spinor) {
        let (w, k, m) = (self.frequency(n), self.momentum(n), self.mass);
        // pslash = gamma^0 w - gamma^1 k = [[w, -k], [k, -w]].
        let pslash = [[w, -k], [k, -w]];
        // u from (pslash + m) chi_0 (falling back to chi_1), v from
        // (pslash - m) chi_1 (falling back to chi_0); the fallbacks cover the
        // k = 0 mode where the preferred column vanishes.
        let u = spinor_from(&pslash, m, [0, 1]);
        let v = spinor_from(&pslash, -m, [1, 0]);
        let norm = (2.0 * w).sqrt();
        (rescale(u, norm), rescale(v, norm))
    }

    fn windowed_coeff(&self, n: i64) -> f64 {
        self.weight(n) / (2.0 * self.box_length * self.frequency(n))
    }

    /// The 2x2 c-number kernel of the statistics-dictated bracket of
    /// psi(x) with psi^dag(y):
    ///   Fermi: sum_n c_n (u u^dag e^{-i phi} + v v^dag e^{+i phi}),
    ///   Bose:  sum_n c_n (u u^dag e^{-i phi} - v v^dag e^{+i phi}),
    /// with phi = omega dt - k dx. Both are exact operator identities on the
    /// truncated Fock space (the bracket is a multiple of the identity), so
    /// the kernel is the full operator content of the bracket.
    pub fn bracket_kernel(&self, x: &SpacetimePoint, y: &SpacetimePoint) -> Kernel {
        let sep = x.sub(y);
        let mut total = Kernel::zeros();
        for n in self.mode_numbers() {
            let (u, v) = self.spinors(n);
            let c = self.windowed_coeff(n);
            let phase =
                C64::from_polar(1.0, -(self.frequency(n) * sep.t - self.momentum(n) * sep.x));
            let sign = match self.statistics {
                Statistics::Fermi => 1.0,
                Statistics::Bose => -1.0,
            };
            for a in 0..2 {
                for b in 0..2 {
                    total[(a, b)] += c
                        * (u[a] * u[b].conj() * phase + sign * v[a] * v[b].conj() * phase.conj());
                }
            }
        }
        total
    }

    /// Mode lattice for the charged field: particle modes then antiparticles.
    pub fn mode_system(&self) -> ModeSystem {
        ModeSystem {
            mode_count: 2 * self.mode_count(),
            local_dim: 2,
            fermi: matches!(self.statistics, Statistics::Fermi),
        }
    }

    /// Charged field component psi_comp(point) as a ladder expansion.
    pub fn expansion(&self, comp: usize, point: &SpacetimePoint, dagger: bool) -> FieldExpansion {
        assert!(comp < 2, "two-component spinor");
        let mode_count = self.mode_count();
        let mut terms = Vec::with_capacity(2 * mode_count);
        for (i, n) in self.mode_numbers().enumerate() {
            let (u, v) = self.spinors(n);
            let c = (self.windowed_coeff(n)).sqrt();
            // Split the windowed 1/(2 L omega) weight evenly between the two
            // ladder coefficients so quadratic kernels come out windowed once.
            let phase =
                C64::from_polar(1.0, -(self.frequency(n) * point.t - self.momentum(n) * point.x));
            terms.push(Term {
                coeff: c * u[comp] * phase,
                mode: i,
                ladder: Ladder::Lower,
            });
            terms.push(Term {
                coeff: c * v[comp] * phase.conj(),
                mode: mode_count + i,
                ladder: Ladder::Raise,
            });
        }
        let e = FieldExpansion { terms };
        if dagger {
            e.dagger()
        } else {
            e
        }
    }

    /// Mode lattice for the Hermitian (a = b) field.
    pub fn majorana_mode_system(&self) -> ModeSystem {
        ModeSystem {
            mode_count: self.mode_count(),
            local_dim: 2,
            fermi: matches!(self.statistics, Statistics::Fermi),
        }
    }

    /// Component `comp` of the Hermitian field H = psi + psi^dag with the
    /// antiparticle operators identified with the particle operators.
    pub fn majorana_expansion(&self, comp: usize, point: &SpacetimePoint) -> FieldExpansion {
        assert!(comp < 2, "two-component spinor");
        let mut terms = Vec::with_capacity(2 * self.mode_count());
        for (i, n) in self.mode_numbers().enumerate() {
            let (u, v) = self.spinors(n);
            let c = self.windowed_coeff(n).sqrt();
            let phase =
                C64::from_polar(1.0, -(self.frequency(n) * point.t - self.momentum(n) * point.x));
            // psi contributes u a e^{-i phi} + v a^dag e^{+i phi}; psi^dag
            // contributes the conjugates on the same mode.
            terms.push(Term {
                coeff: c * (u[comp] * phase + (v[comp] * phase.conj()).conj()),
                mode: i,
                ladder: Ladder::Lower,
            });
            terms.push(Term {
                coeff: c * (v[comp] * phase.conj() + (u[comp] * phase).conj()),
                mode: i,
                ladder: Ladder::Raise,
            });
        }
        FieldExpansion { terms }
    }
}

fn spinor_from(pslash: &[[f64; 2]; 2], m: f64, chi_order: [usize; 2]) -> [f64; 2] {
    for chi in chi_order {
        let col = [
            pslash[0][chi] + if chi == 0 { m } else { 0.0 },
            pslash[1][chi] + if chi == 1 { m } else { 0.0 },
        ];
        let norm = (col[0] * col[0] + col[1] * col[1]).sqrt();
        if norm > 1e-8 {
            return [col[0] / norm, col[1] / norm];
        }
    }
    unreachable!("pslash +/- m cannot vanish on both basis spinors")
}

fn rescale(s: [f64; 2], norm: f64) -> Spinor {
    [C64::new(s[0] * norm, 0.0), C64::new(s[1] * norm, 0.0)]
}

/// Verdict of the fermion measurability demonstration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurability {
    NotMeasurable,
    Inconclusive,
}

/// Report of the Hermitian-fermion demonstration: the spacelike
/// anticommutator is small (and refines to zero) while the commutator and
/// the plain product are not, so no pinching-compatible observable algebra
/// survives.
#[derive(Clone, Debug)]
pub struct FermionDemoReport {
    pub anticomm_norm: f64,
    pub comm_norm: f64,
    pub product_norm: f64,
    pub verdict: Measurability,
}

/// Thresholds for the demonstration verdict.
pub const DEMO_ANTICOMM_TOL: f64 = 0.1;
pub const DEMO_LOWER_BOUND: f64 = 1e-2;

/// Corollary-style demonstration on the Hermitian (a = b) Fermi field:
/// component 0 at two points, operator norms on the subspace with at most
/// two excitations. The anticommutator is an exact multiple of the identity,
/// so its restricted operator norm is the exact operator norm.
pub fn fermion_measurability_demo(
    model: &FieldModel,
    x: &SpacetimePoint,
    y: &SpacetimePoint,
) -> Result<FermionDemoReport> {
    if model.statistics != Statistics::Fermi {
        return Err(Error::UnsupportedStatistics);
    }
    if model.field_class != FieldClass::DiracLike {
        return Err(Error::UnsupportedFieldClass);
    }
    let dirac = DiracModeModel::new(model.mass, model.box_length, model.n_max, Window::Triangular)?;
    let sys = dirac.majorana_mode_system();
    // The restricted-subspace computation is polynomial in the mode count,
    // but cap it so accidental huge cutoffs fail loudly.
    if sys.mode_count > 64 {
        return Err(Error::BudgetExceeded {
            dim: sys.dense_dimension(),
            budget: 1u128 << 64,
        });
    }
    let basis = sys.subspace_basis(2);
    let hx = dirac.majorana_expansion(0, x);
    let hy = dirac.majorana_expansion(0, y);

    let anti = sys.matrix_in_basis(&basis, |s| {
        state_add(
            &sys.apply_product(s, &[&hx, &hy]),
            &sys.apply_product(s, &[&hy, &hx]),
        )
    });
    let comm = sys.matrix_in_basis(&basis, |s| {
        state_sub(
            &sys.apply_product(s, &[&hx, &hy]),
            &sys.apply_product(s, &[&hy, &hx]),
        )
    });
    let product = sys.matrix_in_basis(&basis, |s| sys.apply_product(s, &[&hx, &hy]));

    let anticomm_norm = anti.operator_norm();
    let comm_norm = comm.operator_norm();
    let product_norm = product.operator_norm();
    let verdict = if anticomm_norm <= DEMO_ANTICOMM_TOL
        && comm_norm > DEMO_LOWER_BOUND
        && product_norm > DEMO_LOWER_BOUND
    {
        Measurability::NotMeasurable
    } else {
        Measurability::Inconclusive
    };
    Ok(FermionDemoReport {
        anticomm_norm,
        comm_norm,
        product_norm,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::Operator;

    fn fermi_model(n_max: i64) -> FieldModel {
        FieldModel::new(1.0, 8.0, n_max, Statistics::Fermi, FieldClass::DiracLike, 1).unwrap()
    }

    #[test]
    fn spinor_normalization_and_completeness() {
        let model = DiracModeModel::new(1.0, 8.0, 4, Window::Sharp).unwrap();
        for n in model.mode_numbers() {
            let (u, v) = model.spinors(n);
            let w = model.frequency(n);
            let uu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
            let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            assert!((uu - 2.0 * w).abs() < 1e-12);
            assert!((vv - 2.0 * w).abs() < 1e-12);
            // u(k) u(k)^dag + v(-k) v(-k)^dag = 2 omega I.
            let (_, vm) = model.spinors(-n);
            for a in 0..2 {
                for b in 0..2 {
                    let s = u[a] * u[b].conj() + vm[a] * vm[b].conj();
                    let expect = if a == b { 2.0 * w } else { 0.0 };
                    assert!((s - C64::new(expect, 0.0)).norm() < 1e-10, "n={n} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn equal_time_anticommutator_is_truncated_delta() {
        let model = DiracModeModel::new(1.0, 8.0, 4, Window::Sharp).unwrap();
        // Coincident points: (2 n_max + 1) / L times the identity.
        let k = model.bracket_kernel(
            &SpacetimePoint::new(0.7, 1.3),
            &SpacetimePoint::new(0.7, 1.3),
        );
        let scale = (2.0 * 4.0 + 1.0) / 8.0;
        for a in 0..2 {
            for b in 0..2 {
                let expect = if a == b { C64::new(scale, 0.0) } else { C64::new(0.0, 0.0) };
                assert!((k[(a, b)] - expect).norm() < 1e-9);
            }
        }
        // Separated equal-time points: (1/L) sum_n e^{i k_n d} times identity.
        let d = 1.1;
        let k = model.bracket_kernel(
            &SpacetimePoint::new(0.2, d),
            &SpacetimePoint::new(0.2, 0.0),
        );
        let expect: C64 = model
            .mode_numbers()
            .map(|n| C64::from_polar(1.0 / 8.0, model.momentum(n) * d))
            .sum();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { expect } else { C64::new(0.0, 0.0) };
                assert!((k[(a, b)] - want).norm() < 1e-9, "({a},{b})");
            }
        }
    }

    #[test]
    fn operator_bracket_matches_kernel() {
        // The matrix-level anticommutator of the charged field equals
        // kernel entry times identity on the truncated space.
        let model = DiracModeModel::new(1.0, 8.0, 2, Window::Triangular).unwrap();
        let sys = model.mode_system();
        let basis = sys.subspace_basis(1);
        let x = SpacetimePoint::new(0.4, 1.5);
        let y = SpacetimePoint::new(0.0, 0.0);
        let kernel = model.bracket_kernel(&x, &y);
        for a in 0..2 {
            for b in 0..2 {
                let pa = model.expansion(a, &x, false);
                let pb_dag = model.expansion(b, &y, true);
                let anti = sys.matrix_in_basis(&basis, |s| {
                    state_add(
                        &sys.apply_product(s, &[&pa, &pb_dag]),
                        &sys.apply_product(s, &[&pb_dag, &pa]),
                    )
                });
                let expect = Operator::identity(basis.len()).scale(kernel[(a, b)]);
                assert!(
                    (&anti - &expect).frobenius_norm() < 1e-10,
                    "component pair ({a},{b})"
                );
            }
        }
    }

    #[test]
    fn windowed_anticommutator_refines_to_zero_spacelike() {
        let x = SpacetimePoint::new(0.0, 2.0);
        let y = SpacetimePoint::new(0.0, 0.0);
        let norms: Vec<f64> = [4i64, 8, 16]
            .iter()
            .map(|&n| {
                DiracModeModel::new(1.0, 8.0, n, Window::Triangular)
                    .unwrap()
                    .bracket_kernel(&x, &y)
                    .norm()
            })
            .collect();
        assert!(
            norms[0] > norms[1] && norms[1] > norms[2],
            "anticommutator norms {norms:?}"
        );
    }

    #[test]
    fn bose_variant_commutator_does_not_refine_to_zero() {
        let x = SpacetimePoint::new(0.0, 2.0);
        let y = SpacetimePoint::new(0.0, 0.0);
        let norms: Vec<f64> = [4i64, 8, 16]
            .iter()
            .map(|&n| {
                DiracModeModel::new(1.0, 8.0, n, Window::Triangular)
                    .unwrap()
                    .bose_variant()
                    .bracket_kernel(&x, &y)
                    .norm()
            })
            .collect();
        assert!(norms.iter().all(|&v| v > 5e-2), "commutator norms {norms:?}");
    }

    #[test]
    fn demo_verdict_not_measurable() {
        let report = fermion_measurability_demo(
            &fermi_model(4),
            &SpacetimePoint::new(0.0, 2.0),
            &SpacetimePoint::new(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(report.verdict, Measurability::NotMeasurable);
        assert!(report.anticomm_norm <= DEMO_ANTICOMM_TOL);
        assert!(report.comm_norm > DEMO_LOWER_BOUND);
        assert!(report.product_norm > DEMO_LOWER_BOUND);
    }

    #[test]
    fn demo_anticommutator_decreases_under_refinement() {
        let x = SpacetimePoint::new(0.0, 2.0);
        let y = SpacetimePoint::new(0.0, 0.0);
        let norms: Vec<f64> = [4i64, 8, 16]
            .iter()
            .map(|&n| fermion_measurability_demo(&fermi_model(n), &x, &y).unwrap().anticomm_norm)
            .collect();
        assert!(
            norms[0] > norms[1] && norms[1] > norms[2],
            "demo anticommutator norms {norms:?}"
        );
    }

    #[test]
    fn demo_product_never_vanishes_at_coincidence() {
        let p = SpacetimePoint::new(0.3, 1.0);
        let report = fermion_measurability_demo(&fermi_model(3), &p, &p).unwrap();
        assert!(report.product_norm > 0.0);
    }

    #[test]
    fn demo_rejects_bose_input() {
        let model =
            FieldModel::new(1.0, 8.0, 4, Statistics::Bose, FieldClass::DiracLike, 2).unwrap();
        assert!(matches!(
            fermion_measurability_demo(
                &model,
                &SpacetimePoint::new(0.0, 2.0),
                &SpacetimePoint::new(0.0, 0.0)
            ),
            Err(Error::UnsupportedStatistics)
        ));
    }
}
