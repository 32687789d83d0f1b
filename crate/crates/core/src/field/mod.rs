//! Truncated 1+1-dimensional field model in a periodic box: mode-sum
//! two-point functions, the four-case bracket sign table, truncated
//! Fock-space field operators, the pinching criterion, and the fermion
//! measurability demonstration.

pub mod dirac;
pub mod fock;

use crate::error::{Error, Result};
use crate::op::{commutator, Operator, C64};
use crate::qm::Observable;
use fock::{state_add, state_sub, FieldExpansion, Ladder, ModeSystem, Term};

/// Default cap on the dense Fock dimension.
pub const DEFAULT_FOCK_BUDGET: u128 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    Bose,
    Fermi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldClass {
    ScalarLike,
    DiracLike,
}

/// Free field in a periodic box of length `box_length` with modes
/// k_n = 2 pi n / box_length for n in [-n_max, n_max], natural units.
#[derive(Clone, Copy, Debug)]
pub struct FieldModel {
    pub mass: f64,
    pub box_length: f64,
    pub n_max: i64,
    pub statistics: Statistics,
    pub field_class: FieldClass,
    pub occupation_cutoff: u8,
}

impl FieldModel {
    pub fn new(
        mass: f64,
        box_length: f64,
        n_max: i64,
        statistics: Statistics,
        field_class: FieldClass,
        occupation_cutoff: u8,
    ) -> Result<Self> {
        if !(mass > 0.0) || !(box_length > 0.0) {
            return Err(Error::InvalidArgument(
                "mass and box length must be positive".into(),
            ));
        }
        if n_max < 0 {
            return Err(Error::InvalidArgument("n_max must be >= 0".into()));
        }
        if occupation_cutoff == 0 {
            return Err(Error::InvalidArgument(
                "occupation cutoff must be >= 1".into(),
            ));
        }
        // Fermi statistics force a per-mode cutoff of one.
        let occupation_cutoff = match statistics {
            Statistics::Fermi => 1,
            Statistics::Bose => occupation_cutoff,
        };
        Ok(Self {
            mass,
            box_length,
            n_max,
            statistics,
            field_class,
            occupation_cutoff,
        })
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

    /// Number of mode labels per charge sector.
    pub fn mode_count(&self) -> usize {
        (2 * self.n_max + 1) as usize
    }

    /// Mode lattice with particle modes first, antiparticle modes second.
    pub fn mode_system(&self) -> ModeSystem {
        ModeSystem {
            mode_count: 2 * self.mode_count(),
            local_dim: match self.statistics {
                Statistics::Bose => self.occupation_cutoff + 1,
                Statistics::Fermi => 2,
            },
            fermi: matches!(self.statistics, Statistics::Fermi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    pub fn neg(&self) -> Self {
        Self {
            t: -self.t,
            x: -self.x,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            t: self.t - other.t,
            x: self.x - other.x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalType {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Strict spacelike classification: |t| < |x|, with a 1e-12 band for
/// lightlike.
pub fn interval_type(sep: &SpacetimePoint) -> IntervalType {
    let (at, ax) = (sep.t.abs(), sep.x.abs());
    if (at - ax).abs() <= 1e-12 {
        IntervalType::Lightlike
    } else if at < ax {
        IntervalType::Spacelike
    } else {
        IntervalType::Timelike
    }
}

/// Positive-frequency two-point function as the truncated mode sum
/// sum_n exp(-i (omega_n t - k_n x)) / (2 L omega_n).
pub fn delta_plus(model: &FieldModel, sep: &SpacetimePoint) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for n in model.mode_numbers() {
        let w = model.frequency(n);
        let k = model.momentum(n);
        total += C64::from_polar(1.0, -(w * sep.t - k * sep.x)) / (2.0 * model.box_length * w);
    }
    total
}

/// One row of the four-case bracket table.
#[derive(Clone, Copy, Debug)]
pub struct SignTableRow {
    pub field_class: FieldClass,
    pub statistics: Statistics,
    /// The bracket the statistics dictate: "commutator" or "anticommutator".
    pub bracket: &'static str,
    /// Sign in Delta+(s) + sign * Delta+(-s).
    pub relative_sign: i32,
    /// Whether the combination vanishes at spacelike separation.
    pub vanishes_spacelike: bool,
}

/// The four-case table: the statistics-matched pairings give the difference
/// of the two-point functions (vanishing at spacelike separation), the
/// mismatched pairings give the sum (which does not vanish).
pub fn bracket_sign_table() -> [SignTableRow; 4] {
    [
        SignTableRow {
            field_class: FieldClass::ScalarLike,
            statistics: Statistics::Bose,
            bracket: "commutator",
            relative_sign: -1,
            vanishes_spacelike: true,
        },
        SignTableRow {
            field_class: FieldClass::ScalarLike,
            statistics: Statistics::Fermi,
            bracket: "anticommutator",
            relative_sign: 1,
            vanishes_spacelike: false,
        },
        SignTableRow {
            field_class: FieldClass::DiracLike,
            statistics: Statistics::Fermi,
            bracket: "anticommutator",
            relative_sign: -1,
            vanishes_spacelike: true,
        },
        SignTableRow {
            field_class: FieldClass::DiracLike,
            statistics: Statistics::Bose,
            bracket: "commutator",
            relative_sign: 1,
            vanishes_spacelike: false,
        },
    ]
}

fn relative_sign(model: &FieldModel) -> f64 {
    let matched = matches!(
        (model.field_class, model.statistics),
        (FieldClass::ScalarLike, Statistics::Bose) | (FieldClass::DiracLike, Statistics::Fermi)
    );
    if matched {
        -1.0
    } else {
        1.0
    }
}

/// c-number value of the statistics-dictated bracket:
/// Delta+(sep) + sign * Delta+(-sep) per the four-case table.
pub fn c_number_bracket(model: &FieldModel, sep: &SpacetimePoint) -> C64 {
    delta_plus(model, sep) + relative_sign(model) * delta_plus(model, &sep.neg())
}

/// Mode expansion of the charged scalar-like field
/// Phi(t, x) = sum_n (2 L omega_n)^(-1/2) (a_n e^{-i phi_n} + b_n^dag e^{+i phi_n})
/// with phi_n = omega_n t - k_n x; particle modes first, then antiparticles.
pub fn scalar_expansion(model: &FieldModel, point: &SpacetimePoint, dagger: bool) -> FieldExpansion {
    let mode_count = model.mode_count();
    let mut terms = Vec::with_capacity(2 * mode_count);
    for (i, n) in model.mode_numbers().enumerate() {
        let w = model.frequency(n);
        let k = model.momentum(n);
        let coeff = 1.0 / (2.0 * model.box_length * w).sqrt();
        let phase = C64::from_polar(coeff, -(w * point.t - k * point.x));
        terms.push(Term {
            coeff: phase,
            mode: i,
            ladder: Ladder::Lower,
        });
        terms.push(Term {
            coeff: phase.conj(),
            mode: mode_count + i,
            ladder: Ladder::Raise,
        });
    }
    let expansion = FieldExpansion { terms };
    if dagger {
        expansion.dagger()
    } else {
        expansion
    }
}

/// Dense matrix of the scalar-like field operator on the full truncated
/// Fock space. Exponential in the mode count, hence the budget.
pub fn build_field_operator(
    model: &FieldModel,
    point: &SpacetimePoint,
    budget: u128,
) -> Result<Operator> {
    if model.field_class != FieldClass::ScalarLike {
        return Err(Error::UnsupportedFieldClass);
    }
    let sys = model.mode_system();
    sys.dense_operator(&scalar_expansion(model, point, false), budget)
}

/// Per-point record of a bracket scan against the origin.
#[derive(Clone, Debug)]
pub struct ScanRecord {
    pub sep: SpacetimePoint,
    pub interval: IntervalType,
    pub delta_plus_forward: C64,
    pub delta_plus_backward: C64,
    pub c_number_bracket: C64,
    /// Frobenius deviation of the matched operator bracket from
    /// c-number * identity, on the restricted subspace; None in c-number-only
    /// scans.
    pub bracket_residual: Option<f64>,
    /// Frobenius norm of [Phi(x) Phi^dag(x), Phi(0) Phi^dag(0)] on the
    /// restricted subspace; None in c-number-only scans.
    pub operator_bracket_norm: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BracketScan {
    pub records: Vec<ScanRecord>,
}

fn c_number_record(model: &FieldModel, sep: &SpacetimePoint) -> ScanRecord {
    ScanRecord {
        sep: *sep,
        interval: interval_type(sep),
        delta_plus_forward: delta_plus(model, sep),
        delta_plus_backward: delta_plus(model, &sep.neg()),
        c_number_bracket: c_number_bracket(model, sep),
        bracket_residual: None,
        operator_bracket_norm: None,
    }
}

/// Scan of the c-number layer only; linear in the mode count, suitable for
/// large cutoffs.
pub fn c_number_scan(model: &FieldModel, grid: &[SpacetimePoint]) -> BracketScan {
    BracketScan {
        records: grid.iter().map(|sep| c_number_record(model, sep)).collect(),
    }
}

/// Operator-level scan on the truncated Fock space. For each separation it
/// verifies the matched bracket [Phi(sep), Phi^dag(0)]-/+ against the
/// c-number on the subspace with total occupation strictly below the
/// occupation cutoff (truncation edges are excluded from assertions, not
/// hidden), and records the product-observable commutator norm on the
/// single-excitation subspace.
pub fn operator_bracket_scan(model: &FieldModel, grid: &[SpacetimePoint]) -> Result<BracketScan> {
    if model.field_class != FieldClass::ScalarLike {
        return Err(Error::UnsupportedFieldClass);
    }
    let sys = model.mode_system();
    let identity_basis = sys.subspace_basis(match model.statistics {
        Statistics::Bose => model.occupation_cutoff - 1,
        // The Fermi bracket is an exact operator identity; one excitation
        // keeps the check nontrivial.
        Statistics::Fermi => 1,
    });
    let product_basis = sys.subspace_basis(1);
    let origin = SpacetimePoint::new(0.0, 0.0);
    let fermi = matches!(model.statistics, Statistics::Fermi);

    let mut records = Vec::with_capacity(grid.len());
    for sep in grid {
        let mut record = c_number_record(model, sep);

        let phi_x = scalar_expansion(model, sep, false);
        let phi_y_dag = scalar_expansion(model, &origin, true);
        let bracket = sys.matrix_in_basis(&identity_basis, |s| {
            let xy = sys.apply_product(s, &[&phi_x, &phi_y_dag]);
            let yx = sys.apply_product(s, &[&phi_y_dag, &phi_x]);
            if fermi {
                state_add(&xy, &yx)
            } else {
                state_sub(&xy, &yx)
            }
        });
        let expected = Operator::identity(identity_basis.len()).scale(record.c_number_bracket);
        record.bracket_residual = Some((&bracket - &expected).frobenius_norm());

        let phi_x_dag = phi_x.dagger();
        let phi_y = scalar_expansion(model, &origin, false);
        let obs_x = |sys: &ModeSystem, s: &fock::State| sys.apply_product(s, &[&phi_x, &phi_x_dag]);
        let obs_y = |sys: &ModeSystem, s: &fock::State| sys.apply_product(s, &[&phi_y, &phi_y_dag]);
        let comm = sys.matrix_in_basis(&product_basis, |s| {
            state_sub(&obs_x(&sys, &obs_y(&sys, s)), &obs_y(&sys, &obs_x(&sys, s)))
        });
        record.operator_bracket_norm = Some(comm.frobenius_norm());

        records.push(record);
    }
    Ok(BracketScan { records })
}

/// Frobenius norm of the commutator of the charged field with itself at two
/// points (no dagger); vanishes identically for a charged field.
pub fn charged_self_bracket_norm(
    model: &FieldModel,
    x: &SpacetimePoint,
    y: &SpacetimePoint,
) -> Result<f64> {
    if model.field_class != FieldClass::ScalarLike {
        return Err(Error::UnsupportedFieldClass);
    }
    let sys = model.mode_system();
    let basis = sys.subspace_basis(2);
    let phi_x = scalar_expansion(model, x, false);
    let phi_y = scalar_expansion(model, y, false);
    let fermi = matches!(model.statistics, Statistics::Fermi);
    let bracket = sys.matrix_in_basis(&basis, |s| {
        let xy = sys.apply_product(s, &[&phi_x, &phi_y]);
        let yx = sys.apply_product(s, &[&phi_y, &phi_x]);
        if fermi {
            state_add(&xy, &yx)
        } else {
            state_sub(&xy, &yx)
        }
    });
    Ok(bracket.frobenius_norm())
}

/// Verdict of the pinching criterion.
#[derive(Clone, Debug)]
pub enum PinchVerdict {
    Pinched {
        pinch_residual: f64,
        commutator_residual: f64,
    },
    NotPinched {
        pinch_residual: f64,
        commutator_residual: f64,
    },
}

impl PinchVerdict {
    pub fn pinched(&self) -> bool {
        matches!(self, PinchVerdict::Pinched { .. })
    }

    pub fn residuals(&self) -> (f64, f64) {
        match self {
            PinchVerdict::Pinched {
                pinch_residual,
                commutator_residual,
            }
            | PinchVerdict::NotPinched {
                pinch_residual,
                commutator_residual,
            } => (*pinch_residual, *commutator_residual),
        }
    }
}

/// Pinching check: sum_lambda P_lambda b P_lambda = b holds iff b is block
/// diagonal in the eigenbasis of `a`, which is in turn equivalent to a
/// vanishing commutator at the block level. Both residuals are reported.
pub fn pinching_check(a: &Observable, b: &Operator, tol: f64) -> Result<PinchVerdict> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "pinching_check",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let pinched = a.spectral().pinch(b)?;
    let scale = b.frobenius_norm().max(1.0);
    let pinch_residual = (&pinched - b).frobenius_norm();
    let commutator_residual = commutator(a.op(), b)?.frobenius_norm();
    if pinch_residual <= tol * scale {
        Ok(PinchVerdict::Pinched {
            pinch_residual,
            commutator_residual,
        })
    } else {
        Ok(PinchVerdict::NotPinched {
            pinch_residual,
            commutator_residual,
        })
    }
}
