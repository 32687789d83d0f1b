//! Matrix-free truncated Fock machinery.
//!
//! Basis states are occupation vectors over a fixed list of modes. Field
//! operators are linear combinations of single ladder operators; products of
//! field operators are applied term by term to sparse states, and matrices
//! are assembled only in an explicitly chosen basis. Fermi modes carry
//! Jordan-Wigner sign factors so distinct-mode anticommutators vanish
//! exactly.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::op::{Operator, C64};

/// One occupation-number configuration.
pub type Occupation = Vec<u8>;

/// Sparse vector in the occupation basis.
pub type State = HashMap<Occupation, C64>;

/// The mode lattice: how many ladder modes, the local dimension per mode
/// (occupation cutoff + 1 for bosons, 2 for fermions), and the statistics.
#[derive(Clone, Copy, Debug)]
pub struct ModeSystem {
    pub mode_count: usize,
    pub local_dim: u8,
    pub fermi: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Lower,
    Raise,
}

/// One `coeff * a_mode` or `coeff * a_mode^dag` term.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: C64,
    pub mode: usize,
    pub ladder: Ladder,
}

/// A field operator as a linear combination of single ladder operators.
#[derive(Clone, Debug, Default)]
pub struct FieldExpansion {
    pub terms: Vec<Term>,
}

impl FieldExpansion {
    pub fn dagger(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    mode: t.mode,
                    ladder: match t.ladder {
                        Ladder::Lower => Ladder::Raise,
                        Ladder::Raise => Ladder::Lower,
                    },
                })
                .collect(),
        }
    }
}

impl ModeSystem {
    pub fn vacuum(&self) -> State {
        let mut s = State::new();
        s.insert(vec![0; self.mode_count], C64::new(1.0, 0.0));
        s
    }

    /// Dimension of the full truncated Fock space.
    pub fn dense_dimension(&self) -> u128 {
        (self.local_dim as u128)
            .checked_pow(self.mode_count as u32)
            .unwrap_or(u128::MAX)
    }

    /// Applies one linear field expansion to a sparse state.
    pub fn apply(&self, state: &State, expansion: &FieldExpansion) -> State {
        let mut out = State::new();
        for term in &expansion.terms {
            for (occ, &amp) in state {
                let n = occ[term.mode];
                let (new_n, factor) = match term.ladder {
                    Ladder::Lower => {
                        if n == 0 {
                            continue;
                        }
                        (n - 1, (n as f64).sqrt())
                    }
                    Ladder::Raise => {
                        // Raising past the cutoff annihilates: this is the
                        // truncation, and the reason Bose identities only
                        // hold below the cutoff.
                        if n + 1 >= self.local_dim {
                            continue;
                        }
                        (n + 1, (n as f64 + 1.0).sqrt())
                    }
                };
                let sign = if self.fermi {
                    let parity: u32 = occ[..term.mode].iter().map(|&o| o as u32).sum();
                    if parity % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    1.0
                };
                let mut new_occ = occ.clone();
                new_occ[term.mode] = new_n;
                *out.entry(new_occ).or_insert(C64::new(0.0, 0.0)) +=
                    amp * term.coeff * factor * sign;
            }
        }
        out.retain(|_, v| v.norm_sqr() > 0.0);
        out
    }

    /// Applies a product of expansions, rightmost factor first.
    pub fn apply_product(&self, state: &State, factors: &[&FieldExpansion]) -> State {
        let mut s = state.clone();
        for f in factors.iter().rev() {
            s = self.apply(&s, f);
        }
        s
    }

    /// All occupations with total occupation at most `max_total`.
    pub fn subspace_basis(&self, max_total: u8) -> Vec<Occupation> {
        let mut basis = Vec::new();
        let mut occ = vec![0u8; self.mode_count];
        self.fill_basis(&mut basis, &mut occ, 0, max_total);
        basis
    }

    fn fill_basis(
        &self,
        basis: &mut Vec<Occupation>,
        occ: &mut Occupation,
        mode: usize,
        remaining: u8,
    ) {
        if mode == self.mode_count {
            basis.push(occ.clone());
            return;
        }
        let cap = remaining.min(self.local_dim - 1);
        for n in 0..=cap {
            occ[mode] = n;
            self.fill_basis(basis, occ, mode + 1, remaining - n);
        }
        occ[mode] = 0;
    }

    /// The full truncated basis, mode 0 as the most significant digit.
    /// Guarded by `budget` because the dimension is exponential in modes.
    pub fn full_basis(&self, budget: u128) -> Result<Vec<Occupation>> {
        let dim = self.dense_dimension();
        if dim > budget {
            return Err(Error::BudgetExceeded { dim, budget });
        }
        let dim = dim as usize;
        let mut basis = Vec::with_capacity(dim);
        for index in 0..dim {
            let mut occ = vec![0u8; self.mode_count];
            let mut rest = index;
            for mode in (0..self.mode_count).rev() {
                occ[mode] = (rest % self.local_dim as usize) as u8;
                rest /= self.local_dim as usize;
            }
            basis.push(occ);
        }
        Ok(basis)
    }

    /// Matrix of a linear map (given as a sparse-state action) in a basis;
    /// components outside the basis are projected away after applying the
    /// full map, never during intermediate steps.
    pub fn matrix_in_basis(
        &self,
        basis: &[Occupation],
        action: impl Fn(&State) -> State,
    ) -> Operator {
        let index: HashMap<&Occupation, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut mat = Operator::zeros(basis.len());
        for (col, b) in basis.iter().enumerate() {
            let mut input = State::new();
            input.insert(b.clone(), C64::new(1.0, 0.0));
            for (occ, amp) in action(&input) {
                if let Some(&row) = index.get(&occ) {
                    mat.set_entry(row, col, mat.entry(row, col) + amp);
                }
            }
        }
        mat
    }

    /// Matrix of one field expansion in the full truncated basis.
    pub fn dense_operator(&self, expansion: &FieldExpansion, budget: u128) -> Result<Operator> {
        let basis = self.full_basis(budget)?;
        Ok(self.matrix_in_basis(&basis, |s| self.apply(s, expansion)))
    }
}

/// `left - right` on sparse states.
pub fn state_sub(left: &State, right: &State) -> State {
    let mut out = left.clone();
    for (occ, amp) in right {
        *out.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) -= amp;
    }
    out
}

/// `left + right` on sparse states.
pub fn state_add(left: &State, right: &State) -> State {
    let mut out = left.clone();
    for (occ, amp) in right {
        *out.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) += amp;
    }
    out
}
