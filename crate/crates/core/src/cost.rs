//! Step-wise cost accumulation and the attacker's depletable budget.
//!
//! The cost of a computation is the information held by the device summed over
//! every step it runs. Units are byte-steps: bytes of device information times
//! steps, kept distinct from plain storage bytes.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("step information must be a finite non-negative number, got {0}")]
    NegativeStep(f64),
    #[error("charge must be a finite non-negative number, got {0}")]
    NegativeCharge(f64),
    #[error("budget must be non-negative, got {0}")]
    InvalidBudget(f64),
    #[error("key length must be at least one bit")]
    ZeroKeyBits,
    #[error("keyspace budget overflows: {cost_per_key} * 2^{key_bits}")]
    Overflow { cost_per_key: f64, key_bits: u32 },
}

/// Running total of byte-steps and the number of steps taken.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostMeter {
    accumulated_cost: f64,
    step_count: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accumulated_cost(&self) -> f64 {
        self.accumulated_cost
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One computation step holding `step_information` bytes.
    pub fn record_step(self, step_information: f64) -> Result<Self, CostError> {
        if !(step_information.is_finite() && step_information >= 0.0) {
            return Err(CostError::NegativeStep(step_information));
        }
        Ok(Self {
            accumulated_cost: self.accumulated_cost + step_information,
            step_count: self.step_count + 1,
        })
    }

    /// Sums two meters owned by separate workers.
    pub fn merge(self, other: CostMeter) -> Self {
        Self {
            accumulated_cost: self.accumulated_cost + other.accumulated_cost,
            step_count: self.step_count + other.step_count,
        }
    }
}

/// Byte-steps allocated to an attacker, drawn down before every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    initial: f64,
    remaining: f64,
}

/// Result of charging a budget. Running dry is an outcome, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChargeOutcome {
    Solvent(Budget),
    /// The charge exceeded what was left; the budget is now empty.
    Depleted(Budget),
}

impl ChargeOutcome {
    pub fn budget(&self) -> Budget {
        match *self {
            ChargeOutcome::Solvent(b) | ChargeOutcome::Depleted(b) => b,
        }
    }

    pub fn is_depleted(&self) -> bool {
        matches!(self, ChargeOutcome::Depleted(_))
    }
}

impl Budget {
    pub fn new(initial: f64) -> Result<Self, CostError> {
        if initial.is_nan() || initial < 0.0 {
            return Err(CostError::InvalidBudget(initial));
        }
        Ok(Self {
            initial,
            remaining: initial,
        })
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn remaining(&self) -> f64 {
        self.remaining
    }

    pub fn spent(&self) -> f64 {
        self.initial - self.remaining
    }

    /// Subtracts `cost`. Reaching exactly zero is still solvent; only a charge
    /// larger than what remains depletes the budget.
    pub fn charge(self, cost: f64) -> Result<ChargeOutcome, CostError> {
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(CostError::NegativeCharge(cost));
        }
        if cost > self.remaining {
            return Ok(ChargeOutcome::Depleted(Budget {
                initial: self.initial,
                remaining: 0.0,
            }));
        }
        Ok(ChargeOutcome::Solvent(Budget {
            initial: self.initial,
            remaining: self.remaining - cost,
        }))
    }
}

/// Cost of trying every key of `key_bits` bits: `cost_per_key * 2^key_bits`.
pub fn keyspace_budget(cost_per_key: f64, key_bits: u32) -> Result<f64, CostError> {
    if key_bits == 0 {
        return Err(CostError::ZeroKeyBits);
    }
    let total = cost_per_key * 2f64.powi(key_bits as i32);
    if !total.is_finite() {
        return Err(CostError::Overflow {
            cost_per_key,
            key_bits,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn record_step_examples() {
        let m = CostMeter::new().record_step(6700.0).unwrap();
        assert_eq!((m.accumulated_cost(), m.step_count()), (6700.0, 1));
        let z = m.record_step(0.0).unwrap();
        assert_eq!((z.accumulated_cost(), z.step_count()), (6700.0, 2));
        assert!(CostMeter::new().record_step(-1.0).is_err());
        assert!(CostMeter::new().record_step(f64::NAN).is_err());
    }

    #[test]
    fn eff_search_unit_sixteen_cycles() {
        let m = (0..16).try_fold(CostMeter::new(), |m, _| m.record_step(420.0)).unwrap();
        assert_eq!(m.accumulated_cost(), 6720.0);
        assert_eq!(m.step_count(), 16);
    }

    #[test]
    fn charge_examples() {
        let b = Budget::new(100.0).unwrap();
        let b = b.charge(40.0).unwrap();
        assert_eq!(b, ChargeOutcome::Solvent(Budget { initial: 100.0, remaining: 60.0 }));
        let b = b.budget().charge(60.0).unwrap();
        assert_eq!(b, ChargeOutcome::Solvent(Budget { initial: 100.0, remaining: 0.0 }));
        let b = b.budget().charge(1.0).unwrap();
        assert!(b.is_depleted());
        assert_eq!(b.budget().remaining(), 0.0);
        assert!(Budget::new(1.0).unwrap().charge(-1.0).is_err());
        assert!(Budget::new(-1.0).is_err());
    }

    #[test]
    fn keyspace_budget_examples() {
        assert_eq!(keyspace_budget(1.0, 1).unwrap(), 2.0);
        let full = keyspace_budget(6720.0, 56).unwrap();
        assert!((full / 4.84e20 - 1.0).abs() < 1e-3);
        // Full keyspace at 120*k bytes per key is twice the average-case search cost.
        let eq2 = 120.0 * 56.0 * 2f64.powi(55);
        assert_eq!(keyspace_budget(120.0 * 56.0, 56).unwrap(), 2.0 * eq2);
        assert_eq!(keyspace_budget(1.0, 0), Err(CostError::ZeroKeyBits));
        assert!(matches!(keyspace_budget(1e300, 1000), Err(CostError::Overflow { .. })));
    }

    proptest! {
        #[test]
        fn additivity(a in 0u32..1_000_000, b in 0u32..1_000_000) {
            let (a, b) = (a as f64, b as f64);
            let split = CostMeter::new().record_step(a).unwrap().record_step(b).unwrap();
            let joined = CostMeter::new().record_step(a + b).unwrap();
            prop_assert_eq!(split.accumulated_cost(), joined.accumulated_cost());
            prop_assert_eq!(split.step_count(), joined.step_count() + 1);
        }

        #[test]
        fn charging_in_sequence_matches_charging_the_prefix_sums(
            initial in 0u32..10_000,
            charges in proptest::collection::vec(0u32..3_000, 0..12),
        ) {
            let mut budget = Budget::new(initial as f64).unwrap();
            let mut depleted_at = None;
            for (i, c) in charges.iter().enumerate() {
                match budget.charge(*c as f64).unwrap() {
                    ChargeOutcome::Solvent(b) => budget = b,
                    ChargeOutcome::Depleted(_) => { depleted_at = Some(i); break; }
                }
            }
            let mut prefix = 0.0;
            let mut expected = None;
            for (i, c) in charges.iter().enumerate() {
                prefix += *c as f64;
                let lump = Budget::new(initial as f64).unwrap().charge(prefix).unwrap();
                if lump.is_depleted() { expected = Some(i); break; }
                if depleted_at.is_none() && i + 1 == charges.len() {
                    prop_assert_eq!(lump.budget().remaining(), budget.remaining());
                }
            }
            prop_assert_eq!(depleted_at, expected);
        }

        #[test]
        fn keyspace_doubles_per_bit(c in 1e-3f64..1e6, k in 1u32..500) {
            let a = keyspace_budget(c, k).unwrap();
            let b = keyspace_budget(c, k + 1).unwrap();
            prop_assert_eq!(b, 2.0 * a);
        }
    }
}
