use num::rational::Ratio;
use num::ToPrimitive;

use crate::error::{Error, Result};

/// Default cap on the number of intervals a solve may use.
pub const DEFAULT_INTERVAL_GUARD: u64 = 100_000_000;

/// Depth `k` of the ε-net. Level `k` has step error `c_k ε^(k+1)` for the
/// value and `d_k ε^(k+1)` for the extracted strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetLevel(u8);

const VALUE_CONSTANTS: [(i64, i64); 4] = [(1, 1), (2, 3), (1, 3), (2, 15)];
const STRATEGY_CONSTANTS: [(i64, i64); 4] = [(2, 1), (2, 1), (17, 6), (67, 30)];

impl NetLevel {
    pub const SINGLE: NetLevel = NetLevel(1);
    pub const DOUBLE: NetLevel = NetLevel(2);
    pub const TRIPLE: NetLevel = NetLevel(3);
    pub const QUADRUPLE: NetLevel = NetLevel(4);

    pub const ALL: [NetLevel; 4] = [Self::SINGLE, Self::DOUBLE, Self::TRIPLE, Self::QUADRUPLE];

    pub fn new(k: u32) -> Result<NetLevel> {
        match k {
            1..=4 => Ok(NetLevel(k as u8)),
            _ => Err(Error::InvalidArgument(format!("net level must be 1..=4, got {k}"))),
        }
    }

    pub fn k(self) -> u32 {
        self.0 as u32
    }

    /// `c_k`: 1, 2/3, 1/3, 2/15.
    pub fn value_constant(self) -> Ratio<i64> {
        let (n, d) = VALUE_CONSTANTS[self.0 as usize - 1];
        Ratio::new(n, d)
    }

    /// `d_k`: 2, 2, 17/6, 67/30.
    pub fn strategy_constant(self) -> Ratio<i64> {
        let (n, d) = STRATEGY_CONSTANTS[self.0 as usize - 1];
        Ratio::new(n, d)
    }

    pub fn value_constant_f64(self) -> f64 {
        self.value_constant().to_f64().expect("small rational")
    }

    pub fn strategy_constant_f64(self) -> f64 {
        self.strategy_constant().to_f64().expect("small rational")
    }

    /// Step error bound `c_k h^(k+1)` for one interval of width `h`.
    pub fn step_error(self, width: f64) -> f64 {
        self.value_constant_f64() * width.powi(self.k() as i32 + 1)
    }

    pub fn strategy_step_error(self, width: f64) -> f64 {
        self.strategy_constant_f64() * width.powi(self.k() as i32 + 1)
    }
}

/// `ceil(x)` that treats values within a relative 1e-9 above an integer as
/// that integer, so `10 · 10/1e-7` gives exactly `10⁹`.
fn snapped_ceil(x: f64) -> f64 {
    let rounded = x.round();
    if (x - rounded).abs() <= 1e-9 * rounded.abs().max(1.0) {
        rounded
    } else {
        x.ceil()
    }
}

/// Number of uniform intervals that keeps the global error `c_k ε^k T`
/// below `precision`: `ceil(T · (c_k T / π)^(1/k))`, raised if necessary so
/// that `ε ≤ 1`. No guard is applied.
pub fn interval_count(level: NetLevel, horizon: f64, precision: f64) -> Result<u64> {
    check_horizon(horizon)?;
    if !(precision > 0.0 && precision < 1.0) && precision != 1.0 {
        return Err(Error::InvalidArgument(format!("precision must lie in (0, 1], got {precision}")));
    }
    let c = level.value_constant_f64();
    let per_unit = (c * horizon / precision).powf(1.0 / level.k() as f64);
    let n = snapped_ceil(horizon * per_unit).max(snapped_ceil(horizon)).max(1.0);
    if n > u64::MAX as f64 {
        return Err(Error::InvalidArgument(format!("interval count {n} overflows")));
    }
    Ok(n as u64)
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("horizon must be positive and finite, got {horizon}")))
    }
}

/// `(ε, n)` for a target precision, with the default interval guard.
pub fn choose_epsilon(level: NetLevel, horizon: f64, precision: f64) -> Result<(f64, u64)> {
    choose_epsilon_with_guard(level, horizon, precision, DEFAULT_INTERVAL_GUARD)
}

pub fn choose_epsilon_with_guard(
    level: NetLevel,
    horizon: f64,
    precision: f64,
    guard: u64,
) -> Result<(f64, u64)> {
    let n = interval_count(level, horizon, precision)?;
    if n > guard {
        return Err(Error::GuardExceeded { required: n, guard });
    }
    Ok((horizon / n as f64, n))
}

/// Uniform grid for an explicitly requested width; the width is shrunk to
/// `T / n` so the intervals tile `[0, T]`, and capped at 1.
pub fn grid_for_epsilon(horizon: f64, epsilon: f64, guard: u64) -> Result<(f64, u64)> {
    check_horizon(horizon)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = snapped_ceil(horizon / epsilon.min(1.0)).max(1.0);
    if n > guard as f64 {
        return Err(Error::GuardExceeded { required: n as u64, guard });
    }
    let n = n as u64;
    Ok((horizon / n as f64, n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub level: NetLevel,
    pub precision: f64,
    pub intervals: u64,
    pub epsilon: f64,
}

/// `interval_count` for every level and precision, level-major.
pub fn step_budget_table(horizon: f64, precisions: &[f64]) -> Result<Vec<BudgetRow>> {
    let mut rows = Vec::with_capacity(4 * precisions.len());
    for level in NetLevel::ALL {
        for &precision in precisions {
            let intervals = interval_count(level, horizon, precision)?;
            rows.push(BudgetRow { level, precision, intervals, epsilon: horizon / intervals as f64 });
        }
    }
    Ok(rows)
}
