use super::{ResolvedStrategy, TimedPositionalStrategy};
use crate::error::{Error, Result};
use crate::model::NormedGame;
use crate::nets::{choose_epsilon, sweep, Generator, NetLevel};
use crate::poly::MIN_PIECE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMethod {
    BestResponseNets,
    Simulation,
}

impl EvaluationMethod {
    pub fn tag(self) -> &'static str {
        match self {
            EvaluationMethod::BestResponseNets => "best-response-nets",
            EvaluationMethod::Simulation => "simulation",
        }
    }
}

/// Value at time 0 of one or two fixed strategies, the free player (if any)
/// responding optimally.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub values: Vec<f64>,
    pub method: EvaluationMethod,
    /// Global error bound of the underlying solve, `c_k Σ h^(k+1)`.
    pub bound: f64,
    /// Width of the underlying uniform grid before switch times are overlaid.
    pub epsilon: f64,
    pub intervals: usize,
}

/// Solves the game with the fixed player's action sets reduced to the
/// strategy's choice on every interval. The solver grid for precision `π`
/// is refined at every switch time of the strategy.
pub fn evaluate_best_response(
    game: &NormedGame,
    fixed: &TimedPositionalStrategy,
    level: NetLevel,
    precision: f64,
) -> Result<EvaluationReport> {
    evaluate_fixed(game, &[fixed], level, precision)
}

/// Both players fixed: the result is the reachability probability of the
/// strategy pair, up to the discretisation bound.
pub fn evaluate_pair(
    game: &NormedGame,
    reach: &TimedPositionalStrategy,
    safe: &TimedPositionalStrategy,
    level: NetLevel,
    precision: f64,
) -> Result<EvaluationReport> {
    if reach.player() == safe.player() {
        return Err(Error::StrategyMismatch("both strategies belong to the same player".into()));
    }
    evaluate_fixed(game, &[reach, safe], level, precision)
}

fn evaluate_fixed(
    game: &NormedGame,
    fixed: &[&TimedPositionalStrategy],
    level: NetLevel,
    precision: f64,
) -> Result<EvaluationReport> {
    let horizon = fixed[0].horizon();
    if let Some(other) = fixed.iter().find(|s| (s.horizon() - horizon).abs() > 1e-9 * horizon.max(1.0)) {
        return Err(Error::StrategyMismatch(format!(
            "strategy horizons differ: {horizon} and {}",
            other.horizon()
        )));
    }
    if !(precision > 0.0 && precision < 1.0) {
        return Err(Error::InvalidArgument(format!("precision must lie in (0, 1), got {precision}")));
    }
    let resolved: Vec<ResolvedStrategy> = fixed.iter().map(|s| s.resolve(game)).collect::<Result<_>>()?;
    let (epsilon, n) = choose_epsilon(level, horizon, precision)?;

    let mut grid: Vec<f64> = (0..=n).map(|i| if i == n { horizon } else { horizon * i as f64 / n as f64 }).collect();
    grid.extend(
        resolved
            .iter()
            .flat_map(ResolvedStrategy::switch_times)
            .filter(|&t| t > 0.0 && t < horizon),
    );
    grid.sort_by(f64::total_cmp);
    let tolerance = MIN_PIECE * horizon.max(1.0);
    let mut points: Vec<f64> = Vec::with_capacity(grid.len());
    for t in grid {
        match points.last() {
            Some(&last) if t - last < tolerance => {}
            _ => points.push(t),
        }
    }
    *points.last_mut().expect("grid has points") = horizon;

    let gen = Generator::new(game);
    let swept = sweep(&gen, level, &points, false, |lo, hi, pins| {
        let mid = 0.5 * (lo + hi);
        for s in &resolved {
            s.pin_at(mid, pins);
        }
        true
    })?;
    Ok(EvaluationReport {
        values: swept.values,
        method: EvaluationMethod::BestResponseNets,
        bound: level.value_constant_f64() * swept.width_power_sum,
        epsilon,
        intervals: points.len() - 1,
    })
}
