use super::budget::{choose_epsilon_with_guard, grid_for_epsilon, NetLevel, DEFAULT_INTERVAL_GUARD};
use super::generator::Generator;
use super::step::tower;
use crate::error::{Error, Result};
use crate::model::{NormedGame, Player};
use crate::poly::{Piece, PiecewiseFunction};
use crate::strategy::TimedPositionalStrategy;

/// How the interval width is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepTarget {
    /// Smallest uniform grid whose global bound `c_k ε^k T` stays below `π`.
    Precision(f64),
    /// Explicit width, shrunk to `T / ceil(T / ε)`.
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub level: NetLevel,
    pub horizon: f64,
    pub target: StepTarget,
    pub interval_guard: u64,
    /// Keep the full piecewise value functions. Long horizons at tight
    /// precision produce millions of pieces; switch this off to keep only
    /// values and strategies.
    pub retain_values: bool,
}

impl SolverConfig {
    pub fn with_precision(level: NetLevel, horizon: f64, precision: f64) -> SolverConfig {
        SolverConfig {
            level,
            horizon,
            target: StepTarget::Precision(precision),
            interval_guard: DEFAULT_INTERVAL_GUARD,
            retain_values: true,
        }
    }

    pub fn with_epsilon(level: NetLevel, horizon: f64, epsilon: f64) -> SolverConfig {
        SolverConfig { target: StepTarget::Epsilon(epsilon), ..SolverConfig::with_precision(level, horizon, 0.5) }
    }

    pub fn guard(mut self, guard: u64) -> SolverConfig {
        self.interval_guard = guard;
        self
    }

    pub fn retain_values(mut self, retain: bool) -> SolverConfig {
        self.retain_values = retain;
        self
    }

    /// `(ε, n)` of the uniform grid.
    pub fn grid(&self) -> Result<(f64, u64)> {
        match self.target {
            StepTarget::Precision(pi) => {
                if !(pi > 0.0 && pi < 1.0) {
                    return Err(Error::InvalidArgument(format!("precision must lie in (0, 1), got {pi}")));
                }
                choose_epsilon_with_guard(self.level, self.horizon, pi, self.interval_guard)
            }
            StepTarget::Epsilon(eps) => grid_for_epsilon(self.horizon, eps, self.interval_guard),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub level: NetLevel,
    pub horizon: f64,
    pub epsilon: f64,
    pub intervals: u64,
    /// Approximate values at time 0, indexed like the game's locations.
    pub values: Vec<f64>,
    /// Per-location value functions over `[0, T]` when retained.
    pub value_functions: Option<Vec<PiecewiseFunction>>,
    pub reach_strategy: TimedPositionalStrategy,
    pub safe_strategy: TimedPositionalStrategy,
    /// `c_k ε^k T`.
    pub value_bound: f64,
    /// `d_k ε^k T`.
    pub strategy_bound: f64,
}

impl SolveResult {
    pub fn strategy(&self, player: Player) -> &TimedPositionalStrategy {
        match player {
            Player::Reach => &self.reach_strategy,
            Player::Safe => &self.safe_strategy,
        }
    }
}

/// Output of a backward sweep over an arbitrary grid.
pub(crate) struct Sweep {
    pub values: Vec<f64>,
    /// Per location, pieces latest first.
    pub functions: Option<Vec<Vec<Piece>>>,
    /// Per location, `(start, end, action)` latest first with equal
    /// neighbours merged.
    pub choices: Vec<Vec<(f64, f64, usize)>>,
    /// `Σ h^(k+1)` over the intervals.
    pub width_power_sum: f64,
}

/// Backward iteration over `grid` (ascending, first point 0) from the goal
/// indicator at the last point. `pins` may restrict locations to a single
/// action on an interval `[lo, hi]`; it returns whether any pin is set.
pub(crate) fn sweep<F>(gen: &Generator, level: NetLevel, grid: &[f64], retain: bool, mut pins: F) -> Result<Sweep>
where
    F: FnMut(f64, f64, &mut [Option<usize>]) -> bool,
{
    let n = gen.num_locations();
    let mut values = gen.goal_indicator().to_vec();
    let mut functions: Option<Vec<Vec<Piece>>> = retain.then(|| vec![Vec::new(); n]);
    let mut choices: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); n];
    let mut width_power_sum = 0.0;
    let mut pin_buffer = vec![None; n];

    for i in (0..grid.len().saturating_sub(1)).rev() {
        let (lo, hi) = (grid[i], grid[i + 1]);
        let width = hi - lo;
        pin_buffer.iter_mut().for_each(|p| *p = None);
        let pinned = pins(lo, hi, &mut pin_buffer);
        let (local, envelopes, _) = tower(gen, level, &values, width, pinned.then_some(&pin_buffer[..]))
            .map_err(|e| Error::Numeric { interval: i, message: e.to_string() })?;

        for l in 0..n {
            let env = envelopes[l].pieces();
            for (j, &(action, s)) in env.iter().enumerate() {
                let end = if j == 0 { hi } else { hi - s };
                let start = match env.get(j + 1) {
                    Some(&(_, next)) => hi - next,
                    None => lo,
                };
                match choices[l].last_mut() {
                    Some(last) if last.2 == action => last.0 = start,
                    _ => choices[l].push((start, end, action)),
                }
            }
            if let Some(fs) = functions.as_mut() {
                let mut pieces = local[l].to_pieces(hi);
                if let Some(last) = pieces.last_mut() {
                    last.start = lo;
                }
                fs[l].extend(pieces);
            }
            values[l] = local[l].end_value();
        }
        if let Some(l) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                interval: i,
                message: format!("non-finite value at location {l}"),
            });
        }
        width_power_sum += width.powi(level.k() as i32 + 1);
    }
    Ok(Sweep { values, functions, choices, width_power_sum })
}

/// Approximates the optimal time-bounded reachability values on `[0, T]`
/// by backward iteration over a uniform grid, together with both players'
/// strategies and the guaranteed error bounds.
pub fn solve(game: &NormedGame, config: &SolverConfig) -> Result<SolveResult> {
    let (epsilon, intervals) = config.grid()?;
    let horizon = config.horizon;
    let grid: Vec<f64> = (0..=intervals)
        .map(|i| if i == intervals { horizon } else { horizon * i as f64 / intervals as f64 })
        .collect();
    let gen = Generator::new(game);
    let swept = sweep(&gen, config.level, &grid, config.retain_values, |_, _, _| false)?;

    let value_functions = match swept.functions {
        Some(fs) => Some(
            fs.into_iter()
                .map(PiecewiseFunction::from_backward)
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let reach_strategy = TimedPositionalStrategy::from_choices(game, Player::Reach, horizon, &swept.choices);
    let safe_strategy = TimedPositionalStrategy::from_choices(game, Player::Safe, horizon, &swept.choices);
    let scale = epsilon.powi(config.level.k() as i32) * horizon;
    Ok(SolveResult {
        level: config.level,
        horizon,
        epsilon,
        intervals,
        values: swept.values,
        value_functions,
        reach_strategy,
        safe_strategy,
        value_bound: config.level.value_constant_f64() * scale,
        strategy_bound: config.level.strategy_constant_f64() * scale,
    })
}
