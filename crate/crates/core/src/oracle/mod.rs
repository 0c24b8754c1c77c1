//! Reference computations that share no numeric code with the ε-net
//! solvers: a plain level-1 loop on a fine grid, a uniformisation series for
//! fully fixed strategy pairs, and empirical convergence studies.

use crate::error::{Error, Result};
use crate::model::{number, MarkovGame, NormedGame, Player};
use crate::nets::{solve, NetLevel, SolverConfig};
use crate::strategy::TimedPositionalStrategy;

/// Default cap on the number of fine-grid steps.
pub const FINE_STEP_GUARD: u64 = 1_000_000_000;

/// Values at time 0 with their guaranteed distance to the true values.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceValues {
    pub values: Vec<f64>,
    pub bound: f64,
    pub steps: u64,
}

/// Dense rows of a game: per location, per enabled action, the off-diagonal
/// rates.
fn dense_rows(game: &MarkovGame) -> Vec<Vec<Vec<(usize, f64)>>> {
    (0..game.num_locations())
        .map(|l| {
            game.actions(l)
                .iter()
                .filter(|a| a.is_enabled())
                .map(|a| {
                    a.rates
                        .iter()
                        .filter(|(t, _)| *t != l)
                        .map(|(t, r)| (*t, number::to_f64(r)))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Level-1 backward iteration with explicit step `ε`: every location follows
/// the gradient of its best action at the right endpoint. The global error
/// is at most `ε·T`.
pub fn fine_single_net(game: &NormedGame, horizon: f64, epsilon: f64) -> Result<ReferenceValues> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!("reference step must lie in (0, 1], got {epsilon}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let mut values = game.goal_indicator();
    if horizon == 0.0 {
        return Ok(ReferenceValues { values, bound: 0.0, steps: 0 });
    }
    let raw = horizon / epsilon;
    let steps = if (raw - raw.round()).abs() <= 1e-9 * raw { raw.round() } else { raw.ceil() };
    if steps > FINE_STEP_GUARD as f64 {
        return Err(Error::GuardExceeded { required: steps as u64, guard: FINE_STEP_GUARD });
    }
    let steps = steps as u64;
    let h = horizon / steps as f64;
    let rows = dense_rows(game);
    let maximise: Vec<bool> = (0..game.num_locations()).map(|l| game.owner(l) == Player::Reach).collect();
    let mut next = values.clone();
    for _ in 0..steps {
        for (l, acts) in rows.iter().enumerate() {
            let mut best = f64::NAN;
            for act in acts {
                let q: f64 = act.iter().map(|&(t, r)| r * (values[t] - values[l])).sum();
                if best.is_nan() || (maximise[l] && q > best) || (!maximise[l] && q < best) {
                    best = q;
                }
            }
            next[l] = values[l] + h * best;
        }
        std::mem::swap(&mut values, &mut next);
    }
    Ok(ReferenceValues { values, bound: h * horizon, steps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientConfig {
    /// Poisson mass allowed to be dropped per piece.
    pub tolerance: f64,
    /// Largest number of Poisson terms per piece.
    pub max_terms: usize,
}

impl Default for TransientConfig {
    fn default() -> Self {
        TransientConfig { tolerance: 1e-12, max_terms: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientResult {
    /// Probability of being in the goal at `T`, from each location at 0.
    pub values: Vec<f64>,
    /// Distribution at `T` from the game's initial distribution.
    pub distribution: Vec<f64>,
    /// Largest deviation of the forward distribution's mass from one at any
    /// piece boundary.
    pub mass_error: f64,
}

/// Poisson probabilities `e^{-m} m^n / n!` for `n ∈ [left, left + len)`,
/// computed outward from the mode and renormalised.
fn poisson_weights(mean: f64, tolerance: f64, max_terms: usize) -> Result<(usize, Vec<f64>)> {
    if mean == 0.0 {
        return Ok((0, vec![1.0]));
    }
    let mode = mean.floor() as usize;
    let cutoff = tolerance * 1e-3;
    let mut upper = vec![1.0];
    let mut n = mode;
    loop {
        let w = upper[upper.len() - 1] * mean / (n + 1) as f64;
        n += 1;
        upper.push(w);
        let ratio = mean / (n + 1) as f64;
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < cutoff {
            break;
        }
        if upper.len() > max_terms {
            return Err(Error::GuardExceeded { required: upper.len() as u64, guard: max_terms as u64 });
        }
    }
    let mut lower = Vec::new();
    let mut w = 1.0;
    let mut n = mode;
    while n > 0 {
        w *= n as f64 / mean;
        n -= 1;
        lower.push(w);
        let ratio = n as f64 / mean;
        if w * ratio / (1.0 - ratio) < cutoff {
            break;
        }
        if lower.len() > max_terms {
            return Err(Error::GuardExceeded { required: lower.len() as u64, guard: max_terms as u64 });
        }
    }
    let left = mode - lower.len();
    let mut weights: Vec<f64> = lower.into_iter().rev().collect();
    weights.extend(upper);
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((left, weights))
}

/// Sparse transition matrix of the pinned chain.
type Matrix = Vec<Vec<(usize, f64)>>;

fn multiply(matrix: &Matrix, v: &[f64], out: &mut [f64]) {
    for (l, row) in matrix.iter().enumerate() {
        out[l] = row.iter().map(|&(t, p)| p * v[t]).sum();
    }
}

fn multiply_left(matrix: &Matrix, d: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (l, row) in matrix.iter().enumerate() {
        for &(t, p) in row {
            out[t] += d[l] * p;
        }
    }
}

/// `Σ_n w_n P^n v` (or `v P^n` when `left` is set).
fn series(matrix: &Matrix, v: &[f64], first: usize, weights: &[f64], left: bool) -> Vec<f64> {
    let mut power = v.to_vec();
    let mut scratch = vec![0.0; v.len()];
    let mut out = vec![0.0; v.len()];
    for n in 0..first + weights.len() {
        if n >= first {
            let w = weights[n - first];
            out.iter_mut().zip(&power).for_each(|(o, p)| *o += w * p);
        }
        if n + 1 < first + weights.len() {
            if left {
                multiply_left(matrix, &power, &mut scratch);
            } else {
                multiply(matrix, &power, &mut scratch);
            }
            std::mem::swap(&mut power, &mut scratch);
        }
    }
    out
}

/// Transient reachability of a uniform game under a fixed strategy pair.
/// `[0, T]` is cut at every switch time; on each homogeneous piece of length
/// `h` the pinned chain is propagated with the Poisson-weighted power series
/// of its transition matrix.
pub fn transient_fixed(
    game: &MarkovGame,
    reach: &TimedPositionalStrategy,
    safe: &TimedPositionalStrategy,
    horizon: f64,
    config: &TransientConfig,
) -> Result<TransientResult> {
    if !(config.tolerance > 0.0 && config.tolerance < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {}", config.tolerance)));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let lambda = game
        .uniform_rate()
        .map(|r| number::to_f64(&r))
        .ok_or_else(|| Error::InvalidArgument("transient analysis needs a uniform game".into()))?;
    if reach.player() != Player::Reach || safe.player() != Player::Safe {
        return Err(Error::StrategyMismatch("expected one Reach and one Safe strategy".into()));
    }
    let n = game.num_locations();
    let goal = game.goal_indicator();
    let initial: Vec<f64> = game.initial().iter().map(number::to_f64).collect();
    if horizon == 0.0 {
        let distribution = initial.clone();
        let mass_error = (distribution.iter().sum::<f64>() - 1.0).abs();
        return Ok(TransientResult { values: goal, distribution, mass_error });
    }
    let strategies = [reach, safe];

    let mut cuts = vec![0.0, horizon];
    for s in strategies {
        cuts.extend(s.switch_times().into_iter().filter(|&t| t > 0.0 && t < horizon));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let matrix_at = |t: f64| -> Result<Matrix> {
        (0..n)
            .map(|l| {
                let strategy = strategies[(game.owner(l) == Player::Safe) as usize];
                let name = &game.location(l).name;
                let enabled = game.enabled_actions(l);
                let action = match strategy.action_at(name, t) {
                    Some(a) => game
                        .action_index(l, a)
                        .filter(|i| enabled.contains(i))
                        .ok_or_else(|| Error::StrategyMismatch(format!("action {a} is not enabled at {name}")))?,
                    None if enabled.len() == 1 => enabled[0],
                    None => return Err(Error::StrategyMismatch(format!("location {name} is not covered at {t}"))),
                };
                let row = game.actions(l)[action]
                    .rates
                    .iter()
                    .map(|(t, r)| (*t, number::to_f64(r) / lambda))
                    .collect();
                Ok(row)
            })
            .collect()
    };

    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let matrix = matrix_at(0.5 * (w[0] + w[1]))?;
        let (first, weights) = poisson_weights(lambda * (w[1] - w[0]), config.tolerance, config.max_terms)?;
        pieces.push((matrix, first, weights));
    }

    let mut values = goal;
    for (matrix, first, weights) in pieces.iter().rev() {
        values = series(matrix, &values, *first, weights, false);
    }
    let mut distribution = initial;
    let mut mass_error = (distribution.iter().sum::<f64>() - 1.0).abs();
    for (matrix, first, weights) in &pieces {
        distribution = series(matrix, &distribution, *first, weights, true);
        mass_error = mass_error.max((distribution.iter().sum::<f64>() - 1.0).abs());
    }
    Ok(TransientResult { values, distribution, mass_error })
}

/// Least-squares line through `(log₂ ε, log₂ error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    /// Root-mean-square residual in log₂ units.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub model: String,
    pub horizon: f64,
    pub levels: Vec<NetLevel>,
    pub epsilons: Vec<f64>,
    /// `errors[i][j]`: max-norm error at time 0 of level `levels[i]` at
    /// `epsilons[j]`.
    pub errors: Vec<Vec<f64>>,
    /// One fit per level; `None` with fewer than two positive errors.
    pub fits: Vec<Option<OrderFit>>,
    pub reference_epsilon: f64,
}

impl ConvergenceStudy {
    /// `level,epsilon,error` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,epsilon,error\n");
        for (level, row) in self.levels.iter().zip(&self.errors) {
            for (eps, err) in self.epsilons.iter().zip(row) {
                out.push_str(&format!("{},{:.12e},{:.12e}\n", level.k(), eps, err));
            }
        }
        out
    }
}

fn fit_order(epsilons: &[f64], errors: &[f64]) -> Option<OrderFit> {
    let points: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(x, e)| (x.log2(), e.log2()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Some(OrderFit { slope, residual })
}

/// Reference values for studies: the fine level-1 loop at `ε` and `2ε`,
/// combined by Richardson extrapolation `2 f(ε) - f(2ε)`, which cancels the
/// first-order error term of the single net.
pub fn extrapolated_reference(game: &NormedGame, horizon: f64, epsilon: f64) -> Result<Vec<f64>> {
    let fine = fine_single_net(game, horizon, epsilon)?;
    let coarse = fine_single_net(game, horizon, 2.0 * epsilon)?;
    Ok(fine.values.iter().zip(&coarse.values).map(|(f, c)| 2.0 * f - c).collect())
}

/// Errors of `solve` at every level and width against the extrapolated
/// fine-grid reference at `min(min ε², 1e-6)`, with fitted orders.
pub fn convergence_study(
    model: &str,
    game: &NormedGame,
    horizon: f64,
    levels: &[NetLevel],
    epsilons: &[f64],
) -> Result<ConvergenceStudy> {
    let smallest = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smallest > 0.0 && smallest.is_finite()) {
        return Err(Error::InvalidArgument("convergence study needs positive widths".into()));
    }
    let reference_epsilon = (smallest * smallest).min(1e-6);
    let reference = extrapolated_reference(game, horizon, reference_epsilon)?;
    let mut errors = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut row = Vec::with_capacity(epsilons.len());
        for &eps in epsilons {
            let config = SolverConfig::with_epsilon(level, horizon, eps).retain_values(false);
            let result = solve(game, &config)?;
            let err = result
                .values
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            row.push(err);
        }
        errors.push(row);
    }
    let fits = errors.iter().map(|row| fit_order(epsilons, row)).collect();
    Ok(ConvergenceStudy {
        model: model.to_string(),
        horizon,
        levels: levels.to_vec(),
        epsilons: epsilons.to_vec(),
        errors,
        fits,
        reference_epsilon,
    })
}
