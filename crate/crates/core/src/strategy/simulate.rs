use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ResolvedStrategy, TimedPositionalStrategy};
use crate::error::{Error, Result};
use crate::model::{number, MarkovGame, Player};

/// Monte Carlo estimate of the reachability probability at `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub estimate: f64,
    pub std_error: f64,
    /// Half-width of the 95% normal-approximation interval.
    pub half_width: f64,
    pub successes: u64,
    pub trajectories: u64,
}

impl SimulationReport {
    pub fn interval(&self) -> (f64, f64) {
        (self.estimate - self.half_width, self.estimate + self.half_width)
    }
}

/// Cumulative successor distribution of one action, self-loop included.
struct Row {
    cumulative: Vec<(f64, usize)>,
}

impl Row {
    fn sample(&self, u: f64) -> usize {
        let idx = self.cumulative.partition_point(|&(c, _)| c <= u);
        self.cumulative[idx.min(self.cumulative.len() - 1)].1
    }
}

/// Samples `n` runs of the uniformised chain under the strategy pair and
/// counts those in a goal location at time `T`. Jump epochs are
/// exponential with the uniform rate `λ`; at each epoch the successor is
/// drawn with the action the owner's strategy assigns at that time.
///
/// Run `i` draws from stream `i` of a ChaCha generator seeded with `seed`,
/// so results do not depend on the thread count.
pub fn simulate(
    game: &MarkovGame,
    reach: &TimedPositionalStrategy,
    safe: &TimedPositionalStrategy,
    horizon: f64,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one run".into()));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let lambda = game
        .uniform_rate()
        .map(|r| number::to_f64(&r))
        .filter(|&l| l > 0.0)
        .ok_or_else(|| Error::InvalidArgument("simulation needs a uniform game; normalise it first".into()))?;
    if reach.player() != Player::Reach || safe.player() != Player::Safe {
        return Err(Error::StrategyMismatch("expected one Reach and one Safe strategy".into()));
    }
    for s in [reach, safe] {
        if s.horizon() < horizon * (1.0 - 1e-12) {
            return Err(Error::StrategyMismatch(format!(
                "{} strategy covers [0, {}] only, horizon is {horizon}",
                s.player(),
                s.horizon()
            )));
        }
    }
    let strategies = [reach.resolve(game)?, safe.resolve(game)?];

    let rows: Vec<Vec<Option<Row>>> = (0..game.num_locations())
        .map(|l| {
            game.actions(l)
                .iter()
                .map(|action| {
                    action.is_enabled().then(|| {
                        let mut acc = 0.0;
                        let mut cumulative: Vec<(f64, usize)> = action
                            .rates
                            .iter()
                            .map(|(t, r)| {
                                acc += number::to_f64(r) / lambda;
                                (acc, *t)
                            })
                            .collect();
                        if let Some(last) = cumulative.last_mut() {
                            last.0 = 1.0;
                        }
                        Row { cumulative }
                    })
                })
                .collect()
        })
        .collect();

    let mut acc = 0.0;
    let mut initial: Vec<(f64, usize)> = game
        .initial()
        .iter()
        .enumerate()
        .filter(|(_, p)| !num::Zero::is_zero(*p))
        .map(|(l, p)| {
            acc += number::to_f64(p);
            (acc, l)
        })
        .collect();
    if let Some(last) = initial.last_mut() {
        last.0 = 1.0;
    }
    let initial = Row { cumulative: initial };

    let run = |i: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let mut location = initial.sample(rng.gen::<f64>());
        let mut t = 0.0;
        loop {
            t += -(1.0 - rng.gen::<f64>()).ln() / lambda;
            if t > horizon {
                break;
            }
            let owner = match game.owner(location) {
                Player::Reach => 0,
                Player::Safe => 1,
            };
            let action = strategy_action(&strategies[owner], location, t);
            let row = rows[location][action].as_ref().expect("strategies use enabled actions");
            location = row.sample(rng.gen::<f64>());
        }
        game.is_goal(location) as u64
    };
    let successes: u64 = (0..n).into_par_iter().map(run).sum();

    let estimate = successes as f64 / n as f64;
    let std_error = (estimate * (1.0 - estimate) / n as f64).sqrt();
    Ok(SimulationReport { estimate, std_error, half_width: 1.96 * std_error, successes, trajectories: n })
}

fn strategy_action(strategy: &ResolvedStrategy, location: usize, t: f64) -> usize {
    strategy.action_at(location, t).expect("resolved strategies cover their player's locations")
}
