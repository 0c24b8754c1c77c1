//! Markov games: locations split between a maximising (reach) and a
//! minimising (safe) player, exponential rates per action, a goal set and an
//! initial distribution.
//!
//! Rates are exact rationals. Floating point only appears once a solver
//! builds its dense view of the game.

mod builders;
pub mod number;

use std::collections::HashMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
pub use builders::{build_chain_game, build_erlang, build_running_example, ChainGameParams};
pub use number::Rate;

/// Name of the action added to locations that declare no outgoing rates.
pub const ABSORBING_ACTION: &str = "_";

/// Row-sum tolerance for the derived matrices.
pub const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Reach,
    Safe,
}

impl Player {
    pub fn symbol(self) -> &'static str {
        match self {
            Player::Reach => "R",
            Player::Safe => "S",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Player> {
        match symbol {
            "R" => Some(Player::Reach),
            "S" => Some(Player::Safe),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Reach => Player::Safe,
            Player::Safe => Player::Reach,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub owner: Player,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    /// Sparse row `(target, rate)`, sorted by target. Zero entries are kept
    /// when they were declared explicitly.
    pub rates: Vec<(usize, Rate)>,
}

impl Action {
    /// Total exit mass `R(l, a, L)`, self-loop included.
    pub fn exit_mass(&self) -> Rate {
        self.rates.iter().map(|(_, r)| r.clone()).sum()
    }

    /// Exit mass without the self-loop of `source`.
    pub fn exit_mass_excluding(&self, source: usize) -> Rate {
        self.rates
            .iter()
            .filter(|(target, _)| *target != source)
            .map(|(_, r)| r.clone())
            .sum()
    }

    pub fn is_enabled(&self) -> bool {
        self.exit_mass().is_positive()
    }

    pub fn rate_to(&self, target: usize) -> Rate {
        self.rates
            .iter()
            .find(|(t, _)| *t == target)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(Rate::zero)
    }
}

/// A continuous-time Markov game. A CTMDP is the special case where every
/// location with a choice belongs to one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovGame {
    locations: Vec<Location>,
    /// Per location, sorted by action name so that index order is the
    /// lexicographic tie-breaking order.
    actions: Vec<Vec<Action>>,
    initial: Vec<Rate>,
    goal: Vec<bool>,
}

impl MarkovGame {
    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, index: usize) -> &Location {
        &self.locations[index]
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn owner(&self, index: usize) -> Player {
        self.locations[index].owner
    }

    pub fn actions(&self, location: usize) -> &[Action] {
        &self.actions[location]
    }

    pub fn action_index(&self, location: usize, name: &str) -> Option<usize> {
        self.actions[location].iter().position(|a| a.name == name)
    }

    /// Indices of the enabled actions `Σ(l)`.
    pub fn enabled_actions(&self, location: usize) -> Vec<usize> {
        self.actions[location]
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_enabled())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn initial(&self) -> &[Rate] {
        &self.initial
    }

    pub fn is_goal(&self, location: usize) -> bool {
        self.goal[location]
    }

    pub fn goal_indicator(&self) -> Vec<f64> {
        self.goal.iter().map(|&g| if g { 1.0 } else { 0.0 }).collect()
    }

    pub fn goal_locations(&self) -> Vec<usize> {
        (0..self.goal.len()).filter(|&i| self.goal[i]).collect()
    }

    pub fn rate(&self, source: usize, action: usize, target: usize) -> Rate {
        self.actions[source][action].rate_to(target)
    }

    /// Number of declared nonzero rates between distinct locations.
    pub fn num_transitions(&self) -> usize {
        self.actions
            .iter()
            .enumerate()
            .flat_map(|(src, acts)| {
                acts.iter()
                    .flat_map(move |a| a.rates.iter().filter(move |(t, r)| *t != src && !r.is_zero()))
            })
            .count()
    }

    /// Largest exit rate to other locations over enabled actions.
    pub fn max_exit_rate(&self) -> Rate {
        let mut lambda = Rate::zero();
        for (src, acts) in self.actions.iter().enumerate() {
            for action in acts.iter().filter(|a| a.is_enabled()) {
                let exit = action.exit_mass_excluding(src);
                if exit > lambda {
                    lambda = exit;
                }
            }
        }
        lambda
    }

    /// Uniform rate of the game if every enabled action has the same total
    /// exit mass (self-loops included).
    pub fn uniform_rate(&self) -> Option<Rate> {
        let mut rate: Option<Rate> = None;
        for acts in &self.actions {
            for action in acts.iter().filter(|a| a.is_enabled()) {
                let exit = action.exit_mass();
                match &rate {
                    None => rate = Some(exit),
                    Some(r) if *r != exit => return None,
                    Some(_) => {}
                }
            }
        }
        rate
    }

    /// Copy with all self-loop entries removed. Model files never contain
    /// self-loops, so this is the canonical form for comparisons.
    pub fn without_self_loops(&self) -> MarkovGame {
        let mut game = self.clone();
        for (src, acts) in game.actions.iter_mut().enumerate() {
            for action in acts.iter_mut() {
                if action.name == ABSORBING_ACTION && action.rates.iter().all(|(t, _)| *t == src) {
                    continue;
                }
                action.rates.retain(|(t, _)| *t != src);
            }
        }
        game
    }
}

/// Incremental construction with structural checks (unknown or duplicate
/// identifiers). Semantic checks live in [`validate`].
#[derive(Debug, Default)]
pub struct GameBuilder {
    locations: Vec<Location>,
    index: HashMap<String, usize>,
    actions: Vec<Vec<Action>>,
    initial: Vec<Rate>,
    initial_set: Vec<bool>,
    goal: Vec<bool>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn location(&mut self, name: &str, owner: Player) -> Result<usize> {
        if self.index.contains_key(name) {
            return Err(Error::InvalidArgument(format!("duplicate location `{name}`")));
        }
        let id = self.locations.len();
        self.locations.push(Location { name: name.to_string(), owner });
        self.index.insert(name.to_string(), id);
        self.actions.push(Vec::new());
        self.initial.push(Rate::zero());
        self.initial_set.push(false);
        self.goal.push(false);
        Ok(id)
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("undeclared location `{name}`")))
    }

    pub fn rate(&mut self, source: &str, action: &str, target: &str, rate: Rate) -> Result<()> {
        let src = self.lookup(source)?;
        let dst = self.lookup(target)?;
        let acts = &mut self.actions[src];
        let pos = match acts.iter().position(|a| a.name == action) {
            Some(pos) => pos,
            None => {
                acts.push(Action { name: action.to_string(), rates: Vec::new() });
                acts.len() - 1
            }
        };
        let row = &mut acts[pos].rates;
        if row.iter().any(|(t, _)| *t == dst) {
            return Err(Error::InvalidArgument(format!(
                "duplicate rate for ({source}, {action}, {target})"
            )));
        }
        row.push((dst, rate));
        Ok(())
    }

    pub fn goal(&mut self, name: &str) -> Result<()> {
        let id = self.lookup(name)?;
        self.goal[id] = true;
        Ok(())
    }

    pub fn init(&mut self, name: &str, probability: Rate) -> Result<()> {
        let id = self.lookup(name)?;
        if self.initial_set[id] {
            return Err(Error::InvalidArgument(format!("duplicate initial mass for `{name}`")));
        }
        self.initial_set[id] = true;
        self.initial[id] = probability;
        Ok(())
    }

    /// Locations without any declared action receive the implicit absorbing
    /// action [`ABSORBING_ACTION`] with a unit self-loop.
    pub fn build(mut self) -> MarkovGame {
        for (src, acts) in self.actions.iter_mut().enumerate() {
            if acts.is_empty() {
                acts.push(Action {
                    name: ABSORBING_ACTION.to_string(),
                    rates: vec![(src, Rate::one())],
                });
            }
            for action in acts.iter_mut() {
                action.rates.sort_by_key(|(t, _)| *t);
            }
            acts.sort_by(|a, b| a.name.cmp(&b.name));
        }
        MarkovGame {
            locations: self.locations,
            actions: self.actions,
            initial: self.initial,
            goal: self.goal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoEnabledAction { location: String },
    NegativeRate { location: String, action: String, target: String },
    InitialOutOfRange { location: String },
    InitialSum { sum: String },
    BranchingMismatch { location: String, action: String, target: String },
    NotNormed { location: String, action: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEnabledAction { location } => {
                write!(f, "location `{location}`: no enabled action")
            }
            Violation::NegativeRate { location, action, target } => {
                write!(f, "negative rate ({location}, {action}, {target})")
            }
            Violation::InitialOutOfRange { location } => {
                write!(f, "initial probability of `{location}` outside [0, 1]")
            }
            Violation::InitialSum { sum } => {
                write!(f, "initial distribution sums to {sum}, expected 1")
            }
            Violation::BranchingMismatch { location, action, target } => write!(
                f,
                "branching probability ({location}, {action}, {target}) differs from rate quotient"
            ),
            Violation::NotNormed { location, action } => {
                write!(f, "row ({location}, {action}) does not sum to 1")
            }
        }
    }
}

/// Branching probabilities `P` and generator `Q`, both exact. Rows are
/// indexed `[location][action]` like [`MarkovGame::actions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedMatrices {
    pub branching: Vec<Vec<Vec<(usize, Rate)>>>,
    pub generator: Vec<Vec<Vec<(usize, Rate)>>>,
}

impl DerivedMatrices {
    pub fn compute(game: &MarkovGame) -> DerivedMatrices {
        let mut branching = Vec::with_capacity(game.num_locations());
        let mut generator = Vec::with_capacity(game.num_locations());
        for src in 0..game.num_locations() {
            let mut p_rows = Vec::new();
            let mut q_rows = Vec::new();
            for action in game.actions(src) {
                let exit = action.exit_mass();
                let p_row = if exit.is_positive() {
                    action
                        .rates
                        .iter()
                        .map(|(t, r)| (*t, r / &exit))
                        .collect()
                } else {
                    Vec::new()
                };
                let mut q_row: Vec<(usize, Rate)> = action
                    .rates
                    .iter()
                    .filter(|(t, _)| *t != src)
                    .map(|(t, r)| (*t, r.clone()))
                    .collect();
                q_row.push((src, -action.exit_mass_excluding(src)));
                q_row.sort_by_key(|(t, _)| *t);
                p_rows.push(p_row);
                q_rows.push(q_row);
            }
            branching.push(p_rows);
            generator.push(q_rows);
        }
        DerivedMatrices { branching, generator }
    }

    pub fn branching(&self, source: usize, action: usize, target: usize) -> Rate {
        lookup(&self.branching[source][action], target)
    }

    pub fn generator(&self, source: usize, action: usize, target: usize) -> Rate {
        lookup(&self.generator[source][action], target)
    }

    /// Recomputes every quotient `R(l,a,l') / R(l,a,L)` and reports entries
    /// that disagree with the stored branching matrix.
    pub fn check_against(&self, game: &MarkovGame) -> Vec<Violation> {
        let mut violations = Vec::new();
        for src in 0..game.num_locations() {
            for (ai, action) in game.actions(src).iter().enumerate() {
                let exit = action.exit_mass();
                for dst in 0..game.num_locations() {
                    let expected = if exit.is_positive() {
                        action.rate_to(dst) / &exit
                    } else {
                        Rate::zero()
                    };
                    let stored = self
                        .branching
                        .get(src)
                        .and_then(|rows| rows.get(ai))
                        .map(|row| lookup(row, dst))
                        .unwrap_or_else(Rate::zero);
                    if stored != expected {
                        violations.push(Violation::BranchingMismatch {
                            location: game.location(src).name.clone(),
                            action: action.name.clone(),
                            target: game.location(dst).name.clone(),
                        });
                    }
                }
            }
        }
        violations
    }
}

fn lookup(row: &[(usize, Rate)], target: usize) -> Rate {
    row.iter()
        .find(|(t, _)| *t == target)
        .map(|(_, r)| r.clone())
        .unwrap_or_else(Rate::zero)
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub derived: Option<DerivedMatrices>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks enabledness, rate signs and the initial distribution. Violations
/// are returned as data; derived matrices are attached when none occur.
pub fn validate(game: &MarkovGame) -> ValidationReport {
    let mut violations = Vec::new();
    for src in 0..game.num_locations() {
        let name = &game.location(src).name;
        for action in game.actions(src) {
            for (dst, rate) in &action.rates {
                if rate.is_negative() {
                    violations.push(Violation::NegativeRate {
                        location: name.clone(),
                        action: action.name.clone(),
                        target: game.location(*dst).name.clone(),
                    });
                }
            }
        }
        if !game.actions(src).iter().any(Action::is_enabled) {
            violations.push(Violation::NoEnabledAction { location: name.clone() });
        }
    }
    let mut sum = Rate::zero();
    for (i, p) in game.initial().iter().enumerate() {
        if p.is_negative() || *p > Rate::one() {
            violations.push(Violation::InitialOutOfRange {
                location: game.location(i).name.clone(),
            });
        }
        sum += p;
    }
    if (number::to_f64(&sum) - 1.0).abs() > ROW_TOLERANCE {
        violations.push(Violation::InitialSum { sum: number::format_rational(&sum) });
    }
    let derived = if violations.is_empty() {
        let derived = DerivedMatrices::compute(game);
        violations.extend(derived.check_against(game));
        Some(derived)
    } else {
        None
    };
    ValidationReport { violations, derived }
}

/// Fails with [`Error::InvalidModel`] unless the game is well formed.
pub fn ensure_valid(game: &MarkovGame) -> Result<()> {
    let report = validate(game);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidModel(report.violations))
    }
}

/// Adds self-loops so that every enabled action leaves at the largest exit
/// rate `λ`. Off-diagonal rates and non-enabled actions are untouched.
pub fn uniformise(game: &MarkovGame) -> Result<MarkovGame> {
    ensure_valid(game)?;
    let mut lambda = game.max_exit_rate();
    if lambda.is_zero() {
        lambda = Rate::one();
    }
    Ok(uniformise_at(game, &lambda))
}

fn uniformise_at(game: &MarkovGame, lambda: &Rate) -> MarkovGame {
    let mut out = game.clone();
    for (src, acts) in out.actions.iter_mut().enumerate() {
        for action in acts.iter_mut() {
            if !action.is_enabled() {
                continue;
            }
            let self_loop = lambda - action.exit_mass_excluding(src);
            action.rates.retain(|(t, _)| *t != src);
            if !self_loop.is_zero() {
                action.rates.push((src, self_loop));
                action.rates.sort_by_key(|(t, _)| *t);
            }
        }
    }
    out
}

/// A game whose enabled rows all sum to exactly one (`R = P`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormedGame {
    game: MarkovGame,
}

impl NormedGame {
    /// Certifies that `game` is valid and normed.
    pub fn certify(game: MarkovGame) -> Result<NormedGame> {
        ensure_valid(&game)?;
        let mut violations = Vec::new();
        for src in 0..game.num_locations() {
            for action in game.actions(src).iter().filter(|a| a.is_enabled()) {
                if !action.exit_mass().is_one() {
                    violations.push(Violation::NotNormed {
                        location: game.location(src).name.clone(),
                        action: action.name.clone(),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(NormedGame { game })
        } else {
            Err(Error::InvalidModel(violations))
        }
    }

    pub fn game(&self) -> &MarkovGame {
        &self.game
    }

    pub fn into_game(self) -> MarkovGame {
        self.game
    }
}

impl std::ops::Deref for NormedGame {
    type Target = MarkovGame;

    fn deref(&self) -> &MarkovGame {
        &self.game
    }
}

/// Result of [`normalise`]: the normed game, the horizon in normed time and
/// the uniformisation rate. Normed time `s` corresponds to original time `s / λ`.
#[derive(Debug, Clone)]
pub struct Normalisation {
    pub game: NormedGame,
    pub horizon: f64,
    pub lambda: Rate,
}

impl Normalisation {
    pub fn lambda_f64(&self) -> f64 {
        number::to_f64(&self.lambda)
    }

    pub fn to_original_time(&self, normed_time: f64) -> f64 {
        normed_time / self.lambda_f64()
    }

    pub fn to_normed_time(&self, original_time: f64) -> f64 {
        original_time * self.lambda_f64()
    }
}

/// Uniformises, divides every rate by `λ` and compresses time: the normed
/// game at horizon `λ·T` has the values of the original game at `T`.
pub fn normalise(game: &MarkovGame, horizon: f64) -> Result<Normalisation> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let uniform = uniformise(game)?;
    let lambda = uniform
        .uniform_rate()
        .unwrap_or_else(Rate::one);
    let mut normed = uniform;
    for acts in normed.actions.iter_mut() {
        for action in acts.iter_mut() {
            for (_, rate) in action.rates.iter_mut() {
                *rate = &*rate / &lambda;
            }
        }
    }
    let lambda_f = number::to_f64(&lambda);
    Ok(Normalisation {
        game: NormedGame::certify(normed)?,
        horizon: horizon * lambda_f,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::number::{integer, rational};
    use super::*;

    fn two_rate_game() -> MarkovGame {
        let mut b = GameBuilder::new();
        b.location("x", Player::Reach).unwrap();
        b.location("y", Player::Reach).unwrap();
        b.location("g", Player::Reach).unwrap();
        b.rate("x", "slow", "g", integer(2)).unwrap();
        b.rate("x", "fast", "y", integer(3)).unwrap();
        b.goal("g").unwrap();
        b.init("x", integer(1)).unwrap();
        b.build()
    }

    #[test]
    fn running_example_is_valid() {
        let game = build_running_example();
        let report = validate(&game);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(game.num_locations(), 5);
        let lr = game.location_index("l_R").unwrap();
        let names: Vec<_> = game.actions(lr).iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn zero_exit_mass_is_a_violation() {
        let mut b = GameBuilder::new();
        b.location("x", Player::Reach).unwrap();
        b.location("y", Player::Safe).unwrap();
        b.rate("x", "a", "y", integer(0)).unwrap();
        b.init("x", integer(1)).unwrap();
        let report = validate(&b.build());
        assert_eq!(
            report.violations,
            vec![Violation::NoEnabledAction { location: "x".into() }]
        );
        assert!(report.derived.is_none());
    }

    #[test]
    fn tampered_branching_is_reported() {
        let game = build_running_example();
        let mut derived = DerivedMatrices::compute(&game);
        assert!(derived.check_against(&game).is_empty());
        let ls = game.location_index("l_S").unwrap();
        derived.branching[ls][1][0].1 = rational(1, 7);
        let violations = derived.check_against(&game);
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::BranchingMismatch { .. }));
    }

    #[test]
    fn initial_distribution_must_sum_to_one() {
        let mut b = GameBuilder::new();
        b.location("x", Player::Reach).unwrap();
        b.init("x", rational(1, 2)).unwrap();
        let report = validate(&b.build());
        assert!(matches!(report.violations[..], [Violation::InitialSum { .. }]));
    }

    #[test]
    fn builder_rejects_duplicates_and_unknown_ids() {
        let mut b = GameBuilder::new();
        b.location("x", Player::Reach).unwrap();
        assert!(b.location("x", Player::Safe).is_err());
        assert!(b.rate("x", "a", "nowhere", integer(1)).is_err());
        b.rate("x", "a", "x", integer(1)).unwrap();
        assert!(b.rate("x", "a", "x", integer(2)).is_err());
        assert!(b.goal("nowhere").is_err());
    }

    #[test]
    fn uniformise_fills_self_loops() {
        let game = two_rate_game();
        let uniform = uniformise(&game).unwrap();
        let x = uniform.location_index("x").unwrap();
        let slow = uniform.action_index(x, "slow").unwrap();
        let fast = uniform.action_index(x, "fast").unwrap();
        assert_eq!(uniform.max_exit_rate(), integer(3));
        assert_eq!(uniform.rate(x, slow, x), integer(1));
        assert_eq!(uniform.rate(x, fast, x), integer(0));
        assert_eq!(uniform.uniform_rate(), Some(integer(3)));
        // off-diagonal entries are untouched
        for src in 0..game.num_locations() {
            for (ai, action) in game.actions(src).iter().enumerate() {
                for (dst, rate) in &action.rates {
                    if *dst != src {
                        assert_eq!(&uniform.rate(src, ai, *dst), rate);
                    }
                }
            }
        }
    }

    #[test]
    fn uniformise_is_identity_on_normed_example() {
        let game = build_running_example();
        assert_eq!(uniformise(&game).unwrap(), *game);
    }

    #[test]
    fn erlang_rate_and_normalisation() {
        let game = build_erlang(30, 10.0).unwrap();
        assert_eq!(uniformise(&game).unwrap().uniform_rate(), Some(integer(10)));
        let norm = normalise(&game, 7.0).unwrap();
        assert_eq!(norm.lambda, integer(10));
        assert_eq!(norm.horizon, 70.0);
        let l1 = norm.game.location_index("l1").unwrap();
        let a = norm.game.action_index(l1, "a").unwrap();
        assert_eq!(norm.game.rate(l1, a, l1), rational(9, 10));
    }

    #[test]
    fn normalise_identity_on_running_example() {
        let game = build_running_example();
        let norm = normalise(&game, 4.0).unwrap();
        assert_eq!(norm.lambda, integer(1));
        assert_eq!(norm.horizon, 4.0);
        assert_eq!(norm.game, game);
    }

    #[test]
    fn normalise_scales_horizon_by_lambda() {
        let mut b = GameBuilder::new();
        b.location("x", Player::Reach).unwrap();
        b.location("g", Player::Reach).unwrap();
        b.rate("x", "a", "g", integer(2)).unwrap();
        b.goal("g").unwrap();
        b.init("x", integer(1)).unwrap();
        let norm = normalise(&b.build(), 3.0).unwrap();
        assert_eq!(norm.horizon, 6.0);
        assert_eq!(norm.to_original_time(6.0), 3.0);
    }

    #[test]
    fn derived_rows_sum_correctly() {
        let game = uniformise(&build_chain_game(&ChainGameParams::default()).unwrap()).unwrap();
        let derived = validate(&game).derived.unwrap();
        for src in 0..game.num_locations() {
            for (ai, action) in game.actions(src).iter().enumerate() {
                if !action.is_enabled() {
                    continue;
                }
                let p_sum: Rate = derived.branching[src][ai].iter().map(|(_, r)| r.clone()).sum();
                let q_sum: Rate = derived.generator[src][ai].iter().map(|(_, r)| r.clone()).sum();
                assert!(p_sum.is_one());
                assert!(q_sum.is_zero());
                let exit = action.exit_mass();
                for (dst, r) in &action.rates {
                    assert_eq!(&(derived.branching(src, ai, *dst) * &exit), r);
                }
            }
        }
    }
}
