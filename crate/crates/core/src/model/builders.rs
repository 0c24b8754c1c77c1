//! Benchmark models: the five-location running example, the Erlang CTMDP and
//! the two-chain game with many switching points.

use super::number::{self, integer, rational, Rate};
use super::{normalise, GameBuilder, MarkovGame, NormedGame, Player};
use crate::error::{Error, Result};

/// The normed five-location game: `l_S` (safe) chooses between moving to
/// `l_R` and a gamble on `G`/`bot`; `l_R` (reach) chooses between a direct
/// but lossy shot at `G` and a detour through `l`.
pub fn build_running_example() -> NormedGame {
    let raw = running_example_rates();
    normalise(&raw, 0.0)
        .expect("running example is valid")
        .game
}

pub(crate) fn running_example_rates() -> MarkovGame {
    let mut b = GameBuilder::new();
    for (name, owner) in [
        ("l_S", Player::Safe),
        ("l_R", Player::Reach),
        ("l", Player::Reach),
        ("G", Player::Reach),
        ("bot", Player::Safe),
    ] {
        b.location(name, owner).expect("fresh name");
    }
    let edges = [
        ("l_S", "a", "l_R", rational(1, 1)),
        ("l_S", "b", "G", rational(1, 8)),
        ("l_S", "b", "bot", rational(7, 8)),
        ("l_R", "a", "G", rational(1, 20)),
        ("l_R", "a", "bot", rational(3, 20)),
        ("l_R", "b", "l", rational(1, 5)),
        ("l", "a", "G", rational(1, 10)),
    ];
    for (src, act, dst, rate) in edges {
        b.rate(src, act, dst, rate).expect("declared locations");
    }
    b.goal("G").expect("declared");
    b.init("l_S", integer(1)).expect("declared");
    b.build()
}

fn positive_rate(name: &str, value: f64) -> Result<Rate> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} must be a positive finite rate, got {value}")));
    }
    number::from_f64(value).ok_or_else(|| Error::InvalidArgument(format!("{name}: {value}")))
}

/// CTMDP where `l1` either enters an Erlang chain of `stages` phases with
/// rate `stage_rate` each (action `a`) or jumps to `l3` (action `b`), which
/// splits evenly between the goal `l4` and the sink `l5`.
///
/// Chain phases are named `e1..e<stages>`; the model has `stages + 4`
/// locations.
pub fn build_erlang(stages: usize, stage_rate: f64) -> Result<MarkovGame> {
    if stages == 0 {
        return Err(Error::InvalidArgument("stages must be >= 1".into()));
    }
    let stage_rate = positive_rate("stage_rate", stage_rate)?;
    let mut b = GameBuilder::new();
    b.location("l1", Player::Reach)?;
    for i in 1..=stages {
        b.location(&format!("e{i}"), Player::Reach)?;
    }
    for name in ["l3", "l4", "l5"] {
        b.location(name, Player::Reach)?;
    }
    b.rate("l1", "a", "e1", integer(1))?;
    b.rate("l1", "b", "l3", integer(1))?;
    for i in 1..stages {
        b.rate(&format!("e{i}"), "a", &format!("e{}", i + 1), stage_rate.clone())?;
    }
    b.rate(&format!("e{stages}"), "a", "l4", stage_rate)?;
    b.rate("l3", "a", "l4", rational(1, 2))?;
    b.rate("l3", "a", "l5", rational(1, 2))?;
    b.goal("l4")?;
    b.init("l1", integer(1))?;
    Ok(b.build())
}

/// Parameters of the two-chain game. The figure this model comes from does
/// not pin down every rate, so all of them are exposed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainGameParams {
    pub n: usize,
    pub fast: f64,
    pub slow: f64,
    pub cross: f64,
    /// Rates from the last safe location to `G` and to `bot`.
    pub final_split: (f64, f64),
}

impl Default for ChainGameParams {
    fn default() -> Self {
        ChainGameParams { n: 100, fast: 5.0, slow: 1.0, cross: 3.0, final_split: (2.0, 2.0) }
    }
}

/// Two chains `l1..ln` (reach) and `m1..mn` (safe). Each `li` either moves
/// along its chain (`slow`) or crosses to `mi` (`cross`); each `mi` either
/// moves along its chain (`fast`) or crosses back to `l(i+1)` (`cross`).
/// `ln` reaches `G` slowly or crosses to `mn`; `mn` splits between `G` and
/// `bot`.
pub fn build_chain_game(params: &ChainGameParams) -> Result<MarkovGame> {
    let n = params.n;
    if n < 2 {
        return Err(Error::InvalidArgument("chain length must be >= 2".into()));
    }
    let fast = positive_rate("fast", params.fast)?;
    let slow = positive_rate("slow", params.slow)?;
    let cross = positive_rate("cross", params.cross)?;
    let to_goal = positive_rate("final_split.0", params.final_split.0)?;
    let to_sink = positive_rate("final_split.1", params.final_split.1)?;

    let reach = |i: usize| format!("l{i}");
    let safe = |i: usize| format!("m{i}");
    let mut b = GameBuilder::new();
    for i in 1..=n {
        b.location(&reach(i), Player::Reach)?;
    }
    for i in 1..=n {
        b.location(&safe(i), Player::Safe)?;
    }
    b.location("G", Player::Reach)?;
    b.location("bot", Player::Safe)?;

    for i in 1..n {
        b.rate(&reach(i), "slow", &reach(i + 1), slow.clone())?;
        b.rate(&reach(i), "cross", &safe(i), cross.clone())?;
        b.rate(&safe(i), "fast", &safe(i + 1), fast.clone())?;
        b.rate(&safe(i), "cross", &reach(i + 1), cross.clone())?;
    }
    b.rate(&reach(n), "slow", "G", slow)?;
    b.rate(&reach(n), "cross", &safe(n), cross)?;
    b.rate(&safe(n), "a", "G", to_goal)?;
    b.rate(&safe(n), "a", "bot", to_sink)?;
    b.goal("G")?;
    b.init(&reach(1), integer(1))?;
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniformise, validate};

    #[test]
    fn running_example_rates_and_fill() {
        let game = build_running_example();
        let raw = running_example_rates();
        let lr = raw.location_index("l_R").unwrap();
        let b = raw.action_index(lr, "b").unwrap();
        assert_eq!(raw.actions(lr)[b].exit_mass(), rational(1, 5));
        for src in 0..game.num_locations() {
            for action in game.actions(src) {
                assert_eq!(action.exit_mass(), integer(1));
            }
        }
        assert!(validate(&game).is_valid());
        assert_eq!(game.without_self_loops(), raw);
    }

    #[test]
    fn erlang_shape() {
        let game = build_erlang(30, 10.0).unwrap();
        assert!(validate(&game).is_valid());
        assert_eq!(game.num_locations(), 34);
        let l1 = game.location_index("l1").unwrap();
        assert_eq!(game.enabled_actions(l1).len(), 2);
        assert_eq!(game.num_transitions(), 30 + 4);

        let tiny = build_erlang(1, 10.0).unwrap();
        assert_eq!(tiny.num_locations(), 5);
        assert_eq!(tiny.num_transitions(), 5);
    }

    #[test]
    fn erlang_rejects_bad_parameters() {
        assert!(build_erlang(0, 10.0).is_err());
        assert!(build_erlang(3, 0.0).is_err());
        assert!(build_erlang(3, f64::NAN).is_err());
    }

    #[test]
    fn chain_game_shape() {
        let game = build_chain_game(&ChainGameParams::default()).unwrap();
        assert!(validate(&game).is_valid());
        assert_eq!(game.num_locations(), 202);
        for i in 0..game.num_locations() {
            let name = &game.location(i).name;
            if name == "G" || name == "bot" || name == "m100" {
                assert_eq!(game.enabled_actions(i).len(), 1, "{name}");
            } else {
                assert_eq!(game.enabled_actions(i).len(), 2, "{name}");
            }
        }
        let uniform = uniformise(&game).unwrap();
        assert_eq!(uniform.uniform_rate(), Some(integer(5)));
    }

    #[test]
    fn chain_game_rejects_bad_parameters() {
        let params = ChainGameParams { n: 1, ..Default::default() };
        assert!(build_chain_game(&params).is_err());
        let params = ChainGameParams { cross: -1.0, ..Default::default() };
        assert!(build_chain_game(&params).is_err());
    }
}
