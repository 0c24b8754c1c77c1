//! Timed positional strategies: extraction from a solve, switch-point
//! reports, the text format, best-response evaluation and simulation.

mod evaluate;
mod simulate;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{MarkovGame, Player};
use crate::nets::SolveResult;
use crate::poly::MIN_PIECE;

pub use evaluate::{evaluate_best_response, evaluate_pair, EvaluationMethod, EvaluationReport};
pub use simulate::{simulate, SimulationReport};

/// Action `action` is played on `[start, end)`; the last piece of a location
/// also covers its end.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyPiece {
    pub start: f64,
    pub end: f64,
    pub action: String,
}

/// Piecewise-constant map from (location, time) to an action, for the
/// locations of one player on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPositionalStrategy {
    player: Player,
    horizon: f64,
    pieces: BTreeMap<String, Vec<StrategyPiece>>,
}

impl TimedPositionalStrategy {
    /// Checks that every location's pieces tile `[0, horizon]`.
    pub fn new(
        player: Player,
        horizon: f64,
        pieces: BTreeMap<String, Vec<StrategyPiece>>,
    ) -> Result<TimedPositionalStrategy> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("strategy horizon must be positive, got {horizon}")));
        }
        for (location, list) in &pieces {
            let bad = |msg: String| Err(Error::StrategyMismatch(format!("location {location}: {msg}")));
            let (Some(first), Some(last)) = (list.first(), list.last()) else {
                return bad("no pieces".into());
            };
            if first.start != 0.0 {
                return bad(format!("first piece starts at {}", first.start));
            }
            if (last.end - horizon).abs() > 1e-9 * horizon.max(1.0) {
                return bad(format!("last piece ends at {}, horizon is {horizon}", last.end));
            }
            for p in list {
                if !(p.end > p.start) {
                    return bad(format!("empty piece [{}, {}]", p.start, p.end));
                }
            }
            for w in list.windows(2) {
                if w[0].end != w[1].start {
                    return bad(format!("gap between {} and {}", w[0].end, w[1].start));
                }
            }
        }
        Ok(TimedPositionalStrategy { player, horizon, pieces })
    }

    /// Every location of `player` plays a fixed action: the one named in
    /// `choices`, otherwise its first enabled action.
    pub fn constant(
        game: &MarkovGame,
        player: Player,
        horizon: f64,
        choices: &[(&str, &str)],
    ) -> Result<TimedPositionalStrategy> {
        let mut pieces = BTreeMap::new();
        for l in (0..game.num_locations()).filter(|&l| game.owner(l) == player) {
            let name = &game.location(l).name;
            let action = match choices.iter().find(|(loc, _)| loc == name) {
                Some((_, a)) => a.to_string(),
                None => game.actions(l)[game.enabled_actions(l)[0]].name.clone(),
            };
            pieces.insert(name.clone(), vec![StrategyPiece { start: 0.0, end: horizon, action }]);
        }
        let strategy = TimedPositionalStrategy::new(player, horizon, pieces)?;
        strategy.validate(game)?;
        Ok(strategy)
    }

    /// Builds the strategy of `player` from per-location choices of a
    /// backward sweep (latest first, action indices).
    pub(crate) fn from_choices(
        game: &MarkovGame,
        player: Player,
        horizon: f64,
        choices: &[Vec<(f64, f64, usize)>],
    ) -> TimedPositionalStrategy {
        let mut pieces = BTreeMap::new();
        for l in (0..game.num_locations()).filter(|&l| game.owner(l) == player) {
            let list = choices[l]
                .iter()
                .rev()
                .map(|&(start, end, a)| StrategyPiece { start, end, action: game.actions(l)[a].name.clone() })
                .collect();
            pieces.insert(game.location(l).name.clone(), list);
        }
        TimedPositionalStrategy { player, horizon, pieces }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn locations(&self) -> impl Iterator<Item = &str> {
        self.pieces.keys().map(String::as_str)
    }

    pub fn pieces(&self, location: &str) -> Option<&[StrategyPiece]> {
        self.pieces.get(location).map(Vec::as_slice)
    }

    /// Action at `(location, t)`; at a switch time the later piece applies.
    pub fn action_at(&self, location: &str, t: f64) -> Option<&str> {
        let list = self.pieces.get(location)?;
        if !(t >= 0.0 && t <= list.last()?.end) {
            return None;
        }
        let idx = list.partition_point(|p| p.end <= t).min(list.len() - 1);
        Some(&list[idx].action)
    }

    /// All interior switch times over every location, ascending, without
    /// duplicates.
    pub fn switch_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .pieces
            .values()
            .flat_map(|list| list.windows(2).filter(|w| w[0].action != w[1].action).map(|w| w[0].end))
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }

    /// The same strategy on a time axis stretched by `factor`.
    pub fn scaled(&self, factor: f64) -> TimedPositionalStrategy {
        let pieces = self
            .pieces
            .iter()
            .map(|(loc, list)| {
                let list = list
                    .iter()
                    .map(|p| StrategyPiece { start: p.start * factor, end: p.end * factor, action: p.action.clone() })
                    .collect();
                (loc.clone(), list)
            })
            .collect();
        TimedPositionalStrategy { player: self.player, horizon: self.horizon * factor, pieces }
    }

    /// Checks the strategy against `game`: locations exist and belong to the
    /// player, actions are enabled, and every location of the player with a
    /// real choice is covered.
    pub fn validate(&self, game: &MarkovGame) -> Result<()> {
        self.resolve(game).map(|_| ())
    }

    pub(crate) fn resolve(&self, game: &MarkovGame) -> Result<ResolvedStrategy> {
        let mut pieces = vec![None; game.num_locations()];
        for (name, list) in &self.pieces {
            let l = game
                .location_index(name)
                .ok_or_else(|| Error::StrategyMismatch(format!("unknown location {name}")))?;
            if game.owner(l) != self.player {
                return Err(Error::StrategyMismatch(format!(
                    "location {name} belongs to player {}, strategy is for {}",
                    game.owner(l),
                    self.player
                )));
            }
            let mut resolved = Vec::with_capacity(list.len());
            for p in list {
                let a = game
                    .action_index(l, &p.action)
                    .filter(|&a| game.actions(l)[a].is_enabled())
                    .ok_or_else(|| {
                        Error::StrategyMismatch(format!("action {} is not enabled at {name}", p.action))
                    })?;
                resolved.push((p.start, p.end, a));
            }
            pieces[l] = Some(resolved);
        }
        for l in 0..game.num_locations() {
            if game.owner(l) == self.player && pieces[l].is_none() {
                let enabled = game.enabled_actions(l);
                if enabled.len() > 1 {
                    return Err(Error::StrategyMismatch(format!(
                        "location {} is not covered",
                        game.location(l).name
                    )));
                }
                pieces[l] = Some(vec![(0.0, self.horizon, enabled[0])]);
            }
        }
        Ok(ResolvedStrategy { pieces })
    }

    /// Line format: `strategy <R|S>`, then `piece <location> <start> <end>
    /// <action>` per piece. `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = format!("strategy {}\n", self.player.symbol());
        for (loc, list) in &self.pieces {
            for p in list {
                let _ = writeln!(out, "piece {loc} {} {} {}", format_time(p.start), format_time(p.end), p.action);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<TimedPositionalStrategy> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut player = None;
        let mut pieces: BTreeMap<String, Vec<StrategyPiece>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens.as_slice() {
                [] => {}
                ["strategy", p] if player.is_none() => {
                    player = Some(
                        Player::from_symbol(p).ok_or_else(|| parse_err(line, format!("unknown player `{p}`")))?,
                    );
                }
                ["strategy", ..] => return Err(parse_err(line, "malformed or repeated strategy header".into())),
                _ if player.is_none() => return Err(parse_err(line, "expected `strategy <R|S>` header".into())),
                ["piece", loc, start, end, action] => {
                    let time = |s: &str| {
                        s.parse::<f64>()
                            .ok()
                            .filter(|t| t.is_finite())
                            .ok_or_else(|| parse_err(line, format!("invalid time `{s}`")))
                    };
                    let (start, end) = (time(start)?, time(end)?);
                    if !(end > start) {
                        return Err(parse_err(line, format!("piece end {end} is not after start {start}")));
                    }
                    let list = pieces.entry(loc.to_string()).or_default();
                    if let Some(prev) = list.last() {
                        if (prev.end - start).abs() > MIN_PIECE * prev.end.abs().max(1.0) {
                            return Err(parse_err(line, format!("piece starts at {start}, previous ends at {}", prev.end)));
                        }
                    } else if start != 0.0 {
                        return Err(parse_err(line, format!("first piece of {loc} starts at {start}")));
                    }
                    list.push(StrategyPiece { start, end, action: action.to_string() });
                }
                _ => return Err(parse_err(line, format!("unrecognised line `{}`", content.trim()))),
            }
        }
        let player = player.ok_or_else(|| parse_err(0, "missing strategy header".into()))?;
        // parsed decimals may differ from the exact previous end in the last bit
        for list in pieces.values_mut() {
            for j in 1..list.len() {
                list[j].start = list[j - 1].end;
            }
        }
        let horizon = pieces
            .values()
            .filter_map(|l| l.last())
            .map(|p| p.end)
            .fold(f64::NAN, f64::max);
        if horizon.is_nan() {
            return Err(parse_err(0, "strategy has no pieces".into()));
        }
        TimedPositionalStrategy::new(player, horizon, pieces)
    }
}

/// Plain decimal with 17 significant digits, which round-trips every `f64`.
pub fn format_time(t: f64) -> String {
    crate::io::format_significant(t, 17)
}

/// Index form of a strategy against a particular game. Locations of the
/// other player are `None`.
#[derive(Debug, Clone)]
pub(crate) struct ResolvedStrategy {
    pieces: Vec<Option<Vec<(f64, f64, usize)>>>,
}

impl ResolvedStrategy {
    pub fn action_at(&self, location: usize, t: f64) -> Option<usize> {
        let list = self.pieces[location].as_ref()?;
        let idx = list.partition_point(|p| p.1 <= t).min(list.len() - 1);
        Some(list[idx].2)
    }

    pub fn switch_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .pieces
            .iter()
            .flatten()
            .flat_map(|list| list.windows(2).map(|w| w[0].1))
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }

    /// Writes the pinned action at time `t` into `pins` for every covered
    /// location.
    pub fn pin_at(&self, t: f64, pins: &mut [Option<usize>]) {
        for (l, pin) in pins.iter_mut().enumerate() {
            if let Some(a) = self.action_at(l, t) {
                *pin = Some(a);
            }
        }
    }
}

/// The strategy of `player` computed by a solve.
pub fn extract_strategy(result: &SolveResult, player: Player) -> TimedPositionalStrategy {
    result.strategy(player).clone()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchPoint {
    pub location: String,
    pub time: f64,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SwitchPointReport {
    /// Ordered by location name, then time.
    pub points: Vec<SwitchPoint>,
    pub per_location: BTreeMap<String, usize>,
    pub total: usize,
}

/// Interior times where a location's action changes.
pub fn count_switch_points(strategy: &TimedPositionalStrategy) -> SwitchPointReport {
    let mut report = SwitchPointReport::default();
    for (loc, list) in &strategy.pieces {
        let mut count = 0;
        for w in list.windows(2).filter(|w| w[0].action != w[1].action) {
            report.points.push(SwitchPoint {
                location: loc.clone(),
                time: w[0].end,
                before: w[0].action.clone(),
                after: w[1].action.clone(),
            });
            count += 1;
        }
        report.per_location.insert(loc.clone(), count);
        report.total += count;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_running_example;

    fn piece(start: f64, end: f64, action: &str) -> StrategyPiece {
        StrategyPiece { start, end, action: action.into() }
    }

    fn two_piece() -> TimedPositionalStrategy {
        let mut pieces = BTreeMap::new();
        pieces.insert("l_R".to_string(), vec![piece(0.0, 1.5, "b"), piece(1.5, 4.0, "a")]);
        TimedPositionalStrategy::new(Player::Reach, 4.0, pieces).unwrap()
    }

    #[test]
    fn half_open_pieces() {
        let s = two_piece();
        assert_eq!(s.action_at("l_R", 0.0), Some("b"));
        assert_eq!(s.action_at("l_R", 1.4999), Some("b"));
        assert_eq!(s.action_at("l_R", 1.5), Some("a"));
        assert_eq!(s.action_at("l_R", 4.0), Some("a"));
        assert_eq!(s.action_at("l_R", 4.1), None);
        assert_eq!(s.action_at("l", 1.0), None);
    }

    #[test]
    fn switch_report() {
        let report = count_switch_points(&two_piece());
        assert_eq!(report.total, 1);
        assert_eq!(report.points[0].time, 1.5);
        assert_eq!(report.points[0].before, "b");
        assert_eq!(report.points[0].after, "a");
    }

    #[test]
    fn constant_strategy_has_no_switches() {
        let game = build_running_example();
        let s = TimedPositionalStrategy::constant(&game, Player::Reach, 4.0, &[("l_R", "b")]).unwrap();
        assert_eq!(count_switch_points(&s).total, 0);
        assert_eq!(s.action_at("l_R", 2.0), Some("b"));
        assert_eq!(s.action_at("l", 2.0), Some("a"));
    }

    #[test]
    fn tiling_is_checked() {
        let mut pieces = BTreeMap::new();
        pieces.insert("x".to_string(), vec![piece(0.0, 1.0, "a"), piece(1.5, 4.0, "b")]);
        assert!(TimedPositionalStrategy::new(Player::Safe, 4.0, pieces).is_err());
        let mut pieces = BTreeMap::new();
        pieces.insert("x".to_string(), vec![piece(0.0, 3.0, "a")]);
        assert!(TimedPositionalStrategy::new(Player::Safe, 4.0, pieces).is_err());
    }

    #[test]
    fn validation_against_game() {
        let game = build_running_example();
        assert!(two_piece().validate(&game).is_ok());
        let mut pieces = BTreeMap::new();
        pieces.insert("l_R".to_string(), vec![piece(0.0, 4.0, "z")]);
        let bad = TimedPositionalStrategy::new(Player::Reach, 4.0, pieces).unwrap();
        assert!(matches!(bad.validate(&game), Err(Error::StrategyMismatch(_))));
        let mut pieces = BTreeMap::new();
        pieces.insert("l_S".to_string(), vec![piece(0.0, 4.0, "a")]);
        let wrong_owner = TimedPositionalStrategy::new(Player::Reach, 4.0, pieces).unwrap();
        assert!(wrong_owner.validate(&game).is_err());
        let uncovered = TimedPositionalStrategy::new(Player::Safe, 4.0, BTreeMap::new()).unwrap();
        assert!(uncovered.validate(&game).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut pieces = BTreeMap::new();
        let t = 4.0 - 5.0 / 63.0;
        pieces.insert("l_R".to_string(), vec![piece(0.0, t, "b"), piece(t, 4.0, "a")]);
        pieces.insert("l".to_string(), vec![piece(0.0, 4.0, "a")]);
        let s = TimedPositionalStrategy::new(Player::Reach, 4.0, pieces).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("strategy R\n"));
        assert_eq!(TimedPositionalStrategy::parse(&text).unwrap(), s);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = TimedPositionalStrategy::parse("strategy R\npiece l_R 0 x a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = TimedPositionalStrategy::parse("piece l_R 0 1 a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = TimedPositionalStrategy::parse("strategy Q\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = TimedPositionalStrategy::parse("strategy S\n# c\npiece x 0 1 a\npiece x 2 3 a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn time_formatting() {
        assert_eq!(format_time(0.0), "0");
        assert_eq!(format_time(4.0), "4.0000000000000000");
        assert_eq!(format_time(1.5), "1.5000000000000000");
        let t = 4.0 - 5.0 / 63.0;
        let s = format_time(t);
        assert!(s.len() >= 14, "{s}");
        assert_eq!(s.parse::<f64>().unwrap(), t);
        assert_eq!(format_time(1e-5).parse::<f64>().unwrap(), 1e-5);
    }
}
