//! The textual model format and result files.
//!
//! ```text
//! ctmg 1
//! location l_S S
//! location G R
//! goal G
//! init l_S 1
//! rate l_S b G 1/8
//! ```

mod results;

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::number::{format_rational, parse_rational};
use crate::model::{GameBuilder, MarkovGame, Player, ABSORBING_ACTION};

pub use results::{format_significant, ResultFile, ResultRow};

const HEADER: &str = "ctmg 1";

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Parses a model file. Structural problems (unknown directives, undeclared
/// or duplicate identifiers, malformed numbers) are reported with their line;
/// semantic checks are left to [`crate::model::validate`].
pub fn parse_model(text: &str) -> Result<MarkovGame> {
    let mut builder = GameBuilder::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !seen_header {
            if tokens != ["ctmg", "1"] {
                return Err(err(format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let ids = |names: &[&str]| -> Result<()> {
            match names.iter().find(|n| !is_identifier(n)) {
                Some(bad) => Err(err(format!("invalid identifier `{bad}`"))),
                None => Ok(()),
            }
        };
        let number = |s: &str| parse_rational(s).ok_or_else(|| err(format!("invalid number `{s}`")));
        let structural = |e: Error| match e {
            Error::InvalidArgument(message) => err(message),
            other => other,
        };
        match tokens.as_slice() {
            ["location", id, owner] => {
                ids(&[id])?;
                let owner = Player::from_symbol(owner).ok_or_else(|| err(format!("unknown player `{owner}`")))?;
                builder.location(id, owner).map_err(structural)?;
            }
            ["goal", id] => {
                ids(&[id])?;
                builder.goal(id).map_err(structural)?;
            }
            ["init", id, p] => {
                ids(&[id])?;
                builder.init(id, number(p)?).map_err(structural)?;
            }
            ["rate", src, action, dst, r] => {
                ids(&[src, action, dst])?;
                if action == &ABSORBING_ACTION {
                    return Err(err(format!("action name `{ABSORBING_ACTION}` is reserved")));
                }
                builder.rate(src, action, dst, number(r)?).map_err(structural)?;
            }
            [directive, ..] => return Err(err(format!("unrecognised directive `{directive}`"))),
            [] => unreachable!(),
        }
    }
    if !seen_header {
        return Err(Error::Parse { line: 1, message: format!("missing header `{HEADER}`") });
    }
    Ok(builder.build())
}

pub fn read_model(path: &Path) -> Result<MarkovGame> {
    parse_model(&std::fs::read_to_string(path)?)
}

/// Prints a model in the file format. Self-loops and the implicit absorbing
/// action are omitted; parsing the output gives `game.without_self_loops()`.
pub fn print_model(game: &MarkovGame) -> String {
    let mut out = format!("{HEADER}\n");
    for loc in game.locations() {
        out.push_str(&format!("location {} {}\n", loc.name, loc.owner.symbol()));
    }
    for l in game.goal_locations() {
        out.push_str(&format!("goal {}\n", game.location(l).name));
    }
    for (l, p) in game.initial().iter().enumerate() {
        if !num::Zero::is_zero(p) {
            out.push_str(&format!("init {} {}\n", game.location(l).name, format_rational(p)));
        }
    }
    for src in 0..game.num_locations() {
        for action in game.actions(src) {
            if action.name == ABSORBING_ACTION {
                continue;
            }
            for (dst, rate) in action.rates.iter().filter(|(t, _)| *t != src) {
                out.push_str(&format!(
                    "rate {} {} {} {}\n",
                    game.location(src).name,
                    action.name,
                    game.location(*dst).name,
                    format_rational(rate)
                ));
            }
        }
    }
    out
}
