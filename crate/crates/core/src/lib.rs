//! Time-bounded reachability for continuous-time Markov decision processes
//! and games.
//!
//! A game is normalised to unit uniform rate ([`model::normalise`]), solved
//! backwards over `[0, T]` with ε-nets of level 1 to 4 ([`nets::solve`]),
//! and the resulting strategies can be evaluated against a best-responding
//! opponent or simulated ([`strategy`]). The [`oracle`] module provides
//! independent reference values for testing.
//!
//! ```
//! use ctmg_nets::model::build_running_example;
//! use ctmg_nets::nets::{solve, NetLevel, SolverConfig};
//!
//! let game = build_running_example();
//! let result = solve(&game, &SolverConfig::with_precision(NetLevel::DOUBLE, 4.0, 1e-4)).unwrap();
//! let start = game.location_index("l_S").unwrap();
//! assert!(result.values[start] > 0.0 && result.values[start] < 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod io;
pub mod model;
pub mod nets;
pub mod oracle;
pub mod poly;
pub mod strategy;

pub use error::{Error, Result};
