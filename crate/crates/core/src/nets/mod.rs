//! ε-net solvers: interval budgeting, one-interval steps of levels 1 to 4 and
//! the backward sweep over `[0, T]`.

mod budget;
mod generator;
mod solve;
mod step;

pub use budget::{
    choose_epsilon, choose_epsilon_with_guard, grid_for_epsilon, interval_count, step_budget_table,
    BudgetRow, NetLevel, DEFAULT_INTERVAL_GUARD,
};
pub use generator::{ActionRow, Generator};
pub use solve::{solve, SolveResult, SolverConfig, StepTarget};
pub use step::{step_level, step_single, StepReport};

pub(crate) use solve::sweep;
