use crate::model::{number, MarkovGame, Player};
use crate::poly::Sense;

/// One enabled action with its off-diagonal rates as floats.
#[derive(Debug, Clone)]
pub struct ActionRow {
    /// Index into [`MarkovGame::actions`] for the source location.
    pub action: usize,
    pub targets: Vec<(usize, f64)>,
}

impl ActionRow {
    /// `Σ_{l'} R(l,a,l') (v(l') - v(l))`, i.e. `Σ_{l'} Q(l,a,l') v(l')`.
    pub fn quality(&self, values: &[f64], source: usize) -> f64 {
        let here = values[source];
        self.targets.iter().map(|&(t, r)| r * (values[t] - here)).sum()
    }
}

/// Dense floating-point view of a game used by the solvers. Only enabled
/// actions are kept, in lexicographic order of their names. Self-loops never
/// matter to the Bellman right-hand side, so the same view serves uniform,
/// normed and general games.
#[derive(Debug, Clone)]
pub struct Generator {
    owners: Vec<Player>,
    rows: Vec<Vec<ActionRow>>,
    goal: Vec<f64>,
}

impl Generator {
    pub fn new(game: &MarkovGame) -> Generator {
        let n = game.num_locations();
        let mut rows = Vec::with_capacity(n);
        for src in 0..n {
            let mut acts = Vec::new();
            for ai in game.enabled_actions(src) {
                let targets = game.actions(src)[ai]
                    .rates
                    .iter()
                    .filter(|(t, r)| *t != src && !num::Zero::is_zero(r))
                    .map(|(t, r)| (*t, number::to_f64(r)))
                    .collect();
                acts.push(ActionRow { action: ai, targets });
            }
            rows.push(acts);
        }
        Generator {
            owners: (0..n).map(|i| game.owner(i)).collect(),
            rows,
            goal: game.goal_indicator(),
        }
    }

    pub fn num_locations(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self, location: usize) -> &[ActionRow] {
        &self.rows[location]
    }

    pub fn owner(&self, location: usize) -> Player {
        self.owners[location]
    }

    pub fn sense(&self, location: usize) -> Sense {
        match self.owners[location] {
            Player::Reach => Sense::Max,
            Player::Safe => Sense::Min,
        }
    }

    pub fn goal_indicator(&self) -> &[f64] {
        &self.goal
    }

    /// Rows allowed at `location`, restricted to a single pinned action when
    /// one is given and enabled.
    pub fn allowed(&self, location: usize, pin: Option<usize>) -> &[ActionRow] {
        let rows = &self.rows[location];
        match pin {
            Some(action) => match rows.iter().position(|r| r.action == action) {
                Some(i) => &rows[i..=i],
                None => rows,
            },
            None => rows,
        }
    }

    /// Optimising row at a single value vector and its quality, smaller
    /// action index on ties.
    pub fn best_row(&self, location: usize, values: &[f64], pin: Option<usize>) -> (usize, f64) {
        let sense = self.sense(location);
        let rows = self.allowed(location, pin);
        let mut best = rows[0].action;
        let mut best_q = rows[0].quality(values, location);
        for row in &rows[1..] {
            let q = row.quality(values, location);
            let better = match sense {
                Sense::Max => q > best_q + crate::poly::TIE_TOLERANCE,
                Sense::Min => q < best_q - crate::poly::TIE_TOLERANCE,
            };
            if better {
                best = row.action;
                best_q = q;
            }
        }
        (best, best_q)
    }
}
