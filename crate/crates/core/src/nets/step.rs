use super::generator::Generator;
use super::NetLevel;
use crate::error::{Error, Result};
use crate::model::NormedGame;
use crate::poly::{envelope_on, merge_breaks, ActionQuality, Envelope, LocalPiecewise, Polynomial};

/// What one backward step chose: per location, the envelope of the top
/// level (action indices into [`crate::model::MarkovGame::actions`], starts
/// in `τ`), and the optimal quality at `τ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub interval: usize,
    /// `(t - ε, t)` in absolute time.
    pub bounds: (f64, f64),
    pub envelopes: Vec<Envelope>,
    pub gradients: Vec<f64>,
}

impl StepReport {
    pub fn width(&self) -> f64 {
        self.bounds.1 - self.bounds.0
    }
}

/// Per-location pins: `Some(action)` restricts a location to that action on
/// the current interval.
pub type Pins<'a> = Option<&'a [Option<usize>]>;

fn pin(pins: Pins<'_>, location: usize) -> Option<usize> {
    pins.and_then(|p| p[location])
}

/// Level-1 helper: optimal action at the right endpoint, held fixed.
pub(crate) fn single_tower(
    gen: &Generator,
    anchor: &[f64],
    width: f64,
    pins: Pins<'_>,
) -> (Vec<LocalPiecewise>, Vec<Envelope>, Vec<f64>) {
    let n = gen.num_locations();
    let mut functions = Vec::with_capacity(n);
    let mut envelopes = Vec::with_capacity(n);
    let mut gradients = Vec::with_capacity(n);
    for l in 0..n {
        let (action, gradient) = gen.best_row(l, anchor, pin(pins, l));
        functions.push(LocalPiecewise::single(width, Polynomial::linear(anchor[l], gradient)));
        envelopes.push(Envelope::constant(action, 0.0));
        gradients.push(gradient);
    }
    (functions, envelopes, gradients)
}

/// Next level at one location: qualities of the allowed actions against the
/// previous level, their optimum envelope on every common piece, and the
/// antiderivative continued from `anchor` at `τ = 0`.
fn raise_location(
    gen: &Generator,
    location: usize,
    previous: &[LocalPiecewise],
    anchor: f64,
    width: f64,
    pin: Option<usize>,
) -> Result<(LocalPiecewise, Envelope)> {
    let rows = gen.allowed(location, pin);
    if rows.len() == 1 && rows[0].targets.is_empty() {
        return Ok((
            LocalPiecewise::single(width, Polynomial::constant(anchor)),
            Envelope::constant(rows[0].action, 0.0),
        ));
    }
    let mut lists: Vec<&[f64]> = vec![previous[location].breaks()];
    for row in rows {
        for &(t, _) in &row.targets {
            lists.push(previous[t].breaks());
        }
    }
    let breaks = merge_breaks(lists, width);

    let sense = gen.sense(location);
    let mut out_breaks = vec![0.0];
    let mut out_polys = Vec::new();
    let mut env_pieces: Vec<(usize, f64)> = Vec::new();
    let mut value = anchor;
    let mut qualities = Vec::with_capacity(rows.len());
    for seg in breaks.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let mid = 0.5 * (lo + hi);
        let here = *previous[location].poly_at(mid);
        qualities.clear();
        for row in rows {
            let mut q = Polynomial::ZERO;
            for &(t, r) in &row.targets {
                q += r * (*previous[t].poly_at(mid) - here);
            }
            qualities.push(ActionQuality { action: row.action, quality: q });
        }
        let env = envelope_on(&qualities, lo, hi, sense)?;
        let pieces = env.pieces();
        for (i, &(action, start)) in pieces.iter().enumerate() {
            let end = pieces.get(i + 1).map_or(hi, |p| p.1);
            let quality = qualities
                .iter()
                .find(|q| q.action == action)
                .expect("envelope action is allowed")
                .quality;
            let poly = quality.antiderivative_through(start, value);
            value = poly.eval(end);
            if start > 0.0 {
                out_breaks.push(start);
            }
            out_polys.push(poly);
            match env_pieces.last() {
                Some(&(last, _)) if last == action => {}
                _ => env_pieces.push((action, start)),
            }
        }
    }
    out_breaks.push(width);
    let envelope = Envelope::from_pieces(env_pieces);
    Ok((LocalPiecewise::new(out_breaks, out_polys), envelope))
}

/// Builds `p_1, ..., p_k` on `[t - width, t]`, every level anchored at the
/// same right-endpoint vector. Returns the level-`k` functions, envelopes and
/// the level-1 gradients.
pub(crate) fn tower(
    gen: &Generator,
    level: NetLevel,
    anchor: &[f64],
    width: f64,
    pins: Pins<'_>,
) -> Result<(Vec<LocalPiecewise>, Vec<Envelope>, Vec<f64>)> {
    let (mut functions, mut envelopes, gradients) = single_tower(gen, anchor, width, pins);
    for _ in 2..=level.k() {
        let mut next = Vec::with_capacity(functions.len());
        let mut next_envelopes = Vec::with_capacity(functions.len());
        for l in 0..functions.len() {
            let (f, env) = raise_location(gen, l, &functions, anchor[l], width, pin(pins, l))?;
            next.push(f);
            next_envelopes.push(env);
        }
        functions = next;
        envelopes = next_envelopes;
    }
    Ok((functions, envelopes, gradients))
}

fn check_step(values: &[f64], gen: &Generator, width: f64) -> Result<()> {
    if values.len() != gen.num_locations() {
        return Err(Error::InvalidArgument(format!(
            "value vector has {} entries for {} locations",
            values.len(),
            gen.num_locations()
        )));
    }
    if !(width >= 0.0 && width <= 1.0) {
        return Err(Error::InvalidArgument(format!("step width must lie in [0, 1], got {width}")));
    }
    Ok(())
}

/// One single-net step: each location takes its optimising action at the
/// right endpoint and follows that constant gradient for `width` time units.
/// A standalone step reports the interval as `[0, width]`.
pub fn step_single(game: &NormedGame, values_at_t: &[f64], width: f64) -> Result<(Vec<f64>, StepReport)> {
    let gen = Generator::new(game);
    check_step(values_at_t, &gen, width)?;
    let (_, envelopes, gradients) = single_tower(&gen, values_at_t, width, None);
    let values = values_at_t
        .iter()
        .zip(&gradients)
        .map(|(v, c)| v + width * c)
        .collect();
    Ok((values, StepReport { interval: 0, bounds: (0.0, width), envelopes, gradients }))
}

/// One level-`k` step of length `width` anchored at the right-endpoint
/// values `anchor`. Returns the per-location pieces of `p_k` in `τ`, the
/// distance from the right endpoint.
pub fn step_level(
    game: &NormedGame,
    level: NetLevel,
    anchor: &[f64],
    width: f64,
) -> Result<(Vec<LocalPiecewise>, StepReport)> {
    let gen = Generator::new(game);
    check_step(anchor, &gen, width)?;
    if width == 0.0 {
        return Err(Error::InvalidArgument("level step needs a positive width".into()));
    }
    let (functions, envelopes, gradients) = tower(&gen, level, anchor, width, None)?;
    Ok((functions, StepReport { interval: 0, bounds: (0.0, width), envelopes, gradients }))
}
