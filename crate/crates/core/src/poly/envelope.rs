use std::cmp::Ordering;

use super::{roots_in_interval, Polynomial, MIN_PIECE, TIE_TOLERANCE};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

impl Sense {
    fn orient(self, value: f64) -> f64 {
        match self {
            Sense::Max => value,
            Sense::Min => -value,
        }
    }
}

/// Quality of one action as a polynomial in `τ`. Action identifiers are
/// compared numerically for tie-breaking: the smaller identifier wins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionQuality {
    pub action: usize,
    pub quality: Polynomial,
}

/// The optimising action over consecutive ranges of `τ`: each entry
/// `(action, start)` holds until the next entry's start.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pieces: Vec<(usize, f64)>,
}

impl Envelope {
    pub fn constant(action: usize, start: f64) -> Envelope {
        Envelope { pieces: vec![(action, start)] }
    }

    /// Pieces given as `(action, start)` with strictly increasing starts.
    pub(crate) fn from_pieces(pieces: Vec<(usize, f64)>) -> Envelope {
        debug_assert!(pieces.windows(2).all(|w| w[0].1 < w[1].1));
        Envelope { pieces }
    }

    pub fn pieces(&self) -> &[(usize, f64)] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Number of action changes inside the range.
    pub fn switches(&self) -> usize {
        self.pieces.len().saturating_sub(1)
    }

    pub fn action_at(&self, tau: f64) -> usize {
        let idx = self.pieces.partition_point(|&(_, start)| start <= tau);
        self.pieces[idx.saturating_sub(1)].0
    }

    /// Drops pieces shorter than [`MIN_PIECE`] and merges equal neighbours.
    fn normalise(mut self, lo: f64, hi: f64) -> Envelope {
        if let Some(first) = self.pieces.first_mut() {
            first.1 = lo;
        }
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.pieces.len());
        for i in 0..self.pieces.len() {
            let (action, start) = self.pieces[i];
            let end = self.pieces.get(i + 1).map_or(hi, |p| p.1);
            if end - start < MIN_PIECE && !out.is_empty() {
                continue;
            }
            match out.last() {
                Some(&(last, _)) if last == action => {}
                _ => out.push((action, start)),
            }
        }
        // a short first piece is absorbed by its successor
        if out.len() >= 2 && out[1].1 - out[0].1 < MIN_PIECE {
            out.remove(0);
            out[0].1 = lo;
        }
        self.pieces = out;
        self
    }
}

/// Exact optimum envelope of affine qualities over `τ ∈ [0, ε]` by the
/// sorted sweep: actions are visited in decreasing quality at `τ = 0`, the
/// best one seeds the list, and each further action either is dominated at
/// `τ = ε`, or pops pieces whose start lies after its crossing before
/// appending itself. Every action contributes at most one piece.
///
/// Higher-degree coefficients are ignored; use [`envelope_poly`] for those.
pub fn envelope_linear(qualities: &[ActionQuality], eps: f64, sense: Sense) -> Envelope {
    linear_sweep(qualities, 0.0, eps, sense)
}

fn linear_sweep(qualities: &[ActionQuality], lo: f64, hi: f64, sense: Sense) -> Envelope {
    assert!(!qualities.is_empty(), "envelope of no actions");
    struct Line {
        action: usize,
        at_lo: f64,
        slope: f64,
        intercept: f64,
    }
    let mut lines: Vec<Line> = qualities
        .iter()
        .map(|q| {
            let intercept = sense.orient(q.quality.coeff(0));
            let slope = sense.orient(q.quality.coeff(1));
            Line { action: q.action, at_lo: intercept + slope * lo, slope, intercept }
        })
        .collect();
    lines.sort_by(|a, b| {
        b.at_lo
            .partial_cmp(&a.at_lo)
            .unwrap_or(Ordering::Equal)
            .then(b.slope.partial_cmp(&a.slope).unwrap_or(Ordering::Equal))
            .then(a.action.cmp(&b.action))
    });
    let value = |line: &Line, tau: f64| line.intercept + line.slope * tau;

    // (index into lines, start)
    let mut stack: Vec<(usize, f64)> = vec![(0, lo)];
    for i in 1..lines.len() {
        let (last, _) = *stack.last().expect("stack never empty");
        if value(&lines[i], hi) <= value(&lines[last], hi) + TIE_TOLERANCE {
            continue;
        }
        loop {
            let (top, start) = *stack.last().expect("stack never empty");
            let slope_gap = lines[i].slope - lines[top].slope;
            let crossing = if slope_gap.abs() < TIE_TOLERANCE {
                f64::NEG_INFINITY
            } else {
                (lines[top].intercept - lines[i].intercept) / slope_gap
            };
            if crossing > start + MIN_PIECE {
                stack.push((i, crossing.min(hi)));
                break;
            }
            stack.pop();
            if stack.is_empty() {
                stack.push((i, lo));
                break;
            }
        }
    }
    Envelope {
        pieces: stack.into_iter().map(|(i, s)| (lines[i].action, s)).collect(),
    }
    .normalise(lo, hi)
}

/// Optimum envelope of qualities of degree at most three over `[0, ε]`:
/// every pairwise crossing is a candidate breakpoint, the winner of each
/// elementary range is decided at its midpoint, and equal neighbours merge.
pub fn envelope_poly(qualities: &[ActionQuality], eps: f64, sense: Sense) -> Result<Envelope> {
    candidate_sweep(qualities, 0.0, eps, sense)
}

fn candidate_sweep(qualities: &[ActionQuality], lo: f64, hi: f64, sense: Sense) -> Result<Envelope> {
    assert!(!qualities.is_empty(), "envelope of no actions");
    if qualities.len() == 1 {
        return Ok(Envelope::constant(qualities[0].action, lo));
    }
    let mut cuts = vec![lo, hi];
    for (i, qi) in qualities.iter().enumerate() {
        for qj in &qualities[i + 1..] {
            let diff = qi.quality - qj.quality;
            cuts.extend(roots_in_interval(&diff, lo, hi)?);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a < MIN_PIECE);
    if hi - cuts[cuts.len() - 1] > 0.0 {
        let last = cuts.len() - 1;
        if hi - cuts[last] < MIN_PIECE {
            cuts[last] = hi;
        } else {
            cuts.push(hi);
        }
    }
    let mut pieces = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        pieces.push((best_at(qualities, mid, sense), w[0]));
    }
    Ok(Envelope { pieces }.normalise(lo, hi))
}

/// Optimum action at a single point, smaller identifier on ties.
pub(crate) fn best_at(qualities: &[ActionQuality], tau: f64, sense: Sense) -> usize {
    let mut best = &qualities[0];
    let mut best_value = sense.orient(best.quality.eval(tau));
    for q in &qualities[1..] {
        let v = sense.orient(q.quality.eval(tau));
        if v > best_value + TIE_TOLERANCE
            || ((v - best_value).abs() <= TIE_TOLERANCE && q.action < best.action)
        {
            best = q;
            best_value = v;
        }
    }
    best.action
}

/// Envelope over `[lo, hi]`, choosing the sorted sweep when all qualities
/// are affine there and the candidate sweep otherwise.
pub fn envelope_on(qualities: &[ActionQuality], lo: f64, hi: f64, sense: Sense) -> Result<Envelope> {
    if qualities.len() == 1 {
        return Ok(Envelope::constant(qualities[0].action, lo));
    }
    if qualities.iter().all(|q| q.quality.effective_degree() <= 1) {
        Ok(linear_sweep(qualities, lo, hi, sense))
    } else {
        candidate_sweep(qualities, lo, hi, sense)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(action: usize, coeffs: &[f64]) -> ActionQuality {
        ActionQuality { action, quality: Polynomial::new(coeffs) }
    }

    /// Dense-sampling oracle: the envelope's action must attain the
    /// pointwise optimum within 1e-10 at every sample.
    fn check_against_sampling(qs: &[ActionQuality], eps: f64, sense: Sense, env: &Envelope) {
        let n = 10_000;
        for i in 0..=n {
            let tau = eps * i as f64 / n as f64;
            let values: Vec<f64> = qs.iter().map(|q| q.quality.eval(tau)).collect();
            let opt = match sense {
                Sense::Max => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                Sense::Min => values.iter().cloned().fold(f64::INFINITY, f64::min),
            };
            let chosen = env.action_at(tau);
            let idx = qs.iter().position(|q| q.action == chosen).unwrap();
            assert!(
                (values[idx] - opt).abs() <= 1e-10,
                "tau {tau}: chose {chosen} ({}) but optimum {opt}; env {env:?}",
                values[idx]
            );
        }
    }

    #[test]
    fn worked_example_switches_at_five_sixty_thirds() {
        let qs = [q(0, &[0.0286, -0.00572]), q(1, &[0.0274, 0.0094])];
        let env = envelope_linear(&qs, 0.1, Sense::Max);
        assert_eq!(env.len(), 2);
        assert_eq!(env.pieces()[0], (0, 0.0));
        assert_eq!(env.pieces()[1].0, 1);
        assert!((env.pieces()[1].1 - 5.0 / 63.0).abs() < 1e-15);
    }

    #[test]
    fn single_action() {
        let env = envelope_linear(&[q(3, &[0.5, 1.0])], 0.1, Sense::Max);
        assert_eq!(env.pieces(), &[(3, 0.0)]);
    }

    #[test]
    fn parallel_lines_no_crossing() {
        let qs = [q(0, &[0.1, 1.0]), q(1, &[0.3, 1.0]), q(2, &[0.2, 1.0])];
        assert_eq!(envelope_linear(&qs, 1.0, Sense::Max).pieces(), &[(1, 0.0)]);
        assert_eq!(envelope_linear(&qs, 1.0, Sense::Min).pieces(), &[(0, 0.0)]);
    }

    #[test]
    fn chord_case_needs_middle_line() {
        // max(1 - τ, 0.6, τ) on [0, 1]
        let qs = [q(0, &[1.0, -1.0]), q(1, &[0.6]), q(2, &[0.0, 1.0])];
        let env = envelope_linear(&qs, 1.0, Sense::Max);
        assert_eq!(env.len(), 3);
        assert!((env.pieces()[1].1 - 0.4).abs() < 1e-15);
        assert!((env.pieces()[2].1 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn identical_lines_prefer_smaller_id() {
        let qs = [q(4, &[0.2, 0.1]), q(1, &[0.2, 0.1])];
        assert_eq!(envelope_linear(&qs, 1.0, Sense::Max).pieces(), &[(1, 0.0)]);
        assert_eq!(envelope_poly(&qs, 1.0, Sense::Max).unwrap().pieces(), &[(1, 0.0)]);
    }

    #[test]
    fn quadratic_vs_linear_crossing() {
        let qs = [q(0, &[0.0, 0.0, 1.0]), q(1, &[0.0, 1.0])];
        let env = envelope_poly(&qs, 2.0, Sense::Max).unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(env.pieces()[0], (1, 0.0));
        assert_eq!(env.pieces()[1].0, 0);
        assert!((env.pieces()[1].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poly_matches_linear_on_affine_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..7);
            let qs: Vec<_> = (0..n)
                .map(|i| q(i, &[rng.gen_range(-1.0..1.0), rng.gen_range(-5.0..5.0)]))
                .collect();
            for sense in [Sense::Max, Sense::Min] {
                let a = envelope_linear(&qs, 0.3, sense);
                let b = envelope_poly(&qs, 0.3, sense).unwrap();
                assert_eq!(a.len(), b.len(), "{qs:?}");
                for (pa, pb) in a.pieces().iter().zip(b.pieces()) {
                    assert_eq!(pa.0, pb.0);
                    assert!((pa.1 - pb.1).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_quadratics_match_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let qs: Vec<_> = (0..5)
                .map(|i| {
                    q(i, &[
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-5.0..5.0),
                    ])
                })
                .collect();
            let env = envelope_poly(&qs, 1.0, Sense::Max).unwrap();
            check_against_sampling(&qs, 1.0, Sense::Max, &env);
        }
    }

    #[test]
    fn cubic_qualities() {
        let qs = [
            q(0, &[-0.045, 0.59, -1.5, 1.0]),
            q(1, &[0.0]),
            q(2, &[0.01, -0.1, 0.0, 0.3]),
        ];
        for sense in [Sense::Max, Sense::Min] {
            let env = envelope_poly(&qs, 1.0, sense).unwrap();
            check_against_sampling(&qs, 1.0, sense, &env);
        }
    }

    #[test]
    fn envelope_on_subrange_starts_at_lo() {
        let qs = [q(0, &[0.0286, -0.00572]), q(1, &[0.0274, 0.0094])];
        let env = envelope_on(&qs, 0.05, 0.1, Sense::Max).unwrap();
        assert_eq!(env.pieces()[0], (0, 0.05));
        let env = envelope_on(&qs, 0.09, 0.1, Sense::Max).unwrap();
        assert_eq!(env.pieces(), &[(1, 0.09)]);
    }

    proptest! {
        #[test]
        fn linear_envelope_is_exact(
            raw in proptest::collection::vec((-1.0f64..1.0, -10.0f64..10.0), 1..8),
            eps in 0.01f64..1.0,
            max in any::<bool>(),
        ) {
            let qs: Vec<_> = raw.iter().enumerate().map(|(i, (a, b))| q(i, &[*a, *b])).collect();
            let sense = if max { Sense::Max } else { Sense::Min };
            let env = envelope_linear(&qs, eps, sense);
            prop_assert!(env.len() <= qs.len());
            prop_assert!(env.pieces().windows(2).all(|w| w[0].1 < w[1].1));
            check_against_sampling(&qs, eps, sense, &env);
        }
    }
}
