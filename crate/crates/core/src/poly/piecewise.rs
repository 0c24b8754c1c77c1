use super::{Polynomial, MIN_PIECE};
use crate::error::{Error, Result};

/// One polynomial piece over absolute time `[start, end]`, evaluated as
/// `poly(origin - t)`. Solvers use the right endpoint of the enclosing
/// interval as `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub origin: f64,
    pub poly: Polynomial,
}

impl Piece {
    pub fn eval(&self, t: f64) -> f64 {
        self.poly.eval(self.origin - t)
    }
}

/// Continuous piecewise polynomial over `[t_lo, t_hi]`. Pieces are stored in
/// increasing time; [`PiecewiseFunction::breakpoints`] lists them from the
/// right end backwards.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    pub fn new(pieces: Vec<Piece>) -> Result<PiecewiseFunction> {
        if pieces.is_empty() {
            return Err(Error::InvalidArgument("piecewise function needs a piece".into()));
        }
        for w in pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::InvalidArgument(format!(
                    "pieces not contiguous at {} / {}",
                    w[0].end, w[1].start
                )));
            }
        }
        if pieces.iter().any(|p| !(p.end > p.start)) {
            return Err(Error::InvalidArgument("breakpoints must be strictly ordered".into()));
        }
        Ok(PiecewiseFunction { pieces })
    }

    pub fn constant(start: f64, end: f64, value: f64) -> PiecewiseFunction {
        PiecewiseFunction {
            pieces: vec![Piece { start, end, origin: end, poly: Polynomial::constant(value) }],
        }
    }

    /// Builds a function from pieces supplied right-to-left, the order in
    /// which a backward sweep produces them.
    pub fn from_backward(mut pieces: Vec<Piece>) -> Result<PiecewiseFunction> {
        pieces.reverse();
        PiecewiseFunction::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].start, self.pieces[self.pieces.len() - 1].end)
    }

    /// `t_hi = b_0 > b_1 > ... > b_m = t_lo`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pieces.iter().rev().map(|p| p.end).collect();
        out.push(self.pieces[0].start);
        out
    }

    fn piece_at(&self, t: f64) -> Result<&Piece> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::InvalidArgument(format!("time {t} outside [{lo}, {hi}]")));
        }
        let idx = self.pieces.partition_point(|p| p.end <= t);
        Ok(&self.pieces[idx.min(self.pieces.len() - 1)])
    }

    /// Value at `t`; at a breakpoint the later piece applies.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.piece_at(t)?.eval(t))
    }

    /// Largest jump between left and right limits over all internal breakpoints.
    pub fn max_discontinuity(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| (w[0].eval(w[0].end) - w[1].eval(w[1].start)).abs())
            .fold(0.0, f64::max)
    }
}

/// Piecewise polynomial on `[0, ε]` in the backwards variable `τ`, with every
/// piece written in the same `τ` (not re-centred per piece).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPiecewise {
    /// `0 = s_0 < s_1 < ... < s_m = ε`.
    breaks: Vec<f64>,
    polys: Vec<Polynomial>,
}

impl LocalPiecewise {
    pub fn single(width: f64, poly: Polynomial) -> LocalPiecewise {
        LocalPiecewise { breaks: vec![0.0, width], polys: vec![poly] }
    }

    pub fn new(breaks: Vec<f64>, polys: Vec<Polynomial>) -> LocalPiecewise {
        debug_assert_eq!(breaks.len(), polys.len() + 1);
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        LocalPiecewise { breaks, polys }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn width(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }

    /// Index of the piece containing `tau`; a point on a break belongs to the
    /// piece on its right (larger `τ`) unless it is the last break.
    pub fn piece_index(&self, tau: f64) -> usize {
        let idx = self.breaks[1..].partition_point(|&b| b <= tau);
        idx.min(self.polys.len() - 1)
    }

    pub fn poly_at(&self, tau: f64) -> &Polynomial {
        &self.polys[self.piece_index(tau)]
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.poly_at(tau).eval(tau)
    }

    /// Value at the far end `τ = ε`.
    pub fn end_value(&self) -> f64 {
        let last = self.polys.len() - 1;
        self.polys[last].eval(self.breaks[last + 1])
    }

    /// Absolute-time pieces for the interval `[right - ε, right]`, latest first.
    pub fn to_pieces(&self, right: f64) -> Vec<Piece> {
        self.polys
            .iter()
            .enumerate()
            .map(|(i, poly)| Piece {
                start: right - self.breaks[i + 1],
                end: right - self.breaks[i],
                origin: right,
                poly: *poly,
            })
            .collect()
    }
}

/// Sorted union of several break lists on `[0, width]`, with points closer
/// than [`MIN_PIECE`] merged.
pub(crate) fn merge_breaks<'a>(lists: impl IntoIterator<Item = &'a [f64]>, width: f64) -> Vec<f64> {
    let mut all: Vec<f64> = lists.into_iter().flatten().copied().collect();
    all.push(0.0);
    all.push(width);
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for b in all {
        if b < 0.0 || b > width {
            continue;
        }
        match out.last() {
            Some(&last) if b - last < MIN_PIECE => {}
            _ => out.push(b),
        }
    }
    // The final break must be exactly `width`.
    if let Some(last) = out.last_mut() {
        if width - *last < MIN_PIECE {
            *last = width;
        }
    }
    if out.len() >= 2 && out[out.len() - 2] == width {
        out.pop();
    }
    if out.len() < 2 {
        out = vec![0.0, width];
    }
    out
}
