use super::Polynomial;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Real roots of `p` in `[lo, hi]`, ascending.
///
/// Linear and quadratic polynomials use closed forms (the quadratic one in
/// its cancellation-free variant). Cubics are split at their critical points
/// and every sign change is refined by safeguarded Newton iteration.
/// Polynomials that vanish identically have no isolated roots and yield an
/// empty list.
pub fn roots_in_interval(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty root interval [{lo}, {hi}]")));
    }
    let degree = p.effective_degree();
    let c = p.coeffs();
    let roots = match degree {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => quadratic_roots(c[2], c[1], c[0]),
        3 => cubic_roots(p, lo, hi),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "root finding supports degree <= 3, got {degree}"
            )))
        }
    };
    let slack = 1e-14 * (hi - lo).max(1.0);
    let mut inside: Vec<f64> = roots
        .into_iter()
        .filter(|r| r.is_finite() && *r >= lo - slack && *r <= hi + slack)
        .map(|r| r.clamp(lo, hi))
        .collect();
    inside.sort_by(f64::total_cmp);
    inside.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1e-2));
    Ok(inside)
}

/// Roots of `a x² + b x + c` with `a != 0`. The discriminant threshold is
/// relative to the magnitude of its two terms.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).abs() + (4.0 * a * c).abs();
    let threshold = 1e-14 * scale;
    if disc < -threshold {
        return Vec::new();
    }
    if disc.abs() <= threshold {
        return vec![-b / (2.0 * a)];
    }
    let sqrt = disc.sqrt();
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * sqrt);
    let mut roots = vec![q / a];
    if q != 0.0 {
        roots.push(c / q);
    } else {
        roots.push(-roots[0]);
    }
    roots
}

fn cubic_roots(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
    let d = p.derivative();
    let dc = d.coeffs();
    let mut cuts = vec![lo];
    let critical = if dc[2] != 0.0 {
        quadratic_roots(dc[2], dc[1], dc[0])
    } else if dc[1] != 0.0 {
        vec![-dc[0] / dc[1]]
    } else {
        Vec::new()
    };
    let mut critical: Vec<f64> = critical.into_iter().filter(|x| *x > lo && *x < hi).collect();
    critical.sort_by(f64::total_cmp);
    cuts.extend(critical);
    cuts.push(hi);

    let scale = p.max_abs_coeff();
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa == 0.0 {
            roots.push(a);
        }
        if fb == 0.0 {
            roots.push(b);
            continue;
        }
        if fa.signum() != fb.signum() && fa != 0.0 {
            roots.push(bracketed_newton(p, &d, a, b, fa));
        } else if fa != 0.0 && fb.abs() <= 1e-15 * scale {
            // touching zero at a critical point
            roots.push(b);
        }
    }
    roots
}

/// Newton steps kept inside a shrinking sign-change bracket; falls back to
/// bisection whenever a step would leave it or stalls.
fn bracketed_newton(p: &Polynomial, d: &Polynomial, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sign_a = fa.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITERATIONS {
        let fx = p.eval(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        if (b - a) <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
        let dx = d.eval(x);
        let newton = if dx != 0.0 { x - fx / dx } else { f64::NAN };
        let previous = x;
        x = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (x - previous).abs() <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}
