use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RbError;

/// Least-squares parameters of `F(m) = A alpha^m + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

const ALPHA_MIN: f64 = 1e-6;
const GRID: usize = 240;

/// Best `(A, B, sse)` for a fixed `alpha` with `A in [-1, 1]`, `B in [0, 1]`.
fn solve_linear(points: &[(f64, f64)], alpha: f64) -> (f64, f64, f64) {
    let xs: Vec<(f64, f64)> = points.iter().map(|&(m, y)| (alpha.powf(m), y)).collect();
    let sse = |a: f64, b: f64| xs.iter().map(|&(x, y)| (a * x + b - y).powi(2)).sum::<f64>();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().map(|p| p.0).sum();
    let sy: f64 = xs.iter().map(|p| p.1).sum();
    let sxx: f64 = xs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = xs.iter().map(|p| p.0 * p.1).sum();

    // Fix A, optimise B; fix B, optimise A. Both clamped to the box.
    let best_b = |a: f64| ((sy - a * sx) / n).clamp(0.0, 1.0);
    let best_a = |b: f64| {
        if sxx > 0.0 {
            ((sxy - b * sx) / sxx).clamp(-1.0, 1.0)
        } else {
            0.0
        }
    };

    let mut candidates = Vec::with_capacity(5);
    let det = n * sxx - sx * sx;
    if det.abs() > 1e-14 * (n * sxx).max(1e-300) {
        let a = (n * sxy - sx * sy) / det;
        let b = (sy - a * sx) / n;
        if (-1.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
            candidates.push((a, b));
        }
    }
    for a in [-1.0, 1.0] {
        candidates.push((a, best_b(a)));
    }
    for b in [0.0, 1.0] {
        candidates.push((best_a(b), b));
    }
    candidates
        .into_iter()
        .map(|(a, b)| (a, b, sse(a, b)))
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("candidates are never empty")
}

/// Fits `F(m) = A alpha^m + B` to mean survival probabilities.
///
/// `alpha` is found by a log-spaced scan followed by golden-section search on
/// `[1e-6, 1]`; `A` and `B` are solved exactly for each trial `alpha`.
pub fn fit_decay(survival: &BTreeMap<usize, f64>) -> Result<DecayFit, RbError> {
    if survival.len() < 3 {
        return Err(RbError::DegenerateFit(format!(
            "need at least 3 distinct lengths, got {}",
            survival.len()
        )));
    }
    if let Some((m, p)) = survival
        .iter()
        .find(|(_, p)| !(p.is_finite() && (-1e-9..=1.0 + 1e-9).contains(*p)))
    {
        return Err(RbError::DegenerateFit(format!(
            "survival {p} at length {m} is not a probability"
        )));
    }
    let points: Vec<(f64, f64)> = survival.iter().map(|(&m, &p)| (m as f64, p.clamp(0.0, 1.0))).collect();
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.1), hi.max(p.1))
    });
    if hi - lo < 1e-12 {
        return Ok(DecayFit {
            a: 0.0,
            b: points[0].1,
            alpha: 1.0,
            residual: 0.0,
        });
    }

    let cost = |alpha: f64| solve_linear(&points, alpha).2;
    // Grid in 1 - alpha, from 1 - ALPHA_MIN down to 0.
    let mut grid: Vec<f64> = (0..GRID)
        .map(|i| {
            let t = i as f64 / (GRID - 1) as f64;
            1.0 - (1.0 - ALPHA_MIN) * (1e-9f64).powf(t)
        })
        .collect();
    grid.push(1.0);
    let costs: Vec<f64> = grid.iter().map(|&a| cost(a)).collect();
    let best = (0..grid.len())
        .min_by(|&i, &j| costs[i].total_cmp(&costs[j]))
        .expect("grid not empty");
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cost(d);
        }
    }
    let mut alpha = (a + b) / 2.0;
    if costs[best] < cost(alpha) {
        alpha = grid[best];
    }
    let (fa, fb, sse) = solve_linear(&points, alpha);
    Ok(DecayFit {
        a: fa,
        b: fb,
        alpha,
        residual: (sse / points.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(a: f64, b: f64, alpha: f64, lengths: &[usize]) -> BTreeMap<usize, f64> {
        lengths.iter().map(|&m| (m, a * alpha.powi(m as i32) + b)).collect()
    }

    const LENGTHS: [usize; 7] = [1, 10, 20, 50, 80, 100, 150];

    #[test]
    fn recovers_exact_parameters() {
        for (a, b, alpha) in [
            (0.75, 0.25, 0.98),
            (0.5, 0.5, 0.995),
            (0.9, 0.05, 0.9),
            (0.75, 0.25, 0.9999),
        ] {
            let f = fit_decay(&synth(a, b, alpha, &LENGTHS)).unwrap();
            assert!((f.alpha - alpha).abs() < 1e-6, "{alpha}: {f:?}");
            assert!((f.a - a).abs() < 1e-6 && (f.b - b).abs() < 1e-6, "{f:?}");
            assert!(f.residual < 1e-8);
        }
    }

    #[test]
    fn constant_survival() {
        let f = fit_decay(&synth(0.0, 1.0, 0.5, &LENGTHS)).unwrap();
        assert_eq!((f.alpha, f.a, f.b), (1.0, 0.0, 1.0));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_decay(&synth(0.7, 0.25, 0.9, &[1, 5])).is_err());
        let mut s = synth(0.7, 0.25, 0.9, &[1, 5, 10]);
        s.insert(20, 1.5);
        assert!(fit_decay(&s).is_err());
    }

    #[test]
    fn respects_bounds() {
        // Data that would want B < 0 unconstrained.
        let s: BTreeMap<usize, f64> = [(1, 0.9), (10, 0.5), (20, 0.2), (40, 0.0)].into();
        let f = fit_decay(&s).unwrap();
        assert!(f.b >= 0.0 && (-1.0..=1.0).contains(&f.a) && f.alpha > 0.0 && f.alpha <= 1.0);
    }
}
