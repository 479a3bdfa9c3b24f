//! Small derivative-free and first-order maximisers used by the estimators.
//!
//! Objectives may return `-inf` (or NaN, treated as `-inf`) at infeasible
//! points; every routine only ever moves to strictly better values.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Golden-section search for a maximum of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iters: usize,
) -> Maximum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let mut iterations = 0;
    while (b - a) > tol && iterations < max_iters {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d));
        }
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum {
        x: vec![x],
        value,
        iterations,
        converged: (b - a) <= tol,
    }
}

/// Evaluates `f` on `points` evenly spaced nodes over `[lo, hi]`, then refines
/// the best node by golden-section search over its two neighbouring cells.
///
/// The result is never worse than the best grid node.
pub fn grid_then_refine(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
    max_iters: usize,
) -> Maximum {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let node = |i: usize| {
        if i + 1 == points {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..points {
        let v = sanitize(f(node(i)));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let grid_x = node(best_i);
    let left = node(best_i.saturating_sub(1));
    let right = node((best_i + 1).min(points - 1));
    let refined = golden_section_max(&f, left, right, tol, max_iters);
    let iterations = points + refined.iterations;
    if refined.value >= best_v {
        Maximum {
            iterations,
            ..refined
        }
    } else {
        Maximum {
            x: vec![grid_x],
            value: best_v,
            iterations,
            converged: refined.converged,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadConfig {
    pub initial_step: f64,
    pub max_iters: usize,
    /// Stop when the spread of simplex values and the simplex diameter both fall below this.
    pub tolerance: f64,
}

/// Nelder–Mead maximisation with the standard coefficients (1, 2, 0.5, 0.5).
pub fn nelder_mead_max(f: impl Fn(&[f64]) -> f64, x0: &[f64], cfg: &NelderMeadConfig) -> Maximum {
    let dim = x0.len();
    // Minimise the negation internally.
    let g = |x: &[f64]| -sanitize(f(x));
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), g(x0)));
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += cfg.initial_step;
        let v = g(&p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (simplex[dim].1 - simplex[0].1).abs();
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= cfg.tolerance && diameter <= cfg.tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let fr = g(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = g(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let p = along(0.5);
            let v = g(&p);
            (p, v)
        } else {
            let p = along(-0.5);
            let v = g(&p);
            (p, v)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (p, v) in simplex.iter_mut().skip(1) {
            for (pi, bi) in p.iter_mut().zip(&best) {
                *pi = bi + 0.5 * (*pi - bi);
            }
            *v = g(p);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Maximum {
        x,
        value: -v,
        iterations,
        converged,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GradientAscentConfig {
    pub initial_step: f64,
    pub max_iters: usize,
    /// Stop when the accepted step moves θ by less than this (max-norm).
    pub tolerance: f64,
}

/// Gradient ascent with backtracking (Armijo) line search. `fg` returns the
/// value and gradient at a point.
pub fn gradient_ascent(
    fg: impl Fn(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    cfg: &GradientAscentConfig,
) -> Maximum {
    let mut x = x0.to_vec();
    let (mut value, mut grad) = fg(&x);
    value = sanitize(value);
    let mut step = cfg.initial_step;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if !value.is_finite() || !g2.is_finite() || g2 == 0.0 {
            converged = value.is_finite() && g2 == 0.0;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + step * gi).collect();
            let (cv, cg) = fg(&candidate);
            let cv = sanitize(cv);
            if cv >= value + 1e-4 * step * g2 {
                let moved = x
                    .iter()
                    .zip(&candidate)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                x = candidate;
                value = cv;
                grad = cg;
                step *= 2.0;
                accepted = true;
                if moved < cfg.tolerance {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    Maximum {
        x,
        value,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let m = golden_section_max(|x| -(x - 1.3).powi(2), -5.0, 5.0, 1e-10, 500);
        assert!((m.x[0] - 1.3).abs() < 1e-8);
        assert!(m.converged);
    }

    #[test]
    fn golden_section_handles_reversed_bounds_and_nan() {
        let m = golden_section_max(
            |x| {
                if x < 0.0 {
                    f64::NAN
                } else {
                    -(x - 2.0).powi(2)
                }
            },
            5.0,
            -1.0,
            1e-9,
            500,
        );
        assert!((m.x[0] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn grid_refine_is_never_worse_than_grid() {
        // Two bumps; the taller one is at -4.
        let f = |x: f64| (-(x + 4.0).powi(2)).exp() + 0.9 * (-(x - 4.0).powi(2)).exp();
        let m = grid_then_refine(f, -10.0, 10.0, 201, 1e-10, 500);
        assert!((m.x[0] + 4.0).abs() < 1e-6);
        let grid_best = (0..201)
            .map(|i| f(-10.0 + 0.1 * i as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(m.value >= grid_best);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let cfg = NelderMeadConfig {
            initial_step: 0.5,
            max_iters: 5_000,
            tolerance: 1e-12,
        };
        let m = nelder_mead_max(f, &[-1.2, 1.0], &cfg);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4,
            "{m:?}"
        );
    }

    #[test]
    fn gradient_ascent_quadratic() {
        let fg = |x: &[f64]| {
            let v = -(x[0] - 2.0).powi(2) - 3.0 * (x[1] + 1.0).powi(2);
            (v, vec![-2.0 * (x[0] - 2.0), -6.0 * (x[1] + 1.0)])
        };
        let cfg = GradientAscentConfig {
            initial_step: 0.1,
            max_iters: 10_000,
            tolerance: 1e-12,
        };
        let m = gradient_ascent(fg, &[0.0, 0.0], &cfg);
        assert!(
            (m.x[0] - 2.0).abs() < 1e-6 && (m.x[1] + 1.0).abs() < 1e-6,
            "{m:?}"
        );
    }
}
