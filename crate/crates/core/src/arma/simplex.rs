//! Nelder-Mead downhill simplex.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Offset of each initial vertex from the start point along one axis.
    pub step: f64,
    /// Converged once every vertex lies within this max-norm distance of the best.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            tolerance: 1e-8,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration; never increases.
    pub trace: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` from `start`. Deterministic for a deterministic `f`.
pub fn minimize<F>(mut f: F, start: &[f64], options: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    vertices.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += options.step;
        let fv = f(&v);
        vertices.push((v, fv));
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = vertices[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&vertices[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < options.tolerance {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let worst = dim;
        let mut centroid = vec![0.0; dim];
        for (v, _) in &vertices[..worst] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let f_best = vertices[0].1;
        let f_second_worst = vertices[worst - 1].1;
        let f_worst = vertices[worst].1;

        let reflected = lerp(&centroid, &vertices[worst].0, -REFLECT);
        let f_reflected = f(&reflected);

        if f_reflected < f_best {
            let expanded = lerp(&centroid, &vertices[worst].0, -EXPAND);
            let f_expanded = f(&expanded);
            vertices[worst] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < f_second_worst {
            vertices[worst] = (reflected, f_reflected);
        } else {
            let (candidate, bound) = if f_reflected < f_worst {
                (lerp(&centroid, &reflected, CONTRACT), f_reflected)
            } else {
                (lerp(&centroid, &vertices[worst].0, CONTRACT), f_worst)
            };
            let f_candidate = f(&candidate);
            if f_candidate <= bound {
                vertices[worst] = (candidate, f_candidate);
            } else {
                let best = vertices[0].0.clone();
                for (v, fv) in vertices.iter_mut().skip(1) {
                    *v = lerp(&best, v, SHRINK);
                    *fv = f(v);
                }
            }
        }
        let best_now = vertices.iter().map(|(_, fv)| *fv).fold(f64::INFINITY, f64::min);
        trace.push(best_now);
    }

    let (best, value) = vertices.swap_remove(0);
    SimplexResult {
        best,
        value,
        iterations,
        converged,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.best[0] - 1.0).abs() < 1e-7);
        assert!((r.best[1] + 2.0).abs() < 1e-7);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            SimplexOptions {
                max_iterations: 5000,
                ..Default::default()
            },
        );
        assert!(r.converged);
        assert!((r.best[0] - 1.0).abs() < 1e-6 && (r.best[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_best_so_far() {
        let r = minimize(
            |x| x.iter().map(|v| v * v).sum(),
            &[3.0, -2.0, 1.0],
            SimplexOptions {
                max_iterations: 5,
                ..Default::default()
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
        assert_eq!(r.trace.len(), 5);
        assert!(r.value < 14.0);
    }

    #[test]
    fn one_dimensional() {
        let r = minimize(|x| (x[0] - 3.25).powi(2), &[0.0], SimplexOptions::default());
        assert!(r.converged);
        assert!((r.best[0] - 3.25).abs() < 1e-8);
    }
}
