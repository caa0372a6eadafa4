use crate::error::{GeomedError, Result};
use crate::model::{eval_f, mean_point, PointSet};

use super::dense::spd_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMethod {
    WeiszfeldPolished,
    DenseNewtonPath,
    Grid,
}

/// A reference minimizer with its optimality evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Norm of the minimal-norm subgradient at `x` (0 when `x` is a data
    /// point passing the vertex test).
    pub grad_norm: f64,
    /// Upper bound on `(f(x) - f*) / f(x)` from `grad_norm` and the spread of
    /// the points.
    pub rel_gap_bound: f64,
    pub certified: bool,
    pub method: ReferenceMethod,
}

const FLOOR: f64 = 1e-300;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimal-norm subgradient of `f` at `x`: the pull of the points not at `x`,
/// shrunk by the weight sitting exactly at `x`.
fn subgradient(ps: &PointSet<f64>, x: &[f64]) -> (Vec<f64>, f64) {
    let d = ps.dim();
    let mut g = vec![0.0; d];
    let mut at = 0.0;
    for (i, a) in ps.points().enumerate() {
        let r = dist(x, a);
        if r == 0.0 {
            at += ps.weight(i);
            continue;
        }
        for j in 0..d {
            g[j] += ps.weight(i) * (x[j] - a[j]) / r;
        }
    }
    let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual = (gn - at).max(0.0);
    (g, residual)
}

fn gap_bound(ps: &PointSet<f64>, x: &[f64], residual: f64, objective: f64) -> f64 {
    if residual == 0.0 {
        return 0.0;
    }
    // The optimum lies in the convex hull, so within the farthest point.
    let far = ps.points().map(|a| dist(a, x)).fold(0.0, f64::max);
    if objective > 0.0 {
        residual * far / objective
    } else {
        0.0
    }
}

fn vardi_zhang(ps: &PointSet<f64>, x: &[f64]) -> Option<Vec<f64>> {
    let d = ps.dim();
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    let mut at = 0.0;
    for (i, a) in ps.points().enumerate() {
        let r = dist(x, a);
        let w = ps.weight(i);
        if r == 0.0 {
            at += w;
            continue;
        }
        den += w / r.max(FLOOR);
        for j in 0..d {
            num[j] += w * a[j] / r.max(FLOOR);
        }
    }
    if den == 0.0 {
        return None;
    }
    let tx: Vec<f64> = num.iter().map(|v| v / den).collect();
    if at == 0.0 {
        return Some(tx);
    }
    let (_, residual) = subgradient(ps, x);
    if residual == 0.0 {
        return None;
    }
    let pull: f64 = residual + at;
    let keep = (at / pull).min(1.0);
    Some(tx.iter().zip(x).map(|(t, c)| (1.0 - keep) * t + keep * c).collect())
}

/// Newton step on the smooth part of `f` (valid away from the points), with
/// Levenberg regularization and step halving.
fn newton_polish(ps: &PointSet<f64>, mut x: Vec<f64>, iters: usize) -> Vec<f64> {
    let d = ps.dim();
    let mut fx = eval_f(ps, &x).unwrap_or(f64::INFINITY);
    for _ in 0..iters {
        let mut g = vec![0.0; d];
        let mut h = vec![0.0; d * d];
        let mut coincident = false;
        for (i, a) in ps.points().enumerate() {
            let r = dist(&x, a);
            if r == 0.0 {
                coincident = true;
                break;
            }
            let w = ps.weight(i);
            for j in 0..d {
                let uj = (x[j] - a[j]) / r;
                g[j] += w * uj;
                for k in 0..d {
                    let uk = (x[k] - a[k]) / r;
                    h[j * d + k] += w * ((if j == k { 1.0 } else { 0.0 }) - uj * uk) / r;
                }
            }
        }
        if coincident {
            break;
        }
        let trace: f64 = (0..d).map(|j| h[j * d + j]).sum();
        let Some(step) = spd_solve(&h, d, 1e-12 * trace.max(FLOOR), &g) else {
            break;
        };
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi - scale * si).collect();
            let fc = eval_f(ps, &cand).unwrap_or(f64::INFINITY);
            // Near the optimum f stops resolving progress; the residual still does.
            let flat = fc <= fx * (1.0 + 4.0 * f64::EPSILON) && subgradient(ps, &cand).1 < subgradient(ps, &x).1;
            if fc < fx || flat {
                x = cand;
                fx = fx.min(fc);
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Reference median: Weiszfeld (Vardi–Zhang variant, safe at data points),
/// a vertex optimality test at the nearest point, then Newton polish.
pub fn weiszfeld_reference(ps: &PointSet<f64>, tol: f64) -> Result<ReferenceSolution> {
    if ps.is_empty() {
        return Err(GeomedError::EmptyPointSet);
    }
    let mut x = mean_point(ps);
    let mut fx = eval_f(ps, &x)?;
    for _ in 0..200_000 {
        let Some(next) = vardi_zhang(ps, &x) else { break };
        let fn_ = eval_f(ps, &next)?;
        let moved = dist(&next, &x);
        let stop = fn_ >= fx || moved <= 1e-16 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max));
        if fn_ <= fx {
            x = next;
            fx = fn_;
        }
        if stop {
            break;
        }
    }
    let mut best = x.clone();
    let mut best_f = fx;
    let polished = newton_polish(ps, x, 100);
    let fp = eval_f(ps, &polished)?;
    let sharper = fp <= best_f * (1.0 + 4.0 * f64::EPSILON) && subgradient(ps, &polished).1 < subgradient(ps, &best).1;
    if fp < best_f || sharper {
        best = polished;
        best_f = fp;
    }
    // Vertex test at the nearest data point.
    let (k, _) = ps
        .points()
        .map(|a| dist(a, &best))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
    let vertex = ps.point(k).to_vec();
    let fv = eval_f(ps, &vertex)?;
    let (_, vres) = subgradient(ps, &vertex);
    if vres == 0.0 && fv <= best_f * (1.0 + 1e-15) {
        best = vertex;
        best_f = fv;
    }
    let (_, residual) = subgradient(ps, &best);
    let rel = gap_bound(ps, &best, residual, best_f);
    Ok(ReferenceSolution {
        x: best,
        objective: best_f,
        grad_norm: residual,
        rel_gap_bound: rel,
        certified: rel <= tol,
        method: ReferenceMethod::WeiszfeldPolished,
    })
}

/// Zooming grid search for `d <= 3`: evaluate a grid over a box, recentre on
/// the best cell, shrink, repeat.
pub fn grid_reference(ps: &PointSet<f64>, tol: f64) -> Result<ReferenceSolution> {
    let d = ps.dim();
    if d > 3 {
        return Err(GeomedError::Oracle(format!("grid search supports d <= 3, got {d}")));
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for a in ps.points() {
        for j in 0..d {
            lo[j] = lo[j].min(a[j]);
            hi[j] = hi[j].max(a[j]);
        }
    }
    let mut center: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let mut half: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (h - l)).collect();
    let m = 16i64;
    let mut best_f = eval_f(ps, &center)?;
    let mut best = center.clone();
    for _ in 0..200 {
        let cells = (2 * m + 1).pow(d as u32);
        for c in 0..cells {
            let mut idx = c;
            let mut p = center.clone();
            for j in 0..d {
                let o = idx % (2 * m + 1) - m;
                idx /= 2 * m + 1;
                p[j] += half[j] * o as f64 / m as f64;
            }
            let fp = eval_f(ps, &p)?;
            if fp < best_f {
                best_f = fp;
                best = p;
            }
        }
        center = best.clone();
        half.iter_mut().for_each(|h| *h *= 0.25);
        if half.iter().all(|&h| h <= 1e-15 * (1.0 + center.iter().map(|v| v.abs()).fold(0.0, f64::max))) {
            break;
        }
    }
    let (_, residual) = subgradient(ps, &best);
    let rel = gap_bound(ps, &best, residual, best_f);
    Ok(ReferenceSolution {
        x: best,
        objective: best_f,
        grad_norm: residual,
        rel_gap_bound: rel,
        certified: rel <= tol,
        method: ReferenceMethod::Grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let ps = PointSet::new(vec![0.0, 0.0, 2.0, 0.0], 2).unwrap();
        let r = weiszfeld_reference(&ps, 1e-12).unwrap();
        assert!((r.objective - 2.0).abs() < 1e-12);
        assert!(r.x[1].abs() < 1e-12 && (0.0..=2.0).contains(&r.x[0]));
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let ps = PointSet::new(vec![0.0, 0.0, 1.0, 0.0, 0.5, h], 2).unwrap();
        let r = weiszfeld_reference(&ps, 1e-12).unwrap();
        assert!((r.x[0] - 0.5).abs() < 1e-10 && (r.x[1] - h / 3.0).abs() < 1e-10, "{:?}", r.x);
        assert!(r.certified);
    }

    #[test]
    fn one_dimensional_vertex() {
        let ps = PointSet::new(vec![0.0, 1.0, 10.0], 1).unwrap();
        let r = weiszfeld_reference(&ps, 1e-12).unwrap();
        assert_eq!(r.x, vec![1.0]);
        assert_eq!(r.objective, 10.0);
        assert_eq!(r.grad_norm, 0.0);
        let g = grid_reference(&ps, 1e-12).unwrap();
        assert!((g.objective - 10.0).abs() < 1e-9);
    }
}
