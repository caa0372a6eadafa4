use crate::error::{GeomedError, Result};
use crate::model::{mean_point, PointSet};
use crate::objective::{dense_hessian, eval_ft, value_ft};

use super::dense::spd_solve;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `f_t(x) + mu ||x - y||^2` and its gradient.
fn penalized(ps: &PointSet<f64>, t: f64, mu: f64, y: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let ev = eval_ft(ps, x, t)?;
    let mut value = ev.value;
    let mut grad = ev.grad;
    if mu > 0.0 {
        for j in 0..x.len() {
            let dj = x[j] - y[j];
            value += mu * dj * dj;
            grad[j] += 2.0 * mu * dj;
        }
    }
    Ok((value, grad))
}

/// Damped Newton on `f_t + mu ||x - y||^2` until the gradient norm is at
/// most `gtol`; step halving (at most 60 times) until the value decreases.
fn newton(ps: &PointSet<f64>, t: f64, mu: f64, y: &[f64], start: Vec<f64>, gtol: f64) -> Result<Vec<f64>> {
    let d = ps.dim();
    let mut x = start;
    let (mut fx, mut g) = penalized(ps, t, mu, y, &x)?;
    for _ in 0..500 {
        if norm(&g) <= gtol {
            return Ok(x);
        }
        let h = dense_hessian(ps, &x, t);
        let step = spd_solve(&h, d, 2.0 * mu, &g)
            .ok_or_else(|| GeomedError::Oracle("Newton system is not positive definite".into()))?;
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..=60 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi - scale * si).collect();
            let (fc, gc) = penalized(ps, t, mu, y, &cand)?;
            // Near the optimum values stop resolving; accept a smaller gradient.
            let flat = fc <= fx + 4.0 * f64::EPSILON * fx.abs();
            if fc < fx || (flat && norm(&gc) < norm(&g)) {
                x = cand;
                fx = fx.min(fc);
                g = gc;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let gn = norm(&g);
    if gn <= gtol {
        Ok(x)
    } else {
        Err(GeomedError::Oracle(format!(
            "Newton stalled with gradient norm {gn:e} above {gtol:e}"
        )))
    }
}

/// `x_t = argmin f_t`, by damped Newton with continuation in `t` from the
/// mean. Converged when `||grad f_t|| <= tol * t * W`.
pub fn central_path_reference(ps: &PointSet<f64>, t: f64, tol: f64) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(GeomedError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let y = vec![0.0; ps.dim()];
    let scale = ps.total_weight();
    let mut x = mean_point(ps);
    let spread = ps
        .points()
        .map(|a| norm(&a.iter().zip(&x).map(|(p, q)| p - q).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let mut tc = if spread > 0.0 { t.min(1.0 / spread) } else { t };
    loop {
        let last = tc >= t;
        let gtol = if last { tol } else { tol.max(1e-8) };
        x = newton(ps, tc, 0.0, &y, x, gtol * tc * scale)?;
        if last {
            return Ok(x);
        }
        tc = (tc * 8.0).min(t);
    }
}

/// `argmin f_t` over the ball `||x - y|| <= radius`: the unconstrained `x_t`
/// if it is inside, else the point on the sphere where
/// `grad f_t + 2 mu (x - y) = 0`, with `mu` found by bisection.
pub fn ball_center_reference(ps: &PointSet<f64>, y: &[f64], t: f64, radius: f64, tol: f64) -> Result<Vec<f64>> {
    let xt = central_path_reference(ps, t, tol)?;
    let off = |x: &[f64]| norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
    if off(&xt) <= radius {
        return Ok(xt);
    }
    // The penalty gradient 2 mu (x - y) is resolved only relative to its size.
    let gscale = |mu: f64| tol * (t * ps.total_weight() + 2.0 * mu * radius);
    let solve = |mu: f64, start: Vec<f64>| newton(ps, t, mu, y, start, gscale(mu));
    let mut lo = 0.0f64;
    let mut hi = t * t * ps.total_weight();
    let mut x_hi = solve(hi, y.to_vec())?;
    while off(&x_hi) > radius {
        lo = hi;
        hi *= 4.0;
        x_hi = solve(hi, x_hi)?;
    }
    for _ in 0..200 {
        let mid = if lo == 0.0 { hi * 0.5 } else { (lo * hi).sqrt() };
        if mid <= lo || mid >= hi {
            break;
        }
        let xm = solve(mid, x_hi.clone())?;
        if off(&xm) > radius {
            lo = mid;
        } else {
            hi = mid;
            x_hi = xm;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    // Pull onto the sphere; the value there is what callers compare.
    let r = off(&x_hi);
    if r > radius {
        let s = radius / r;
        x_hi = x_hi.iter().zip(y).map(|(a, b)| b + (a - b) * s).collect();
    }
    debug_assert!(value_ft(ps, &x_hi, t).is_finite());
    Ok(x_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_center_for_any_t() {
        let ps = PointSet::new(vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0], 2).unwrap();
        for t in [1e-3, 1.0, 1e3] {
            let x = central_path_reference(&ps, t, 1e-12).unwrap();
            assert!(norm(&x) < 1e-9, "{t}: {x:?}");
        }
    }

    #[test]
    fn small_t_is_near_mean() {
        let ps = PointSet::new(vec![0.0, 0.0, 3.0, 0.5, -1.0, 2.0, 0.2, 0.1], 2).unwrap();
        let x = central_path_reference(&ps, 1e-6, 1e-12).unwrap();
        let m = mean_point(&ps);
        assert!(norm(&[x[0] - m[0], x[1] - m[1]]) < 1e-4);
    }
}
