use crate::error::{GeomedError, Result};

fn check_h(h: f64) -> Result<()> {
    if !(1e-8..=1e-4).contains(&h) {
        return Err(GeomedError::InvalidParameter(format!(
            "finite-difference step must lie in [1e-8, 1e-4], got {h}"
        )));
    }
    Ok(())
}

fn rel_err(approx: &[f64], exact: &[f64]) -> f64 {
    let diff = approx.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = exact
        .iter()
        .chain(approx)
        .map(|v| v.abs())
        .fold(1e-12, f64::max);
    diff / scale
}

/// Max relative deviation of `grad` from central differences of `f` at `x`.
pub fn fd_gradient_check(f: &dyn Fn(&[f64]) -> f64, grad: &[f64], x: &[f64], h: f64) -> Result<f64> {
    check_h(h)?;
    let mut p = x.to_vec();
    let fd: Vec<f64> = (0..x.len())
        .map(|j| {
            p[j] = x[j] + h;
            let up = f(&p);
            p[j] = x[j] - h;
            let down = f(&p);
            p[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect();
    Ok(rel_err(&fd, grad))
}

/// Max relative deviation of the Hessian columns `hess(e_j)` from central
/// differences of `grad` at `x`.
pub fn fd_hessian_check(
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    hess: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    check_h(h)?;
    let d = x.len();
    let mut p = x.to_vec();
    let mut fd = Vec::with_capacity(d * d);
    let mut exact = Vec::with_capacity(d * d);
    for j in 0..d {
        p[j] = x[j] + h;
        let up = grad(&p);
        p[j] = x[j] - h;
        let down = grad(&p);
        p[j] = x[j];
        fd.extend(up.iter().zip(&down).map(|(u, w)| (u - w) / (2.0 * h)));
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        exact.extend(hess(&e));
    }
    Ok(rel_err(&fd, &exact))
}

/// Accelerated projected gradient on `||x - z||^2_{I - v v^T}` over the ball
/// `||x - y||^2 <= alpha`.
pub fn projected_gradient_qp(y: &[f64], z: &[f64], v: &[f64], alpha: f64, iters: usize) -> Vec<f64> {
    let r = alpha.max(0.0).sqrt();
    let project = |p: &mut Vec<f64>| {
        let off: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if off > r {
            for (pi, yi) in p.iter_mut().zip(y) {
                *pi = yi + (*pi - yi) * r / off;
            }
        }
    };
    let grad = |p: &[f64]| -> Vec<f64> {
        let diff: Vec<f64> = p.iter().zip(z).map(|(a, b)| a - b).collect();
        let c: f64 = diff.iter().zip(v).map(|(a, b)| a * b).sum();
        diff.iter().zip(v).map(|(dj, vj)| 2.0 * (dj - c * vj)).collect()
    };
    let mut x = y.to_vec();
    let mut m = x.clone();
    let mut theta = 1.0f64;
    for _ in 0..iters {
        let g = grad(&m);
        let mut next: Vec<f64> = m.iter().zip(&g).map(|(a, b)| a - 0.5 * b).collect();
        project(&mut next);
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        let beta = (theta - 1.0) / theta_next;
        m = next.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = next;
        theta = theta_next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let f = |x: &[f64]| 3.0 * x[0] * x[0] + x[0] * x[1] - 2.0 * x[1] * x[1];
        let x = [0.7, -1.3];
        let g = [6.0 * x[0] + x[1], x[0] - 4.0 * x[1]];
        assert!(fd_gradient_check(&f, &g, &x, 1e-5).unwrap() <= 1e-10);
        let bad = [g[0] + 1e-3, g[1]];
        assert!(fd_gradient_check(&f, &bad, &x, 1e-5).unwrap() > 1e-5);
        let gf = |x: &[f64]| vec![6.0 * x[0] + x[1], x[0] - 4.0 * x[1]];
        let hf = |z: &[f64]| vec![6.0 * z[0] + z[1], z[0] - 4.0 * z[1]];
        assert!(fd_hessian_check(&gf, &hf, &x, 1e-5).unwrap() <= 1e-10);
        assert!(fd_gradient_check(&f, &g, &x, 1e-2).is_err());
    }

    #[test]
    fn projection_when_v_is_zero() {
        let x = projected_gradient_qp(&[0.0, 0.0], &[3.0, 4.0], &[0.0, 0.0], 1.0, 200);
        assert!((x[0] - 0.6).abs() < 1e-12 && (x[1] - 0.8).abs() < 1e-12);
    }
}
