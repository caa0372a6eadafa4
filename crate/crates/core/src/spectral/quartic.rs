//! Real roots of monic quartics by simultaneous (Aberth-Ehrlich) iteration on
//! the rescaled polynomial, followed by Newton polish of the real roots.

use num_complex::Complex;

use crate::scalar::{lit, Scalar};

const MAX_SWEEPS: usize = 500;

/// All roots (complex) of `x^4 + c[0] x^3 + c[1] x^2 + c[2] x + c[3]`.
pub fn quartic_roots<T: Scalar>(c: [T; 4]) -> [Complex<T>; 4] {
    // Fujiwara bound; rescale x = s y so every root has modulus <= ~2.
    let s = c[0]
        .abs()
        .max(c[1].abs().sqrt())
        .max(c[2].abs().cbrt())
        .max((c[3].abs() * lit(0.5)).powf(lit(0.25)));
    if s.is_zero() {
        return [Complex::new(T::zero(), T::zero()); 4];
    }
    let scaled = [c[0] / s, c[1] / (s * s), c[2] / (s * s * s), c[3] / (s * s * s * s)];

    let eval = |z: Complex<T>| -> (Complex<T>, Complex<T>) {
        let mut p = Complex::new(T::one(), T::zero());
        let mut dp = Complex::new(T::zero(), T::zero());
        for &ci in &scaled {
            dp = dp * z + p;
            p = p * z + Complex::new(ci, T::zero());
        }
        (p, dp)
    };

    let radius = lit::<T>(1.5);
    let mut z: [Complex<T>; 4] = std::array::from_fn(|k| {
        let angle = lit::<T>(0.4 + std::f64::consts::FRAC_PI_2 * k as f64);
        Complex::new(radius * angle.cos(), radius * angle.sin())
    });
    let tiny = T::epsilon() * lit(4.0);
    for _ in 0..MAX_SWEEPS {
        let mut moved = T::zero();
        for k in 0..4 {
            let (p, dp) = eval(z[k]);
            if p.norm().is_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut repulse = Complex::new(T::zero(), T::zero());
            for j in 0..4 {
                if j != k {
                    let diff = z[k] - z[j];
                    if !diff.norm().is_zero() {
                        repulse += diff.inv();
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - ratio * repulse;
            let step = if denom.norm().is_zero() || !denom.norm().is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if step.norm().is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (T::one() + z[k].norm()));
            }
        }
        if moved <= tiny {
            break;
        }
    }
    z.map(|r| r * s)
}

/// Real roots of the monic quartic: roots with `|im| <= 1e-8 (1 + |re|)`,
/// each polished by two Newton steps on the original coefficients.
pub fn quartic_real_roots<T: Scalar>(c: [T; 4]) -> Vec<T> {
    let poly = |x: T| -> (T, T) {
        let mut p = T::one();
        let mut dp = T::zero();
        for &ci in &c {
            dp = dp * x + p;
            p = p * x + ci;
        }
        (p, dp)
    };
    quartic_roots(c)
        .iter()
        .filter(|r| r.im.abs() <= lit::<T>(1e-8) * (T::one() + r.re.abs()))
        .map(|r| {
            let mut x = r.re;
            for _ in 0..2 {
                let (p, dp) = poly(x);
                if dp.is_zero() || !dp.is_finite() {
                    break;
                }
                let cand = x - p / dp;
                if cand.is_finite() && poly(cand).0.abs() <= p.abs() {
                    x = cand;
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monic_from_roots(r: [f64; 4]) -> [f64; 4] {
        let e1 = r.iter().sum::<f64>();
        let e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
        let e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
        let e4 = r.iter().product::<f64>();
        [-e1, e2, -e3, e4]
    }

    #[test]
    fn four_real_roots() {
        let roots = [-3.0, 0.5, 2.0, 7.25];
        let mut got = quartic_real_roots(monic_from_roots(roots));
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got.len(), 4);
        for (g, r) in got.iter().zip(&roots) {
            assert!((g - r).abs() < 1e-10 * (1.0 + r.abs()), "{g} vs {r}");
        }
    }

    #[test]
    fn complex_pair_filtered() {
        // (x^2 + 1)(x - 2)(x + 5) = x^4 + 3x^3 - 9x^2 + 3x - 10
        let mut got = quartic_real_roots::<f64>([3.0, -9.0, 3.0, -10.0]);
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got.len(), 2);
        assert!((got[0] + 5.0).abs() < 1e-12);
        assert!((got[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn widely_scaled_roots() {
        let roots = [1e-3, 1.0, 1e4, 1e8];
        let got = quartic_real_roots(monic_from_roots(roots));
        for r in roots {
            assert!(got.iter().any(|g| (g - r).abs() < 1e-8 * r), "missing {r}: {got:?}");
        }
    }

    #[test]
    fn zero_polynomial() {
        assert_eq!(quartic_real_roots([0.0, 0.0, 0.0, 0.0]), vec![0.0; 4]);
    }
}
