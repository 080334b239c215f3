//! Special functions used by models and closed-form references.

use std::f64::consts::PI;

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Bessel function of the first kind `J_n(x)` for integer order.
///
/// Evaluates `(1/2π)∫₀^{2π} cos(nτ − x sin τ) dτ` with the trapezoid rule, which
/// converges geometrically for this periodic integrand once the node count
/// exceeds `|x| + |n|` by a margin.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let nodes = 64 + 2 * (x.abs().ceil() as usize + n.unsigned_abs() as usize);
    let step = 2.0 * PI / nodes as f64;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 0..nodes {
        let tau = k as f64 * step;
        sum += (nf * tau - x * tau.sin()).cos();
    }
    sum / nodes as f64
}

pub fn bessel_j_prime(n: i32, x: f64) -> f64 {
    0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
}

/// The `k`-th positive zero (k ≥ 1) of `J_n`.
pub fn bessel_j_zero(n: u32, k: u32) -> f64 {
    let order = n as i32;
    let step = 0.05;
    let mut found = 0;
    let mut a = 1e-6_f64.max(n as f64 * 0.5);
    let mut fa = bessel_j(order, a);
    loop {
        let b = a + step;
        let fb = bessel_j(order, b);
        if fa == 0.0 && a > 1e-6 {
            found += 1;
            if found == k {
                return a;
            }
        } else if fa * fb < 0.0 {
            found += 1;
            if found == k {
                return bisect(|x| bessel_j(order, x), a, b);
            }
        }
        a = b;
        fa = fb;
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < 1e-15 * mid.abs().max(1.0) {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun table 9.1.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((bessel_j(2, 5.0) - 0.046_565_116_277_752_2).abs() < 1e-14);
        assert!((bessel_j(-1, 1.0) + bessel_j(1, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn bessel_zeros() {
        assert!((bessel_j_zero(0, 1) - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_j_zero(0, 2) - 5.520_078_110_286_311).abs() < 1e-12);
        assert!((bessel_j_zero(1, 1) - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((bessel_j_zero(2, 1) - 5.135_622_301_840_683).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for &x in &[0.3, 1.7, 4.2] {
            let fd = (bessel_j(2, x + h) - bessel_j(2, x - h)) / (2.0 * h);
            assert!((bessel_j_prime(2, x) - fd).abs() < 1e-9);
        }
    }
}
