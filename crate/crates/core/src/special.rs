//! Riccati-Bessel functions and Legendre polynomials.
//!
//! `riccati_j(l, x) = x j_l(x)` behaves like `sin(x - l pi/2)` for large `x`;
//! `riccati_y(l, x) = x y_l(x)` like `-cos(x - l pi/2)`.

/// Power series for `x j_l(x)`; accurate when `x^2 << 4 l + 6`.
fn riccati_j_series(l: usize, x: f64) -> f64 {
    let mut lead = x;
    for m in 1..=l {
        lead *= x / (2 * m + 1) as f64;
    }
    let z = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= z / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `x j_l(x)` for `l = 0..=lmax`.
pub fn riccati_j_all(lmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    if x == 0.0 {
        return vec![0.0; lmax + 1];
    }
    if ax < 1.0 {
        return (0..=lmax).map(|l| riccati_j_series(l, x)).collect();
    }
    let j0 = x.sin();
    let j1 = x.sin() / x - x.cos();
    if ax >= lmax as f64 {
        // upward recurrence is stable above the turning point
        let mut out = vec![0.0; lmax + 1];
        out[0] = j0;
        if lmax >= 1 {
            out[1] = j1;
        }
        for l in 1..lmax {
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return out;
    }
    // Miller's downward recurrence, normalized against l = 0 or l = 1
    let start = lmax + 20 + 4 * (lmax as f64).sqrt() as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for m in (1..=start).rev() {
        vals[m - 1] = (2 * m + 1) as f64 / x * vals[m] - vals[m + 1];
        if vals[m - 1].abs() > 1e250 {
            for v in vals[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / vals[0] } else { j1 / vals[1] };
    vals.truncate(lmax + 1);
    for v in vals.iter_mut() {
        *v *= scale;
    }
    vals
}

pub fn riccati_j(l: usize, x: f64) -> f64 {
    riccati_j_all(l, x)[l]
}

/// `x y_l(x)` for `l = 0..=lmax` by upward recurrence (stable for this branch).
pub fn riccati_y_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    out[0] = -x.cos();
    if lmax >= 1 {
        out[1] = -x.cos() / x - x.sin();
    }
    for l in 1..lmax {
        out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
    }
    out
}

pub fn riccati_y(l: usize, x: f64) -> f64 {
    riccati_y_all(l, x)[l]
}

/// Value and derivative `(u_l(x), u_l'(x))` of both Riccati-Bessel functions.
pub fn riccati_pair(l: usize, x: f64) -> ((f64, f64), (f64, f64)) {
    let j = riccati_j_all(l, x);
    let y = riccati_y_all(l, x);
    let (dj, dy) = if l == 0 {
        (x.cos(), x.sin())
    } else {
        (j[l - 1] - l as f64 * j[l] / x, y[l - 1] - l as f64 * y[l] / x)
    };
    ((j[l], dj), (y[l], dy))
}

/// `P_l(x)` for `l = 0..=lmax` by the three-term recurrence.
pub fn legendre_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = x;
    }
    for l in 1..lmax {
        p[l + 1] = ((2 * l + 1) as f64 * x * p[l] - l as f64 * p[l - 1]) / (l + 1) as f64;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_closed_forms() {
        for &x in &[0.3, 1.0, 2.5, 7.0, 31.0] {
            let j: f64 = riccati_j(2, x);
            let closed = (3.0 / (x * x) - 1.0) * x.sin() - 3.0 * x.cos() / x;
            assert!((j - closed).abs() < 1e-12 * closed.abs().max(1e-3), "x = {x}");
            let y = riccati_y(1, x);
            assert!((y - (-x.cos() / x - x.sin())).abs() < 1e-13);
        }
    }

    #[test]
    fn miller_agrees_with_series_below_turning_point() {
        for &x in &[0.5, 2.0, 6.0] {
            let all = riccati_j_all(30, x);
            for l in [5, 12, 25, 30] {
                let s = riccati_j_series(l, x);
                assert!((all[l] - s).abs() <= 1e-11 * s.abs(), "l={l} x={x}: {} vs {s}", all[l]);
            }
        }
    }

    #[test]
    fn wronskian_holds() {
        // u_j u_y' - u_j' u_y = 1
        for l in [0, 1, 4, 9] {
            for &x in &[0.7, 3.0, 12.0] {
                let ((j, dj), (y, dy)) = riccati_pair(l, x);
                assert!((j * dy - dj * y - 1.0).abs() < 1e-9, "l={l} x={x}");
            }
        }
    }

    #[test]
    fn legendre_values() {
        let p = legendre_all(4, 0.5);
        assert!((p[2] - (-0.125)).abs() < 1e-15);
        assert!((p[4] - ((35.0 * 0.0625 - 30.0 * 0.25 + 3.0) / 8.0)).abs() < 1e-15);
        let p = legendre_all(7, -1.0);
        assert!((p[7] + 1.0).abs() < 1e-14);
    }
}
