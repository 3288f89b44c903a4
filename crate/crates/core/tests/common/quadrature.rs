use std::f64::consts::PI;

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 { 1.0 } else { t.sin() / t }
}

/// `int_{-w}^{w} |Re(psi1* psi2)| dx` for the continuum slit amplitudes
/// normalized on the same window. The integrand is split at the zeros of
/// `cos(2 pi x d / (lambda L))` so each panel is smooth.
pub fn l1_cross_term(lambda: f64, d: f64, a: f64, l: f64, w: f64) -> f64 {
    let scale = lambda * l;
    let envelope = |x: f64| sinc(PI * a * x / scale).powi(2);
    let period = scale / d;
    let mut cuts = vec![-w];
    let mut z = -w - (-w).rem_euclid(period / 2.0) + period / 4.0;
    if z <= -w {
        z += period / 2.0;
    }
    while z < w {
        cuts.push(z);
        z += period / 2.0;
    }
    cuts.push(w);
    let norm: f64 = cuts
        .windows(2)
        .map(|c| adaptive_simpson(&envelope, c[0], c[1], 1e-13))
        .sum();
    let integrand = |x: f64| envelope(x) * (2.0 * PI * x * d / scale).cos().abs() / norm;
    cuts.windows(2)
        .map(|c| adaptive_simpson(&integrand, c[0], c[1], 1e-14))
        .sum()
}
