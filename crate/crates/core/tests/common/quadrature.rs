//! Adaptive Simpson quadrature, independent of the library code.

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_a^b f` to roughly absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f: &dyn Fn(f64) -> f64 = &f;
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_0^x pdf` for a density with inverse-square-root singularities at 0
/// and 1. Substituting `y = u²` near 0 and `y = 1 − u²` near 1 leaves
/// smooth integrands. `u` is clamped to at least 1e-6: `1 − u²` is then
/// still resolved in f64, and the substituted integrand is flat there, so
/// the clamp costs far less than 1e-10.
pub fn integrate_singular_01(pdf: impl Fn(f64) -> f64, x: f64, tol: f64) -> f64 {
    const TINY: f64 = 1e-6;
    let head = |u: f64| {
        let u = u.max(TINY);
        2.0 * u * pdf(u * u)
    };
    let tail = |u: f64| {
        let u = u.max(TINY);
        2.0 * u * pdf(1.0 - u * u)
    };
    let mid = 0.5f64.sqrt();
    if x <= 0.5 {
        integrate(head, 0.0, x.sqrt(), tol)
    } else {
        integrate(head, 0.0, mid, tol) + integrate(tail, (1.0 - x).sqrt(), mid, tol)
    }
}
