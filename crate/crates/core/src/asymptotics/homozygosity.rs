use crate::error::{Error, Result};
use crate::special::ln_gamma;

fn check(alpha: f64, m: u32) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if m < 2 {
        return Err(Error::domain(format!("homozygosity order must be >= 2, got {m}")));
    }
    Ok(())
}

/// `Γ(m-α)/Γ(1-α)` and `Γ(2m-α)/Γ(1-α)`.
fn gamma_ratios(alpha: f64, m: u32) -> (f64, f64) {
    let mf = m as f64;
    let base = ln_gamma(1.0 - alpha);
    (
        (ln_gamma(mf - alpha) - base).exp(),
        (ln_gamma(2.0 * mf - alpha) - base).exp(),
    )
}

/// `σ²_{α,m} = Γ(2m-α)Γ(1-α)/Γ(m-α)² + α - m²`.
pub fn sigma2(alpha: f64, m: u32) -> Result<f64> {
    check(alpha, m)?;
    let mf = m as f64;
    let lead = (ln_gamma(2.0 * mf - alpha) + ln_gamma(1.0 - alpha) - 2.0 * ln_gamma(mf - alpha)).exp();
    Ok(lead + alpha - mf * mf)
}

/// Cross and `t²` coefficients `(k, q)` of `Λ(s,t) = ½(s² + 2k·st + q·t²)`.
fn coefficients(alpha: f64, m: u32) -> (f64, f64) {
    let (r, r2) = gamma_ratios(alpha, m);
    (m as f64 * r, r2 + alpha * r * r)
}

pub fn lambda_pair(s: f64, t: f64, alpha: f64, m: u32) -> Result<f64> {
    check(alpha, m)?;
    let (k, q) = coefficients(alpha, m);
    Ok(0.5 * (s * s + 2.0 * k * s * t + q * t * t))
}

/// `(∂Λ/∂s, ∂Λ/∂t)`.
pub fn lambda_pair_gradient(s: f64, t: f64, alpha: f64, m: u32) -> Result<(f64, f64)> {
    check(alpha, m)?;
    let (k, q) = coefficients(alpha, m);
    Ok((s + k * t, k * s + q * t))
}

/// Legendre transform of `Λ`:
/// `Γ(1-α)·[(Γ(2m-α) + αΓ(m-α)²/Γ(1-α))x² - 2mΓ(m-α)xy + Γ(1-α)y²] / (2(Γ(1-α)Γ(2m-α) + (α-m²)Γ(m-α)²))`,
/// evaluated with every Gamma divided by `Γ(1-α)`.
pub fn lambda_star(x: f64, y: f64, alpha: f64, m: u32) -> Result<f64> {
    check(alpha, m)?;
    let mf = m as f64;
    let (r, r2) = gamma_ratios(alpha, m);
    let det = r2 + (alpha - mf * mf) * r * r;
    if !(det > 0.0) {
        return Err(Error::domain(format!(
            "quadratic form is not positive definite at alpha={alpha}, m={m} (determinant {det:e})"
        )));
    }
    Ok(((r2 + alpha * r * r) * x * x - 2.0 * mf * r * x * y + y * y) / (2.0 * det))
}

/// `z² / (2σ²_{α,m})`.
pub fn contracted_rate(z: f64, alpha: f64, m: u32) -> Result<f64> {
    Ok(z * z / (2.0 * sigma2(alpha, m)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMinimum {
    pub closed_form: f64,
    pub numeric: f64,
    /// Minimizing `x` on the constraint line.
    pub argmin: f64,
}

/// Minimizes `Λ*(x, y)` over `yΓ(1-α)/Γ(m-α) - m·x = z` by golden-section
/// search on `x` and reports it next to [`contracted_rate`].
pub fn line_minimum(z: f64, alpha: f64, m: u32) -> Result<LineMinimum> {
    let closed_form = contracted_rate(z, alpha, m)?;
    let (r, _) = gamma_ratios(alpha, m);
    let mf = m as f64;
    let f = |x: f64| lambda_star(x, r * (z + mf * x), alpha, m);
    f(0.0)?;
    let f = |x: f64| f(x).expect("form checked above");

    // expand a bracket around 0 until the ends rise above the middle
    let mut half = 1.0 + z.abs();
    while f(-half) <= f(0.0).min(f(half)) || f(half) <= f(0.0).min(f(-half)) {
        half *= 2.0;
        if half > 1e12 {
            break;
        }
    }
    let (mut lo, mut hi) = (-half, half);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
        if hi - lo <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    let argmin = 0.5 * (lo + hi);
    Ok(LineMinimum {
        closed_form,
        numeric: f(argmin),
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn variance_values() {
        assert!((sigma2(0.5, 2).unwrap() - 4.0).abs() < 1e-12);
        assert!((sigma2(0.5, 3).unwrap() - 44.0).abs() < 1e-11);
        assert!((sigma2(1e-9, 2).unwrap() - 2.0).abs() < 1e-6);
        assert!(sigma2(0.5, 1).is_err());
    }

    #[test]
    fn quadratic_form_values() {
        assert!((lambda_pair(3.0, 0.0, 0.3, 2).unwrap() - 4.5).abs() < 1e-15);
        assert!((lambda_pair(0.0, 1.0, 0.5, 2).unwrap() - 1.0).abs() < 1e-13);
        assert!((lambda_pair(1.0, 1.0, 0.5, 2).unwrap() - 2.5).abs() < 1e-13);
        assert_eq!(lambda_star(0.0, 0.0, 0.5, 2).unwrap(), 0.0);
        assert!((lambda_star(1.0, 0.0, 0.5, 2).unwrap() - 1.0).abs() < 1e-13);
        assert!((lambda_star(0.0, 1.0, 0.5, 2).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn contraction() {
        assert_eq!(contracted_rate(0.0, 0.5, 2).unwrap(), 0.0);
        assert!((contracted_rate(1.0, 0.5, 2).unwrap() - 0.125).abs() < 1e-14);
        for &(a, m) in &[(0.3, 2), (0.5, 2), (0.5, 3)] {
            for i in 0..21 {
                let z = -5.0 + 0.5 * i as f64;
                let l = line_minimum(z, a, m).unwrap();
                assert!((l.numeric - l.closed_form).abs() < 1e-6, "z={z} a={a} m={m}: {l:?}");
            }
        }
        for z in [-2.0, 1.0, 3.0] {
            let l = line_minimum(z, 0.5, 2).unwrap();
            assert!((l.numeric - l.closed_form).abs() < 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn legendre_duality(s in -5.0f64..5.0, t in -5.0f64..5.0, alpha in 0.05f64..0.95, m in 2u32..5) {
            let (gs, gt) = lambda_pair_gradient(s, t, alpha, m).unwrap();
            let lhs = lambda_star(gs, gt, alpha, m).unwrap();
            let rhs = s * gs + t * gt - lambda_pair(s, t, alpha, m).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
        }

        #[test]
        fn gradient_matches_central_differences(s in -3.0f64..3.0, t in -3.0f64..3.0, alpha in 0.05f64..0.95) {
            let h = 1e-5;
            let (gs, gt) = lambda_pair_gradient(s, t, alpha, 2).unwrap();
            let l = |s, t| lambda_pair(s, t, alpha, 2).unwrap();
            let ds = (l(s + h, t) - l(s - h, t)) / (2.0 * h);
            let dt = (l(s, t + h) - l(s, t - h)) / (2.0 * h);
            prop_assert!((ds - gs).abs() < 1e-6);
            prop_assert!((dt - gt).abs() < 1e-6);
        }
    }
}
