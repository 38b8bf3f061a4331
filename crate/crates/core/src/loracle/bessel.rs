//! The modified Bessel function K_1 and the smoothing weight built from it.

/// K_1(z) for z > 0 from K_1(z) = int_0^inf exp(-z cosh u) cosh u du.
///
/// The integrand is entire and decays doubly exponentially, so the plain
/// trapezoid rule converges geometrically in the step size.
pub fn bessel_k1(z: f64) -> f64 {
    assert!(z > 0.0, "K_1 needs a positive argument");
    let h = 0.05;
    let f = |u: f64| {
        let c = u.cosh();
        (-z * c).exp() * c
    };
    // Stop once exp(-z (cosh u - 1)) is below 1e-40 of the first term.
    let cutoff = z + 92.0;
    let mut sum = 0.5 * f(0.0);
    let mut k = 1;
    loop {
        let u = k as f64 * h;
        if z * u.cosh() > cutoff {
            break;
        }
        sum += f(u);
        k += 1;
    }
    sum * h
}

/// V(x) = 2 sqrt(x) K_1(2 sqrt(x)), the inverse Mellin transform of Gamma(1+u)^2 / u.
pub fn smoothing_weight(x: f64) -> f64 {
    let y = 2.0 * x.sqrt();
    y * bessel_k1(y)
}
