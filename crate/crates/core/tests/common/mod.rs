#![allow(dead_code)]

use num_complex::Complex64 as C64;

/// Generalized binomial `w(w−1)⋯(w−j+1)/j!`.
pub fn binom(w: C64, j: usize) -> C64 {
    (0..j).fold(C64::new(1.0, 0.0), |acc, i| acc * (w - i as f64) / (j - i) as f64)
}

/// `P_n^(a,b)(z) = Σ_s C(n+a, n−s) C(n+b, s) ((z−1)/2)^s ((z+1)/2)^(n−s)`.
pub fn jacobi_sum(n: usize, a: C64, b: C64, z: C64) -> C64 {
    let nf = n as f64;
    let lo = (z - 1.0) / 2.0;
    let hi = (z + 1.0) / 2.0;
    (0..=n)
        .map(|s| binom(a + nf, n - s) * binom(b + nf, s) * lo.powu(s as u32) * hi.powu((n - s) as u32))
        .sum()
}

/// Largest term modulus of the finite sum; the natural scale for rounding.
pub fn jacobi_sum_scale(n: usize, a: C64, b: C64, z: C64) -> f64 {
    let nf = n as f64;
    let lo = (z - 1.0) / 2.0;
    let hi = (z + 1.0) / 2.0;
    (0..=n)
        .map(|s| (binom(a + nf, n - s) * binom(b + nf, s) * lo.powu(s as u32) * hi.powu((n - s) as u32)).norm())
        .fold(0.0, f64::max)
}
