//! Wigner rotation matrices evaluated explicitly at given Euler angles.
//!
//! Convention: D^{(j)}_{m,m'}(α, β, γ) = e^{-imα} d^{(j)}_{m,m'}(β) e^{-im'γ}
//! with d^{(j)}_{m,m'}(β) = ⟨j m| e^{-iβ J_y} |j m'⟩. These enter only the
//! brute-force orientation-averaging path; the analytic path never touches
//! them.

use num_complex::Complex64;
use std::sync::OnceLock;

fn factorials() -> &'static [f64; 171] {
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0f64; 171];
        for n in 1..171 {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// Small Wigner d-matrix element d^{(j)}_{m,mp}(β) for integer j.
pub fn wigner_d_small(j: u32, m: i32, mp: i32, beta: f64) -> f64 {
    let j = j as i32;
    if m.abs() > j || mp.abs() > j {
        return 0.0;
    }
    let f = factorials();
    let c = (0.5 * beta).cos();
    let s = (0.5 * beta).sin();
    let root =
        (f[(j + m) as usize] * f[(j - m) as usize] * f[(j + mp) as usize] * f[(j - mp) as usize])
            .sqrt();
    // summation index bounds such that every factorial argument is >= 0
    let k_min = 0.max(mp - m);
    let k_max = (j + mp).min(j - m);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = f[(j + mp - k) as usize]
            * f[k as usize]
            * f[(j - m - k) as usize]
            * f[(k + m - mp) as usize];
        let sign = if (k + m - mp) % 2 == 0 { 1.0 } else { -1.0 };
        let pc = 2 * j - 2 * k + mp - m;
        let ps = 2 * k + m - mp;
        sum += sign * c.powi(pc) * s.powi(ps) / denom;
    }
    root * sum
}

/// Full Wigner D-matrix element D^{(j)}_{m,mp}(α, β, γ).
pub fn wigner_d(j: u32, m: i32, mp: i32, alpha: f64, beta: f64, gamma: f64) -> Complex64 {
    let d = wigner_d_small(j, m, mp, beta);
    Complex64::from_polar(1.0, -(m as f64 * alpha + mp as f64 * gamma)) * d
}
