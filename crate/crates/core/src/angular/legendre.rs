//! Associated Legendre functions and spherical harmonics.
//!
//! `assoc_legendre` follows the Abramowitz–Stegun convention in which the
//! factor (-1)^M sits inside P^M_L itself, e.g. P¹₂(cosθ) = -3 cosθ sinθ.
//! Spherical harmonics are then Y^L_M = N_{LM} P^M_L e^{iMφ} with a real,
//! positive normalization N_{LM}; no further phase is applied anywhere.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Associated Legendre function P^M_L(x) for |x| ≤ 1, any |M| ≤ L.
///
/// Negative orders use P^{-M}_L = (-1)^M (L-M)!/(L+M)! · P^M_L. Orders with
/// |M| > L evaluate to zero.
pub fn assoc_legendre(l: u32, m: i32, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "assoc_legendre argument x = {x} outside [-1, 1]"
        )));
    }
    Ok(assoc_legendre_unchecked(l, m, x))
}

/// Same as [`assoc_legendre`] without the domain check; used in inner loops
/// where x is a cosine by construction.
pub fn assoc_legendre_unchecked(l: u32, m: i32, x: f64) -> f64 {
    let l_i = l as i32;
    if m.abs() > l_i {
        return 0.0;
    }
    if m < 0 {
        let ma = -m;
        let mut ratio = 1.0;
        for k in (l_i - ma + 1)..=(l_i + ma) {
            ratio /= k as f64;
        }
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        return sign * ratio * positive_order(l, ma as u32, x);
    }
    positive_order(l, m as u32, x)
}

fn positive_order(l: u32, m: u32, x: f64) -> f64 {
    // P^m_m = (-1)^m (2m-1)!! (1-x^2)^{m/2}, then upward recurrence in l.
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = ((2.0 * llf - 1.0) * x * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Normalization of the spherical harmonic: Y^L_M = `sph_norm` · P^M_L e^{iMφ}.
pub fn sph_norm(l: u32, m: i32) -> f64 {
    let l_i = l as i32;
    let mut ratio = 1.0;
    if m >= 0 {
        for k in (l_i - m + 1)..=(l_i + m) {
            ratio /= k as f64;
        }
    } else {
        for k in (l_i + m + 1)..=(l_i - m) {
            ratio *= k as f64;
        }
    }
    ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * ratio).sqrt()
}

/// Spherical harmonic Y^l_m(θ, φ).
pub fn sph_harm(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let p = assoc_legendre_unchecked(l, m, theta.cos());
    let norm = sph_norm(l, m);
    Complex64::from_polar(1.0, m as f64 * phi) * (norm * p)
}
