//! Angular-momentum algebra: Wigner 3j symbols, associated Legendre
//! functions, Euler-angle integral identities, and the lab-frame coupling
//! coefficients entering every anisotropy-parameter formula.

pub mod legendre;
pub mod wigner3j;
pub mod wigner_d;

pub use legendre::{assoc_legendre, assoc_legendre_unchecked, sph_harm, sph_norm};
pub use wigner3j::{wigner3j, wigner3j_int, wigner3j_uncached, AngularKey, Wigner3jCache};
pub use wigner_d::{wigner_d, wigner_d_small};

use std::f64::consts::PI;

/// Isotropic average of a product of three Wigner rotation matrices,
///
/// (1/8π²) ∫ D^{ℓ₁}_{m₁,m₁'} D^{ℓ₂}_{m₂,m₂'} D^{ℓ₃}_{m₃,m₃'} d³γ
///   = 3j(ℓ₁ℓ₂ℓ₃; m₁m₂m₃) · 3j(ℓ₁ℓ₂ℓ₃; m₁'m₂'m₃').
///
/// Each row is an (ℓ, m, m') triple.
pub fn euler_triple_integral(rows: [(u32, i32, i32); 3]) -> f64 {
    let [(l1, m1, p1), (l2, m2, p2), (l3, m3, p3)] = rows;
    wigner3j_int(l1 as i32, l2 as i32, l3 as i32, m1, m2, m3)
        * wigner3j_int(l1 as i32, l2 as i32, l3 as i32, p1, p2, p3)
}

/// Clebsch–Gordan expansion of a product of two rotation matrices:
///
/// D^{ℓ₁}_{m₁,m₁'} D^{ℓ₂}_{m₂,m₂'} = Σ_ℓ c_ℓ · conj(D^{ℓ}_{-m₁₂,-m₁₂'})
///
/// with m₁₂ = m₁+m₂, m₁₂' = m₁'+m₂' and
/// c_ℓ = (2ℓ+1) · 3j(ℓ₁ℓ₂ℓ; m₁m₂,-m₁₂) · 3j(ℓ₁ℓ₂ℓ; m₁'m₂',-m₁₂').
///
/// Returns the (ℓ, c_ℓ) pairs over the triangle range, including structural
/// zeros.
pub fn d_product_expand(l1: u32, m1: i32, m1p: i32, l2: u32, m2: i32, m2p: i32) -> Vec<(u32, f64)> {
    let m12 = m1 + m2;
    let m12p = m1p + m2p;
    let lo = (l1 as i32 - l2 as i32).unsigned_abs();
    let hi = l1 + l2;
    (lo..=hi)
        .map(|l| {
            let c = (2 * l + 1) as f64
                * wigner3j_int(l1 as i32, l2 as i32, l as i32, m1, m2, -m12)
                * wigner3j_int(l1 as i32, l2 as i32, l as i32, m1p, m2p, -m12p);
            (l, c)
        })
        .collect()
}

/// Prefactor of the molecular-to-lab conversion of a harmonic product,
/// (2L+1)/(4π) · sqrt((2ℓ+1)(2ℓ'+1)·(L-M)!/(L+M)!).
pub fn lab_expansion_prefactor(l: u32, lp: u32, big_l: u32, big_m: i32) -> f64 {
    let li = big_l as i32;
    if big_m.abs() > li {
        return 0.0;
    }
    let mut ratio = 1.0;
    if big_m >= 0 {
        for k in (li - big_m + 1)..=(li + big_m) {
            ratio /= k as f64;
        }
    } else {
        for k in (li + big_m + 1)..=(li - big_m) {
            ratio *= k as f64;
        }
    }
    (2.0 * big_l as f64 + 1.0) / (4.0 * PI) * (((2 * l + 1) * (2 * lp + 1)) as f64 * ratio).sqrt()
}

/// Full coupling weight of one molecular-frame (ℓ,m,ℓ',m') harmonic pair
/// into the lab-frame (L, M) channel:
///
/// (-1)^{m'} · ζ^{L,M}_{ℓ,ℓ'} · 3j(ℓℓ'L; 000) · 3j(ℓℓ'L; m,-m',m'-m)
///
/// where ζ is [`lab_expansion_prefactor`].
pub fn lab_frame_coupling(l: u32, m: i32, lp: u32, mp: i32, big_l: u32, big_m: i32) -> f64 {
    let sign = if mp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * lab_expansion_prefactor(l, lp, big_l, big_m)
        * wigner3j_int(l as i32, lp as i32, big_l as i32, 0, 0, 0)
        * wigner3j_int(l as i32, lp as i32, big_l as i32, m, -mp, mp - m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn triple_integral_trivial_cases() {
        // Two (1,1,0;0,0,0) symbols give 1/3.
        let v = euler_triple_integral([(1, 0, 0), (1, 0, 0), (0, 0, 0)]);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        // Selection-rule violation in the unprimed row.
        let z = euler_triple_integral([(1, 1, 0), (1, 0, 0), (0, 0, 0)]);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn triple_integral_against_quadrature() {
        // Direct (α, β, γ) quadrature of the D-product, 16-point
        // Gauss-Legendre in cos β and trapezoid in α, γ.
        let rows = [(1u32, 1i32, -1i32), (1, -1, 1), (2, 0, 0)];
        let n_ang = 16;
        let (xs, ws) = crate::quad::gauss_legendre(16);
        let d_ang = 2.0 * PI / n_ang as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for ia in 0..n_ang {
            let alpha = ia as f64 * d_ang;
            for (&x, &w) in xs.iter().zip(&ws) {
                let beta = x.acos();
                for ig in 0..n_ang {
                    let gamma = ig as f64 * d_ang;
                    let mut prod = Complex64::new(1.0, 0.0);
                    for &(l, m, mp) in rows.iter() {
                        prod *= wigner_d(l, m, mp, alpha, beta, gamma);
                    }
                    acc += prod * (w * d_ang * d_ang);
                }
            }
        }
        let quad = acc / (8.0 * PI * PI);
        let analytic = euler_triple_integral(rows);
        assert!(
            (quad.re - analytic).abs() < 1e-10 && quad.im.abs() < 1e-12,
            "{quad} vs {analytic}"
        );
    }

    #[test]
    fn product_expand_identity_rep() {
        let terms = d_product_expand(0, 0, 0, 0, 0, 0);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, 0);
        assert!((terms[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_expand_parity_gap() {
        // l1 = l2 = 1, all m zero: only even ℓ survive.
        let terms = d_product_expand(1, 0, 0, 1, 0, 0);
        let coeff: std::collections::HashMap<u32, f64> = terms.into_iter().collect();
        assert!(coeff[&1].abs() == 0.0);
        assert!(coeff[&0].abs() > 0.0);
        assert!(coeff[&2].abs() > 0.0);
    }

    #[test]
    fn product_expand_pointwise() {
        // Re-summing the expansion reproduces the direct product.
        let cases = [
            (1u32, 1i32, 0i32, 1u32, -1i32, 1i32),
            (2, 1, -1, 1, 0, 1),
            (2, -2, 2, 2, 1, 0),
        ];
        let angles = [(0.3, 1.2, 2.1), (1.0, 0.4, 5.0), (2.7, 2.9, 0.8)];
        for &(l1, m1, m1p, l2, m2, m2p) in &cases {
            let terms = d_product_expand(l1, m1, m1p, l2, m2, m2p);
            for &(a, b, g) in &angles {
                let direct = wigner_d(l1, m1, m1p, a, b, g) * wigner_d(l2, m2, m2p, a, b, g);
                let mut summed = Complex64::new(0.0, 0.0);
                for &(l, c) in &terms {
                    summed += wigner_d(l, -(m1 + m2), -(m1p + m2p), a, b, g).conj() * c;
                }
                assert!(
                    (direct - summed).norm() < 1e-12,
                    "({l1},{m1},{m1p})x({l2},{m2},{m2p}) at ({a},{b},{g})"
                );
            }
        }
    }

    #[test]
    fn lab_coupling_monopole() {
        // Y00 · Y00* = 1/4π sits entirely in the (0,0) channel.
        let v = lab_frame_coupling(0, 0, 0, 0, 0, 0);
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
        for big_l in 1..=3 {
            assert_eq!(lab_frame_coupling(0, 0, 0, 0, big_l, 0), 0.0);
        }
    }

    #[test]
    fn lab_coupling_against_spherical_quadrature() {
        // Weight of Y^1_0 Y^{1*}_0 in the L=2 molecular channel: project
        // Y^1_0 Y^{1*}_0 onto P^0_2 over the sphere and divide by the
        // P-norm; must match the coupling coefficient.
        let (xs, ws) = crate::quad::gauss_legendre(32);
        let mut acc = 0.0;
        for (&x, &w) in xs.iter().zip(&ws) {
            let theta = x.acos();
            let y = sph_harm(1, 0, theta, 0.0);
            let p2 = assoc_legendre(2, 0, x).unwrap();
            acc += w * (y * y.conj()).re * p2;
        }
        acc *= 2.0 * PI; // azimuthal factor for m=0 integrand
        let p_norm = 2.0 / 5.0 * 2.0 * PI; // ∫ P2² dΩ at M=0
        let projected = acc / p_norm;
        let coupling = lab_frame_coupling(1, 0, 1, 0, 2, 0);
        assert!(
            (projected - coupling).abs() < 1e-12,
            "{projected} vs {coupling}"
        );
    }
}
