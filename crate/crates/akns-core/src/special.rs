//! Special-function kernels: generalized Laguerre recurrences, Clenshaw
//! summation, the scaled complementary error function, and a double-precision
//! complex Gamma for closed-form oracles.

use crate::fft;
use crate::scalar::{c_from_f64, c_scale, cabs, cexp, cln, Real, C};
use num_complex::Complex;
use num_traits::Zero;
use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// L^(1)_0(x), ..., L^(1)_{m-1}(x) by the three-term recurrence.
pub fn laguerre_gl1<R: Real>(x: &R, m: usize) -> Vec<R> {
    assert!(m >= 1);
    let mut out = Vec::with_capacity(m);
    out.push(R::one());
    if m == 1 {
        return out;
    }
    out.push(R::from_f64(2.0) - x.clone());
    for n in 1..m - 1 {
        // (n+1) L_{n+1} = (2n+2-x) L_n - (n+1) L_{n-1}
        let np1 = R::from_f64((n + 1) as f64);
        let a = (R::from_f64((2 * n + 2) as f64) - x.clone()) * out[n].clone();
        let next = (a - np1.clone() * out[n - 1].clone()) / np1;
        out.push(next);
    }
    out
}

/// L^(a)_n(x) for integer parameter a >= 0. Reference use only (small n).
pub fn laguerre_general<R: Real>(a: usize, n: usize, x: &R) -> R {
    let af = R::from_f64(a as f64);
    let mut prev = R::one();
    if n == 0 {
        return prev;
    }
    let mut cur = R::one() + af.clone() - x.clone();
    for k in 1..n {
        let kp1 = R::from_f64((k + 1) as f64);
        let b = R::from_f64((2 * k + 1) as f64) + af.clone() - x.clone();
        let next = (b * cur.clone() - (R::from_f64(k as f64) + af.clone()) * prev) / kp1;
        prev = cur;
        cur = next;
    }
    cur
}

/// Σ_n coeffs_n L^(1)_n(x) by backward (Clenshaw) recurrence.
///
/// With A_n = (2n+2-x)/(n+1) and B_n = -1 the sum collapses to b_0 since
/// L^(1)_1 = A_0 L^(1)_0.
pub fn clenshaw_laguerre<R: Real>(coeffs: &[C<R>], x: &R) -> C<R> {
    if coeffs.is_empty() {
        return Complex::zero();
    }
    let mut b1: C<R> = Complex::zero();
    let mut b2: C<R> = Complex::zero();
    for n in (0..coeffs.len()).rev() {
        let a_n = (R::from_f64((2 * n + 2) as f64) - x.clone()) / R::from_f64((n + 1) as f64);
        let b0 = coeffs[n].clone() + c_scale(&b1, &a_n) - b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

// ---------------------------------------------------------------------------
// erfcx via the rational series of the mapped-basis construction.
// ---------------------------------------------------------------------------

thread_local! {
    static ERFCX_COEFFS: RefCell<HashMap<(TypeId, usize, usize), Rc<dyn Any>>> =
        RefCell::new(HashMap::new());
}

fn erfcx_terms(digits: usize) -> usize {
    // ~0.36 digits per term; padded.
    ((digits as f64 / 0.36).ceil() as usize + 8).max(40)
}

/// Cosine-series coefficients a_1..a_N of exp(-t²)(L²+t²) under t = L tan(θ/2).
fn erfcx_table<R: Real>() -> (R, Rc<Vec<R>>) {
    let n_terms = erfcx_terms(R::digits());
    let l = (R::from_f64(n_terms as f64) / R::from_f64(2.0).sqrt()).sqrt();
    let key = (TypeId::of::<R>(), n_terms, R::digits());
    let coeffs = ERFCX_COEFFS.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(t) = cache.get(&key) {
            return t.clone().downcast::<Vec<R>>().unwrap();
        }
        let m = 2 * n_terms;
        // Sample on θ_k = kπ/M; f(±π) = 0, f even.
        let mut samples: Vec<C<R>> = Vec::with_capacity(2 * m);
        let pi = R::pi();
        for k in 0..2 * m {
            // k indexes θ = -π + kπ/M
            let theta = -pi.clone() + pi.clone() * R::from_f64(k as f64) / R::from_f64(m as f64);
            let t = l.clone() * (theta.clone() / R::from_f64(2.0)).tan();
            let v = if k == 0 {
                R::zero()
            } else {
                (-(t.clone() * t.clone())).exp() * (l.clone() * l.clone() + t.clone() * t)
            };
            samples.push(Complex::new(v, R::zero()));
        }
        // a_n = (1/2M) Σ_k f(θ_k) e^{-inθ_k}; fold the -π offset into a sign.
        let hat = fft::dft(&samples);
        let mut a = Vec::with_capacity(n_terms);
        for n in 1..=n_terms {
            let sign = if n % 2 == 0 { R::one() } else { -R::one() };
            a.push(hat[n].re.clone() * sign);
        }
        let rc: Rc<Vec<R>> = Rc::new(a);
        cache.insert(key, rc.clone());
        rc
    });
    (l, coeffs)
}

/// Faddeeva function w(z) = e^{-z²} erfc(-iz) for Im z >= 0.
fn faddeeva_upper<R: Real>(z: &C<R>) -> C<R> {
    let (l, a) = erfcx_table::<R>();
    let lc = Complex::new(l.clone(), R::zero());
    let iz = Complex::new(-z.im.clone(), z.re.clone());
    let denom = lc.clone() - iz.clone();
    let big_z = (lc + iz) / denom.clone();
    // p(Z) = Σ_{n=1}^N a_n Z^{n-1}, Horner from the top.
    let mut p: C<R> = Complex::zero();
    for an in a.iter().rev() {
        p = p * big_z.clone() + Complex::new(an.clone(), R::zero());
    }
    let inv_sqrt_pi = R::one() / R::pi().sqrt();
    c_scale(&(p / (denom.clone() * denom.clone())), &R::from_f64(2.0))
        + c_scale(&(Complex::new(R::one(), R::zero()) / denom), &inv_sqrt_pi)
}

/// Exponentially scaled complementary error function e^{z²} erfc(z).
///
/// Accurate to working precision for Re z >= 0 and moderate |Im z|; the
/// reflection erfcx(-z) = 2 e^{z²} - erfcx(z) covers the left half plane.
pub fn erfcx<R: Real>(z: &C<R>) -> C<R> {
    if z.re >= R::zero() {
        faddeeva_upper(&Complex::new(-z.im.clone(), z.re.clone()))
    } else {
        let nz = -z.clone();
        let e = cexp(&(z.clone() * z.clone()));
        c_scale(&e, &R::from_f64(2.0)) - faddeeva_upper(&Complex::new(nz.im.clone().neg(), nz.re.clone()))
    }
}

/// erf on the real line, via erfcx.
pub fn erf_real<R: Real>(x: &R) -> R {
    if *x >= R::zero() {
        let e = (-(x.clone() * x.clone())).exp();
        R::one() - e * erfcx(&Complex::new(x.clone(), R::zero())).re
    } else {
        -erf_real(&(-x.clone()))
    }
}

// ---------------------------------------------------------------------------
// Complex Gamma at double precision (Lanczos), for closed-form oracles.
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Γ(z) for complex z at double precision.
pub fn gamma_complex(z: Complex<f64>) -> Complex<f64> {
    if z.re < 0.5 {
        // Reflection: Γ(z) Γ(1-z) = π / sin(πz)
        let pi = std::f64::consts::PI;
        let s = (Complex::new(pi, 0.0) * z).sin();
        return Complex::new(pi, 0.0) / (s * gamma_complex(Complex::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let mut x = Complex::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += Complex::new(*c, 0.0) / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt_two_pi * t.powc(zm1 + 0.5) * (-t).exp() * x
}

/// Tangent numbers T_1..T_n (1, 2, 16, 272, ...) by the Seidel/Knuth
/// triangle in exact integer arithmetic; B_{2n} = (-1)^{n-1} T_n·2n/(4ⁿ(4ⁿ-1)).
fn tangent_numbers(n: usize) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    let mut t: Vec<BigUint> = vec![BigUint::from(0u32); n + 1];
    if n >= 1 {
        t[1] = BigUint::from(1u32);
    }
    for k in 2..=n {
        t[k] = &t[k - 1] * BigUint::from((k - 1) as u64);
    }
    for k in 2..=n {
        for j in k..=n {
            let a = &t[j - 1] * BigUint::from((j - k) as u64);
            let b = &t[j] * BigUint::from((j - k + 2) as u64);
            t[j] = a + b;
        }
    }
    t.remove(0);
    t
}

/// Stirling coefficients B_{2k}/(2k(2k-1)) at the working precision.
fn stirling_coefficients<R: Real>(kmax: usize) -> Vec<R> {
    let tangents = tangent_numbers(kmax);
    let mut four_pow = R::from_f64(4.0);
    let mut out = Vec::with_capacity(kmax);
    for (idx, t) in tangents.iter().enumerate() {
        let k = idx + 1;
        let tk = R::from_decimal(&t.to_string()).expect("tangent number literal");
        let b2k_abs = tk * R::from_f64(2.0 * k as f64)
            / (four_pow.clone() * (four_pow.clone() - R::one()));
        let b2k = if k % 2 == 1 { b2k_abs } else { -b2k_abs };
        out.push(b2k / R::from_f64((2 * k * (2 * k - 1)) as f64));
        four_pow = four_pow * R::from_f64(4.0);
    }
    out
}

/// ln Γ(z) for Re z ≥ 1/2 at the working precision: the Stirling series after
/// an upward argument shift sized so the series reaches 10^(-digits).
///
/// Spouge's series is avoided here: its alternating coefficients grow like
/// 10^(a/2) and eat roughly half the working digits to cancellation.
pub fn ln_gamma_extended<R: Real>(z: &C<R>) -> C<R> {
    let digits = R::digits();
    let target = (0.75 * digits as f64).max(12.0);
    let shift = (target - z.re.to_f64()).ceil().max(0.0) as usize;
    let zs = z.clone() + Complex::new(R::from_f64(shift as f64), R::zero());
    let kmax = (1.6 * digits as f64).ceil() as usize + 8;
    let coeffs = stirling_coefficients::<R>(kmax);
    let inv = Complex::new(R::one(), R::zero()) / zs.clone();
    let inv2 = inv.clone() * inv.clone();
    let mut pow = inv; // zs^{1-2k} starting at k = 1
    let mut series: C<R> = Complex::zero();
    let tol = R::from_decimal(&format!("1e-{}", digits + 6)).unwrap_or_else(R::eps);
    for c in &coeffs {
        let term = c_scale(&pow, c);
        series = series + term.clone();
        if cabs(&term) < tol {
            break;
        }
        pow = pow * inv2.clone();
    }
    let half = Complex::new(R::from_f64(0.5), R::zero());
    let two_pi = R::pi() * R::from_f64(2.0);
    let mut out = (zs.clone() - half) * cln(&zs) - zs.clone()
        + Complex::new(two_pi.ln() * R::from_f64(0.5), R::zero())
        + series;
    // remove the shift: ln Γ(z) = ln Γ(z+N) - Σ ln(z+j)
    for j in 0..shift {
        out = out - cln(&(z.clone() + Complex::new(R::from_f64(j as f64), R::zero())));
    }
    out
}

/// Γ(z) at the working precision, with reflection for Re z < 1/2.
pub fn gamma_extended<R: Real>(z: &C<R>) -> C<R> {
    if z.re < R::from_f64(0.5) {
        let pi = R::pi();
        let piz = c_scale(z, &pi);
        // sin via exp to stay inside the Real trait surface
        let i_piz = Complex::new(-piz.im.clone(), piz.re.clone());
        let s = (cexp(&i_piz) - cexp(&(-i_piz))) / c_from_f64::<R>(0.0, 2.0);
        let one = Complex::new(R::one(), R::zero());
        return Complex::new(pi, R::zero()) / (s * gamma_extended(&(one - z.clone())));
    }
    cexp(&ln_gamma_extended(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_at_zero_is_n_plus_1() {
        let vals = laguerre_gl1(&0.0_f64, 12);
        for (n, v) in vals.iter().enumerate() {
            assert!((v - (n as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn laguerre_at_two() {
        let vals = laguerre_gl1(&2.0_f64, 2);
        assert_eq!(vals[0], 1.0);
        assert!(vals[1].abs() < 1e-15);
    }

    #[test]
    fn laguerre_matches_series() {
        // L^(1)_n(x) = Σ_k C(n+1, n-k) (-x)^k / k!
        let x = 1.5_f64;
        let m = 10;
        let vals = laguerre_gl1(&x, m);
        for n in 0..m {
            let mut s = 0.0;
            let mut fact = 1.0;
            for k in 0..=n {
                if k > 0 {
                    fact *= k as f64;
                }
                let mut binom = 1.0;
                for i in 0..(k + 1) {
                    binom *= (n as f64 + 1.0 - i as f64) / (i as f64 + 1.0);
                }
                s += binom * (-x).powi(k as i32) / fact;
            }
            assert!((vals[n] - s).abs() < 1e-13, "n={n}: {} vs {}", vals[n], s);
        }
    }

    #[test]
    fn clenshaw_matches_naive() {
        let x = 0.7_f64;
        let coeffs: Vec<C<f64>> = (0..20)
            .map(|k| Complex::new((k as f64 * 1.3).sin(), (k as f64 * 0.7).cos()))
            .collect();
        let direct = {
            let lag = laguerre_gl1(&x, 20);
            let mut acc = Complex::new(0.0, 0.0);
            for (c, l) in coeffs.iter().zip(&lag) {
                acc += c * l;
            }
            acc
        };
        let clenshaw = clenshaw_laguerre(&coeffs, &x);
        assert!((direct - clenshaw).norm() < 1e-13);
        assert!((clenshaw_laguerre(&[Complex::new(1.0, 0.0)], &x) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let l1_at_2 = clenshaw_laguerre(&[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], &2.0);
        assert!(l1_at_2.norm() < 1e-15);
    }

    #[test]
    fn erfcx_values() {
        // erfcx(0) = 1
        let v = erfcx(&Complex::new(0.0_f64, 0.0));
        assert!((v.re - 1.0).abs() < 1e-14 && v.im.abs() < 1e-14);
        // erfcx(1): e * erfc(1), erfc(1) from an independent Taylor sum for erf.
        let erf1 = {
            let mut s = 0.0_f64;
            let mut term;
            let mut fact = 1.0;
            for n in 0..40 {
                if n > 0 {
                    fact *= n as f64;
                }
                term = (-1.0_f64).powi(n as i32) / (fact * (2.0 * n as f64 + 1.0));
                s += term;
            }
            2.0 / std::f64::consts::PI.sqrt() * s
        };
        let expected = std::f64::consts::E * (1.0 - erf1);
        let got = erfcx(&Complex::new(1.0_f64, 0.0)).re;
        assert!((got - expected).abs() < 1e-13, "{got} vs {expected}");
        assert!((got - 0.4275835761558070).abs() < 1e-13);
        // Large-argument asymptotics: erfcx(z) ~ (1/(z√π)) Σ (-1)^n (2n-1)!!/(2z²)^n,
        // summed adaptively to its smallest term (far below 1e-16 at z = 50).
        let z = 50.0_f64;
        let asym = {
            let mut term = 1.0;
            let mut s = 1.0;
            let mut n = 0;
            loop {
                n += 1;
                let next = term * -((2 * n - 1) as f64) / (2.0 * z * z);
                if next.abs() >= term.abs() || next.abs() < 1e-20 {
                    break;
                }
                s += next;
                term = next;
            }
            s / (z * std::f64::consts::PI.sqrt())
        };
        let got = erfcx(&Complex::new(z, 0.0)).re;
        assert!(((got - asym) / asym).abs() < 1e-10, "{got} vs {asym}");
    }

    #[test]
    fn erf_plus_erfc_is_one() {
        for i in -50..=50 {
            let x = i as f64 * 0.1;
            let erf = erf_real(&x);
            let erfc = (-(x * x)).exp() * erfcx(&Complex::new(x, 0.0)).re;
            assert!((erf + erfc - 1.0).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn gamma_known_values() {
        let g5 = gamma_complex(Complex::new(5.0, 0.0));
        assert!((g5.re - 24.0).abs() < 1e-10);
        let gh = gamma_complex(Complex::new(0.5, 0.0));
        assert!((gh.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let y = 1.3;
        let g = gamma_complex(Complex::new(0.5, y));
        let expected = std::f64::consts::PI / (std::f64::consts::PI * y).cosh();
        assert!((g.norm_sqr() - expected).abs() < 1e-12);
    }

    #[test]
    fn extended_gamma_matches_lanczos_at_double() {
        for &(re, im) in &[(3.2, 1.1), (0.7, -2.0), (-1.3, 0.4), (5.0, 0.0), (0.5, 4.0)] {
            let z = Complex::new(re, im);
            let a = gamma_complex(z);
            let b = gamma_extended(&z);
            assert!((a - b).norm() / a.norm() < 1e-12, "z={z}: {a} vs {b}");
        }
    }
}
