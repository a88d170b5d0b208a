//! Oscillatory Cauchy operators on bundles, closed-form Fourier transforms of
//! the basis functions, principal-value integrals, and off-axis evaluation.
//!
//! C⁺ acts block-by-block: when αj ≥ 0 it keeps or kills the term outright;
//! when αj < 0 the result is the same-α part plus a non-oscillatory residue
//! polynomial, evaluated on the interpolation grid by the column recurrence
//!
//!   r_j(z) = (1+z) r_{j-1}(z) - e^{-|α|ν} z (L¹_{j-1}(2|α|ν) - L¹_{j-2}(2|α|ν)),
//!
//! z = -2iσν/(ω + σiν), and re-expanded with ℛ_{n,0}. C⁻ is C⁺ - I exactly in
//! coefficients. The kernel convention is 1/(k' - k), fixed by C⁺ - C⁻ = I.

use crate::basis::{interpolate_nonosc, BasisParams, InterpolationGrid, RationalExpansion};
use crate::bundle::OscillatoryBundle;
use crate::fft::next_pow2;
use crate::scalar::{c_scale, Real, C};
use crate::special::{clenshaw_laguerre, laguerre_gl1};
use num_complex::Complex;
use num_traits::Zero;

/// Closed-form Fourier transform of R_{j,0} at real ω.
pub fn hat_r<R: Real>(j: i64, params: &BasisParams<R>, omega: &R) -> C<R> {
    assert!(j != 0);
    let nu = &params.nu;
    let two_pi_nu = R::pi() * R::from_f64(2.0) * nu.clone();
    if omega.is_zero() {
        return Complex::new(-(two_pi_nu * R::from_f64(j.unsigned_abs() as f64)), R::zero());
    }
    let same_sign = (j > 0) == (*omega > R::zero());
    if !same_sign {
        return Complex::zero();
    }
    let abs_w = omega.abs();
    let arg = R::from_f64(2.0) * abs_w.clone() * nu.clone();
    let lag = laguerre_gl1(&arg, j.unsigned_abs() as usize);
    let l = lag[j.unsigned_abs() as usize - 1].clone();
    let v = -(R::from_f64(4.0) * R::pi() * nu.clone() * (-(abs_w * nu.clone())).exp() * l);
    Complex::new(v, R::zero())
}

/// Σ_j c_j R̂_j(ω) for an α = 0 expansion, by Clenshaw on each sign class.
pub fn ft_of_expansion<R: Real>(e: &RationalExpansion<R>, omega: &R) -> C<R> {
    let nu = &e.params.nu;
    if omega.is_zero() {
        // -2πν Σ_j |j| c_j
        let mut acc: C<R> = Complex::zero();
        for (k, c) in e.pos.iter().enumerate() {
            acc = acc + c_scale(c, &R::from_f64((k + 1) as f64));
        }
        for (k, c) in e.neg.iter().enumerate() {
            acc = acc + c_scale(c, &R::from_f64((k + 1) as f64));
        }
        return c_scale(&acc, &(-(R::pi() * R::from_f64(2.0) * nu.clone())));
    }
    let class = if *omega > R::zero() { &e.pos } else { &e.neg };
    if class.is_empty() {
        return Complex::zero();
    }
    let abs_w = omega.abs();
    let arg = R::from_f64(2.0) * abs_w.clone() * nu.clone();
    let s = clenshaw_laguerre(class, &arg);
    let factor = -(R::from_f64(4.0) * R::pi() * nu.clone() * (-(abs_w * nu.clone())).exp());
    c_scale(&s, &factor)
}

/// p.v. ∫ of the function a bundle represents: Σ over blocks of the block's
/// transform evaluated at -α.
pub fn pv_integral<R: Real>(b: &OscillatoryBundle<R>) -> C<R> {
    let mut acc: C<R> = Complex::zero();
    for (alpha, e) in &b.blocks {
        acc = acc + ft_of_expansion(e, &-alpha.clone());
    }
    acc
}

/// lim_{k→∞} k·𝒞b(k) in the principal-value sense: -(1/2πi)·pv ∫ b.
pub fn large_k_limit<R: Real>(b: &OscillatoryBundle<R>) -> C<R> {
    let integral = pv_integral(b);
    // -(1/(2πi)) = i/(2π)
    let factor = R::one() / (R::pi() * R::from_f64(2.0));
    Complex::new(-(integral.im.clone() * factor.clone()), integral.re.clone() * factor)
}

/// Evaluate Σ_{|j|=1..m} c_{σj} r_{σj,α}(z(ω_i)) at the finite grid nodes.
///
/// `coeffs[k]` is the coefficient of index σ(k+1); σ = ±1. The matrix M_σ is
/// never materialized. Cost O(m·n).
pub fn msigma_apply<R: Real>(
    params: &BasisParams<R>,
    sigma: i64,
    alpha: &R,
    coeffs: &[C<R>],
    grid: &InterpolationGrid<R>,
) -> Vec<C<R>> {
    debug_assert!(sigma == 1 || sigma == -1);
    let m = coeffs.len();
    let nu = &params.nu;
    let abs_a = alpha.abs();
    let t = R::from_f64(2.0) * abs_a.clone() * nu.clone();
    let lag = laguerre_gl1(&t, m.max(1));
    let damp = (-(abs_a * nu.clone())).exp();
    // driving increments d_j = -e^{-|α|ν} (L¹_{j-1} - L¹_{j-2}), L¹_{-1} = 0
    let drive: Vec<R> = (0..m)
        .map(|j| {
            let prev = if j == 0 { R::zero() } else { lag[j - 1].clone() };
            -(damp.clone() * (lag[j].clone() - prev))
        })
        .collect();
    let signed_nu = if sigma > 0 { nu.clone() } else { -nu.clone() };
    grid.omegas
        .iter()
        .map(|w| {
            // z = -2iσν/(ω + σiν)
            let denom = Complex::new(w.clone(), signed_nu.clone());
            let z = Complex::new(R::zero(), -(R::from_f64(2.0) * signed_nu.clone())) / denom;
            let one_plus_z = Complex::new(R::one(), R::zero()) + z.clone();
            let mut r: C<R> = Complex::zero();
            let mut acc: C<R> = Complex::zero();
            for (j, c) in coeffs.iter().enumerate() {
                r = one_plus_z.clone() * r + c_scale(&z, &drive[j]);
                acc = acc + c.clone() * r.clone();
            }
            acc
        })
        .collect()
}

fn regrid_size(m: usize) -> usize {
    next_pow2(2 * m + 1).max(64)
}

/// C⁺ applied to a bundle.
pub fn cauchy_plus<R: Real>(b: &OscillatoryBundle<R>) -> OscillatoryBundle<R> {
    let mut out = OscillatoryBundle::zero(&b.params);
    for (alpha, e) in &b.blocks {
        if alpha.is_zero() {
            // keep j > 0, kill j < 0
            let mut kept = RationalExpansion::zero(&b.params, R::zero());
            kept.pos = e.pos.clone();
            out.accumulate(kept);
        } else if *alpha > R::zero() {
            out.accumulate(e.clone());
            if !e.neg.is_empty() {
                let grid = InterpolationGrid::new(&b.params, regrid_size(e.neg.len()));
                let vals = msigma_apply(&b.params, -1, alpha, &e.neg, &grid);
                out.accumulate(interpolate_nonosc(&grid, R::zero(), &vals));
            }
        } else {
            if !e.pos.is_empty() {
                let grid = InterpolationGrid::new(&b.params, regrid_size(e.pos.len()));
                let vals = msigma_apply(&b.params, 1, alpha, &e.pos, &grid);
                let mut corr = interpolate_nonosc(&grid, R::zero(), &vals);
                corr.scale(&Complex::new(-R::one(), R::zero()));
                out.accumulate(corr);
            }
        }
    }
    out.prune();
    out
}

/// C⁻ = C⁺ - I, exact in coefficients (Plemelj).
pub fn cauchy_minus<R: Real>(b: &OscillatoryBundle<R>) -> OscillatoryBundle<R> {
    let mut out = cauchy_plus(b);
    let minus_one = Complex::new(-R::one(), R::zero());
    for (_, e) in &b.blocks {
        let mut neg = e.clone();
        neg.scale(&minus_one);
        out.accumulate(neg);
    }
    out.prune();
    out
}

/// Both boundary values with one Cauchy evaluation.
pub fn cauchy_pair<R: Real>(b: &OscillatoryBundle<R>) -> (OscillatoryBundle<R>, OscillatoryBundle<R>) {
    let plus = cauchy_plus(b);
    let mut minus = plus.clone();
    let minus_one = Complex::new(-R::one(), R::zero());
    for (_, e) in &b.blocks {
        let mut neg = e.clone();
        neg.scale(&minus_one);
        minus.accumulate(neg);
    }
    minus.prune();
    (plus, minus)
}

/// 𝒞e(z) off the axis for an α = 0 expansion: the analytic-class sum.
pub fn cauchy_offaxis<R: Real>(e: &RationalExpansion<R>, z: &C<R>) -> C<R> {
    assert!(e.alpha.is_zero(), "off-axis evaluation needs an α = 0 expansion");
    let upper = z.im > R::zero();
    let t = crate::basis::mobius(&e.params, &crate::basis::Omega::Finite(z.clone()));
    if upper {
        // Σ_{j>0} c_j (T^j - 1), Horner
        let mut acc: C<R> = Complex::zero();
        let mut sum: C<R> = Complex::zero();
        for c in e.pos.iter().rev() {
            acc = (acc + c.clone()) * t.clone();
        }
        for c in &e.pos {
            sum = sum + c.clone();
        }
        acc - sum
    } else {
        let tinv = Complex::new(R::one(), R::zero()) / t;
        let mut acc: C<R> = Complex::zero();
        let mut sum: C<R> = Complex::zero();
        for c in e.neg.iter().rev() {
            acc = (acc + c.clone()) * tinv.clone();
        }
        for c in &e.neg {
            sum = sum + c.clone();
        }
        -(acc - sum)
    }
}

/// d/dz of [`cauchy_offaxis`].
pub fn cauchy_offaxis_deriv<R: Real>(e: &RationalExpansion<R>, z: &C<R>) -> C<R> {
    assert!(e.alpha.is_zero());
    let upper = z.im > R::zero();
    let params = &e.params;
    let t = crate::basis::mobius(params, &crate::basis::Omega::Finite(z.clone()));
    let i_nu = Complex::new(R::zero(), params.nu.clone());
    let denom = (z.clone() + i_nu.clone()) * (z.clone() + i_nu.clone());
    let t_prime = Complex::new(R::zero(), R::from_f64(2.0) * params.nu.clone()) / denom;
    if upper {
        // Σ j c_j T^{j-1} · T'
        let mut acc: C<R> = Complex::zero();
        for (k, c) in e.pos.iter().enumerate().rev() {
            let j = (k + 1) as f64;
            acc = acc * t.clone() + c_scale(c, &R::from_f64(j));
        }
        acc * t_prime
    } else {
        let tinv = Complex::new(R::one(), R::zero()) / t.clone();
        let mut acc: C<R> = Complex::zero();
        for (k, c) in e.neg.iter().enumerate().rev() {
            let j = (k + 1) as f64;
            acc = acc * tinv.clone() + c_scale(c, &R::from_f64(j));
        }
        // value is -Σ_{j<0} c_j R_j; d/dz T^{-m} = -m T^{-m-1} T', signs cancel
        (acc * tinv.clone() * tinv) * t_prime
    }
}

/// Slow closed-form reference for single basis functions, used by tests.
pub mod reference {
    use super::*;
    use crate::basis::{eval_r, Omega};
    use crate::special::laguerre_general;

    /// γ_{j,n}(α) = -e^{-|α|ν} L^{(n)}_{|j|-n}(2|α|ν), 1 ≤ n ≤ |j|.
    pub fn gamma_jn<R: Real>(j: i64, n: usize, alpha: &R, params: &BasisParams<R>) -> R {
        let aj = j.unsigned_abs() as usize;
        assert!(n >= 1 && n <= aj);
        let abs_a = alpha.abs();
        let t = R::from_f64(2.0) * abs_a.clone() * params.nu.clone();
        -((-(abs_a * params.nu.clone())).exp() * laguerre_general(n, aj - n, &t))
    }

    /// Residue polynomial r_{j,α}(z(ω)) = Σ_n γ_{j,n} z^n by direct summation.
    pub fn residue_poly<R: Real>(j: i64, alpha: &R, params: &BasisParams<R>, omega: &R) -> C<R> {
        let sigma = if j > 0 { R::one() } else { -R::one() };
        let denom = Complex::new(omega.clone(), sigma.clone() * params.nu.clone());
        let z = Complex::new(
            R::zero(),
            -(R::from_f64(2.0) * sigma * params.nu.clone()),
        ) / denom;
        let mut acc: C<R> = Complex::zero();
        for n in (1..=j.unsigned_abs() as usize).rev() {
            let g = gamma_jn(j, n, alpha, params);
            acc = (acc + Complex::new(g, R::zero())) * z.clone();
        }
        acc
    }

    /// C⁺R_{j,α}(ω) at real ω from the case split of the action theorem,
    /// with the residue polynomial in closed form.
    pub fn cauchy_plus_single<R: Real>(
        j: i64,
        alpha: &R,
        params: &BasisParams<R>,
        omega: &R,
    ) -> C<R> {
        let w = Omega::Finite(Complex::new(omega.clone(), R::zero()));
        let aj_nonneg = alpha.clone() * R::from_f64(j as f64) >= R::zero();
        if aj_nonneg {
            if j > 0 {
                eval_r(j, alpha, params, &w)
            } else {
                Complex::zero()
            }
        } else if j > 0 {
            -residue_poly(j, alpha, params, omega)
        } else {
            eval_r(j, alpha, params, &w) + residue_poly(j, alpha, params, omega)
        }
    }
}
