//! Whole-line Fourier transforms in the rational basis.
//!
//! Method 1 (`ft_ode`): solve (d/dx - ik)μ = q with μ = c₀φ(x;k,𝔣) + Σ c_j R_{j,0}
//! as a banded coefficient-space system; then q̂(k) ≈ c₀ 𝔣̂(k). The driver 𝔣 is
//! either the rational function 4ν²/(ν²+x²) = -R_{1,0}-R_{-1,0} or a Gaussian,
//! which has an entire transform and therefore admits complex k.
//!
//! Method 2 (`ft_series`): given an expansion of q̂, reconstruct q(x) from the
//! closed-form transforms of the basis functions via Clenshaw summation.

use crate::basis::{interpolate_fn, BasisParams, RationalExpansion};
use crate::operators::{
    assemble_fourier_ode, rational_driver_column, solve_finite_section, OperatorsError,
    SectionMode,
};
use crate::scalar::{c_scale, cexp, Real, C};
use crate::special::{clenshaw_laguerre, erfcx};
use num_complex::Complex;
use num_traits::Zero;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("driver transform below underflow guard at k (deconvolution breakdown)")]
    DriverHatUnderflow,
    #[error("complex k requires a driver with exponential decay (gaussian or custom)")]
    ComplexKUnsupported,
    #[error(transparent)]
    Operators(#[from] OperatorsError),
}

/// Driver function 𝔣 for the ODE method.
#[derive(Clone)]
pub enum Driver<R: Real> {
    /// 4ν²/(ν²+x²); transform 4πν e^{-ν|k|}, real k only.
    Rational { params: BasisParams<R> },
    /// e^{-x²}; transform √π e^{-k²/4}, entire in k.
    Gaussian {
        params: BasisParams<R>,
        column: Vec<C<R>>,
    },
    Custom {
        params: BasisParams<R>,
        column: Vec<C<R>>,
        hat: Arc<dyn Fn(&C<R>) -> C<R> + Send + Sync>,
        complex_ok: bool,
    },
}

impl<R: Real> Driver<R> {
    pub fn rational(params: &BasisParams<R>) -> Self {
        Driver::Rational {
            params: params.clone(),
        }
    }

    /// Gaussian driver with its coefficient column resolved on n nodes.
    pub fn gaussian(params: &BasisParams<R>, n: usize) -> Self {
        let e = interpolate_fn(params, n, R::zero(), |x: &R| {
            Complex::new((-(x.clone() * x.clone())).exp(), R::zero())
        });
        let column = crate::basis::interlaced_coeffs(&e, n - 1);
        Driver::Gaussian {
            params: params.clone(),
            column,
        }
    }

    pub fn params(&self) -> &BasisParams<R> {
        match self {
            Driver::Rational { params } => params,
            Driver::Gaussian { params, .. } => params,
            Driver::Custom { params, .. } => params,
        }
    }

    pub fn supports_complex_k(&self) -> bool {
        match self {
            Driver::Rational { .. } => false,
            Driver::Gaussian { .. } => true,
            Driver::Custom { complex_ok, .. } => *complex_ok,
        }
    }

    pub fn column(&self, len: usize) -> Vec<C<R>> {
        match self {
            Driver::Rational { .. } => rational_driver_column(len),
            Driver::Gaussian { column, .. } | Driver::Custom { column, .. } => {
                let mut c = column.clone();
                c.resize(len, Complex::zero());
                c
            }
        }
    }

    pub fn hat(&self, k: &C<R>) -> C<R> {
        match self {
            Driver::Rational { params } => {
                // 4πν e^{-ν|k|} on the real axis
                let nu = &params.nu;
                let v = R::from_f64(4.0) * R::pi() * nu.clone() * (-(nu.clone() * k.re.abs())).exp();
                Complex::new(v, R::zero())
            }
            Driver::Gaussian { .. } => gaussian_hat(k),
            Driver::Custom { hat, .. } => hat(k),
        }
    }
}

/// √π e^{-k²/4}
pub fn gaussian_hat<R: Real>(k: &C<R>) -> C<R> {
    let quarter = Complex::new(R::from_f64(0.25), R::zero());
    c_scale(&cexp(&(-(k.clone() * k.clone() * quarter))), &R::pi().sqrt())
}

#[derive(Clone, Debug)]
pub struct TransformResult<R: Real> {
    pub k: C<R>,
    pub value: C<R>,
    pub c0: C<R>,
    pub section: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct FtOdeOptions<R> {
    /// When set, double the section until the solution tail falls below the
    /// tolerance or the cap is reached.
    pub grow: bool,
    pub tail_tol: R,
    pub cap: usize,
}

impl<R: Real> Default for FtOdeOptions<R> {
    fn default() -> Self {
        FtOdeOptions {
            grow: false,
            tail_tol: R::from_f64(1e-11),
            cap: 1024,
        }
    }
}

/// Fourier transform of q at one (possibly complex) k by the ODE method with
/// the parity truncation rule on Re k.
pub fn ft_ode<R: Real>(
    q: &RationalExpansion<R>,
    k: &C<R>,
    driver: &Driver<R>,
    m: usize,
    opts: &FtOdeOptions<R>,
) -> Result<TransformResult<R>, FourierError> {
    if !k.im.is_zero() && !driver.supports_complex_k() {
        return Err(FourierError::ComplexKUnsupported);
    }
    let hat = driver.hat(k);
    if crate::scalar::cabs(&hat) < R::from_f64(1e-300) {
        return Err(FourierError::DriverHatUnderflow);
    }
    let column = driver.column(2 * opts.cap + 2);
    let assemble = |mm: usize| assemble_fourier_ode(q, &column, k, mm);
    let sol = if opts.grow {
        solve_finite_section(assemble, m, SectionMode::SquareParity, &opts.tail_tol, opts.cap)?
    } else {
        solve_finite_section(assemble, m, SectionMode::SquareParity, &R::from_f64(f64::INFINITY), m)?
    };
    let c0 = sol.coeffs[0].clone();
    Ok(TransformResult {
        k: k.clone(),
        value: c0.clone() * hat,
        c0,
        section: sol.m_used,
    })
}

/// Reconstruction q(x) from an α = 0 expansion of q̂ (the inverse direction of
/// the series method).
///
/// q(x) = (1/2π) Σ_j c_j R̂_j(-x); the transform support puts the surviving
/// class at sign(x)·j < 0, and q(0) = -ν Σ_j |j| c_j.
pub fn ft_series<R: Real>(e: &RationalExpansion<R>, x: &R) -> C<R> {
    let nu = &e.params.nu;
    if x.is_zero() {
        let mut acc: C<R> = Complex::zero();
        for (k, c) in e.pos.iter().enumerate() {
            acc = acc + c_scale(c, &R::from_f64((k + 1) as f64));
        }
        for (k, c) in e.neg.iter().enumerate() {
            acc = acc + c_scale(c, &R::from_f64((k + 1) as f64));
        }
        return c_scale(&acc, &-nu.clone());
    }
    let class = if *x > R::zero() { &e.neg } else { &e.pos };
    if class.is_empty() {
        return Complex::zero();
    }
    let abs_x = x.abs();
    let arg = R::from_f64(2.0) * abs_x.clone() * nu.clone();
    let s = clenshaw_laguerre(class, &arg);
    let factor = -(R::from_f64(2.0) * nu.clone() * (-(abs_x * nu.clone())).exp());
    c_scale(&s, &factor)
}

/// φ(x;k,𝔤) = ∫_{-∞}^x e^{ik(x-s)} e^{-s²} ds, stable for all real x and
/// complex k of moderate imaginary part.
///
/// Branches on Re(x + ik/2): on the left branch the prefactors collapse to
/// e^{-x²} exactly, so nothing overflows at the far grid nodes.
pub fn phi_gauss<R: Real>(x: &R, k: &C<R>) -> C<R> {
    let half = R::from_f64(0.5);
    let sqrt_pi = R::pi().sqrt();
    // w = x + ik/2
    let w = Complex::new(
        x.clone() - k.im.clone() * half.clone(),
        k.re.clone() * half.clone(),
    );
    let gauss = (-(x.clone() * x.clone())).exp();
    if w.re <= R::zero() {
        // (√π/2) e^{-x²} erfcx(-w)
        let e = erfcx(&-w);
        c_scale(&e, &(sqrt_pi * half * gauss))
    } else {
        // √π e^{ikx - k²/4} - (√π/2) e^{-x²} erfcx(w)
        let quarter = Complex::new(R::from_f64(0.25), R::zero());
        let ikx = Complex::new(-(k.im.clone() * x.clone()), k.re.clone() * x.clone());
        let lead = c_scale(&cexp(&(ikx - k.clone() * k.clone() * quarter)), &sqrt_pi);
        let tail = c_scale(&erfcx(&w), &(sqrt_pi * half * gauss));
        lead - tail
    }
}
