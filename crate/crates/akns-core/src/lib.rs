//! Rational-basis scattering and inverse scattering for the AKNS system.
//!
//! The library is organized around the oscillatory rational basis
//! R_{j,α}(ω) = e^{iαω}(T_ν(ω)^j − 1):
//!
//! - [`scalar`], [`fft`], [`special`], [`linalg`], [`gmres`] — numeric core
//!   (configurable-precision scalars, radix-2 FFT, Laguerre/erfcx kernels,
//!   dense solvers, abstract GMRES);
//! - [`basis`], [`bundle`] — the basis itself, FFT interpolation, bundles;
//! - [`operators`] — coefficient-space differentiation/multiplication and the
//!   finite-section systems;
//! - [`cauchy`] — oscillatory Cauchy operators C± and closed-form transforms;
//! - [`fourier`] — the two whole-line Fourier-transform methods;
//! - [`scattering`] — forward scattering (continuous + discrete data);
//! - [`inverse`] — inverse scattering via GMRES on the singular integral
//!   equations, including the KdV sech² variant.

pub mod basis;
pub mod bundle;
pub mod fft;
pub mod gmres;
pub mod linalg;
pub mod scalar;
pub mod special;

pub mod operators;

pub mod cauchy;

pub mod fourier;

pub mod scattering;

pub mod inverse;
