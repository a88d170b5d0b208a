//! The mapped rational basis on the real line.
//!
//! The Möbius map T_ν(ω) = (ω - iν)/(ω + iν) carries ℝ ∪ {∞} onto the unit
//! circle; the basis functions are R_{j,α}(ω) = e^{iαω}(T_ν(ω)^j - 1), j ≠ 0,
//! which vanish at ω = ∞. Interpolation samples a function at
//! ω_j = T_ν^{-1}(e^{iθ_j}) = -ν cot(θ_j/2) and applies the DFT; θ = 0
//! (ω = ∞) is always an interpolation node with sample value 0.

use crate::fft;
use crate::scalar::{cis, Real, C};
use num_complex::Complex;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct BasisParams<R: Real> {
    pub nu: R,
}

impl<R: Real> BasisParams<R> {
    pub fn new(nu: R) -> Self {
        assert!(nu > R::zero(), "basis scale must be positive");
        BasisParams { nu }
    }

    pub fn default_scale() -> Self {
        BasisParams { nu: R::one() }
    }
}

/// Point of the extended real line / complex plane.
#[derive(Clone, Debug)]
pub enum Omega<R: Real> {
    Finite(C<R>),
    Infinity,
}

impl<R: Real> Omega<R> {
    pub fn real(x: f64) -> Self {
        Omega::Finite(Complex::new(R::from_f64(x), R::zero()))
    }
}

/// T_ν(ω); T_ν(∞) = 1.
pub fn mobius<R: Real>(params: &BasisParams<R>, omega: &Omega<R>) -> C<R> {
    match omega {
        Omega::Infinity => Complex::new(R::one(), R::zero()),
        Omega::Finite(w) => {
            let i_nu = Complex::new(R::zero(), params.nu.clone());
            (w.clone() - i_nu.clone()) / (w.clone() + i_nu)
        }
    }
}

/// T_ν^{-1}(z); z = 1 maps to ∞.
pub fn mobius_inv<R: Real>(params: &BasisParams<R>, z: &C<R>) -> Omega<R> {
    let one = Complex::new(R::one(), R::zero());
    if (z.clone() - one.clone()).norm_sqr().is_zero() {
        return Omega::Infinity;
    }
    // (ν/i)(z+1)/(z-1)
    let minus_i_nu = Complex::new(R::zero(), -params.nu.clone());
    Omega::Finite(minus_i_nu * (z.clone() + one.clone()) / (z.clone() - one))
}

/// z^j for integer j (j may be negative; z must be nonzero then).
pub fn cpowi<R: Real>(z: &C<R>, j: i64) -> C<R> {
    let mut base = if j < 0 {
        Complex::new(R::one(), R::zero()) / z.clone()
    } else {
        z.clone()
    };
    let mut e = j.unsigned_abs();
    let mut acc = Complex::new(R::one(), R::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

/// R_{j,α}(ω) = e^{iαω}(T_ν(ω)^j - 1); defined as 0 at ω = ∞.
pub fn eval_r<R: Real>(j: i64, alpha: &R, params: &BasisParams<R>, omega: &Omega<R>) -> C<R> {
    assert!(j != 0, "R_0 is identically zero and never indexed");
    match omega {
        Omega::Infinity => Complex::zero(),
        Omega::Finite(w) => {
            let t = mobius(params, omega);
            let tj = cpowi(&t, j);
            let osc = if alpha.is_zero() {
                Complex::new(R::one(), R::zero())
            } else {
                crate::scalar::cexp(&Complex::new(
                    -(alpha.clone() * w.im.clone()),
                    alpha.clone() * w.re.clone(),
                ))
            };
            osc * (tj - Complex::new(R::one(), R::zero()))
        }
    }
}

/// Interpolation grid of n nodes; node 0 is ω = ∞, nodes 1..n-1 are real.
#[derive(Clone, Debug)]
pub struct InterpolationGrid<R: Real> {
    pub params: BasisParams<R>,
    pub n: usize,
    pub thetas: Vec<R>,
    /// ω_j = -ν cot(θ_j/2) for j = 1..n-1 (index shifted by one).
    pub omegas: Vec<R>,
}

impl<R: Real> InterpolationGrid<R> {
    pub fn new(params: &BasisParams<R>, n: usize) -> Self {
        assert!(n >= 2, "interpolation needs at least two nodes");
        let two_pi = R::pi() * R::from_f64(2.0);
        let nr = R::from_f64(n as f64);
        let thetas: Vec<R> = (0..n)
            .map(|j| two_pi.clone() * R::from_f64(j as f64) / nr.clone())
            .collect();
        let omegas = thetas[1..]
            .iter()
            .map(|th| {
                let half = th.clone() / R::from_f64(2.0);
                -(params.nu.clone() * half.cos() / half.sin())
            })
            .collect();
        InterpolationGrid {
            params: params.clone(),
            n,
            thetas,
            omegas,
        }
    }

    pub fn n_pos(&self) -> usize {
        self.n / 2
    }

    pub fn n_neg(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Sample a function of the real variable at the finite nodes (the ∞ node
    /// is fixed to 0 and not represented).
    pub fn sample<F: Fn(&R) -> C<R>>(&self, f: F) -> Vec<C<R>> {
        self.omegas.iter().map(f).collect()
    }
}

/// Finite expansion Σ_{j≠0} c_j R_{j,α} at one oscillation parameter α.
///
/// `pos[k]` stores c_{k+1}, `neg[k]` stores c_{-(k+1)}; index 0 never exists.
#[derive(Clone, Debug)]
pub struct RationalExpansion<R: Real> {
    pub params: BasisParams<R>,
    pub alpha: R,
    pub pos: Vec<C<R>>,
    pub neg: Vec<C<R>>,
}

impl<R: Real> RationalExpansion<R> {
    pub fn zero(params: &BasisParams<R>, alpha: R) -> Self {
        RationalExpansion {
            params: params.clone(),
            alpha,
            pos: Vec::new(),
            neg: Vec::new(),
        }
    }

    pub fn single(params: &BasisParams<R>, alpha: R, j: i64, c: C<R>) -> Self {
        assert!(j != 0);
        let mut e = Self::zero(params, alpha);
        e.set_coeff(j, c);
        e
    }

    pub fn coeff(&self, j: i64) -> C<R> {
        if j > 0 {
            self.pos.get(j as usize - 1).cloned().unwrap_or_else(Complex::zero)
        } else if j < 0 {
            self.neg.get((-j) as usize - 1).cloned().unwrap_or_else(Complex::zero)
        } else {
            Complex::zero()
        }
    }

    pub fn set_coeff(&mut self, j: i64, c: C<R>) {
        assert!(j != 0);
        let (vec, idx) = if j > 0 {
            (&mut self.pos, j as usize - 1)
        } else {
            (&mut self.neg, (-j) as usize - 1)
        };
        if vec.len() <= idx {
            vec.resize(idx + 1, Complex::zero());
        }
        vec[idx] = c;
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn coeff_count(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn norm_sqr(&self) -> R {
        let mut acc = R::zero();
        for c in self.pos.iter().chain(self.neg.iter()) {
            acc = acc + c.norm_sqr();
        }
        acc
    }

    pub fn scale(&mut self, s: &C<R>) {
        for c in self.pos.iter_mut().chain(self.neg.iter_mut()) {
            *c = c.clone() * s.clone();
        }
    }

    /// self += s * other. Shared ν and α are the caller's invariant.
    pub fn add_scaled(&mut self, s: &C<R>, other: &Self) {
        debug_assert!(self.params == other.params);
        if self.pos.len() < other.pos.len() {
            self.pos.resize(other.pos.len(), Complex::zero());
        }
        if self.neg.len() < other.neg.len() {
            self.neg.resize(other.neg.len(), Complex::zero());
        }
        for (a, b) in self.pos.iter_mut().zip(other.pos.iter()) {
            *a = a.clone() + s.clone() * b.clone();
        }
        for (a, b) in self.neg.iter_mut().zip(other.neg.iter()) {
            *a = a.clone() + s.clone() * b.clone();
        }
    }

    /// Drop coefficients beyond the largest grid that `total` coefficients
    /// (one grid of n = total+1 nodes) would carry.
    pub fn truncate_to(&mut self, total: usize) {
        let n = total + 1;
        self.pos.truncate(n / 2);
        self.neg.truncate((n - 1) / 2);
    }

    /// Coefficients of conj(f) on the real axis: flips sign classes.
    pub fn conj_flip(&self) -> Self {
        RationalExpansion {
            params: self.params.clone(),
            alpha: -self.alpha.clone(),
            pos: self.neg.iter().map(|c| c.conj()).collect(),
            neg: self.pos.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Evaluate at a point of the extended plane, oscillatory factor included.
    pub fn evaluate(&self, omega: &Omega<R>) -> C<R> {
        match omega {
            Omega::Infinity => Complex::zero(),
            Omega::Finite(w) => {
                let t = mobius(&self.params, omega);
                // Horner per sign class.
                let mut acc_pos: C<R> = Complex::zero();
                for c in self.pos.iter().rev() {
                    acc_pos = (acc_pos + c.clone()) * t.clone();
                }
                let mut acc_neg: C<R> = Complex::zero();
                if !self.neg.is_empty() {
                    let tinv = Complex::new(R::one(), R::zero()) / t.clone();
                    for c in self.neg.iter().rev() {
                        acc_neg = (acc_neg + c.clone()) * tinv.clone();
                    }
                }
                let mut sum: C<R> = Complex::zero();
                for c in self.pos.iter().chain(self.neg.iter()) {
                    sum = sum + c.clone();
                }
                let val = acc_pos + acc_neg - sum;
                if self.alpha.is_zero() {
                    val
                } else {
                    let phase = crate::scalar::cexp(&Complex::new(
                        -(self.alpha.clone() * w.im.clone()),
                        self.alpha.clone() * w.re.clone(),
                    ));
                    phase * val
                }
            }
        }
    }

    /// Values of the non-oscillatory part Σ c_j (T^j - 1) at the finite nodes
    /// of `grid` (the ∞ node evaluates to 0), via inverse FFT in O(n log n).
    pub fn evaluate_grid_nonosc(&self, grid: &InterpolationGrid<R>) -> Vec<C<R>> {
        let n = grid.n;
        assert!(
            self.pos.len() <= n / 2 && self.neg.len() <= (n - 1) / 2,
            "grid too small for expansion"
        );
        let mut padded: Vec<C<R>> = vec![Complex::zero(); n];
        for (k, c) in self.pos.iter().enumerate() {
            padded[k + 1] = c.clone();
        }
        for (k, c) in self.neg.iter().enumerate() {
            padded[n - 1 - k] = c.clone();
        }
        let vals = fft::idft(&padded);
        let mut sum: C<R> = Complex::zero();
        for c in self.pos.iter().chain(self.neg.iter()) {
            sum = sum + c.clone();
        }
        vals[1..].iter().map(|v| v.clone() - sum.clone()).collect()
    }

    /// Values including the e^{iαω} factor at the finite grid nodes.
    pub fn evaluate_grid(&self, grid: &InterpolationGrid<R>) -> Vec<C<R>> {
        let base = self.evaluate_grid_nonosc(grid);
        if self.alpha.is_zero() {
            return base;
        }
        base.into_iter()
            .zip(grid.omegas.iter())
            .map(|(v, w)| {
                if v.norm_sqr().is_zero() {
                    v
                } else {
                    cis(&(self.alpha.clone() * w.clone())) * v
                }
            })
            .collect()
    }
}

/// ℛ_{n,α} from samples at the finite grid nodes (∞ node sample is 0).
///
/// Samples are of the full function; for α ≠ 0 they are premultiplied by
/// e^{-iαω_j} before the DFT.
pub fn interpolate_samples<R: Real>(
    grid: &InterpolationGrid<R>,
    alpha: R,
    samples: &[C<R>],
) -> RationalExpansion<R> {
    for s in samples {
        assert!(
            s.re.is_finite() && s.im.is_finite(),
            "non-finite sample value"
        );
    }
    let demodulated: Vec<C<R>> = if alpha.is_zero() {
        samples.to_vec()
    } else {
        samples
            .iter()
            .zip(grid.omegas.iter())
            .map(|(s, w)| {
                if s.norm_sqr().is_zero() {
                    Complex::zero()
                } else {
                    cis(&(-(alpha.clone() * w.clone()))) * s.clone()
                }
            })
            .collect()
    };
    interpolate_nonosc(grid, alpha, &demodulated)
}

/// Interpolate data already free of the oscillatory factor and attach α.
pub fn interpolate_nonosc<R: Real>(
    grid: &InterpolationGrid<R>,
    alpha: R,
    samples: &[C<R>],
) -> RationalExpansion<R> {
    assert_eq!(samples.len(), grid.n - 1, "one sample per finite node");
    let mut padded: Vec<C<R>> = Vec::with_capacity(grid.n);
    padded.push(Complex::zero());
    padded.extend_from_slice(samples);
    let hat = fft::dft(&padded);
    let n = grid.n;
    let pos: Vec<C<R>> = (1..=n / 2).map(|k| hat[k].clone()).collect();
    let neg: Vec<C<R>> = (1..=(n - 1) / 2).map(|k| hat[n - k].clone()).collect();
    RationalExpansion {
        params: grid.params.clone(),
        alpha,
        pos,
        neg,
    }
}

/// ℛ_{n,α} applied to a function of the real variable.
pub fn interpolate_fn<R: Real, F: Fn(&R) -> C<R>>(
    params: &BasisParams<R>,
    n: usize,
    alpha: R,
    f: F,
) -> RationalExpansion<R> {
    let grid = InterpolationGrid::new(params, n);
    let samples = grid.sample(f);
    interpolate_samples(&grid, alpha, &samples)
}

// ---------------------------------------------------------------------------
// Interlacing.
// ---------------------------------------------------------------------------

/// [c_0, c_1, c_{-1}, c_2, c_{-2}, ...]; `pos` may be one longer than `neg`.
pub fn interlace<T: Clone>(zero: &T, pos: &[T], neg: &[T]) -> Vec<T> {
    assert!(
        pos.len() == neg.len() || pos.len() == neg.len() + 1,
        "classes must be balanced for the canonical ordering"
    );
    let mut out = Vec::with_capacity(1 + pos.len() + neg.len());
    out.push(zero.clone());
    for m in 0..pos.len() {
        out.push(pos[m].clone());
        if m < neg.len() {
            out.push(neg[m].clone());
        }
    }
    out
}

/// Inverse of [`interlace`]: returns (zero, pos, neg).
pub fn deinterlace<T: Clone>(v: &[T]) -> (T, Vec<T>, Vec<T>) {
    assert!(!v.is_empty());
    let zero = v[0].clone();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, t) in v[1..].iter().enumerate() {
        if i % 2 == 0 {
            pos.push(t.clone());
        } else {
            neg.push(t.clone());
        }
    }
    (zero, pos, neg)
}

/// Basis index at position p of the zero-deleted interlaced ordering
/// [1, -1, 2, -2, ...].
pub fn interlaced_index(p: usize) -> i64 {
    if p % 2 == 0 {
        (p / 2 + 1) as i64
    } else {
        -(((p + 1) / 2) as i64)
    }
}

/// First `m` interlaced coefficients [c_1, c_{-1}, c_2, ...] of an expansion.
pub fn interlaced_coeffs<R: Real>(e: &RationalExpansion<R>, m: usize) -> Vec<C<R>> {
    (0..m).map(|p| e.coeff(interlaced_index(p))).collect()
}
