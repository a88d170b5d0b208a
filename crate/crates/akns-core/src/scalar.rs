//! Scalar abstraction: complex arithmetic over a configurable real field.
//!
//! Everything downstream is generic over [`Real`]. `f64` is the default field;
//! [`BigReal`] provides a decimal-digit-configurable field so that the inverse
//! transform can run at extended precision. Beyond field arithmetic the code
//! relies only on `exp`/`sin`/`cos`/`sqrt` (and `ln`/`atan` for the oracle
//! layer), so both backends stay small.

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

/// Real field used throughout. Implementations: `f64`, [`BigReal`].
pub trait Real:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Zero
    + One
    + Num
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    /// Lossy conversion used for diagnostics and output at double precision.
    fn to_f64(&self) -> f64;
    /// Parse a decimal literal at the working precision.
    fn from_decimal(s: &str) -> Option<Self>;
    fn pi() -> Self;
    /// Working precision in decimal digits.
    fn digits() -> usize;
    /// Roundoff scale of the field, ~10^(1-digits).
    fn eps() -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn atan(&self) -> Self;
    fn is_finite(&self) -> bool;
    fn total_cmp(&self, other: &Self) -> Ordering;

    fn atan2(&self, x: &Self) -> Self {
        let y = self;
        let zero = Self::zero();
        if *x > zero {
            (y.clone() / x.clone()).atan()
        } else if *x < zero {
            let base = (y.clone() / x.clone()).atan();
            if *y >= zero {
                base + Self::pi()
            } else {
                base - Self::pi()
            }
        } else if *y > zero {
            Self::pi() / Self::from_f64(2.0)
        } else if *y < zero {
            -(Self::pi() / Self::from_f64(2.0))
        } else {
            zero
        }
    }

    fn hypot(&self, other: &Self) -> Self {
        (self.clone() * self.clone() + other.clone() * other.clone()).sqrt()
    }

    fn max_val(self, other: Self) -> Self {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn digits() -> usize {
        16
    }
    fn eps() -> Self {
        f64::EPSILON
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
}

// ---------------------------------------------------------------------------
// Extended precision backend.
// ---------------------------------------------------------------------------

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// Session precision in decimal digits. Fixed per computation session;
/// mixing values created under different precisions is an error.
static SESSION_DIGITS: AtomicUsize = AtomicUsize::new(34);

/// Set the extended-precision session width in decimal digits.
pub fn set_session_digits(digits: usize) {
    assert!(digits >= 4, "session precision below 4 digits");
    SESSION_DIGITS.store(digits, AtomicOrdering::SeqCst);
}

pub fn session_digits() -> usize {
    SESSION_DIGITS.load(AtomicOrdering::SeqCst)
}

fn session_bits() -> usize {
    // log2(10) = 3.3219..., plus guard bits, rounded up to whole words
    // (astro-float stores mantissas in 64-bit words).
    let raw = (session_digits() as f64 * 3.3220).ceil() as usize + 32;
    raw.div_ceil(64) * 64
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Arbitrary-precision real number at the session precision.
#[derive(Clone, Debug)]
pub struct BigReal(BigFloat);

impl BigReal {
    fn check(&self) -> &BigFloat {
        debug_assert!(
            self.0.is_nan()
                || self.0.is_inf()
                || self.0.is_zero()
                || self.0.precision().map(|p| p == session_bits()).unwrap_or(true),
            "mixing scalar precisions within one session"
        );
        &self.0
    }

    pub fn raw(&self) -> &BigFloat {
        &self.0
    }
}

impl Display for BigReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        Display::fmt(&self.0, f)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! big_binop {
    ($trait:ident, $fn:ident, $method:ident) => {
        impl std::ops::$trait for BigReal {
            type Output = BigReal;
            fn $fn(self, rhs: BigReal) -> BigReal {
                let p = session_bits();
                BigReal(self.check().$method(rhs.check(), p, RM))
            }
        }
    };
}

big_binop!(Add, add, add);
big_binop!(Sub, sub, sub);
big_binop!(Mul, mul, mul);
big_binop!(Div, div, div);

impl std::ops::Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        BigReal(self.0.rem(&rhs.0))
    }
}

impl std::ops::Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(self.0.neg())
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(BigFloat::from_f64(0.0, session_bits()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(BigFloat::from_f64(1.0, session_bits()))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        if radix != 10 {
            return Err(());
        }
        BigReal::from_decimal(s).ok_or(())
    }
}

impl Real for BigReal {
    fn from_f64(v: f64) -> Self {
        BigReal(BigFloat::from_f64(v, session_bits()))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        // Via a short decimal round trip; only used for diagnostics/output.
        format!("{}", self.0).parse().unwrap_or(f64::NAN)
    }

    fn from_decimal(s: &str) -> Option<Self> {
        let p = session_bits();
        let v = CONSTS.with(|cc| {
            BigFloat::parse(s, Radix::Dec, p, RM, &mut cc.borrow_mut())
        });
        if v.is_nan() && !s.contains("nan") {
            None
        } else {
            Some(BigReal(v))
        }
    }

    fn pi() -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| cc.borrow_mut().pi(p, RM)))
    }

    fn digits() -> usize {
        session_digits()
    }

    fn eps() -> Self {
        let d = session_digits() as i32;
        let ten = BigReal::from_f64(10.0);
        let mut e = BigReal::one();
        for _ in 0..(d - 1) {
            e = e / ten.clone();
        }
        e
    }

    fn abs(&self) -> Self {
        BigReal(self.check().abs())
    }
    fn sqrt(&self) -> Self {
        BigReal(self.check().sqrt(session_bits(), RM))
    }
    fn exp(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().exp(p, RM, &mut cc.borrow_mut())))
    }
    fn ln(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().ln(p, RM, &mut cc.borrow_mut())))
    }
    fn sin(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().sin(p, RM, &mut cc.borrow_mut())))
    }
    fn cos(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().cos(p, RM, &mut cc.borrow_mut())))
    }
    fn tan(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().tan(p, RM, &mut cc.borrow_mut())))
    }
    fn atan(&self) -> Self {
        let p = session_bits();
        BigReal(CONSTS.with(|cc| self.check().atan(p, RM, &mut cc.borrow_mut())))
    }
    fn is_finite(&self) -> bool {
        !self.0.is_inf() && !self.0.is_nan()
    }
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

// ---------------------------------------------------------------------------
// Complex helpers over the generic field.
// ---------------------------------------------------------------------------

pub type C<R> = Complex<R>;

pub fn c_from_f64<R: Real>(re: f64, im: f64) -> C<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

pub fn c_zero<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::zero())
}

pub fn c_one<R: Real>() -> C<R> {
    Complex::new(R::one(), R::zero())
}

/// i
pub fn c_i<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::one())
}

/// e^{iθ} for real θ.
pub fn cis<R: Real>(theta: &R) -> C<R> {
    Complex::new(theta.cos(), theta.sin())
}

pub fn cexp<R: Real>(z: &C<R>) -> C<R> {
    let m = z.re.exp();
    Complex::new(m.clone() * z.im.cos(), m * z.im.sin())
}

pub fn cabs<R: Real>(z: &C<R>) -> R {
    z.re.hypot(&z.im)
}

pub fn cln<R: Real>(z: &C<R>) -> C<R> {
    Complex::new(cabs(z).ln(), z.im.atan2(&z.re))
}

pub fn csqrt<R: Real>(z: &C<R>) -> C<R> {
    if z.re.is_zero() && z.im.is_zero() {
        return c_zero();
    }
    let r = cabs(z).sqrt();
    let half = R::from_f64(0.5);
    let theta = z.im.atan2(&z.re) * half;
    Complex::new(r.clone() * theta.cos(), r * theta.sin())
}

/// z^w via exp(w ln z); z must be nonzero.
pub fn cpow<R: Real>(z: &C<R>, w: &C<R>) -> C<R> {
    cexp(&(w.clone() * cln(z)))
}

pub fn c_scale<R: Real>(z: &C<R>, s: &R) -> C<R> {
    Complex::new(z.re.clone() * s.clone(), z.im.clone() * s.clone())
}
