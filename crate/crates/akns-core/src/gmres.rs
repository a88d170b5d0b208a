//! GMRES on an abstract inner-product space.
//!
//! The solver only needs the element operations below, so the same code runs
//! on coefficient vectors and on oscillatory bundles, at any scalar precision.
//! Arnoldi with modified Gram-Schmidt; the least-squares problem is updated by
//! complex Givens rotations, whose rotated right-hand side gives the residual
//! norm estimate at every step (non-increasing by construction).

use crate::scalar::{Real, C};
use num_complex::Complex;
use num_traits::Zero;

pub trait InnerProductSpace<R: Real>: Clone {
    fn zero_like(&self) -> Self;
    /// self += c * other
    fn add_scaled(&mut self, c: &C<R>, other: &Self);
    fn scale(&mut self, c: &C<R>);
    /// Conjugate-linear in `self`.
    fn inner(&self, other: &Self) -> C<R>;

    fn norm(&self) -> R {
        let ip = self.inner(self);
        ip.re.max_val(R::zero()).sqrt()
    }
}

impl<R: Real> InnerProductSpace<R> for Vec<C<R>> {
    fn zero_like(&self) -> Self {
        vec![Complex::zero(); self.len()]
    }
    fn add_scaled(&mut self, c: &C<R>, other: &Self) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a = a.clone() + c.clone() * b.clone();
        }
    }
    fn scale(&mut self, c: &C<R>) {
        for a in self.iter_mut() {
            *a = a.clone() * c.clone();
        }
    }
    fn inner(&self, other: &Self) -> C<R> {
        let mut acc: C<R> = Complex::zero();
        for (a, b) in self.iter().zip(other.iter()) {
            acc = acc + a.conj() * b.clone();
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmresOutcome {
    Converged,
    /// Arnoldi breakdown: the Krylov space is exhausted; the returned iterate
    /// is the best in the explored subspace.
    Breakdown,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct GmresResult<T, R> {
    pub solution: T,
    /// Residual norms; entry 0 is ‖rhs‖ (initial iterate 0).
    pub history: Vec<R>,
    pub outcome: GmresOutcome,
    pub iterations: usize,
}

/// Complex Givens rotation zeroing `g` against `f`: returns (c, s, r) with
/// c f + s g = r and -conj(s) f + c g = 0, c real.
fn givens<R: Real>(f: &C<R>, g: &C<R>) -> (R, C<R>, C<R>) {
    let fa = crate::scalar::cabs(f);
    let ga = crate::scalar::cabs(g);
    if fa.is_zero() {
        return (R::zero(), Complex::new(R::one(), R::zero()), g.clone());
    }
    let t = fa.hypot(&ga);
    let c = fa.clone() / t.clone();
    let phase = f.clone() / Complex::new(fa.clone(), R::zero());
    let s = phase.clone() * other_conj(g) / Complex::new(t.clone(), R::zero());
    let r = phase * Complex::new(t, R::zero());
    (c, s, r)
}

fn other_conj<R: Real>(z: &C<R>) -> C<R> {
    z.conj()
}

/// Solve apply(x) = rhs with relative tolerance `tol` (‖residual‖ ≤ tol·‖rhs‖).
pub fn gmres<R, T, A>(apply: A, rhs: &T, tol: &R, maxit: usize) -> GmresResult<T, R>
where
    R: Real,
    T: InnerProductSpace<R>,
    A: Fn(&T) -> T,
{
    let beta = rhs.norm();
    let mut history = vec![beta.clone()];
    if beta.is_zero() {
        return GmresResult {
            solution: rhs.zero_like(),
            history,
            outcome: GmresOutcome::Converged,
            iterations: 0,
        };
    }
    let target = tol.clone() * beta.clone();

    let mut basis: Vec<T> = Vec::new();
    let mut v0 = rhs.clone();
    v0.scale(&Complex::new(R::one() / beta.clone(), R::zero()));
    basis.push(v0);

    // Columns of the rotated Hessenberg matrix (upper triangular part).
    let mut r_cols: Vec<Vec<C<R>>> = Vec::new();
    let mut rotations: Vec<(R, C<R>)> = Vec::new();
    let mut g: Vec<C<R>> = vec![Complex::new(beta.clone(), R::zero())];
    let mut outcome = GmresOutcome::MaxIterations;
    let mut iterations = 0;

    for j in 0..maxit {
        iterations = j + 1;
        let mut w = apply(&basis[j]);
        let mut h: Vec<C<R>> = Vec::with_capacity(j + 2);
        for vi in basis.iter() {
            let hij = vi.inner(&w);
            w.add_scaled(&(-hij.clone()), vi);
            h.push(hij);
        }
        let h_next = w.norm();
        let breakdown = h_next <= R::eps() * beta.clone();

        // Apply the accumulated rotations to the new column.
        for (i, (c, s)) in rotations.iter().enumerate() {
            let a = h[i].clone();
            let b = h[i + 1].clone();
            h[i] = Complex::new(c.clone(), R::zero()) * a.clone() + s.clone() * b.clone();
            h[i + 1] = -s.conj() * a + Complex::new(c.clone(), R::zero()) * b;
        }
        let hj1 = Complex::new(h_next.clone(), R::zero());
        let (c, s, r) = givens(&h[j], &hj1);
        h[j] = r;
        rotations.push((c.clone(), s.clone()));
        let gj = g[j].clone();
        g[j] = Complex::new(c, R::zero()) * gj.clone();
        let g_next = -s.conj() * gj;
        let res = crate::scalar::cabs(&g_next);
        g.push(g_next);
        history.push(res.clone());
        r_cols.push(h);

        if res <= target {
            outcome = GmresOutcome::Converged;
            break;
        }
        if breakdown {
            outcome = GmresOutcome::Breakdown;
            break;
        }
        w.scale(&Complex::new(R::one() / h_next, R::zero()));
        basis.push(w);
    }

    // Back substitution on the triangular system.
    let k = r_cols.len();
    let mut y: Vec<C<R>> = vec![Complex::zero(); k];
    for i in (0..k).rev() {
        let mut acc = g[i].clone();
        for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
            acc = acc - r_cols[l][i].clone() * yl.clone();
        }
        y[i] = acc / r_cols[i][i].clone();
    }
    let mut solution = rhs.zero_like();
    for (i, yi) in y.iter().enumerate() {
        solution.add_scaled(yi, &basis[i]);
    }

    GmresResult {
        solution,
        history,
        outcome,
        iterations,
    }
}
