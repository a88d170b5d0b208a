//! Coefficient-space operators and finite sections.
//!
//! Differentiation acts tridiagonally on the basis:
//! R_{j,α}' = (i/ν)[-(j/2) R_{j+1,α} + (j+αν) R_{j,α} - (j/2) R_{j-1,α}],
//! and multiplication by g = Σ c_j R_{j,α} is Toeplitz minus a rank-one part
//! minus (Σ c_j) I. Matrices are materialized in the interlaced ordering
//! [1, -1, 2, -2, ...] with the index-0 row/column deleted (R_0 ≡ 0).

use crate::basis::{
    interlaced_coeffs, interlaced_index, BasisParams, InterpolationGrid, RationalExpansion,
};
use crate::bundle::OscillatoryBundle;
use crate::fft::next_pow2;
use crate::linalg::{lu_solve, solve_least_squares, DenseMatrix, LinalgError};
use crate::scalar::{Real, C};
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorsError {
    #[error("basis scale mismatch between operands")]
    NuMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("section growth cap reached at m = {m} (trailing norm {trailing:.3e})")]
    GrowthCapExceeded { m: usize, trailing: f64 },
}

/// Differentiation block with an optional spectral shift: (𝒟_ν + shift·I)
/// truncated to `rows` × `cols` in interlaced ordering. Out-of-range targets
/// are dropped by the truncation.
pub fn diff_block<R: Real>(
    params: &BasisParams<R>,
    rows: usize,
    cols: usize,
    alpha: &R,
    shift: &C<R>,
) -> DenseMatrix<R> {
    let mut m = DenseMatrix::zeros(rows, cols);
    let i_over_nu = Complex::new(R::zero(), R::one() / params.nu.clone());
    // positions of targets: invert interlaced_index
    let pos_of = |j: i64| -> Option<usize> {
        let p = if j > 0 {
            2 * (j as usize) - 2
        } else if j < 0 {
            2 * ((-j) as usize) - 1
        } else {
            return None;
        };
        (p < rows).then_some(p)
    };
    for p_src in 0..cols {
        let j = interlaced_index(p_src);
        let jf = R::from_f64(j as f64);
        let half_j = jf.clone() / R::from_f64(2.0);
        // target j
        if let Some(p) = pos_of(j) {
            let diag = i_over_nu.clone()
                * Complex::new(jf.clone() + alpha.clone() * params.nu.clone(), R::zero());
            m.add_to(p, p_src, diag + shift.clone());
        }
        // targets j±1 with weight -(j/2)·i/ν
        for tj in [j + 1, j - 1] {
            if tj == 0 {
                continue;
            }
            if let Some(p) = pos_of(tj) {
                let v = -(i_over_nu.clone() * Complex::new(half_j.clone(), R::zero()));
                m.add_to(p, p_src, v);
            }
        }
    }
    m
}

/// Square differentiation matrix 𝒟_ν at oscillation α (interlaced ordering).
pub fn diff_matrix<R: Real>(params: &BasisParams<R>, m: usize, alpha: &R) -> DenseMatrix<R> {
    assert!(m >= 2);
    diff_block(params, m, m, alpha, &Complex::zero())
}

/// ℳ_ℐ(c): the interlaced, zero-index-deleted matrix of multiplication by the
/// function with coefficients `c`, truncated to `rows` × `cols`.
///
/// Entry (j, ℓ) of the bi-infinite operator is c_{j-ℓ} - c_j - (Σ c) δ_{jℓ}.
pub fn mult_matrix<R: Real>(
    c: &RationalExpansion<R>,
    rows: usize,
    cols: usize,
) -> DenseMatrix<R> {
    let mut total: C<R> = Complex::zero();
    for v in c.pos.iter().chain(c.neg.iter()) {
        total = total + v.clone();
    }
    DenseMatrix::from_fn(rows, cols, |p_r, p_c| {
        let j = interlaced_index(p_r);
        let l = interlaced_index(p_c);
        let mut v = c.coeff(j - l) - c.coeff(j);
        if j == l {
            v = v - total.clone();
        }
        v
    })
}

/// Pointwise product of two expansions, computed in value space on a padded
/// grid and re-interpolated; α adds.
pub fn multiply<R: Real>(
    a: &RationalExpansion<R>,
    b: &RationalExpansion<R>,
) -> Result<RationalExpansion<R>, OperatorsError> {
    if a.params != b.params {
        return Err(OperatorsError::NuMismatch);
    }
    let alpha_out = a.alpha.clone() + b.alpha.clone();
    if a.is_empty() || b.is_empty() {
        return Ok(RationalExpansion::zero(&a.params, alpha_out));
    }
    let needed = a.coeff_count() + b.coeff_count() + 2;
    let n = next_pow2(needed).max(8);
    let grid = InterpolationGrid::new(&a.params, n);
    let va = a.evaluate_grid_nonosc(&grid);
    let vb = b.evaluate_grid_nonosc(&grid);
    let prod: Vec<C<R>> = va
        .into_iter()
        .zip(vb)
        .map(|(x, y)| x * y)
        .collect();
    Ok(crate::basis::interpolate_nonosc(&grid, alpha_out, &prod))
}

/// Product of two bundles: cartesian block products, merged and pruned.
pub fn bundle_multiply<R: Real>(
    a: &OscillatoryBundle<R>,
    b: &OscillatoryBundle<R>,
) -> Result<OscillatoryBundle<R>, OperatorsError> {
    if a.params != b.params {
        return Err(OperatorsError::NuMismatch);
    }
    let mut out = OscillatoryBundle::zero(&a.params);
    for (_, ea) in &a.blocks {
        for (_, eb) in &b.blocks {
            out.accumulate(multiply(ea, eb)?);
        }
    }
    out.prune();
    Ok(out)
}

/// The banded Fourier-ODE system [driver | 𝒟_ν - ikI] at an explicit square
/// size (no parity rule).
pub fn assemble_fourier_ode_sized<R: Real>(
    q: &RationalExpansion<R>,
    driver_col: &[C<R>],
    k: &C<R>,
    size: usize,
) -> (DenseMatrix<R>, Vec<C<R>>) {
    assert!(size >= 4);
    let s = size;
    let minus_ik = Complex::new(k.im.clone(), -k.re.clone());
    let d = diff_block(&q.params, s, s - 1, &R::zero(), &minus_ik);
    let mut a = DenseMatrix::zeros(s, s);
    for row in 0..s {
        let g = driver_col.get(row).cloned().unwrap_or_else(Complex::zero);
        a.set(row, 0, g);
        for col in 1..s {
            a.set(row, col, d.get(row, col - 1).clone());
        }
    }
    let rhs = interlaced_coeffs(q, s);
    (a, rhs)
}

/// The same system under the parity truncation rule: size m for Re k ≤ 0,
/// m+1 for Re k > 0 (m even).
pub fn assemble_fourier_ode<R: Real>(
    q: &RationalExpansion<R>,
    driver_col: &[C<R>],
    k: &C<R>,
    m: usize,
) -> (DenseMatrix<R>, Vec<C<R>>) {
    let s = if k.re <= R::zero() { m } else { m + 1 };
    assemble_fourier_ode_sized(q, driver_col, k, s)
}

/// The 2-block forward-scattering system with rhs [0; r⃗].
///
/// Each block gets `rows` rows and m-1 operator columns plus a driver column;
/// `rows > m` overdetermines the least-squares solve, which is what keeps the
/// k > 0 sections full-rank (the square truncation loses rank there, the
/// system analogue of the scalar parity phenomenon).
#[allow(clippy::too_many_arguments)]
pub fn assemble_scattering_system<R: Real>(
    q: &RationalExpansion<R>,
    r: &RationalExpansion<R>,
    q_phi_2k: &[C<R>],
    r_phi_0: &[C<R>],
    driver: &[C<R>],
    k: &C<R>,
    m: usize,
    rows: usize,
) -> (DenseMatrix<R>, Vec<C<R>>) {
    assert!(m >= 8 && rows >= m);
    let params = &q.params;
    let zero_shift: C<R> = Complex::zero();
    let minus_2ik = Complex::new(k.im.clone() * R::from_f64(2.0), -(k.re.clone() * R::from_f64(2.0)));
    let d_top = diff_block(params, rows, m - 1, &R::zero(), &zero_shift);
    let d_bot = diff_block(params, rows, m - 1, &R::zero(), &minus_2ik);
    let mq = mult_matrix(q, rows, m - 1);
    let mr = mult_matrix(r, rows, m - 1);

    let mut a = DenseMatrix::zeros(2 * rows, 2 * m);
    for row in 0..rows {
        // columns: [0] u0, [1..m] u, [m] v0, [m+1..2m] v
        a.set(row, 0, driver.get(row).cloned().unwrap_or_else(Complex::zero));
        for c in 0..m - 1 {
            a.set(row, 1 + c, d_top.get(row, c).clone());
        }
        a.set(row, m, -q_phi_2k.get(row).cloned().unwrap_or_else(Complex::zero));
        for c in 0..m - 1 {
            a.set(row, m + 1 + c, -mq.get(row, c).clone());
        }
        // second block row
        let rr = row + rows;
        a.set(rr, 0, -r_phi_0.get(row).cloned().unwrap_or_else(Complex::zero));
        for c in 0..m - 1 {
            a.set(rr, 1 + c, -mr.get(row, c).clone());
        }
        a.set(rr, m, driver.get(row).cloned().unwrap_or_else(Complex::zero));
        for c in 0..m - 1 {
            a.set(rr, m + 1 + c, d_bot.get(row, c).clone());
        }
    }
    let mut rhs = vec![Complex::<R>::zero(); 2 * rows];
    let r_coeffs = interlaced_coeffs(r, rows);
    rhs[rows..].clone_from_slice(&r_coeffs);
    (a, rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionMode {
    /// Exact solve of the parity-truncated square section; falls back to
    /// least squares (and flags it) if the section is singular.
    SquareParity,
    LeastSquares,
}

#[derive(Clone, Debug)]
pub struct SectionSolution<R: Real> {
    pub coeffs: Vec<C<R>>,
    pub m_used: usize,
    pub fell_back_to_lstsq: bool,
}

/// Solve sections produced by `assemble`, doubling the requested size until
/// the trailing quarter of the solution falls below `tail_tol` (relative) or
/// the cap is hit.
pub fn solve_finite_section<R: Real, F>(
    assemble: F,
    m0: usize,
    mode: SectionMode,
    tail_tol: &R,
    cap: usize,
) -> Result<SectionSolution<R>, OperatorsError>
where
    F: Fn(usize) -> (DenseMatrix<R>, Vec<C<R>>),
{
    let mut m = m0;
    loop {
        let (a, b) = assemble(m);
        let mut fell_back = false;
        let x = match mode {
            SectionMode::LeastSquares => solve_least_squares(&a, &b)?,
            SectionMode::SquareParity => match lu_solve(&a, &b) {
                Ok(x) => x,
                Err(LinalgError::Singular { .. }) => {
                    fell_back = true;
                    solve_least_squares(&a, &b)?
                }
                Err(e) => return Err(e.into()),
            },
        };
        let total: R = x.iter().fold(R::zero(), |acc, c| acc + c.norm_sqr()).sqrt();
        let tail_start = x.len() - x.len() / 4;
        let tail: R = x[tail_start..]
            .iter()
            .fold(R::zero(), |acc, c| acc + c.norm_sqr())
            .sqrt();
        let resolved = total.is_zero() || tail <= tail_tol.clone() * total.clone();
        if resolved {
            return Ok(SectionSolution {
                coeffs: x,
                m_used: m,
                fell_back_to_lstsq: fell_back,
            });
        }
        if 2 * m > cap {
            return Err(OperatorsError::GrowthCapExceeded {
                m,
                trailing: (tail / total).to_f64(),
            });
        }
        m *= 2;
    }
}

/// Interlaced driver column of the rational driver 4ν²/(ν²+x²) = -R_1 - R_{-1}.
pub fn rational_driver_column<R: Real>(len: usize) -> Vec<C<R>> {
    let mut col = vec![Complex::<R>::zero(); len];
    let minus_one = Complex::new(-R::one(), R::zero());
    if len > 0 {
        col[0] = minus_one.clone();
    }
    if len > 1 {
        col[1] = minus_one;
    }
    col
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{interpolate_fn, Omega};

    fn params() -> BasisParams<f64> {
        BasisParams::new(1.0)
    }

    #[test]
    fn diff_matrix_matches_tabulated_entries() {
        // leading block of the α = 0 operator, ν arbitrary
        for nu in [1.0, 2.0] {
            let p = BasisParams::new(nu);
            let d = diff_matrix(&p, 8, &0.0);
            let i = Complex::new(0.0, 1.0);
            let expect = |v: f64| i * v / nu;
            // column j=1: i/ν at (1,1) [row pos 0], -i/(2ν) at j=2 [row pos 2]
            assert_eq!(*d.get(0, 0), expect(1.0));
            assert_eq!(*d.get(2, 0), expect(-0.5));
            // column j=-1
            assert_eq!(*d.get(1, 1), expect(-1.0));
            assert_eq!(*d.get(3, 1), expect(0.5));
            // column j=2
            assert_eq!(*d.get(0, 2), expect(-1.0));
            assert_eq!(*d.get(2, 2), expect(2.0));
            assert_eq!(*d.get(4, 2), expect(-1.0));
            // column j=3 (position 4)
            assert_eq!(*d.get(2, 4), expect(-1.5));
            assert_eq!(*d.get(4, 4), expect(3.0));
            assert_eq!(*d.get(6, 4), expect(-1.5));
            // column j=-2 (position 3)
            assert_eq!(*d.get(1, 3), expect(1.0));
            assert_eq!(*d.get(3, 3), expect(-2.0));
            assert_eq!(*d.get(5, 3), expect(1.0));
        }
    }

    #[test]
    fn gaussian_derivative() {
        let p = params();
        let e = interpolate_fn(&p, 256, 0.0, |x: &f64| Complex::new((-x * x).exp(), 0.0));
        let mcount = e.coeff_count();
        let d = diff_matrix(&p, mcount, &0.0);
        let c = interlaced_coeffs(&e, mcount);
        let dc = d.matvec(&c);
        let mut de = RationalExpansion::zero(&p, 0.0);
        for (pos, v) in dc.iter().enumerate() {
            de.set_coeff(interlaced_index(pos), *v);
        }
        for x in [-3.0f64, -1.0, -0.25, 0.0, 0.5, 1.5, 2.5] {
            let got = de.evaluate(&Omega::real(x));
            let expected = -2.0 * x * (-x * x).exp();
            assert!((got.re - expected).abs() < 1e-9, "x={x}: {} vs {expected}", got.re);
            assert!(got.im.abs() < 1e-10);
        }
        // derivative of the zero expansion is zero
        let z = RationalExpansion::zero(&p, 0.0);
        assert!(diff_matrix(&p, 4, &0.0).matvec(&interlaced_coeffs(&z, 4)).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn alpha_shifted_derivative_matches_finite_differences() {
        let p = params();
        let alpha = 0.9;
        let f = |x: f64| {
            let base = Complex::new((-x * x / 2.0).exp() * (1.0 + 0.2 * x), 0.0);
            Complex::new(0.0, alpha * x).exp() * base
        };
        let e = interpolate_fn(&p, 128, alpha, |x: &f64| f(*x));
        let mcount = e.coeff_count();
        let d = diff_block(&p, mcount, mcount, &alpha, &Complex::zero());
        let dc = d.matvec(&interlaced_coeffs(&e, mcount));
        let mut de = RationalExpansion::zero(&p, alpha);
        for (pos, v) in dc.iter().enumerate() {
            de.set_coeff(interlaced_index(pos), *v);
        }
        let h = 1e-5;
        for x in [-2.0f64, -0.7, 0.0, 0.4, 1.3] {
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            let got = de.evaluate(&Omega::real(x));
            assert!((got - fd).norm() < 1e-6, "x={x}: {got} vs {fd}");
        }
    }

    #[test]
    fn product_identity_r1_squared() {
        let p = params();
        let r1 = RationalExpansion::single(&p, 0.0, 1, Complex::new(1.0, 0.0));
        let prod = multiply(&r1, &r1).unwrap();
        assert!((prod.coeff(2) - Complex::new(1.0, 0.0)).norm() < 1e-13);
        assert!((prod.coeff(1) - Complex::new(-2.0, 0.0)).norm() < 1e-13);
        for j in [-4i64, -1, 3, 4] {
            assert!(prod.coeff(j).norm() < 1e-13);
        }
        // and the same through the explicit multiplication matrix
        let m = mult_matrix(&r1, 8, 8);
        let mut c = vec![Complex::new(0.0, 0.0); 8];
        c[0] = Complex::new(1.0, 0.0); // coefficient of R_1
        let out = m.matvec(&c);
        assert!((out[0] - Complex::new(-2.0, 0.0)).norm() < 1e-14); // R_1
        assert!((out[2] - Complex::new(1.0, 0.0)).norm() < 1e-14); // R_2
    }

    #[test]
    fn multiply_zero_is_zero() {
        let p = params();
        let e = interpolate_fn(&p, 32, 0.0, |x: &f64| Complex::new(1.0 / (1.0 + x * x), 0.0));
        let z = RationalExpansion::zero(&p, 0.0);
        let prod = multiply(&e, &z).unwrap();
        assert!(prod.norm_sqr() == 0.0);
    }

    #[test]
    fn multiply_matches_pointwise() {
        let p = params();
        let a = interpolate_fn(&p, 64, 0.0, |x: &f64| {
            Complex::new(1.0 / (1.0 + x * x), 0.1 * x / (4.0 + x * x * x * x))
        });
        let b = interpolate_fn(&p, 64, 0.0, |x: &f64| Complex::new((-x * x / 3.0).exp(), 0.2 / (2.0 + x * x)));
        let prod = multiply(&a, &b).unwrap();
        for i in 0..50 {
            let x = -8.0 + 16.0 * (i as f64 + 0.37) / 50.0;
            let w = Omega::real(x);
            let err = (prod.evaluate(&w) - a.evaluate(&w) * b.evaluate(&w)).norm();
            assert!(err < 1e-12, "x={x}: {err}");
        }
    }

    #[test]
    fn multiply_is_commutative_and_associative() {
        let p = params();
        let fs: Vec<RationalExpansion<f64>> = vec![
            interpolate_fn(&p, 32, 0.0, |x: &f64| Complex::new(1.0 / (1.0 + x * x), 0.0)),
            interpolate_fn(&p, 32, 0.0, |x: &f64| Complex::new(x / (4.0 + x * x * x * x), 0.3 / (1.0 + x * x))),
            interpolate_fn(&p, 32, 0.0, |x: &f64| Complex::new((-x * x / 2.0).exp(), 0.0)),
        ];
        let ab = multiply(&fs[0], &fs[1]).unwrap();
        let ba = multiply(&fs[1], &fs[0]).unwrap();
        for j in [-10i64, -3, 1, 2, 9] {
            assert!((ab.coeff(j) - ba.coeff(j)).norm() < 1e-11);
        }
        let abc1 = multiply(&ab, &fs[2]).unwrap();
        let abc2 = multiply(&fs[0], &multiply(&fs[1], &fs[2]).unwrap()).unwrap();
        for i in 0..20 {
            let x = -5.0 + 10.0 * i as f64 / 19.0;
            let w = Omega::real(x);
            assert!((abc1.evaluate(&w) - abc2.evaluate(&w)).norm() < 1e-11);
        }
    }

    #[test]
    fn derivation_property() {
        let p = params();
        let f = interpolate_fn(&p, 64, 0.0, |x: &f64| Complex::new(1.0 / (1.0 + x * x), 0.0));
        let g = interpolate_fn(&p, 64, 0.0, |x: &f64| Complex::new((-x * x / 2.0).exp(), 0.0));
        let n = 256;
        let apply_d = |e: &RationalExpansion<f64>| {
            let d = diff_matrix(&p, n, &0.0);
            let dc = d.matvec(&interlaced_coeffs(e, n));
            let mut out = RationalExpansion::zero(&p, 0.0);
            for (pos, v) in dc.iter().enumerate() {
                out.set_coeff(interlaced_index(pos), *v);
            }
            out
        };
        let fg = multiply(&f, &g).unwrap();
        let lhs = apply_d(&fg);
        let mut rhs = multiply(&apply_d(&f), &g).unwrap();
        rhs.add_scaled(&Complex::new(1.0, 0.0), &multiply(&f, &apply_d(&g)).unwrap());
        for j in [-40i64, -11, -1, 1, 2, 17, 40] {
            assert!((lhs.coeff(j) - rhs.coeff(j)).norm() < 1e-11, "j={j}");
        }
    }

    #[test]
    fn mult_operator_linear_in_c() {
        let p = params();
        let a = interpolate_fn(&p, 16, 0.0, |x: &f64| Complex::new(1.0 / (1.0 + x * x), 0.0));
        let b = interpolate_fn(&p, 16, 0.0, |x: &f64| Complex::new(x / (1.0 + x * x * x * x), 0.0));
        let mut sum = a.clone();
        sum.add_scaled(&Complex::new(2.0, 0.0), &b);
        let m_sum = mult_matrix(&sum, 12, 12);
        let m_a = mult_matrix(&a, 12, 12);
        let m_b = mult_matrix(&b, 12, 12);
        for i in 0..12 {
            for j in 0..12 {
                let lhs = *m_sum.get(i, j);
                let rhs = *m_a.get(i, j) + Complex::new(2.0, 0.0) * *m_b.get(i, j);
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
        let z = RationalExpansion::zero(&p, 0.0);
        assert!(mult_matrix(&z, 6, 6).frobenius_norm() == 0.0);
    }

    #[test]
    fn fourier_ode_driver_reproduces_itself() {
        // q = driver ⇒ c₀ = 1, all other unknowns 0
        let p = params();
        let mut q = RationalExpansion::zero(&p, 0.0);
        q.set_coeff(1, Complex::new(-1.0, 0.0));
        q.set_coeff(-1, Complex::new(-1.0, 0.0));
        let driver = rational_driver_column::<f64>(64);
        for k in [Complex::new(0.7, 0.0), Complex::new(-1.3, 0.0)] {
            let (a, b) = assemble_fourier_ode(&q, &driver, &k, 40);
            let x = lu_solve(&a, &b).unwrap();
            assert!((x[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
            for v in &x[1..] {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn growth_heuristic_terminates_for_smooth_input() {
        let p = params();
        let q = interpolate_fn(&p, 512, 0.0, |x: &f64| Complex::new((-x * x).exp(), 0.0));
        let driver = rational_driver_column::<f64>(1026);
        let k = Complex::new(1.5, 0.0);
        let sol = solve_finite_section(
            |m| assemble_fourier_ode(&q, &driver, &k, m),
            64,
            SectionMode::SquareParity,
            &1e-11,
            1024,
        )
        .unwrap();
        assert!(sol.m_used <= 1024);
        assert!(!sol.fell_back_to_lstsq);
    }
}
