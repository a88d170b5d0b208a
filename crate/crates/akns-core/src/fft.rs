//! Discrete Fourier transform over the generic scalar.
//!
//! Power-of-two lengths use an iterative radix-2 transform; other lengths fall
//! back to direct summation (interpolation grids are always padded to powers of
//! two, so the fallback only serves small odd sizes in tests).
//!
//! Convention: `dft` maps samples F(θ_j), θ_j = 2πj/n, to coefficients
//! F̃_k = (1/n) Σ_j e^{-ikθ_j} F(θ_j); `idft` is the unnormalized inverse.

use crate::scalar::{c_scale, cis, Real, C};
use num_complex::Complex;
use num_traits::Zero;
use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

thread_local! {
    static TWIDDLES: RefCell<HashMap<(TypeId, usize, usize), Rc<dyn Any>>> =
        RefCell::new(HashMap::new());
}

/// e^{-2πi k/n} for k < n/2, cached per (scalar type, n, session digits).
fn twiddle_table<R: Real>(n: usize) -> Rc<Vec<C<R>>> {
    let key = (TypeId::of::<R>(), n, R::digits());
    TWIDDLES.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(t) = cache.get(&key) {
            return t.clone().downcast::<Vec<C<R>>>().unwrap();
        }
        let two_pi = R::pi() * R::from_f64(2.0);
        let nr = R::from_f64(n as f64);
        let mut tw = Vec::with_capacity(n / 2);
        for k in 0..n / 2 {
            let angle = -(two_pi.clone() * R::from_f64(k as f64) / nr.clone());
            tw.push(cis(&angle));
        }
        let rc: Rc<Vec<C<R>>> = Rc::new(tw);
        cache.insert(key, rc.clone());
        rc
    })
}

fn bit_reverse_permute<T>(data: &mut [T]) {
    let n = data.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
}

/// In-place unnormalized transform: data_k <- Σ_j data_j e^{sign·2πi jk/n}.
fn fft_pow2<R: Real>(data: &mut [C<R>], sign: i32) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let tw = twiddle_table::<R>(n);
    bit_reverse_permute(data);
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let mut w = tw[k * stride].clone();
                if sign > 0 {
                    w = w.conj();
                }
                let a = data[start + k].clone();
                let b = data[start + k + len / 2].clone() * w;
                data[start + k] = a.clone() + b.clone();
                data[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

fn dft_direct<R: Real>(data: &[C<R>], sign: i32) -> Vec<C<R>> {
    let n = data.len();
    let two_pi = R::pi() * R::from_f64(2.0);
    let nr = R::from_f64(n as f64);
    let base: Vec<C<R>> = (0..n)
        .map(|j| {
            let angle = two_pi.clone() * R::from_f64(sign as f64 * j as f64) / nr.clone();
            cis(&angle)
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut acc: C<R> = Complex::zero();
            for (j, d) in data.iter().enumerate() {
                acc = acc + d.clone() * base[(j * k) % n].clone();
            }
            acc
        })
        .collect()
}

/// Forward transform with 1/n normalization.
pub fn dft<R: Real>(samples: &[C<R>]) -> Vec<C<R>> {
    let n = samples.len();
    assert!(n >= 1, "dft of empty sequence");
    let inv_n = R::one() / R::from_f64(n as f64);
    let mut out = if n.is_power_of_two() {
        let mut data = samples.to_vec();
        fft_pow2(&mut data, -1);
        data
    } else {
        dft_direct(samples, -1)
    };
    for v in &mut out {
        *v = c_scale(v, &inv_n);
    }
    out
}

/// Unnormalized inverse: samples_j = Σ_k coeffs_k e^{ikθ_j}.
pub fn idft<R: Real>(coeffs: &[C<R>]) -> Vec<C<R>> {
    let n = coeffs.len();
    assert!(n >= 1, "idft of empty sequence");
    if n.is_power_of_two() {
        let mut data = coeffs.to_vec();
        fft_pow2(&mut data, 1);
        data
    } else {
        dft_direct(coeffs, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_from_f64;

    fn lcg_samples(n: usize) -> Vec<C<f64>> {
        let mut state = 0x9e3779b97f4a7c15u64;
        (0..n)
            .map(|_| {
                let mut next = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
                };
                Complex::new(next(), next())
            })
            .collect()
    }

    #[test]
    fn constant_samples() {
        let c = c_from_f64::<f64>(2.5, -0.5);
        let out = dft(&vec![c; 16]);
        assert!((out[0] - c).norm() < 1e-15);
        for v in &out[1..] {
            assert!(v.norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_n8() {
        let n = 8;
        let samples: Vec<C<f64>> = (0..n)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                Complex::new(theta.cos(), theta.sin())
            })
            .collect();
        let out = dft(&samples);
        assert!((out[1] - Complex::new(1.0, 0.0)).norm() < 1e-14);
        for (k, v) in out.iter().enumerate() {
            if k != 1 {
                assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn round_trip_all_lengths() {
        for n in [1usize, 2, 3, 5, 12, 64, 65, 128] {
            let samples = lcg_samples(n);
            let back = idft(&dft(&samples));
            for (a, b) in samples.iter().zip(&back) {
                assert!((a - b).norm() < 1e-13, "length {n}");
            }
        }
    }
}
