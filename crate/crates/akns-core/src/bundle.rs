//! Oscillatory bundles: finite maps α ↦ expansion, the GMRES element type.
//!
//! A bundle represents Σ_α e^{iαω} f_α(ω) with each f_α a rational expansion
//! at the shared scale ν. The empty bundle is the zero function. Blocks whose
//! relative norm falls below the session prune threshold are dropped after
//! arithmetic, which is what keeps the α-lattice finite during GMRES.

use crate::basis::{BasisParams, RationalExpansion};
use crate::gmres::InnerProductSpace;
use crate::scalar::{Real, C};
use num_complex::Complex;
use num_traits::Zero;
use std::cmp::Ordering;

/// Relative block-prune threshold: 10^(-digits) of the working field.
pub fn prune_threshold<R: Real>() -> R {
    R::from_decimal(&format!("1e-{}", R::digits())).unwrap_or_else(R::eps)
}

#[derive(Clone, Debug)]
pub struct OscillatoryBundle<R: Real> {
    pub params: BasisParams<R>,
    /// Sorted by α (total order); α values are exact lattice points.
    pub blocks: Vec<(R, RationalExpansion<R>)>,
}

impl<R: Real> OscillatoryBundle<R> {
    pub fn zero(params: &BasisParams<R>) -> Self {
        OscillatoryBundle {
            params: params.clone(),
            blocks: Vec::new(),
        }
    }

    pub fn from_expansion(e: RationalExpansion<R>) -> Self {
        let mut b = Self::zero(&e.params);
        if !e.is_empty() {
            b.blocks.push((e.alpha.clone(), e));
        }
        b
    }

    pub fn is_zero_bundle(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, alpha: &R) -> Option<&RationalExpansion<R>> {
        self.blocks
            .binary_search_by(|(a, _)| a.total_cmp(alpha))
            .ok()
            .map(|i| &self.blocks[i].1)
    }

    pub fn alphas(&self) -> Vec<R> {
        self.blocks.iter().map(|(a, _)| a.clone()).collect()
    }

    /// Merge a block into the bundle (adds coefficients on equal α).
    pub fn accumulate(&mut self, e: RationalExpansion<R>) {
        if e.is_empty() {
            return;
        }
        debug_assert!(e.params == self.params, "scale mismatch across blocks");
        match self
            .blocks
            .binary_search_by(|(a, _)| a.total_cmp(&e.alpha))
        {
            Ok(i) => {
                let one = Complex::new(R::one(), R::zero());
                self.blocks[i].1.add_scaled(&one, &e);
            }
            Err(i) => self.blocks.insert(i, (e.alpha.clone(), e)),
        }
    }

    pub fn norm_sqr(&self) -> R {
        let mut acc = R::zero();
        for (_, e) in &self.blocks {
            acc = acc + e.norm_sqr();
        }
        acc
    }

    /// Drop blocks below `prune_threshold() ×` the bundle norm.
    pub fn prune(&mut self) {
        let total = self.norm_sqr();
        if total.is_zero() {
            self.blocks.clear();
            return;
        }
        let thr = prune_threshold::<R>();
        let cut = thr.clone() * thr * total;
        self.blocks.retain(|(_, e)| e.norm_sqr() > cut);
    }

    pub fn truncate_blocks(&mut self, total_coeffs: usize) {
        for (_, e) in &mut self.blocks {
            e.truncate_to(total_coeffs);
        }
    }

    pub fn map_blocks<F: Fn(&RationalExpansion<R>) -> RationalExpansion<R>>(&self, f: F) -> Self {
        let mut out = Self::zero(&self.params);
        for (_, e) in &self.blocks {
            out.accumulate(f(e));
        }
        out
    }
}

/// Inner product used for the Krylov iteration on bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerProductKind {
    /// α-blocks mutually orthogonal; coefficient-Euclidean within a block.
    BlockCoefficient,
    /// Discrete L²(ℝ): trapezoid in θ with weight (ν/2)csc²(θ/2) on a grid of
    /// the given size; the ω = ∞ node is dropped.
    DiscreteL2 { n: usize },
}

fn block_inner<R: Real>(a: &OscillatoryBundle<R>, b: &OscillatoryBundle<R>) -> C<R> {
    let mut acc: C<R> = Complex::zero();
    let mut i = 0;
    let mut j = 0;
    while i < a.blocks.len() && j < b.blocks.len() {
        match a.blocks[i].0.total_cmp(&b.blocks[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                let ea = &a.blocks[i].1;
                let eb = &b.blocks[j].1;
                for (x, y) in ea.pos.iter().zip(eb.pos.iter()) {
                    acc = acc + x.conj() * y.clone();
                }
                for (x, y) in ea.neg.iter().zip(eb.neg.iter()) {
                    acc = acc + x.conj() * y.clone();
                }
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn discrete_l2_inner<R: Real>(
    a: &OscillatoryBundle<R>,
    b: &OscillatoryBundle<R>,
    n: usize,
) -> C<R> {
    use crate::basis::InterpolationGrid;
    let grid = InterpolationGrid::new(&a.params, n);
    let eval = |bundle: &OscillatoryBundle<R>| -> Vec<C<R>> {
        let mut vals = vec![Complex::<R>::zero(); n - 1];
        for (_, e) in &bundle.blocks {
            for (v, x) in vals.iter_mut().zip(e.evaluate_grid(&grid)) {
                *v = v.clone() + x;
            }
        }
        vals
    };
    let fa = eval(a);
    let fb = eval(b);
    let two_pi_over_n = R::pi() * R::from_f64(2.0 / n as f64);
    let half_nu = a.params.nu.clone() / R::from_f64(2.0);
    let mut acc: C<R> = Complex::zero();
    for (j, (x, y)) in fa.iter().zip(fb.iter()).enumerate() {
        let half_theta = grid.thetas[j + 1].clone() / R::from_f64(2.0);
        let s = half_theta.sin();
        let w = two_pi_over_n.clone() * half_nu.clone() / (s.clone() * s);
        acc = acc + x.conj() * y.clone() * Complex::new(w, R::zero());
    }
    acc
}

/// Fixed-width row of bundles; the element the singular-integral GMRES runs on.
#[derive(Clone, Debug)]
pub struct BundleRow<R: Real> {
    pub entries: Vec<OscillatoryBundle<R>>,
    pub ip: InnerProductKind,
}

impl<R: Real> BundleRow<R> {
    pub fn new(entries: Vec<OscillatoryBundle<R>>, ip: InnerProductKind) -> Self {
        BundleRow { entries, ip }
    }

    pub fn prune(&mut self) {
        for e in &mut self.entries {
            e.prune();
        }
    }
}

impl<R: Real> InnerProductSpace<R> for BundleRow<R> {
    fn zero_like(&self) -> Self {
        BundleRow {
            entries: self
                .entries
                .iter()
                .map(|b| OscillatoryBundle::zero(&b.params))
                .collect(),
            ip: self.ip,
        }
    }

    fn add_scaled(&mut self, c: &C<R>, other: &Self) {
        for (mine, theirs) in self.entries.iter_mut().zip(other.entries.iter()) {
            for (_, e) in &theirs.blocks {
                let mut scaled = e.clone();
                scaled.scale(c);
                mine.accumulate(scaled);
            }
            mine.prune();
        }
    }

    fn scale(&mut self, c: &C<R>) {
        for b in &mut self.entries {
            for (_, e) in &mut b.blocks {
                e.scale(c);
            }
        }
    }

    fn inner(&self, other: &Self) -> C<R> {
        let mut acc: C<R> = Complex::zero();
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let term = match self.ip {
                InnerProductKind::BlockCoefficient => block_inner(a, b),
                InnerProductKind::DiscreteL2 { n } => discrete_l2_inner(a, b, n),
            };
            acc = acc + term;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisParams;

    fn params() -> BasisParams<f64> {
        BasisParams::new(1.0)
    }

    #[test]
    fn accumulate_merges_equal_alpha() {
        let p = params();
        let mut b = OscillatoryBundle::zero(&p);
        b.accumulate(RationalExpansion::single(&p, 0.5, 1, Complex::new(1.0, 0.0)));
        b.accumulate(RationalExpansion::single(&p, 0.5, 1, Complex::new(2.0, 0.0)));
        b.accumulate(RationalExpansion::single(&p, -0.5, 2, Complex::new(1.0, 0.0)));
        assert_eq!(b.blocks.len(), 2);
        assert!((b.block(&0.5).unwrap().coeff(1) - Complex::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn prune_drops_tiny_blocks() {
        let p = params();
        let mut b = OscillatoryBundle::zero(&p);
        b.accumulate(RationalExpansion::single(&p, 0.0, 1, Complex::new(1.0, 0.0)));
        b.accumulate(RationalExpansion::single(&p, 2.0, 1, Complex::new(1e-20, 0.0)));
        b.prune();
        assert_eq!(b.blocks.len(), 1);
        assert!(b.block(&0.0).is_some());
    }

    #[test]
    fn block_inner_orthogonality() {
        let p = params();
        let mut a = OscillatoryBundle::zero(&p);
        a.accumulate(RationalExpansion::single(&p, 1.0, 1, Complex::new(1.0, 0.0)));
        let mut b = OscillatoryBundle::zero(&p);
        b.accumulate(RationalExpansion::single(&p, 2.0, 1, Complex::new(1.0, 0.0)));
        assert!(block_inner(&a, &b).norm() == 0.0);
        assert!((block_inner(&a, &a) - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn discrete_l2_matches_quadrature_for_smooth() {
        // ⟨f, f⟩ for f = -R_{1,0}-R_{-1,0} = 4/(1+x²) at ν=1: ∫ 16/(1+x²)² = 8π
        let p = params();
        let mut e = RationalExpansion::zero(&p, 0.0);
        e.set_coeff(1, Complex::new(-1.0, 0.0));
        e.set_coeff(-1, Complex::new(-1.0, 0.0));
        let b = OscillatoryBundle::from_expansion(e);
        let ip = discrete_l2_inner(&b, &b, 256);
        assert!((ip.re - 8.0 * std::f64::consts::PI).abs() < 1e-8, "{}", ip.re);
        assert!(ip.im.abs() < 1e-10);
    }
}
