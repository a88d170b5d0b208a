use akns_core::basis::BasisParams;
use akns_core::fourier::gaussian_hat;
use akns_core::scattering::*;
use num_complex::Complex;

fn a_pointwise(ctx: &SolveContext, z: Complex<f64>, m: usize) -> Complex<f64> {
    let c1 = solve_phi(ctx, z, m).unwrap();
    Complex::new(1.0, 0.0) + c1.u0 * gaussian_hat(&Complex::new(0.0, 0.0))
}

#[test]
fn dbg_pointwise_a_bias() {
    let params = BasisParams::new(1.0);
    let (q, r) = potentials::modulated_sech(1.65, 0.1, -1.0);
    let pot = PotentialPair::new(&params, 512, q, r);
    let ctx = SolveContext::new(&pot);
    let sref = SechReference::new(1.65, 0.1);
    let zs = sref.zeros();
    for m in [400usize, 800] {
        for (j, z) in zs.iter().enumerate() {
            let a = a_pointwise(&ctx, *z, m);
            // |a'(z)| from closed form by finite differences
            let h = 1e-6;
            let ap = (sref.a(z + Complex::new(h, 0.0)) - sref.a(z - Complex::new(h, 0.0))) / (2.0 * h);
            eprintln!("m={m} z{j}={z}: |a_num(z_true)| = {:.3e}, |a'| = {:.3}, implied shift {:.3e}",
                a.norm(), ap.norm(), a.norm() / ap.norm());
        }
    }
}

#[test]
fn dbg_gaussian_pair_which_value() {
    let params = BasisParams::new(1.0);
    let (q, r) = potentials::gaussian_pair();
    let pot = PotentialPair::new(&params, 512, q, r);
    let ctx = SolveContext::new(&pot);
    let cand_a = Complex::new(0.25, 0.501700387);
    let cand_b = Complex::new(0.25, 0.517003899379);
    for m in [400usize, 800] {
        let va = a_pointwise(&ctx, cand_a, m);
        let vb = a_pointwise(&ctx, cand_b, m);
        eprintln!("m={m}: |a(0.25+0.5017i)| = {:.3e}   |a(0.25+0.51700i)| = {:.3e}", va.norm(), vb.norm());
    }
}

#[test]
fn dbg_gaussian_pair_norming_at_true_zero() {
    let params = BasisParams::new(1.0);
    let (q, r) = potentials::gaussian_pair();
    let pot = PotentialPair::new(&params, 512, q, r);
    let ctx = SolveContext::new(&pot);
    let ctx_s = SolveContext::new(&pot.swapped());
    let m = 400usize;
    // pointwise Newton from the eigensolve candidate
    let mut z = Complex::new(0.25, 0.5017);
    let pass = forward_pass_small(&ctx, &ctx_s, 300);
    for _ in 0..6 {
        let val = a_pointwise(&ctx, z, m);
        let deriv = expansion_deriv_at(&pass.a_rep, &z);
        let step = val / deriv;
        z -= step;
        eprintln!("newton z = {z:.14} |a| = {:.3e} step {:.3e}", val.norm(), step.norm());
        if step.norm() < 1e-13 { break; }
    }
    let rn = pot.reflected_negated();
    let ctx_rn = SolveContext::new(&rn);
    let ctx_rn_s = SolveContext::new(&rn.swapped());
    let d = norming_constants(&ctx, &ctx_s, &ctx_rn, &ctx_rn_s, &pass, z, m).unwrap();
    eprintln!("z+ = {z:.13}");
    eprintln!("c+ = {} (printed 0.4100036 - 1.6000283i)", d.c);
    eprintln!("d+ = {} (printed 0.2050018 + 0.8000141i)", d.d);
    // lower half plane partner
    let mut zm = Complex::new(0.25, -0.5017);
    for _ in 0..6 {
        let c2 = solve_phi(&ctx_s, -zm, m).unwrap();
        let val = Complex::new(1.0, 0.0) + c2.u0 * gaussian_hat(&Complex::new(0.0, 0.0));
        let deriv = expansion_deriv_at(&pass.cap_a_rep, &zm);
        zm -= val / deriv;
    }
    let dm = norming_constants(&ctx, &ctx_s, &ctx_rn, &ctx_rn_s, &pass, zm, m).unwrap();
    eprintln!("z- = {zm:.13}");
    eprintln!("c- = {} (printed 0.2050018 - 0.8000141i)", dm.c);
    eprintln!("d- = {} (printed 0.4100036 + 1.6000283i)", dm.d);
}

fn forward_pass_small(ctx: &SolveContext, ctx_s: &SolveContext, m: usize) -> ForwardPass {
    forward_pass(ctx, ctx_s, m).unwrap()
}
