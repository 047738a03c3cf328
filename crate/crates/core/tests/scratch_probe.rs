use std::time::Instant;

use mcqite::analysis::optimize_eps;
use mcqite::compiler::build_hedge;
use mcqite::engines::{run_postselected, run_statevector, RunOptions};
use mcqite::models::{HamiltonianSpec, InitialStateSpec};
use mcqite::numerics::NumericsConfig;

#[test]
#[ignore]
fn probe_timing_and_postselection() {
    let cfg = NumericsConfig::default();
    let h = HamiltonianSpec::single_qubit_z();
    let init = InitialStateSpec::PlusAll;
    let e_gs = h.ground_energy();

    let s10 = build_hedge(10, &cfg).unwrap();
    let t0 = Instant::now();
    let r = run_statevector(&s10, &h, &init, 0.2, RunOptions::default(), &cfg).unwrap();
    println!("n=10 single run: {:?}, energy {}", t0.elapsed(), r.energy);

    let t0 = Instant::now();
    let opt = optimize_eps(
        |e| Ok(run_statevector(&s10, &h, &init, e, RunOptions::default(), &cfg)?.energy),
        1e-2, 1.0, 1e-3, 25,
    )
    .unwrap();
    println!(
        "n=10 optimize: {:?}, eps* {} E {} iters {}",
        t0.elapsed(),
        opt.eps_star,
        opt.value,
        opt.refine_iterations
    );

    let t0 = Instant::now();
    for n in 2..=10u32 {
        let s = build_hedge(n, &cfg).unwrap();
        let opt = optimize_eps(
            |e| Ok(run_statevector(&s, &h, &init, e, RunOptions::default(), &cfg)?.energy),
            1e-2, 1.0, 1e-3, 25,
        )
        .unwrap();
        let r = run_statevector(&s, &h, &init, opt.eps_star, RunOptions::default(), &cfg).unwrap();
        println!(
            "n={n}: eps* {:.5} energy {:.8} infid_gs {:.6e}",
            opt.eps_star,
            r.energy,
            1.0 - r.fidelity_ground
        );
    }
    println!("curve total: {:?}", t0.elapsed());

    for n in 2..=4u32 {
        let s = build_hedge(n, &cfg).unwrap();
        let plain = optimize_eps(
            |e| Ok(run_statevector(&s, &h, &init, e, RunOptions::default(), &cfg)?.energy),
            1e-2, 1.0, 1e-3, 25,
        )
        .unwrap();
        let post = optimize_eps(
            |e| {
                let r = run_postselected(&s, &h, &init, e, RunOptions::default(), &cfg)?;
                Ok(if r.aborted { f64::INFINITY } else { r.energy })
            },
            1e-2, 1.0, 1e-3, 25,
        )
        .unwrap();
        let post_at_plain =
            run_postselected(&s, &h, &init, plain.eps_star, RunOptions::default(), &cfg).unwrap();
        let post_at_own =
            run_postselected(&s, &h, &init, post.eps_star, RunOptions::default(), &cfg).unwrap();
        println!(
            "n={n}: plain(e*={:.4}) err {:.6e} | post@plain err {:.6e} succ {:.4} | post@own(e*={:.4}) err {:.6e} succ {:.4}",
            plain.eps_star,
            plain.value - e_gs,
            post_at_plain.energy - e_gs,
            post_at_plain.success_probability,
            post.eps_star,
            post_at_own.energy - e_gs,
            post_at_own.success_probability
        );
    }
}
