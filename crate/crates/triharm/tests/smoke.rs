//! End-to-end smoke check of the full pipeline on small meshes.

use triharm::mesh::{generate_uniform, MeshPattern};
use triharm::quad::quadrature_rule;
use triharm::recovery::RecoveryMethod;
use triharm::solver::solve_bvp_with;
use triharm::sparse::SaddleOptions;
use triharm::study::Example;

#[test]
fn example1_small_meshes() {
    let spec = Example::One.problem();
    let opts = SaddleOptions {
        residual_tol: 1e-3,
        ..SaddleOptions::default()
    };
    let rule = quadrature_rule(6);
    for n in [8usize, 16, 32] {
        let mesh = generate_uniform(MeshPattern::Regular, n, [0.0, 0.0], [1.0, 1.0]).unwrap();
        let asm = triharm::solver::assemble_bvp(&mesh, &spec, RecoveryMethod::Ppr).unwrap();
        let (u, diag) = triharm::solver::solve_assembled(&mesh, &asm, &opts).unwrap();
        let errs = triharm::fem::error_norms(
            &mesh,
            &u,
            &asm.gradient,
            &asm.hessian,
            spec.exact.as_ref().unwrap(),
            &rule,
        );
        println!(
            "n={n:3} dof={:5} m={:4} dropped={} De={:.3e} D1e={:.3e} D1re={:.3e} D2e={:.3e} D3e={:.3e} res={:.1e} bwd={:.1e} cvio={:.1e}",
            diag.dof,
            diag.num_constraints,
            diag.dropped_rows,
            errs.de,
            errs.d1e,
            errs.d1re,
            errs.d2e,
            errs.d3e,
            diag.kkt_residual,
            diag.backward_error,
            diag.constraint_violation,
        );
    }
}
