//! Stage-by-stage wall-clock breakdown at the finest study level.
//!
//! Ignored by default; run with `cargo test --test timing2 -- --ignored --nocapture`.

use std::time::Instant;

use triharm::fem::{assemble_load, assemble_stiffness};
use triharm::mesh::generate_uniform;
use triharm::quad::quadrature_rule;
use triharm::recovery::{build_ppr_with, recovered_hessian, PprOptions};
use triharm::solver::{assemble_system, build_constraints};
use triharm::sparse::{colamd_order, rank_filter, LuFactors, SparseMatrix};
use triharm::{Example, MeshPattern, RecoveryMethod};

fn stamp(label: &str, t: &mut Instant) {
    println!("{label:24} {:8.2}s", t.elapsed().as_secs_f64());
    *t = Instant::now();
}

#[test]
#[ignore]
fn stage_breakdown_n256() {
    let spec = Example::One.problem();
    let mut t = Instant::now();
    let mesh = generate_uniform(MeshPattern::Regular, 256, [0.0, 0.0], [1.0, 1.0]).unwrap();
    stamp("mesh", &mut t);
    let s = assemble_stiffness(&mesh);
    stamp("stiffness", &mut t);
    let inner = triharm::recovery::build(&mesh, RecoveryMethod::Ppr).unwrap();
    stamp("inner recovery", &mut t);
    let outer = build_ppr_with(
        &mesh,
        &PprOptions {
            interior_samples_only: true,
            max_layers: 6,
            cond_max: 1e8,
        },
    )
    .unwrap();
    stamp("outer recovery", &mut t);
    let h = recovered_hessian(&outer, &inner).unwrap();
    stamp("hessian compose", &mut t);
    let k = assemble_system(&h, &s).unwrap();
    println!("  k nnz = {}", k.nnz());
    stamp("triple product", &mut t);
    let constraints = build_constraints(&mesh, &inner, &h, &spec).unwrap();
    stamp("constraints", &mut t);
    let load = assemble_load(&mesh, &spec.f, &quadrature_rule(4));
    stamp("load", &mut t);

    let (kept, _) = rank_filter(&constraints.c, 1e-8, 1e-13);
    let cf = constraints.c.select_rows(&kept);
    stamp("rank filter", &mut t);

    // scaled KKT as the solver assembles it
    let n = k.nrows();
    let m = cf.nrows();
    let mut d1 = vec![1.0f64; n];
    for r in 0..n {
        let dk = k.get(r, r);
        if dk > 0.0 {
            d1[r] = 1.0 / dk.sqrt();
        }
    }
    let mut d2 = vec![1.0f64; m];
    for r in 0..m {
        let (_, vals) = cf.row(r);
        let mut rmax = 0.0f64;
        for &v in vals {
            rmax = rmax.max(v.abs());
        }
        if rmax > 0.0 {
            d2[r] = 1.0 / rmax;
        }
    }
    let ct = cf.transpose();
    let mut trips = Vec::new();
    for r in 0..n {
        let (kc, kv) = k.row(r);
        for (&cc, &vv) in kc.iter().zip(kv) {
            trips.push((r, cc, d1[r] * vv * d1[cc]));
        }
        let (tc, tv) = ct.row(r);
        for (&cc, &vv) in tc.iter().zip(tv) {
            trips.push((r, n + cc, d1[r] * vv * d2[cc]));
        }
    }
    for r in 0..m {
        let (cc, cv) = cf.row(r);
        for (&col, &vv) in cc.iter().zip(cv) {
            trips.push((n + r, col, d2[r] * vv * d1[col]));
        }
    }
    let mat = SparseMatrix::from_triplets(n + m, n + m, trips).unwrap();
    stamp("kkt assembly", &mut t);

    let order = colamd_order(&mat);
    stamp("colamd", &mut t);
    let lu = LuFactors::factor(&mat, &order).unwrap();
    println!("  factor nnz = {}", lu.factor_nnz());
    stamp("factor", &mut t);
    let rhs = vec![1.0f64; n + m];
    let mut x = lu.solve(&rhs);
    for _ in 0..3 {
        let mx = mat.matvec(&x);
        let r: Vec<f64> = (0..n + m).map(|i| rhs[i] - mx[i]).collect();
        let dx = lu.solve(&r);
        for i in 0..n + m {
            x[i] += dx[i];
        }
    }
    stamp("4 solves + matvecs", &mut t);
    let _ = load;
}
