//! Wall-clock check for the four-level uniform refinement study.
//!
//! Ignored by default; run with `cargo test --test timing -- --ignored --nocapture`.

use std::time::Instant;

use triharm::study::{run_convergence, StudyConfig};
use triharm::{Example, MeshPattern, RecoveryMethod};

#[test]
#[ignore]
fn regular_four_levels_wall_time() {
    let config = StudyConfig {
        example: Example::One,
        pattern: MeshPattern::Regular,
        method: RecoveryMethod::Ppr,
        base_n: 32,
        levels: 4,
    };
    let start = Instant::now();
    let report = run_convergence(&config).expect("study should succeed");
    let elapsed = start.elapsed();
    for level in &report.levels {
        println!(
            "dof={:7} h={:.4e} De={:.3e} D1re={:.3e} D2e={:.3e} D3e={:.3e} drop={} res={:.1e}",
            level.dof,
            level.h_max,
            level.errors.de,
            level.errors.d1re,
            level.errors.d2e,
            level.errors.d3e,
            level.diagnostics.dropped_rows,
            level.diagnostics.kkt_residual
        );
    }
    println!("total wall time: {:.2}s", elapsed.as_secs_f64());
}
