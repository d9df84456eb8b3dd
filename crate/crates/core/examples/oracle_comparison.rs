//! Closed-form `ΔG` against the finite-difference Laplace-Beltrami oracle
//! on seeded random graphs.

use nilgauss::catalog::{random_graph, sample_points};
use nilgauss::laplacian::{Method, SurfacePoint};
use nilgauss::NilpotentAlgebra;

fn main() -> nilgauss::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for alg in [NilpotentAlgebra::heisenberg(1)?, NilpotentAlgebra::heisenberg(2)?, NilpotentAlgebra::quaternionic_heisenberg()] {
        let mut worst: f64 = 0.0;
        for seed in 0..seeds {
            let chart = random_graph(&alg, seed)?;
            for u in sample_points(&chart, 3, seed) {
                let sp = SurfacePoint::evaluate(&chart, &u)?;
                let oracle = sp.laplacian(&chart, Method::NumericOracle)?;
                worst = worst.max(sp.laplacian(&chart, Method::General)?.max_gap(&oracle));
            }
        }
        println!("dimension {}: largest coefficient gap {worst:.2e} over {seeds} charts", alg.dim_total());
    }
    Ok(())
}
