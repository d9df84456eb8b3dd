//! A minimal surface whose Gauss map is not harmonic.

use nilgauss::catalog::nil_foliation_leaf;
use nilgauss::laplacian::{harmonicity, Method, SurfacePoint};

fn main() -> nilgauss::Result<()> {
    let chart = nil_foliation_leaf(0.0)?;
    let x: f64 = 0.7;
    let sp = SurfacePoint::evaluate(&chart, &[x, 0.0])?;
    for m in [Method::General, Method::NumericOracle] {
        let v = harmonicity(&sp.laplacian(&chart, m)?, 1e-3);
        println!("{:>14}: H = {:.1e}, defect {:.6}, harmonic {}", m.name(), sp.shape.mean_curvature, v.defect, v.harmonic);
    }
    println!("expected defect |x|/(1+x²)² = {:.6}", x / (1.0 + x * x).powi(2));
    Ok(())
}
