//! Adapted frames when the normal is purely central or purely horizontal.

use nilgauss::catalog::{nil_foliation_leaf, nil_vertical_plane};
use nilgauss::frame::adapted_frame;
use nilgauss::laplacian::{Method, SurfacePoint};
use nilgauss::NilpotentAlgebra;

fn main() -> nilgauss::Result<()> {
    let alg = NilpotentAlgebra::quaternionic_heisenberg();
    for (label, normal) in [("central", alg.basis(5)), ("horizontal", alg.basis(2))] {
        let frame = adapted_frame(&alg, &normal)?;
        println!("{label}: {:?} frame, Gram residual {:.1e}", frame.kind, frame.gram_residual());
    }

    for (label, chart, u) in [("leaf at x = 0", nil_foliation_leaf(0.0)?, [0.0, 1.0]), ("vertical plane", nil_vertical_plane()?, [0.3, 0.3])] {
        let sp = SurfacePoint::evaluate(&chart, &u)?;
        print!("{label}:");
        for m in Method::ALL {
            print!(" {} {:?}", m.name(), sp.laplacian(&chart, m)?.coeffs.iter().map(|c| (c * 1e6).round() / 1e6).collect::<Vec<_>>());
        }
        println!();
    }
    Ok(())
}
