//! Vertical cylinders over plane curves in Nil: constant mean curvature,
//! harmonic Gauss map, and a positive Jacobi field `<G, v>`.

use nilgauss::catalog::{grid_points, nil_cylinder_str};
use nilgauss::checks::{jacobi_check, mean_direction, prop3_residuals};
use nilgauss::laplacian::{Method, SurfacePoint};

fn main() -> nilgauss::Result<()> {
    let profiles = [("u1", "0"), ("cos(u1)", "sin(u1)"), ("1 + 2*cos(u1)", "-0.5 + 2*sin(u1)")];
    for (f1, f2) in profiles {
        let chart = nil_cylinder_str(f1, f2, (0.2, 1.4), (-1.0, 1.0))?;
        let points = grid_points(chart.domain(), &[5, 3], 0.1);
        let (mut h_min, mut h_max, mut defect, mut pairing) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
        for u in &points {
            let sp = SurfacePoint::evaluate(&chart, u)?;
            h_min = h_min.min(sp.shape.mean_curvature);
            h_max = h_max.max(sp.shape.mean_curvature);
            defect = defect.max(sp.laplacian(&chart, Method::Heisenberg)?.tangential_norm);
            pairing = pairing.max(prop3_residuals(&sp.shape, &sp.frame)?.into_iter().fold(0.0, f64::max));
        }
        let jac = jacobi_check(&chart, &points, &mean_direction(&chart, &points)?)?;
        println!(
            "({f1}, {f2}): H in [{h_min:.6}, {h_max:.6}], defect {defect:.1e}, pairing {pairing:.1e}, \
             Jacobi residual {:.1e}, min w {:.3}",
            jac.max_residual, jac.min_w
        );
    }
    Ok(())
}
