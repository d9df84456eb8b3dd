//! The leaf `z = 0` of the foliation of Nil spanned by `X` and `Y - xZ`:
//! minimal, but the Gauss map is not harmonic away from `x = 0`.

use nilgauss::catalog::nil_foliation_leaf;
use nilgauss::laplacian::{harmonicity, Method, SurfacePoint};

fn main() -> nilgauss::Result<()> {
    let chart = nil_foliation_leaf(0.0)?;
    println!("{:>5} {:>10} {:>10} {:>12} {:>12} {:>12}", "x", "H", "|B|^2", "tangential", "normal", "numeric");
    for x in [0.0, 0.5, 1.0, 2.0] {
        let sp = SurfacePoint::evaluate(&chart, &[x, 0.0])?;
        let closed = sp.laplacian(&chart, Method::Heisenberg)?;
        let numeric = sp.laplacian(&chart, Method::NumericOracle)?;
        println!(
            "{x:>5} {:>10.2e} {:>10.6} {:>12.6} {:>12.6} {:>12.6}",
            sp.shape.mean_curvature,
            sp.shape.norm_b2,
            harmonicity(&closed, 1e-3).defect,
            closed.normal_coeff,
            numeric.tangential_norm
        );
    }
    let sp = SurfacePoint::evaluate(&chart, &[1.0, 0.0])?;
    for (k, t) in sp.laplacian(&chart, Method::General)?.terms.iter().enumerate() {
        println!("Y_{} terms: {t:?}", k + 1);
    }
    Ok(())
}
