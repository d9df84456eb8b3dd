//! Gauss and Codazzi residuals on the Nil foliation leaf.

use nilgauss::catalog::nil_foliation_leaf;
use nilgauss::checks::{gauss_codazzi_residuals, GaussCodazzi};

fn main() -> nilgauss::Result<()> {
    let chart = nil_foliation_leaf(0.0)?;
    for u in [[0.0, 0.0], [0.4, 1.0], [-1.3, 0.2], [2.0, -2.0]] {
        match gauss_codazzi_residuals(&chart, &u)? {
            GaussCodazzi::Checked { a, b, codazzi, gauss, curvature_normal } => println!(
                "{u:?}: codazzi {codazzi:.1e} gauss {gauss:.1e}  <R(F1,F2)F1,η> = {curvature_normal:.6}, ab = {:.6}",
                a * b
            ),
            GaussCodazzi::Skipped { a, b } => println!("{u:?}: skipped (a = {a:.3}, b = {b:.3})"),
        }
    }
    Ok(())
}
