//! The general, Heisenberg-type and Heisenberg closed forms on the same
//! frame and shape data.

use nalgebra::{DMatrix, DVector};
use nilgauss::frame::adapted_frame;
use nilgauss::laplacian::{closed_form, Method};
use nilgauss::{NilpotentAlgebra, ShapeData};

fn main() -> nilgauss::Result<()> {
    let alg = NilpotentAlgebra::heisenberg(2)?;
    let normal = DVector::from_vec(vec![0.2, -0.4, 0.1, 0.5, 0.7]).normalize();
    let frame = adapted_frame(&alg, &normal)?;
    println!("frame kind {:?}, |X| = {:.4}, |Z| = {:.4}", frame.kind, frame.normal_v_norm(), frame.normal_z_norm());

    let b = DMatrix::from_fn(4, 4, |i, j| 0.1 * (i + j) as f64 - 0.2);
    let shape = ShapeData::from_matrix(b);
    let dh = [0.3, -0.1, 0.0, 0.2];
    for m in [Method::General, Method::HType, Method::Heisenberg] {
        let r = closed_form(m, &alg, &frame, &shape, &dh)?;
        let coeffs: Vec<String> = r.coeffs.iter().map(|c| format!("{c:+.6}")).collect();
        println!("{:>10}: {}", m.name(), coeffs.join(" "));
    }
    Ok(())
}
