//! Connection, curvature and Ricci on left-invariant fields.

use nilgauss::invariant::{connection, curvature, curvature_oracle, ricci, ricci_trace};
use nilgauss::NilpotentAlgebra;

fn main() -> nilgauss::Result<()> {
    let alg = NilpotentAlgebra::heisenberg(1)?;
    let (x, y, z) = (alg.basis(0), alg.basis(1), alg.basis(2));

    println!("∇_X Y = {:?}", connection(&alg, &x, &y)?.as_slice());
    println!("∇_X Z = {:?}", connection(&alg, &x, &z)?.as_slice());

    let r = curvature(&alg, &x, &y, &y)?;
    let brute = curvature_oracle(&alg, &x, &y, &y)?;
    println!("R(X,Y)Y = {:?}  (from ∇: {:?})", r.as_slice(), brute.as_slice());
    println!("sectional K(X,Y) = {:.4}", r.dot(&x));
    println!("sectional K(X,Z) = {:.4}", curvature(&alg, &x, &z, &z)?.dot(&x));

    for (name, v) in [("X", &x), ("Y", &y), ("Z", &z)] {
        println!("Ric({name},{name}) = {:.4} / trace {:.4}", ricci(&alg, v, v)?, ricci_trace(&alg, v, v)?);
    }
    Ok(())
}
