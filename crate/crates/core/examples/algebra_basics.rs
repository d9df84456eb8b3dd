//! Builds a few 2-step algebras, validates them and prints `J(Z)`.

use nilgauss::algebra::{BracketEntry, NilpotentAlgebra};

fn main() -> nilgauss::Result<()> {
    let nil = NilpotentAlgebra::heisenberg(1)?;
    let quat = NilpotentAlgebra::quaternionic_heisenberg();
    let skewed = NilpotentAlgebra::from_brackets(
        5,
        2,
        &[BracketEntry { i: 1, j: 2, k: 4, c: 1.0 }, BracketEntry { i: 1, j: 3, k: 5, c: 2.0 }],
    )?;

    for (name, alg) in [("nil", &nil), ("quaternionic", &quat), ("skewed", &skewed)] {
        let report = alg.validate(1e-10);
        println!(
            "{name}: dim {} center {} valid {} heisenberg-type {}",
            alg.dim_total(),
            alg.dim_center(),
            report.is_valid(),
            alg.is_heisenberg_type(1e-10)
        );
    }

    let z = nil.basis(2);
    println!("J(Z) on nil =\n{}", nil.j_matrix(&z));
    let k = nil.basis(0);
    let l = nil.basis(1);
    println!("[K, L] = {:?}", nil.bracket(&k, &l)?.as_slice());

    // The document form is what job files embed inline.
    println!("{}", serde_json::to_string(&skewed.to_document())?);
    Ok(())
}
