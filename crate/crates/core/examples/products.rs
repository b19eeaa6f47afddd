//! Products of mod-p generators: criterion verdicts beside the cochain-level oracle.

use ktrunc::mult::{theorem, GeneratorDescriptor, Parity};
use ktrunc::oracle::ProductOracle;
use ktrunc::Prime;

fn main() -> ktrunc::Result<()> {
    let mut oracle = ProductOracle::new();
    let p3 = Prime::new(3)?;
    let p2 = Prime::new(2)?;
    let cases = [
        (p3, 2, (1, 2), Parity::A, (1, 2)),
        (p3, 2, (2, 1), Parity::B, (3, 1)),
        (p3, 2, (1, 2), Parity::A, (2, 4)),
        (p2, 3, (2, 1), Parity::A, (3, 5)),
        (p2, 3, (3, 7), Parity::A, (8, 13)),
    ];
    for (p, e, (i1, j1), parity, (i2, j2)) in cases {
        let a = GeneratorDescriptor::new(Parity::A, p, e, i1, j1)?;
        let x = GeneratorDescriptor::new(parity, p, e, i2, j2)?;
        let verdict = theorem(parity, p, e, i1, j1, i2, j2);
        let out = oracle.product(&a, &x)?;
        println!(
            "{a} * {x}: criterion {}, oracle {:?} mode, lambda {:?}",
            verdict.nonzero, out.mode, out.lambda
        );
    }
    Ok(())
}
