//! TR lengths of slope hyper-representations, and the TC bookkeeping that recovers
//! the total length i(e-1).

use ktrunc::hyperrep::{dims, tc_length_check, tr_length_general, HyperRep};
use ktrunc::Prime;

fn main() -> ktrunc::Result<()> {
    let p = Prime::new(2)?;
    let mu = HyperRep::slope(3, 2)?;
    let seq: Vec<u64> = (0..6).map(|s| dims(&mu, p, s)).collect();
    println!("dimensions of the slope 3/2 hyper-representation: {seq:?}");
    for i in 0..10 {
        println!("  TR length at i={i}: {:?}", tr_length_general(&mu, p, i)?);
    }
    let lambda = HyperRep::lambda(2);
    println!("lambda_2 at i=1: {:?}", tr_length_general(&lambda, p, 1)?);
    for (e, i) in [(2, 5), (3, 7), (5, 4)] {
        println!("TC bookkeeping e={e} i={i}: {}", tc_length_check(p, e, i));
    }
    Ok(())
}
