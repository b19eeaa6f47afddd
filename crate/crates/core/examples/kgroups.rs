//! Band lengths of K_{2i-1}(k[x]/x^e; Z_p), closed form next to the Witt-vector form.
//!
//!     cargo run --example kgroups -- 3 4 5

use ktrunc::kgroups::{check_equivalence, k_closed_form, k_witt_form};
use ktrunc::Prime;

fn main() -> ktrunc::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (p, e, i) = match args[..] {
        [p, e, i] => (Prime::new(p)?, e, i),
        _ => (Prime::new(2)?, 3, 2),
    };
    let closed = k_closed_form(p, e, i);
    let witt = k_witt_form(p, e, i);
    println!("K_{}(F_{p}[x]/x^{e}; Z_{p}), total length {}", 2 * i - 1, closed.total);
    println!("{:>6} {:>7} {:>5}", "j", "closed", "witt");
    for (&j, &len) in &closed.bands.bands {
        println!("{j:>6} {len:>7} {:>5}", witt.band(j));
    }
    println!("agree: {}", check_equivalence(p, e, i).agree);
    Ok(())
}
