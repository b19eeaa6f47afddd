//! Big Witt vectors on {1..6} through ghost components.

use std::str::FromStr;

use ktrunc::witt::{big_witt_lengths, TruncationSet, WittVector};
use ktrunc::Prime;
use num_rational::BigRational;

fn main() -> ktrunc::Result<()> {
    let j = TruncationSet::full(6);
    let x = WittVector::from_integers(j.clone(), &[1, 2, 0, -1, 3, 1])?;
    let y = WittVector::teichmuller(j.clone(), BigRational::from_str("2").unwrap());
    let show = |w: &WittVector| w.coords.values().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
    println!("x     = ({})", show(&x));
    println!("[2]   = ({})", show(&y));
    println!("x + [2] = ({})", show(&x.add(&y)?));
    println!("x * [2] = ({})", show(&x.mul(&y)?));

    let half = j.divide(2);
    let v = WittVector::from_integers(half, &[1, 1, 1])?.verschiebung(2, &j)?;
    println!("V_2(1,1,1) = ({})", show(&v));
    println!("F_2 V_2 (1,1,1) = ({})", show(&v.frobenius(2)));

    let p = Prime::new(2)?;
    let lengths = big_witt_lengths(12, p);
    println!("W_12(k) at p=2 splits into bands {:?}, total {}", lengths.bands, lengths.total());
    Ok(())
}
