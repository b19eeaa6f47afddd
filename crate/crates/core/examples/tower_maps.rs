//! The projection k[x]/x^m -> k[x]/x^n on one band: counts, the vanishing criterion,
//! and the chain-map oracle.

use ktrunc::functoriality::{pi_star_oracle, pi_star_r_max, report, TowerMapQuery};
use ktrunc::Prime;

fn main() -> ktrunc::Result<()> {
    let p2 = Prime::new(2)?;
    let p3 = Prime::new(3)?;
    for q in [
        TowerMapQuery::new(p2, 4, 2, 3, 1)?,
        TowerMapQuery::new(p3, 5, 3, 4, 2)?,
        TowerMapQuery::new(p2, 12, 11, 4, 23)?,
        TowerMapQuery::new(p3, 6, 5, 3, 7)?,
    ] {
        let r = report(&q);
        let o = pi_star_oracle(&q, pi_star_r_max(&q) + 1)?;
        println!(
            "p={} m={} n={} i={} j={}: ell={} ell'={:?} t={} green={} | N length {}, image {:?}",
            q.p, q.m, q.n, q.i, q.j, r.ell, r.ell_prime, r.t, r.green, o.n_length, o.image
        );
    }
    Ok(())
}
