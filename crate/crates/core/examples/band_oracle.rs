//! Builds the band complex for one (p, e, i, j), reads H^1 off its Smith form, and
//! compares with the closed form.

use ktrunc::kgroups::band_length;
use ktrunc::oracle::{auto_r_max, build_band, integral_cohomology, modp_cohomology, BandSpec};
use ktrunc::Prime;

fn main() -> ktrunc::Result<()> {
    let p = Prime::new(3)?;
    for (e, i, j) in [(2, 3, 1), (4, 2, 5), (6, 5, 7), (3, 4, 2)] {
        let r = auto_r_max(p, e, i, j);
        let band = build_band(BandSpec::new(p, e, i, j, r)?)?;
        let h = integral_cohomology(&band)?;
        let modp = modp_cohomology(p, e, i, j, r)?;
        println!(
            "e={e} i={i} j={j}: degrees {:?}, divisors [{}], H^1 length {} (closed form {}), mod-p dims ({}, {})",
            band.degrees,
            h.elementary_divisors.join(", "),
            h.h1_length,
            band_length(p, e, i, j),
            modp.h0_dim(),
            modp.h1_dim(),
        );
    }
    Ok(())
}
