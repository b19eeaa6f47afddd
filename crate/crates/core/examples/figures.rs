//! Writes every configured figure (SVG + CSV) into a directory.
//!
//!     cargo run --example figures -- out/

use std::path::PathBuf;

use ktrunc::figures::FiguresConfig;

fn main() -> ktrunc::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("figures"), PathBuf::from);
    for fig in FiguresConfig::builtin().render_all()? {
        for path in fig.write(&dir)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}
