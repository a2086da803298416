//! Classification groups of chiral bundles over spheres and tori.
//!
//! `cargo run --example classify`

use chiraltop::basespace::SpaceKind;
use chiraltop::classify::classify_space;

fn main() {
    for kind in [SpaceKind::Sphere, SpaceKind::Torus] {
        for d in 1..=4 {
            let row: Vec<String> = [1, 2, 3]
                .iter()
                .map(|&m| match classify_space(kind, d, m) {
                    Ok(g) => format!("m={m}: {g}"),
                    Err(e) => format!("m={m}: {e}"),
                })
                .collect();
            println!("{kind}{d}\n  {}", row.join("\n  "));
        }
    }
}
