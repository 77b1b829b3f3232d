//! Regenerate the bundled modular polynomial tables.
//!
//! cargo run --release --example gen_modpoly -- crates/ssnewforms/data/modpoly

use ssnewforms::ssgraph::modpoly::{ModularPolynomial, BUNDLED_LEVELS};
use std::path::PathBuf;

fn main() {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data/modpoly".into()).into();
    std::fs::create_dir_all(&dir).expect("create output directory");
    for ell in BUNDLED_LEVELS {
        let phi = ModularPolynomial::generate(ell).expect("generation succeeds");
        for p in [10007u64, 1_000_003] {
            assert!(phi.verify_series(p, 50), "Φ_{ell} fails verification mod {p}");
        }
        let path = dir.join(format!("phi_{ell}.txt"));
        std::fs::write(&path, phi.to_text()).expect("write table");
        println!("{}: {} terms", path.display(), phi.terms.len());
    }
}
