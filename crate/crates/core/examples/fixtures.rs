//! Regenerate the shipped fixture traces: `cargo run -p tangleproof --example fixtures`.

use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    tangleproof::fixtures::write_all(&dir).expect("write fixtures");
    println!("wrote {}", dir.display());
}
