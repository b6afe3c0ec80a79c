// Loads a bundle document, writes its dual and runs every verification suite,
// the same work the `pontryagin` binary does.
//
// ```bash
// cargo run --example verify_document
// cargo run --bin pontryagin -- verify fixtures/three_point.json --suite all
// ```

use pontryagin_bundles::cli::{self, Suite};
use pontryagin_bundles::document::parse_document;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/three_point.json");
    let doc = parse_document(path)?;

    let dual = cli::cmd_dual(&doc)?;
    for p in &dual.base {
        println!("{}: moduli {:?}, dual weight {}", p.id, p.moduli, p.weight);
    }

    let report = cli::cmd_verify(&doc, Suite::All, 1e-9)?;
    println!("{} checks, {} failed", report.checks.len(), report.failures().count());
    for (suite, took) in &report.timings {
        println!("  {suite}: {took:?}");
    }
    assert!(report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("verify_document example failed");
}
