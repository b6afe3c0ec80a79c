// Sequences in an eventually-trivialized bundle: generate convergent ones,
// certify continuity of `Φ` and its inverse, then break one and read the
// counterexample.
//
// ```bash
// cargo run --example convergence_harness
// ```

use pontryagin_bundles::harness::{self, generate};
use rand::SeedableRng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let sc = generate::random_convergent_scenario(&mut rng, 12, 12)?;
    println!("{} terms, tail from {}", sc.len(), sc.tail_index());

    let forward = harness::check_phi_forward_continuity(&sc);
    let inverse = harness::check_phi_inverse_continuity(&sc);
    println!("forward stabilises at {:?}", forward.stabilization_index);
    println!("inverse stabilises at {:?}", inverse.stabilization_index);
    assert!(forward.passed() && inverse.passed());

    let broken = generate::inject_divergence(&sc, generate::Divergence::Element, &mut rng)?;
    let verdict = harness::check_phi_forward_continuity(&broken);
    assert!(!verdict.passed());
    let cx = verdict.counterexample.expect("divergence leaves a witness");
    println!("diverges: term {} at {} is {:?}; {} vs {}", cx.index, cx.point, cx.element, cx.observed, cx.expected);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("convergence_harness example failed");
}
