// The dual bundle, the fibrewise Fourier transform and its inverse, the
// evaluation map into the double dual and the certified duality report.
//
// ```bash
// cargo run --example dual_bundle
// ```

use pontryagin_bundles::duality::{self, TransformPath};
use pontryagin_bundles::{BundleFunction, Complex64, FiniteAbelianGroup, GroupBundle};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let b = GroupBundle::from_points([
        ("x", FiniteAbelianGroup::cyclic(4)?, 1.0),
        ("y", FiniteAbelianGroup::new(&[12, 35])?, 0.25),
    ])?;
    let db = duality::dual_bundle(&b);
    for (id, fibre) in db.fibres() {
        println!("dual weight at {id}: {}", fibre.weight);
    }
    let dd = duality::double_dual(&b);
    assert!((dd.weight("y")? - 0.25).abs() < 1e-15);

    // constant 1 on Z4 with c = 1 transforms to 4·δ_trivial.
    let one = BundleFunction::constant(&b, Complex64::new(1.0, 0.0));
    let hat = duality::fourier(&b, &one)?;
    println!("1̂ on x: {:?}", hat.fibre(0));

    // y has order 420, so Auto takes the FFT path; compare with the direct sum.
    let f = BundleFunction::from_fn(&b, |_, e| Complex64::new((e.residues[0] as f64).sin(), e.residues.len() as f64));
    let fast = duality::fourier_with(&b, &f, TransformPath::Fast)?;
    let naive = duality::fourier_with(&b, &f, TransformPath::Naive)?;
    println!("fast vs naive: {:.2e}", fast.distance(&naive)?);

    let back = duality::inverse_fourier(&db, &fast)?;
    println!("round trip error: {:.2e}", back.distance(&f)?);
    assert!(back.distance(&f)? < 1e-9);

    let s = b.element("y", &[5, 7])?;
    println!("Φ(s) has residues {:?}", duality::evaluation_map(&b, &s)?.residues);

    let report = duality::verify_duality(&b, 1e-9);
    print!("{}", report.to_text());
    assert!(report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("dual_bundle example failed");
}
