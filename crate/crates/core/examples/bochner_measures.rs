// Positive-definite functions `f = h* * h`, their Bochner measures and the
// support and localization facts used in the duality argument.
//
// ```bash
// cargo run --example bochner_measures
// ```

use pontryagin_bundles::bochner;
use pontryagin_bundles::{BundleFunction, Complex64, FiniteAbelianGroup, FibreSubset, GroupBundle};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let b = GroupBundle::single("x", FiniteAbelianGroup::new(&[2, 6])?, 0.5)?;

    let mut u = FibreSubset::empty(&b);
    for r in [[0, 0], [0, 1], [1, 1]] {
        u.insert(&b, &b.element("x", &r)?)?;
    }
    let h = BundleFunction::indicator(&b, &u)?.map(|z| z * Complex64::new(1.0, 0.5));
    let f = bochner::positive_definite_from(&b, &h)?;
    let mu = bochner::bochner_measure(&b, &f)?;
    println!("mass of μ = {:.6}, f(e) = {:.6}", mu.total_mass(0), f.fibre(0)[0].re);

    let mut report = bochner::bochner_inversion_check(&b, &f, &mu, 1e-9)?;
    report.extend(bochner::mass_bound_check(&b, &f, &mu, 1e-9)?);
    report.extend(bochner::support_containment_check(&b, &h, &u)?);
    print!("{}", report.to_text());
    assert!(report.passed());

    let group = b.group("x")?;
    assert!(bochner::quadratic_form_is_psd(group, f.fibre(0), 1e-9));
    println!("the matrix f(s⁻¹t) is positive semidefinite");

    // The functional s ↦ c Σ_t g(st) f(t) vanishes off W·V.
    let mut w = FibreSubset::empty(&b);
    w.insert(&b, &b.element("x", &[1, 2])?)?;
    let mut v = FibreSubset::empty(&b);
    for r in [[0, 0], [0, 1], [0, 5]] {
        v.insert(&b, &b.element("x", &r)?)?;
    }
    let g = BundleFunction::indicator(&b, &w)?;
    let k = BundleFunction::indicator(&b, &v)?;
    let loc = bochner::localization_check(&b, &g, &k, &w, &v, 1e-9)?;
    print!("{}", loc.to_text());
    assert!(loc.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bochner_measures example failed");
}
