// A three-point group bundle with its Haar system, the convolution
// *-algebra and the support rule for products.
//
// ```bash
// cargo run --example bundle_algebra
// ```

use pontryagin_bundles::{BundleFunction, Complex64, FiniteAbelianGroup, FibreSubset, GroupBundle};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let b = GroupBundle::from_points([
        ("a", FiniteAbelianGroup::cyclic(2)?, 1.0),
        ("b", FiniteAbelianGroup::cyclic(6)?, 0.5),
        ("c", FiniteAbelianGroup::new(&[2, 4])?, 2.0),
    ])?;
    println!("{} base points, {} elements in total", b.len(), b.total_size());

    // Convolution stays inside a fibre and carries the Haar weight c_x.
    let s = b.element("b", &[1])?;
    let t = b.element("b", &[2])?;
    let ds = BundleFunction::delta(&b, &s)?;
    let dt = BundleFunction::delta(&b, &t)?;
    let prod = b.convolve(&ds, &dt)?;
    let st = b.element("b", &[3])?;
    println!("δ_s * δ_t at s+t = {}", prod.at(&b, &st)?);
    assert!((prod.at(&b, &st)? - Complex64::new(0.5, 0.0)).norm() < 1e-12);

    // f* (s) = conj f(s⁻¹)
    let f = BundleFunction::from_fn(&b, |x, e| Complex64::new(e.residues.iter().sum::<u64>() as f64, x.len() as f64));
    let star = b.involution(&f)?;
    println!("f*(b,1) = {}, f(b,5) = {}", star.at(&b, &s)?, f.at(&b, &b.element("b", &[5])?)?);

    // supp(g * h) ⊆ supp(g)·supp(h)
    let mut u = FibreSubset::empty(&b);
    u.insert(&b, &b.element("c", &[1, 0])?)?;
    u.insert(&b, &b.element("c", &[0, 1])?)?;
    let g = BundleFunction::indicator(&b, &u)?;
    let gg = b.convolve(&g, &g)?;
    let supp = b.support(&gg, 1e-12);
    assert!(supp.is_subset(&u.product(&b, &u)));
    println!("supp(1_U * 1_U) has {} elements, U·U has {}", supp.len(), u.product(&b, &u).len());

    println!("∫ f dβ^c = {}", b.integrate(&f, "c")?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bundle_algebra example failed");
}
