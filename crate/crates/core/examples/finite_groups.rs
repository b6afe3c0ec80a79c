// Products of cyclic groups: arithmetic, exact character values and the
// canonical invariant factors.
//
// ```bash
// cargo run --example finite_groups
// ```

use pontryagin_bundles::{Complex64, FiniteAbelianGroup};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = FiniteAbelianGroup::new(&[4, 6])?;
    println!("G = Z4 x Z6, order {}, exponent {}", g.order(), g.exponent());
    println!("invariant factors {:?}", g.canonical_invariants());

    let a = g.element(&[3, 5])?;
    let b = g.element(&[2, 4])?;
    let ab = g.multiply(&a, &b)?;
    println!("{:?} + {:?} = {:?}, inverse of a = {:?}", a.residues, b.residues, ab.residues, g.invert(&a)?.residues);
    assert_eq!(ab.residues, vec![1, 3]);

    // Characters are residue vectors too; values are exact phases.
    let w = g.character(&[1, 1])?;
    let phase = g.phase(&w, &a)?;
    println!("ω(a) = exp(2πi·{phase}) = {}", g.char_eval(&w, &a)?);

    let mut sum = Complex64::new(0.0, 0.0);
    for s in g.enumerate() {
        sum += g.char_eval(&w, &s)?;
    }
    println!("Σ_s ω(s) = {sum:.3e} for nontrivial ω");
    assert!(sum.norm() < 1e-12);

    // Z6 x Z10 x Z15 has invariant factors 30, 30.
    let h = FiniteAbelianGroup::new(&[6, 10, 15])?;
    assert_eq!(h.canonical_invariants(), vec![30, 30]);
    println!("Z6 x Z10 x Z15 ≅ Z30 x Z30");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("finite_groups example failed");
}
