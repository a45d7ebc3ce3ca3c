//! Exact invariant geometry on su(2) ⊕ ℝ and su(2) ⊕ su(2) ⊕ ℝ².

use num_traits::Zero;

use bismut::lie::{
    cartan_torsion, invariant_bismut_connection, left_right_gk_check, samelson_su2_r, su2_su2_r2,
    torsion_nonexactness_witness,
};

fn main() {
    for la in [samelson_su2_r(), su2_su2_r2()] {
        let h = cartan_torsion(&la).unwrap();
        let conns = invariant_bismut_connection(&la).unwrap();
        let flat = conns.bismut.curvature(&la).iter().all(Zero::is_zero);
        let lr = left_right_gk_check(&la).unwrap();
        let w = torsion_nonexactness_witness(&la).unwrap();
        println!("{}", la.name());
        println!("  integrable: {}", la.is_integrable().unwrap());
        println!("  dH = 0: {}", la.d(&h).is_zero());
        println!("  Bismut flat: {flat}, ∇J = 0: {}", conns.bismut.preserves_complex_structure(&la).unwrap());
        println!("  left/right: {lr:?}");
        println!("  torsion witness: {w:?}");
    }
}
