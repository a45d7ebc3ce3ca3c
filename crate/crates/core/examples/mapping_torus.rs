//! Betti numbers of the mapping torus of the T⁴ rotation and of its product with S³.

use bismut::cohomology::{induced_map_t4_rotation, mapping_torus_cohomology, parity_check_b1, product_betti_two_ways, IntegerMatrix};

fn main() {
    let psi = induced_map_t4_rotation();
    let mt = mapping_torus_cohomology(&psi);
    println!("dim N^r = {:?}", mt.n_dims);
    println!("dim C^r = {:?}", mt.c_dims);
    println!("b(M_ψ)  = {:?}, χ = {}", mt.betti, mt.euler_characteristic);
    let (a, b) = product_betti_two_ways(&psi);
    println!("b(M_ψ × S³) = {a:?} (Künneth), {b:?} (direct)");
    let j = IntegerMatrix::from_rows(&[[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]);
    println!("{:?}", parity_check_b1(psi.degree(1), &j).unwrap());
}
