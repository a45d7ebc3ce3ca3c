//! The ± pair on the product chart: torsion identity, pluriclosedness and orientation.

use bismut::hermitian::generalized_kahler_check;
use bismut::models::{product_t4_hopf, Variant};

fn main() {
    let (plus, minus) = (product_t4_hopf(Variant::Plus), product_t4_hopf(Variant::Minus));
    let points = minus.sample_points(42, 50);
    let rep = generalized_kahler_check(&plus, &minus, &points).unwrap();
    println!("|dᶜ₊ω₊ + dᶜ₋ω₋| = {:.1e}", rep.torsion_identity);
    println!("|ddᶜ₊ω₊|        = {:.1e}", rep.pluriclosed);
    println!("|[J₊, J₋]|      = {:.1e}", rep.commutator);
    println!("orientation     = {:?}", rep.orientation());
}
