//! Invariance of h, Ω and J under the deck maps (x, z) ↦ (ψⁿx, 2ⁿz).

use bismut::models::{deck_invariance, product_t4_hopf, Variant};

fn main() {
    let points = product_t4_hopf(Variant::Minus).sample_points(3, 20);
    for v in [Variant::Minus, Variant::Plus] {
        for n in -2..=2 {
            let r = deck_invariance(v, n, &points).unwrap();
            println!(
                "{v:>5} n = {n:>2}: metric {:.1e}, Ω {:.1e}, J {:.1e}",
                r.metric, r.fundamental_form, r.complex_structure
            );
        }
    }
}
