//! ∫_{S³} H on spheres of several radii, against 4π², with the flat control.

use bismut::models::{integrate_h_over_sphere3, kahler_control, product_t4_hopf, Variant};

fn main() {
    let hs = product_t4_hopf(Variant::Minus);
    let control = kahler_control();
    for t in [-1.0, 0.0, 1.5] {
        let p = [0.1, 0.2, 0.3, 0.4];
        let i = integrate_h_over_sphere3(&hs, p, t, 12, 1e-6).unwrap();
        let c = integrate_h_over_sphere3(&control, p, t, 12, 1e-6).unwrap();
        println!(
            "t = {t:>4}: ∫H = {:.12} (4π² = {:.12}, est. error {:.1e}), control {:.1e}",
            i.value,
            4.0 * std::f64::consts::PI.powi(2),
            i.error_estimate,
            c.value
        );
    }
}
