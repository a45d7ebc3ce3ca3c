//! Metric and complex-structure compatibility along the Gauduchon line, and
//! the Bismut endpoint's torsion against H.

use bismut::hermitian::{gauduchon_connection, torsion_3form};
use bismut::models::{ModelSpec, Variant};

fn main() {
    let hs = ModelSpec::ProductT4Hopf(Variant::Minus).build();
    let p = hs.sample_points(5, 1).remove(0);
    for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let conn = gauduchon_connection(&hs, t, p.coords()).unwrap();
        let ng = conn.metric_derivative().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let nj = conn.complex_derivative().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        println!("t = {t:>4}: |∇g| = {ng:.1e}, |∇J| = {nj:.1e}");
    }
    let bismut = gauduchon_connection(&hs, -1.0, p.coords()).unwrap();
    let h = torsion_3form(&hs).eval_order(p.coords(), 1).unwrap();
    let n = hs.dim();
    let torsion = bismut.lowered_torsion();
    let mut gap: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gap = gap.max((torsion[(a * n + b) * n + c] - h.value(&[a, b, c])).abs());
            }
        }
    }
    println!("|T^B − H| = {gap:.1e}");
}
