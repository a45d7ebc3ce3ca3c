//! E₂ dimensions for a T⁴ bundle over the Hopf surface, from the shipped Hodge tables.

use std::path::Path;

use bismut::cohomology::{e2_table, load_hodge_file};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/hopf_surface.hodge.toml");
    let h = load_hodge_file(&path).unwrap();
    for e in e2_table(&h.base, &h.fiber, (0, 1), (0, 2)) {
        println!("^{{{},{}}}E₂^{{{},{}}} = {}", e.p, e.q, e.u, e.v, e.dim);
    }
}
