//! Pointwise dimension of ker H = {X : ι_X H = 0} on the shipped models.

use bismut::hermitian::kernel_distribution_rank;
use bismut::models::ModelSpec;

fn main() {
    for spec in ModelSpec::all() {
        let hs = spec.build();
        let ranks: Vec<usize> = hs
            .sample_points(11, 10)
            .iter()
            .map(|p| kernel_distribution_rank(&hs, p.coords()).unwrap())
            .collect();
        println!("{:<24} dim ker H = {:?}", spec.name(), ranks);
    }
}
