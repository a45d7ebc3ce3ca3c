//! Condition residuals (KAHLER, SKT, CYT, BTP, BIANCHI1, TYPE, BKL) on every shipped model.

use bismut::hermitian::{condition_report, CheckName};
use bismut::models::ModelSpec;

fn main() {
    for spec in ModelSpec::all() {
        let hs = spec.build();
        let rep = condition_report(&hs, &hs.sample_points(42, 20)).unwrap();
        let line: Vec<String> = CheckName::ALL.iter().map(|c| format!("{c}={:.1e}", rep.max(*c))).collect();
        println!("{:<24} {}", spec.name(), line.join(" "));
    }
}
