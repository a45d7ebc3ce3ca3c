//! A TOML job through the report runner, printed as JSON without timing.

use bismut::report::{run_job, JobSpec};

fn main() {
    let spec = JobSpec::parse(
        r#"
        kind = "verify-model"
        target = "product_t4_hopf"
        variant = "minus"
        points = 10
        seed = 42
        expected_fail = ["KAHLER"]
        "#,
    )
    .unwrap();
    let report = run_job(&spec).unwrap();
    println!("{}", report.to_json(false));
    std::process::exit(report.exit_code());
}
