//! Run the full benchmark grid — every selector at several target sizes —
//! and emit the CSV/JSON reports.
//!
//! ```bash
//! cargo run --release -p fsdr --example benchmark
//! ```

use fsdr::baselines::SelectorSpec;
use fsdr::dataset::{generate_synthetic, SyntheticSpec};
use fsdr::evaluation::run_benchmark;

fn main() -> fsdr::Result<()> {
    let spec = SyntheticSpec {
        n_samples: 600,
        n_features: 128,
        planted_bands: vec![19, 45, 67, 83, 110],
        smoothness: 5.0,
        noise_std: 0.05,
        seed: 21,
    };
    let (dataset, _) = generate_synthetic(&spec)?;

    let selectors = [
        SelectorSpec::fsdr_default(),
        SelectorSpec::mi_default(),
        SelectorSpec::sfs_default(),
        SelectorSpec::lasso_default(),
    ];
    let report = run_benchmark(&[dataset], &selectors, &[2, 5, 10], &[1])?;

    println!(
        "{:<14} {:<6} {:>3} {:>3} {:>9} {:>8} {:>8}",
        "dataset", "method", "t", "t'", "time_s", "r2", "rmse"
    );
    for row in &report.rows {
        println!(
            "{:<14} {:<6} {:>3} {:>3} {:>9.3} {:>8.4} {:>8.4}",
            row.dataset,
            row.selector,
            row.t,
            row.t_prime,
            row.time_s,
            row.r2.unwrap_or(f64::NAN),
            row.rmse.unwrap_or(f64::NAN)
        );
    }

    let out_dir = std::env::temp_dir().join("fsdr_examples");
    std::fs::create_dir_all(&out_dir)?;
    let csv = out_dir.join("benchmark_report.csv");
    let json = out_dir.join("benchmark_report.json");
    report.write_csv(&csv)?;
    report.write_json(&json)?;
    println!("\nwrote {} and {}", csv.display(), json.display());
    Ok(())
}
