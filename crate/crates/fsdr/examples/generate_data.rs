//! Generate a synthetic planted-band dataset and write it to disk as CSV
//! with its ground-truth JSON sidecar.
//!
//! ```bash
//! cargo run --release -p fsdr --example generate_data
//! ```

use fsdr::dataset::{generate_synthetic, write_csv, SyntheticSpec};

fn main() -> fsdr::Result<()> {
    let spec = SyntheticSpec {
        n_samples: 500,
        n_features: 256,
        planted_bands: vec![37, 91, 133, 165, 219],
        smoothness: 8.0,
        noise_std: 0.05,
        seed: 42,
    };
    let (dataset, truth) = generate_synthetic(&spec)?;

    // Spectra-like curves: adjacent bands should be strongly correlated.
    let d = dataset.num_features();
    let (mut num, mut den) = (0.0, 0.0);
    let mean: f64 = dataset.features().as_slice().iter().sum::<f64>()
        / dataset.features().as_slice().len() as f64;
    for i in 0..dataset.num_samples() {
        let row = dataset.features().row(i);
        for j in 0..d - 1 {
            num += (row[j] - mean) * (row[j + 1] - mean);
            den += (row[j] - mean) * (row[j] - mean);
        }
    }
    println!(
        "generated {} samples x {} bands, lag-1 band correlation {:.4}",
        dataset.num_samples(),
        d,
        num / den
    );
    println!("planted bands: {:?}", truth.planted_bands);
    println!("linear weights: {:?}", truth.linear_weights);
    println!("quadratic weights: {:?}", truth.quadratic_weights);

    let out_dir = std::env::temp_dir().join("fsdr_examples");
    std::fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join("synthetic.csv");
    write_csv(&dataset, &csv_path, "response")?;
    let truth_path = csv_path.with_extension("truth.json");
    std::fs::write(&truth_path, serde_json::to_string_pretty(&truth)?)?;
    println!("wrote {} and {}", csv_path.display(), truth_path.display());
    Ok(())
}
