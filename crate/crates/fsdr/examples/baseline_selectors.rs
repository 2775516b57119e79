//! Run the three comparison selectors (mutual information, sequential
//! forward selection, LASSO) on the same planted-band dataset and compare
//! what each one finds.
//!
//! ```bash
//! cargo run --release -p fsdr --example baseline_selectors
//! ```

use fsdr::baselines::SelectorSpec;
use fsdr::dataset::{generate_synthetic, standardize, SyntheticSpec};

fn main() -> fsdr::Result<()> {
    let spec = SyntheticSpec {
        n_samples: 800,
        n_features: 128,
        planted_bands: vec![19, 45, 67, 83, 110],
        smoothness: 5.0,
        noise_std: 0.05,
        seed: 11,
    };
    let (dataset, truth) = generate_synthetic(&spec)?;
    let (dataset, _) = standardize(&dataset)?;
    println!("planted bands: {:?}\n", truth.planted_bands);

    for selector in [
        SelectorSpec::mi_default(),
        SelectorSpec::sfs_default(),
        SelectorSpec::lasso_default(),
        SelectorSpec::fsdr_default(),
    ] {
        let result = selector.select(&dataset, 5, 1)?;
        let recovered = truth
            .planted_bands
            .iter()
            .filter(|&&b| {
                result
                    .selected
                    .iter()
                    .any(|&s| (s as i64 - b as i64).abs() <= 3)
            })
            .count();
        println!(
            "{:<6} selected {:?} in {:.3}s (within +/-3 of {recovered}/5 planted bands)",
            selector.name(),
            result.selected,
            result.wall_time_s
        );
        for w in &result.warnings {
            println!("       warning: {w}");
        }
    }
    Ok(())
}
