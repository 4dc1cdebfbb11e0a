//! Runs the bundled experiment grid and the randomized lemma suite.
//!
//! `cargo run --release --example experiment_campaign [spec.toml]`

use nonsplit::experiment::{run_experiment, verify_lemmas, ExperimentSpec, LemmaCampaign};

const DEFAULT_SPEC: &str = include_str!("nonsplit_scaling.toml");

fn main() -> nonsplit::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT_SPEC.to_string(),
    };
    let spec = ExperimentSpec::from_toml(&text)?;
    let table = run_experiment(&spec)?;
    print!("{}", table.to_csv());
    for v in &table.violations {
        eprintln!("violation: {v}");
    }

    let mut campaign = LemmaCampaign::new(1);
    campaign.transitivity = 1000;
    campaign.arithmetic = 10_000;
    for check in verify_lemmas(&campaign)? {
        println!(
            "# {}: {} instances, passed={}",
            check.name,
            check.instances,
            check.passed()
        );
    }
    Ok(())
}
