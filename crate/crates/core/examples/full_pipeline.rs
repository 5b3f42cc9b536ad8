//! End to end through the command-line entry point: synthesize inputs,
//! then run the whole pipeline into a directory.
//!
//! ```text
//! cargo run --example full_pipeline -- out/
//! ```
//!
//! The same thing from a shell is `delaytree pipeline --synth weekend
//! --out-dir out/`.

use std::path::PathBuf;

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("delaytree-pipeline"));
    let out = out.to_str().expect("utf-8 path");

    let code = delaytree::cli::run_command([
        "delaytree",
        "pipeline",
        "--synth",
        "weekend-hour",
        "--out-dir",
        out,
        "--min-samples",
        "50",
    ]);
    if code != 0 {
        std::process::exit(code);
    }
    println!("outputs in {out}");
    let factors = std::fs::read_to_string(format!("{out}/reports/factors.csv")).unwrap();
    print!("{factors}");
    let tree = std::fs::read_to_string(format!("{out}/trees/passenger_to_us.txt")).unwrap();
    print!("\n{tree}");
}
