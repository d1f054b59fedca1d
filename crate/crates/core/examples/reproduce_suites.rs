//! Runs every bundled reference suite and prints its pass/fail table.

use pbnet::harness::{reproduce_paper, Suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    let mut all_passed = true;
    for suite in Suite::ALL {
        let report = reproduce_paper(suite, out.as_deref())?;
        print!("{report}");
        all_passed &= report.passed();
    }
    if !all_passed {
        std::process::exit(3);
    }
    Ok(())
}
