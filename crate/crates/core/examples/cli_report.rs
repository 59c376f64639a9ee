//! Driving the command line in-process and reading its JSON report.

use bellkit::cli::report::{CheckStatus, Report};
use bellkit::cli::run_args;

fn main() {
    let (stdout, _, code) = run_args(["bellkit", "analyze", "paper"]);
    println!("analyze exited {code}\n{stdout}");

    let (stdout, stderr, code) = run_args(["bellkit", "--format", "json", "verify-paper"]);
    let report: Report = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stderr}"));
    let count = |s: CheckStatus| report.checks.iter().filter(|r| r.status == s).count();
    println!(
        "verify-paper exited {code}: {} pass, {} fail, {} info",
        count(CheckStatus::Pass),
        count(CheckStatus::Fail),
        count(CheckStatus::Info)
    );
}
