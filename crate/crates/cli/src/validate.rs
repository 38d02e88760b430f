use std::io::Write;

use serde_json::json;

use lis_crlb::validation::run_all;

use crate::context::Context;
use crate::table::open_output;

/// Runs every check, writes the JSON report and returns whether all passed.
pub fn validate(ctx: &Context) -> anyhow::Result<bool> {
    let outcomes = run_all(&ctx.spec);
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let report = json!({
        "passed": passed,
        "failed": outcomes.len() - passed,
        "rel_tol": ctx.spec.rel_tol,
        "criteria": outcomes,
    });
    let mut out = open_output(&ctx.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(passed == outcomes.len())
}
