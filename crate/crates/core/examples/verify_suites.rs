// Reduced-size runs of the randomized property suites.

use icb::verify::{run_suite, Suite, VerifyScale};

pub fn run_example() -> icb::Result<()> {
    let scale = VerifyScale::smoke();
    let mut failed = 0;
    for suite in [Suite::Identities, Suite::Regions, Suite::Optimizer, Suite::Fme] {
        println!("{suite:?}");
        for r in run_suite(suite, 7, &scale) {
            println!("  {r}");
            failed += usize::from(!r.passed());
        }
    }
    if failed > 0 {
        return Err(icb::Error::Config(format!("{failed} properties failed")));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
