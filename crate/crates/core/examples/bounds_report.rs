// Inner and outer sum-rate bounds at a few channels, one inside the
// low-interference regime, one outside it and one with a vacuous genie bound.

use icb::sweep::{bounds_report, format_report, BoundsOptions};
use icb::ChannelParams;

pub fn run_example() -> icb::Result<()> {
    let opts = BoundsOptions::default();
    for (p, c) in [(10.0, 0.1), (1.0, 0.45), (10.0, 2.0)] {
        let report = bounds_report(&ChannelParams::new(p, c)?, &opts)?;
        println!("{}", format_report(&report));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
