// A small (P, c) sweep written as CSV. Rows come out in the same order for
// any worker count.

use icb::sweep::{sweep_csv, BoundsOptions, SweepConfig};
use icb::OptimizerConfig;

pub fn run_example() -> icb::Result<()> {
    let cfg = SweepConfig {
        p_min: 1.0,
        p_max: 20.0,
        p_steps: 3,
        c_min: 0.05,
        c_max: 0.3,
        c_steps: 3,
        bounds: BoundsOptions {
            optimizer: OptimizerConfig { outer_grid_points: 17, inner_multistarts: 8, seed: 5, ..Default::default() },
            ..Default::default()
        },
        out: None,
    };
    let one = sweep_csv(&cfg, 1)?;
    let four = sweep_csv(&cfg, 4)?;
    assert_eq!(one, four);
    print!("{one}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
