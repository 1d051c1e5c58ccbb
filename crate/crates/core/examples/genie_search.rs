// The inner minimisation over genie parameters at one power split, checked
// against an exhaustive grid.

use icb::genie::{brute_force_oracle, inner_min_g, upper_bound_sum_capacity};
use icb::model::lower_bound_sum_rate;
use icb::{ChannelParams, OptimizerConfig, PowerAllocation};

pub fn run_example() -> icb::Result<()> {
    let ch = ChannelParams::new(10.0, 0.1)?;
    let alloc = PowerAllocation::symmetric(&ch, 0.0)?;
    let cfg = OptimizerConfig::default();

    let cert = inner_min_g(&ch, &alloc, &cfg).expect("useful genies exist at this point");
    let g = cert.gp;
    println!("g(P1 = P2 = 10)       = {:.10} bits", cert.value_bits);
    println!("inner bound R(P0 = 0) = {:.10} bits", lower_bound_sum_rate(&ch, 0.0)?);
    println!("minimiser: a1^2 = {:.4}, a2^2 = {:.4}, v1 = {:.5}, v2 = {:.5}", g.a1_sq, g.a2_sq, g.v1, g.v2);
    // The minimiser is not unique; every one of them satisfies a·√v = c(1 + c²P).
    println!("a1·√v1 = {:.6}, a2·√v2 = {:.6}, c(1+c²P) = {:.6}", g.a1() * g.v1.sqrt(), g.a2() * g.v2.sqrt(), 0.1 * 1.1);

    let grid = brute_force_oracle(&ch, &alloc, 17).expect("grid has feasible points");
    println!("17^4 grid minimum     = {:.10} bits", grid.value);

    let up = upper_bound_sum_capacity(&ch, &OptimizerConfig { outer_grid_points: 33, ..cfg });
    println!("outer bound           = {:.10} bits at P1 = {:?}", up.upper_bits, up.argmax_private);
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
