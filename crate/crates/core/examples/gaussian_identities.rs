// Closed forms against log-det mutual information on the jointly Gaussian model.

use icb::gaussian::{build_model, genie_gap, genie_objective_via_mi, inner_bound_via_mi, markov_check, mc_entropy_check};
use icb::gaussian::Signal::*;
use icb::model::genie_objective;
use icb::{ChannelParams, GenieParams, PowerAllocation};

pub fn run_example() -> icb::Result<()> {
    let ch = ChannelParams::new(10.0, 0.1)?;
    let alloc = PowerAllocation::symmetric(&ch, 0.0)?;

    for (label, gp) in [("smart genie", GenieParams::symmetric(0.5, 0.0242)), ("independent genie", GenieParams::symmetric(0.0, 0.2))] {
        let model = build_model(&ch, &alloc, &gp)?;
        let f = genie_objective(&ch, &alloc, &gp)?;
        println!("{label}:");
        println!("  f closed form   {f:.12}");
        println!("  f via log-det   {:.12}", genie_objective_via_mi(&model)?);
        println!("  inner bound     {:.12}", inner_bound_via_mi(&model)?);
        println!("  genie gap       {:.3e}", genie_gap(&model)?);
        let mc = markov_check(&model, &[X11], &[Y1Private], &[U1Private])?;
        println!("  X11 - U1' - Y1' Markov: {} (residual {:.2e})", mc.holds, mc.residual);
    }

    let model = build_model(&ch, &alloc, &GenieParams::symmetric(0.5, 0.0242))?;
    let est = mc_entropy_check(&model, &[Y1, U1], 100_000, 3)?;
    println!("h(Y1, U1): closed form {:.5}, Monte Carlo {:.5} ± {:.5}", est.closed_form, est.estimate, est.std_error);
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
