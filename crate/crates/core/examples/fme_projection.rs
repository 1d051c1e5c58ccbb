// Exact Fourier–Motzkin projection of the six-row MAC rate region.

use icb::fme::{eliminate_sequence, mac_system_from_channel, max_sum_rate, to_f64, LinearSystem, Pruning};
use icb::model::{lower_bound_sum_rate, mac_sum_rate_closed_form};
use icb::{ChannelParams, PowerAllocation};

const REGION: &str = "\
# a = d = 1, b = e = 2, c = f = 5/2
R0 <= 1
R1 <= 2
R0 + R1 <= 5/2
R0 <= 1
R2 <= 2
R0 + R2 <= 5/2
";

pub fn run_example() -> icb::Result<()> {
    let sys: LinearSystem = REGION.parse()?;
    let proj = eliminate_sequence(&sys, &["R0"], Pruning::default())?;
    println!("projection onto (R1, R2), {} redundant rows dropped:\n{}", proj.redundant_removed, proj.system);
    let best = max_sum_rate(&sys, &["R0", "R1", "R2"])?;
    println!("max R0 + R1 + R2 = {:?}", best.value().map(|v| v.to_string()));
    let with_signs = max_sum_rate(&sys.with_nonnegativity(), &["R0", "R1", "R2"])?;
    println!("with R >= 0      = {:?}", with_signs.value().map(|v| v.to_string()));

    let ch = ChannelParams::new(10.0, 0.1)?;
    for p0 in [0.0, 2.5, 10.0] {
        let alloc = PowerAllocation::symmetric(&ch, p0)?;
        let exact = max_sum_rate(&mac_system_from_channel(&ch, &alloc)?, &["R0", "R1", "R2"])?;
        let mac = mac_sum_rate_closed_form(&ch, &alloc)?;
        println!(
            "P0 = {p0:>4}: elimination {:.12}  candidates {:.12}  inner bound {:.12}",
            exact.value().map_or(f64::NAN, to_f64),
            mac.sum_rate(),
            lower_bound_sum_rate(&ch, p0)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
