// ASCII map of the two closed-form regimes over a (P, c) grid, plus the
// boundary power of the decreasing regime and the slope of the inner bound.

use icb::regimes::{gamma_a_gain_limit, gamma_b_boundary_power, in_gamma_a, in_gamma_b, sum_rate_derivative};
use icb::ChannelParams;

pub fn run_example() -> icb::Result<()> {
    println!("A: bounds provably match   B: zero common power optimal   .: neither");
    let powers: Vec<f64> = (0..=12).map(|i| 0.5 * 1.5f64.powi(i)).collect();
    for row in (0..12).rev() {
        let c = 0.02 + 0.02 * row as f64;
        let line: String = powers
            .iter()
            .map(|&p| {
                let ch = ChannelParams { power: p, gain: c };
                match (in_gamma_a(&ch), in_gamma_b(&ch)) {
                    (true, _) => 'A',
                    (false, true) => 'B',
                    _ => '.',
                }
            })
            .collect();
        println!("c = {c:.2}  {line}");
    }
    println!("           P from 0.5 to {:.0}, geometric", powers[powers.len() - 1]);

    for c in [0.05, 0.1, 0.2] {
        let pb = gamma_b_boundary_power(c).map_or("none".into(), |p| format!("{p:.3}"));
        println!("c = {c}: decreasing regime up to P = {pb}");
    }
    for p in [1.0, 10.0, 50.0] {
        println!("P = {p}: matching regime for c <= {:.5}", gamma_a_gain_limit(p));
    }

    let ch = ChannelParams::new(10.0, 0.1)?;
    let slope = sum_rate_derivative(&ch, 0.0)?;
    let a = slope.anatomy;
    println!("dR/dP0 at P0 = 0: {:.6} bits per unit power", slope.value);
    println!("poles {:.3}, {:.3}, {:.3}; zero at {:.3}", a.p1, a.p2, a.p3, a.z1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> icb::Result<()> {
    run_example()
}
