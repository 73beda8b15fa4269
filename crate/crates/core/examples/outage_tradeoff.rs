//! Secrecy and connection outage as the power split moves from AN to signal.

use an_wiretap::analytic::{evaluate, TxDesign};
use an_wiretap::channel::SystemParams;

fn main() -> an_wiretap::error::Result<()> {
    let params = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
    println!("{:>6} {:>12} {:>12} {:>8}", "alpha", "p_so", "p_co", "eta");
    for k in 1..=20 {
        let alpha = k as f64 / 20.0;
        let r = evaluate(&params, &TxDesign::new(alpha, 2.0, 1.0)?)?;
        println!("{alpha:>6.2} {:>12.4e} {:>12.4e} {:>8.4}", r.p_so, r.p_co, r.eta);
    }
    Ok(())
}
