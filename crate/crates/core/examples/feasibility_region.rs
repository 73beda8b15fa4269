//! Smallest achievable connection outage for each secrecy cap.

use an_wiretap::channel::SystemParams;
use an_wiretap::design::feasibility;

fn main() -> an_wiretap::error::Result<()> {
    for sigma2_e in [0.01, 0.1, 1.0] {
        let params = SystemParams::new(10.0, 10.0, 0.0, 0.1, sigma2_e);
        print!("sigma2_e={sigma2_e:<5}");
        for eps in [0.0, 1e-3, 0.01, 0.1, 0.5] {
            print!("  delta_l({eps})={:.4}", feasibility(&params, eps)?.delta_l);
        }
        println!();
    }
    Ok(())
}
