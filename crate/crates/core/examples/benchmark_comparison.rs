//! AN design against the on-off benchmark that transmits only when Bob's
//! channel is good, across secrecy caps.

use an_wiretap::channel::SystemParams;
use an_wiretap::design::{joint_design, OutageConstraints};
use an_wiretap::sim::{optimize_benchmark, BenchmarkSearch};

fn main() -> an_wiretap::error::Result<()> {
    let params = SystemParams::new(10.0, 10.0, 0.0, 0.1, 0.1);
    let search = BenchmarkSearch::default();
    println!("{:>8} {:>10} {:>10}", "epsilon", "eta_an", "eta_onoff");
    for eps in [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.3] {
        let c = OutageConstraints::new(eps, 0.1)?;
        let an = joint_design(&params, &c)?;
        let bench = optimize_benchmark(&params, &c, &search)?;
        println!("{eps:>8} {:>10.4} {:>10.4}", an.eta, bench.eta);
    }
    Ok(())
}
