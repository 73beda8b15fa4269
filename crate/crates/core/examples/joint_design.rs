//! Throughput-optimal rates and split under both outage caps: closed form
//! when Alice's receiver is noiseless, refined grid search otherwise.

use an_wiretap::channel::SystemParams;
use an_wiretap::design::{optimize, GridRefinement, OutageConstraints};

fn main() -> an_wiretap::error::Result<()> {
    let c = OutageConstraints::new(0.1, 0.1)?;
    for sigma2_a in [0.0, 0.1] {
        let params = SystemParams::new(10.0, 10.0, sigma2_a, 0.1, 0.1);
        let sol = optimize(&params, &c, &GridRefinement::default())?;
        let Some(d) = sol.design else {
            println!("sigma2_a={sigma2_a}: infeasible");
            continue;
        };
        println!(
            "sigma2_a={sigma2_a}: alpha={:.4} r_b={:.4} r_s={:.4} eta={:.4} p_so={:.4} p_co={:.4} binding={} branch={}",
            d.alpha,
            d.r_b,
            d.r_s,
            sol.eta,
            sol.p_so,
            sol.p_co,
            sol.binding.label(),
            sol.aux.map_or("grid", |a| a.branch.as_str())
        );
    }
    Ok(())
}
