//! Seeded Monte Carlo against the closed forms.

use an_wiretap::analytic::{evaluate, TxDesign};
use an_wiretap::channel::{RngSpec, SystemParams};
use an_wiretap::sim::{simulate_outage, SimConfig};

fn main() -> an_wiretap::error::Result<()> {
    let params = SystemParams::new(10.0, 10.0, 0.1, 0.1, 0.1);
    let sim = SimConfig::fading(1_000_000, RngSpec::new(2024, 64)?)?;
    for alpha in [0.3, 0.6, 0.9] {
        let d = TxDesign::new(alpha, 2.0, 1.0)?;
        let exact = evaluate(&params, &d)?;
        let mc = simulate_outage(&params, &d, &sim)?;
        println!(
            "alpha={alpha}: p_so {:.5} (mc {:.5} +- {:.1e})  p_co {:.5} (mc {:.5} +- {:.1e})",
            exact.p_so, mc.p_so_hat, mc.se_so, exact.p_co, mc.p_co_hat, mc.se_co
        );
    }
    Ok(())
}
