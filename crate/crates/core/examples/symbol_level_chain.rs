//! Full complex signal chain: Bob's AN, Alice's forwarding, Bob's
//! cancellation and Eve's interference, measured symbol by symbol.

use an_wiretap::analytic::TxDesign;
use an_wiretap::channel::{RngSpec, SystemParams};
use an_wiretap::sim::{simulate_symbol_level, Normalization, SimConfig};

fn main() -> an_wiretap::error::Result<()> {
    let d = TxDesign::new(0.7, 2.0, 1.0)?;
    let sim = SimConfig::symbol_level(500, 2000, RngSpec::new(11, 16)?)?;
    for sigma2_a in [0.0, 0.1] {
        let params = SystemParams::new(10.0, 10.0, sigma2_a, 0.1, 0.1);
        for norm in [Normalization::ExpectedPower, Normalization::PerSymbol] {
            let r = simulate_symbol_level(&params, &d, &sim, norm)?;
            println!(
                "sigma2_a={sigma2_a} {norm:?}: measured/model SNR bob {:.4} eve {:.4}, max AN correlation {:.3}",
                r.snr_ratio_bob, r.snr_ratio_eve, r.max_z_correlation
            );
        }
    }
    Ok(())
}
