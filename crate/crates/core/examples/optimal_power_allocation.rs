//! Largest power split meeting a secrecy cap, for fixed rates.

use an_wiretap::analytic::{secrecy_outage, TxDesign};
use an_wiretap::channel::SystemParams;
use an_wiretap::design::{optimal_alpha, secrecy_factor};

fn main() -> an_wiretap::error::Result<()> {
    let params = SystemParams::new(10.0, 10.0, 0.0, 0.1, 0.1);
    let (r_b, r_s) = (2.0, 1.0);
    for eps in [0.0, 1e-4, 1e-2, 0.1, 0.5, 1.0] {
        let alpha = optimal_alpha(&params, r_b, r_s, eps)?;
        let p_so = secrecy_outage(&params, &TxDesign::new(alpha, r_b, r_s)?)?;
        println!(
            "eps={eps:<7} factor={:<10.4} alpha={alpha:.4} p_so={p_so:.3e}",
            secrecy_factor(&params, eps)
        );
    }
    Ok(())
}
