//! Eve's SNR is capped by alpha/(1-alpha), so a small enough split leaves her
//! below the rate gap no matter how good her channel is.

use an_wiretap::analytic::{eve_snr_ceiling, exp2_m1, perfect_secrecy_alpha, secrecy_outage, TxDesign};
use an_wiretap::channel::SystemParams;

fn main() -> an_wiretap::error::Result<()> {
    // a nearly noiseless eavesdropper
    let params = SystemParams::new(10.0, 10.0, 0.1, 0.1, 1e-6);
    for (r_b, r_s) in [(1.5, 1.0), (2.0, 1.0), (4.0, 1.0)] {
        let floor = perfect_secrecy_alpha(r_b, r_s);
        println!("r_b={r_b} r_s={r_s}: perfect secrecy for alpha <= {floor:.4}");
        for alpha in [floor, floor + 0.01, (floor + 0.1).min(1.0)] {
            let d = TxDesign::new(alpha, r_b, r_s)?;
            println!(
                "  alpha={alpha:.4}  Eve ceiling {:.4} vs needed {:.4}  p_so={:.3e}",
                eve_snr_ceiling(alpha),
                exp2_m1(r_b - r_s),
                secrecy_outage(&params, &d)?
            );
        }
    }
    Ok(())
}
