//! KL divergences and asymptotic rates for the three-hypothesis Gaussian
//! family, plus the likelihood bound of the bundled discrete family.

use pbnet::analysis::theoretical_rate;
use pbnet::fixtures::{discrete_family, gaussian_family, GAUSSIAN_MEANS};
use pbnet::MixtureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = gaussian_family();
    println!("unit-variance Gaussians at means {GAUSSIAN_MEANS:?}, true hypothesis 1\n");
    println!(
        "{:>4} {:>14} {:>14} {:>10}",
        "tx", "D(L1||L_tx)", "D(L1||P(txc))", "rate"
    );
    for tx in 0..3 {
        let to_tx = model.kl_divergence(0, tx)?;
        let to_mixture = model.kl_divergence(0, MixtureSpec::uniform_complement(3, tx)?)?;
        let rate = theoretical_rate(&model, 0, tx)?;
        println!("{:>4} {to_tx:>14.6} {to_mixture:>14.6} {rate:>10.6}", tx + 1);
    }

    let discrete = discrete_family();
    println!();
    for excluded in 0..3 {
        println!(
            "discrete family: M with hypothesis {} excluded = {:.6}",
            excluded + 1,
            discrete.likelihood_bound(excluded)?
        );
    }
    Ok(())
}
