//! Build the oscillatory initial data at a chosen preset and print the
//! resolved scales: the inner frequency from the scale relation, the
//! lattice-rounded oscillation, amplitudes and annuli.
//!
//! Usage: cargo run --release --example generate_datum [small|medium]

use sqglab::config::preset_by_name;
use sqglab::construction::{make_background, make_perturbation, BackgroundParams};
use sqglab::cutoff::CutoffSpec;
use sqglab::grid::Grid;
use sqglab::norms;

fn main() -> sqglab::Result<()> {
    let preset_name = std::env::args().nth(1).unwrap_or_else(|| "small".into());
    let preset = preset_by_name(&preset_name)?;
    let bgp = &preset.background;
    let grid = Grid::new(bgp.n, bgp.domain_length)?;
    let bg = BackgroundParams::new(bgp.s, bgp.k_amp, bgp.p_fold, bgp.lambda, grid)?;
    println!("background ({preset_name}):");
    println!("  lambda={:.4} N={:.4} (scale-relation residual {:.1e})", bg.lambda, bg.n_inner, bg.scale_relation_residual());
    println!("  oscillation index {} (freq {:.3}), amplitude {:.4e}", bg.osc_index, bg.osc, bg.amplitude());
    println!("  annulus {:?}, saddle strength log(N)/sqrt2 = {:.4}", bg.annulus(), bg.saddle_strength());
    let field = make_background(&bg, &CutoffSpec::Bump, grid)?;
    let hs = norms::sobolev_norm(&field, bg.s, true)?;
    println!("  |phi|_Hs(hom) = {:.4e} (P^1/2 / K = {:.4e})", hs, (bg.p_fold as f64).sqrt() / bg.k_amp);

    let (igrid, ibg, pert) = preset.inflation.build()?;
    println!("perturbation block:");
    println!("  lambda={:.4} N={:.4}; lambda~={:.4} N~={:.4} B={:.4}", ibg.lambda, ibg.n_inner, pert.lambda_tilde, pert.n_tilde, pert.b_exponent);
    println!("  oscillation index {} on n={} (L={})", pert.osc_index, igrid.n(), igrid.domain_length());
    let psi = make_perturbation(&ibg, &pert, &CutoffSpec::Bump, igrid)?;
    println!("  |psi(0)|_sup = {:.4e} (amplitude {:.4e})", psi.max_abs(), pert.amplitude());
    Ok(())
}
