// temporary diagnostic probe; removed before release
use sqglab::config::preset_by_name;
use sqglab::construction::{make_background, make_perturbation, raw_oscillator, BackgroundParams};
use sqglab::cutoff::CutoffSpec;
use sqglab::field::SpectralField;
use sqglab::grid::Grid;
use sqglab::norms;
use sqglab::saddle::{find_stagnation_point, SpectralVelocity};
use sqglab::solver::{step_spectral, AffineVelocity, SolverConfig, VelocityMode};
use sqglab::spectral;

fn main() -> sqglab::Result<()> {
    let which = std::env::args().nth(1).unwrap_or_else(|| "oracle".into());
    match which.as_str() {
        "oracle" => oracle_check(),
        "headline" => headline_strain(),
        "window" => window_check(),
        "spectrum" => spectrum_check(),
        _ => Ok(()),
    }
}

fn oracle_check() -> sqglab::Result<()> {
    let preset = preset_by_name("medium")?;
    let (_, _, pert) = preset.inflation.build_probe()?;
    let sigma0 = 0.6393;
    let ogrid = Grid::new(256, 2.5)?;
    let psi = raw_oscillator(
        ogrid,
        &CutoffSpec::Bump,
        pert.lambda_tilde,
        pert.osc,
        pert.amplitude(),
        [0.0, 0.0],
        false,
    );
    let mut aff = AffineVelocity::saddle(sigma0);
    aff.taper_start = 0.6;
    let hat0 = spectral::to_spectral(&psi)?;
    let analytic = |t: f64, beta: f64| -> f64 {
        let g = hat0.grid();
        let n = g.n();
        let base2 = g.k_base() * g.k_base();
        let area = g.domain_length() * g.domain_length();
        let (ex, sh) = ((sigma0 * t).exp(), (-sigma0 * t).exp());
        let mut acc = 0.0;
        for iy in 0..n {
            let ky = g.freq_index(iy) as f64;
            for ix in 0..n {
                let kx = g.freq_index(ix) as f64;
                if kx == 0.0 && ky == 0.0 {
                    continue;
                }
                let k2 = (ex * kx * ex * kx + sh * ky * sh * ky) * base2;
                acc += k2.powf(beta) * hat0.coeffs()[iy * n + ix].norm_sqr();
            }
        }
        (acc * area).sqrt()
    };
    let t_end = 2.0;
    let dt = 0.005;
    let cfg = SolverConfig::new(dt, t_end, VelocityMode::Prescribed(aff));
    let mut hat = hat0.clone();
    let mut t = 0.0;
    let steps = (t_end / dt) as usize;
    for i in 1..=steps {
        let (next, _) = step_spectral(&hat, &cfg, t)?;
        hat = next;
        t += dt;
        if i % (steps / 8) == 0 {
            let h1 = norms::sobolev_norm_spectral(&hat, 1.0, true);
            let h2 = norms::sobolev_norm_spectral(&hat, 2.0, true);
            println!(
                "t={t:.3}: h1 sim {h1:.6e} exact {:.6e} (ratio {:.4}); h2 sim {h2:.6e} exact {:.6e} (ratio {:.4})",
                analytic(t, 1.0),
                h1 / analytic(t, 1.0),
                analytic(t, 2.0),
                h2 / analytic(t, 2.0),
            );
        }
    }
    Ok(())
}

fn headline_strain() -> sqglab::Result<()> {
    for (name, nn) in [("small", 512usize), ("small", 1024), ("small", 2048), ("medium", 2048), ("medium", 4096)] {
        let preset = preset_by_name(name)?;
        let b = &preset.background;
        let grid = Grid::new(nn, b.domain_length)?;
        let bg = BackgroundParams::new(b.s, b.k_amp, b.p_fold, b.lambda, grid)?;
        let z = bg.center_offset();
        // full arrangement vs single piece, both with compact cutoff
        let full = make_background(&bg, &CutoffSpec::Bump, grid)?;
        let single = raw_oscillator(
            grid,
            &CutoffSpec::Bump,
            bg.lambda,
            bg.osc,
            bg.amplitude(),
            z,
            true,
        );
        let _ = full;
        for (label, f) in [("single", &single)] {
            let hat = spectral::to_spectral(f)?;
            let sv = SpectralVelocity::from_theta_hat(&hat)?;
            match find_stagnation_point(&sv, z, bg.lambda.powf(-0.5) / 4.0, 0.0) {
                Ok(p) => {
                    let g = sv.grad(p);
                    let sigma = 0.5 * (g[0][0].abs() + g[1][1].abs());
                    println!(
                        "{name}/n={}{label}: d11={:.4} d22={:.4} sigma={:.4} target={:.4} rel={:.3}",
                        grid.n(), g[0][0], g[1][1], sigma, bg.saddle_strength(),
                        (sigma - bg.saddle_strength()).abs() / bg.saddle_strength()
                    );
                }
                Err(e) => println!("{name}/{label}: {e}"),
            }
        }
    }
    Ok(())
}

fn spectrum_check() -> sqglab::Result<()> {
    let preset = preset_by_name("medium")?;
    let (grid, bg, pert) = preset.inflation.build_probe()?;
    let cutoff = CutoffSpec::Bump;
    let psi0 = make_perturbation(&bg, &pert, &cutoff, grid)?;
    let single = raw_oscillator(grid, &cutoff, pert.lambda_tilde, pert.osc, pert.amplitude(), bg.center_offset(), false);
    for (name, f) in [("pfold", &psi0), ("single", &single)] {
        let hat = spectral::to_spectral(f)?;
        let n = grid.n();
        // ring-mass profile (max |coeff| per ring)
        let mut ring_max = vec![0.0f64; n / 2 + 1];
        for iy in 0..n {
            let ky = hat.grid().freq_index(iy);
            for ix in 0..n {
                let kx = hat.grid().freq_index(ix);
                let ring = kx.abs().max(ky.abs()) as usize;
                if ring <= n / 2 {
                    let c = hat.coeffs()[iy * n + ix].norm();
                    if c > ring_max[ring] {
                        ring_max[ring] = c;
                    }
                }
            }
        }
        let peak = ring_max.iter().cloned().fold(0.0f64, f64::max);
        print!("{name}: peak {peak:.2e} | ring max/peak at k=");
        for k in [60, 116, 200, 300, 400, 500, 600, 682, 800, 1000] {
            print!(" {k}:{:.1e}", ring_max[k] / peak);
        }
        println!();
        println!(
            "  k50(L2)={} k90(L2)={} k50(H2)={} k90(H2)={}",
            spectral::spectral_radius(&hat, 0.0, 0.5),
            spectral::spectral_radius(&hat, 0.0, 0.9),
            spectral::spectral_radius(&hat, 2.0, 0.5),
            spectral::spectral_radius(&hat, 2.0, 0.9)
        );
    }
    Ok(())
}

fn window_check() -> sqglab::Result<()> {
    let preset = preset_by_name("medium")?;
    let (grid, bg, pert) = preset.inflation.build_probe()?;
    let cutoff = CutoffSpec::Bump;
    let phi0 = make_background(&bg, &cutoff, grid)?;
    let psi0 = make_perturbation(&bg, &pert, &cutoff, grid)?;
    let theta0 = phi0.add(&psi0);
    let dt = 0.05;
    let cfg = SolverConfig::new(dt, 2.0, VelocityMode::Sqg);
    let mut th = spectral::to_spectral(&theta0)?;
    let mut ph = spectral::to_spectral(&phi0)?;
    let mut t = 0.0;
    let radius = |hat: &SpectralField, frac: f64| spectral::spectral_radius(hat, 2.0, frac);
    for i in 1..=20 {
        let (tn, _) = step_spectral(&th, &cfg, t)?;
        let (pn, _) = step_spectral(&ph, &cfg, t)?;
        th = tn;
        ph = pn;
        t += dt;
        if i % 2 == 0 {
            let psi = th.sub(&ph);
            println!(
                "t={t:.2}: psi k50={} k90={} k99={}; h2={:.4e}; bg k90={}",
                radius(&psi, 0.5),
                radius(&psi, 0.9),
                radius(&psi, 0.99),
                norms::sobolev_norm_spectral(&psi, 2.0, true),
                radius(&ph, 0.9),
            );
        }
    }
    Ok(())
}
