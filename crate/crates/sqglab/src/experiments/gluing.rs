//! Weak coupling of nested rings.
//!
//! Evolves the two-piece glued datum, the outer piece alone, and the inner
//! piece alone, and measures how far the joint evolution deviates from the
//! superposition of the separate ones:
//! `||theta_12(t) - theta_1(t) - theta_2(t)||_L2 / ||theta_2(0)||_L2`.
//! The P-fold symmetry forces the velocity of each ring to decay like
//! `r^(P-1)` toward the origin, so the rings barely feel each other. Inner
//! trajectories are integrated along the joint run and compared against the
//! contraction bound `exp(-int ||grad v||_inf)`.

use super::report::{CheckResult, ExperimentReport, Series};
use super::thresholds;
use crate::config::PresetSpec;
use crate::construction::{make_background, BackgroundParams, GluingSchedule};
use crate::cutoff::CutoffSpec;
use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::solver::{step_spectral, SolverConfig, VelocityMode};
use crate::spectral;
use crate::trajectories::TrajectoryIntegrator;
use std::time::Instant;

pub fn run_experiment(preset: &PresetSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = ExperimentReport::new("gluing", preset.name);
    let g = &preset.gluing;
    let grid = Grid::new(g.n, g.domain_length)?;
    let schedule = GluingSchedule::geometric(
        g.s,
        g.p_fold,
        g.eps_total,
        g.lambda_1,
        g.ratio,
        g.count,
    )?;
    for v in schedule.strict_condition_violations() {
        report
            .notes
            .push(format!("asymptotic schedule condition unmet at desk scale: {v}"));
    }

    let params: Vec<BackgroundParams> = schedule
        .pieces
        .iter()
        .map(|p| BackgroundParams::new(schedule.s, p.k_amp, schedule.p_fold, p.lambda, grid))
        .collect::<Result<_>>()?;
    let cutoff = CutoffSpec::Bump;
    let pieces: Vec<ScalarField> = params
        .iter()
        .map(|p| make_background(p, &cutoff, grid))
        .collect::<Result<_>>()?;
    let outer = &pieces[0];
    let inner = pieces.last().unwrap();
    let mut joint = ScalarField::zeros(grid);
    for p in &pieces {
        joint.axpy(1.0, p);
    }

    let inner_bp = params.last().unwrap();
    let sigma_inner = inner_bp.saddle_strength();
    let t_end = 0.5 / sigma_inner;
    let dt = super::auto_dt_from_state(&joint, t_end, 0.45, 7)?;
    let steps = (t_end / dt).round() as usize;
    let config = SolverConfig::new(dt, t_end, VelocityMode::Sqg);

    // seeds on the inner edge of the inner piece's support
    let (supp_lo, _) = inner_bp.support_band();
    let seeds: Vec<[f64; 2]> = (0..32)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 32.0;
            [supp_lo * a.cos(), supp_lo * a.sin()]
        })
        .collect();
    let mut traj = TrajectoryIntegrator::new(seeds);

    let inner_l2_0 = inner.l2_norm();
    let mut series = Series::new(&["t", "coupling_rel", "supp_ok", "grad_sup_integral"]);
    let mut j_hat = spectral::to_spectral(&joint)?;
    let mut o_hat = spectral::to_spectral(outer)?;
    let mut i_hat = spectral::to_spectral(inner)?;
    let mut t = 0.0;
    let mut coupling_worst: f64 = 0.0;
    let mut supports_ok = true;

    let support_check = |f: &ScalarField| -> bool {
        // every piece's mass stays within 1.5x of its band
        let thresh = 1e-10 * f.max_abs().max(1e-300);
        if let Some((rmin, rmax)) = f.support_radii(thresh) {
            let lo_limit = params
                .last()
                .map(|p| p.support_band().0 / thresholds::SUPPORT_MARGIN_FACTOR)
                .unwrap_or(0.0);
            let hi_limit = params[0].support_band().1 * thresholds::SUPPORT_MARGIN_FACTOR;
            rmin >= lo_limit && rmax <= hi_limit
        } else {
            true
        }
    };

    // Parseval: the coupling L2 comes straight from the coefficients
    let measure = |sj: &crate::field::SpectralField,
                   so: &crate::field::SpectralField,
                   si: &crate::field::SpectralField|
     -> f64 {
        let mut diff = sj.clone();
        diff.axpy(-1.0, so);
        diff.axpy(-1.0, si);
        crate::norms::sobolev_norm_spectral(&diff, 0.0, false) / inner_l2_0
    };

    let c0 = measure(&j_hat, &o_hat, &i_hat);
    series.push(vec![0.0, c0, 1.0, 0.0]);
    for _i in 1..=steps {
        let (j_next, v_joint) = step_spectral(&j_hat, &config, t)?;
        let (o_next, _) = step_spectral(&o_hat, &config, t)?;
        let (i_next, _) = step_spectral(&i_hat, &config, t)?;
        // grad sup of the joint velocity for the contraction bound
        let (vx_hat, vy_hat) = spectral::riesz_velocity_spectral(&j_hat)?;
        let gx = spectral::gradient_spectral(&vx_hat)?;
        let gy = spectral::gradient_spectral(&vy_hat)?;
        let grad_sup = gx
            .x
            .max_abs()
            .max(gx.y.max_abs())
            .max(gy.x.max_abs())
            .max(gy.y.max_abs());
        traj.advance(t, &v_joint, t + dt, grad_sup)?;
        j_hat = j_next;
        o_hat = o_next;
        i_hat = i_next;
        t += dt;
        let c = measure(&j_hat, &o_hat, &i_hat);
        coupling_worst = coupling_worst.max(c);
        let ok = support_check(&crate::spectral::to_physical(&j_hat));
        supports_ok &= ok;
        series.push(vec![
            t,
            c,
            if ok { 1.0 } else { 0.0 },
            *traj.set().grad_sup_integral.last().unwrap(),
        ]);
    }

    report.checks.push(CheckResult::le(
        "inter_ring_coupling_rel",
        coupling_worst,
        thresholds::GLUING_COUPLING_REL,
    ));
    report.checks.push(CheckResult::ge(
        "supports_within_bands",
        if supports_ok { 1.0 } else { 0.0 },
        1.0,
    ));

    let set = traj.finish();
    let ratio = set.min_radius_ratio();
    let bound = set.approach_bound();
    report.checks.push(CheckResult::ge(
        "approach_bound_margin",
        ratio - (bound - thresholds::APPROACH_BOUND_SLACK),
        0.0,
    ));
    report.notes.push(format!(
        "min |phi(x,t)|/|x| = {ratio:.6} vs contraction bound exp(-int ||grad v||) = {bound:.6}"
    ));
    report.notes.push(format!(
        "lambda ratio {} (K_j = {:?})",
        g.ratio,
        schedule.pieces.iter().map(|p| p.k_amp).collect::<Vec<_>>()
    ));

    report.series = series;
    report.params = serde_json::json!({
        "schedule": schedule, "n": grid.n(), "dt": dt, "t_end": t_end,
    });
    report.window = (0.0, t);
    report.settle_verdict(false);
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
