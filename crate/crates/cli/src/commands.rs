use std::path::Path;

use anyhow::{anyhow, Result};
use clap::ValueEnum;
use serde_json::json;

use catodyne_core::asymptotics::{convergence_metric, log_log_slope};
use catodyne_core::exactclicks::{amp_cat_lo, amp_coherent_lo, joint_distribution};
use catodyne_core::format::{sig17, write_csv};
use catodyne_core::oracle::amplitude_bruteforce;
use catodyne_core::remoteprep::{prob_q, remote_wavefunction};
use catodyne_core::states::{choose_cutoff, DEFAULT_TAIL_TOL};
use catodyne_core::sumdiff::{parity_report, to_sumdiff};
use catodyne_core::{
    AsymptoticDensity, CatParity, DensityKind, Error, GridSpec, LoKind, LocalOscillator, RemoteOutcome, SqueezingParam,
};

use crate::manifest::{emit, RunManifest};
use crate::{
    AsymptoteArgs, Cli, Command, DistArgs, KindArg, LoKindArg, PrqArgs, RemotePrepArgs, Squeezing, SweepArgs,
    VerifyArgs,
};

/// Raised when `verify` finds a deviation above tolerance.
#[derive(Debug)]
struct VerifyFailed(f64, f64);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "max deviation {:e} exceeds tolerance {:e}", self.0, self.1)
    }
}

impl std::error::Error for VerifyFailed {}

/// 1 for truncation problems and failed verification, 2 for inputs the
/// library rejects.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Truncation { .. } | Error::Cutoff { .. }) => 1,
        Some(_) => 2,
        None => 1,
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Clicks(a) => clicks(out, a),
        Command::Sumdiff(a) => sumdiff(out, a),
        Command::Asymptote(a) => asymptote(out, a),
        Command::RemotePrep(a) => remote_prep(out, a),
        Command::Prq(a) => prq(out, a),
        Command::Sweep(a) => sweep(out, a),
        Command::Verify(a) => verify(out, a),
    }
}

fn dist_params(a: &DistArgs) -> serde_json::Value {
    json!({
        "lo": a.lo.to_string(),
        "signal": a.signal.to_string(),
        "n_max": a.n_max,
        "eta": a.eta,
    })
}

fn clicks(out: &Path, a: &DistArgs) -> Result<()> {
    let joint = joint_distribution(&a.lo, &a.signal, a.n_max, a.eta)?;
    let manifest = RunManifest::new("clicks", dist_params(a))
        .truncation(joint.n_max(), joint.tail_bound(), joint.eta())
        .results(json!({ "total_mass": joint.total_mass() }));
    emit(out, "clicks.csv", &manifest, |w| joint.write_csv(w))?;
    println!(
        "n_max={} tail_bound={:e} total_mass={}",
        joint.n_max(),
        joint.tail_bound(),
        joint.total_mass()
    );
    Ok(())
}

fn sumdiff(out: &Path, a: &DistArgs) -> Result<()> {
    let joint = joint_distribution(&a.lo, &a.signal, a.n_max, a.eta)?;
    let sd = to_sumdiff(&joint)?;
    let report = parity_report(&sd, a.signal.parity());
    let manifest = RunManifest::new("sumdiff", dist_params(a))
        .truncation(joint.n_max(), joint.tail_bound(), joint.eta())
        .results(json!({ "scale": sd.scale(), "parity": report }));
    emit(out, "sumdiff.csv", &manifest, |w| sd.write_csv(w))?;
    emit(out, "sumdiff_x.csv", &manifest, |w| sd.write_marginal_x(w))?;
    emit(out, "sumdiff_w.csv", &manifest, |w| sd.write_marginal_w(w))?;
    println!(
        "d even/odd: {:e} / {:e}; s even/odd: {:e} / {:e}",
        report.d_even, report.d_odd, report.s_even, report.s_odd
    );
    if let (Some(r), Some(m)) = (report.suppressed_s_residue, report.suppressed_mass) {
        println!("suppressed class s ≡ {r} (mod 2) carries {m:e}");
    }
    Ok(())
}

fn asymptote(out: &Path, a: &AsymptoteArgs) -> Result<()> {
    if a.points < 2 || !(a.x_max > a.x_min) {
        return Err(Error::InvalidParameter("need x_min < x_max and at least 2 points".into()).into());
    }
    let kind = match a.kind {
        KindArg::Projector => DensityKind::Projector,
        KindArg::Reflection => DensityKind::ReflectionSymmetric,
    };
    let dens = AsymptoticDensity::new(kind, a.theta, a.signal.clone());
    let manifest = RunManifest::new(
        "asymptote",
        json!({
            "kind": dens.kind,
            "theta": a.theta,
            "signal": a.signal.to_string(),
            "x_min": a.x_min,
            "x_max": a.x_max,
            "points": a.points,
        }),
    );
    emit(out, "asymptote.csv", &manifest, |w| {
        dens.write_grid(w, a.x_min, a.x_max, a.points)
    })?;
    Ok(())
}

fn squeezing(s: &Squeezing) -> Result<SqueezingParam> {
    Ok(match (s.r, s.r_db) {
        (Some(r), _) => SqueezingParam::new(r)?,
        (None, Some(db)) => SqueezingParam::from_db(db)?,
        (None, None) => return Err(anyhow!("one of --r or --r-db is required")),
    })
}

fn remote_prep(out: &Path, a: &RemotePrepArgs) -> Result<()> {
    let r = squeezing(&a.squeezing)?;
    let outcome = RemoteOutcome {
        q: a.q,
        parity: a.parity,
    };
    let grid = match (a.x_min, a.x_max, a.step) {
        (Some(min), Some(max), Some(step)) => GridSpec { min, max, step },
        _ => GridSpec::default_for(&outcome, r),
    };
    let wf = remote_wavefunction(&outcome, r, &grid)?;
    let manifest = RunManifest::new(
        "remote-prep",
        json!({
            "q": a.q,
            "parity": a.parity.to_string(),
            "r": r.r(),
            "r_db": r.db(),
            "grid": grid,
        }),
    )
    .results(json!({ "norm": wf.norm() }));
    emit(out, "remote_prep.csv", &manifest, |w| wf.write_csv(w))?;
    println!("norm={}", wf.norm());
    Ok(())
}

fn prq(out: &Path, a: &PrqArgs) -> Result<()> {
    let r = squeezing(&a.squeezing)?;
    if a.points < 2 || !(a.q_max > 0.0) {
        return Err(Error::InvalidParameter("need q_max > 0 and at least 2 points".into()).into());
    }
    let step = 2.0 * a.q_max / (a.points - 1) as f64;
    let manifest = RunManifest::new(
        "prq",
        json!({ "r": r.r(), "r_db": r.db(), "q_max": a.q_max, "points": a.points }),
    );
    emit(out, "prq.csv", &manifest, |w| {
        write_csv(
            w,
            &["q", "prob"],
            (0..a.points).map(|i| {
                let q = -a.q_max + i as f64 * step;
                [sig17(q), sig17(prob_q(q, r))]
            }),
        )
    })?;
    Ok(())
}

fn sweep(out: &Path, a: &SweepArgs) -> Result<()> {
    let (kind, density) = match a.lo_kind {
        LoKindArg::Coherent => (LoKind::Coherent, DensityKind::Projector),
        LoKindArg::CatPlus => (LoKind::Cat(CatParity::Plus), DensityKind::ReflectionSymmetric),
        LoKindArg::CatMinus => (LoKind::Cat(CatParity::Minus), DensityKind::ReflectionSymmetric),
        LoKindArg::Mixed => (LoKind::Mixed, DensityKind::ReflectionSymmetric),
    };
    let dens = AsymptoticDensity::new(density, a.theta, a.signal.clone());
    let mut rows = Vec::with_capacity(a.betas.len());
    for &beta in &a.betas {
        let lo = LocalOscillator::new(kind, beta, a.theta)?;
        let joint = joint_distribution(&lo, &a.signal, None, 1.0)?;
        let metric = convergence_metric(&to_sumdiff(&joint)?, &dens)?;
        println!("beta={beta} metric={metric:e}");
        rows.push((beta, metric));
    }
    let slope = if rows.len() >= 2 {
        Some(log_log_slope(&rows))
    } else {
        None
    };
    let non_increasing = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    let manifest = RunManifest::new(
        "sweep",
        json!({
            "lo_kind": a.lo_kind.to_possible_value().map(|v| v.get_name().to_string()),
            "signal": a.signal.to_string(),
            "betas": a.betas,
            "theta": a.theta,
        }),
    )
    .results(json!({
        "beta": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
        "metric": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        "log_log_slope": slope,
        "non_increasing": non_increasing,
    }));
    emit(out, "sweep.csv", &manifest, |w| {
        write_csv(w, &["beta", "metric"], rows.iter().map(|(b, m)| [sig17(*b), sig17(*m)]))
    })?;
    if let Some(s) = slope {
        println!("log-log slope {s:.3}");
    }
    Ok(())
}

fn verify(out: &Path, a: &VerifyArgs) -> Result<()> {
    let los = [
        LocalOscillator::coherent(a.beta, 0.0)?,
        LocalOscillator::cat(CatParity::Plus, a.beta, 0.0)?,
        LocalOscillator::cat(CatParity::Minus, a.beta, 0.0)?,
    ];
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for lo in &los {
        for signal in &a.signals {
            let cutoff = (a.max_total as usize).max(choose_cutoff(lo, signal, DEFAULT_TAIL_TOL));
            let lo_vec = lo.to_fock(cutoff)?;
            let sig_vec = signal.to_fock(cutoff)?;
            for n in 0..=a.max_total {
                for m in 0..=a.max_total - n {
                    let closed = match lo.kind() {
                        LoKind::Cat(p) => amp_cat_lo(n, m, lo.beta(), p, signal)?,
                        _ => amp_coherent_lo(n, m, lo.beta(), signal)?,
                    };
                    let oracle = amplitude_bruteforce(n, m, &sig_vec, &lo_vec)?;
                    let dev = (closed - oracle).norm();
                    worst = worst.max(dev);
                    rows.push([
                        csv_field(&lo.to_string()),
                        csv_field(&signal.to_string()),
                        n.to_string(),
                        m.to_string(),
                        sig17(closed.re),
                        sig17(closed.im),
                        sig17(oracle.re),
                        sig17(oracle.im),
                        sig17(dev),
                    ]);
                }
            }
        }
    }
    let manifest = RunManifest::new(
        "verify",
        json!({
            "beta": a.beta,
            "signals": a.signals.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "max_total": a.max_total,
            "tol": a.tol,
        }),
    )
    .results(json!({ "max_abs_deviation": worst, "passed": worst <= a.tol }));
    emit(out, "verify.csv", &manifest, |w| {
        write_csv(
            w,
            &[
                "lo",
                "signal",
                "n",
                "m",
                "closed_re",
                "closed_im",
                "oracle_re",
                "oracle_im",
                "abs_dev",
            ],
            rows,
        )
    })?;
    println!("max abs deviation {worst:e} (tolerance {:e})", a.tol);
    if worst > a.tol {
        return Err(VerifyFailed(worst, a.tol).into());
    }
    Ok(())
}

/// Quotes a field that would otherwise split a CSV row.
fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}
