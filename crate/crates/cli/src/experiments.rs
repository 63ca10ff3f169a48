//! Experiment runner: one config in, artifacts and a manifest out.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use scatter_core::commutator::{mourre_report, MourreOptions};
use scatter_core::lattice::dump::write_dump;
use scatter_core::partition::{build_partition, verify_partition, DEFAULT_SMOOTHING};
use scatter_core::propagation::{
    channel_product_state, completeness_defect, evolve, local_decay_trace, minimal_velocity_trace,
    ChannelConfig, PropagatorSpec, SpectralHypotheses, TraceSeries,
};
use scatter_core::random::{derive_seed, packet_state};
use scatter_core::spectral::{
    dense_spectrum, dispersion_scan, imag_time_solve, subspace_iteration, threshold_table,
    ImagTimeOptions, SubspaceOptions, ThresholdOptions, ThresholdTable,
};
use scatter_core::{GridSpec, ThreeBodyModel, WaveFunction};

use crate::config::{
    ElectronState, Experiment, ExperimentConfig, Method, Operator, Profile, ThresholdsBlock,
    VerifyBlock,
};
use crate::error::{CliError, Result};
use crate::manifest::{sha256_hex, Artifacts, Manifest};
use crate::suite::{self, MinVelocityOverride, Status, SuiteOptions};

/// What each experiment probes, in plain mathematical terms.
pub fn anchor(e: Experiment) -> &'static str {
    match e {
        Experiment::Spectrum => "discrete spectrum of a grid Hamiltonian",
        Experiment::Dispersion => {
            "fiber ground energy lambda(s) = lambda(0) + s^2 for the (xy)(0) pair"
        }
        Experiment::Thresholds => "threshold set: subsystem eigenvalues together with zero",
        Experiment::Mourre => "Mourre estimate E(H)[H, iA]E(H) >= (d(E) - eps) E(H)",
        Experiment::Partition => "configuration-space partition of unity, sum of j_a^2 = 1",
        Experiment::Evolve => "unitary propagation psi(t) = exp(-itH) psi",
        Experiment::LocalDecay => {
            "local decay: integral of ||<X>^-mu exp(-itH) f(H) psi||^2 stays bounded"
        }
        Experiment::MinVelocity => {
            "minimal velocity: ||F(X^2 < delta t^(2-eps)) exp(-itH) f(H) psi|| -> 0"
        }
        Experiment::Channels => {
            "asymptotic completeness: psi(t) approaches the sum of channel pieces"
        }
        Experiment::VerifyAll => "acceptance suite over all of the above",
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `[run] output`.
    pub out: Option<PathBuf>,
    /// Recorded in the manifest with its checksum.
    pub config_path: Option<PathBuf>,
    /// Suppress progress lines on stdout.
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub lines: Vec<String>,
    pub manifest: PathBuf,
    pub outputs: Vec<PathBuf>,
    /// Set when the experiment ran but its verdict is negative.
    pub failure: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    art: Artifacts,
    lines: Vec<String>,
    quiet: bool,
}

impl Ctx<'_> {
    fn say(&mut self, line: String) {
        if !self.quiet {
            println!("{line}");
        }
        self.lines.push(line);
    }
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let stem = format!("{}-{}", cfg.experiment, cfg.hash());
    let art = Artifacts::new(&dir, &stem)?;
    let mut inputs = Vec::new();
    if let Some(p) = &opts.config_path {
        let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
        inputs.push((
            "config".to_string(),
            p.display().to_string(),
            sha256_hex(&bytes),
        ));
    }
    let mut ctx = Ctx {
        cfg,
        art,
        lines: Vec::new(),
        quiet: opts.quiet,
    };
    let start = Instant::now();
    let result = body(&mut ctx);
    let (failure, partial) = match &result {
        Ok(v) => (v.clone(), false),
        Err(e) => (Some(e.to_string()), true),
    };
    let manifest = Manifest {
        experiment: cfg.experiment.name().to_string(),
        anchor: anchor(cfg.experiment),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        inputs,
        wall_time: start.elapsed(),
        failure: failure.clone(),
        partial,
    };
    let manifest_path = manifest.write(&ctx.art)?;
    result?;
    Ok(RunReport {
        lines: ctx.lines,
        manifest: manifest_path,
        outputs: ctx.art.files().iter().map(|w| dir.join(&w.name)).collect(),
        failure,
    })
}

/// Smoke-profile verify-all over criteria 1 to 13, written to `dir`.
pub fn run_smoke_suite(seed: u64, dir: &Path) -> Result<RunReport> {
    let mut cfg = ExperimentConfig::empty(Experiment::VerifyAll);
    cfg.seed = seed;
    cfg.verify = Some(VerifyBlock {
        profile: Profile::Smoke,
        criteria: (1..=13).collect(),
    });
    run(
        &cfg,
        &RunOptions {
            out: Some(dir.to_path_buf()),
            config_path: None,
            quiet: true,
        },
    )
}

type Verdict = Result<Option<String>>;

fn body(ctx: &mut Ctx) -> Verdict {
    match ctx.cfg.experiment {
        Experiment::Spectrum => spectrum(ctx),
        Experiment::Dispersion => dispersion(ctx),
        Experiment::Thresholds => thresholds(ctx),
        Experiment::Mourre => mourre(ctx),
        Experiment::Partition => partition(ctx),
        Experiment::Evolve => run_evolve(ctx),
        Experiment::LocalDecay => local_decay(ctx),
        Experiment::MinVelocity => min_velocity(ctx),
        Experiment::Channels => channels(ctx),
        Experiment::VerifyAll => verify_all(ctx),
    }
}

fn grid_for(cfg: &ExperimentConfig, particles: usize) -> Result<GridSpec> {
    let g = cfg.grid.as_ref().expect("validated");
    Ok(GridSpec::new(particles, g.points, g.half_extent)?)
}

fn table(cfg: &ExperimentConfig, model: &ThreeBodyModel) -> Result<ThresholdTable> {
    let t = cfg.thresholds.unwrap_or_default();
    let opts = threshold_options(cfg, &t);
    Ok(threshold_table(model, &grid_for(cfg, 1)?, &opts)?)
}

fn threshold_options(cfg: &ExperimentConfig, t: &ThresholdsBlock) -> ThresholdOptions {
    ThresholdOptions {
        tol: t.tol,
        fallback: t.fallback,
        seed: derive_seed(cfg.seed, "thresholds"),
        ..Default::default()
    }
}

fn initial_state(
    cfg: &ExperimentConfig,
    model: &ThreeBodyModel,
    g: &GridSpec,
) -> Result<WaveFunction> {
    let p = cfg.packet.as_ref().expect("validated");
    Ok(match p.electron {
        ElectronState::Bound => channel_product_state(model, g, p.photon, 1e-9)?.0,
        ElectronState::Packet(e) => packet_state(g, e, Some(p.photon)).normalized(),
    })
}

fn write_trace(ctx: &mut Ctx, suffix: &str, t: &TraceSeries) -> Result<()> {
    ctx.art
        .write_with(&format!("{suffix}.csv"), |b| t.write_csv(b))?;
    ctx.art
        .write_with(&format!("{suffix}.meta"), |b| t.write_sidecar(b))?;
    Ok(())
}

fn spectrum(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let sp = cfg.spectrum.expect("validated");
    let model = cfg.model();
    let g = grid_for(cfg, cfg.experiment.particles(Some(&sp)))?;
    let h = match sp.operator {
        Operator::Full => model.full_hamiltonian(),
        Operator::Subsystem(a) => model.subsystem(a)?,
        Operator::Fiber(a, s) => model.reduced(a, s)?,
    };
    let seed = derive_seed(cfg.seed, "spectrum");
    let r = match sp.method {
        Method::Dense => dense_spectrum(&h, &g, sp.count.min(g.len()))?,
        Method::ImaginaryTime => imag_time_solve(
            &h,
            &g,
            &ImagTimeOptions {
                tol: sp.tol,
                seed,
                ..Default::default()
            },
        )?,
        Method::IterativeSubspace => subspace_iteration(
            &h,
            &g,
            &SubspaceOptions {
                count: sp.count,
                tol: sp.tol,
                seed,
                ..Default::default()
            },
        )?,
    };
    ctx.art.write_with(".csv", |b| r.write_csv(b))?;
    if let Some(v) = r.eigenvectors.first() {
        ctx.art.write_with(".ground.bin", |b| write_dump(v, b))?;
    }
    ctx.say(format!(
        "spectrum: {} eigenvalues by {}, lowest {:?}",
        r.len(),
        r.method.name(),
        r.eigenvalues.first().copied().unwrap_or(f64::NAN)
    ));
    Ok(None)
}

fn dispersion(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let d = cfg.dispersion.as_ref().expect("validated");
    let curve = dispersion_scan(&cfg.model(), &d.fibers, &grid_for(cfg, 1)?, d.tol)?;
    ctx.art.write_with(".csv", |b| curve.write_csv(b))?;
    ctx.say(format!(
        "dispersion: lambda0 = {:?}, quadratic coefficient {:?}, max deviation {:e}",
        curve.fit.lambda0, curve.fit.quadratic, curve.fit.max_deviation
    ));
    Ok(None)
}

fn thresholds(ctx: &mut Ctx) -> Verdict {
    let t = table(ctx.cfg, &ctx.cfg.model())?;
    ctx.art.write_with(".csv", |b| t.write_csv(b))?;
    ctx.say(format!("thresholds: {:?}", t.thresholds()));
    Ok(None)
}

fn mourre(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let model = cfg.model();
    let w = cfg.window.expect("validated");
    let m = cfg.mourre.unwrap_or_default();
    let t = table(cfg, &model)?;
    let opts = MourreOptions {
        samples: m.samples,
        epsilon: m.epsilon,
        sharpness: w.sharpness,
        seed: derive_seed(cfg.seed, "mourre"),
        seed_width: m.seed_width,
        boundary_tolerance: m.boundary_tolerance,
        ..Default::default()
    };
    let r = mourre_report(
        w.center(),
        w.bounds(),
        &model,
        &grid_for(cfg, 2)?,
        &t,
        &opts,
    )?;
    ctx.art.write_with(".csv", |b| r.write_csv(b))?;
    ctx.say(format!(
        "mourre: E = {:?}, bound {:?}, worst margin {:?}, {} violations",
        r.energy,
        r.bound,
        r.worst_margin(),
        r.violations(0.0)
    ));
    Ok(None)
}

fn partition(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let smoothing = cfg.partition.map_or(DEFAULT_SMOOTHING, |p| p.smoothing);
    let p = build_partition(smoothing)?;
    let (_, report) = verify_partition(&p, &grid_for(cfg, 2)?, &cfg.model())?;
    ctx.art.write_with(".csv", |b| report.write_csv(b))?;
    let violations = report.range_violations + report.support_violations + report.violations.len();
    ctx.say(format!(
        "partition: max |sum j^2 - 1| = {:e}, {violations} violations",
        report.max_sum_defect
    ));
    Ok((!report.is_clean()).then(|| format!("partition check found {violations} violations")))
}

fn run_evolve(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let model = cfg.model();
    let sch = cfg.schedule.as_ref().expect("validated");
    let g = grid_for(cfg, 2)?;
    let psi = initial_state(cfg, &model, &g)?;
    let spec = PropagatorSpec::new(model.full_hamiltonian(), sch.dt);
    let ev = evolve(&psi, &spec, sch.duration.expect("validated"))?;
    let mut csv = String::from("t,norm,energy\n");
    for ((t, n), e) in ev
        .norm
        .times
        .iter()
        .zip(&ev.norm.values)
        .zip(&ev.energy.values)
    {
        let _ = writeln!(csv, "{t:?},{n:?},{e:?}");
    }
    ctx.art.write(".csv", csv.as_bytes())?;
    ctx.art
        .write_with(".final.bin", |b| write_dump(&ev.state, b))?;
    ctx.say(format!(
        "evolve: norm drift {:e}, energy drift {:e}, {:?}",
        ev.norm_drift(),
        ev.energy_drift(),
        ev.status
    ));
    Ok(ev.status.into_result().err().map(|e| e.to_string()))
}

fn dynamics_setup(ctx: &Ctx) -> Result<(ThreeBodyModel, GridSpec, WaveFunction, ThresholdTable)> {
    let model = ctx.cfg.model();
    let g = grid_for(ctx.cfg, 2)?;
    let psi = initial_state(ctx.cfg, &model, &g)?;
    let t = table(ctx.cfg, &model)?;
    Ok((model, g, psi, t))
}

fn local_decay(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let (model, _, psi, t) = dynamics_setup(ctx)?;
    let (w, c, sch) = (
        cfg.window.expect("validated"),
        cfg.cutoff.expect("validated"),
        cfg.schedule.as_ref().expect("validated"),
    );
    let spec = PropagatorSpec::new(model.full_hamiltonian(), sch.dt);
    let hyp = SpectralHypotheses::new(&t, Vec::new());
    let (trace, ratio) = local_decay_trace(
        &psi,
        &spec,
        w.bounds(),
        c.mu,
        sch.duration.expect("validated"),
        &hyp,
        &[],
        w.sharpness,
    )?;
    write_trace(ctx, "", &trace)?;
    ctx.say(format!("local-decay: I(T)/I(T/2) = {ratio:?}"));
    Ok(None)
}

fn min_velocity(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let (model, _, psi, t) = dynamics_setup(ctx)?;
    let (w, c, sch) = (
        cfg.window.expect("validated"),
        cfg.cutoff.expect("validated"),
        cfg.schedule.as_ref().expect("validated"),
    );
    let theta = match cfg.min_velocity.and_then(|m| m.theta) {
        Some(th) => th,
        None => 0.9 * t.distance(w.center()),
    };
    let spec = PropagatorSpec::new(model.full_hamiltonian(), sch.dt);
    let hyp = SpectralHypotheses::new(&t, Vec::new()).with_mourre_constant(theta);
    let trace = minimal_velocity_trace(
        &psi,
        &spec,
        w.bounds(),
        &c.spec(),
        sch.duration.expect("validated"),
        &hyp,
        &[],
        w.sharpness,
    )?;
    write_trace(ctx, "", &trace)?;
    ctx.say(format!(
        "min-velocity: theta = {theta:?}, final cutoff norm {:?}",
        trace.last().map_or(f64::NAN, |p| p.1)
    ));
    Ok(None)
}

fn channels(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let (model, _, psi, t) = dynamics_setup(ctx)?;
    let (w, c, sch) = (
        cfg.window.expect("validated"),
        cfg.cutoff.expect("validated"),
        cfg.schedule.as_ref().expect("validated"),
    );
    let chan = ChannelConfig {
        dt: sch.dt,
        sharpness: w.sharpness,
        convention: c.convention,
        thresholds: t.thresholds(),
        ..Default::default()
    };
    let run = completeness_defect(&psi, &model, w.bounds(), &c.spec(), &sch.times, &chan)?;
    write_trace(ctx, "", &run.defect)?;
    let mut csv = String::from("channel,norm\n");
    for (a, n) in &run.channel_norms {
        let _ = writeln!(csv, "{},{n:?}", a.slug());
    }
    let _ = writeln!(csv, "filtered,{:?}", run.filtered_norm);
    ctx.art.write(".channels.csv", csv.as_bytes())?;
    ctx.say(format!(
        "channels: final defect {:?}",
        run.defect.last().map_or(f64::NAN, |p| p.1)
    ));
    Ok(None)
}

fn verify_all(ctx: &mut Ctx) -> Verdict {
    let cfg = ctx.cfg;
    let v = cfg.verify.clone().unwrap_or(VerifyBlock {
        profile: Profile::Desk,
        criteria: Vec::new(),
    });
    let ids: Vec<u8> = if v.criteria.is_empty() {
        suite::CRITERIA.to_vec()
    } else {
        v.criteria.clone()
    };
    let mut opts = SuiteOptions::new(v.profile, cfg.seed, ctx.art.dir().to_path_buf());
    if cfg.cutoff.is_some() || cfg.min_velocity.is_some() {
        let cutoffs = match cfg.cutoff {
            Some(c) => c.spec(),
            None => scatter_core::propagation::CutoffSpec::new(0.2, 0.1, 0.6)?,
        };
        opts.min_velocity = Some(MinVelocityOverride {
            cutoffs,
            theta: cfg.min_velocity.and_then(|m| m.theta),
        });
    }
    let quiet = ctx.quiet;
    let outcomes = suite::run_suite(&ids, &opts, |o| {
        if !quiet {
            println!("{}", o.line());
        }
    });
    for o in &outcomes {
        ctx.lines.push(o.line());
        for (suffix, bytes) in &o.artifacts {
            ctx.art.write(&format!(".{suffix}"), bytes)?;
        }
    }
    ctx.art.write(".csv", &suite::summary_csv(&outcomes))?;
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| o.status == Status::Fail)
        .map(|o| o.id.to_string())
        .collect();
    let passed = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    let skipped = outcomes
        .iter()
        .filter(|o| o.status == Status::Skipped)
        .count();
    ctx.say(format!(
        "verify-all ({}): {passed} passed, {} failed, {skipped} skipped",
        v.profile.name(),
        failed.len()
    ));
    Ok((!failed.is_empty()).then(|| format!("criteria {} failed", failed.join(", "))))
}
