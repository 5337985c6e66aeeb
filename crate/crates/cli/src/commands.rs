use std::fs;

use qrms_core::estimators::{EstimatorConfig, Method, DEFAULT_SHOTS, DEFAULT_THETA, NOISY_THETA};
use qrms_core::fixtures::{plus_i, theoretical_disturbance};
use qrms_core::harness::output::{
    exact_csv, fits_csv, jsonl, summaries_csv, summaries_text, sweep_csv,
};
use qrms_core::harness::table::summarize;
use qrms_core::harness::{
    render_exact, run_exact, run_sweep, run_table, HarnessConfig, NoiseProfile, Progress,
    SweepConfig, TableConfig, DEFAULT_ITERATIONS,
};
use qrms_core::harness::{EstimateSummary, Format};
use qrms_core::metrics::qrms_disturbance_exact;
use qrms_core::mitigation::{
    detector_tomography_wires, tensored_tomography, ConfusionMatrix, Mitigation, MitigationPlan,
    PreparedProtocol, ZneSchedule,
};
use qrms_core::quantum::model::projective_model;
use qrms_core::{Error, NoiseModel, Pauli, Result};

use crate::{Cli, Command, EstimatorArgs, SweepArgs, ZneArgs};

/// Flags merged over the optional config file.
struct Resolved {
    cfg: HarnessConfig,
    noise: NoiseProfile,
}

impl Resolved {
    fn seed(&self) -> u64 {
        self.cfg.seed.unwrap_or(0)
    }

    fn shots(&self) -> u64 {
        self.cfg.shots.unwrap_or(DEFAULT_SHOTS)
    }

    fn iterations(&self, default: usize) -> usize {
        self.cfg.iterations.unwrap_or(default)
    }

    fn format(&self) -> Format {
        self.cfg.format.unwrap_or_default()
    }

    fn analytic(&self) -> bool {
        self.cfg.analytic.unwrap_or(false)
    }

    fn dec_theta(&self, theta: Option<f64>) -> f64 {
        theta
            .or(self.cfg.theta)
            .unwrap_or(if self.noise.is_noisy() {
                NOISY_THETA
            } else {
                DEFAULT_THETA
            })
    }

    fn seeds(&self, n: usize) -> Vec<u64> {
        (0..n as u64).map(|i| self.seed().wrapping_add(i)).collect()
    }

    fn schedule(&self, z: &ZneArgs) -> Result<ZneSchedule> {
        let mut s = match &z.zne_file {
            Some(p) => ZneSchedule::from_toml_file(p)?,
            None => self.cfg.zne.clone().unwrap_or_default(),
        };
        if let Some(f) = &z.scale_factors {
            s.scale_factors = f.clone();
        }
        if let Some(e) = z.extrapolator {
            s.extrapolator = e;
        }
        if let Some(r) = z.repeats {
            s.repeats = r;
        }
        s.validate()?;
        Ok(s)
    }

    /// Writes `<out>/<name>.<ext>` or prints to stdout.
    fn emit(&self, name: &str, ext: &str, content: &str) -> Result<()> {
        match &self.cfg.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("{name}.{ext}")), content)?;
            }
            None => print!("{content}"),
        }
        Ok(())
    }

    fn emit_summaries(&self, name: &str, rows: &[EstimateSummary]) -> Result<()> {
        let f = self.format();
        let text = match f {
            Format::Csv => summaries_csv(rows, self.cfg.milli.unwrap_or(false)),
            Format::Jsonl => jsonl(rows)?,
            Format::Text => summaries_text(rows),
        };
        self.emit(name, f.extension(), &text)
    }
}

fn resolve(cli: &Cli) -> Result<Resolved> {
    let file = match &cli.global.config {
        Some(p) => HarnessConfig::from_toml_file(p)?,
        None => HarnessConfig::default(),
    };
    let cfg = file.overridden_by(cli.global.as_config());
    let noise = NoiseProfile::parse(cfg.noise.as_deref().unwrap_or("none"))?;
    Ok(Resolved { cfg, noise })
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let r = resolve(&cli)?;
    match &cli.command {
        Command::Exact { measured, theta } => exact(&r, measured.clone(), *theta),
        Command::Tsm(a) => estimate(&r, Method::Tsm, a),
        Command::Wmm(a) => estimate(&r, Method::Wmm, a),
        Command::Dec(a) => estimate(&r, Method::Dec, a),
        Command::Table {
            methods,
            measured,
            mitigation,
            theta,
            theta_w,
            zne,
        } => {
            let mut t = TableConfig {
                shots: r.shots(),
                iterations: r.iterations(DEFAULT_ITERATIONS),
                seed: r.seed(),
                noise: r.noise.clone(),
                schedule: r.schedule(zne)?,
                calibration_shots: r.cfg.calibration_shots,
                theta: theta.or(r.cfg.theta),
                analytic: r.analytic(),
                ..TableConfig::default()
            };
            if let Some(m) = methods.clone().or(r.cfg.methods.clone()) {
                t.methods = m;
            }
            if let Some(m) = measured.clone().or(r.cfg.measured.clone()) {
                t.measured = m;
            }
            if let Some(m) = mitigation.clone().or(r.cfg.mitigation.clone()) {
                t.mitigations = m;
            }
            if let Some(w) = theta_w.or(r.cfg.theta_w) {
                t.theta_w = w;
            }
            r.emit_summaries("table", &run_table(&t)?)
        }
        Command::SweepTheta(a) => sweep(&r, SweepConfig::theta(a.measured), "sweep-theta", a),
        Command::SweepThetaw(a) => sweep(&r, SweepConfig::theta_w(a.measured), "sweep-thetaw", a),
        Command::Calibrate { wires, tensored } => calibrate(&r, wires, *tensored),
        Command::Mitigate {
            est,
            method,
            mode,
            calibration,
            calibration_shots,
            zne,
        } => {
            let mut plan = MitigationPlan::new(*mode);
            plan.schedule = r.schedule(zne)?;
            plan.calibration_shots = calibration_shots.or(r.cfg.calibration_shots);
            plan.calibration = calibration
                .as_deref()
                .map(ConfusionMatrix::load)
                .transpose()?;
            mitigate(&r, *method, est, &plan)
        }
    }
}

fn exact(r: &Resolved, measured: Option<Vec<Pauli>>, theta: Option<f64>) -> Result<()> {
    let measured = measured
        .or(r.cfg.measured.clone())
        .unwrap_or_else(|| Pauli::MEASURABLE.to_vec());
    let rows = run_exact(&measured, theta.or(r.cfg.theta))?;
    let f = r.cfg.format.unwrap_or(Format::Text);
    let text = match f {
        Format::Csv => exact_csv(&rows),
        Format::Jsonl => jsonl(&rows)?,
        Format::Text => render_exact(&rows),
    };
    r.emit("exact", f.extension(), &text)
}

fn estimator(r: &Resolved, method: Method, a: &EstimatorArgs) -> EstimatorConfig {
    let mut cfg = EstimatorConfig::new(method, a.measured)
        .with_b(a.b)
        .with_shots(r.shots())
        .with_seed(r.seed())
        .with_theta(r.dec_theta(a.theta))
        .with_noise(r.noise.model());
    if let Some(w) = a.theta_w.or(r.cfg.theta_w) {
        cfg = cfg.with_theta_w(w);
    }
    cfg.readout_mode = a.readout_mode();
    cfg.analytic = r.analytic();
    cfg
}

fn theoretical(cfg: &EstimatorConfig) -> Result<f64> {
    if cfg.b == Pauli::X {
        Ok(theoretical_disturbance(cfg.measured))
    } else {
        qrms_disturbance_exact(&projective_model(cfg.measured), &cfg.b.matrix(), &plus_i())
    }
}

fn estimate(r: &Resolved, method: Method, a: &EstimatorArgs) -> Result<()> {
    let cfg = estimator(r, method, a);
    cfg.validate()?;
    let dists = cfg.distributions()?;
    let seeds = r.seeds(r.iterations(1));
    let runs = seeds
        .iter()
        .map(|&s| cfg.clone().with_seed(s).run_with(&dists))
        .collect::<Result<Vec<_>>>()?;
    let values = runs.iter().map(|x| x.eta_sq_hat).collect();
    let summary = summarize(
        &cfg,
        &r.noise,
        Mitigation::None,
        theoretical(&cfg)?,
        &seeds,
        values,
    )?;
    let name = method.to_string().to_ascii_lowercase();
    if r.format() == Format::Jsonl {
        let mut text = jsonl(&runs)?;
        text.push_str(&jsonl(&[summary])?);
        r.emit(&name, "jsonl", &text)
    } else {
        r.emit_summaries(&name, &[summary])
    }
}

fn mitigate(r: &Resolved, method: Method, a: &EstimatorArgs, plan: &MitigationPlan) -> Result<()> {
    let cfg = estimator(r, method, a);
    let prepared = PreparedProtocol::new(&cfg, plan)?;
    let seeds = r.seeds(r.iterations(1));
    let runs = seeds
        .iter()
        .map(|&s| prepared.run(s))
        .collect::<Result<Vec<_>>>()?;
    let t = theoretical(&cfg)?;
    let rows = vec![
        summarize(
            &cfg,
            &r.noise,
            Mitigation::None,
            t,
            &seeds,
            runs.iter().map(|x| x.unmitigated).collect(),
        )?,
        summarize(
            &cfg,
            &r.noise,
            plan.mode,
            t,
            &seeds,
            runs.iter().map(|x| x.eta_sq_hat).collect(),
        )?,
    ];
    if r.format() == Format::Jsonl {
        let mut text = jsonl(&runs)?;
        text.push_str(&jsonl(&rows)?);
        r.emit("mitigate", "jsonl", &text)
    } else {
        r.emit_summaries("mitigate", &rows)
    }
}

fn sweep(r: &Resolved, base: SweepConfig, name: &str, a: &SweepArgs) -> Result<()> {
    let mut cfg = SweepConfig {
        shots: r.shots(),
        iterations: r.iterations(DEFAULT_ITERATIONS),
        seed: r.seed(),
        noise: r.noise.clone(),
        schedule: r.schedule(&a.zne)?,
        calibration_shots: r.cfg.calibration_shots,
        analytic: r.analytic(),
        ..base
    };
    if let Some(g) = a.grid.clone().or(r.cfg.grid.clone()) {
        cfg.grid = g;
    }
    if let Some(m) = a
        .mitigation
        .or(r.cfg.mitigation.as_ref().and_then(|m| m.first().copied()))
    {
        cfg.mitigation = m;
    }
    if a.probe_x {
        cfg.readout_mode = qrms_core::estimators::ReadoutMode::ProbeX;
    }
    let rec = run_sweep(&cfg, &Progress::default())?;
    match r.format() {
        Format::Jsonl => r.emit(name, "jsonl", &jsonl(&[rec])?),
        _ => match &r.cfg.out {
            Some(_) => {
                r.emit(name, "csv", &sweep_csv(&rec))?;
                r.emit(&format!("{name}-fits"), "csv", &fits_csv(&rec))
            }
            None => r.emit(
                name,
                "csv",
                &format!("{}\n{}", sweep_csv(&rec), fits_csv(&rec)),
            ),
        },
    }
}

fn calibrate(r: &Resolved, wires: &[usize], tensored: bool) -> Result<()> {
    if wires.is_empty() {
        return Err(Error::Config("no wires to calibrate".into()));
    }
    let n_qubits = (wires.iter().max().copied().unwrap_or(0) + 1).max(3);
    let noise = r.noise.model().unwrap_or_else(NoiseModel::ideal);
    let c = if tensored {
        tensored_tomography(n_qubits, wires, r.shots(), r.seed(), &noise)?
    } else {
        detector_tomography_wires(n_qubits, wires, r.shots(), r.seed(), &noise)?
    };
    match r.format() {
        Format::Jsonl => {
            let line = format!(
                "{{\"v\":1,\"kind\":\"confusion\",\"wires\":{wires:?},\"condition_number\":{},\"entries\":{:?}}}\n",
                c.condition_number(),
                c.entries()
            );
            r.emit("confusion", "jsonl", &line)
        }
        _ => r.emit("confusion", "csv", &c.to_csv()),
    }
}
