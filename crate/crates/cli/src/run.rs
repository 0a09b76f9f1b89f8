//! Scenario execution and output writing.
//!
//! Every run writes into a staging directory inside the output directory and
//! moves the files into place only after all of them were produced, so a
//! failed run leaves no partial outputs behind. Runs that complete but fail
//! an acceptance check keep their outputs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use qprobe::estimation::{write_report_csv, ETA_STAR_AGREEMENT};
use qprobe::oracle::suite::fock_case;
use qprobe::oracle::{run_suite, OracleReport, SuiteOptions};
use qprobe::{eta_star, sweep, EncodingTrajectory, EtaStar, Frame, SensingPoint};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::scenario::{Kind, Scenario, SweepParam};
use crate::svg::{Chart, Series};

/// Files produced by a run, relative to the output directory.
pub struct Outcome {
    pub files: Vec<String>,
}

struct Staging {
    dir: PathBuf,
    files: Vec<String>,
}

impl Staging {
    fn new(out: &Path) -> CliResult<Self> {
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        let dir = out.join(format!(".staging-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        }
        fs::create_dir(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn write_with(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
    ) -> CliResult<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_str(&mut self, name: &str, text: &str) -> CliResult<()> {
        self.write_with(name, |w| w.write_all(text.as_bytes()))
    }

    fn write_json(&mut self, name: &str, value: &Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        self.write_str(name, &text)
    }

    fn commit(self, out: &Path) -> CliResult<Vec<String>> {
        for name in &self.files {
            let target = out.join(name);
            fs::rename(self.dir.join(name), &target).map_err(|e| CliError::io(&target, e))?;
        }
        fs::remove_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        Ok(self.files)
    }

    fn discard(self) {
        let _ = fs::remove_dir_all(&self.dir);
    }
}

/// Execute a scenario and write its outputs under `scenario.output_dir`.
pub fn execute(scenario: &Scenario) -> CliResult<Outcome> {
    let out = scenario.output_dir.clone();
    let mut staging = Staging::new(&out)?;
    let started = Instant::now();
    match produce(scenario, &mut staging, started) {
        Ok(()) => Ok(Outcome {
            files: staging.commit(&out)?,
        }),
        // A failed acceptance check is a complete result; keep its report.
        Err(e @ CliError::Acceptance(_)) => {
            staging.commit(&out)?;
            Err(e)
        }
        Err(e) => {
            staging.discard();
            Err(e)
        }
    }
}

fn produce(s: &Scenario, staging: &mut Staging, started: Instant) -> CliResult<()> {
    staging.write_json("effective_config.json", &s.effective_config())?;
    let extra = match s.kind {
        Kind::Fig1 => fig1(s, staging)?,
        Kind::Fig2 => fig2(s, staging)?,
        Kind::Fig3 => fig3(s, staging)?,
        Kind::Fig4 => fig4(s, staging)?,
        Kind::Sweep => run_sweep(s, staging)?,
        Kind::Discrete => discrete(s, staging)?,
        Kind::OracleSuite => oracle_suite(s, staging)?,
    };
    let frame = match &s.discrete {
        Some(d) => d.frame,
        None => Frame::Rotating,
    };
    let mut meta = json!({
        "version": qprobe::VERSION,
        "kind": s.kind.as_str(),
        "params": s.effective_config(),
        "derived": s.model.derived(),
        "tolerances": {
            "rel_tol": s.quadrature.rel_tol,
            "max_evaluations": s.quadrature.max_evaluations,
            "plateau_variation_tol": s.plateau.variation_tol,
            "eta_star_agreement": ETA_STAR_AGREEMENT,
        },
        "frame": frame.to_string(),
        "wall_clock_s": started.elapsed().as_secs_f64(),
    });
    if let (Some(map), Value::Object(more)) = (meta.as_object_mut(), extra) {
        map.extend(more);
    }
    staging.write_json("metadata.json", &meta)
}

fn times_of(s: &Scenario) -> Vec<f64> {
    s.time_grid.as_ref().map(|g| g.samples()).unwrap_or_default()
}

fn ab_label(ab: f64) -> String {
    format!("aB = {:.3} nm", ab * 1e9)
}

fn fig1(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let times = times_of(s);
    let trajectories = s
        .ab_values
        .iter()
        .map(|&ab| {
            let model = s.model.with_scattering_length(ab)?;
            EncodingTrajectory::bec(&model, &times, &s.quadrature)
        })
        .collect::<qprobe::Result<Vec<_>>>()?;
    let mut gamma_series = Vec::new();
    let mut phi_series = Vec::new();
    let ms: Vec<f64> = times.iter().map(|t| t * 1e3).collect();
    for (i, (ab, traj)) in s.ab_values.iter().zip(&trajectories).enumerate() {
        staging.write_with(&format!("trajectory_{i}.csv"), |w| traj.write_csv(w))?;
        gamma_series.push(Series::new(ab_label(*ab), &ms, &traj.gamma));
        phi_series.push(Series::new(ab_label(*ab), &ms, &traj.phi));
    }
    let gamma = Chart {
        title: "Decay Γ(t)".into(),
        x_label: "t (ms)".into(),
        y_label: "Γ".into(),
        log_x: false,
        log_y: false,
        series: gamma_series,
    };
    let phi = Chart {
        title: "Phase Φ(t)".into(),
        x_label: "t (ms)".into(),
        y_label: "Φ (rad)".into(),
        log_x: false,
        log_y: false,
        series: phi_series,
    };
    staging.write_str("fig1_gamma.svg", &gamma.render())?;
    staging.write_str("fig1_phi.svg", &phi.render())?;
    let files: Vec<Value> = s
        .ab_values
        .iter()
        .enumerate()
        .map(|(i, ab)| json!({"file": format!("trajectory_{i}.csv"), "aB_m": ab}))
        .collect();
    Ok(json!({ "trajectories": files }))
}

fn column(points: &[SensingPoint], ab: f64, f: impl Fn(&SensingPoint) -> f64) -> (Vec<f64>, Vec<f64>) {
    points.iter().filter(|p| p.ab == ab).map(|p| (p.t, f(p))).unzip()
}

fn fig2(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let times = times_of(s);
    let points = sweep(&s.model, &s.ab_values, &times, s.nu, &s.quadrature)?;
    staging.write_with("report.csv", |w| write_report_csv(&points, w))?;
    let mut series = Vec::new();
    for &ab in &s.ab_values {
        let (t, q) = column(&points, ab, |p| p.report.q);
        series.push(Series::new(format!("Q, {}", ab_label(ab)), &t, &q));
        let (t, q) = column(&points, ab, |p| p.report.q_par);
        series.push(Series::new(format!("Q∥, {}", ab_label(ab)), &t, &q).dashed());
    }
    let chart = Chart {
        title: "Quantum signal-to-noise ratio".into(),
        x_label: "t (s)".into(),
        y_label: "Q".into(),
        log_x: true,
        log_y: true,
        series,
    };
    staging.write_str("fig2.svg", &chart.render())?;
    Ok(json!({}))
}

fn eta_star_json(e: &EtaStar) -> Value {
    json!({
        "aB_m": e.ab,
        "eta_star_plateau": e.plateau.value,
        "eta_star_asymptotic": e.asymptotic,
        "relative_gap": e.relative_gap,
        "plateau_variation": e.plateau.variation,
        "plateau_window_s": [e.plateau.t_start, e.plateau.t_end],
        "t_saturation_s": e.plateau.t_saturation,
    })
}

fn fig3(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let times = times_of(s);
    let points = sweep(&s.model, &s.ab_values, &times, s.nu, &s.quadrature)?;
    let stars = s
        .ab_values
        .par_iter()
        .map(|&ab| eta_star(&s.model.with_scattering_length(ab)?, &s.plateau, &s.quadrature))
        .collect::<qprobe::Result<Vec<_>>>()?;
    let etas = points.iter().map(|p| p.eta()).collect::<qprobe::Result<Vec<_>>>()?;

    staging.write_with("report.csv", |w| write_report_csv(&points, w))?;
    staging.write_with("eta.csv", |w| {
        writeln!(w, "t_s,aB_m,eta,eta_star_asymptotic")?;
        for (p, e) in points.iter().zip(&etas) {
            let star = stars.iter().find(|x| x.ab == p.ab).map(|x| x.asymptotic).unwrap_or(f64::NAN);
            writeln!(w, "{:e},{:e},{:e},{:e}", p.t, p.ab, e, star)?;
        }
        Ok(())
    })?;
    let star_values: Vec<Value> = stars.iter().map(eta_star_json).collect();
    staging.write_json("eta_star.json", &Value::Array(star_values.clone()))?;

    let mut series = Vec::new();
    for star in &stars {
        let (t, e): (Vec<f64>, Vec<f64>) = points
            .iter()
            .zip(&etas)
            .filter(|(p, _)| p.ab == star.ab)
            .map(|(p, e)| (p.t, *e))
            .unzip();
        series.push(Series::new(ab_label(star.ab), &t, &e));
        let ends = [times[0], times[times.len() - 1]];
        series.push(Series::new("η* asymptote", &ends, &[star.asymptotic; 2]).dashed());
    }
    let chart = Chart {
        title: "Phase-channel efficiency η = Q⊥/(χt)²".into(),
        x_label: "t (s)".into(),
        y_label: "η".into(),
        log_x: true,
        log_y: true,
        series,
    };
    staging.write_str("fig3.svg", &chart.render())?;
    Ok(json!({ "plateau_windows": star_values }))
}

fn fig4(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let stars = s
        .ab_values
        .par_iter()
        .map(|&ab| eta_star(&s.model.with_scattering_length(ab)?, &s.plateau, &s.quadrature))
        .collect::<qprobe::Result<Vec<_>>>()?;
    staging.write_with("eta_star.csv", |w| {
        writeln!(w, "aB_m,eta_star_plateau,eta_star_asymptotic,relative_gap")?;
        for e in &stars {
            writeln!(w, "{:e},{:e},{:e},{:e}", e.ab, e.plateau.value, e.asymptotic, e.relative_gap)?;
        }
        Ok(())
    })?;
    let ab_nm: Vec<f64> = stars.iter().map(|e| e.ab * 1e9).collect();
    let plateau: Vec<f64> = stars.iter().map(|e| e.plateau.value).collect();
    let asym: Vec<f64> = stars.iter().map(|e| e.asymptotic).collect();
    let chart = Chart {
        title: "Late-time efficiency η* versus aB".into(),
        x_label: "aB (nm)".into(),
        y_label: "η*".into(),
        log_x: false,
        log_y: true,
        series: vec![
            Series::new("plateau", &ab_nm, &plateau),
            Series::new("asymptotic", &ab_nm, &asym).dashed(),
        ],
    };
    staging.write_str("fig4.svg", &chart.render())?;
    let windows: Vec<Value> = stars.iter().map(eta_star_json).collect();
    Ok(json!({ "plateau_windows": windows }))
}

fn run_sweep(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let spec = s.sweep.as_ref().expect("sweep scenario carries a sweep spec");
    let values = spec.grid.samples();
    let points = match spec.param {
        SweepParam::ScatteringLength => sweep(&s.model, &values, &spec.times, s.nu, &s.quadrature)?,
        SweepParam::Chi => {
            let models = values
                .iter()
                .map(|&c| s.model.with_chi(c))
                .collect::<qprobe::Result<Vec<_>>>()?;
            let jobs: Vec<(usize, f64)> = (0..models.len())
                .flat_map(|i| spec.times.iter().map(move |&t| (i, t)))
                .collect();
            jobs.par_iter()
                .map(|&(i, t)| SensingPoint::compute(&models[i], t, s.nu, &s.quadrature))
                .collect::<qprobe::Result<Vec<_>>>()?
        }
    };
    staging.write_with("report.csv", |w| write_report_csv(&points, w))?;

    let x_of = |p: &SensingPoint| match spec.param {
        SweepParam::ScatteringLength => p.ab * 1e9,
        SweepParam::Chi => p.chi,
    };
    let mut series = Vec::new();
    for &t in &spec.times {
        let (x, q): (Vec<f64>, Vec<f64>) = points.iter().filter(|p| p.t == t).map(|p| (x_of(p), p.report.q)).unzip();
        series.push(Series::new(format!("t = {:.3} ms", t * 1e3), &x, &q));
    }
    let chart = Chart {
        title: format!("Q versus {}", spec.param.as_str()),
        x_label: match spec.param {
            SweepParam::ScatteringLength => "aB (nm)".into(),
            SweepParam::Chi => "χ".into(),
        },
        y_label: "Q".into(),
        log_x: false,
        log_y: true,
        series,
    };
    staging.write_str("sweep.svg", &chart.render())?;
    Ok(json!({}))
}

fn discrete(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let d = s.discrete.as_ref().expect("discrete scenario carries a discrete spec");
    let times = times_of(s);
    let traj = EncodingTrajectory::discrete(&d.reservoir, &times, d.omega0, d.frame)?;
    staging.write_with("trajectory.csv", |w| traj.write_csv(w))?;
    let t_scale: Vec<f64> = traj.times.clone();
    let chart = Chart {
        title: "Discrete reservoir".into(),
        x_label: "t (s)".into(),
        y_label: "Γ, Φ (rad)".into(),
        log_x: false,
        log_y: false,
        series: vec![
            Series::new("Γ", &t_scale, &traj.gamma),
            Series::new("Φ", &t_scale, &traj.phi).dashed(),
        ],
    };
    staging.write_str("discrete.svg", &chart.render())?;
    if !d.fock_check {
        return Ok(json!({}));
    }
    let (err, n_max) = fock_case(&d.reservoir, &times, d.omega0, &d.fock)?;
    let report = OracleReport {
        case_id: "discrete-fock".into(),
        max_abs_error: err,
        n_max_used: Some(n_max),
        passed: err <= qprobe::oracle::suite::FOCK_TOL,
    };
    staging.write_json("oracle_report.json", &json!([report]))?;
    if !report.passed {
        return Err(CliError::Acceptance(format!(
            "exact Fock evolution differs from the closed form by {err:e}"
        )));
    }
    Ok(json!({ "fock_max_abs_error": err, "fock_n_max_used": n_max }))
}

fn oracle_suite(s: &Scenario, staging: &mut Staging) -> CliResult<Value> {
    let opts = SuiteOptions {
        seed: s.seed,
        ..SuiteOptions::default()
    };
    let reports = run_suite(&opts)?;
    staging.write_json("oracle_report.json", &json!(reports))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.case_id.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::Acceptance(format!("oracle cases failed: {}", failed.join(", "))));
    }
    Ok(json!({ "oracle_cases": reports.len() }))
}
