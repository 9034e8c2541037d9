use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use kgflow_core::hamflow::{build_lie_series, Coord};
use kgflow_core::hparse::{parse_hamiltonian, to_expression};
use kgflow_core::lattice::io::{
    format_float, write_errmap_csv, write_field_csv, write_signmap_csv, write_signmap_pgm, Metadata,
};
use kgflow_core::lattice::{
    critical_time, default_threads, diagonal_errmap, evaluate_field_with, real_flow_trajectory, sign_map,
    CriticalOptions, CriticalTime, LatticeOptions, StepControl, TimeDirection,
};
use kgflow_core::moser::{ConformalSeries, EvalMode, DEFAULT_EPSILON_BLOWUP};
use kgflow_core::trigpoly::TrigPoly;
use kgflow_core::VERSION;

use crate::cli::{Cli, Command, CoordArg, DirectionArg, ExpandFormat, ModeArg};
use crate::config::ConfigFile;
use crate::error::CliError;

const DEFAULT_ORDER: usize = 12;
const DEFAULT_GRID: usize = 50;
const DEFAULT_CRITICAL_GRID: usize = 200;

/// Write through a temporary file in the target directory and rename it
/// into place, so a failed run never leaves a partial file.
pub fn write_atomic<F>(path: Option<&Path>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let Some(path) = path else {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        return body(&mut lock).and_then(|()| lock.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).and_then(|()| w.flush()).map_err(|e| CliError::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Resolved settings for one run: flags, then config file, then environment.
struct Run {
    cli: Cli,
    cfg: ConfigFile,
}

impl Run {
    fn hamiltonian_text(&self) -> Result<String, CliError> {
        let c = &self.cli.common;
        let file: Option<PathBuf> = if c.hamiltonian.is_some() { None } else { c.hamiltonian_file.clone() };
        if let Some(text) = &c.hamiltonian {
            return Ok(text.clone());
        }
        if let Some(path) = file {
            return read_text(&path);
        }
        if let Some(text) = self.cfg.raw("hamiltonian") {
            return Ok(text.to_string());
        }
        if let Some(path) = self.cfg.raw("hamiltonian_file") {
            return read_text(Path::new(path));
        }
        Err(CliError::Usage("no Hamiltonian given (use --hamiltonian or --hamiltonian-file)".into()))
    }

    fn order(&self) -> Result<usize, CliError> {
        let n = self.cfg.pick(self.cli.common.order, "order")?.unwrap_or(DEFAULT_ORDER);
        if n < 1 {
            return Err(CliError::Usage("--order must be at least 1".into()));
        }
        Ok(n)
    }

    fn grid(&self, default: usize) -> Result<usize, CliError> {
        let g = self.cfg.pick(self.cli.common.grid, "grid")?.unwrap_or(default);
        if g < 2 {
            return Err(CliError::Usage("--grid must be at least 2".into()));
        }
        Ok(g)
    }

    fn threads(&self) -> Result<usize, CliError> {
        if let Some(n) = self.cfg.pick(self.cli.common.threads, "threads")? {
            return Ok(resolve(n));
        }
        match std::env::var("KGF_THREADS") {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map(resolve)
                .map_err(|e| CliError::Usage(format!("KGF_THREADS: {e}"))),
            Err(_) => Ok(default_threads()),
        }
    }

    fn mode(&self) -> Result<EvalMode, CliError> {
        let flag = self.cli.common.mode.map(|m| match m {
            ModeArg::Rational => EvalMode::Rational,
            ModeArg::Polynomial => EvalMode::Polynomial,
        });
        Ok(self.cfg.pick(flag, "mode")?.unwrap_or_default())
    }

    fn epsilon(&self) -> Result<f64, CliError> {
        let e = self
            .cfg
            .pick(self.cli.common.epsilon_blowup, "epsilon_blowup")?
            .unwrap_or(DEFAULT_EPSILON_BLOWUP);
        if !(e >= 0.0 && e.is_finite()) {
            return Err(CliError::Usage("--epsilon-blowup must be a non-negative number".into()));
        }
        Ok(e)
    }

    fn log_base(&self) -> Result<Option<f64>, CliError> {
        let b = self.cfg.pick(self.cli.common.log_base, "log_base")?;
        if let Some(b) = b {
            if !(b > 0.0 && b != 1.0 && b.is_finite()) {
                return Err(CliError::Usage("--log-base must be positive and not 1".into()));
            }
        }
        Ok(b)
    }

    fn output(&self) -> Result<Option<PathBuf>, CliError> {
        self.cfg.pick(self.cli.common.output.clone(), "output")
    }

    fn required_f64(&self, flag: Option<f64>, key: &str) -> Result<f64, CliError> {
        self.cfg
            .pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    fn meta(&self, text: &str, order: usize, threads: usize) -> Metadata {
        Metadata {
            version: VERSION.to_string(),
            hamiltonian: one_line(text),
            order,
            grid: None,
            t: None,
            mode: None,
            epsilon_blowup: None,
            threads,
            extra: Vec::new(),
        }
    }
}

fn resolve(n: usize) -> usize {
    if n == 0 {
        default_threads()
    } else {
        n
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map(|s| s.trim().to_string())
        .map_err(|e| CliError::io(path, e))
}

fn build_series(h: &TrigPoly, text: &str, order: usize) -> Result<ConformalSeries, CliError> {
    Ok(ConformalSeries::build(h, order)?.with_digest(one_line(text)))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let run = Run { cli, cfg };
    let text = run.hamiltonian_text()?;
    let h = parse_hamiltonian(&text).map_err(|e| {
        if let Some(pos) = e.position() {
            eprintln!("  {text}");
            eprintln!("  {}^", " ".repeat(text[..pos.min(text.len())].chars().count()));
        }
        CliError::from(e)
    })?;
    let output = run.output()?;
    let out = output.as_deref();

    match &run.cli.command {
        Command::Expand { format } => {
            let mut meta = run.meta(&text, 0, 1);
            meta.extra.push(("terms".into(), h.len().to_string()));
            let body = match format {
                ExpandFormat::Terms => h.to_debug_text(),
                ExpandFormat::Expression => to_expression(&h).unwrap_or_default() + "\n",
            };
            write_atomic(out, |w| {
                meta.write(w)?;
                w.write_all(body.as_bytes())
            })
        }
        Command::Series { coord } => {
            let order = run.order()?;
            let which = match coord {
                CoordArg::Z => Coord::Z,
                CoordArg::Zbar => Coord::Zbar,
            };
            let s = build_lie_series(&h, which, order)?;
            let mut meta = run.meta(&text, order, 1);
            meta.extra.push(("coordinate".into(), format!("{which:?}").to_lowercase()));
            write_atomic(out, |w| {
                meta.write(w)?;
                for k in 1..=order {
                    writeln!(w, "# w_{k}")?;
                    w.write_all(s.w(k).to_debug_text().as_bytes())?;
                }
                Ok(())
            })
        }
        Command::Field { t } => {
            let t = run.required_f64(*t, "t")?;
            let (order, g, threads) = (run.order()?, run.grid(DEFAULT_GRID)?, run.threads()?);
            let opts = LatticeOptions { threads, epsilon_blowup: run.epsilon()? };
            let cs = build_series(&h, &text, order)?;
            let fg = evaluate_field_with(&cs, g, t, run.mode()?, &opts)?;
            let meta = Metadata::for_field(&fg, VERSION);
            write_atomic(out, |w| write_field_csv(w, &fg, &meta))
        }
        Command::Signmap { t, csv } => {
            let t = run.required_f64(*t, "t")?;
            let csv: Option<PathBuf> = run.cfg.pick(csv.clone(), "csv")?;
            let (order, g, threads) = (run.order()?, run.grid(DEFAULT_GRID)?, run.threads()?);
            let opts = LatticeOptions { threads, epsilon_blowup: run.epsilon()? };
            let cs = build_series(&h, &text, order)?;
            let fg = evaluate_field_with(&cs, g, t, run.mode()?, &opts)?;
            let sm = sign_map(&fg);
            let meta = Metadata::for_field(&fg, VERSION);
            write_atomic(out, |w| write_signmap_pgm(w, &sm, &meta))?;
            if let Some(p) = csv {
                write_atomic(Some(&p), |w| write_signmap_csv(w, &sm, &meta))?;
            }
            Ok(())
        }
        Command::Errmap { samples_s, t_min, t_max, samples_t } => {
            let c = &run.cfg;
            let samples_s = c.pick(*samples_s, "samples_s")?.unwrap_or(50);
            let samples_t = c.pick(*samples_t, "samples_t")?.unwrap_or(201);
            let t_min = c.pick(*t_min, "t_min")?.unwrap_or(-1.0);
            let t_max = c.pick(*t_max, "t_max")?.unwrap_or(1.0);
            if samples_s < 1 || samples_t < 1 || t_min > t_max {
                return Err(CliError::Usage("errmap needs positive sample counts and t-min ≤ t-max".into()));
            }
            let (order, threads, base) = (run.order()?, run.threads()?, run.log_base()?);
            if order < 2 {
                return Err(CliError::Usage("errmap needs --order of at least 2".into()));
            }
            let cs = build_series(&h, &text, order)?;
            let rows = diagonal_errmap(&cs, samples_s, t_min, t_max, samples_t, base, threads)?;
            let mut meta = run.meta(&text, order, threads);
            meta.grid = Some(samples_s);
            meta.t = Some(format!("{}..{} ({samples_t} samples)", format_float(t_min), format_float(t_max)));
            meta.mode = Some(EvalMode::Polynomial.name().into());
            meta.extra.push(("log_base".into(), base.map_or_else(|| "e".into(), |b| b.to_string())));
            meta.extra.push(("diagonal".into(), "x = y = s, s in [0, 0.5]".into()));
            write_atomic(out, |w| write_errmap_csv(w, &rows, &meta))
        }
        Command::Critical { direction, t_max, coarse_step, tol } => {
            let c = &run.cfg;
            let flag_dir = direction.map(|d| match d {
                DirectionArg::Pos => TimeDirection::Positive,
                DirectionArg::Neg => TimeDirection::Negative,
            });
            let dir = c.pick(flag_dir, "direction")?.unwrap_or(TimeDirection::Positive);
            let defaults = CriticalOptions::default();
            let (order, threads, mode, eps) = (run.order()?, run.threads()?, run.mode()?, run.epsilon()?);
            let opts = CriticalOptions {
                grid: run.grid(DEFAULT_CRITICAL_GRID)?,
                t_max: c.pick(*t_max, "t_max")?.unwrap_or(defaults.t_max),
                coarse_step: c.pick(*coarse_step, "coarse_step")?.unwrap_or(defaults.coarse_step),
                tol: c.pick(*tol, "tol")?.unwrap_or(defaults.tol),
                mode,
                lattice: LatticeOptions { threads, epsilon_blowup: eps },
            };
            let cs = build_series(&h, &text, order)?;
            let line = match critical_time(&cs, dir, &opts)? {
                CriticalTime::At(t) => format!("{t:.6}"),
                CriticalTime::NoDegeneration => "no degeneration in range".to_string(),
            };
            let mut meta = run.meta(&text, order, threads);
            meta.grid = Some(opts.grid);
            meta.mode = Some(mode.name().into());
            meta.epsilon_blowup = Some(eps);
            meta.extra.push(("direction".into(), format!("{dir:?}").to_lowercase()));
            match out {
                None => {
                    println!("{line}");
                    Ok(())
                }
                Some(_) => write_atomic(out, |w| {
                    meta.write(w)?;
                    writeln!(w, "{line}")
                }),
            }
        }
        Command::Flow { x0, y0, t, steps } => {
            let x0 = run.required_f64(*x0, "x0")?;
            let y0 = run.required_f64(*y0, "y0")?;
            let t = run.required_f64(*t, "t")?;
            let steps = run.cfg.pick(*steps, "steps")?.unwrap_or(100);
            let traj = real_flow_trajectory(&h, x0, y0, t, steps, &StepControl::default())?;
            let mut meta = run.meta(&text, 0, 1);
            meta.t = Some(format!("0..{}", format_float(t)));
            meta.extra.push(("start".into(), format!("({x0}, {y0})")));
            meta.extra.push(("integrator".into(), "Dormand-Prince 5(4), tol 1e-12".into()));
            write_atomic(out, |w| {
                meta.write(w)?;
                writeln!(w, "t,x,y")?;
                for (t, x, y) in &traj {
                    writeln!(w, "{},{},{}", format_float(*t), format_float(*x), format_float(*y))?;
                }
                Ok(())
            })
        }
    }
}
