use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use writhe_core::corpus::{run_suite, CheckOutcome, SuiteConfig};
use writhe_core::deform::{correct_writhe, DeformOptions, DeformTrace, DEFAULT_S0, DEFAULT_WIDTH, TOL_WRITHE};
use writhe_core::family::{max_deviation, CurveFamily, SpaceKind};
use writhe_core::indicatrix::{fuller_check, tangent_indicatrix, IndicatrixReport};
use writhe_core::io::{read_curve, read_manifest, write_curve, write_family, write_points, FamilyManifest};
use writhe_core::report::fmt_sig;
use writhe_core::writhe::{cross_validate, WritheReport, DEFAULT_BAND};
use writhe_core::{correct_family, omega_homotopy, phi_homotopy};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "writhe", version, about = "Writhe, Fuller's relation and writhe-fixing deformations of closed curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Curve file, or family manifest for family commands.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Override the sample count N.
    #[arg(long)]
    n_samples: Option<usize>,
    /// Diagonal exclusion band for the quadrature.
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks; recorded in every report.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Writhe by quadrature and by the polygonal oracle.
    Writhe(Common),
    /// Fuller relation report for one curve.
    Fuller(Common),
    /// Deform a curve to the target writhe.
    FixWrithe {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        #[arg(long, default_value_t = DEFAULT_S0)]
        s0: f64,
        #[arg(long, default_value_t = DEFAULT_WIDTH)]
        width: f64,
    },
    /// Correct every node of a family to a common writhe.
    FamilyCorrect(Common),
    /// Emit the homotopy between a family and its correction at time t.
    HomotopySample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
    },
    /// Run the full acceptance suite over the analytic corpus.
    Corpus(Common),
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    input: Option<String>,
    n_samples: Option<usize>,
    band: usize,
    seed: u64,
}

impl Common {
    fn meta<'a>(&self, command: &'a str) -> RunMeta<'a> {
        RunMeta {
            command,
            input: self.input.as_ref().map(|p| p.display().to_string()),
            n_samples: self.n_samples,
            band: self.band,
            seed: self.seed,
        }
    }

    fn input(&self) -> anyhow::Result<&Path> {
        match &self.input {
            Some(p) => Ok(p),
            None => bail!(UsageError("--input is required".into())),
        }
    }

    fn out_dir(&self) -> anyhow::Result<Option<&Path>> {
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(self.out.as_deref())
    }

    fn manifest(&self) -> anyhow::Result<(FamilyManifest, CurveFamily)> {
        let path = self.input()?;
        let manifest = read_manifest(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let family = manifest.load(dir, self.n_samples)?;
        Ok((manifest, family))
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_writhe(c: &Common) -> anyhow::Result<bool> {
    let curve = read_curve(c.input()?, c.n_samples)?;
    let (quad, poly) = cross_validate(&curve, c.band)?;
    let mut csv = format!("{}\n{}\n{}\n", WritheReport::CSV_HEADER, quad.csv_row(), poly.csv_row());
    print!("{csv}");
    if let Some(dir) = c.out_dir()? {
        #[derive(Serialize)]
        struct Out<'a> {
            run: RunMeta<'a>,
            quadrature: &'a WritheReport,
            polygonal: &'a WritheReport,
        }
        write_json(&dir.join("writhe.json"), &Out { run: c.meta("writhe"), quadrature: &quad, polygonal: &poly })?;
        csv.insert_str(0, &format!("# seed={}\n", c.seed));
        fs::write(dir.join("writhe.csv"), csv)?;
    }
    Ok(true)
}

fn cmd_fuller(c: &Common) -> anyhow::Result<bool> {
    let curve = read_curve(c.input()?, c.n_samples)?;
    let report = fuller_check(&curve)?;
    let csv = format!("{}\n{}\n", IndicatrixReport::CSV_HEADER, report.csv_row());
    print!("{csv}");
    if let Some(dir) = c.out_dir()? {
        #[derive(Serialize)]
        struct Out<'a> {
            run: RunMeta<'a>,
            report: &'a IndicatrixReport,
        }
        write_json(&dir.join("fuller.json"), &Out { run: c.meta("fuller"), report: &report })?;
        fs::write(dir.join("fuller.csv"), format!("# seed={}\n{csv}", c.seed))?;
        write_points(&dir.join("indicatrix.json"), &tangent_indicatrix(&curve)?)?;
    }
    Ok(report.residual_mod2 < 1e-2)
}

fn cmd_fix(c: &Common, target: f64, s0: f64, width: f64) -> anyhow::Result<bool> {
    let curve = read_curve(c.input()?, c.n_samples)?;
    let options = DeformOptions {
        s0,
        width,
        ..DeformOptions::default()
    };
    let fixed = correct_writhe(&curve, target, &options)?;
    let fuller = fuller_check(&fixed.curve)?;
    let t = &fixed.trace;
    let ok = (t.wr_output - target).abs() < TOL_WRITHE
        && t.embedded_after
        && t.locality_ok
        && fuller.residual_mod2 < 1e-2;
    println!("wr_input,wr_tilde,w_applied,n,wr_output,target,min_distance,residual_mod2");
    println!(
        "{},{},{},{},{},{},{},{}",
        fmt_sig(t.wr_input),
        fmt_sig(t.wr_tilde),
        fmt_sig(t.w_applied),
        t.helix.n,
        fmt_sig(t.wr_output),
        fmt_sig(target),
        fmt_sig(t.min_distance_after),
        fmt_sig(fuller.residual_mod2)
    );
    if let Some(dir) = c.out_dir()? {
        write_curve(&dir.join("corrected.json"), &fixed.curve)?;
        #[derive(Serialize)]
        struct Out<'a> {
            run: RunMeta<'a>,
            trace: &'a DeformTrace,
            fuller: &'a IndicatrixReport,
        }
        write_json(&dir.join("trace.json"), &Out { run: c.meta("fix-writhe"), trace: t, fuller: &fuller })?;
    }
    Ok(ok)
}

fn summary_csv(family: &CurveFamily) -> String {
    let mut out = String::from("node_id,dist,wr_raw,wr_tilde,w,wr_final\n");
    for (i, (t, node)) in family.traces.iter().zip(&family.space.nodes).enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            fmt_sig(node.dist),
            fmt_sig(t.wr_input),
            fmt_sig(t.wr_tilde),
            fmt_sig(t.w_applied),
            fmt_sig(t.wr_output)
        ));
    }
    out
}

#[derive(Serialize)]
struct FamilyRun<'a> {
    run: RunMeta<'a>,
    omega: Option<f64>,
    turns: Option<u32>,
    epsilon: Option<f64>,
    max_deviation: Option<f64>,
    max_adjacent_gap_raw: f64,
    max_adjacent_gap_corrected: f64,
}

fn cmd_family(c: &Common) -> anyhow::Result<bool> {
    let (manifest, raw) = c.manifest()?;
    let fixed = correct_family(&raw, &DeformOptions::default())?;
    let dev = max_deviation(&fixed).unwrap_or(f64::INFINITY);
    let csv = summary_csv(&fixed);
    print!("{csv}");
    println!(
        "omega = {}, n = {}, max |Wr - omega| = {}",
        fmt_sig(fixed.omega.unwrap_or(f64::NAN)),
        fixed.turns.unwrap_or(0),
        fmt_sig(dev)
    );
    if let Some(dir) = c.out_dir()? {
        write_family(&dir.join("corrected"), &fixed, &manifest.space)?;
        fs::write(dir.join("summary.csv"), &csv)?;
        write_json(&dir.join("traces.json"), &fixed.traces)?;
        write_json(
            &dir.join("run.json"),
            &FamilyRun {
                run: c.meta("family-correct"),
                omega: fixed.omega,
                turns: fixed.turns,
                epsilon: fixed.traces.first().map(|t| t.context.epsilon),
                max_deviation: Some(dev),
                max_adjacent_gap_raw: raw.max_adjacent_gap(),
                max_adjacent_gap_corrected: fixed.max_adjacent_gap(),
            },
        )?;
    }
    Ok(dev < TOL_WRITHE)
}

fn cmd_homotopy(c: &Common, t: f64) -> anyhow::Result<bool> {
    let (manifest, raw) = c.manifest()?;
    let options = DeformOptions::default();
    let fixed = correct_family(&raw, &options)?;
    let snap = match raw.space.kind {
        SpaceKind::Sphere { .. } => omega_homotopy(&raw, &fixed, t)?,
        SpaceKind::SphereCrossInterval { .. } => phi_homotopy(&raw, &fixed, t)?,
    };
    let writhes = snap.writhes(&options)?;
    let mut csv = String::from("node_id,dist,t,writhe\n");
    for (i, (w, node)) in writhes.iter().zip(&snap.space.nodes).enumerate() {
        csv.push_str(&format!("{i},{},{},{}\n", fmt_sig(node.dist), fmt_sig(t), fmt_sig(*w)));
    }
    print!("{csv}");
    if let Some(dir) = c.out_dir()? {
        write_family(&dir.join("snapshot"), &snap, &manifest.space)?;
        fs::write(dir.join("writhe.csv"), &csv)?;
        #[derive(Serialize)]
        struct Out<'a> {
            run: RunMeta<'a>,
            t: f64,
            omega: Option<f64>,
            turns: Option<u32>,
        }
        write_json(
            &dir.join("run.json"),
            &Out { run: c.meta("homotopy-sample"), t, omega: fixed.omega, turns: fixed.turns },
        )?;
    }
    Ok(true)
}

fn cmd_corpus(c: &Common) -> anyhow::Result<bool> {
    let config = SuiteConfig {
        seed: c.seed,
        band: c.band,
        n_samples: c.n_samples.unwrap_or(SuiteConfig::default().n_samples),
        ..SuiteConfig::default()
    };
    let outcomes = run_suite(&config, |o| println!("{}", o.line()));
    let passed = outcomes.iter().all(|o| o.passed);
    if let Some(dir) = c.out_dir()? {
        let mut csv = String::from("criterion,name,passed,detail\n");
        for o in &outcomes {
            csv.push_str(&format!("{},{},{},\"{}\"\n", o.id, o.name, o.passed, o.detail.replace('"', "'")));
        }
        fs::write(dir.join("corpus.csv"), csv)?;
        #[derive(Serialize)]
        struct Entry<'a> {
            id: u32,
            name: &'a str,
            passed: bool,
            detail: &'a str,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            run: RunMeta<'a>,
            config: &'a SuiteConfig,
            criteria: Vec<Entry<'a>>,
        }
        let criteria = outcomes
            .iter()
            .map(|o: &CheckOutcome| Entry { id: o.id, name: &o.name, passed: o.passed, detail: &o.detail })
            .collect();
        write_json(&dir.join("corpus.json"), &Out { run: c.meta("corpus"), config: &config, criteria })?;
    }
    Ok(passed)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Writhe(c) => cmd_writhe(c),
        Command::Fuller(c) => cmd_fuller(c),
        Command::FixWrithe { common, target, s0, width } => cmd_fix(common, *target, *s0, *width),
        Command::FamilyCorrect(c) => cmd_family(c),
        Command::HomotopySample { common, t } => cmd_homotopy(common, *t),
        Command::Corpus(c) => cmd_corpus(c),
    }
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<writhe_core::Error>() {
        e.kind()
    } else if err.downcast_ref::<UsageError>().is_some() {
        "usage"
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else {
        "internal"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}", serde_json::json!({"error": "check_failed", "message": "one or more invariants did not hold"}));
            ExitCode::from(1)
        }
        Err(err) => {
            let message = match err.downcast_ref::<writhe_core::Error>() {
                Some(e) => e.to_string(),
                None => format!("{err:#}"),
            };
            eprintln!("{}", serde_json::json!({"error": error_kind(&err), "message": message}));
            ExitCode::from(2)
        }
    }
}
