use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use log::info;
use orbitlab_core::golden::{checks, run_checks};
use orbitlab_core::measures::{exact_to_f64, left_heavy_count};
use orbitlab_core::modarith::MAX_MODULUS;
use orbitlab_core::outliers::{distance_histogram, survey_denominators, survey_many};
use orbitlab_core::symbolic::{pgm_file_name, render_orbit};
use orbitlab_core::{
    cdf_points, decompose, histogram, is_symmetric, ks_distance_exact, mirror, orbit_of,
    pushforward, select_outliers, shadow_report, Error, Method, Modulus, Orbit, Pushforward,
};
use serde::Serialize;

use crate::config::Config;
use crate::store::{CriterionMismatch, SurveyStore};

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input (exit 2).
    Usage(anyhow::Error),
    /// At least one golden check failed (exit 1).
    Verification(usize),
    /// I/O or other runtime failure (exit 1).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "{e:#}"),
            Failure::Verification(n) => write!(f, "{n} verification check(s) failed"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        if e.is::<CriterionMismatch>() {
            return Failure::Usage(e);
        }
        match e.downcast_ref::<Error>() {
            Some(Error::FactorizationBound { .. }) | None => Failure::Runtime(e),
            Some(_) => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// One row of `decompose` output.
#[derive(Debug, Serialize)]
struct OrbitRow {
    level: u64,
    rep: u64,
    seed: String,
    length: usize,
    distance: String,
    distance_f64: f64,
    symmetric: bool,
}

fn row(o: &Orbit) -> OrbitRow {
    let d = ks_distance_exact(o);
    OrbitRow {
        level: o.level_gcd(),
        rep: o.representative(),
        seed: o.seed().to_string(),
        length: o.len(),
        distance: d.to_string(),
        distance_f64: exact_to_f64(&d),
        symmetric: is_symmetric(o),
    }
}

pub fn decompose_cmd(n: u64, method: Method, format: Format, out: &mut dyn Write) -> CmdResult {
    let m = Modulus::new(n)?;
    let d = decompose(m, method)?;
    let rows: Vec<OrbitRow> = d.orbits.iter().map(row).collect();
    match format {
        Format::Table => {
            writeln!(out, "n = {n}: {} orbits ({:?})", rows.len(), method)?;
            writeln!(
                out,
                "{:>8} {:>10} {:>16} {:>8} {:>12}  {:<9} distance",
                "level", "rep", "seed", "length", "distance_f64", "symmetric"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>8} {:>10} {:>16} {:>8} {:>12.6}  {:<9} {}",
                    r.level, r.rep, r.seed, r.length, r.distance_f64, r.symmetric, r.distance
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows).map_err(anyhow::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &rows {
                w.serialize(r).map_err(anyhow::Error::from)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub struct SurveyArgs {
    pub from: u64,
    pub to: u64,
    pub histogram_ns: Vec<u64>,
    pub hist_upper: f64,
    pub chunk: usize,
}

pub fn survey_cmd(cfg: &Config, args: &SurveyArgs, out: &mut dyn Write) -> CmdResult {
    if args.from < 5 || args.from > args.to || args.to > MAX_MODULUS {
        return Err(usage(format!(
            "survey range must satisfy 5 <= from <= to <= {MAX_MODULUS}, got {}..{}",
            args.from, args.to
        )));
    }
    if !(args.hist_upper > 0.0) || args.chunk == 0 {
        return Err(usage("--hist-upper and --chunk must be positive"));
    }
    for &n in &args.histogram_ns {
        Modulus::new(n)?;
        if n < args.from || n > args.to {
            return Err(usage(format!("histogram denominator {n} is outside the survey range")));
        }
    }
    let crit = cfg.criterion()?;
    let mut store = SurveyStore::open(&cfg.output_dir, &crit)?;
    let todo: Vec<u64> = survey_denominators(args.from..=args.to)
        .filter(|&n| !store.contains_n(n))
        .collect();
    let total = survey_denominators(args.from..=args.to).count();
    info!(
        "surveying {} of {total} denominators in {}..={} with {} worker(s); {} already stored",
        todo.len(),
        args.from,
        args.to,
        cfg.workers,
        total - todo.len()
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(anyhow::Error::from)?;
    let start = Instant::now();
    let mut done = 0;
    for chunk in todo.chunks(args.chunk) {
        let results = pool.install(|| survey_many(chunk, &crit));
        let mut batch = Vec::new();
        for (_, res) in results {
            batch.extend(res?);
        }
        store.append(batch)?;
        done += chunk.len();
        info!(
            "{done}/{} denominators (up to n = {}) in {:.1?}",
            todo.len(),
            chunk[chunk.len() - 1],
            start.elapsed()
        );
    }
    store.finalize()?;

    for &n in &args.histogram_ns {
        let path = cfg.output_dir.join(format!("distances_{n}.csv"));
        write_distance_histogram(&path, &store, n, cfg.bins, args.hist_upper)?;
    }

    let in_range: Vec<_> = store
        .records()
        .filter(|r| r.n >= args.from && r.n <= args.to)
        .cloned()
        .collect();
    let significant = in_range.iter().filter(|r| r.is_significant(&crit)).count();
    let raw = in_range.iter().filter(|r| r.outlier).count();
    let kept = select_outliers(&in_range, &crit);
    writeln!(
        out,
        "{total} denominators, {} unit-level orbits, {significant} long left-heavy, {raw} outliers ({} up to mirroring)",
        in_range.len(),
        kept.len()
    )?;
    for r in &kept {
        writeln!(
            out,
            "outlier {}/{}  length {}  distance {} ({:.6})",
            r.rep, r.n, r.length, r.distance, r.distance_f64
        )?;
    }
    writeln!(out, "store: {}", store.dir().display())?;
    Ok(())
}

fn write_distance_histogram(
    path: &Path,
    store: &SurveyStore,
    n: u64,
    bins: usize,
    upper: f64,
) -> anyhow::Result<()> {
    let counts = distance_histogram(store.records_for(n), bins, upper);
    let total: u64 = counts.iter().sum();
    let width = upper / bins as f64;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["bin_lo", "bin_hi", "density"])?;
    for (i, c) in counts.iter().enumerate() {
        let density = if total == 0 {
            0.0
        } else {
            *c as f64 / (total as f64 * width)
        };
        w.serialize((i as f64 * width, (i + 1) as f64 * width, density))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Default)]
pub struct OrbitArgs {
    pub k: u64,
    pub n: u64,
    pub histogram: bool,
    pub cdf: bool,
    pub bitmap: bool,
    pub pbm: bool,
    pub size: usize,
    pub shadow: bool,
    pub pushforward: Option<u64>,
}

pub fn orbit_cmd(cfg: &Config, args: &OrbitArgs, out: &mut dyn Write) -> CmdResult {
    if args.size == 0 {
        return Err(usage("--size must be positive"));
    }
    let o = orbit_of(args.k, args.n, true)?;
    let (den, rep) = (o.denominator().get(), o.representative());
    let d = ks_distance_exact(&o);
    let (left, right) = left_heavy_count(&o);
    writeln!(out, "{o}")?;
    writeln!(out, "denominator {den}, representative {rep}, length {}", o.len())?;
    writeln!(
        out,
        "symmetric {}, left {left}, right {right}",
        is_symmetric(&o)
    )?;
    writeln!(out, "distance {d} ({:.9})", exact_to_f64(&d))?;

    let mut files: Vec<PathBuf> = Vec::new();
    let wants_files = args.histogram || args.cdf || args.bitmap || args.pbm;
    if wants_files {
        fs::create_dir_all(&cfg.output_dir)
            .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    }
    if args.histogram {
        let path = cfg.output_dir.join(format!("hist_{den}_{rep}.csv"));
        let h = histogram::<f64>(&o, cfg.bins);
        let mut w = csv::Writer::from_path(&path).map_err(anyhow::Error::from)?;
        w.write_record(["bin_lo", "bin_hi", "density"]).map_err(anyhow::Error::from)?;
        for (i, dens) in h.densities.iter().enumerate() {
            let (lo, hi) = h.bin_edges(i);
            w.serialize((lo, hi, dens)).map_err(anyhow::Error::from)?;
        }
        w.flush()?;
        files.push(path);
    }
    if args.cdf {
        let path = cfg.output_dir.join(format!("cdf_{den}_{rep}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(anyhow::Error::from)?;
        w.write_record(["x", "F_pre", "F_post"]).map_err(anyhow::Error::from)?;
        for p in cdf_points::<f64>(&o) {
            w.serialize((p.x, p.before, p.after)).map_err(anyhow::Error::from)?;
        }
        w.flush()?;
        files.push(path);
    }
    if args.bitmap || args.pbm {
        let b = render_orbit(&o, args.size, args.size);
        writeln!(
            out,
            "bitmap {}x{} of {}: {} white, {} black",
            b.width(),
            b.height(),
            b.seed(),
            b.white_count(),
            b.black_count()
        )?;
        if args.bitmap {
            let path = cfg.output_dir.join(pgm_file_name(den, rep));
            b.write_pgm(BufWriter::new(fs::File::create(&path)?))?;
            files.push(path);
        }
        if args.pbm {
            let path = cfg
                .output_dir
                .join(pgm_file_name(den, rep))
                .with_extension("pbm");
            b.write_pbm(BufWriter::new(fs::File::create(&path)?))?;
            files.push(path);
        }
    }
    if args.shadow {
        match shadow_report::<f64>(&o, cfg.eps) {
            Ok(r) => {
                writeln!(
                    out,
                    "shadow (eps {}): uniform expectation {:.2}, near 0: {}",
                    r.eps, r.uniform_expectation, r.near_zero
                )?;
                for c in &r.centers {
                    writeln!(out, "  near {:>3}: {}", c.label, c.count)?;
                }
                writeln!(
                    out,
                    "  predicted near 1/2: {:.1}, near 1/3 and 2/3: {:.1} each",
                    r.prediction.near_half, r.prediction.near_third_each
                )?;
            }
            Err(Error::NoNearZeroMass) => {
                writeln!(out, "shadow (eps {}): no atoms near 0", cfg.eps)?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(q) = args.pushforward {
        if q == 0 {
            return Err(usage("--pushforward needs a positive multiplier"));
        }
        match pushforward(&o, q) {
            Pushforward::Zero => writeln!(out, "{q} x {o} = the point 0")?,
            Pushforward::Orbit(img) => {
                writeln!(out, "{q} x orbit = {img}")?;
                if !is_symmetric(&img) {
                    writeln!(out, "  mirror image of {}", mirror(&img))?;
                }
                let di = ks_distance_exact(&img);
                writeln!(
                    out,
                    "  distance {di} ({:.9}), symmetric {}",
                    exact_to_f64(&di),
                    is_symmetric(&img)
                )?;
            }
        }
    }
    for f in files {
        writeln!(out, "wrote {}", f.display())?;
    }
    Ok(())
}

pub fn verify_cmd(quick: bool, out: &mut dyn Write) -> CmdResult {
    let outcomes = run_checks(&checks(), quick);
    let mut failed = 0;
    for o in &outcomes {
        match (&o.result, o.skipped) {
            (_, true) => writeln!(out, "SKIP {}", o.name)?,
            (Ok(()), false) => writeln!(out, "PASS {}", o.name)?,
            (Err(e), false) => {
                failed += 1;
                writeln!(out, "FAIL {}: {e}", o.name)?;
            }
        }
    }
    let skipped = outcomes.iter().filter(|o| o.skipped).count();
    writeln!(
        out,
        "{} passed, {failed} failed, {skipped} skipped",
        outcomes.len() - failed - skipped
    )?;
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}
