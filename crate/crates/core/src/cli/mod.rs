//! Command-line workflows. Every data file is written deterministically and
//! gets a `<file>.manifest.json` sidecar carrying parameters, input hashes
//! and wall time.

mod sweep;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::dynamics::reduce_to_min;
use crate::ensemble::{enumerate_configs, volume_polynomial, ConfigSet, DEFAULT_CAP};
use crate::entanglement::{central_cut, classify_scaling, exact_entropy};
use crate::error::{Error, Result};
use crate::geometry::{build_disk_region, build_hexagon_region, validate_region, LatticeRegion};
use crate::mcmc::{run_chains, write_series_csv, ChainParams, Proposal};
use crate::numeric::Deformation;
use crate::spectral::{colored_microcheck, spectral_report};
use crate::tiling::{validate_config, volume, HeightConfig};

pub use sweep::{run_sweep, splitmix64, write_sweep_csv, ChainSpec, SweepConfig, SweepMode, SweepRow};

/// Version stamped into every JSON output.
pub const SCHEMA_VERSION: &str = "1.0";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Rejects documents from an unknown major schema version. Documents
/// without a version are accepted.
pub fn check_schema(doc: &Value) -> Result<()> {
    let Some(v) = doc.get("schema_version") else {
        return Ok(());
    };
    let s = v.as_str().ok_or_else(|| Error::Format("schema_version must be a string".into()))?;
    let major = |x: &str| x.split('.').next().map(str::to_owned);
    if major(s) != major(SCHEMA_VERSION) {
        return Err(Error::Format(format!("unsupported schema version {s} (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "lozenge", version, about = "Colored lozenge tilings: enumeration, sampling, spectra, entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a region and write its JSON form.
    Region(RegionArgs),
    /// Check a region file, and optionally a configuration against it.
    Validate(ValidateArgs),
    /// Enumerate all configurations of a region.
    Enumerate(EnumerateArgs),
    /// Exact entanglement entropy over an enumerated set.
    Entropy(EntropyArgs),
    /// Metropolis sampling of the volume-weighted ensemble.
    Sample(SampleArgs),
    /// Hamiltonian ground-state check and spectral gap.
    Gap(GapArgs),
    /// Greedy reduction of a configuration to the minimal tiling.
    Reduce(ReduceArgs),
    /// Colored reduced-density-matrix check on a tiny region.
    Microcheck(MicroArgs),
    /// Classify a size series as area, L log L or volume scaling.
    Scaling(ScalingArgs),
    /// Run a grid of (L, q) cells, exact or sampled.
    Sweep(SweepArgs),
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

fn parse_triple(s: &str) -> std::result::Result<[u32; 3], String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad hexagon side in {s}")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected a,b,c, got {s}"))
}

#[derive(Debug, Args, Serialize)]
pub struct RegionArgs {
    /// Linear size L of the quasi-circular region (even).
    #[arg(long)]
    pub size: Option<u32>,
    /// Build the boxed hexagon with sides a,b,c instead.
    #[arg(long, value_parser = parse_triple)]
    pub hexagon: Option<[u32; 3]>,
    /// Sublattice of the superlattice cell centres (disk regions).
    #[arg(long, default_value_t = 0)]
    pub cell_sublattice: u8,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub region: PathBuf,
    /// Binary set file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_CAP as u64)]
    pub cap: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub q: String,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long)]
    pub q: String,
    #[arg(long, value_parser = parse_count)]
    pub steps: u64,
    #[arg(long, value_parser = parse_count, default_value_t = 0)]
    pub burnin: u64,
    #[arg(long, value_parser = parse_count, default_value_t = 1)]
    pub thinning: u64,
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub heat_bath: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Series of the first chain.
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GapArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReduceArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MicroArgs {
    #[arg(long)]
    pub region: PathBuf,
    #[arg(long)]
    pub q: String,
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    /// CSV with columns L,q,s,value,stderr.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Consolidated CSV; defaults to `sweep.csv` in the configured directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance record written beside each output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub input_hashes: BTreeMap<String, String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

struct Ctx {
    command: &'static str,
    params: Value,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    start: Instant,
}

impl Ctx {
    fn new<A: Serialize>(command: &'static str, args: &A, seed: Option<u64>) -> Self {
        Ctx {
            command,
            params: serde_json::to_value(args).unwrap_or(Value::Null),
            seed,
            inputs: BTreeMap::new(),
            start: Instant::now(),
        }
    }

    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path)?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    fn read_json(&mut self, path: &Path) -> Result<Value> {
        let bytes = self.read(path)?;
        let doc: Value = serde_json::from_slice(&bytes)?;
        check_schema(&doc)?;
        Ok(doc)
    }

    fn region(&mut self, path: &Path) -> Result<LatticeRegion> {
        let doc = self.read_json(path)?;
        LatticeRegion::from_json(&doc)
    }

    fn set(&mut self, path: &Path) -> Result<ConfigSet> {
        let bytes = self.read(path)?;
        ConfigSet::read_from(&bytes[..])
    }

    fn manifest(&self, output: &Path) -> Result<()> {
        let m = RunManifest {
            schema_version: SCHEMA_VERSION.into(),
            command: self.command.into(),
            parameters: self.params.clone(),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            input_hashes: self.inputs.clone(),
            wall_time_s: self.start.elapsed().as_secs_f64(),
        };
        write_json_file(&RunManifest::path_for(output), &serde_json::to_value(m)?)
    }

    /// Writes `doc` to `out` with a manifest, or prints it.
    fn emit(&self, out: Option<&Path>, doc: &Value) -> Result<()> {
        match out {
            Some(p) => {
                write_json_file(p, doc)?;
                self.manifest(p)
            }
            None => {
                println!("{}", serde_json::to_string_pretty(doc)?);
                Ok(())
            }
        }
    }
}

pub fn write_json_file(path: &Path, doc: &Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn with_schema(mut doc: Value) -> Value {
    if let Value::Object(m) = &mut doc {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    doc
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_cap() {
                EXIT_RESOURCE
            } else {
                EXIT_INVALID
            }
        }
    }
}

/// Runs one command; `Ok` carries the exit code for reported validation
/// failures.
pub fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Region(a) => cmd_region(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Gap(a) => cmd_gap(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Microcheck(a) => cmd_microcheck(a),
        Command::Scaling(a) => cmd_scaling(a),
        Command::Sweep(a) => sweep::cmd_sweep(a),
    }
}

fn cmd_region(a: RegionArgs) -> Result<i32> {
    let ctx = Ctx::new("region", &a, None);
    let region = match (a.hexagon, a.size) {
        (Some([x, y, z]), _) => build_hexagon_region(x, y, z)?,
        (None, Some(l)) => build_disk_region(l, a.cell_sublattice)?,
        (None, None) => return Err(Error::InvalidParameter("either --size or --hexagon is required".into())),
    };
    ctx.emit(Some(&a.out), &region.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let mut ctx = Ctx::new("validate", &a, None);
    let region = ctx.region(&a.region)?;
    let mut violations: Vec<String> = validate_region(&region).iter().map(|v| v.to_string()).collect();
    if let Some(p) = &a.config {
        let doc = ctx.read_json(p)?;
        let h = HeightConfig::from_json(&doc, &region)?;
        violations.extend(validate_config(&region, &h).iter().map(|v| v.to_string()));
    }
    let valid = violations.is_empty();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "valid": valid,
        "violations": violations,
    });
    ctx.emit(a.out.as_deref(), &doc)?;
    Ok(if valid { EXIT_OK } else { EXIT_INVALID })
}

/// Summary document of an enumerated set.
pub fn set_summary(set: &ConfigSet) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "region_hash": set.region().hash_hex(),
        "count": set.len(),
        "V_min": set.v_min(),
        "V_max": set.v_max(),
        "volume_polynomial": volume_polynomial(set),
        "connected": set.is_connected(),
    })
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<i32> {
    let mut ctx = Ctx::new("enumerate", &a, None);
    let region = ctx.region(&a.region)?;
    let set = enumerate_configs(&region, a.cap as usize)?;
    if let Some(p) = &a.out {
        let mut w = BufWriter::new(File::create(p)?);
        set.write_to(&mut w)?;
        w.flush()?;
        ctx.manifest(p)?;
    }
    ctx.emit(a.summary.as_deref(), &set_summary(&set))?;
    Ok(EXIT_OK)
}

fn cmd_entropy(a: EntropyArgs) -> Result<i32> {
    let mut ctx = Ctx::new("entropy", &a, None);
    let q: Deformation = a.q.parse()?;
    let set = ctx.set(&a.set)?;
    let cut = central_cut(set.region())?;
    let rep = exact_entropy(&set, &q, a.s, &cut)?;
    ctx.emit(a.out.as_deref(), &with_schema(serde_json::to_value(rep)?))?;
    Ok(EXIT_OK)
}

fn cmd_sample(a: SampleArgs) -> Result<i32> {
    let mut ctx = Ctx::new("sample", &a, Some(a.seed));
    let q: Deformation = a.q.parse()?;
    let region = ctx.region(&a.region)?;
    let params = ChainParams {
        thinning: a.thinning,
        chains: a.chains,
        proposal: if a.heat_bath { Proposal::HeatBath } else { Proposal::Metropolis },
        ..ChainParams::new(q.value(), a.steps, a.burnin, a.seed)
    };
    let (stats, series) = run_chains(&region, &params)?;
    if let Some(p) = &a.series {
        let mut w = BufWriter::new(File::create(p)?);
        write_series_csv(&mut w, &series[0])?;
        w.flush()?;
        ctx.manifest(p)?;
    }
    ctx.emit(a.out.as_deref(), &with_schema(serde_json::to_value(stats)?))?;
    Ok(EXIT_OK)
}

fn cmd_gap(a: GapArgs) -> Result<i32> {
    let mut ctx = Ctx::new("gap", &a, None);
    let q: Deformation = a.q.parse()?;
    let set = ctx.set(&a.set)?;
    let rep = spectral_report(&set, q.value())?;
    ctx.emit(a.out.as_deref(), &with_schema(serde_json::to_value(rep)?))?;
    Ok(EXIT_OK)
}

fn cmd_reduce(a: ReduceArgs) -> Result<i32> {
    let mut ctx = Ctx::new("reduce", &a, None);
    let region = ctx.region(&a.region)?;
    let doc = ctx.read_json(&a.config)?;
    let h = HeightConfig::from_json(&doc, &region)?;
    let bad = validate_config(&region, &h);
    if !bad.is_empty() {
        let msg: Vec<String> = bad.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidConfig(msg.join("; ")));
    }
    let moves = reduce_to_min(&region, &h)?;
    if let Some(p) = &a.trace {
        let mut w = csv::Writer::from_path(p).map_err(csv_err)?;
        w.write_record(["step", "vertex", "direction", "volume"]).map_err(csv_err)?;
        let mut v = volume(&h);
        for (i, m) in moves.iter().enumerate() {
            v += m.direction.delta() as i64;
            let dir = match m.direction {
                crate::dynamics::Direction::Raise => "raise",
                crate::dynamics::Direction::Lower => "lower",
            };
            w.write_record([(i + 1).to_string(), m.vertex.to_string(), dir.to_string(), v.to_string()])
                .map_err(csv_err)?;
        }
        w.flush()?;
        ctx.manifest(p)?;
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "moves": moves.len(),
        "initial_volume": volume(&h),
        "final_volume": volume(&h) - 3 * moves.len() as i64,
    });
    ctx.emit(None, &doc)?;
    Ok(EXIT_OK)
}

fn cmd_microcheck(a: MicroArgs) -> Result<i32> {
    let mut ctx = Ctx::new("microcheck", &a, None);
    let q: Deformation = a.q.parse()?;
    let region = ctx.region(&a.region)?;
    let rep = colored_microcheck(&region, &q, a.s)?;
    ctx.emit(a.out.as_deref(), &with_schema(serde_json::to_value(rep)?))?;
    Ok(EXIT_OK)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// One row of a scaling series file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub q: f64,
    pub s: u32,
    pub value: f64,
    pub stderr: f64,
}

pub fn read_series(bytes: &[u8]) -> Result<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_reader(BufReader::new(bytes));
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn cmd_scaling(a: ScalingArgs) -> Result<i32> {
    let mut ctx = Ctx::new("scaling", &a, None);
    let rows = read_series(&ctx.read(&a.input)?)?;
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.q != first.q || r.s != first.s) {
            return Err(Error::InvalidParameter("series mixes several (q, s) values".into()));
        }
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.l, r.value)).collect();
    let fit = classify_scaling(&pts)?;
    ctx.emit(a.out.as_deref(), &with_schema(serde_json::to_value(fit)?))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_exponents() {
        assert_eq!(parse_count("1e8"), Ok(100_000_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("1.5").is_err());
        assert_eq!(parse_triple("1,2,3"), Ok([1, 2, 3]));
    }

    #[test]
    fn schema_majors() {
        assert!(check_schema(&json!({"schema_version": "1.7"})).is_ok());
        assert!(check_schema(&json!({"schema_version": "2.0"})).is_err());
        assert!(check_schema(&json!({})).is_ok());
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["lozenge", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["lozenge", "region", "--bogus"]), EXIT_USAGE);
    }
}
