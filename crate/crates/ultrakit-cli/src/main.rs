//! Batch front end: parse input documents, run check suites, emit
//! deterministic reports. Exit 0 when every check passes, 1 when a check
//! fails (the report carries witnesses), 2 on input or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ultrakit::cat::cat_from_doc;
use ultrakit::descent::TopGroupoid;
use ultrakit::report::{CheckRecord, SuiteReport};
use ultrakit::sheaf::sheaf_from_doc;
use ultrakit::space::{
    etale_check, map_from_doc, space_from_doc, EtaleVerdict, FiniteSpace, PointFamily,
};
use ultrakit::suites;
use ultrakit::uf::parse::parse_ultrafilter;
use ultrakit::UpFamily;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// Seed for sampled suites; identical seeds give byte-identical reports.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest space size for exhaustive sweeps.
    #[arg(long)]
    max_points: Option<usize>,
    /// Fiber bound for sheaf enumerations.
    #[arg(long)]
    fiber_bound: Option<usize>,
    /// Period bound of the probe strategy.
    #[arg(long)]
    probe_period: Option<usize>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for independent instances.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(
    name = "ultrakit",
    about = "check suites for the decidable ultrafilter toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate space, category, groupoid, or sheaf documents.
    Validate {
        #[command(flatten)]
        common: CommonOpts,
        /// Input documents.
        files: Vec<PathBuf>,
    },
    /// Check a projection document for the étale property.
    Etale {
        #[command(flatten)]
        common: CommonOpts,
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
    /// Check ultraconvergence of a point family in a space document.
    Convergence {
        #[command(flatten)]
        common: CommonOpts,
        space: PathBuf,
        /// Candidate limit point.
        #[arg(long)]
        point: usize,
        /// Ultrafilter expression, e.g. `factorial` or `principal(nat,3)`.
        #[arg(long, default_value = "factorial")]
        uf: String,
        /// Periodic pattern of point values, e.g. `1,0`.
        #[arg(long)]
        pattern: String,
    },
    /// Topology ↔ convergence round trips (a file, or the generated sweep).
    RoundtripSpace {
        #[command(flatten)]
        common: CommonOpts,
        file: Option<PathBuf>,
    },
    /// Stalk reconstruction over every small space.
    Reconstruct {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Presheaf round trips over the small-category sweep.
    Alexandroff {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Effective-descent criterion plus the universality battery; also the
    /// equivariant-sheaf comparisons.
    Descent {
        #[command(flatten)]
        common: CommonOpts,
        /// Exploratory counterexample search attempts (informational).
        #[arg(long, default_value_t = 0)]
        explore: usize,
    },
    /// Ultrafilter laws and the structural coherence suites.
    Coherence {
        #[command(flatten)]
        common: CommonOpts,
        /// Randomized instances.
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// Exactness laws for sheaf categories.
    Laws {
        #[command(flatten)]
        common: CommonOpts,
        /// Randomized diagrams.
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
}

/// Defaults from `ULTRAKIT_BOUNDS`, e.g.
/// `max-points=3;fiber-bound=2;probe-period=4`. Flags win.
fn env_bounds() -> suites::Bounds {
    let mut bounds = suites::Bounds::default();
    if let Ok(spec) = std::env::var("ULTRAKIT_BOUNDS") {
        for part in spec.split(';') {
            let Some((key, value)) = part.split_once('=') else {
                continue;
            };
            let Ok(v) = value.trim().parse::<usize>() else {
                continue;
            };
            match key.trim() {
                "max-points" => bounds.max_points = v,
                "fiber-bound" => bounds.fiber_bound = v,
                "probe-period" => bounds.probe_period = v,
                _ => {}
            }
        }
    }
    bounds
}

fn resolve_bounds(common: &CommonOpts) -> suites::Bounds {
    let mut bounds = env_bounds();
    if let Some(v) = common.max_points {
        bounds.max_points = v;
    }
    if let Some(v) = common.fiber_bound {
        bounds.fiber_bound = v;
    }
    if let Some(v) = common.probe_period {
        bounds.probe_period = v;
    }
    bounds
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_space(path: &Path) -> Result<FiniteSpace> {
    space_from_doc(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Groupoid document: paths to the object/arrow space documents and the four
/// structure-map documents, plus inline composition rows in path order.
fn parse_groupoid(path: &Path) -> Result<TopGroupoid> {
    let doc = read(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut objects = None;
    let mut arrows = None;
    let mut maps: std::collections::BTreeMap<&str, PathBuf> = Default::default();
    let mut comp_rows: Vec<Vec<usize>> = Vec::new();
    for line in doc.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "objects" => objects = Some(parse_space(&dir.join(value))?),
            "arrows" => arrows = Some(parse_space(&dir.join(value))?),
            k @ ("src" | "tgt" | "unit" | "inv") => {
                let slot = match k {
                    "src" => "src",
                    "tgt" => "tgt",
                    "unit" => "unit",
                    _ => "inv",
                };
                maps.insert(slot, dir.join(value));
            }
            "comp" => {
                comp_rows.extend(parse_rows(value)?);
            }
            _ => {}
        }
    }
    let objects = objects.ok_or_else(|| anyhow!("groupoid document missing objects:"))?;
    let arrows = arrows.ok_or_else(|| anyhow!("groupoid document missing arrows:"))?;
    let read_map = |name: &str, src: &FiniteSpace, tgt: &FiniteSpace| -> Result<Vec<usize>> {
        let p = maps
            .get(name)
            .ok_or_else(|| anyhow!("groupoid document missing {name}:"))?;
        let m = map_from_doc(&read(p)?, src.clone(), tgt.clone())
            .map_err(|e| anyhow!("{}: {e}", p.display()))?;
        Ok(m.map)
    };
    let src = read_map("src", &arrows, &objects)?;
    let tgt = read_map("tgt", &arrows, &objects)?;
    let unit = read_map("unit", &objects, &arrows)?;
    let inverse = read_map("inv", &arrows, &arrows)?;
    let n1 = arrows.points();
    let mut compose = vec![vec![None; n1]; n1];
    for row in comp_rows {
        if row.len() != 3 || row.iter().any(|&v| v >= n1) {
            return Err(anyhow!("comp rows are [first,second,composite]"));
        }
        compose[row[0]][row[1]] = Some(row[2]);
    }
    Ok(TopGroupoid {
        objects,
        arrows,
        src,
        tgt,
        unit,
        inverse,
        compose,
    })
}

fn parse_rows(segment: &str) -> Result<Vec<Vec<usize>>> {
    let inner = segment
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| anyhow!("expected a bracketed list"))?;
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in inner.chars() {
        match c {
            '[' => {
                depth += 1;
                current.clear();
            }
            ']' => {
                depth = depth.saturating_sub(1);
                let row: std::result::Result<Vec<usize>, _> = current
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| p.trim().parse::<usize>())
                    .collect();
                out.push(row?);
            }
            _ if depth > 0 => current.push(c),
            _ => {}
        }
    }
    Ok(out)
}

/// Tagged instance descriptors: `instance: point | finset <k> |
/// space <path> | alex <path>`. Validation builds the instance and its
/// points category, which runs the category law checks.
fn parse_instance(path: &Path, doc: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let spec = doc
        .lines()
        .find_map(|l| l.trim().strip_prefix("instance:"))
        .ok_or_else(|| anyhow!("missing instance: line"))?
        .trim();
    let instance = match spec.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["point"] => ultrakit::vult::VUltInstance::Point,
        ["finset", k] => ultrakit::vult::VUltInstance::FinSet {
            bound: k.parse().context("finset bound")?,
        },
        ["space", rel] => ultrakit::vult::VUltInstance::PtSpace(parse_space(&dir.join(rel))?),
        ["alex", rel] => ultrakit::vult::VUltInstance::Alex(
            cat_from_doc(&read(&dir.join(rel))?).map_err(|e| anyhow!(e))?,
        ),
        other => return Err(anyhow!("unknown instance descriptor {other:?}")),
    };
    let _ = instance.points_category();
    Ok(())
}

fn validate_files(files: &[PathBuf]) -> Result<SuiteReport> {
    const SUITE: &str = "validate";
    let mut report = SuiteReport::new();
    for path in files {
        let name = path.display().to_string();
        let doc = read(path)?;
        let result = if doc.trim_start().starts_with("instance:") {
            parse_instance(path, &doc).map_err(|e| e.to_string())
        } else if doc.contains("points:") && doc.contains("opens:") {
            space_from_doc(&doc).map(|_| ()).map_err(|e| e.to_string())
        } else if doc.contains("src:") && doc.contains("arrows:") {
            match parse_groupoid(path) {
                Ok(g) => g.validate().map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            }
        } else if doc.contains("objects:") {
            cat_from_doc(&doc).map(|_| ())
        } else if doc.contains("fibers:") {
            let base_line = doc
                .lines()
                .find_map(|l| l.trim().strip_prefix("base:"))
                .ok_or_else(|| "sheaf document missing base:".to_string());
            match base_line {
                Ok(base_rel) => {
                    let dir = path.parent().unwrap_or(Path::new("."));
                    match parse_space(&dir.join(base_rel.trim())) {
                        Ok(space) => sheaf_from_doc(&doc, &space).map(|_| ()),
                        Err(e) => Err(e.to_string()),
                    }
                }
                Err(e) => Err(e),
            }
        } else {
            Err("unrecognized document kind".to_string())
        };
        report.push(CheckRecord::from_result(SUITE, name, result));
    }
    Ok(report)
}

fn run() -> Result<(SuiteReport, Format)> {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Validate { common, .. }
        | Command::Etale { common, .. }
        | Command::Convergence { common, .. }
        | Command::RoundtripSpace { common, .. }
        | Command::Reconstruct { common }
        | Command::Alexandroff { common }
        | Command::Descent { common, .. }
        | Command::Coherence { common, .. }
        | Command::Laws { common, .. } => common,
    };
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let bounds = resolve_bounds(common);
    let format = common.format;
    let seed = common.seed;
    let report = match &cli.command {
        Command::Validate { files, .. } => validate_files(files)?,
        Command::Etale {
            source,
            target,
            map,
            ..
        } => {
            let src = parse_space(source)?;
            let tgt = parse_space(target)?;
            let m = map_from_doc(&read(map)?, src, tgt)
                .map_err(|e| anyhow!("{}: {e}", map.display()))?;
            let mut report = SuiteReport::new();
            let instance = format!("{}", map.display());
            match etale_check(&m) {
                Ok(EtaleVerdict::Etale(certs)) => {
                    report.push(CheckRecord::pass(
                        "etale",
                        format!("{instance}-with-{}-certificates", certs.len()),
                    ));
                }
                Ok(EtaleVerdict::NotEtale(cx)) => {
                    report.push(CheckRecord::fail(
                        "etale",
                        instance,
                        format!(
                            "point {} under the principal ultrafilter at base point {} \
                             has lifts {:?}",
                            cx.point, cx.base_point, cx.lifts
                        ),
                    ));
                }
                Err(e) => {
                    report.push(CheckRecord::fail("etale", instance, e.to_string()));
                }
            }
            report
        }
        Command::Convergence {
            space,
            point,
            uf,
            pattern,
            ..
        } => {
            let t = parse_space(space)?;
            let mu = parse_ultrafilter(uf).map_err(|e| anyhow!("ultrafilter: {e}"))?;
            let values: std::result::Result<Vec<usize>, _> = pattern
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect();
            let values = values.context("pattern must be a comma-separated point list")?;
            if values.iter().any(|&v| v >= t.points()) {
                return Err(anyhow!("pattern points out of range"));
            }
            let fam = match mu.carrier() {
                ultrakit::IndexSet::Nat => {
                    PointFamily::new(mu.clone(), UpFamily::periodic(vec![], values.clone()))
                }
                ultrakit::IndexSet::Fin(n) => {
                    if values.len() != n {
                        return Err(anyhow!("pattern length must match the finite carrier"));
                    }
                    PointFamily::new(mu.clone(), UpFamily::from_table(values.clone()))
                }
            };
            let converges = ultrakit::space::converges(&t, *point, &fam)
                .map_err(|e| anyhow!("convergence query: {e}"))?;
            let mut report = SuiteReport::new();
            report.push(CheckRecord::from_result(
                "convergence",
                format!("point-{point}"),
                if converges {
                    Ok(())
                } else {
                    Err(format!("{point} is not a limit of the family"))
                },
            ));
            report
        }
        Command::RoundtripSpace { file, .. } => match file {
            Some(path) => {
                let t = parse_space(path)?;
                let rel = t.specialization();
                let back = ultrakit::space::topology_from_relation(&rel);
                let mut report = SuiteReport::new();
                report.push(CheckRecord::from_result(
                    "roundtrip-space",
                    path.display().to_string(),
                    if back == t {
                        Ok(())
                    } else {
                        Err("convergence relation does not recover the topology".into())
                    },
                ));
                report
            }
            None => suites::roundtrip_suite(seed, 500),
        },
        Command::Reconstruct { .. } => {
            suites::reconstruction_suite(bounds.max_points, bounds.fiber_bound)
        }
        Command::Alexandroff { .. } => suites::presheaf_suite(bounds.fiber_bound),
        Command::Descent { explore, .. } => {
            let mut report = suites::descent_suite(seed, 50, 10);
            report.merge(suites::equivariant_suite(bounds.fiber_bound));
            if *explore > 0 {
                report.merge(suites::descent_counterexample_search(seed, *explore));
            }
            report
        }
        Command::Coherence { instances, .. } => {
            let mut report = suites::uf_laws_suite(seed, 200);
            report.merge(suites::saturation_suite(8));
            report.merge(suites::coherence_suite(seed, *instances, bounds.probe_period));
            report
        }
        Command::Laws { instances, .. } => {
            suites::pretopos_suite(seed, *instances, bounds.fiber_bound.max(3))
        }
    };
    Ok((report, format))
}

fn main() -> ExitCode {
    match run() {
        Ok((report, format)) => {
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", report.to_json_lines()),
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
