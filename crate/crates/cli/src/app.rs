//! Subcommands of `a1mod`.

use std::path::{Path, PathBuf};

use a1_core::davismahowald::{self, lifting, spectral};
use a1_core::margolis::{margolis_homology, Operator, Side};
use a1_core::module::{direct_sum, dualize, suspend, tensor};
use a1_core::resolution::{ext_dims, h0_tower_count, DEFAULT_WINDOW};
use a1_core::structure::{classify, localize_q0, seagull, seagull_inf, strip_free, DecompositionReport};
use a1_core::{A1Module, Algebra};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::chart;
use crate::modfile::{self, ParseError};
use crate::record::ResultRecord;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "a1mod", version, about = "Computations with graded A(1)-modules over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OperatorArg {
    Q0,
    Q1,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlgebraArg {
    A0,
    A1,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChartKind {
    Ext,
    Dm,
    Towers,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChartFormat {
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TowerRoute {
    /// Dimension stabilization in a minimal resolution.
    Resolution,
    /// Classification of the Q0-localization.
    Classification,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a module file.
    Validate { file: PathBuf },
    /// Dimensions, labels and Q0-locality.
    Info { file: PathBuf },
    /// Margolis homology H(M; Q0) or H(M; Q1).
    Margolis {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "q0")]
        operator: OperatorArg,
        /// Compute on the dual module M_*.
        #[arg(long)]
        dual: bool,
    },
    /// Strip free summands.
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decompose a Q0-local module into seagulls and free summands.
    Classify { file: PathBuf },
    /// Classify the Q0-localization truncated at a cutoff.
    Localize {
        file: PathBuf,
        #[arg(long)]
        cutoff: Option<i32>,
    },
    /// Ext dimensions from a minimal resolution.
    Ext {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "a1")]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 8)]
        max_s: u32,
        #[arg(long, default_value_t = 20)]
        max_t: i32,
    },
    /// h0-towers per stem.
    Towers {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_stem: i32,
        #[arg(long, value_enum, default_value = "resolution")]
        route: TowerRoute,
        /// Localization cutoff for the classification route.
        #[arg(long)]
        cutoff: Option<i32>,
    },
    /// Localized Davis-Mahowald E1 page.
    DmE1 {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_sigma: u32,
    },
    /// The d2 differential on dual Q0-homology.
    DmD2 { file: PathBuf },
    /// The E3 page.
    DmE3 {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_sigma: u32,
    },
    /// Obstructions to lifting to a module over the Steenrod algebra.
    LiftCheck {
        file: PathBuf,
        #[arg(long)]
        cutoff: Option<i32>,
    },
    /// Solve for Sq4 with Sq1Sq4 + Sq4Sq1 = Sq2Sq1Sq2.
    Sq4Check { file: PathBuf },
    /// Draw an Ext chart, a DM page or a tower chart.
    Chart {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dm")]
        kind: ChartKind,
        #[arg(long, value_enum, default_value = "ascii")]
        format: ChartFormat,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_s: u32,
        #[arg(long, default_value_t = 20)]
        max_t: i32,
        #[arg(long, default_value_t = 4)]
        max_sigma: u32,
        #[arg(long, default_value_t = 12)]
        max_stem: i32,
    },
    /// Emit a seagull module.
    Seagull {
        #[arg(long, conflicts_with = "infinite", required_unless_present = "infinite")]
        n: Option<u32>,
        #[arg(long, requires = "cutoff")]
        infinite: bool,
        #[arg(long)]
        cutoff: Option<i32>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tensor product of two modules.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Direct sum of two modules.
    Sum {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Shift all degrees.
    Suspend {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: i32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The dual module.
    Dual {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Input {
    name: String,
    text: String,
    module: A1Module,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    let (name, module) =
        modfile::parse_module(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
    Ok(Input { name, text, module })
}

fn module_summary(m: &A1Module) -> Value {
    json!({
        "dims": m.dim_table(),
        "total_dim": m.total_dim(),
        "truncated_above": m.truncated_above(),
    })
}

fn emit_module(name: &str, m: &A1Module, output: &Option<PathBuf>) -> Result<Value, CliError> {
    let text = modfile::serialize(name, m);
    if let Some(p) = output {
        write(p, &text)?;
    }
    let mut v = module_summary(m);
    v["name"] = json!(name);
    v["module"] = json!(text);
    v["path"] = json!(output.as_ref().map(|p| p.display().to_string()));
    Ok(v)
}

fn report_json(m: &A1Module, r: &DecompositionReport) -> Value {
    let witnesses: Vec<Value> = r
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "spec": w.spec,
                "generators": w.generators.iter().map(|g| m.describe(g)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "descriptor": r.descriptor,
        "flock": r.descriptor.to_string(),
        "horizon": r.horizon,
        "witnesses": witnesses,
        "log": r.log,
    })
}

fn lo_of(m: &A1Module) -> i32 {
    if m.is_zero() {
        0
    } else {
        m.lo()
    }
}

/// Runs one command, writing any requested files, and returns its record.
pub fn run(cli: &Cli) -> Result<ResultRecord, CliError> {
    match &cli.command {
        Command::Validate { file } => {
            let i = load(file)?;
            let payload = json!({ "valid": true, "name": i.name, "summary": module_summary(&i.module) });
            Ok(ResultRecord::new("validate", &[&i.text], payload, None))
        }
        Command::Info { file } => {
            let i = load(file)?;
            let m = &i.module;
            let labels: Vec<Value> = m
                .space()
                .degrees()
                .filter(|&k| m.dim(k) > 0)
                .map(|k| json!({ "degree": k, "labels": m.labels(k) }))
                .collect();
            let local = a1_core::margolis::is_q0_local(m);
            let payload = json!({
                "name": i.name,
                "summary": module_summary(m),
                "lo": (!m.is_zero()).then(|| m.lo()),
                "hi": (!m.is_zero()).then(|| m.hi()),
                "basis": labels,
                "q0_local": local,
            });
            Ok(ResultRecord::new("info", &[&i.text], payload, local.reliable))
        }
        Command::Margolis { file, operator, dual } => {
            let i = load(file)?;
            let op = match operator {
                OperatorArg::Q0 => Operator::Q0,
                OperatorArg::Q1 => Operator::Q1,
            };
            let side = if *dual { Side::Dual } else { Side::Module };
            let h = margolis_homology(&i.module, op, side);
            let space_module;
            let space = if *dual {
                space_module = dualize(&i.module).into_module();
                space_module.space()
            } else {
                i.module.space()
            };
            let reps: Vec<Value> = h
                .representatives
                .iter()
                .map(|(&k, vs)| json!({ "degree": k, "classes": vs.iter().map(|v| space.describe(k, v)).collect::<Vec<_>>() }))
                .collect();
            let payload = json!({ "operator": h.operator, "side": h.side, "dims": h.dim_table(), "representatives": reps });
            Ok(ResultRecord::new("margolis", &[&i.text], payload, h.reliable))
        }
        Command::Reduce { file, output } => {
            let i = load(file)?;
            let (reduced, free) = strip_free(&i.module);
            let mut payload = emit_module(&format!("{}_reduced", i.name), &reduced, output)?;
            payload["free_ranks"] = json!(free);
            Ok(ResultRecord::new("reduce", &[&i.text], payload, None))
        }
        Command::Classify { file } => {
            let i = load(file)?;
            let r = classify(&i.module).map_err(domain)?;
            let range = r.horizon.map(|h| (lo_of(&i.module), h));
            Ok(ResultRecord::new("classify", &[&i.text], report_json(&i.module, &r), range))
        }
        Command::Localize { file, cutoff } => {
            let i = load(file)?;
            let cutoff = cutoff.unwrap_or_else(|| spectral::default_cutoff(&i.module));
            let loc = localize_q0(&i.module, cutoff).map_err(domain)?;
            let mut payload = report_json(&loc.module, &loc.report);
            payload["cutoff"] = json!(loc.cutoff);
            let range = loc.report.horizon.map(|h| (lo_of(&i.module), h));
            Ok(ResultRecord::new("localize", &[&i.text], payload, range))
        }
        Command::Ext { file, algebra, max_s, max_t } => {
            let i = load(file)?;
            let alg = match algebra {
                AlgebraArg::A0 => Algebra::A0,
                AlgebraArg::A1 => Algebra::A1,
            };
            let c = ext_dims(&i.module, alg, *max_s, *max_t).map_err(domain)?;
            Ok(ResultRecord::new("ext", &[&i.text], json!(c), Some((lo_of(&i.module), *max_t))))
        }
        Command::Towers { file, max_stem, route, cutoff } => {
            let i = load(file)?;
            match route {
                TowerRoute::Resolution => {
                    let t = h0_tower_count(&i.module, *max_stem, DEFAULT_WINDOW).map_err(domain)?;
                    let payload = json!({ "route": "resolution", "towers": t });
                    Ok(ResultRecord::new("towers", &[&i.text], payload, Some((lo_of(&i.module), *max_stem))))
                }
                TowerRoute::Classification => {
                    let cutoff = cutoff.unwrap_or_else(|| spectral::default_cutoff(&i.module).max(max_stem + 8));
                    let l = spectral::localized_ext(&i.module, cutoff).map_err(domain)?;
                    let through = l.reliable_through.min(*max_stem);
                    let towers: std::collections::BTreeMap<i32, usize> =
                        l.towers.iter().filter(|(&k, _)| k <= through).map(|(&k, &v)| (k, v)).collect();
                    let payload = json!({
                        "route": "classification",
                        "towers": towers,
                        "flock": l.descriptor.to_string(),
                        "cutoff": l.cutoff,
                    });
                    Ok(ResultRecord::new("towers", &[&i.text], payload, Some((lo_of(&i.module), through))))
                }
            }
        }
        Command::DmE1 { file, max_sigma } => {
            let i = load(file)?;
            let e = davismahowald::e1_page(&i.module, *max_sigma);
            Ok(ResultRecord::new("dm-e1", &[&i.text], json!(e), e.reliable))
        }
        Command::DmD2 { file } => {
            let i = load(file)?;
            let d = davismahowald::d2(&i.module);
            let blocks: Vec<Value> = d
                .blocks
                .iter()
                .map(|(&k, b)| {
                    let cols: Vec<Vec<usize>> = (0..b.cols()).map(|c| b.col(c).ones().collect()).collect();
                    json!({ "source_degree": k, "target_degree": k - 5, "columns": cols })
                })
                .collect();
            let payload = json!({ "zero": d.is_zero(), "pairs": d.pairs(), "blocks": blocks });
            Ok(ResultRecord::new("dm-d2", &[&i.text], payload, d.homology.reliable))
        }
        Command::DmE3 { file, max_sigma } => {
            let i = load(file)?;
            let e = davismahowald::e3_page(&i.module, *max_sigma);
            Ok(ResultRecord::new("dm-e3", &[&i.text], json!(e), e.reliable))
        }
        Command::LiftCheck { file, cutoff } => {
            let i = load(file)?;
            let v = davismahowald::lift_check(&i.module, *cutoff).map_err(domain)?;
            Ok(ResultRecord::new("lift-check", &[&i.text], json!(v), None))
        }
        Command::Sq4Check { file } => {
            let i = load(file)?;
            let r = lifting::sq4_solver(&i.module);
            let payload = match &r {
                lifting::Sq4Result::Feasible { solution } => {
                    let nonzero: Vec<i32> = solution.iter().filter(|(_, m)| !m.is_zero()).map(|(&k, _)| k).collect();
                    json!({ "feasible": true, "nonzero_degrees": nonzero })
                }
                lifting::Sq4Result::Infeasible { degree } => json!({ "feasible": false, "obstruction_degree": degree }),
            };
            Ok(ResultRecord::new("sq4-check", &[&i.text], payload, None))
        }
        Command::Chart { file, kind, format, output, max_s, max_t, max_sigma, max_stem } => {
            let i = load(file)?;
            let c = match kind {
                ChartKind::Ext => chart::ext_chart(&ext_dims(&i.module, Algebra::A1, *max_s, *max_t).map_err(domain)?),
                ChartKind::Towers => {
                    let t = h0_tower_count(&i.module, *max_stem, DEFAULT_WINDOW).map_err(domain)?;
                    chart::tower_chart(&t, *max_stem, *max_s)
                }
                ChartKind::Dm => {
                    let e1 = davismahowald::e1_page(&i.module, *max_sigma);
                    let pairs = davismahowald::d2(&i.module).pairs();
                    chart::dm_chart(&e1, &pairs, max_sigma + 4)
                }
            };
            let text = match format {
                ChartFormat::Ascii => chart::render_ascii(&c),
                ChartFormat::Svg => chart::render_svg(&c),
            };
            write(output, &text)?;
            let payload = json!({ "path": output.display().to_string(), "chart": c });
            Ok(ResultRecord::new("chart", &[&i.text], payload, None))
        }
        Command::Seagull { n, infinite, cutoff, output } => {
            let (name, m) = match (n, infinite, cutoff) {
                (Some(n), false, _) => (format!("seagull{n}"), seagull(*n)),
                (None, true, Some(d)) => (format!("seagull_inf_{d}"), seagull_inf(*d)),
                _ => return Err(CliError::Usage("give either --n N or --infinite --cutoff D".into())),
            };
            let payload = emit_module(&name, &m, output)?;
            Ok(ResultRecord::new("seagull", &[], payload, None))
        }
        Command::Tensor { left, right, output } => {
            let (a, b) = (load(left)?, load(right)?);
            let m = tensor(&a.module, &b.module);
            let payload = emit_module(&format!("{}_tensor_{}", a.name, b.name), &m, output)?;
            Ok(ResultRecord::new("tensor", &[&a.text, &b.text], payload, None))
        }
        Command::Sum { left, right, output } => {
            let (a, b) = (load(left)?, load(right)?);
            let m = direct_sum(&a.module, &b.module);
            let payload = emit_module(&format!("{}_sum_{}", a.name, b.name), &m, output)?;
            Ok(ResultRecord::new("sum", &[&a.text, &b.text], payload, None))
        }
        Command::Suspend { file, by, output } => {
            let i = load(file)?;
            let m = suspend(&i.module, *by);
            let payload = emit_module(&format!("{}_susp{by}", i.name), &m, output)?;
            Ok(ResultRecord::new("suspend", &[&i.text], payload, None))
        }
        Command::Dual { file, output } => {
            let i = load(file)?;
            let m = dualize(&i.module).into_module();
            let payload = emit_module(&format!("{}_dual", i.name), &m, output)?;
            Ok(ResultRecord::new("dual", &[&i.text], payload, None))
        }
    }
}
