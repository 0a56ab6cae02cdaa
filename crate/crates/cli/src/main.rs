mod render;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use orelat_core::catalog;
use orelat_core::certifier::{self, ChainScenario, ChainType};
use orelat_core::perm::{FiniteGroup, PermError, DEFAULT_ELEMENT_CAP};
use orelat_core::reproduce::{self, Report, Target};
use orelat_core::reptheory::{self, RepError};
use orelat_core::subgroups::{self, GroupInterval, SubgroupError, DEFAULT_MEMBER_CAP};
use orelat_core::totient::{self, IndexedInterval};
use serde_json::{json, Value};

use spec::GroupSpec;

#[derive(Parser)]
#[command(name = "orelat", version, about = "Overgroup lattices, dual totients and linear primitivity")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Bound on group elements and interval members.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Accepted for reproducibility; every computation is deterministic.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Members, Hasse diagram and indices of an interval [H, G].
    Interval(IntervalArgs),
    /// Runs the primitivity rules on an interval, a model or chain types.
    Certify(CertifyArgs),
    /// Decides linear primitivity from the character table.
    Primitive(IntervalArgs),
    /// Euler and dual Euler totients of an interval or model.
    Totient(ModelArgs),
    /// Bottom-boolean length, and core-free length when no subgroup is given.
    Bbl(GroupArgs),
    /// Recomputes a published artifact and compares it with its fixture.
    Reproduce {
        #[arg(value_parser = parse_target, default_value = "all")]
        target: Target,
    },
}

#[derive(Args)]
struct GroupArgs {
    #[arg(long, conflicts_with = "catalog")]
    group_file: Option<PathBuf>,
    /// Built-in group, e.g. `PSL(2,7)` or `S2xS3^2`.
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long, conflicts_with = "subgroup")]
    subgroup_file: Option<PathBuf>,
    /// Named subgroup: `trivial`, `whole`, or a catalog subgroup name.
    #[arg(long)]
    subgroup: Option<String>,
}

#[derive(Args)]
struct IntervalArgs {
    #[command(flatten)]
    group: GroupArgs,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Synthetic boolean model: `constant:P:N`, `pnq:P:Q:N:M` or
    /// `product:K1,K2,...`.
    #[arg(long, conflicts_with_all = ["group_file", "catalog"])]
    model: Option<String>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Abstract scenario given by its chain types, separated by `;`,
    /// e.g. `3^5,4,10;3^5,5,8`.
    #[arg(long, conflicts_with_all = ["group_file", "catalog", "model", "index"])]
    chain_types: Option<String>,
    /// Every scenario of this index at rank 7 and above.
    #[arg(long, conflicts_with_all = ["group_file", "catalog", "model"])]
    index: Option<u64>,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: reproduce::ReproduceError| e.to_string())
}

struct Caps {
    elements: usize,
    members: usize,
}

impl GroupArgs {
    fn ambient(&self, caps: &Caps) -> Result<FiniteGroup> {
        match (&self.group_file, &self.catalog) {
            (Some(path), _) => GroupSpec::read(path)?.build(caps.elements),
            (None, Some(name)) => Ok(catalog::group(name)?),
            (None, None) => bail!("give --group-file or --catalog"),
        }
    }

    fn base(&self, ambient: &FiniteGroup) -> Result<FiniteGroup> {
        if let Some(path) = &self.subgroup_file {
            return GroupSpec::read(path)?.build_inside(ambient);
        }
        let name = self.subgroup.as_deref().unwrap_or("trivial");
        match (&self.catalog, name.to_ascii_lowercase().as_str()) {
            (_, "trivial" | "1") => Ok(FiniteGroup::trivial(ambient.degree())),
            (_, "whole" | "g") => Ok(ambient.clone()),
            (Some(group), _) => Ok(catalog::subgroup(group, name)?),
            (None, _) => bail!("named subgroup `{name}` needs --catalog; use --subgroup-file"),
        }
    }

    fn label(&self) -> String {
        match (&self.group_file, &self.catalog) {
            (Some(path), _) => path.display().to_string(),
            (None, Some(name)) => name.clone(),
            (None, None) => String::new(),
        }
    }

    fn interval(&self, caps: &Caps) -> Result<GroupInterval> {
        let g = self.ambient(caps)?;
        let h = self.base(&g)?;
        Ok(subgroups::overgroup_interval_with_cap(&g, &h, caps.members)?)
    }
}

fn generators(group: &FiniteGroup) -> Vec<String> {
    group.generators().iter().map(|g| g.to_cycle_string(true)).collect()
}

fn interval_results(interval: &GroupInterval) -> Value {
    let l = interval.lattice();
    let members: Vec<Value> = (0..interval.len())
        .map(|id| {
            let m = interval.member(id);
            json!({ "id": id, "order": m.order(), "index": interval.index_of(id), "generators": generators(m) })
        })
        .collect();
    let hasse: Vec<[usize; 2]> = (0..l.len())
        .flat_map(|x| l.upper_covers(x).iter().map(move |&y| [x, y]))
        .collect();
    json!({
        "group_order": interval.ambient().order(),
        "subgroup_order": interval.base().order(),
        "members": members,
        "hasse": hasse,
        "atoms": l.atoms(),
        "coatoms": l.coatoms(),
        "graded": l.is_graded(),
        "rank": l.is_graded().then(|| l.height(l.top())),
        "distributive": l.is_distributive(),
        "boolean": l.is_boolean(),
    })
}

fn parse_model(text: &str) -> Result<IndexedInterval> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> Result<u64> { s.trim().parse().with_context(|| format!("bad number `{s}` in model")) };
    let model = match parts.as_slice() {
        ["constant", p, n] => IndexedInterval::constant_model(num(p)?, num(n)? as usize)?,
        ["pnq", p, q, n, m] => IndexedInterval::pnq_model(num(p)?, num(q)?, num(n)? as usize, num(m)? as usize)?,
        ["product", ks] => {
            let ks: Vec<u64> = ks.split(',').map(num).collect::<Result<_>>()?;
            let n = ks.len();
            IndexedInterval::boolean_model(n, |mask| {
                (0..n).filter(|i| mask >> i & 1 == 0).map(|i| ks[i]).product()
            })?
        }
        _ => bail!("unknown model `{text}`; expected constant:P:N, pnq:P:Q:N:M or product:K1,K2,..."),
    };
    Ok(model)
}

fn parse_chain_types(text: &str) -> Result<Vec<ChainType>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<ChainType>().map_err(Into::into))
        .collect()
}

impl ModelArgs {
    fn indexed(&self, caps: &Caps) -> Result<(String, Option<GroupInterval>, IndexedInterval)> {
        match &self.model {
            Some(text) => Ok((text.clone(), None, parse_model(text)?)),
            None => {
                let interval = self.group.interval(caps)?;
                let indexed = IndexedInterval::from_group_interval(&interval);
                Ok((self.group.label(), Some(interval), indexed))
            }
        }
    }
}

fn cmd_interval(args: &IntervalArgs, caps: &Caps) -> Result<Report> {
    let interval = args.group.interval(caps)?;
    Ok(Report::new(
        format!("interval {}", args.group.label()),
        interval_results(&interval),
        Vec::new(),
    ))
}

fn cmd_certify(args: &CertifyArgs, caps: &Caps) -> Result<Report> {
    if let Some(text) = &args.chain_types {
        let scenario = ChainScenario::new(parse_chain_types(text)?)?;
        let cert = certifier::certify_scenario(&scenario)?;
        return Ok(Report::new(
            format!("certify --chain-types {text}"),
            json!({ "scenario": scenario, "certificate": cert, "trace": cert.step_trace() }),
            Vec::new(),
        ));
    }
    if let Some(index) = args.index {
        let cert = certifier::certify_index(index)?;
        return Ok(Report::new(format!("certify --index {index}"), serde_json::to_value(cert)?, Vec::new()));
    }
    let (label, _, indexed) = args.model.indexed(caps)?;
    let cert = certifier::certify(&indexed)?;
    Ok(Report::new(
        format!("certify {label}"),
        json!({
            "rank": indexed.lattice().is_graded().then(|| indexed.rank()),
            "index": indexed.total_index(),
            "certificate": cert,
            "trace": cert.step_trace(),
        }),
        Vec::new(),
    ))
}

fn cmd_primitive(args: &IntervalArgs, caps: &Caps) -> Result<Report> {
    let interval = args.group.interval(caps)?;
    let table = reptheory::character_table(interval.ambient())?;
    let dims = reptheory::interval_fixed_dims(&interval, &table)?;
    let witness = reptheory::is_linearly_primitive(&interval, &table)?;
    let rows: Vec<Value> = (0..table.len())
        .map(|row| -> Result<Value> {
            let closure = reptheory::pointwise_stabilizer_closure(&interval, &table, row)?;
            Ok(json!({
                "row": row,
                "degree": table.degrees()[row],
                "fixed_dim": dims[interval.bottom()][row],
                "stabilizer_closure": closure,
                "closure_order": interval.member(closure).order(),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(Report::new(
        format!("primitive {}", args.group.label()),
        json!({
            "linearly_primitive": witness.is_some(),
            "witness_row": witness,
            "witness_degree": witness.map(|r| table.degrees()[r]),
            "characters": rows,
        }),
        Vec::new(),
    ))
}

fn cmd_totient(args: &ModelArgs, caps: &Caps) -> Result<Report> {
    let (label, interval, indexed) = args.indexed(caps)?;
    let distributive = indexed.lattice().is_distributive();
    let ext = |r: Result<i128, _>| r.ok().map(|v: i128| v.to_string());
    Ok(Report::new(
        format!("totient {label}"),
        json!({
            "index": indexed.total_index(),
            "rank": indexed.lattice().is_graded().then(|| indexed.rank()),
            "distributive": distributive,
            "boolean": indexed.is_boolean(),
            "dual_totient": ext(totient::dual_totient(&indexed)),
            "euler_totient": ext(totient::euler_totient(&indexed)),
            "dual_totient_distributive": if distributive { ext(totient::dual_totient_distributive(&indexed)) } else { None },
            "euler_totient_distributive": if distributive { ext(totient::euler_totient_distributive(&indexed)) } else { None },
            "generating_cosets": interval.as_ref().map(|i| i.generating_coset_count()),
        }),
        Vec::new(),
    ))
}

fn cmd_bbl(args: &GroupArgs, caps: &Caps) -> Result<Report> {
    let g = args.ambient(caps)?;
    let results = if args.subgroup.is_some() || args.subgroup_file.is_some() {
        let h = args.base(&g)?;
        json!({ "bbl": subgroups::bbl_between(&g, &h)? })
    } else {
        json!({ "bbl": subgroups::bbl(&g)?, "cfl": subgroups::cfl(&g)? })
    };
    Ok(Report::new(format!("bbl {}", args.label()), results, Vec::new()))
}

fn run(cli: &Cli) -> Result<Report> {
    let caps = Caps {
        elements: cli.cap.unwrap_or(DEFAULT_ELEMENT_CAP),
        members: cli.cap.unwrap_or(DEFAULT_MEMBER_CAP),
    };
    match &cli.command {
        Command::Interval(a) => cmd_interval(a, &caps),
        Command::Certify(a) => cmd_certify(a, &caps),
        Command::Primitive(a) => cmd_primitive(a, &caps),
        Command::Totient(a) => cmd_totient(a, &caps),
        Command::Bbl(a) => cmd_bbl(a, &caps),
        Command::Reproduce { target } => Ok(reproduce::reproduce(*target)?),
    }
}

fn hit_cap(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(e.downcast_ref::<PermError>(), Some(PermError::CapExceeded { .. }))
            || matches!(
                e.downcast_ref::<SubgroupError>(),
                Some(SubgroupError::CapExceeded { .. } | SubgroupError::Perm(PermError::CapExceeded { .. }))
            )
            || matches!(e.downcast_ref::<RepError>(), Some(RepError::TooLarge(_)))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize")),
                Format::Table => print!("{}", render::table(&report)),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if hit_cap(&err) { 3 } else { 2 })
        }
    }
}
