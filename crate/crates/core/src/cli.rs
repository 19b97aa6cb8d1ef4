//! Command-line front end. Text goes to stdout; JSON goes to `--out` (or stdout for
//! `build-space`). Exit codes: 0 verified/decided, 1 failure found, 2 usage or cap error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::parse_field;
use crate::opspace::{self, OperatorSpace, SpaceFamily, SpaceJson};
use crate::rcmaps::{self, AdditiveMap, MapJson};
use crate::verify::{self, SuiteId, SuiteSpec, VerificationReport, DEFAULT_SEED};
use crate::Caps;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rckit", version, about = "Range-compatible maps on spaces of matrices over small finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON result here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Element/enumeration cap (overrides RC_KIT_CAP)
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    /// Builder designator, e.g. full-sym:3, t3, sym-block:3, mf:r=1,f=010
    #[arg(long, conflicts_with = "space_file")]
    builder: Option<String>,
    /// Space JSON file
    #[arg(long)]
    space_file: Option<PathBuf>,
    /// Field designator: p or p^k
    #[arg(long)]
    field: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite
    Verify {
        #[arg(long, required_unless_present = "from_report")]
        suite: Option<String>,
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        codim: usize,
        /// Columns of the rectangular ambient (rect-group)
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// Tail width of M_f (mf-lemma)
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Re-run the suite recorded in a report JSON
        #[arg(long, conflicts_with = "suite")]
        from_report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Dimensions of the RC, local and standard spaces of a space
    Classify {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Decide range-compatibility, linearity, locality and standardness of one map
    CheckMap {
        #[arg(long)]
        map_file: PathBuf,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the JSON of a built space
    BuildSpace {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Confirm the optimality counterexamples
    Counterexamples {
        /// Size of the symmetric witnesses (the alternating ones use n + 1)
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the auxiliary lemma suites
    Lemmas {
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn caps_for(common: &Common) -> Caps {
    let mut caps = Caps::from_env();
    if let Some(c) = common.cap {
        caps.elements = c;
        caps.enumeration = c;
    }
    caps
}

fn write_json(path: Option<&Path>, value: &impl Serialize, to_stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            if to_stdout {
                print!("{text}");
            }
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_space(args: &SpaceArgs, caps: &Caps) -> Result<Option<OperatorSpace>> {
    match (&args.builder, &args.space_file) {
        (Some(b), _) => {
            let field = args
                .field
                .as_deref()
                .ok_or_else(|| Error::BadParams("--builder needs --field".into()))?;
            let fam: SpaceFamily = b.parse()?;
            Ok(Some(opspace::build(&fam, &parse_field(field, caps.field_order)?)?))
        }
        (None, Some(path)) => {
            let j: SpaceJson = read_json(path)?;
            Ok(Some(OperatorSpace::from_json(&j)?))
        }
        (None, None) => Ok(None),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MapVerdict {
    additive: bool,
    range_compatible: bool,
    linear: bool,
    local: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard: Option<bool>,
}

fn finish(reports: &[VerificationReport], out: Option<&Path>) -> Result<i32> {
    for r in reports {
        println!("{}", r.summary());
    }
    if reports.len() == 1 {
        write_json(out, &reports[0], false)?;
    } else {
        write_json(out, &reports, false)?;
    }
    Ok(if reports.iter().all(VerificationReport::verified) {
        EXIT_OK
    } else {
        EXIT_FAILURE_FOUND
    })
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Verify {
            suite,
            field,
            n,
            m,
            codim,
            p,
            r,
            samples,
            seed,
            from_report,
            common,
        } => {
            let caps = caps_for(&common);
            let spec = match from_report {
                Some(path) => read_json::<VerificationReport>(&path)?.suite,
                None => SuiteSpec {
                    suite: suite.expect("required by clap").parse::<SuiteId>()?,
                    field,
                    n,
                    m,
                    codim,
                    p,
                    r,
                    samples,
                    seed,
                    caps,
                },
            };
            let report = verify::run_suite(&spec, common.jobs)?;
            finish(&[report], common.out.as_deref())
        }
        Command::Classify { space, common } => {
            let caps = caps_for(&common);
            let s = load_space(&space, &caps)?
                .ok_or_else(|| Error::BadParams("give --builder or --space-file".into()))?;
            let c = verify::classify(&s, &caps)?;
            println!("space: {} of dimension {} (codimension {})", s.ambient().describe(), s.dim(), s.codim());
            println!("RC dim: {}", c.rc_dim);
            println!("local dim: {}", c.local_dim);
            if let Some(d) = c.standard_dim {
                println!("standard dim: {d}");
            }
            println!("exotic dim (RC mod local): {}", c.exotic_dim);
            if let Some(d) = c.nonstandard_dim {
                println!("non-standard dim (RC mod standard): {d}");
            }
            write_json(common.out.as_deref(), &c, false)?;
            Ok(EXIT_OK)
        }
        Command::CheckMap {
            map_file,
            space,
            common,
        } => {
            let caps = caps_for(&common);
            let mut mj: MapJson = read_json(&map_file)?;
            let map = match load_space(&space, &caps)? {
                Some(s) => {
                    mj.space = serde_json::to_value(s.to_json()).expect("space serializes");
                    AdditiveMap::from_json(&mj)?
                }
                None => AdditiveMap::from_json(&mj)?,
            };
            let rc = rcmaps::is_range_compatible(&map, &caps)?;
            let witness = rcmaps::is_local(&map);
            let standard = if map.domain().ambient().kind() == opspace::AmbientKind::Sym {
                Some(rcmaps::is_standard(&map)?)
            } else {
                None
            };
            let v = MapVerdict {
                additive: true,
                range_compatible: rc,
                linear: rcmaps::is_linear(&map),
                local: witness.is_some(),
                x: witness.map(|x| x.into_iter().map(u64::from).collect()),
                standard,
            };
            println!("additive: yes");
            println!("range-compatible: {}", yes_no(v.range_compatible));
            println!("linear: {}", yes_no(v.linear));
            match &v.x {
                Some(x) => println!("local: yes, x = {x:?}"),
                None => println!("local: no"),
            }
            if let Some(st) = v.standard {
                println!("standard: {}", yes_no(st));
            }
            write_json(common.out.as_deref(), &v, false)?;
            Ok(EXIT_OK)
        }
        Command::BuildSpace { space, common } => {
            let s = load_space(&space, &caps_for(&common))?
                .ok_or_else(|| Error::BadParams("give --builder or --space-file".into()))?;
            write_json(common.out.as_deref(), &s.to_json(), true)?;
            Ok(EXIT_OK)
        }
        Command::Counterexamples { n, common } => {
            let caps = caps_for(&common);
            let sym = SuiteSpec::new(SuiteId::SymOptimality, "2").n(n).caps(caps);
            let alt = SuiteSpec::new(SuiteId::AltOptimality, "2").n(n + 1).caps(caps);
            let reports = vec![
                verify::run_suite(&sym, common.jobs)?,
                verify::run_suite(&alt, common.jobs)?,
            ];
            finish(&reports, common.out.as_deref())
        }
        Command::Lemmas {
            field,
            n,
            m,
            samples,
            seed,
            common,
        } => {
            let caps = caps_for(&common);
            let base = |id| {
                let mut s = SuiteSpec::new(id, &field).n(n).m(m).seed(seed).caps(caps);
                s.samples = samples;
                s
            };
            let specs = [
                base(SuiteId::Rank1Gaps),
                base(SuiteId::GoodFunctionals).codim(n.saturating_sub(2)),
                base(SuiteId::QuotientLemma),
                base(SuiteId::SplittingLemma),
            ];
            let reports = specs
                .iter()
                .map(|s| verify::run_suite(s, common.jobs))
                .collect::<Result<Vec<_>>>()?;
            finish(&reports, common.out.as_deref())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
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
            EXIT_USAGE
        }
    }
}
