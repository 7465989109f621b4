use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fixlab_core::certify::{
    check_compressed_certificate, classify, paper_suite, sample_inertia_property, search_compression_counterexample,
    search_inertia_counterexample, Scale,
};
use fixlab_core::morphism::{fixed_family, parse_map};
use fixlab_core::{Element, Endomorphism, GroupSpec, Subgroup};
use num_bigint::BigInt;

#[derive(Parser)]
#[command(
    name = "fixlab",
    version,
    about = "Exact computations in products of Euclidean surface groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArg {
    /// Group, e.g. "NS2 x Z^2 x Z2" (factors NS2, Z, Z2, T2, P2, 1 with optional ^k).
    #[arg(short, long)]
    group: String,
}

#[derive(Args)]
struct SubArgs {
    #[command(flatten)]
    group: GroupArg,
    /// Subgroup generators, semicolon-separated words.
    #[arg(long)]
    sub: String,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    group: GroupArg,
    /// Map file with one `gen -> word` line per generator.
    #[arg(short, long)]
    map: PathBuf,
    /// Missing generators map to themselves.
    #[arg(long)]
    partial_identity: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    sub: SubArgs,
    #[arg(long, default_value_t = 3)]
    max_word_len: usize,
    #[arg(long, default_value_t = 3)]
    max_gens: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a word.
    Normalize {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long)]
        word: String,
    },
    /// Product of the given words, left to right.
    Mul {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long, required = true)]
        word: Vec<String>,
    },
    Inv {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long)]
        word: String,
    },
    Pow {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long)]
        word: String,
        #[arg(short = 'k', long, allow_hyphen_values = true)]
        exp: BigInt,
    },
    /// Membership of a word in a subgroup.
    Member {
        #[command(flatten)]
        sub: SubArgs,
        #[arg(short, long)]
        word: String,
    },
    Rank {
        #[command(flatten)]
        sub: SubArgs,
    },
    /// Index of the subgroup in `--in` (default: the whole group).
    Index {
        #[command(flatten)]
        sub: SubArgs,
        #[arg(long = "in")]
        ambient: Option<String>,
    },
    Intersect {
        #[command(flatten)]
        sub: SubArgs,
        #[arg(long)]
        with: String,
    },
    Fix {
        #[command(flatten)]
        map: MapArgs,
    },
    FixFamily {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long, required = true)]
        map: Vec<PathBuf>,
        #[arg(long)]
        partial_identity: bool,
    },
    CheckEndo {
        #[command(flatten)]
        map: MapArgs,
    },
    CheckAuto {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Square root inside N of an element of the commutator subgroup.
    Sqrt {
        #[command(flatten)]
        group: GroupArg,
        #[arg(short, long)]
        word: String,
    },
    DecomposeEuc2 {
        #[command(flatten)]
        sub: SubArgs,
    },
    Classify {
        #[command(flatten)]
        group: GroupArg,
    },
    CertifyCompressed {
        #[command(flatten)]
        sub: SubArgs,
    },
    SearchCompression {
        #[command(flatten)]
        search: SearchArgs,
    },
    SearchInertia {
        #[command(flatten)]
        search: SearchArgs,
    },
    SampleInertia {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_gens: usize,
        #[arg(long, default_value_t = 4)]
        max_word_len: usize,
    },
    /// Reproduce the worked examples (and, at full scale, the randomized batches).
    PaperSuite {
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
    },
}

/// A run that did not succeed: bad input (status 2) or a failed check (status 1).
enum Failure {
    Usage(String),
    Check(String),
}

type Outcome = Result<String, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn group(arg: &GroupArg) -> Result<GroupSpec, Failure> {
    arg.group.parse().map_err(|e| usage(format!("--group: {}", e)))
}

fn element(spec: GroupSpec, text: &str) -> Result<Element, Failure> {
    spec.parse_word(text)
        .map_err(|e| usage(format!("word `{}`: {}", text, e)))
}

fn subgroup(spec: GroupSpec, text: &str) -> Result<Subgroup, Failure> {
    Subgroup::parse(spec, text).map_err(|e| usage(format!("subgroup `{}`: {}", text, e)))
}

fn sub_args(a: &SubArgs) -> Result<(GroupSpec, Subgroup), Failure> {
    let spec = group(&a.group)?;
    Ok((spec, subgroup(spec, &a.sub)?))
}

fn endo(spec: GroupSpec, path: &PathBuf, partial: bool) -> Result<Endomorphism, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {}", path.display(), e)))?;
    parse_map(spec, &text, partial).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

/// Lattice basis elements, then transversal representatives.
fn gens(h: &Subgroup) -> String {
    let g = h.stored_generators();
    if g.is_empty() {
        "1".to_string()
    } else {
        g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
    }
}

fn verdict(ok: bool, text: String) -> Outcome {
    if ok {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Normalize { group: g, word } => Ok(element(group(&g)?, &word)?.to_string()),
        Command::Mul { group: g, word } => {
            let spec = group(&g)?;
            let mut acc = spec.identity();
            for w in &word {
                acc = acc.mul(&element(spec, w)?);
            }
            Ok(acc.to_string())
        }
        Command::Inv { group: g, word } => Ok(element(group(&g)?, &word)?.inv().to_string()),
        Command::Pow { group: g, word, exp } => Ok(element(group(&g)?, &word)?.pow(&exp).to_string()),
        Command::Member { sub, word } => {
            let (spec, h) = sub_args(&sub)?;
            Ok(h.contains(&element(spec, &word)?).to_string())
        }
        Command::Rank { sub } => {
            let (_, h) = sub_args(&sub)?;
            let r = h.rank();
            Ok(format!(
                "rank {}\ngenerators {}",
                r,
                r.generators
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        }
        Command::Index { sub, ambient } => {
            let (spec, h) = sub_args(&sub)?;
            let k = match ambient {
                Some(text) => subgroup(spec, &text)?,
                None => Subgroup::special(spec, fixlab_core::Special::Full),
            };
            h.index_in(&k)
                .map(|i| i.to_string())
                .map_err(|e| Failure::Check(e.to_string()))
        }
        Command::Intersect { sub, with } => {
            let (spec, h) = sub_args(&sub)?;
            Ok(gens(&h.intersect(&subgroup(spec, &with)?)))
        }
        Command::Fix { map } => {
            let f = endo(group(&map.group)?, &map.map, map.partial_identity)?;
            Ok(gens(&f.fixed_subgroup().subgroup))
        }
        Command::FixFamily {
            group: g,
            map,
            partial_identity,
        } => {
            let spec = group(&g)?;
            let fs = map
                .iter()
                .map(|p| endo(spec, p, partial_identity))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(gens(&fixed_family(&fs)))
        }
        Command::CheckEndo { map } => {
            let spec = group(&map.group)?;
            let text = fs::read_to_string(&map.map).map_err(|e| usage(format!("{}: {}", map.map.display(), e)))?;
            match parse_map(spec, &text, map.partial_identity) {
                Ok(_) => Ok("valid".to_string()),
                Err(fixlab_core::morphism::MapError::Invalid(e)) => Err(Failure::Check(format!("invalid: {}", e))),
                Err(e) => Err(usage(format!("{}: {}", map.map.display(), e))),
            }
        }
        Command::CheckAuto { map } => {
            let f = endo(group(&map.group)?, &map.map, map.partial_identity)?;
            let auto = f.is_automorphism();
            verdict(auto, auto.to_string())
        }
        Command::Sqrt { group: g, word } => {
            let x = element(group(&g)?, &word)?;
            x.sqrt_in_n()
                .map(|r| r.to_string())
                .map_err(|e| Failure::Check(e.to_string()))
        }
        Command::DecomposeEuc2 { sub } => {
            let (_, h) = sub_args(&sub)?;
            let d = h.decompose_euc2().map_err(|e| Failure::Check(e.to_string()))?;
            let split = d
                .splitting
                .iter()
                .map(|(u, v)| format!("{} -> {}", u, v))
                .collect::<Vec<_>>()
                .join(", ");
            verdict(
                d.verified,
                format!(
                    "projection {} = {}\nsplitting {}\ntorsion part {}\nverified {}",
                    d.projection_type,
                    gens(&d.projection),
                    if split.is_empty() { "none".to_string() } else { split },
                    gens(&d.torsion_part),
                    d.verified
                ),
            )
        }
        Command::Classify { group: g } => {
            let c = classify(group(&g)?);
            Ok(format!(
                "case {}\ncompressed_all {}\ninert_all {}",
                c.case, c.compressed_all, c.inert_all
            ))
        }
        Command::CertifyCompressed { sub } => {
            let (_, h) = sub_args(&sub)?;
            match check_compressed_certificate(&h).map_err(|e| usage(e.to_string()))? {
                Some(c) => Ok(format!(
                    "certified: rank {} = rank of abelianization image {}",
                    c.rank, c.image_rank
                )),
                None => Err(Failure::Check("no certificate".to_string())),
            }
        }
        Command::SearchCompression { search } => {
            let (_, h) = sub_args(&search.sub)?;
            let out = search_compression_counterexample(&h, search.max_word_len, search.max_gens)
                .map_err(|e| usage(e.to_string()))?;
            Ok(search_text(
                out.witness.map(|w| w.to_string()),
                out.examined,
                out.skipped_inexact,
            ))
        }
        Command::SearchInertia { search } => {
            let (_, h) = sub_args(&search.sub)?;
            let out = search_inertia_counterexample(&h, search.max_word_len, search.max_gens);
            Ok(search_text(
                out.witness.map(|w| w.to_string()),
                out.examined,
                out.skipped_inexact,
            ))
        }
        Command::SampleInertia {
            group: g,
            trials,
            seed,
            max_gens,
            max_word_len,
        } => {
            let rep = sample_inertia_property(group(&g)?, trials, max_gens, max_word_len, seed, None);
            verdict(rep.violations == 0, rep.to_string().trim_end().to_string())
        }
        Command::PaperSuite { scale } => {
            let report = paper_suite(match scale {
                ScaleArg::Quick => Scale::Quick,
                ScaleArg::Full => Scale::Full,
            });
            verdict(report.all_passed(), report.to_string().trim_end().to_string())
        }
    }
}

fn search_text(witness: Option<String>, examined: usize, skipped: usize) -> String {
    let head = witness.unwrap_or_else(|| "no witness within bounds".to_string());
    format!(
        "{}\nexamined {} candidates, skipped {} inexact",
        head, examined, skipped
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            println!("{}", text);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(text)) => {
            println!("{}", text);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
