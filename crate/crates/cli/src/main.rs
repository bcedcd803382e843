use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kpn_core::access::{make_gamma, structure_by_name, Participant};
use kpn_core::bound::{kappa, lemma_certificate, verify_certificate, Lemma};
use kpn_core::entropy::{
    budget_from_env, check_perfect, check_uniform_shares, enumerate_joint_with_budget, entropy_report,
};
use kpn_core::field::{Prime, Residue};
use kpn_core::schemes::{deal, nominal_rate, reconstruct, SchemeKind, SchemeSpec, SecretVector, ShareFile};
use kpn_core::{format_ratio, Error};
use serde_json::{json, Value};

mod plain;

#[derive(Parser)]
#[command(name = "kpn", version, about = "Secret sharing on the king-and-n-pawns access structures")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Sigma1,
    Sigma2,
    Composite,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Sigma1 => SchemeKind::Sigma1,
            Scheme::Sigma2 => SchemeKind::Sigma2,
            Scheme::Composite => SchemeKind::Composite,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaArg {
    Down,
    Up,
    Combined,
}

impl From<LemmaArg> for Lemma {
    fn from(l: LemmaArg) -> Self {
        match l {
            LemmaArg::Down => Lemma::Down,
            LemmaArg::Up => Lemma::Up,
            LemmaArg::Combined => Lemma::Combined,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the access structure Γ_n.
    Gamma {
        #[arg(long)]
        n: u32,
    },
    /// Deal a secret and write the shares with their transcript.
    Deal {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        n: u32,
        /// Field modulus; defaults to the smallest prime above 2n-1.
        #[arg(long)]
        q: Option<u64>,
        /// Comma-separated secret symbols.
        #[arg(long)]
        secret: String,
        #[arg(long)]
        seed: u64,
        /// Write the share file here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the secret from a share file using a set of participants.
    Reconstruct {
        #[arg(long)]
        shares: PathBuf,
        /// Comma-separated participants, e.g. `k,p2`.
        #[arg(long)]
        set: String,
    },
    /// Check perfectness and share uniformity by exhaustive enumeration.
    Verify {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Information rate of the composite scheme.
    Rate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Solve the Shannon LP for κ and the rate upper bound.
    Bound {
        /// `gamma_N`, `path4`, `fan` or `triangle-d`.
        #[arg(long)]
        structure: String,
    },
    /// Build and verify one of the summation certificates.
    Certify {
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        #[arg(long)]
        n: u32,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// A report and whether the command's check succeeded.
struct Outcome {
    report: Value,
    ok: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            match cli.format {
                Format::Json => println!("{}", outcome.report),
                Format::Plain => print!("{}", plain::render(&outcome.report)),
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn spec_for(kind: SchemeKind, n: u32, q: Option<u64>) -> Result<SchemeSpec, Failure> {
    Ok(match q {
        Some(q) => SchemeSpec::new(kind, n, Prime::new(q)?)?,
        None => SchemeSpec::with_default_q(kind, n)?,
    })
}

fn parse_list<T: std::str::FromStr>(csv: &str, what: &str) -> Result<Vec<T>, Failure> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::Usage(format!("bad {what} {s:?}"))))
        .collect()
}

fn budget() -> Result<u128, Failure> {
    Ok(budget_from_env()?)
}

fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Gamma { n } => {
            let g = make_gamma(n)?;
            Ok(Outcome::ok(serde_json::to_value(&g).expect("structure serializes")))
        }

        Command::Deal {
            scheme,
            n,
            q,
            secret,
            seed,
            out,
        } => {
            let spec = spec_for(scheme.into(), n, q)?;
            let secret = SecretVector(parse_list::<Residue>(&secret, "secret symbol")?);
            let (bundle, transcript) = deal(&spec, &secret, seed)?;
            let file = ShareFile::new(&bundle, Some(transcript));
            let text = serde_json::to_string_pretty(&file).expect("share file serializes");
            match out {
                Some(path) => {
                    fs::write(&path, text + "\n")
                        .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))?;
                    Ok(Outcome::ok(json!({
                        "scheme": spec.kind(),
                        "n": n,
                        "q": spec.q().get(),
                        "out": path.display().to_string(),
                    })))
                }
                None => Ok(Outcome::ok(serde_json::to_value(&file).expect("share file serializes"))),
            }
        }

        Command::Reconstruct { shares, set } => {
            let text = fs::read_to_string(&shares)
                .map_err(|e| Failure::Usage(format!("reading {}: {e}", shares.display())))?;
            let file: ShareFile = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("parsing {}: {e}", shares.display())))?;
            let bundle = file.into_bundle()?;
            let members: Vec<Participant> = parse_list(&set, "participant")?;
            let secret = reconstruct(&bundle.spec, &bundle.restrict(&members), &members)?;
            Ok(Outcome::ok(json!({
                "set": members,
                "secret": secret.0,
            })))
        }

        Command::Verify { scheme, n, q } => {
            let spec = spec_for(scheme.into(), n, q)?;
            let table = enumerate_joint_with_budget(&spec, budget()?)?;
            let perfect = check_perfect(&table, &spec.structure())?;
            let uniform = check_uniform_shares(&table);
            let report = entropy_report(&table, &[]);
            let all_uniform = uniform.values().all(|&u| u);
            Ok(Outcome {
                ok: perfect.perfect && all_uniform,
                report: json!({
                    "scheme": spec.kind(),
                    "n": n,
                    "q": spec.q().get(),
                    "outcomes": table.total(),
                    "perfect": perfect.perfect,
                    "qualified_checked": perfect.qualified_checked,
                    "unqualified_checked": perfect.unqualified_checked,
                    "violations": perfect.violations,
                    "uniform": by_name(uniform),
                    "rates": by_name(report.rates),
                    "min_rate": report.min_rate,
                }),
            })
        }

        Command::Rate { n, q } => {
            let spec = spec_for(SchemeKind::Composite, n, q)?;
            let nominal = nominal_rate(&spec);
            let mut report = json!({
                "n": n,
                "q": spec.q().get(),
                "nominal_rate": format_ratio(&nominal),
            });
            match enumerate_joint_with_budget(&spec, budget()?) {
                Ok(table) => {
                    let entropy = entropy_report(&table, &[]);
                    report["min_rate"] = json!(entropy.min_rate);
                    report["rates"] = json!(by_name(entropy.rates));
                    report["oracle"] = json!(true);
                }
                Err(Error::EnumerationTooLarge { .. }) => {
                    report["min_rate"] = json!(format_ratio(&nominal));
                    report["oracle"] = json!(false);
                }
                Err(e) => return Err(e.into()),
            }
            Ok(Outcome::ok(report))
        }

        Command::Bound { structure } => {
            let g = structure_by_name(&structure)?;
            let k = kappa(&g)?;
            let verified = match structure.strip_prefix("gamma_").and_then(|n| n.parse::<u32>().ok()) {
                Some(n) => Some(verify_certificate(&lemma_certificate(Lemma::Combined, n)?)),
                None => None,
            };
            Ok(Outcome {
                ok: verified != Some(false),
                report: json!({
                    "structure": structure,
                    "kappa": format_ratio(&k),
                    "rate_upper_bound": format_ratio(&k.recip()),
                    "certificate_verified": verified,
                }),
            })
        }

        Command::Certify { lemma, n } => {
            let lemma: Lemma = lemma.into();
            let c = lemma_certificate(lemma, n)?;
            let verified = verify_certificate(&c);
            Ok(Outcome {
                ok: verified,
                report: json!({
                    "lemma": lemma,
                    "n": n,
                    "target": c.target.display(&c.structure),
                    "constant": format_ratio(&c.target.constant),
                    "share_bound": c.implied_share_bound().map(|r| format_ratio(&r)),
                    "verified": verified,
                    "items": c.to_items(),
                }),
            })
        }
    }
}

fn by_name<V: serde::Serialize>(map: BTreeMap<Participant, V>) -> BTreeMap<String, V> {
    map.into_iter().map(|(p, v)| (p.to_string(), v)).collect()
}
