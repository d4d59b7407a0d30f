use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use zetareg::chowcat::Catalog;
use zetareg::cli::{
    count_options, exit_code, render_table, verify_all, zeta_from_variety, InputError, Scenario, DEFAULT_MAX_N,
};
use zetareg::geometry::{counts_within_budget, BaseField, Variety, VarietySpec};
use zetareg::weight::{build_snc_complex, localization_check, weight_homology, Lambda, SNCConfigData};
use zetareg::zeta::special_value;

#[derive(Parser)]
#[command(name = "zetareg", version, about = "Zeta functions, special values and weight homology over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point counts N_1..N_n of a variety.
    Count {
        /// JSON with "base" and "variety" (a scenario file works).
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: u32,
    },
    /// Zeta function recovered from point counts.
    Zeta {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: u32,
    },
    /// Order and leading Laurent coefficient of Z at t = q^-r.
    SpecialValue {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: i64,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: u32,
    },
    /// Weight homology of a normal crossing configuration.
    WeightHomology {
        /// A configuration, or a scenario with an "snc" section.
        input: PathBuf,
        /// "Z" or "Z[1/p]".
        #[arg(long, default_value = "Z")]
        lambda: String,
    },
    /// Check scenario targets; exits 0 iff every non-skipped target matches.
    Verify {
        #[arg(long = "scenario", required = false)]
        scenarios: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the bundled Chow catalog.
    Catalog {
        #[arg(long)]
        tag: Option<String>,
    },
}

#[derive(Deserialize)]
struct VarietyInput {
    base: BaseField,
    variety: VarietySpec,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SncInput {
    Scenario { snc: SncWrapped },
    Bare(SNCConfigData),
}

#[derive(Deserialize)]
struct SncWrapped {
    config: SNCConfigData,
}

const INPUT_ERROR: u8 = 2;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn variety(path: &Path) -> Result<Variety, String> {
    let input: VarietyInput = read_json(path).map_err(|e| e.to_string())?;
    Variety::new(input.base, input.variety).map_err(|e| format!("{}: {e}", path.display()))
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<u8, String> {
    let opts = count_options();
    match cli.command {
        Command::Count { input, max_n } => {
            let v = variety(&input)?;
            let counts = counts_within_budget(&v, max_n, &opts).map_err(|e| e.to_string())?;
            print(&json!({ "counts": counts.iter().map(ToString::to_string).collect::<Vec<_>>() }));
            Ok(0)
        }
        Command::Zeta { input, max_n } => {
            let v = variety(&input)?;
            let z = zeta_from_variety(&v, max_n, &opts)?;
            print(&serde_json::to_value(&z).expect("serializable"));
            Ok(0)
        }
        Command::SpecialValue { input, at, max_n } => {
            let v = variety(&input)?;
            let z = zeta_from_variety(&v, max_n, &opts)?;
            let lv = special_value(&z.zeta, &v.base().q(), at).map_err(|e| e.to_string())?;
            print(&json!({ "r": at, "zeta": z.zeta, "laurent": lv }));
            Ok(0)
        }
        Command::WeightHomology { input, lambda } => {
            let lambda: Lambda = serde_json::from_value(json!(lambda)).map_err(|e| e.to_string())?;
            let data = match read_json::<SncInput>(&input).map_err(|e| e.to_string())? {
                SncInput::Scenario { snc } => snc.config,
                SncInput::Bare(c) => c,
            };
            let cfg = data.build().map_err(|e| format!("{e:?}"))?;
            let w = build_snc_complex(&cfg, lambda).map_err(|e| format!("{e:?}"))?;
            let h = weight_homology(&w);
            let loc = localization_check(&cfg, lambda).map_err(|e| format!("{e:?}"))?;
            print(&json!({
                "lambda": lambda,
                "homology": h.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "localization_exact": loc.is_exact(),
            }));
            Ok(0)
        }
        Command::Verify { scenarios, jobs, json, out } => {
            let loaded = scenarios
                .iter()
                .map(|p| Scenario::load(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let reports = verify_all(&loaded, jobs, &opts);
            let text = serde_json::to_string_pretty(&reports).expect("serializable");
            if let Some(path) = out {
                std::fs::write(&path, format!("{text}\n")).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            if json {
                println!("{text}");
            } else {
                print!("{}", render_table(&reports));
            }
            Ok(exit_code(&reports) as u8)
        }
        Command::Catalog { tag } => {
            let catalog = Catalog::bundled();
            let v = match tag {
                Some(t) => serde_json::to_value(catalog.get(&t).map_err(|e| e.to_string())?),
                None => serde_json::to_value(catalog.profiles()),
            };
            print(&v.expect("serializable"));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
