use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use iot_select::campaign::{self, SummaryRow};
use iot_select::config::{CampaignConfig, OutputFormat, Preset};
use iot_select::decision::ActionSpace;
use iot_select::report::{self, Report};
use iot_select::Result;

#[derive(Parser)]
#[command(name = "iot-select", version, about = "IoT connectivity and processing selection campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Lbra,
    Lbru,
    Hbra,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Lbra => Preset::Lbra,
            PresetArg::Lbru => Preset::Lbru,
            PresetArg::Hbra => Preset::Hbra,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write its reports.
    Run {
        /// JSON configuration; defaults apply to every missing key.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Experiment preset. Give two to also write a loss table of the
        /// second against the first.
        #[arg(long, value_enum)]
        preset: Vec<PresetArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Loss table of run B against run A.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Print the action table with indices.
    DumpActions {
        #[arg(long, default_value_t = 5)]
        step: u32,
    },
}

fn run_one(cfg: &CampaignConfig, workers: usize, dir: &std::path::Path) -> Result<Vec<SummaryRow>> {
    let result = campaign::run_campaign(cfg, workers)?;
    let rep = Report::new(cfg, result);
    report::write_files(dir, &report::run_files(&rep, cfg.output.format)?)?;
    eprintln!("wrote {}", dir.display());
    print!("{}", report::summary_csv(&rep.summary));
    Ok(rep.summary)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seed, repeats, preset, out, format, workers } => {
            let mut cfg = match config {
                Some(path) => CampaignConfig::load(&path)?,
                None => CampaignConfig::default(),
            };
            if let Some(s) = seed {
                cfg.experiment.seed = s;
            }
            if let Some(r) = repeats {
                cfg.experiment.repeats = r;
            }
            if let Some(o) = out {
                cfg.output.out_dir = o;
            }
            if let Some(f) = format {
                cfg.output.format = match f {
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Json => OutputFormat::Json,
                };
            }
            let out_dir = cfg.output.out_dir.clone();
            let presets: Vec<Preset> = preset.into_iter().map(Preset::from).collect();
            match presets.as_slice() {
                [] => {
                    cfg.resolve()?;
                    run_one(&cfg, workers, &out_dir)?;
                }
                [p] => {
                    p.apply(&mut cfg.experiment);
                    cfg.resolve()?;
                    run_one(&cfg, workers, &out_dir)?;
                }
                _ => {
                    let configs: Vec<(Preset, CampaignConfig)> = presets
                        .iter()
                        .map(|&p| {
                            let mut c = cfg.clone();
                            p.apply(&mut c.experiment);
                            c.output.out_dir = out_dir.join(p.name());
                            c.resolve().map(|_| (p, c))
                        })
                        .collect::<Result<_>>()?;
                    let mut summaries = Vec::new();
                    for (p, c) in &configs {
                        eprintln!("running preset {}", p.name());
                        summaries.push(run_one(c, workers, &c.output.out_dir)?);
                    }
                    if presets.len() == 2 {
                        let rows = campaign::loss_table(&summaries[0], &summaries[1])?;
                        let body = report::loss_csv(presets[0].name(), presets[1].name(), &rows);
                        report::write_files(&out_dir, &[("loss_table.csv", body.clone())])?;
                        print!("{body}");
                    }
                }
            }
        }
        Command::Compare { a, b } => {
            let (ra, rb) = (Report::load(&a)?, Report::load(&b)?);
            let rows = campaign::loss_table(&ra.summary, &rb.summary)?;
            for r in rows.iter().filter(|r| r.loss.is_none()) {
                eprintln!("warning: loss for {} is undefined (second run equals the best benchmark)", r.metric);
            }
            print!("{}", report::loss_csv("a", "b", &rows));
        }
        Command::DumpActions { step } => {
            let space = ActionSpace::new(step)?;
            println!("index,option,psi");
            for a in space.iter() {
                match a.psi {
                    Some(p) => println!("{},{},{p}", a.index, a.option),
                    None => println!("{},{},", a.index, a.option),
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
