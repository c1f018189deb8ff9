//! Command-line interface.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cxg_core::shift::{CheckpointSeries, GroupOn, ShiftSign};
use cxg_core::sim::generate_corpus;
use cxg_core::{LevelSet, MaxLen, Weighting};

use crate::config::RunConfig;
use crate::conllu::{read_conllu, write_conllu};
use crate::dump::{read_constructicon, write_constructicon_file};
use crate::error::{CliError, Result};
use crate::pipeline::{self, Manifest, Report, ReportFormat};
use crate::tables::{table_bytes, write_table};
use crate::template::{demo_template, load_template};

#[derive(Debug, Parser)]
#[command(
    name = "cxg",
    version,
    about = "Catena-based constructicons: extraction, distributional shift and population analyses"
)]
pub struct Cli {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed; for `gen-corpus` it replaces the template's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Abort on the first invalid sentence instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a CoNLL-U corpus from a grammar template.
    GenCorpus {
        #[arg(long)]
        template: PathBuf,
        #[arg(long, short = 'n')]
        n_sentences: usize,
        /// Defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Tabulate pattern frequencies of a treebank.
    Extract {
        #[arg(long, short)]
        input: PathBuf,
        /// TSV (or CSV by extension); defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        extraction: ExtractionArgs,
    },
    /// Build a constructicon dump from a treebank.
    Build {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Provenance stream name; defaults to the input path.
        #[arg(long)]
        stream: Option<String>,
        #[arg(long, default_value_t = 0)]
        checkpoint: u32,
        #[command(flatten)]
        extraction: ExtractionArgs,
    },
    /// Distributional shift of chains over a checkpoint series.
    Shift {
        /// Constructicon dumps, earliest first.
        #[arg(long, num_args = 1.., required = true)]
        checkpoints: Vec<PathBuf>,
        /// Constructicon whose chains are followed; defaults to the first checkpoint.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "speaker")]
        speaker: String,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum)]
        sign: Option<SignArg>,
        #[arg(long, value_enum)]
        group_on: Option<GroupArg>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Core and periphery of a simulated or observed population.
    Population {
        /// `manifest.toml` listing each speaker's dumps.
        #[arg(long, short)]
        manifest: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Use every produced pattern instead of those every speaker met.
        #[arg(long)]
        no_exposure_filter: bool,
        /// CoNLL-U sentences to project through the core and periphery.
        #[arg(long)]
        project: Option<PathBuf>,
    },
    /// Summarize shift and population output directories.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
        /// Defaults to standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Simulate a population of speakers and write their corpora and dumps.
    Simulate {
        /// Defaults to the bundled demonstration grammar.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        speakers: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        output_size: Option<usize>,
        /// Comma-separated novelty per checkpoint.
        #[arg(long, value_delimiter = ',')]
        novelty: Option<Vec<f64>>,
        #[command(flatten)]
        extraction: ExtractionArgs,
    },
    /// Simulate, then run every analysis and write a report.
    Demo {
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        template: Option<PathBuf>,
    },
}

#[derive(Debug, Default, Args)]
pub struct ExtractionArgs {
    /// Largest catena size, or `unbounded`.
    #[arg(long)]
    pub max_len: Option<MaxLen>,
    #[arg(long)]
    pub min_freq: Option<u64>,
    #[arg(long)]
    pub context_size: Option<usize>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    /// Comma-separated subset of `lex,pos,rel`.
    #[arg(long)]
    pub levels: Option<LevelSet>,
    #[arg(long)]
    pub include_punct: bool,
    #[arg(long)]
    pub catena_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    Raw,
    Ppmi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignArg {
    Distance,
    Similarity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupArg {
    KappaI,
    KappaJ,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Json,
}

impl ExtractionArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let e = &mut cfg.extraction;
        if let Some(m) = self.max_len {
            e.max_len = m;
        }
        if let Some(m) = self.min_freq {
            e.min_freq = m;
        }
        if let Some(k) = self.context_size {
            e.context_vocab_size = k;
        }
        if let Some(w) = self.weighting {
            e.weighting = match w {
                WeightingArg::Raw => Weighting::Raw,
                WeightingArg::Ppmi => Weighting::Ppmi,
            };
        }
        if let Some(l) = self.levels {
            e.levels = l;
        }
        if self.include_punct {
            e.exclude_punct = false;
        }
        if let Some(c) = self.catena_cap {
            e.catena_cap = c;
        }
    }
}

impl Cli {
    /// The configuration file overlaid with every flag given.
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if self.strict {
            cfg.strict = true;
        }
        match &self.command {
            Some(Command::Extract { extraction, .. }) | Some(Command::Build { extraction, .. }) => {
                extraction.apply(&mut cfg)
            }
            Some(Command::Simulate {
                extraction,
                speakers,
                batch_size,
                output_size,
                novelty,
                ..
            }) => {
                extraction.apply(&mut cfg);
                let s = &mut cfg.simulation;
                s.speakers = speakers.unwrap_or(s.speakers);
                s.batch_size = batch_size.unwrap_or(s.batch_size);
                s.output_size = output_size.unwrap_or(s.output_size);
                if let Some(n) = novelty {
                    s.novelty_schedule = n.clone();
                }
            }
            Some(Command::Shift {
                sign,
                group_on,
                bins,
                ..
            }) => {
                if let Some(s) = sign {
                    cfg.shift.sign = match s {
                        SignArg::Distance => ShiftSign::Distance,
                        SignArg::Similarity => ShiftSign::Similarity,
                    };
                }
                if let Some(g) = group_on {
                    cfg.shift.group_on = match g {
                        GroupArg::KappaI => GroupOn::KappaI,
                        GroupArg::KappaJ => GroupOn::KappaJ,
                    };
                }
                if let Some(b) = bins {
                    cfg.shift.bins = *b;
                }
            }
            Some(Command::Population {
                no_exposure_filter: true,
                ..
            }) => cfg.population.exposure_filter = false,
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<()> {
        let cfg = self.effective_config()?;
        if self.print_config {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        let Some(command) = &self.command else {
            return Err(CliError::Config("no command given; see --help".into()));
        };
        crate::parallel::pool(cfg.threads)?.install(|| run_command(command, &cfg, self.seed))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => crate::write_file(p, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(CliError::io("<stdout>")),
    }
}

fn run_command(command: &Command, cfg: &RunConfig, seed_flag: Option<u64>) -> Result<()> {
    match command {
        Command::GenCorpus {
            template,
            n_sentences,
            out,
        } => {
            let t = load_template(template)?;
            let seed = seed_flag.unwrap_or(t.seed);
            let corpus = generate_corpus(&t, *n_sentences, seed)?;
            emit(out.as_deref(), write_conllu(&corpus).as_bytes())
        }
        Command::Extract { input, out, .. } => {
            let corpus = read_conllu(input, &cfg.parse_options())?.corpus;
            let rows = pipeline::extract_table(&corpus, &cfg.extraction)?;
            match out {
                Some(p) => write_table(p, &rows, &["pattern", "frequency"]),
                None if rows.is_empty() => emit(None, b"pattern\tfrequency\n"),
                None => emit(None, &table_bytes(&rows, b'\t')),
            }
        }
        Command::Build {
            input,
            out,
            stream,
            checkpoint,
            ..
        } => {
            let corpus = read_conllu(input, &cfg.parse_options())?.corpus;
            let name = stream
                .clone()
                .unwrap_or_else(|| input.display().to_string());
            let c = crate::parallel::build_constructicon(&corpus, &cfg.extraction)?
                .with_provenance(name, *checkpoint);
            write_constructicon_file(out, &c)
        }
        Command::Shift {
            checkpoints,
            reference,
            speaker,
            out,
            ..
        } => {
            let dumps = checkpoints
                .iter()
                .map(|p| read_constructicon(p))
                .collect::<Result<Vec<_>>>()?;
            let series = CheckpointSeries::new(speaker.clone(), dumps)?;
            let reference = match reference {
                Some(p) => read_constructicon(p)?,
                None => series.first().clone(),
            };
            let outcome = pipeline::analyse_shift(&series, &reference, &cfg.shift)?;
            pipeline::write_shift(out, &outcome).map(drop)
        }
        Command::Population {
            manifest,
            out,
            project,
            ..
        } => {
            let m = Manifest::load(manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let pop = m.population(base)?;
            let sentences = match project {
                Some(p) => Some(read_conllu(p, &cfg.parse_options())?.corpus),
                None => None,
            };
            let outcome = pipeline::analyse_population(
                &pop,
                cfg.population.exposure_filter,
                sentences.as_ref(),
            )?;
            pipeline::write_population(out, &outcome).map(drop)
        }
        Command::Report { dirs, format, out } => {
            let format = match format {
                FormatArg::Markdown => ReportFormat::Markdown,
                FormatArg::Json => ReportFormat::Json,
            };
            let text = Report::collect(dirs)?.render(format);
            emit(out.as_deref(), text.as_bytes())
        }
        Command::Simulate { template, out, .. } => {
            let t = match template {
                Some(p) => load_template(p)?,
                None => demo_template(),
            };
            pipeline::simulate(&t, cfg, out).map(drop)
        }
        Command::Demo { out, template } => {
            let t = match template {
                Some(p) => load_template(p)?,
                None => demo_template(),
            };
            for p in pipeline::demo(&t, cfg, out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}
