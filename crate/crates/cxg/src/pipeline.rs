//! The analyses behind each command, with their on-disk layouts.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use cxg_core::constructicon::{extract_sentence, PatternTally};
use cxg_core::population::{
    activation_comparison, core_periphery, coverage_matrix, g_at_least, input_frequency_comparison,
    project_sentence, Population, SpeakerRecord,
};
use cxg_core::shift::{
    average_shift_by, bin_by_shift, chains_in, compute_shifts_signed, monotonicity_report, Binning,
    CheckpointSeries,
};
use cxg_core::sim::GrammarTemplate;
use cxg_core::stats::{kruskal_wallis, median, KruskalWallis};
use cxg_core::{Constructicon, Corpus, Error, ExtractionConfig, Pattern};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, ShiftConfig};
use crate::conllu::{read_conllu, write_conllu};
use crate::dump::{read_constructicon, write_constructicon_file};
use crate::error::{CliError, Result};
use crate::parallel;
use crate::tables::{
    read_json, write_json, write_table, BinCosine, ChainRow, GroupFrequency, PatternFrequency,
    Projection, ShiftTableRow,
};

/// Pattern frequencies at or above `min_freq`, most frequent first, ties by pattern.
pub fn extract_table(corpus: &Corpus, cfg: &ExtractionConfig) -> Result<Vec<PatternFrequency>> {
    cfg.validate()?;
    let tally = corpus
        .trees()
        .par_iter()
        .map(|t| extract_sentence(t, cfg))
        .try_fold(PatternTally::new, |mut acc, s| {
            acc.add(&s?);
            Ok::<_, Error>(acc)
        })
        .try_reduce(PatternTally::new, |a, b| Ok(a.merge(b)))?;
    let mut rows: Vec<PatternFrequency> = tally
        .counts()
        .iter()
        .filter(|(_, &c)| c >= cfg.min_freq)
        .map(|(p, &c)| PatternFrequency {
            pattern: p.to_string(),
            frequency: c,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.pattern.cmp(&b.pattern))
    });
    if rows.is_empty() {
        log::warn!("no pattern reaches min_freq = {}", cfg.min_freq);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub bin: String,
    pub rows: usize,
    /// Largest mean shift in the bin.
    pub upper: f64,
    pub median_cosine: f64,
}

/// The JSON summary written next to the shift tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSummary {
    pub speaker: String,
    pub checkpoints: usize,
    pub sign: String,
    pub group_on: String,
    pub chains: usize,
    pub rows: usize,
    /// Share of chains whose distance never drops across checkpoints.
    pub monotone_fraction: f64,
    pub bins: Vec<BinSummary>,
    pub degenerate_bins: bool,
    pub kruskal_wallis: KruskalWallis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOutcome {
    pub summary: ShiftSummary,
    pub chains: Vec<ChainRow>,
    pub table: Vec<ShiftTableRow>,
    pub plot: Vec<BinCosine>,
}

/// Shifts of the reference's chains across the series, averaged, binned and tested.
pub fn analyse_shift(
    series: &CheckpointSeries,
    reference: &Constructicon,
    cfg: &ShiftConfig,
) -> Result<ShiftOutcome> {
    let chains = chains_in(reference);
    let shifts = compute_shifts_signed(series, &chains, cfg.sign)?;
    let rows = average_shift_by(&shifts, cfg.group_on)?;
    let binning = bin_by_shift(&rows, cfg.bins)?;
    let test = kruskal_wallis(&binning.cosines())?;
    let monotone_fraction = monotonicity_report(series, &chains);

    let mut bin_of: BTreeMap<&Pattern, String> = BTreeMap::new();
    let mut plot = Vec::new();
    let mut bins = Vec::new();
    for (b, rows_in_bin) in binning.bins.iter().enumerate() {
        let label = Binning::label(b, cfg.bins);
        for r in rows_in_bin {
            bin_of.insert(&r.kappa, label.clone());
            plot.push(BinCosine {
                bin: label.clone(),
                kappa: r.kappa.to_string(),
                mean_cosine: r.mean_cosine,
            });
        }
        let cos: Vec<f64> = rows_in_bin.iter().map(|r| r.mean_cosine).collect();
        bins.push(BinSummary {
            bin: label,
            rows: rows_in_bin.len(),
            upper: rows_in_bin.last().expect("bins are non-empty").mean_shift,
            median_cosine: median(&cos).expect("bins are non-empty"),
        });
    }
    let table = rows
        .iter()
        .map(|r| ShiftTableRow {
            kappa: r.kappa.to_string(),
            mean_shift: r.mean_shift,
            mean_cosine: r.mean_cosine,
            n_chains: r.n_chains,
            bin: bin_of[&r.kappa].clone(),
        })
        .collect();
    let chain_rows = shifts
        .iter()
        .map(|s| ChainRow {
            kappa_i: s.kappa_i.to_string(),
            kappa_j: s.kappa_j.to_string(),
            d_first: s.d_first,
            d_last: s.d_last,
            shift: s.shift,
        })
        .collect();
    Ok(ShiftOutcome {
        summary: ShiftSummary {
            speaker: series.speaker_id().into(),
            checkpoints: series.len(),
            sign: cfg.sign.to_string(),
            group_on: cfg.group_on.name().into(),
            chains: shifts.len(),
            rows: rows.len(),
            monotone_fraction,
            bins,
            degenerate_bins: binning.degenerate,
            kruskal_wallis: test,
        },
        chains: chain_rows,
        table,
        plot,
    })
}

pub const SHIFT_SUMMARY: &str = "kruskal.json";

pub fn write_shift(dir: &Path, out: &ShiftOutcome) -> Result<Vec<PathBuf>> {
    let paths = [
        dir.join("chains.tsv"),
        dir.join("shift_table.tsv"),
        dir.join("bins.csv"),
        dir.join(SHIFT_SUMMARY),
    ];
    write_table(
        &paths[0],
        &out.chains,
        &["kappa_i", "kappa_j", "d_first", "d_last", "shift"],
    )?;
    write_table(
        &paths[1],
        &out.table,
        &["kappa", "mean_shift", "mean_cosine", "n_chains", "bin"],
    )?;
    write_table(&paths[2], &out.plot, &["bin", "kappa", "mean_cosine"])?;
    write_json(&paths[3], &out.summary)?;
    Ok(paths.to_vec())
}

/// Population manifest: constructicon dumps per speaker, paths relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    #[serde(rename = "speaker", default)]
    pub speakers: Vec<ManifestSpeaker>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSpeaker {
    pub id: String,
    pub input: PathBuf,
    pub outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let m: Manifest = toml::from_str(&text).map_err(|e| CliError::format(path, e))?;
        if m.version != 1 {
            return Err(CliError::format(
                path,
                format!("unsupported manifest version {}", m.version),
            ));
        }
        let mut seen = BTreeSet::new();
        for s in &m.speakers {
            if !seen.insert(s.id.as_str()) {
                return Err(CliError::DuplicateSpeaker(s.id.clone()));
            }
        }
        Ok(m)
    }

    /// Reads every dump the manifest names.
    pub fn population(&self, base: &Path) -> Result<Population> {
        let speakers = self
            .speakers
            .par_iter()
            .map(|s| {
                let input = read_constructicon(&base.join(&s.input))?;
                let outputs = s
                    .outputs
                    .iter()
                    .map(|p| read_constructicon(&base.join(p)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SpeakerRecord::new(s.id.clone(), input, outputs)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Population::new(speakers)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub patterns: usize,
    pub samples: usize,
    /// Absent when no speaker's input holds a pattern of the group.
    pub median_input_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationRow {
    pub speaker_i: String,
    pub speaker_j: String,
    /// Projected sentences on which both speakers activate a shared pattern.
    pub sentences: usize,
    pub mean_similarity: Option<f64>,
}

/// The JSON written by `population`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub speakers: Vec<String>,
    pub exposure_filter: bool,
    pub universe: usize,
    /// Sizes of `G≥p` for p = 1..=P.
    pub g_at_least: Vec<usize>,
    pub groups: Vec<GroupSummary>,
    pub kruskal_wallis: KruskalWallis,
    /// Row i, column j: share of speaker j's final output that speaker i retains.
    pub coverage: Vec<Vec<f64>>,
    pub activation: Vec<ActivationRow>,
    pub core: Vec<String>,
    pub periphery: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationOutcome {
    pub summary: PopulationSummary,
    pub frequencies: Vec<GroupFrequency>,
    pub projections: Vec<Projection>,
}

pub fn analyse_population(
    pop: &Population,
    exposure_filter: bool,
    sentences: Option<&Corpus>,
) -> Result<PopulationOutcome> {
    let split = core_periphery(pop, exposure_filter)?;
    let cmp = input_frequency_comparison(pop, &split)?;
    let g = (1..=pop.len())
        .map(|p| g_at_least(pop, p).map(|g| g.len()))
        .collect::<cxg_core::Result<Vec<_>>>()?;
    let coverage = coverage_matrix(pop)?;
    let ids: Vec<String> = pop
        .speakers()
        .iter()
        .map(|s| s.speaker_id.clone())
        .collect();

    let groups = split
        .groups()
        .iter()
        .map(|(name, set)| {
            let found = cmp.group(name);
            GroupSummary {
                group: (*name).into(),
                patterns: set.len(),
                samples: found.map_or(0, |g| g.samples.len()),
                median_input_frequency: found.map(|g| g.median),
            }
        })
        .collect();
    let frequencies = cmp
        .groups
        .iter()
        .flat_map(|g| {
            g.samples.iter().map(|s| GroupFrequency {
                group: g.group.clone(),
                speaker: s.speaker.clone(),
                pattern: s.pattern.to_string(),
                frequency: s.frequency,
            })
        })
        .collect();

    let mut projections = Vec::new();
    let mut activation = Vec::new();
    if let Some(corpus) = sentences {
        let freq = pop.aggregate_frequencies();
        let cfg = pop.config();
        for tree in corpus {
            let core = project_sentence(tree, &split.core.patterns, cfg, &freq)?;
            let periphery = project_sentence(tree, &split.periphery.patterns, cfg, &freq)?;
            for (k, t) in tree.tokens().iter().enumerate() {
                projections.push(Projection {
                    sent_id: tree.sent_id().into(),
                    token_id: t.id,
                    token: t.form.clone(),
                    core: core[k].clone(),
                    periphery: periphery[k].clone(),
                });
            }
        }
        for (a, i) in ids.iter().enumerate() {
            for j in &ids[a + 1..] {
                let mut sims = Vec::new();
                for tree in corpus {
                    match activation_comparison(pop, i, j, tree) {
                        Ok(s) => sims.push(s),
                        Err(Error::NoSharedActivation(..)) => {}
                        Err(e) => return Err(e.into()),
                    }
                }
                activation.push(ActivationRow {
                    speaker_i: i.clone(),
                    speaker_j: j.clone(),
                    sentences: sims.len(),
                    mean_similarity: (!sims.is_empty())
                        .then(|| sims.iter().sum::<f64>() / sims.len() as f64),
                });
            }
        }
    }

    Ok(PopulationOutcome {
        summary: PopulationSummary {
            speakers: ids,
            exposure_filter,
            universe: split.universe.len(),
            g_at_least: g,
            groups,
            kruskal_wallis: cmp.test,
            coverage,
            activation,
            core: split
                .core
                .patterns
                .iter()
                .map(ToString::to_string)
                .collect(),
            periphery: split
                .periphery
                .patterns
                .iter()
                .map(ToString::to_string)
                .collect(),
        },
        frequencies,
        projections,
    })
}

pub const POPULATION_SUMMARY: &str = "population.json";

pub fn write_population(dir: &Path, out: &PopulationOutcome) -> Result<Vec<PathBuf>> {
    let mut paths = vec![dir.join(POPULATION_SUMMARY), dir.join("frequencies.csv")];
    write_json(&paths[0], &out.summary)?;
    write_table(
        &paths[1],
        &out.frequencies,
        &["group", "speaker", "pattern", "frequency"],
    )?;
    if !out.projections.is_empty() {
        let p = dir.join("projections.tsv");
        write_table(
            &p,
            &out.projections,
            &["sent_id", "token_id", "token", "core", "periphery"],
        )?;
        paths.push(p);
    }
    Ok(paths)
}

/// Simulates `cfg.simulation.speakers` speakers and writes, per speaker,
/// the input corpus, each checkpoint's output corpus and every
/// constructicon, plus `manifest.toml`.
pub fn simulate(
    template: &GrammarTemplate,
    cfg: &RunConfig,
    dir: &Path,
) -> Result<(Manifest, Vec<PathBuf>)> {
    cfg.validate()?;
    let runs = parallel::simulate_population(template, &cfg.speaker_plans(), &cfg.extraction)?;
    let mut manifest = Manifest {
        version: 1,
        speakers: Vec::new(),
    };
    let mut written = Vec::new();
    for run in &runs {
        let id = &run.record.speaker_id;
        let rel = |name: String| PathBuf::from(id).join(name);
        let input_corpus = rel("input.conllu".into());
        crate::write_file(
            &dir.join(&input_corpus),
            write_conllu(&run.input).as_bytes(),
        )?;
        let input = rel("input.cxg".into());
        write_constructicon_file(&dir.join(&input), &run.record.input)?;
        written.extend([input_corpus, input.clone()]);
        let mut outputs = Vec::new();
        for (b, (corpus, lambda)) in run.outputs.iter().zip(&run.record.outputs).enumerate() {
            let c = rel(format!("output-{}.conllu", b + 1));
            crate::write_file(&dir.join(&c), write_conllu(corpus).as_bytes())?;
            let l = rel(format!("output-{}.cxg", b + 1));
            write_constructicon_file(&dir.join(&l), lambda)?;
            written.extend([c, l.clone()]);
            outputs.push(l);
        }
        manifest.speakers.push(ManifestSpeaker {
            id: id.clone(),
            input,
            outputs,
        });
    }
    let m = PathBuf::from("manifest.toml");
    crate::write_file(
        &dir.join(&m),
        toml::to_string(&manifest)
            .expect("manifest serializes")
            .as_bytes(),
    )?;
    written.push(m);
    Ok((manifest, written.into_iter().map(|p| dir.join(p)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub shift: Vec<ShiftSummary>,
    pub population: Vec<PopulationSummary>,
}

impl Report {
    /// Collects every summary found in `dirs`.
    pub fn collect(dirs: &[PathBuf]) -> Result<Self> {
        let mut report = Report {
            shift: Vec::new(),
            population: Vec::new(),
        };
        for d in dirs {
            let (s, p) = (d.join(SHIFT_SUMMARY), d.join(POPULATION_SUMMARY));
            let mut found = false;
            if s.is_file() {
                report.shift.push(read_json(&s)?);
                found = true;
            }
            if p.is_file() {
                report.population.push(read_json(&p)?);
                found = true;
            }
            if !found {
                return Err(CliError::format(
                    d,
                    format!("contains neither {SHIFT_SUMMARY} nor {POPULATION_SUMMARY}"),
                ));
            }
        }
        Ok(report)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            ReportFormat::Markdown => self.markdown(),
        }
    }

    fn markdown(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("# Constructicon analysis report\n");
        for s in &self.shift {
            let kw = &s.kruskal_wallis;
            writeln!(out, "\n## Distributional shift: {}\n", s.speaker).unwrap();
            writeln!(
                out,
                "{} checkpoints, {} chains grouped on {} into {} rows; shift sign: {}.\n",
                s.checkpoints, s.chains, s.group_on, s.rows, s.sign
            )
            .unwrap();
            writeln!(
                out,
                "Chains with non-decreasing distance: {:.3}\n",
                s.monotone_fraction
            )
            .unwrap();
            out.push_str(
                "| bin | rows | max mean shift | median input cosine |\n|---|---:|---:|---:|\n",
            );
            for b in &s.bins {
                writeln!(
                    out,
                    "| {} | {} | {:.4} | {:.4} |",
                    b.bin, b.rows, b.upper, b.median_cosine
                )
                .unwrap();
            }
            writeln!(
                out,
                "\nKruskal-Wallis: H = {:.4}, df = {}, p = {:.4e}",
                kw.h, kw.df, kw.p
            )
            .unwrap();
            if s.degenerate_bins {
                out.push_str("\nTied shifts straddle a bin boundary.\n");
            }
        }
        for p in &self.population {
            let kw = &p.kruskal_wallis;
            writeln!(out, "\n## Population: {} speakers\n", p.speakers.len()).unwrap();
            writeln!(
                out,
                "Universe: {} patterns ({}).\n",
                p.universe,
                if p.exposure_filter {
                    "exposed to every speaker"
                } else {
                    "produced by some speaker"
                }
            )
            .unwrap();
            out.push_str(
                "| group | patterns | samples | median input frequency |\n|---|---:|---:|---:|\n",
            );
            for g in &p.groups {
                let median = g
                    .median_input_frequency
                    .map_or("-".into(), |m| m.to_string());
                writeln!(
                    out,
                    "| {} | {} | {} | {median} |",
                    g.group, g.patterns, g.samples
                )
                .unwrap();
            }
            writeln!(
                out,
                "\nKruskal-Wallis: H = {:.4}, df = {}, p = {:.4e}",
                kw.h, kw.df, kw.p
            )
            .unwrap();
            out.push_str("\nG≥p sizes: ");
            let sizes: Vec<String> = p
                .g_at_least
                .iter()
                .enumerate()
                .map(|(k, n)| format!("p={}: {n}", k + 1))
                .collect();
            out.push_str(&sizes.join(", "));
            out.push('\n');
            out.push_str("\nCoverage (row retains column's output):\n\n| |");
            for s in &p.speakers {
                write!(out, " {s} |").unwrap();
            }
            out.push_str("\n|---|");
            out.push_str(&"---:|".repeat(p.speakers.len()));
            out.push('\n');
            for (s, row) in p.speakers.iter().zip(&p.coverage) {
                write!(out, "| {s} |").unwrap();
                for c in row {
                    write!(out, " {c:.3} |").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Everything `demo` produces, relative to its output directory.
pub fn demo(template: &GrammarTemplate, cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let sim_dir = dir.join("sim");
    let (manifest, mut written) = simulate(template, cfg, &sim_dir)?;
    let pop = manifest.population(&sim_dir)?;

    let mut report_dirs = Vec::new();
    for s in pop.speakers() {
        let out_dir = dir.join("shift").join(&s.speaker_id);
        let series = s.output_series()?;
        let outcome = analyse_shift(&series, &s.input, &cfg.shift)?;
        written.extend(write_shift(&out_dir, &outcome)?);
        report_dirs.push(out_dir);
    }

    let first = &manifest.speakers[0].id;
    let sample = read_conllu(
        &sim_dir.join(first).join("input.conllu"),
        &cfg.parse_options(),
    )?
    .corpus;
    let sample = Corpus::new(
        sample.source(),
        sample.trees().iter().take(5).cloned().collect(),
    )?;
    let pop_dir = dir.join("population");
    let outcome = analyse_population(&pop, cfg.population.exposure_filter, Some(&sample))?;
    written.extend(write_population(&pop_dir, &outcome)?);
    report_dirs.push(pop_dir);

    let report = Report::collect(&report_dirs)?;
    for (name, format) in [
        ("report.md", ReportFormat::Markdown),
        ("report.json", ReportFormat::Json),
    ] {
        let p = dir.join(name);
        crate::write_file(&p, report.render(format).as_bytes())?;
        written.push(p);
    }
    written.sort();
    Ok(written)
}
