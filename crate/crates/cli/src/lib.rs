//! File-based pipeline behind the `glotto` binary.
//!
//! Each command reads the previous stage's exports, writes its own outputs
//! and a `manifest.json` into the output directory. The manifest holds every
//! resolved input, so `glotto replay` reproduces the outputs byte for byte.

pub mod args;
pub mod manifest;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use glotto_core::chronology::{
    calibrate_tau, random_ancestor, random_word_baseline, simulate_divergence, time_matrix,
    CalendarYear, ChronologyConfig, ChronologyModel, WordGenerator,
};
use glotto_core::distance::{external_reference_report, reference_report_csv, ReferenceRow};
use glotto_core::geometry::{
    angles_svg, embed, embedding_csv, radial_variance, radial_variance_by_dimension,
    residual_ratio, spectrum_csv, spherical,
};
use glotto_core::lexicon::{parse_corpus_with, NormalizationPolicy};
use glotto_core::phylogeny::{group_assignments, upgma, Phylogeny};
use glotto_core::plot::{PlotPoint, Scatter};
use glotto_core::{distance_matrix, Condensed, DistanceMatrix, DistanceOptions};
use thiserror::Error;

use args::{Cli, Command, ModelArgs};
use manifest::{Chronology, Resolved, RunManifest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: glotto_core::Error,
    },
    #[error("{0}")]
    Core(#[from] glotto_core::Error),
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

impl CliError {
    /// 1 for internal or numerical failures, 2 for bad input or usage.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { source, .. } | CliError::Core(source) => {
                if source.is_numerical() {
                    1
                } else {
                    2
                }
            }
            CliError::Write { .. } => 1,
            CliError::Read { .. } | CliError::Config(_) | CliError::Manifest { .. } => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn canonical(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn input_err(path: &Path) -> impl FnOnce(glotto_core::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_owned(),
        source,
    }
}

struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_owned(),
            source,
        })?;
        Ok(Outputs {
            dir: dir.to_owned(),
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
    }
}

/// Parses the command line and runs it.
pub fn run(cli: Cli) -> Result<()> {
    let quiet = cli.quiet;
    let manifest = match cli.command {
        Command::Replay(replay) => {
            let text = read(&replay.manifest)?;
            let mut m: RunManifest =
                serde_json::from_str(&text).map_err(|e| CliError::Manifest {
                    path: replay.manifest.clone(),
                    message: e.to_string(),
                })?;
            if m.tool != manifest::TOOL {
                return Err(CliError::Manifest {
                    path: replay.manifest,
                    message: format!("written by `{}`, not {}", m.tool, manifest::TOOL),
                });
            }
            if m.version != env!("CARGO_PKG_VERSION") && !quiet {
                eprintln!(
                    "warning: manifest from version {}, replaying with {}",
                    m.version,
                    env!("CARGO_PKG_VERSION")
                );
            }
            if let Some(dir) = cli.out_dir {
                m = RunManifest::new(absolute(&dir)?, m.run);
            }
            m
        }
        command => {
            let out_dir = absolute(&cli.out_dir.unwrap_or_else(|| PathBuf::from(".")))?;
            let config = match &cli.config {
                Some(path) => ChronologyConfig::parse(&read(path)?)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
                None => ChronologyConfig::default(),
            };
            RunManifest::new(out_dir, resolve(command, config)?)
        }
    };
    execute(&manifest, quiet)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn resolve_chronology(file: ChronologyConfig, flags: &ModelArgs) -> Result<Chronology> {
    let merged = file.overlay(ChronologyConfig {
        tau: flags.tau,
        d_max: flags.d_max,
        k_var: flags.k_var,
        reference_year: flags.reference_year,
    });
    let model = merged
        .resolve()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Chronology {
        tau: model.tau(),
        d_max: model.d_max(),
        k_var: merged.k_var,
        reference_year: model.reference_year(),
    })
}

fn model_of(c: &Chronology) -> Result<ChronologyModel> {
    ChronologyModel::new(c.tau, c.d_max, c.k_var.unwrap_or(1.0), c.reference_year)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn resolve(command: Command, config: ChronologyConfig) -> Result<Resolved> {
    Ok(match command {
        Command::Dist(a) => {
            NormalizationPolicy::by_name(&a.policy).map_err(|e| CliError::Config(e.to_string()))?;
            Resolved::Dist {
                corpus: canonical(&a.corpus)?,
                m_catalog: a.m_catalog,
                policy: a.policy,
                min_shared: a.min_shared,
                references: a.references,
            }
        }
        Command::Tree(a) => Resolved::Tree {
            matrix: canonical(&a.matrix)?,
            chronology: resolve_chronology(config, &a.model)?,
            anchor: a.anchor,
            annotate: a.annotate,
        },
        Command::Embed(a) => Resolved::Embed {
            matrix: canonical(&a.matrix)?,
            dim: a.dim,
            groups: a.groups.as_deref().map(canonical).transpose()?,
            group_column: a.group_column,
        },
        Command::Date(a) => Resolved::Date {
            matrix: canonical(&a.matrix)?,
            chronology: resolve_chronology(config, &a.model)?,
            dim: a.dim,
        },
        Command::Simulate(a) => Resolved::Simulate {
            tree: canonical(&a.tree)?,
            rate: a.rate,
            seed: a.seed,
            m_catalog: a.m_catalog,
            baseline_samples: a.baseline_samples,
        },
        Command::Replay(_) => unreachable!("replay is handled before resolution"),
    })
}

fn execute(manifest: &RunManifest, quiet: bool) -> Result<()> {
    let mut report = String::new();
    match &manifest.run {
        Resolved::Dist {
            corpus,
            m_catalog,
            policy,
            min_shared,
            references,
        } => {
            let policy =
                NormalizationPolicy::by_name(policy).map_err(|e| CliError::Config(e.to_string()))?;
            let parsed =
                parse_corpus_with(&read(corpus)?, *m_catalog, &policy).map_err(input_err(corpus))?;
            let opts = DistanceOptions {
                min_shared: *min_shared,
            };
            let dm = distance_matrix(&parsed, &opts).map_err(input_err(corpus))?;
            let rows = external_reference_report(&dm, references).map_err(input_err(corpus))?;
            let out = Outputs::create(&manifest.out_dir)?;
            out.write("matrix.csv", &dm.to_csv())?;
            out.write("matrix.phy", &dm.to_phylip())?;
            if let Some(cov) = dm.coverage_csv() {
                out.write("coverage.csv", &cov)?;
            }
            if !references.is_empty() {
                out.write("references.csv", &reference_report_csv(&rows))?;
                out.write("references.svg", &reference_plot(&rows, references))?;
            }
            report.push_str(&format!(
                "{} languages, {} pairs\n",
                dm.len(),
                dm.distances().values().len()
            ));
        }
        Resolved::Tree {
            matrix,
            chronology,
            anchor,
            annotate,
        } => {
            let dm = read_matrix(matrix)?;
            let mut model = model_of(chronology)?;
            if let Some(anchor) = anchor {
                model = calibrate_tau(&dm, *anchor, &model).map_err(input_err(matrix))?;
            }
            let times = time_matrix(&dm, &model).map_err(input_err(matrix))?;
            let tree = upgma(&times)?;
            let mut columns = Vec::new();
            for count in [2, 4] {
                if count <= tree.leaf_count() {
                    columns.push((count, group_assignments(&tree, count)?));
                }
            }
            let out = Outputs::create(&manifest.out_dir)?;
            out.write("tree.nwk", &format!("{}\n", tree.to_newick()))?;
            out.write("times.csv", &times.to_csv())?;
            out.write("groups.csv", &groups_csv(&tree, &columns))?;
            if let Some(k) = annotate {
                let groups = group_assignments(&tree, *k)?;
                out.write("tree_groups.nwk", &format!("{}\n", tree.to_newick_annotated(&groups)))?;
            }
            let root = tree.root_height();
            report.push_str(&format!("tau: {:.6}\n", model.tau()));
            report.push_str(&format!("root height: {root:.2} years\n"));
            report.push_str(&format!(
                "separation date: {}\n",
                CalendarYear::before(model.reference_year(), root)
            ));
        }
        Resolved::Embed {
            matrix,
            dim,
            groups,
            group_column,
        } => {
            let dm = read_matrix(matrix)?;
            let e = embed(&dm, *dim).map_err(input_err(matrix))?;
            let ratio = residual_ratio(&e).map_err(input_err(matrix))?;
            let out = Outputs::create(&manifest.out_dir)?;
            out.write("embedding.csv", &embedding_csv(&e))?;
            out.write("spectrum.csv", &spectrum_csv(&e))?;
            let mut radial = String::from("dimensions,radial_variance\n");
            for (k, v) in radial_variance_by_dimension(&e).iter().enumerate() {
                radial.push_str(&format!("{},{v:.6}\n", k + 1));
            }
            out.write("radial.csv", &radial)?;
            if *dim == 3 {
                let assignment = match groups {
                    Some(path) => Some(read_groups(path, group_column.as_deref())?),
                    None => None,
                };
                out.write("angles.svg", &angles_svg(&spherical(&e)?, assignment.as_ref()))?;
            }
            report.push_str(&format!("residual ratio: {ratio:.6e}\n"));
            report.push_str(&format!("radial variance: {:.6e}\n", radial_variance(&e)));
        }
        Resolved::Date {
            matrix,
            chronology,
            dim,
        } => {
            if chronology.k_var.is_none() {
                return Err(CliError::Config(
                    "k_var is not set; pass --k-var, GLOTTO_K_VAR or k_var= in the config file"
                        .into(),
                ));
            }
            let model = model_of(chronology)?;
            let dm = read_matrix(matrix)?;
            let n = dim.unwrap_or(dm.len().saturating_sub(1));
            let e = embed(&dm, n).map_err(input_err(matrix))?;
            let variance = radial_variance(&e);
            let lag = glotto_core::date_from_variance(variance, &model);
            report.push_str(&format!("dimensions: {n}\n"));
            report.push_str(&format!("radial variance: {variance:.6e}\n"));
            report.push_str(&format!("lag: {lag:.2} years\n"));
            report.push_str(&format!(
                "date: {}\n",
                CalendarYear::before(model.reference_year(), lag)
            ));
            Outputs::create(&manifest.out_dir)?.write("date.txt", &report)?;
        }
        Resolved::Simulate {
            tree,
            rate,
            seed,
            m_catalog,
            baseline_samples,
        } => {
            let phylogeny = Phylogeny::from_newick(&read(tree)?).map_err(input_err(tree))?;
            let generator = WordGenerator::default();
            let ancestor = random_ancestor(&generator, *m_catalog, *seed);
            let corpus =
                simulate_divergence(&ancestor, &phylogeny, *rate, *seed, &generator, *m_catalog)?;
            let (baseline, se) = random_word_baseline(&generator, (*baseline_samples).max(2), *seed);
            let truth = phylogeny.patristic(&corpus.labels())?;
            let out = Outputs::create(&manifest.out_dir)?;
            out.write("corpus.tsv", &corpus.to_word_list())?;
            out.write("truth.csv", &truth.to_csv())?;
            out.write(
                "model.conf",
                &format!(
                    "# separation time model matching the simulation\ntau={}\nd_max={}\n",
                    2.0 / rate,
                    baseline
                ),
            )?;
            report.push_str(&format!(
                "{} leaves, {} meanings\nrandom-word baseline: {baseline:.6} (se {se:.6})\n",
                corpus.len(),
                m_catalog
            ));
        }
    }
    let out = Outputs::create(&manifest.out_dir)?;
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    out.write(manifest::FILE_NAME, &format!("{json}\n"))?;
    if !quiet {
        print!("{report}");
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<DistanceMatrix> {
    let m = Condensed::from_csv(&read(path)?).map_err(input_err(path))?;
    DistanceMatrix::from_distances(m).map_err(input_err(path))
}

fn groups_csv(tree: &Phylogeny, columns: &[(usize, HashMap<String, usize>)]) -> String {
    let mut out = String::from("label");
    for (count, _) in columns {
        out.push_str(&format!(",group{count}"));
    }
    out.push('\n');
    for label in tree.leaf_labels() {
        out.push_str(&label);
        for (_, groups) in columns {
            out.push_str(&format!(",{}", groups[&label]));
        }
        out.push('\n');
    }
    out
}

fn read_groups(path: &Path, column: Option<&str>) -> Result<HashMap<String, usize>> {
    let text = read(path)?;
    let bad = |line: usize, message: String| CliError::Input {
        path: path.to_owned(),
        source: glotto_core::Error::Parse { line, message },
    };
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad(1, "empty groups file".into()))?
        .split(',')
        .collect();
    if header.len() < 2 || header[0] != "label" {
        return Err(bad(1, "expected header `label,<column>...`".into()));
    }
    let col = match column {
        Some(name) => header
            .iter()
            .position(|h| *h == name)
            .filter(|&i| i > 0)
            .ok_or_else(|| bad(1, format!("no column `{name}`")))?,
        None => header.len() - 1,
    };
    let mut groups = HashMap::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(bad(idx + 2, format!("expected {} fields", header.len())));
        }
        let g = fields[col]
            .parse()
            .map_err(|_| bad(idx + 2, format!("`{}` is not a group index", fields[col])))?;
        groups.insert(fields[0].to_owned(), g);
    }
    Ok(groups)
}

fn reference_plot(rows: &[ReferenceRow], references: &[String]) -> String {
    let mut dialects: Vec<&str> = rows.iter().map(|r| r.dialect.as_str()).collect();
    dialects.dedup();
    let lookup = |dialect: &str, reference: &str| {
        rows.iter()
            .find(|r| r.dialect == dialect && r.reference == reference)
            .map(|r| r.distance)
    };
    let mut refs: Vec<&String> = Vec::new();
    for r in references {
        if !refs.contains(&r) {
            refs.push(r);
        }
    }
    let mut plot = if refs.len() == 2 {
        Scatter {
            title: "Distance to reference languages".into(),
            x_label: format!("distance to {}", refs[0]),
            y_label: format!("distance to {}", refs[1]),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            points: dialects
                .iter()
                .filter_map(|d| {
                    Some(PlotPoint {
                        x: lookup(d, refs[0])?,
                        y: lookup(d, refs[1])?,
                        label: d.to_string(),
                        group: 0,
                    })
                })
                .collect(),
            legend: Vec::new(),
        }
    } else {
        Scatter {
            title: "Distance to reference languages".into(),
            x_label: "dialect index".into(),
            y_label: "distance".into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            points: dialects
                .iter()
                .enumerate()
                .flat_map(|(i, d)| {
                    refs.iter().enumerate().filter_map(move |(k, r)| {
                        Some(PlotPoint {
                            x: (i + 1) as f64,
                            y: lookup(d, r)?,
                            label: d.to_string(),
                            group: k + 1,
                        })
                    })
                })
                .collect(),
            legend: refs.iter().map(|r| r.to_string()).collect(),
        }
    };
    plot.fit_ranges();
    plot.to_svg()
}
