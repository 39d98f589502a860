use clap::{Parser, Subcommand};
use lexcite::graphstore::{
    build_bipartite, export_projection_tsv, project_cocitation, save_bipartite, save_projection,
    BipartiteGraph,
};
use lexcite::pipeline::{
    corpus_files, ingest, read_edges_tsv, read_meta_tsv, run_experiment, synth_corpus, Config,
    SynthSpec, EXPERIMENT_NAMES,
};
use lexcite::Result;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "lexcite", version, about = "Legislation-citation extraction and \
citation-graph analytics for Ukrainian court decisions")]
struct Cli {
    /// Config file; defaults to lexcite.toml or $LEXCITE_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus directory with .jsonl partition files.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Minimum co-citation weight kept in the projection.
    #[arg(long, global = true)]
    min_weight: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Years per period in stability analysis.
    #[arg(long, global = true)]
    period_years: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract citation edges from the corpus into edges.tsv/meta.tsv.
    Extract,
    /// Generate a synthetic corpus with known ground truth into the
    /// corpus directory.
    Synth {
        #[arg(long, default_value_t = 1000)]
        decisions: usize,
        #[arg(long, default_value_t = 400)]
        articles: usize,
        #[arg(long, default_value_t = 4)]
        communities: usize,
        /// Probability that a citation leaves its home community.
        #[arg(long, default_value_t = 0.05)]
        mixing: f64,
        /// Power-law exponent of article popularity.
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        x_min: u64,
        #[arg(long, default_value_t = 2010)]
        year_start: i32,
        #[arg(long, default_value_t = 2015)]
        year_end: i32,
        /// Year whose decision volume is multiplied by surge-factor.
        #[arg(long)]
        surge_year: Option<i32>,
        #[arg(long, default_value_t = 3.0)]
        surge_factor: f64,
    },
    /// Build the decision-legislation graph and save it as graph.bin.
    BuildGraph,
    /// Project the article co-citation graph and export it.
    Project,
    /// Run one analysis experiment, or "all".
    Experiment {
        #[arg(value_name = "NAME")]
        name: String,
    },
    /// Precision and recall checks on a decision sample.
    Validate,
    /// Collect experiment summaries into a single report.
    Report,
}

fn effective_config(cli: &Cli) -> Result<Config> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(v) = &cli.corpus {
        cfg.corpus_dir = v.clone();
    }
    if let Some(v) = &cli.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = cli.workers {
        cfg.workers = v;
    }
    if let Some(v) = cli.min_weight {
        cfg.min_weight = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.period_years {
        cfg.period_years = v;
    }
    // A synthetic corpus ships its own truth; pick it up for recall
    // measurement unless the config points elsewhere.
    if cfg.truth_edges.is_none() {
        let candidate = cfg.corpus_dir.join("truth-edges.tsv");
        if candidate.exists() {
            cfg.truth_edges = Some(candidate);
        }
    }
    Ok(cfg)
}

fn load_graph(cfg: &Config) -> Result<BipartiteGraph> {
    let edges = read_edges_tsv(&cfg.out_dir.join("edges.tsv"))?;
    let meta = read_meta_tsv(&cfg.out_dir.join("meta.tsv"))?;
    Ok(build_bipartite(edges, &meta))
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let cfg = effective_config(&cli)?;
    match cli.command {
        Command::Extract => {
            let files = corpus_files(&cfg.corpus_dir)?;
            let out = ingest(&files, cfg.workers)?;
            std::fs::create_dir_all(&cfg.out_dir)?;
            lexcite::pipeline::write_edges_tsv(&cfg.out_dir.join("edges.tsv"), &out.edges)?;
            lexcite::pipeline::write_meta_tsv(&cfg.out_dir.join("meta.tsv"), &out.meta)?;
            std::fs::write(
                cfg.out_dir.join("extract-report.txt"),
                out.report.render_stable(),
            )?;
            print!("{}", out.report.render());
            println!("wrote {}", cfg.out_dir.join("edges.tsv").display());
        }
        Command::Synth {
            decisions,
            articles,
            communities,
            mixing,
            alpha,
            x_min,
            year_start,
            year_end,
            surge_year,
            surge_factor,
        } => {
            let spec = SynthSpec {
                n_decisions: decisions,
                alpha,
                x_min,
                n_articles: articles,
                communities,
                mixing,
                year_start,
                year_end,
                surge_year,
                surge_factor,
                seed: cfg.seed,
                ..SynthSpec::default()
            };
            let out = synth_corpus(&spec, &cfg.corpus_dir)?;
            println!(
                "{} decisions, {} citation instances, {} partition files",
                out.decisions,
                out.citation_instances,
                out.corpus_files.len()
            );
            println!("truth edges: {}", out.truth_edges.display());
            println!("truth communities: {}", out.truth_communities.display());
        }
        Command::BuildGraph => {
            let g = load_graph(&cfg)?;
            let path = cfg.out_dir.join("graph.bin");
            save_bipartite(&g, &path)?;
            println!(
                "{} decisions, {} legislation nodes, {} edges",
                g.n_decisions(),
                g.n_legislation(),
                g.n_pairs()
            );
            println!("wrote {}", path.display());
        }
        Command::Project => {
            let g = load_graph(&cfg)?;
            let proj = project_cocitation(&g, cfg.min_weight);
            let bin = cfg.out_dir.join("projection.bin");
            let tsv = cfg.out_dir.join("projection.tsv");
            save_projection(&proj, &bin)?;
            export_projection_tsv(&proj, &tsv)?;
            println!(
                "{} nodes, {} edges, total weight {} (min weight {})",
                proj.n_nodes(),
                proj.edges().len(),
                proj.total_weight(),
                cfg.min_weight
            );
            println!("wrote {} and {}", bin.display(), tsv.display());
        }
        Command::Experiment { name } => {
            if name == "all" {
                // One failing analysis must not block the rest of the
                // batch; report failures together at the end.
                let mut failed = Vec::new();
                for name in EXPERIMENT_NAMES {
                    println!("== {name} ==");
                    match run_experiment(name, &cfg) {
                        Ok(out) => print!("{}", out.summary),
                        Err(e) => {
                            println!("failed: {e}");
                            failed.push(name);
                        }
                    }
                }
                if !failed.is_empty() {
                    return Err(lexcite::Error::InvalidInput(format!(
                        "experiments failed: {}",
                        failed.join(", ")
                    )));
                }
            } else {
                let out = run_experiment(&name, &cfg)?;
                print!("{}", out.summary);
            }
        }
        Command::Validate => {
            let out = run_experiment("validate", &cfg)?;
            print!("{}", out.summary);
        }
        Command::Report => {
            let mut report = String::new();
            let extract = cfg.out_dir.join("extract-report.txt");
            if let Ok(text) = std::fs::read_to_string(&extract) {
                report.push_str("== extract ==\n");
                report.push_str(&text);
            }
            for name in EXPERIMENT_NAMES {
                let path = cfg.out_dir.join(name).join("summary.txt");
                if let Ok(text) = std::fs::read_to_string(&path) {
                    report.push_str(&format!("== {name} ==\n"));
                    report.push_str(&text);
                }
            }
            if report.is_empty() {
                report.push_str("nothing to report; run extract and experiments first\n");
            }
            std::fs::create_dir_all(&cfg.out_dir)?;
            std::fs::write(cfg.out_dir.join("report.txt"), &report)?;
            print!("{report}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
