//! The `pivotal` command: validate, score, recommend, optimize and report
//! on problem documents, print the taxonomy, or start the HTTP service.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pivotal_core::moo::{solve, tradeoff_summary};
use pivotal_core::report::{
    build_report, complexity_section, front_section, gaps_section, recommendations_section, render_report, RenderTarget,
};
use pivotal_core::{catalog, complexity, gap_report, read_document, recommend, DecisionProblem, Error};
use pivotal_core::{ResolutionConfig, SearchConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "pivotal", version, about = "Decision analysis with pivotal properties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a problem document and list any diagnostics.
    Validate { input: PathBuf },
    /// Print the analytical complexity H and its factors.
    Score {
        input: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
    },
    /// Rank the strategies enabled by the problem's properties.
    Recommend {
        input: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Keep only the first N strategies.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Compute the Pareto front and its trade-offs.
    Optimize {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the property and strategy catalog.
    Taxonomy {
        #[arg(long, value_enum, default_value_t = TaxonomyFormat::Table)]
        format: TaxonomyFormat,
    },
    /// Score, recommend and optimize, rendered as one report.
    Report {
        input: PathBuf,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to json for a `.json` output path, markdown otherwise.
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        top: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Serve the HTTP API on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// Resolution of a present binary property.
    #[arg(long)]
    pub c: Option<f64>,
    /// Scale n0 in R = 1 - tanh(n / n0) for count assessments.
    #[arg(long)]
    pub count_scale: Option<f64>,
}

impl ScoringArgs {
    pub fn config(&self) -> ResolutionConfig {
        let mut cfg = ResolutionConfig::default();
        if let Some(c) = self.c {
            cfg.default_c = c;
        }
        if let Some(n) = self.count_scale {
            cfg.count_scale = n;
        }
        cfg
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long, env = "PIVOTAL_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    /// Mutation step as a fraction of each variable's range.
    #[arg(long)]
    pub mutation_sigma: Option<f64>,
    #[arg(long)]
    pub crossover_rate: Option<f64>,
}

impl SearchArgs {
    pub fn config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            population: self.population.unwrap_or(d.population),
            generations: self.generations.unwrap_or(d.generations),
            seed: self.seed.unwrap_or(d.seed),
            mutation_rate: self.mutation_rate.unwrap_or(d.mutation_rate),
            mutation_sigma_fraction: self.mutation_sigma.unwrap_or(d.mutation_sigma_fraction),
            crossover_rate: self.crossover_rate.unwrap_or(d.crossover_rate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaxonomyFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Md,
    Json,
}

/// A failed command: its exit code and the text for standard error.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Invalid(_) => EXIT_INVALID,
            e if e.is_document_error() => EXIT_INPUT,
            Error::InvalidConfig(_) => EXIT_INPUT,
            // Evaluation failures point at a defect in the problem itself.
            _ => EXIT_INVALID,
        };
        let mut message = format!("error[{}]: {err}", err.code());
        for d in err.diagnostics() {
            message.push_str(&format!("\n  {d}"));
        }
        Failure { code, message }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<DecisionProblem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("error[IO_ERROR]: cannot read {}: {e}", path.display()),
    })?;
    read_document(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load_valid(path: &Path) -> Result<DecisionProblem, Failure> {
    let problem = load(path)?;
    problem.ensure_valid()?;
    Ok(problem)
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout.write_all(text.as_bytes()).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("error[IO_ERROR]: cannot write output: {e}"),
    })
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate { input } => {
            let problem = load(&input)?;
            problem.ensure_valid()?;
            emit(stdout, &format!("{}: valid\n", input.display()))
        }
        Command::Score { input, scoring } => {
            let problem = load_valid(&input)?;
            let score = complexity(&problem, &scoring.config())?;
            emit(stdout, &complexity_section(&score))
        }
        Command::Recommend { input, scoring, top } => {
            let problem = load_valid(&input)?;
            let cfg = scoring.config();
            let recs = recommend(&problem, &cfg, top)?;
            let gaps = gap_report(&problem, &cfg)?;
            emit(stdout, &(recommendations_section(&recs) + &gaps_section(&gaps)))
        }
        Command::Optimize { input, search } => {
            let problem = load_valid(&input)?;
            let front = solve(&problem, &search.config())?;
            let tradeoff = if front.is_empty() {
                None
            } else {
                Some(tradeoff_summary(&front)?)
            };
            let names: Vec<String> = problem.metrics().map(|m| m.id.clone()).collect();
            emit(stdout, &front_section(&front, tradeoff.as_ref(), &names))
        }
        Command::Taxonomy { format } => emit(
            stdout,
            &match format {
                TaxonomyFormat::Json => catalog().to_json(),
                TaxonomyFormat::Table => taxonomy_table(),
            },
        ),
        Command::Report {
            input,
            out,
            format,
            scoring,
            top,
            search,
        } => {
            let problem = load_valid(&input)?;
            let report = build_report(&problem, &scoring.config(), top, Some(&search.config()))?;
            let is_json = out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
            let target = match format {
                Some(ReportFormat::Json) => RenderTarget::Json,
                Some(ReportFormat::Md) => RenderTarget::Markdown,
                None if is_json => RenderTarget::Json,
                None => RenderTarget::Markdown,
            };
            let text = render_report(&report, target);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| Failure {
                    code: EXIT_INPUT,
                    message: format!("error[IO_ERROR]: cannot write {}: {e}", path.display()),
                }),
                None => emit(stdout, &text),
            }
        }
        Command::Serve { port } => pivotal_service::serve(port).map_err(|e| Failure {
            code: match e {
                pivotal_service::ServeError::Bind { .. } => EXIT_INPUT,
                _ => EXIT_INTERNAL,
            },
            message: format!("error[SERVE_FAILED]: {e}"),
        }),
    }
}

fn taxonomy_table() -> String {
    let cat = catalog();
    let mut out = String::from("#\tProperty\tCluster\tStrategies\n");
    for p in &cat.properties {
        let strategies: Vec<&str> = cat.strategies_for(p.id).map(|s| s.name.as_str()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            p.id,
            p.name,
            p.cluster,
            strategies.join("; ")
        ));
    }
    out
}
