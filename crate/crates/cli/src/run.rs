use std::path::Path;
use std::time::Instant;

use rademacher_clt::bounds::{fit_rate, BoundReport};
use rademacher_clt::cubical::{CubicalModel, PlaquetteSign};
use rademacher_clt::experiments::{calculus_suite, cubical_setup, degree_setup, subgraph_setup, ModelSetup};
use rademacher_clt::graphs::GraphSpec;
use rademacher_clt::{Error, Functional, Result};

use crate::config::Settings;
use crate::output::{paths, read_rows, ResultRow};

/// Rows plus whether every checked property held.
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub passed: bool,
}

const IDENTITY_TOL: f64 = 1e-10;

pub fn verify(s: &Settings) -> Result<Outcome> {
    let n = s.n.last().copied().unwrap_or(10);
    let start = Instant::now();
    let summary = calculus_suite(n, s.instances, s.seed)?;
    let wall_ms = start.elapsed().as_millis() as u64;
    let row = |term: &str, value: f64| ResultRow {
        experiment: "verify-calculus".into(),
        n: Some(n),
        i: None,
        j: None,
        term: term.into(),
        value,
        std_error: 0.0,
        samples: s.instances as u64,
        seed: s.seed,
        wall_ms,
    };
    let mut rows: Vec<ResultRow> = summary.residuals().iter().map(|(t, v)| row(t, *v)).collect();
    rows.push(row("poincare_slack", summary.min_poincare_slack));
    Ok(Outcome {
        rows,
        passed: summary.passed(IDENTITY_TOL) && summary.min_poincare_slack >= 0.0,
    })
}

enum Model {
    Subgraph(Vec<GraphSpec>),
    Degree(Vec<usize>),
    Cubical(CubicalModel),
}

fn model(s: &Settings) -> Result<Model> {
    match s.model.as_deref() {
        Some("subgraph") => {
            if s.patterns.is_empty() {
                return Err(Error::Validation("--patterns is required for the subgraph model".into()));
            }
            Ok(Model::Subgraph(s.patterns.iter().map(|p| load_pattern(p)).collect::<Result<_>>()?))
        }
        Some("degree") => {
            if s.degrees.is_empty() {
                return Err(Error::Validation("--degrees is required for the degree model".into()));
            }
            Ok(Model::Degree(s.degrees.clone()))
        }
        Some(m @ ("voxel" | "plaquette")) => Ok(Model::Cubical(m.parse()?)),
        Some(other) => Err(Error::Validation(format!(
            "unknown model {other:?}; use subgraph, degree, voxel or plaquette"
        ))),
        None => Err(Error::Validation("--model is required".into())),
    }
}

/// A named pattern, or an edge-list file if the name is an existing path.
fn load_pattern(name: &str) -> Result<GraphSpec> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("{name}: {e}")))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        GraphSpec::parse_edge_list(stem, &text)
    } else {
        GraphSpec::named(name)
    }
}

fn experiment_name(m: &Model) -> &'static str {
    match m {
        Model::Subgraph(_) => "bound-subgraph",
        Model::Degree(_) => "bound-degree",
        Model::Cubical(_) => "bound-cubical",
    }
}

/// Calls `f` with the model setup at size `n`.
fn with_setup<T>(
    m: &Model,
    s: &Settings,
    n: usize,
    f: &mut dyn FnMut(&dyn Runner) -> Result<T>,
) -> Result<T> {
    match m {
        Model::Subgraph(patterns) => f(&subgraph_setup(patterns, n, s.require_p()?)?),
        Model::Degree(degrees) => {
            let theta = s.theta.ok_or_else(|| Error::Validation("--theta is required".into()))?;
            f(&degree_setup(degrees, n, theta)?)
        }
        Model::Cubical(cm) => {
            let sign = if s.sign == "signed" { PlaquetteSign::Signed } else { PlaquetteSign::Stated };
            f(&cubical_setup(s.dim.unwrap_or(2), n, *cm, s.require_p()?, sign)?)
        }
    }
}

/// Object-safe view of a [`ModelSetup`].
trait Runner {
    fn bound(&self, s: &Settings) -> Result<BoundReport>;
    fn surrogate(&self, s: &Settings) -> Result<rademacher_clt::bounds::SurrogateResult>;
}

impl<F: Functional> Runner for ModelSetup<F> {
    fn bound(&self, s: &Settings) -> Result<BoundReport> {
        ModelSetup::bound(self, s.moment_backend())
    }
    fn surrogate(&self, s: &Settings) -> Result<rademacher_clt::bounds::SurrogateResult> {
        ModelSetup::surrogate(self, s.samples, s.seed)
    }
}

fn bound_rows(exp: &str, n: usize, r: &BoundReport, s: &Settings, wall_ms: u64) -> Vec<ResultRow> {
    let samples = s.moment_backend().resolve(r.info.coordinates).samples();
    let mut rows = Vec::new();
    for (term, m) in r.pair_terms() {
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                rows.push(ResultRow {
                    experiment: exp.into(),
                    n: Some(n),
                    i: Some(i),
                    j: Some(j),
                    term: term.into(),
                    value: m.get(i, j),
                    std_error: m.std_error(i, j),
                    samples,
                    seed: s.seed,
                    wall_ms,
                });
            }
        }
    }
    rows.push(ResultRow {
        experiment: exp.into(),
        n: Some(n),
        i: None,
        j: None,
        term: "total".into(),
        value: r.total,
        std_error: r.total_std_error,
        samples,
        seed: s.seed,
        wall_ms,
    });
    rows
}

pub fn bound(s: &Settings) -> Result<Outcome> {
    let m = model(s)?;
    let exp = experiment_name(&m);
    let mut rows = Vec::new();
    for &n in s.require_n()? {
        let start = Instant::now();
        let report = with_setup(&m, s, n, &mut |r| r.bound(s))?;
        rows.extend(bound_rows(exp, n, &report, s, start.elapsed().as_millis() as u64));
    }
    Ok(Outcome { rows, passed: true })
}

pub fn surrogate(s: &Settings) -> Result<Outcome> {
    let m = model(s)?;
    let mut rows = Vec::new();
    let mut passed = true;
    for &n in s.require_n()? {
        let start = Instant::now();
        let (sur, total) = with_setup(&m, s, n, &mut |r| Ok((r.surrogate(s)?, r.bound(s)?)))?;
        let wall_ms = start.elapsed().as_millis() as u64;
        passed &= sur.lower_bound() <= total.total;
        let row = |term: &str, value: f64, se: f64| ResultRow {
            experiment: "surrogate".into(),
            n: Some(n),
            i: None,
            j: None,
            term: term.into(),
            value,
            std_error: se,
            samples: s.samples,
            seed: s.seed,
            wall_ms,
        };
        rows.push(row("surrogate", sur.max_discrepancy, sur.std_error));
        rows.push(row("surrogate_lower", sur.lower_bound(), 0.0));
        rows.push(row("bound_total", total.total, total.total_std_error));
    }
    Ok(Outcome { rows, passed })
}

/// Appends `slope` and `r_squared` rows for every bound experiment in the
/// existing CSV, replacing earlier ones.
pub fn rates(s: &Settings) -> Result<Outcome> {
    let (csv_path, _) = paths(&s.out);
    let mut rows: Vec<ResultRow> = read_rows(&csv_path)?
        .into_iter()
        .filter(|r| r.term != "slope" && r.term != "r_squared")
        .collect();
    let mut experiments: Vec<String> = rows
        .iter()
        .filter(|r| r.term == "total")
        .map(|r| r.experiment.clone())
        .collect();
    experiments.dedup();
    if experiments.is_empty() {
        return Err(Error::Validation(format!("{} has no total rows to fit", csv_path.display())));
    }
    let mut extra = Vec::new();
    for exp in experiments {
        let totals: Vec<&ResultRow> = rows.iter().filter(|r| r.experiment == exp && r.term == "total").collect();
        let points: Vec<(f64, f64)> = totals.iter().filter_map(|r| r.n.map(|n| (n as f64, r.value))).collect();
        let fit = fit_rate(&points)?;
        let base = totals[0];
        for (term, value) in [("slope", fit.slope), ("r_squared", fit.r_squared)] {
            extra.push(ResultRow {
                experiment: exp.clone(),
                n: None,
                i: None,
                j: None,
                term: term.into(),
                value,
                std_error: 0.0,
                samples: base.samples,
                seed: base.seed,
                wall_ms: 0,
            });
        }
    }
    rows.extend(extra);
    Ok(Outcome { rows, passed: true })
}
