use murn::catalog;
use murn::chain::{self, LeafProfile};
use murn::dag;
use murn::error::{Error, Result};
use murn::fixed_point::{self, FixedPointResult};
use murn::index::rank;
use murn::simplex::SimplexVector;
use murn::urn::{self, ExactDistribution, UrnState};
use murn::ReplacementTensor;
use serde::Serialize;
use std::path::Path;
use std::process::ExitCode;

/// Write CSV lines to `--out` or stdout.
fn emit_csv(out: Option<&Path>, header: &str, rows: &[String]) -> Result<()> {
    let body = std::iter::once(header.to_string())
        .chain(rows.iter().cloned())
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn parse_counts(text: &str, d: usize) -> Result<Vec<f64>> {
    let counts: Vec<f64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad count `{p}`: {e}")))
        })
        .collect::<Result<_>>()?;
    if counts.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: counts.len(),
        });
    }
    Ok(counts)
}

pub fn check(tensor: &ReplacementTensor) -> Result<ExitCode> {
    let report = tensor.validate();
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(if report.all_hold() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    result: &'a FixedPointResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_points: Option<Vec<Vec<f64>>>,
}

pub fn solve(
    tensor: &ReplacementTensor,
    tol: f64,
    max_iter: usize,
    all_2colour: bool,
) -> Result<ExitCode> {
    let fixed_points = if all_2colour {
        Some(
            fixed_point::all_fixed_points_2colour(tensor)?
                .into_iter()
                .map(SimplexVector::into_vec)
                .collect(),
        )
    } else {
        None
    };
    let (result, code) = match fixed_point::solve(tensor, tol, max_iter) {
        Ok(res) => (res, ExitCode::SUCCESS),
        Err(Error::MaxIterExceeded { result }) => (*result, ExitCode::from(3)),
        Err(e) => return Err(e),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&SolveOutput {
            result: &result,
            fixed_points,
        })
        .expect("result serializes")
    );
    Ok(code)
}

pub fn simulate(
    tensor: &ReplacementTensor,
    n: u64,
    replicates: usize,
    seed: u64,
    initial: Option<&str>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let sigma = tensor.sigma()?;
    let counts = match initial {
        Some(text) => parse_counts(text, tensor.d())?,
        None => vec![1.0; tensor.d()],
    };
    let initial = UrnState::new(counts, sigma)?;
    let stats = urn::monte_carlo(tensor, &initial, n, replicates, seed, None)?;
    let rows: Vec<String> = stats
        .n_values
        .iter()
        .zip(&stats.mean_l1_error)
        .zip(&stats.stderr)
        .map(|((n, e), s)| format!("{n},{e},{s},{}", stats.replicates))
        .collect();
    emit_csv(out, "n,mean_l1_error,stderr,replicates", &rows)?;
    Ok(ExitCode::SUCCESS)
}

pub fn dag_events(
    ns: &[u64],
    m: usize,
    ell: usize,
    replicates: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let rows: Vec<String> = ns
        .iter()
        .map(|&n| {
            let est = dag::event_probability(n, m, ell, replicates, seed)?;
            Ok(format!(
                "{},{},{},{},{}",
                est.n, est.ell, est.estimate, est.stderr, est.replicates
            ))
        })
        .collect::<Result<_>>()?;
    emit_csv(out, "n,ell,estimate,stderr,replicates", &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_pi(pi: Option<&str>, d: usize) -> Result<SimplexVector> {
    match pi {
        None => Ok(SimplexVector::barycenter(d)),
        Some(text) => SimplexVector::new(parse_counts(text, d)?),
    }
}

#[derive(Serialize)]
struct SupportPoint {
    counts: Vec<f64>,
    probability: f64,
}

#[derive(Serialize)]
struct CouplingOutput {
    n: u64,
    pi: Vec<f64>,
    tv_distance: f64,
    urn_support: Vec<SupportPoint>,
    coupled_support: Vec<SupportPoint>,
}

fn support_points(dist: &ExactDistribution) -> Vec<SupportPoint> {
    dist.support()
        .map(|(counts, probability)| SupportPoint {
            counts: counts.to_vec(),
            probability,
        })
        .collect()
}

/// Exact coupling check: the law of the label-reconstructed counts must
/// agree with the urn law started from `sigma pi`.
pub fn dag_couple(tensor: &ReplacementTensor, n: u64, pi: Option<&str>) -> Result<ExitCode> {
    let pi = parse_pi(pi, tensor.d())?;
    let sigma = tensor.sigma()?;
    let coupled = dag::coupled_exact_distribution(tensor, &pi, n)?;
    let u0: Vec<f64> = pi.as_slice().iter().map(|p| sigma * p).collect();
    let direct = urn::exact_distribution(tensor, &UrnState::new(u0, sigma)?, n)?;
    let output = CouplingOutput {
        n,
        pi: pi.as_slice().to_vec(),
        tv_distance: coupled.tv_distance(&direct),
        urn_support: support_points(&direct),
        coupled_support: support_points(&coupled),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("coupling output serializes")
    );
    Ok(ExitCode::SUCCESS)
}

pub fn dag_dump(
    tensor: &ReplacementTensor,
    n: u64,
    seed: u64,
    pi: Option<&str>,
) -> Result<ExitCode> {
    let pi = parse_pi(pi, tensor.d())?;
    let grown = dag::grow(tensor, &pi, n, seed)?;
    println!("{}", grown.to_json());
    Ok(ExitCode::SUCCESS)
}

pub fn chain(
    tensor: &ReplacementTensor,
    depth: usize,
    leaves: &str,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let induced = tensor.induced_chain_tensor()?;
    let state_size = induced.state_size();
    let m = induced.arity();
    let leaf_count = (m as f64).powi(depth as i32);
    if leaf_count > 2e6 {
        return Err(Error::TooLarge {
            size: leaf_count,
            budget: 2e6,
        });
    }
    let profile = if leaves == "uniform" {
        LeafProfile::uniform(state_size, m, depth)
    } else if let Some(tuple) = leaves.strip_prefix("point:") {
        let colours: Vec<usize> = tuple
            .split(',')
            .map(|p| {
                let c: usize = p
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad colour `{p}`: {e}")))?;
                if c < 1 || c > tensor.d() {
                    return Err(Error::Parse(format!(
                        "colour {c} outside 1..={}",
                        tensor.d()
                    )));
                }
                Ok(c - 1)
            })
            .collect::<Result<_>>()?;
        if colours.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: colours.len(),
            });
        }
        LeafProfile::point_mass(rank(&colours, tensor.d()), state_size, m, depth)
    } else {
        return Err(Error::Parse(format!(
            "leaves must be `uniform` or `point:<tuple>`, got `{leaves}`"
        )));
    };

    let result = chain::evolve(&induced, &profile)?;
    let rows: Vec<String> = if result.q < 1.0 {
        chain::geometric_certificate(&induced, &profile)?
            .iter()
            .map(|row| format!("{},{},{}", row.level, row.max_error, row.bound))
            .collect()
    } else {
        eprintln!(
            "note: tau sum q = {} >= 1, no geometric bound available",
            result.q
        );
        result
            .per_level_max_error
            .iter()
            .enumerate()
            .map(|(level, err)| format!("{level},{err},"))
            .collect()
    };
    emit_csv(out, "level,max_error,bound", &rows)?;
    Ok(ExitCode::SUCCESS)
}

pub fn catalog(list: bool, emit: Option<&str>) -> Result<ExitCode> {
    match emit {
        Some(name) => {
            let entry = catalog::find(name)?;
            println!("{}", entry.tensor.to_json());
        }
        None => {
            // default to listing
            let _ = list;
            for entry in catalog::entries() {
                let report = entry.tensor.validate();
                println!(
                    "{:<16} d={} m={} sigma={} ergodicity_bound={}",
                    entry.name,
                    entry.tensor.d(),
                    entry.tensor.m(),
                    entry.expected_sigma,
                    if report.ergodicity_holds {
                        "holds"
                    } else {
                        "fails"
                    },
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
