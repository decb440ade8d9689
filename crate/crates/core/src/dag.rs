//! The labelled uniform recursive DAG that couples to the urn process.
//!
//! Node `v >= 1` attaches `m` directed edges to parents drawn independently,
//! uniformly from `{0, ..., v-1}`. Its label `X(v)` is an ordered colour
//! tuple: component `s` is sampled from the initial distribution `pi` when
//! parent `s` is node 0, otherwise from the normalized replacement column
//! `R(., X(parent_s)) / sigma` of that parent's label.
//!
//! With node 0 carrying mass `sigma` (initial composition `sigma pi`), a
//! uniform pick among nodes `0..=n` is exactly a mass-proportional pick from
//! the urn at time `n`, so the label process reproduces the urn's draw
//! process and `sigma pi + sum_v R(., X(v))` has the law of the urn counts.
//!
//! The ancestry of a late node, cut at `n1 = floor(n / ln n)`, is typically a
//! complete m-ary tree near the node; `check_events` measures the two
//! geometry events behind that claim.

use crate::error::{Error, Result};
use crate::index::{pow, rank, unrank};
use crate::rng::{derive_seed, SplitMix64};
use crate::simplex::SimplexVector;
use crate::tensor::ReplacementTensor;
use crate::urn::{ExactDistribution, UrnState};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Unlabelled uniform recursive DAG: parent tuples only.
#[derive(Debug, Clone)]
pub struct DagStructure {
    m: usize,
    /// Flat parent array, stride `m`; node `v >= 1` occupies
    /// `[(v-1) m, v m)`. Node 0 has no parents.
    parents: Vec<u32>,
}

impl DagStructure {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of nodes including node 0.
    pub fn node_count(&self) -> u64 {
        (self.parents.len() / self.m) as u64 + 1
    }

    pub fn parents_of(&self, v: u64) -> &[u32] {
        debug_assert!(v >= 1);
        let i = (v as usize - 1) * self.m;
        &self.parents[i..i + self.m]
    }
}

/// Grow an unlabelled DAG with `n` attached nodes.
pub fn grow_structure(m: usize, n: u64, seed: u64) -> DagStructure {
    let mut rng = SplitMix64::new(seed);
    let mut parents = Vec::with_capacity(n as usize * m);
    for v in 1..=n {
        for _ in 0..m {
            parents.push(rng.below(v) as u32);
        }
    }
    DagStructure { m, parents }
}

/// Labelled DAG: structure plus per-node colour tuples and the initial
/// distribution used for node-0 edges.
#[derive(Debug, Clone)]
pub struct LabelledDag {
    structure: DagStructure,
    d: usize,
    /// Flat label array, stride `m`, colours `0..d`; node `v >= 1` at
    /// `[(v-1) m, v m)`.
    labels: Vec<u32>,
    pi: SimplexVector,
}

impl LabelledDag {
    pub fn structure(&self) -> &DagStructure {
        &self.structure
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.structure.m
    }

    pub fn node_count(&self) -> u64 {
        self.structure.node_count()
    }

    pub fn pi(&self) -> &SimplexVector {
        &self.pi
    }

    pub fn label_of(&self, v: u64) -> &[u32] {
        debug_assert!(v >= 1);
        let i = (v as usize - 1) * self.structure.m;
        &self.labels[i..i + self.structure.m]
    }

    fn label_rank(&self, v: u64) -> usize {
        self.label_of(v)
            .iter()
            .fold(0usize, |acc, &c| acc * self.d + c as usize)
    }

    /// JSON dump `{"m":..,"parents":[[..]..],"labels":[[..]..]}` with
    /// 1-based colour values.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump {
            m: usize,
            parents: Vec<Vec<u32>>,
            labels: Vec<Vec<u32>>,
        }
        let n = self.node_count() - 1;
        let dump = Dump {
            m: self.structure.m,
            parents: (1..=n)
                .map(|v| self.structure.parents_of(v).to_vec())
                .collect(),
            labels: (1..=n)
                .map(|v| self.label_of(v).iter().map(|c| c + 1).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("dag serializes")
    }
}

/// Normalized replacement columns `R(., tuple)/sigma`, indexed by tuple rank.
fn normalized_columns(tensor: &ReplacementTensor) -> Result<Vec<Vec<f64>>> {
    let sigma = tensor.sigma()?;
    Ok((0..tensor.tuple_count())
        .map(|r| {
            tensor
                .column_ranked(r)
                .into_iter()
                .map(|e| e / sigma)
                .collect()
        })
        .collect())
}

/// Grow a labelled DAG of size `n` for a tenable, balanced tensor.
///
/// Per node the generator is consumed in a fixed order: the `m` parents,
/// then the `m` label components.
pub fn grow(
    tensor: &ReplacementTensor,
    pi: &SimplexVector,
    n: u64,
    seed: u64,
) -> Result<LabelledDag> {
    if pi.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: pi.len(),
        });
    }
    let report = tensor.validate();
    if !report.tenable {
        return Err(Error::Structural("tensor has negative entries".into()));
    }
    let columns = normalized_columns(tensor)?;
    let m = tensor.m();
    let d = tensor.d();
    let mut rng = SplitMix64::new(seed);
    let mut parents = Vec::with_capacity(n as usize * m);
    let mut labels: Vec<u32> = Vec::with_capacity(n as usize * m);
    for v in 1..=n {
        let base = parents.len();
        for _ in 0..m {
            parents.push(rng.below(v) as u32);
        }
        for s in 0..m {
            let p = parents[base + s] as u64;
            let colour = if p == 0 {
                rng.categorical(pi.as_slice(), 1.0)
            } else {
                let pr = labels[(p as usize - 1) * m..p as usize * m]
                    .iter()
                    .fold(0usize, |acc, &c| acc * d + c as usize);
                rng.categorical(&columns[pr], 1.0)
            };
            labels.push(colour as u32);
        }
    }
    Ok(LabelledDag {
        structure: DagStructure { m, parents },
        d,
        labels,
        pi: pi.clone(),
    })
}

/// Reconstruct the urn trajectory implied by the labels:
/// `counts(k) = sigma pi + sum_{v <= k} R(., X(v))`.
///
/// Node 0 carries mass `sigma` so that the uniform parent choice is
/// mass-proportional; the returned sequence has the law of the urn started
/// from `U(0) = sigma pi`, with `||counts(k)||_1 = sigma (1 + k)`.
pub fn urn_from_labels(dag: &LabelledDag, tensor: &ReplacementTensor) -> Result<Vec<UrnState>> {
    if dag.d != tensor.d() || dag.m() != tensor.m() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: dag.d,
        });
    }
    let sigma = tensor.sigma()?;
    let n = dag.node_count() - 1;
    let mut counts: Vec<f64> = dag.pi.as_slice().iter().map(|p| sigma * p).collect();
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(UrnState {
        counts: counts.clone(),
        step: 0,
        sigma,
    });
    for v in 1..=n {
        let rank = dag.label_rank(v);
        for (i, c) in counts.iter_mut().enumerate() {
            *c += tensor.entry_ranked(i, rank);
        }
        states.push(UrnState {
            counts: counts.clone(),
            step: v,
            sigma,
        });
    }
    Ok(states)
}

/// Index cutoff `n1 = floor(n / ln n)`; zero for `n <= 2` where the ratio
/// degenerates.
pub fn cutoff(n: u64) -> u64 {
    if n <= 2 {
        0
    } else {
        (n as f64 / (n as f64).ln()).floor() as u64
    }
}

/// A member of the ancestry subgraph.
#[derive(Debug, Clone)]
pub struct Member {
    /// Minimal edge distance from the root node.
    pub depth: u32,
    /// Parent tuple with sub-cutoff parents masked out.
    pub parents: Vec<Option<u64>>,
}

/// Ancestors of a node restricted to indices `>= n1`, with the edges between
/// them, found by BFS over parent links (cut branches are dropped).
#[derive(Debug, Clone)]
pub struct AncestrySubgraph {
    pub root: u64,
    pub n1: u64,
    pub members: BTreeMap<u64, Member>,
}

pub fn ancestry(dag: &DagStructure, node: u64) -> Result<AncestrySubgraph> {
    if node >= dag.node_count() {
        return Err(Error::NodeOutOfRange {
            node,
            max: dag.node_count() - 1,
        });
    }
    let n1 = cutoff(node);
    let mut members: BTreeMap<u64, Member> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    members.insert(
        node,
        Member {
            depth: 0,
            parents: Vec::new(),
        },
    );
    queue.push_back(node);
    while let Some(v) = queue.pop_front() {
        let depth = members[&v].depth;
        let kept: Vec<Option<u64>> = if v == 0 {
            vec![None; dag.m]
        } else {
            dag.parents_of(v)
                .iter()
                .map(|&p| (p as u64 >= n1).then_some(p as u64))
                .collect()
        };
        for p in kept.iter().flatten() {
            if !members.contains_key(p) {
                members.insert(
                    *p,
                    Member {
                        depth: depth + 1,
                        parents: Vec::new(),
                    },
                );
                queue.push_back(*p);
            }
        }
        members.get_mut(&v).unwrap().parents = kept;
    }
    Ok(AncestrySubgraph {
        root: node,
        n1,
        members,
    })
}

/// Geometry events of the ancestry subgraph.
#[derive(Debug, Clone, Serialize)]
pub struct EventReport {
    /// The whole subgraph is an m-ary tree: every member reachable by
    /// exactly one edge path, no repeated parents.
    pub e_n_holds: bool,
    /// The depth-`<= ell` genealogy consists of `(m^(ell+1)-1)/(m-1)`
    /// pairwise-distinct nodes, all `>= n1`.
    pub f_n_holds: bool,
    pub ell: usize,
    pub n1: u64,
}

pub fn check_events(sub: &AncestrySubgraph, ell: usize) -> EventReport {
    let n1 = sub.n1;

    // a connected graph is a tree iff #edges = #members - 1
    let edges: usize = sub
        .members
        .values()
        .map(|m| m.parents.iter().flatten().count())
        .sum();
    let e_n_holds = edges + 1 == sub.members.len();

    // expand genealogy roles level by level up to depth ell
    let mut f_n_holds = true;
    let mut roles: Vec<u64> = vec![sub.root];
    let mut level = vec![sub.root];
    'expand: for _ in 0..ell {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &v in &level {
            for p in &sub.members[&v].parents {
                match p {
                    Some(p) => next.push(*p),
                    None => {
                        f_n_holds = false;
                        break 'expand;
                    }
                }
            }
        }
        roles.extend_from_slice(&next);
        level = next;
    }
    if f_n_holds {
        let m = sub.members[&sub.root].parents.len();
        let expected = if m <= 1 {
            ell + 1
        } else {
            (pow(m, ell + 1) - 1) / (m - 1)
        };
        let distinct: std::collections::HashSet<u64> = roles.iter().copied().collect();
        f_n_holds = roles.len() == expected && distinct.len() == expected;
    }
    EventReport {
        e_n_holds,
        f_n_holds,
        ell,
        n1,
    }
}

/// Monte Carlo estimate of `P(E_n and F_n)` over independently grown
/// unlabelled DAGs.
#[derive(Debug, Clone, Serialize)]
pub struct EventEstimate {
    pub n: u64,
    pub ell: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub replicates: usize,
}

pub fn event_probability(
    n: u64,
    m: usize,
    ell: usize,
    replicates: usize,
    seed: u64,
) -> Result<EventEstimate> {
    if replicates == 0 {
        return Err(Error::Structural("at least one replicate required".into()));
    }
    let hits: usize = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let dag = grow_structure(m, n, derive_seed(seed, r as u64));
            let sub = ancestry(&dag, n)?;
            let report = check_events(&sub, ell);
            Ok(usize::from(report.e_n_holds && report.f_n_holds))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let estimate = hits as f64 / replicates as f64;
    let stderr = (estimate * (1.0 - estimate) / replicates as f64).sqrt();
    Ok(EventEstimate {
        n,
        ell,
        estimate,
        stderr,
        replicates,
    })
}

/// Exact law of the label-reconstructed urn counts after `n` nodes, by
/// enumeration of every parent choice and label outcome. The enumeration has
/// `prod_{v<=n} (v^m d^m)` leaves and is guarded accordingly; it is the
/// coupling-correctness oracle against [`crate::urn::exact_distribution`]
/// started from `U(0) = sigma pi`.
pub fn coupled_exact_distribution(
    tensor: &ReplacementTensor,
    pi: &SimplexVector,
    n: u64,
) -> Result<ExactDistribution> {
    if pi.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: pi.len(),
        });
    }
    let sigma = tensor.sigma()?;
    let budget = 2e7;
    let mut size = 1f64;
    for v in 1..=n {
        size *= (v as f64).powi(tensor.m() as i32) * tensor.tuple_count() as f64;
    }
    if size > budget {
        return Err(Error::TooLarge { size, budget });
    }

    let columns = normalized_columns(tensor)?;
    let d = tensor.d();
    let m = tensor.m();
    let counts0: Vec<f64> = pi.as_slice().iter().map(|p| sigma * p).collect();

    struct Ctx<'a> {
        tensor: &'a ReplacementTensor,
        pi: &'a [f64],
        columns: &'a [Vec<f64>],
        d: usize,
        m: usize,
        n: u64,
        dist: ExactDistribution,
    }

    fn recurse(ctx: &mut Ctx, v: u64, labels: &mut Vec<usize>, counts: &[f64], prob: f64) {
        if v > ctx.n {
            ctx.dist.add(counts, prob);
            return;
        }
        let parent_choices = pow(v as usize, ctx.m);
        let p_parents = (1.0 / v as f64).powi(ctx.m as i32);
        let label_choices = pow(ctx.d, ctx.m);
        for pc in 0..parent_choices {
            let parent_tuple = unrank(pc, v as usize, ctx.m);
            for lc in 0..label_choices {
                let label_tuple = unrank(lc, ctx.d, ctx.m);
                let mut p_label = 1.0;
                for s in 0..ctx.m {
                    let p = parent_tuple[s];
                    p_label *= if p == 0 {
                        ctx.pi[label_tuple[s]]
                    } else {
                        ctx.columns[labels[p - 1]][label_tuple[s]]
                    };
                }
                let p = prob * p_parents * p_label;
                if p == 0.0 {
                    continue;
                }
                let label_rank = rank(&label_tuple, ctx.d);
                let mut new_counts = counts.to_vec();
                for (i, c) in new_counts.iter_mut().enumerate() {
                    *c += ctx.tensor.entry_ranked(i, label_rank);
                }
                labels.push(label_rank);
                recurse(ctx, v + 1, labels, &new_counts, p);
                labels.pop();
            }
        }
    }

    let mut ctx = Ctx {
        tensor,
        pi: pi.as_slice(),
        columns: &columns,
        d,
        m,
        n,
        dist: ExactDistribution::new_empty(),
    };
    let mut labels = Vec::with_capacity(n as usize);
    recurse(&mut ctx, 1, &mut labels, &counts0, 1.0);
    Ok(ctx.dist)
}
