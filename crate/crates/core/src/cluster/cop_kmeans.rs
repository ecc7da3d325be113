use alloc::vec::Vec;

use super::{objective, reseed_empty, update_centroids, ClusteringResult};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairConstraints {
    pub must_link: Vec<(usize, usize)>,
    pub cannot_link: Vec<(usize, usize)>,
}

impl PairConstraints {
    pub fn is_empty(&self) -> bool {
        self.must_link.is_empty() && self.cannot_link.is_empty()
    }

    /// True when `a` respects every constraint.
    pub fn satisfied_by(&self, a: &[usize]) -> bool {
        self.must_link.iter().all(|&(i, j)| a[i] == a[j])
            && self.cannot_link.iter().all(|&(i, j)| a[i] != a[j])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopKmeansConfig {
    pub k: usize,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl CopKmeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iter: 300,
            restarts: 10,
            seed: 0,
        }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Must-link components (members in index order, components ordered by
/// their first member) and, per component, the components it cannot share
/// a cluster with.
struct Components {
    members: Vec<Vec<usize>>,
    conflicts: Vec<Vec<usize>>,
}

fn components(n: usize, cons: &PairConstraints) -> Result<Components> {
    for &(i, j) in cons.must_link.iter().chain(&cons.cannot_link) {
        if i >= n || j >= n {
            return Err(Error::InvalidData(alloc::format!(
                "constraint ({i}, {j}) refers to a row outside 0..{n}"
            )));
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for &(i, j) in &cons.must_link {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comp_of = alloc::vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_comp = alloc::vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_comp[r] == usize::MAX {
            root_comp[r] = members.len();
            members.push(Vec::new());
        }
        comp_of[i] = root_comp[r];
        members[root_comp[r]].push(i);
    }
    let mut conflicts = alloc::vec![Vec::new(); members.len()];
    for &(i, j) in &cons.cannot_link {
        let (a, b) = (comp_of[i], comp_of[j]);
        if a == b {
            return Err(Error::Infeasible(alloc::format!(
                "cannot-link ({i}, {j}) joins two rows that must-link constraints put together"
            )));
        }
        conflicts[a].push(b);
        conflicts[b].push(a);
    }
    Ok(Components { members, conflicts })
}

/// One constrained assignment pass. `None` when some component has no
/// cluster free of conflicts.
fn assign(x: &Matrix, c: &Matrix, comps: &Components) -> Option<Vec<usize>> {
    let k = c.rows();
    let mut comp_cluster = alloc::vec![usize::MAX; comps.members.len()];
    let mut a = alloc::vec![0; x.rows()];
    for (ci, members) in comps.members.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..k {
            if comps.conflicts[ci].iter().any(|&o| comp_cluster[o] == j) {
                continue;
            }
            let cost: f64 = members
                .iter()
                .map(|&i| math::squared_distance(x.row(i), c.row(j)))
                .sum();
            if best.map_or(true, |(_, b)| cost < b) {
                best = Some((j, cost));
            }
        }
        let (j, _) = best?;
        comp_cluster[ci] = j;
        for &i in members {
            a[i] = j;
        }
    }
    Some(a)
}

fn run(x: &Matrix, comps: &Components, cfg: &CopKmeansConfig, rng: &mut Rng) -> Option<ClusteringResult> {
    let init = rng.sample_without_replacement(x.rows(), cfg.k);
    let mut c = x.select_rows(&init);
    let mut a = assign(x, &c, comps)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let empty = update_centroids(x, &a, &mut c);
        reseed_empty(x, &a, &mut c, &empty, |_| true);
        iterations += 1;
        trace.push(objective(x, &a, &c));
        if iterations >= cfg.max_iter {
            break;
        }
        let Some(next) = assign(x, &c, comps) else {
            break;
        };
        if next == a {
            converged = true;
            break;
        }
        // The sequential constrained pass is greedy; keep the current
        // assignment when the new one costs more under the same centroids.
        if objective(x, &next, &c) > objective(x, &a, &c) {
            converged = true;
            break;
        }
        a = next;
    }
    Some(ClusteringResult {
        objective: *trace.last().expect("at least one update"),
        assignments: a,
        centroids: c,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// COP k-means with seeded restarts; returns the feasible run with the
/// lowest objective (earliest restart on ties).
pub fn constrained_kmeans_fit(x: &Matrix, cons: &PairConstraints, cfg: CopKmeansConfig) -> Result<ClusteringResult> {
    let n = x.rows();
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::invalid("k", alloc::format!("need 1 <= k <= {n}, got {}", cfg.k)));
    }
    if cfg.restarts == 0 || cfg.max_iter == 0 {
        return Err(Error::invalid("restarts", "restarts and max_iter must be >= 1"));
    }
    let comps = components(n, cons)?;
    let mut master = Rng::new(cfg.seed);
    let mut best: Option<ClusteringResult> = None;
    for _ in 0..cfg.restarts {
        let mut rng = master.fork();
        if let Some(r) = run(x, &comps, &cfg, &mut rng) {
            if best.as_ref().map_or(true, |b| r.objective < b.objective) {
                best = Some(r);
            }
        }
    }
    let best = best.ok_or_else(|| {
        Error::Infeasible(alloc::format!(
            "no feasible assignment in {} restarts with k = {}",
            cfg.restarts,
            cfg.k
        ))
    })?;
    if !cons.satisfied_by(&best.assignments) {
        return Err(Error::Numerical("constrained assignment violates a constraint".into()));
    }
    Ok(best)
}
