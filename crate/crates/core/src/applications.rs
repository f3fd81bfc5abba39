//! Kernel-induced distances, tours and kernel selection.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{GroupoidKernel, DEFAULT_PSD_TOL};
use crate::linalg::CMatrix;

/// Relative tolerance under which a negative radicand is rounded to zero.
pub const DEFAULT_DISTANCE_TOL: f64 = 1e-9;
/// Largest instance solved by enumeration.
pub const MAX_EXACT_NODES: usize = 10;

/// `sqrt(K(x,x) + K(y,y) - 2 Re K(x,y))`.
pub fn kernel_distance(values: &CMatrix, x: usize, y: usize, tol: f64) -> Result<f64> {
    let n = values.nrows();
    if x >= n || y >= n {
        return Err(Error::InvalidArgument(format!(
            "index out of range for a kernel of size {n}"
        )));
    }
    let (kxx, kyy) = (values[(x, x)].re, values[(y, y)].re);
    let radicand = kxx + kyy - 2.0 * values[(x, y)].re;
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -tol * (kxx.abs() + kyy.abs()).max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand {
            x: x.to_string(),
            y: y.to_string(),
            radicand,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    #[serde(serialize_with = "serialize_rows")]
    pub d: DMatrix<f64>,
}

fn serialize_rows<S: serde::Serializer>(
    d: &DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = d.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, d: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if d.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                what: "distance matrix".into(),
                expected: (n, n),
                found: d.shape(),
            });
        }
        Ok(Self { labels, d })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.d[(i, j)] == self.d[(j, i)]))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.len()).all(|i| self.d[(i, i)] == 0.0)
    }

    /// Largest `d(i,k) - d(i,j) - d(j,k)`, or zero.
    pub fn triangle_violation(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.d[(i, k)] - self.d[(i, j)] - self.d[(j, k)]);
                }
            }
        }
        worst
    }

    /// Smallest off-diagonal entry.
    pub fn min_off_diagonal(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.d[(i, j)])
            .reduce(f64::min)
    }
}

/// Pairwise distances between the arrows named in `nodes`.
pub fn distance_matrix<S: AsRef<str>>(
    kernel: &GroupoidKernel,
    nodes: &[S],
) -> Result<DistanceMatrix> {
    let g = kernel.groupoid();
    let idx = nodes
        .iter()
        .map(|s| g.arrow(s.as_ref()).map(|a| a.0))
        .collect::<Result<Vec<_>>>()?;
    let labels = nodes.iter().map(|s| s.as_ref().to_string()).collect();
    distance_matrix_from_values(kernel.values(), labels, &idx)
}

pub fn distance_matrix_from_values(
    values: &CMatrix,
    labels: Vec<String>,
    idx: &[usize],
) -> Result<DistanceMatrix> {
    let n = idx.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let dist = kernel_distance(values, idx[i], idx[j], DEFAULT_DISTANCE_TOL).map_err(
                |e| match e {
                    Error::NegativeRadicand { radicand, .. } => Error::NegativeRadicand {
                        x: labels[i].clone(),
                        y: labels[j].clone(),
                        radicand,
                    },
                    other => other,
                },
            )?;
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    DistanceMatrix::new(labels, d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tour {
    /// Node indices into the distance matrix.
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn labels<'a>(&self, d: &'a DistanceMatrix) -> Vec<&'a str> {
        self.order.iter().map(|&i| d.labels[i].as_str()).collect()
    }
}

/// Cyclic length, including the closing edge.
pub fn tour_length(d: &DistanceMatrix, order: &[usize]) -> Result<f64> {
    let n = d.len();
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!(
                "tour repeats or leaves the node set at index {i}"
            )));
        }
    }
    if order.len() != n {
        return Err(Error::InvalidArgument(format!(
            "tour visits {} of {n} nodes",
            order.len()
        )));
    }
    Ok(cyclic_length(d, order))
}

fn cyclic_length(d: &DistanceMatrix, order: &[usize]) -> f64 {
    let n = order.len();
    (0..n).map(|i| d.d[(order[i], order[(i + 1) % n])]).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TspMode {
    Exact,
    /// Nearest neighbour plus 2-opt, then `restarts` random starts.
    Heuristic {
        restarts: usize,
    },
}

pub fn solve_tsp(d: &DistanceMatrix, mode: TspMode, seed: u64) -> Result<Tour> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Tsp(format!("need at least 2 nodes, got {n}")));
    }
    match mode {
        TspMode::Exact => exact_tsp(d),
        TspMode::Heuristic { restarts } => Ok(heuristic_tsp(d, restarts, seed)),
    }
}

/// Enumerates tours starting at node 0; among lengths equal up to rounding
/// the lexicographically smallest order wins.
fn exact_tsp(d: &DistanceMatrix) -> Result<Tour> {
    let n = d.len();
    if n > MAX_EXACT_NODES {
        return Err(Error::Tsp(format!(
            "exact mode enumerates (N-1)! tours and is limited to {MAX_EXACT_NODES} nodes, got {n}; use heuristic mode"
        )));
    }
    let mut best: Option<Tour> = None;
    for rest in (1..n).permutations(n - 1) {
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend(rest);
        let length = cyclic_length(d, &order);
        if best
            .as_ref()
            .is_none_or(|b| length < b.length - 1e-12 * b.length.max(1.0))
        {
            best = Some(Tour { order, length });
        }
    }
    Ok(best.expect("n >= 2"))
}

fn nearest_neighbour(d: &DistanceMatrix) -> Vec<usize> {
    let n = d.len();
    let mut visited = vec![false; n];
    let mut order = vec![0];
    visited[0] = true;
    while order.len() < n {
        let last = *order.last().unwrap();
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| d.d[(last, a)].total_cmp(&d.d[(last, b)]).then(a.cmp(&b)))
            .unwrap();
        visited[next] = true;
        order.push(next);
    }
    order
}

/// First-improvement 2-opt in lexicographic `(i, j)` scan order.
fn two_opt(d: &DistanceMatrix, order: &mut [usize]) {
    let n = order.len();
    if n < 4 {
        return;
    }
    let eps = 1e-12 * d.d.iter().fold(1.0f64, |m, v| m.max(*v));
    'scan: loop {
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (order[i], order[i + 1]);
                let (c, e) = (order[j], order[(j + 1) % n]);
                let delta = d.d[(a, c)] + d.d[(b, e)] - d.d[(a, b)] - d.d[(c, e)];
                if delta < -eps {
                    order[i + 1..=j].reverse();
                    continue 'scan;
                }
            }
        }
        break;
    }
}

fn heuristic_tsp(d: &DistanceMatrix, restarts: usize, seed: u64) -> Tour {
    let mut order = nearest_neighbour(d);
    two_opt(d, &mut order);
    let mut best = Tour {
        length: cyclic_length(d, &order),
        order,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let mut order: Vec<usize> = (0..d.len()).collect();
        order[1..].shuffle(&mut rng);
        two_opt(d, &mut order);
        let length = cyclic_length(d, &order);
        if length < best.length {
            best = Tour { order, length };
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Shortest optimal tour wins.
    MinTour,
    /// Largest smallest pairwise distance wins.
    MaxMinDistance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedKernel {
    pub rank: usize,
    pub id: String,
    pub score: f64,
}

/// Ranks candidate kernels by `objective` over the same node set; ties keep
/// candidate order.
pub fn select_kernel<S: AsRef<str>>(
    candidates: &[(&str, &GroupoidKernel)],
    nodes: &[S],
    objective: Objective,
) -> Result<Vec<RankedKernel>> {
    let (_, first) = candidates
        .first()
        .ok_or_else(|| Error::InvalidArgument("no candidate kernels".into()))?;
    let mut scored = Vec::with_capacity(candidates.len());
    for (id, k) in candidates {
        if k.labels() != first.labels() {
            return Err(Error::GroupoidMismatch);
        }
        let psd = k.check_positive_definite(DEFAULT_PSD_TOL)?;
        if !psd.passed {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: psd.min_eigenvalue,
                threshold: psd.threshold,
            });
        }
        let d = distance_matrix(k, nodes)?;
        let score = match objective {
            Objective::MinTour => {
                let mode = if d.len() <= MAX_EXACT_NODES {
                    TspMode::Exact
                } else {
                    TspMode::Heuristic { restarts: 0 }
                };
                solve_tsp(&d, mode, 0)?.length
            }
            Objective::MaxMinDistance => d
                .min_off_diagonal()
                .ok_or_else(|| Error::InvalidArgument("need at least 2 nodes".into()))?,
        };
        scored.push((id.to_string(), score));
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (scored[a].1, scored[b].1);
        match objective {
            Objective::MinTour => sa.total_cmp(&sb),
            Objective::MaxMinDistance => sb.total_cmp(&sa),
        }
    });
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(r, i)| RankedKernel {
            rank: r + 1,
            id: scored[i].0.clone(),
            score: scored[i].1,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_to_groupoid, GroupTable};
    use crate::kernel::convolution_kernel;
    use crate::linalg::C64;
    use std::sync::Arc;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn z(n: usize) -> Arc<crate::groupoid::FiniteGroupoid> {
        Arc::new(group_to_groupoid(&GroupTable::cyclic(n).unwrap()).unwrap())
    }

    fn identity_kernel(n: usize) -> GroupoidKernel {
        let mut f = vec![c(0.0); n];
        f[0] = c(1.0);
        convolution_kernel(z(n), &f, 1.0).unwrap()
    }

    fn constant_kernel(n: usize, value: f64) -> GroupoidKernel {
        GroupoidKernel::new(z(n), CMatrix::from_element(n, n, c(value))).unwrap()
    }

    #[test]
    fn distances() {
        let k = identity_kernel(3);
        let labels = k.labels().to_vec();
        let d = distance_matrix(&k, &labels).unwrap();
        assert!(d.is_symmetric() && d.has_zero_diagonal());
        assert!((d.get(0, 1) - 2f64.sqrt()).abs() < 1e-15);
        let zero = distance_matrix(&constant_kernel(3, 2.5), &labels).unwrap();
        assert!(zero.d.iter().all(|&v| v == 0.0));
        assert!(distance_matrix(&k, &["nope"]).is_err());

        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(1.0)]);
        assert!(matches!(
            kernel_distance(&bad, 0, 1, 1e-9),
            Err(Error::NegativeRadicand { .. })
        ));
        let tiny = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0 + 1e-14), c(1.0 + 1e-14), c(1.0)]);
        assert_eq!(kernel_distance(&tiny, 0, 1, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn tour_lengths() {
        let k = identity_kernel(3);
        let d = distance_matrix(&k, k.labels()).unwrap();
        for p in (0..3).permutations(3) {
            assert!((tour_length(&d, &p).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(tour_length(&d, &[0, 0, 1]).is_err());
        assert!(tour_length(&d, &[0, 1]).is_err());
        let d2 = DistanceMatrix::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0]),
        )
        .unwrap();
        assert_eq!(tour_length(&d2, &[0, 1]).unwrap(), 3.0);
        let t = solve_tsp(&d2, TspMode::Exact, 0).unwrap();
        assert_eq!(t.order, vec![0, 1]);
    }

    #[test]
    fn tsp_modes_and_errors() {
        let k = identity_kernel(4);
        let d = distance_matrix(&k, k.labels()).unwrap();
        let t = solve_tsp(&d, TspMode::Exact, 0).unwrap();
        assert!((t.length - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(t.order, vec![0, 1, 2, 3]);

        let one = DistanceMatrix::new(vec!["a".into()], DMatrix::zeros(1, 1)).unwrap();
        assert!(solve_tsp(&one, TspMode::Exact, 0).is_err());
        let big = DistanceMatrix::new(
            (0..11).map(|i| i.to_string()).collect(),
            DMatrix::zeros(11, 11),
        )
        .unwrap();
        assert!(solve_tsp(&big, TspMode::Exact, 0).is_err());
        assert!(solve_tsp(&big, TspMode::Heuristic { restarts: 2 }, 1).is_ok());
    }

    #[test]
    fn two_opt_removes_a_crossing() {
        // Unit square visited in crossing order 0, 2, 1, 3.
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let d = DMatrix::from_fn(4, 4, |i, j| {
            let (a, b): ((f64, f64), (f64, f64)) = (pts[i], pts[j]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        });
        let d = DistanceMatrix::new((0..4).map(|i| i.to_string()).collect(), d).unwrap();
        let mut order = vec![0, 2, 1, 3];
        two_opt(&d, &mut order);
        assert!((cyclic_length(&d, &order) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn selection() {
        let id = identity_kernel(3);
        let konst = constant_kernel(3, 1.0);
        let nodes = id.labels().to_vec();
        let r = select_kernel(
            &[("id", &id), ("const", &konst)],
            &nodes,
            Objective::MinTour,
        )
        .unwrap();
        assert_eq!(r[0].id, "const");
        assert_eq!(r[0].score, 0.0);
        let scaled = id.map(|z| z * 4.0);
        let r = select_kernel(
            &[("id", &id), ("4id", &scaled)],
            &nodes,
            Objective::MaxMinDistance,
        )
        .unwrap();
        assert_eq!(r[0].id, "4id");
        assert!((r[0].score - 2.0 * r[1].score).abs() < 1e-12);
        let r = select_kernel(&[("only", &id)], &nodes, Objective::MinTour).unwrap();
        assert_eq!(r.len(), 1);
        assert!(select_kernel::<&str>(&[], &[], Objective::MinTour).is_err());
    }
}
