//! Time-varying communication graphs and their doubly stochastic weights.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Undirected edge list over nodes `0..n`.
pub type EdgeSet = Vec<(usize, usize)>;

/// Dense row-major `n × n` weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingMatrix<T> {
    n: usize,
    w: Vec<T>,
}

impl<T: Scalar> MixingMatrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut w = vec![T::zero(); n * n];
        for i in 0..n {
            w[i * n + i] = T::one();
        }
        Self { n, w }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("mixing matrix must be square".into()));
        }
        Ok(Self {
            n,
            w: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut w = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    w[i * n + j] = w[i * n + j] + a * rhs.get(k, j);
                }
            }
        }
        Self { n, w }
    }

    /// Smallest strictly positive entry.
    pub fn min_positive(&self) -> Option<T> {
        self.w
            .iter()
            .copied()
            .filter(|&v| v > T::zero())
            .fold(None, |m, v| Some(m.map_or(v, |m: T| m.min(v))))
    }

    /// `max_{ij} |w_ij − 1/n|`.
    pub fn max_deviation_from_average(&self) -> T {
        let avg = T::one() / T::from_usize_lossy(self.n);
        self.w.iter().map(|&v| (v - avg).abs()).fold(T::zero(), T::max)
    }
}

/// Metropolis-type weights `w_ij = 1/max(|N_i|, |N_j|)` on edges, where `|N_i|`
/// counts node `i` itself (closed neighborhood); the diagonal absorbs the rest.
pub fn metropolis_weights<T: Scalar>(edges: &[(usize, usize)], n: usize) -> Result<MixingMatrix<T>> {
    let edges = normalize_edges(edges, n)?;
    let mut closed_degree = vec![1usize; n];
    for &(a, b) in &edges {
        closed_degree[a] += 1;
        closed_degree[b] += 1;
    }
    let mut m = MixingMatrix {
        n,
        w: vec![T::zero(); n * n],
    };
    for &(a, b) in &edges {
        let w = T::one() / T::from_usize_lossy(closed_degree[a].max(closed_degree[b]));
        m.w[a * n + b] = w;
        m.w[b * n + a] = w;
    }
    for i in 0..n {
        let off: T = (0..n).filter(|&j| j != i).map(|j| m.get(i, j)).sum();
        let diag = T::one() - off;
        if diag < T::zero() {
            return Err(Error::Construction(format!("negative diagonal {diag} at node {i}")));
        }
        m.w[i * n + i] = diag;
    }
    Ok(m)
}

fn normalize_edges(edges: &[(usize, usize)], n: usize) -> Result<BTreeSet<(usize, usize)>> {
    let mut set = BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidArgument(format!("edge ({a}, {b}) outside 0..{n}")));
        }
        if a == b {
            return Err(Error::InvalidArgument(format!("self loop at node {a}")));
        }
        set.insert((a.min(b), a.max(b)));
    }
    Ok(set)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotSquare,
    Negative { i: usize, j: usize, value: f64 },
    RowSum { i: usize, sum: f64 },
    ColumnSum { j: usize, sum: f64 },
    BelowEta { i: usize, j: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare => write!(f, "matrix is not square"),
            Violation::Negative { i, j, value } => write!(f, "negative entry w[{i}][{j}] = {value}"),
            Violation::RowSum { i, sum } => write!(f, "row {i} sums to {sum}"),
            Violation::ColumnSum { j, sum } => write!(f, "column {j} sums to {sum}"),
            Violation::BelowEta { i, j, value } => {
                write!(f, "positive entry w[{i}][{j}] = {value} below eta")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks nonnegativity, unit row/column sums (to `T::CHECK_TOL`) and that
/// every positive entry is at least `eta`.
pub fn validate<T: Scalar>(rows: &[Vec<T>], eta: T) -> ValidationReport {
    let n = rows.len();
    let mut violations = Vec::new();
    if rows.iter().any(|r| r.len() != n) {
        violations.push(Violation::NotSquare);
        return ValidationReport { violations };
    }
    let tol = T::CHECK_TOL;
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < T::zero() {
                violations.push(Violation::Negative { i, j, value: v.to_f64_lossy() });
            } else if v > T::zero() && v < eta - tol {
                violations.push(Violation::BelowEta { i, j, value: v.to_f64_lossy() });
            }
        }
        let sum: T = row.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            violations.push(Violation::RowSum { i, sum: sum.to_f64_lossy() });
        }
    }
    for j in 0..n {
        let sum: T = rows.iter().map(|r| r[j]).sum();
        if (sum - T::one()).abs() > tol {
            violations.push(Violation::ColumnSum { j, sum: sum.to_f64_lossy() });
        }
    }
    ValidationReport { violations }
}

pub fn validate_matrix<T: Scalar>(m: &MixingMatrix<T>, eta: T) -> ValidationReport {
    validate(&m.rows(), eta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// `base_graphs[k mod count]`.
    Cyclic,
    /// Uniform draw per iteration from a seeded substream.
    Random,
}

/// Serialized form of a [`GraphSchedule`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub n: usize,
    pub base_graphs: Vec<EdgeSet>,
    pub mode: SelectionMode,
    pub window: usize,
}

#[derive(Clone, Debug)]
pub struct GraphSchedule<T> {
    spec: ScheduleSpec,
    matrices: Vec<MixingMatrix<T>>,
}

impl<T: Scalar> GraphSchedule<T> {
    pub fn new(spec: ScheduleSpec) -> Result<Self> {
        if spec.base_graphs.is_empty() {
            return Err(Error::InvalidParameter("schedule needs at least one base graph".into()));
        }
        if spec.window == 0 {
            return Err(Error::InvalidParameter("connectivity window must be >= 1".into()));
        }
        if spec.mode == SelectionMode::Cyclic && spec.window < spec.base_graphs.len() {
            return Err(Error::InvalidParameter(format!(
                "cyclic window {} shorter than the {} base graphs",
                spec.window,
                spec.base_graphs.len()
            )));
        }
        let matrices = spec
            .base_graphs
            .iter()
            .map(|e| metropolis_weights(e, spec.n))
            .collect::<Result<Vec<_>>>()?;
        let schedule = Self { spec, matrices };
        if !schedule.union_connected() {
            return Err(Error::InvalidParameter("union of base graphs is not connected".into()));
        }
        Ok(schedule)
    }

    /// Every iteration uses the complete graph (exact averaging).
    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::new(ScheduleSpec {
            n,
            base_graphs: vec![edges],
            mode: SelectionMode::Cyclic,
            window: 1,
        })
    }

    /// Four sparse graphs whose union is a Hamiltonian path over a seeded
    /// permutation of the nodes. Graph `g` holds the path edges with index
    /// `≡ g (mod 4)` plus one seeded random matching.
    pub fn four_graph(n: usize, topology_seed: u64, mode: SelectionMode) -> Result<Self> {
        const COUNT: usize = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(topology_seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut base_graphs = vec![EdgeSet::new(); COUNT];
        for (idx, pair) in order.windows(2).enumerate() {
            base_graphs[idx % COUNT].push((pair[0], pair[1]));
        }
        for graph in base_graphs.iter_mut() {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            for pair in perm.chunks_exact(2) {
                let e = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if !graph.iter().any(|&(a, b)| (a.min(b), a.max(b)) == e) {
                    graph.push(e);
                }
            }
        }
        Self::new(ScheduleSpec {
            n,
            base_graphs,
            mode,
            window: COUNT,
        })
    }

    pub fn spec(&self) -> &ScheduleSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn base_matrices(&self) -> &[MixingMatrix<T>] {
        &self.matrices
    }

    /// Index of the base graph used at iteration `k`.
    pub fn draw_index(&self, k: u64, seed: u64) -> usize {
        let count = self.matrices.len();
        match self.spec.mode {
            SelectionMode::Cyclic => (k % count as u64) as usize,
            SelectionMode::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k);
                rng.random_range(0..count)
            }
        }
    }

    pub fn draw_matrix(&self, k: u64, seed: u64) -> &MixingMatrix<T> {
        &self.matrices[self.draw_index(k, seed)]
    }

    /// `Φ(k, s) = W_k W_{k−1} ⋯ W_s`, identity when `k = s − 1`.
    pub fn transition_product(&self, k: u64, s: u64, seed: u64) -> Result<MixingMatrix<T>> {
        if k + 1 < s {
            return Err(Error::InvalidArgument(format!("transition product needs k >= s - 1 (k={k}, s={s})")));
        }
        let mut phi = MixingMatrix::identity(self.n());
        for t in s..=k {
            phi = self.draw_matrix(t, seed).matmul(&phi);
        }
        Ok(phi)
    }

    pub fn union_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for g in &self.spec.base_graphs {
            for &(a, b) in g {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Minimum positive weight over all base matrices.
    pub fn eta(&self) -> T {
        self.matrices
            .iter()
            .filter_map(MixingMatrix::min_positive)
            .fold(T::one(), T::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MixingConstants<T> {
    pub theta_mix: T,
    pub beta_mix: T,
    pub eta: T,
}

/// `θ = (1 − η/(4N²))^{−2}`, `β = (1 − η/(4N²))^{1/B}`.
pub fn envelope_constants<T: Scalar>(eta: T, n: usize, window: usize) -> MixingConstants<T> {
    let n = T::from_usize_lossy(n);
    let rho = T::one() - eta / (T::lit(4.0) * n * n);
    MixingConstants {
        theta_mix: rho.powi(-2),
        beta_mix: rho.powf(T::one() / T::from_usize_lossy(window)),
        eta,
    }
}

pub fn mixing_constants<T: Scalar>(schedule: &GraphSchedule<T>) -> MixingConstants<T> {
    envelope_constants(schedule.eta(), schedule.n(), schedule.spec.window)
}

/// Consensus-weighted combination `Σ_j w_ij v_j` for every `i`.
pub fn mix_blocks<T: Scalar>(w: &MixingMatrix<T>, v: &[Vec<T>]) -> Vec<Vec<T>> {
    let dim = v.first().map_or(0, Vec::len);
    (0..w.n())
        .map(|i| {
            let mut acc = vec![T::zero(); dim];
            for (j, &wij) in w.row(i).iter().enumerate() {
                if wij != T::zero() {
                    for (a, &x) in acc.iter_mut().zip(&v[j]) {
                        *a = *a + wij * x;
                    }
                }
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn two_node_complete_graph_is_pairwise_average() {
        let m = metropolis_weights::<f64>(&[(0, 1)], 2).unwrap();
        assert_eq!(m.rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn empty_graph_gives_identity() {
        let m = metropolis_weights::<f64>(&[], 3).unwrap();
        assert_eq!(m, MixingMatrix::identity(3));
    }

    #[test]
    fn path_graph_uses_closed_degrees() {
        let m = metropolis_weights::<f64>(&[(0, 1), (1, 2)], 3).unwrap();
        assert!(close(m.get(0, 1), 1.0 / 3.0));
        assert!(close(m.get(0, 0), 2.0 / 3.0));
        assert!(close(m.get(1, 1), 1.0 / 3.0));
        assert_eq!(m.get(0, 2), 0.0);
        assert!(validate_matrix(&m, 1.0 / 3.0).passed());
    }

    #[test]
    fn star_graph_keeps_nonnegative_diagonal() {
        let edges: Vec<_> = (1..6).map(|j| (0, j)).collect();
        let m = metropolis_weights::<f64>(&edges, 6).unwrap();
        assert!((0..6).all(|i| m.get(i, i) >= 0.0));
        assert!(validate_matrix(&m, m.min_positive().unwrap()).passed());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(metropolis_weights::<f64>(&[(0, 3)], 3).is_err());
        assert!(metropolis_weights::<f64>(&[(1, 1)], 3).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[vec![0.5, 0.5], vec![0.5, 0.5]], 0.4).passed());
        let bad = validate(&[vec![0.6, 0.5], vec![0.4, 0.5]], 0.1);
        assert!(bad.violations.iter().any(|v| matches!(v, Violation::RowSum { i: 0, .. })));
        assert!(validate(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.5).passed());
        let low = validate(&[vec![0.5, 0.5], vec![0.5, 0.5]], 0.6);
        assert_eq!(low.violations.len(), 4);
        let neg = validate(&[vec![1.5, -0.5], vec![-0.5, 1.5]], 0.1);
        assert!(neg.violations.iter().any(|v| matches!(v, Violation::Negative { .. })));
        assert_eq!(validate(&[vec![1.0, 0.0]], 0.1).violations, vec![Violation::NotSquare]);
    }

    #[test]
    fn cyclic_draws_wrap_around() {
        let s = GraphSchedule::<f64>::four_graph(20, 1, SelectionMode::Cyclic).unwrap();
        assert_eq!(s.draw_index(5, 0), 1);
        assert_eq!(s.draw_index(8, 123), 0);
    }

    #[test]
    fn random_draws_are_deterministic_per_seed() {
        let s = GraphSchedule::<f64>::four_graph(20, 1, SelectionMode::Random).unwrap();
        for k in 0..50 {
            assert_eq!(s.draw_index(k, 42), s.draw_index(k, 42));
        }
        let picks: BTreeSet<usize> = (0..200).map(|k| s.draw_index(k, 42)).collect();
        assert_eq!(picks.len(), 4);
    }

    #[test]
    fn single_graph_cyclic_is_constant() {
        let s = GraphSchedule::<f64>::complete(4).unwrap();
        assert_eq!(s.draw_matrix(0, 0), s.draw_matrix(17, 0));
    }

    #[test]
    fn transition_product_edge_cases() {
        let s = GraphSchedule::<f64>::complete(5).unwrap();
        assert_eq!(s.transition_product(2, 3, 0).unwrap(), MixingMatrix::identity(5));
        assert!(s.transition_product(1, 3, 0).is_err());
        let phi = s.transition_product(9, 2, 0).unwrap();
        assert!(phi.max_deviation_from_average() < 1e-15);
    }

    #[test]
    fn products_stay_doubly_stochastic_and_within_mixing_envelope() {
        let s = GraphSchedule::<f64>::four_graph(20, 7, SelectionMode::Random).unwrap();
        let eta = s.eta();
        let consts = mixing_constants(&s);
        for m in s.base_matrices() {
            assert!(validate_matrix(m, eta).passed());
        }
        let mut phi = MixingMatrix::identity(20);
        for k in 1..=200u64 {
            phi = s.draw_matrix(k, 3).matmul(&phi);
            let report = validate(&phi.rows(), 0.0);
            assert!(report.violations.iter().all(|v| match v {
                Violation::RowSum { sum, .. } | Violation::ColumnSum { sum, .. } => (sum - 1.0).abs() < 1e-10,
                _ => false,
            }));
            let bound = consts.theta_mix * consts.beta_mix.powi(k as i32 - 1);
            assert!(phi.max_deviation_from_average() <= bound);
        }
        assert_eq!(phi, s.transition_product(200, 1, 3).unwrap());
    }

    #[test]
    fn four_graph_union_is_connected_but_members_are_sparse() {
        let s = GraphSchedule::<f64>::four_graph(20, 11, SelectionMode::Cyclic).unwrap();
        assert!(s.union_connected());
        assert_eq!(s.spec().window, 4);
        assert!(s.base_matrices().iter().all(|m| m.min_positive().unwrap() >= 1.0 / 3.0 - 1e-15));
    }

    #[test]
    fn disconnected_union_is_rejected() {
        let spec = ScheduleSpec {
            n: 4,
            base_graphs: vec![vec![(0, 1)], vec![(2, 3)]],
            mode: SelectionMode::Random,
            window: 2,
        };
        assert!(GraphSchedule::<f64>::new(spec).is_err());
        let short = ScheduleSpec {
            n: 3,
            base_graphs: vec![vec![(0, 1)], vec![(1, 2)]],
            mode: SelectionMode::Cyclic,
            window: 1,
        };
        assert!(GraphSchedule::<f64>::new(short).is_err());
    }

    #[test]
    fn envelope_constants_examples() {
        let c = envelope_constants(0.25f64, 2, 1);
        assert!(close(c.beta_mix, 63.0 / 64.0));
        assert!(close(c.theta_mix, (64.0f64 / 63.0).powi(2)));
        let tiny = envelope_constants(1e-14f64, 2, 1);
        assert!(1.0 - tiny.beta_mix < 1e-14);
        let b1 = envelope_constants(0.25f64, 2, 1).beta_mix;
        let b2 = envelope_constants(0.25f64, 2, 2).beta_mix;
        assert!(close(b2, b1.sqrt()));
        assert!(c.beta_mix < 1.0 && c.theta_mix >= 1.0);
    }

    #[test]
    fn mixing_blocks_preserves_column_sums() {
        let w = MixingMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let out = mix_blocks(&w, &[vec![1.0], vec![3.0]]);
        assert_eq!(out, vec![vec![2.0], vec![2.0]]);
        let id = MixingMatrix::identity(2);
        assert_eq!(mix_blocks(&id, &[vec![1.0, 2.0], vec![3.0, 4.0]]), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
