//! Combination matrices over strongly connected directed graphs.
//!
//! **Convention.** Matrices are left-stochastic: entry `(ℓ, k)` is the weight
//! agent `k` puts on information coming from agent `ℓ`, so each *column*
//! sums to one. An edge `ℓ → k` means `ℓ ∈ N_k`. The Perron vector solves
//! `A v = v` with `v > 0` and `Σ v = 1`.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;
pub const PERRON_TOLERANCE: f64 = 1e-12;
pub const PERRON_MAX_ITERATIONS: usize = 100_000;
pub const MAX_GENERATION_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("graph is not strongly connected ({components} strongly connected components)")]
    NotStronglyConnected { components: usize },
    #[error("no agent has a positive self-weight")]
    NoSelfLoop,
    #[error("agent {agent} has no self-loop; the averaging rule needs one at every node")]
    MissingSelfLoop { agent: usize },
    #[error("agent {agent} has no neighbours besides itself but lambda = {lambda} < 1")]
    DegenerateDegree { agent: usize, lambda: f64 },
    #[error("lambda must lie in (0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("column {column} sums to {sum}, expected 1")]
    NotLeftStochastic { column: usize, sum: f64 },
    #[error("entry ({row}, {column}) = {value} is negative or not finite")]
    InvalidEntry { row: usize, column: usize, value: f64 },
    #[error("matrix must be square and non-empty")]
    BadShape,
    #[error("power iteration did not converge within {0} iterations")]
    PerronNonConvergence(usize),
    #[error("agent {agent} has self-weight 1 but agent {listener} listens to it")]
    DivisionDegeneracy { agent: usize, listener: usize },
    #[error("no strongly connected graph found after {attempts} attempts; try a larger edge probability")]
    GenerationFailed { attempts: usize },
    #[error("edge probability must lie in (0, 1], got {0}")]
    InvalidEdgeProbability(f64),
}

/// Directed graph. `has_edge(ℓ, k)` means `ℓ ∈ N_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    edges: Vec<bool>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: vec![false; n * n],
        }
    }

    /// `rows[ℓ][k] == true` means `ℓ ∈ N_k`.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, NetworkError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(NetworkError::BadShape);
        }
        let mut adj = Self::empty(n);
        for (l, row) in rows.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                adj.set(l, k, *e);
            }
        }
        Ok(adj)
    }

    /// Bidirectional ring with self-loops.
    pub fn ring(n: usize) -> Self {
        let mut adj = Self::empty(n);
        for k in 0..n {
            adj.set(k, k, true);
            if n > 1 {
                let next = (k + 1) % n;
                adj.set(k, next, true);
                adj.set(next, k, true);
            }
        }
        adj
    }

    pub fn complete(n: usize) -> Self {
        Self {
            n,
            edges: vec![true; n * n],
        }
    }

    /// Hub 0 linked both ways to every leaf, self-loops everywhere.
    pub fn star(n: usize) -> Self {
        let mut adj = Self::empty(n);
        for k in 0..n {
            adj.set(k, k, true);
            if k > 0 {
                adj.set(0, k, true);
                adj.set(k, 0, true);
            }
        }
        adj
    }

    /// Directed Erdős–Rényi graph with self-loops at every node, resampled
    /// until it is strongly connected.
    pub fn random_strongly_connected<R: Rng + ?Sized>(
        n: usize,
        edge_probability: f64,
        rng: &mut R,
    ) -> Result<Self, NetworkError> {
        if n == 0 {
            return Err(NetworkError::BadShape);
        }
        if !(edge_probability > 0.0 && edge_probability <= 1.0) {
            return Err(NetworkError::InvalidEdgeProbability(edge_probability));
        }
        for _ in 0..MAX_GENERATION_ATTEMPTS {
            let mut adj = Self::empty(n);
            for l in 0..n {
                for k in 0..n {
                    let present = l == k || rng.random::<f64>() < edge_probability;
                    adj.set(l, k, present);
                }
            }
            if adj.scc_count() == 1 {
                return Ok(adj);
            }
        }
        Err(NetworkError::GenerationFailed {
            attempts: MAX_GENERATION_ATTEMPTS,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, present: bool) {
        self.edges[from * self.n + to] = present;
    }

    /// `n_k`: size of `N_k`, counting `k` itself when it has a self-loop.
    pub fn neighbourhood_size(&self, k: usize) -> usize {
        (0..self.n).filter(|&l| self.has_edge(l, k)).count()
    }

    pub fn scc_count(&self) -> usize {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for l in 0..self.n {
            for k in 0..self.n {
                if l != k && self.has_edge(l, k) {
                    g.add_edge(nodes[l], nodes[k], ());
                }
            }
        }
        kosaraju_scc(&g).len()
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|l| (0..self.n).map(|k| self.has_edge(l, k)).collect())
            .collect()
    }
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CombinationMatrix {
    /// Rows as given, i.e. `rows[ℓ][k] = a_ℓk`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NetworkError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(NetworkError::BadShape);
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, row: usize, column: usize) -> f64 {
        self.data[row * self.n + column]
    }

    fn set(&mut self, row: usize, column: usize, value: f64) {
        self.data[row * self.n + column] = value;
    }

    pub fn self_weight(&self, k: usize) -> f64 {
        self.get(k, k)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    /// Checks nonnegativity and unit column sums.
    pub fn validate_left_stochastic(&self) -> Result<(), NetworkError> {
        for row in 0..self.n {
            for column in 0..self.n {
                let value = self.get(row, column);
                if !(value.is_finite() && value >= 0.0) {
                    return Err(NetworkError::InvalidEntry { row, column, value });
                }
            }
        }
        for column in 0..self.n {
            let sum: f64 = (0..self.n).map(|row| self.get(row, column)).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(NetworkError::NotLeftStochastic { column, sum });
            }
        }
        Ok(())
    }

    /// Support of the matrix as a graph.
    pub fn support(&self) -> Adjacency {
        let mut adj = Adjacency::empty(self.n);
        for l in 0..self.n {
            for k in 0..self.n {
                adj.set(l, k, self.get(l, k) > 0.0);
            }
        }
        adj
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in out.iter_mut().enumerate() {
            *o = (0..self.n).map(|k| self.get(row, k) * v[k]).sum();
        }
    }
}

/// Power iteration from the uniform vector until successive iterates differ
/// by less than [`PERRON_TOLERANCE`] in max-norm.
pub fn perron_vector(matrix: &CombinationMatrix) -> Result<Vec<f64>, NetworkError> {
    let n = matrix.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..PERRON_MAX_ITERATIONS {
        matrix.apply(&v, &mut next);
        let total: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= total;
        }
        let diff = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if diff < PERRON_TOLERANCE {
            return Ok(v);
        }
    }
    Err(NetworkError::PerronNonConvergence(PERRON_MAX_ITERATIONS))
}

/// `Σ_ℓ v_ℓ Σ_{n≠ℓ} a_nℓ · g(a_nn) / (1 - a_nn)`.
fn weighted_self_sum(
    matrix: &CombinationMatrix,
    perron: &[f64],
    numerator: impl Fn(f64) -> f64,
) -> Result<f64, NetworkError> {
    let size = matrix.len();
    let mut total = 0.0;
    for (l, v_l) in perron.iter().enumerate() {
        let mut inner = 0.0;
        for n in (0..size).filter(|&n| n != l) {
            let a_nl = matrix.get(n, l);
            if a_nl == 0.0 {
                continue;
            }
            let a_nn = matrix.get(n, n);
            if a_nn >= 1.0 {
                return Err(NetworkError::DivisionDegeneracy { agent: n, listener: l });
            }
            inner += a_nl * numerator(a_nn) / (1.0 - a_nn);
        }
        total += v_l * inner;
    }
    Ok(total)
}

/// `α = Σ_ℓ v_ℓ Σ_{n≠ℓ} a_nℓ / (1 - a_nn)`.
pub fn alpha_constant(matrix: &CombinationMatrix, perron: &[f64]) -> Result<f64, NetworkError> {
    weighted_self_sum(matrix, perron, |_| 1.0)
}

/// `Σ_ℓ v_ℓ Σ_{n≠ℓ} a_nℓ a_nn / (1 - a_nn)`, the factor multiplying `M` in
/// the mislearning condition.
pub fn lemma4_weight_sum(matrix: &CombinationMatrix, perron: &[f64]) -> Result<f64, NetworkError> {
    weighted_self_sum(matrix, perron, |a_nn| a_nn)
}

/// A validated network: primitive left-stochastic matrix plus derived
/// constants. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    matrix: CombinationMatrix,
    adjacency: Adjacency,
    perron: Vec<f64>,
    alpha: f64,
    lemma4_weight_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkSummary {
    pub agents: usize,
    pub strongly_connected: bool,
    pub scc_count: usize,
    pub perron: Vec<f64>,
    pub alpha: f64,
    pub lemma4_weight_sum: f64,
    pub self_weights: Vec<f64>,
}

impl Network {
    /// Validates an arbitrary combination matrix.
    pub fn from_matrix(matrix: CombinationMatrix) -> Result<Self, NetworkError> {
        let adjacency = matrix.support();
        Self::with_adjacency(matrix, adjacency)
    }

    fn with_adjacency(matrix: CombinationMatrix, adjacency: Adjacency) -> Result<Self, NetworkError> {
        matrix.validate_left_stochastic()?;
        let components = matrix.support().scc_count();
        if components != 1 {
            return Err(NetworkError::NotStronglyConnected { components });
        }
        if !(0..matrix.len()).any(|k| matrix.self_weight(k) > 0.0) {
            return Err(NetworkError::NoSelfLoop);
        }
        let perron = perron_vector(&matrix)?;
        let alpha = alpha_constant(&matrix, &perron)?;
        let lemma4_weight_sum = lemma4_weight_sum(&matrix, &perron)?;
        Ok(Self {
            matrix,
            adjacency,
            perron,
            alpha,
            lemma4_weight_sum,
        })
    }

    /// Averaging rule: `a_kk = λ`, `a_ℓk = (1-λ)/(n_k-1)` for the other
    /// members of `N_k`.
    pub fn averaging(adjacency: &Adjacency, lambda: f64) -> Result<Self, NetworkError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(NetworkError::InvalidLambda(lambda));
        }
        let n = adjacency.len();
        if n == 0 {
            return Err(NetworkError::BadShape);
        }
        let mut matrix = CombinationMatrix {
            n,
            data: vec![0.0; n * n],
        };
        for k in 0..n {
            if !adjacency.has_edge(k, k) {
                return Err(NetworkError::MissingSelfLoop { agent: k });
            }
            let degree = adjacency.neighbourhood_size(k);
            if degree == 1 {
                if lambda < 1.0 {
                    return Err(NetworkError::DegenerateDegree { agent: k, lambda });
                }
                matrix.set(k, k, 1.0);
                continue;
            }
            let share = (1.0 - lambda) / (degree - 1) as f64;
            for l in 0..n {
                if l == k {
                    matrix.set(l, k, lambda);
                } else if adjacency.has_edge(l, k) {
                    matrix.set(l, k, share);
                }
            }
        }
        let components = adjacency.scc_count();
        if components != 1 {
            return Err(NetworkError::NotStronglyConnected { components });
        }
        Self::with_adjacency(matrix, adjacency.clone())
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &CombinationMatrix {
        &self.matrix
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// `a_ℓk`.
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.matrix.get(from, to)
    }

    pub fn perron(&self) -> &[f64] {
        &self.perron
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lemma4_weight_sum(&self) -> f64 {
        self.lemma4_weight_sum
    }

    /// Re-runs the stochasticity and connectivity checks.
    pub fn revalidate(&self) -> Result<(), NetworkError> {
        self.matrix.validate_left_stochastic()?;
        let components = self.matrix.support().scc_count();
        if components != 1 {
            return Err(NetworkError::NotStronglyConnected { components });
        }
        Ok(())
    }

    pub fn summary(&self) -> NetworkSummary {
        let scc_count = self.matrix.support().scc_count();
        NetworkSummary {
            agents: self.len(),
            strongly_connected: scc_count == 1,
            scc_count,
            perron: self.perron.clone(),
            alpha: self.alpha,
            lemma4_weight_sum: self.lemma4_weight_sum,
            self_weights: (0..self.len()).map(|k| self.matrix.self_weight(k)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_by_two() -> CombinationMatrix {
        CombinationMatrix::from_rows(&[vec![0.8, 0.3], vec![0.2, 0.7]]).unwrap()
    }

    #[test]
    fn two_node_averaging() {
        let net = Network::averaging(&Adjacency::complete(2), 0.5).unwrap();
        assert_eq!(net.matrix().to_rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        for v in net.perron() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_three_is_doubly_stochastic() {
        let net = Network::averaging(&Adjacency::complete(3), 0.5).unwrap();
        for l in 0..3 {
            for k in 0..3 {
                let expected = if l == k { 0.5 } else { 0.25 };
                assert_eq!(net.weight(l, k), expected);
            }
            assert!((net.perron()[l] - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((net.alpha() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hand_computed_constants() {
        let net = Network::from_matrix(two_by_two()).unwrap();
        assert!((net.perron()[0] - 0.6).abs() < 1e-12);
        assert!((net.perron()[1] - 0.4).abs() < 1e-12);
        // 0.6·(0.2/0.3) + 0.4·(0.3/0.2)
        assert!((net.alpha() - 1.0).abs() < 1e-10);
        // 0.6·(0.2·0.7/0.3) + 0.4·(0.3·0.8/0.2)
        assert!((net.lemma4_weight_sum() - 0.76).abs() < 1e-10);
    }

    #[test]
    fn single_agent() {
        let net = Network::averaging(&Adjacency::complete(1), 1.0).unwrap();
        assert_eq!(net.perron(), &[1.0]);
        assert_eq!(net.alpha(), 0.0);
        assert_eq!(net.lemma4_weight_sum(), 0.0);
        assert!(matches!(
            Network::averaging(&Adjacency::complete(1), 0.5),
            Err(NetworkError::DegenerateDegree { agent: 0, .. })
        ));
    }

    #[test]
    fn averaging_weight_sum_is_lambda() {
        for lambda in [0.03, 0.5, 0.9, 0.99] {
            let net = Network::averaging(&Adjacency::ring(10), lambda).unwrap();
            assert!((net.lemma4_weight_sum() - lambda).abs() < 1e-9);
            assert!((net.alpha() - 1.0).abs() < 1e-9);
        }
        let tiny = Network::averaging(&Adjacency::ring(6), 1e-9).unwrap();
        assert!(tiny.lemma4_weight_sum() < 1e-8);
    }

    #[test]
    fn rejects_disconnected_and_non_stochastic() {
        let mut adj = Adjacency::empty(3);
        for k in 0..3 {
            adj.set(k, k, true);
        }
        adj.set(0, 1, true);
        adj.set(1, 0, true);
        adj.set(1, 2, true);
        assert!(matches!(
            Network::averaging(&adj, 0.5),
            Err(NetworkError::NotStronglyConnected { .. })
        ));
        let bad = CombinationMatrix::from_rows(&[vec![0.5, 0.5], vec![0.4, 0.5]]).unwrap();
        assert!(matches!(
            Network::from_matrix(bad),
            Err(NetworkError::NotLeftStochastic { column: 0, .. })
        ));
        let neg = CombinationMatrix::from_rows(&[vec![1.5, 0.5], vec![-0.5, 0.5]]).unwrap();
        assert!(matches!(
            Network::from_matrix(neg),
            Err(NetworkError::InvalidEntry { .. })
        ));
    }

    #[test]
    fn periodic_matrix_without_self_loop_is_rejected() {
        let swap = CombinationMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(Network::from_matrix(swap), Err(NetworkError::NoSelfLoop));
    }

    #[test]
    fn division_degeneracy_detected() {
        // Agent 0 is stubborn while agent 1 listens to it.
        let m = CombinationMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 0.5]]).unwrap();
        let v = vec![1.0, 0.0];
        assert!(matches!(
            alpha_constant(&m, &v),
            Err(NetworkError::DivisionDegeneracy { agent: 0, listener: 1 })
        ));
    }

    #[test]
    fn averaging_requires_self_loops() {
        let mut adj = Adjacency::complete(3);
        adj.set(1, 1, false);
        assert_eq!(
            Network::averaging(&adj, 0.5),
            Err(NetworkError::MissingSelfLoop { agent: 1 })
        );
        assert_eq!(
            Network::averaging(&Adjacency::ring(3), 0.0),
            Err(NetworkError::InvalidLambda(0.0))
        );
    }

    #[test]
    fn generator_is_deterministic_and_connected() {
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Adjacency::random_strongly_connected(10, 0.3, &mut rng).unwrap()
        };
        let a = gen(42);
        assert_eq!(a, gen(42));
        assert_eq!(a.scc_count(), 1);
        assert!((0..10).all(|k| a.has_edge(k, k)));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let single = Adjacency::random_strongly_connected(1, 0.5, &mut rng).unwrap();
        assert!(single.has_edge(0, 0));
    }

    #[test]
    fn generator_gives_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            Adjacency::random_strongly_connected(30, 1e-6, &mut rng),
            Err(NetworkError::GenerationFailed {
                attempts: MAX_GENERATION_ATTEMPTS
            })
        );
    }

    #[test]
    fn presets_have_expected_degrees() {
        let ring = Adjacency::ring(10);
        assert!((0..10).all(|k| ring.neighbourhood_size(k) == 3));
        let star = Adjacency::star(5);
        assert_eq!(star.neighbourhood_size(0), 5);
        assert_eq!(star.neighbourhood_size(3), 2);
        assert_eq!(star.scc_count(), 1);
    }
}
