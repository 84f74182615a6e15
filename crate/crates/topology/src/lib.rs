//! Directed communication graphs and their Laplacians.
//!
//! Edge (i, j) means node j listens to node i: row j of L_s gets −1 in
//! column i and +1 on the diagonal. Node indices are 1-based at the API edge.

use matcore::Mat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("graph needs at least one node")]
    Empty,
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a node outside 1..={2}")]
    OutOfRange(usize, usize, usize),
    #[error("duplicate edge ({0}, {1}); edges are unweighted")]
    Duplicate(usize, usize),
    #[error("Laplacian is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("output dimension p must be at least 1")]
    ZeroBlock,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    // stored 0-based
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    /// `edges` use 1-based node labels.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(TopologyError::OutOfRange(i, j, n));
            }
            if i == j {
                return Err(TopologyError::SelfLoop(i));
            }
            let e = (i - 1, j - 1);
            if out.contains(&e) {
                return Err(TopologyError::Duplicate(i, j));
            }
            out.push(e);
        }
        Ok(Self { n, edges: out })
    }

    /// Edge (i,j) and (j,i) for every consecutive pair around 1..n.
    pub fn undirected_ring(n: usize) -> Result<Self, TopologyError> {
        let mut e = Vec::new();
        for i in 1..=n {
            let j = i % n + 1;
            if n > 1 && !(n == 2 && i == 2) {
                e.push((i, j));
                e.push((j, i));
            }
        }
        Self::new(n, &e)
    }

    pub fn directed_ring(n: usize) -> Result<Self, TopologyError> {
        let e: Vec<_> = if n > 1 {
            (1..=n).map(|i| (i, i % n + 1)).collect()
        } else {
            vec![]
        };
        Self::new(n, &e)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// 0-based edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// 1-based edge list, as it appears in scenario files.
    pub fn edges_one_based(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    fn reaches_all(&self, reverse: bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let (from, to) = if reverse { (b, a) } else { (a, b) };
                if from == v && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen.iter().all(|s| *s)
    }

    pub fn strongly_connected(&self) -> bool {
        self.reaches_all(false) && self.reaches_all(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianBundle {
    pub ls: Mat,
    /// L_s ⊗ I_p
    pub l: Mat,
    pub p: usize,
    pub strongly_connected: bool,
    pub balanced: bool,
}

pub fn laplacian(g: &Digraph) -> Mat {
    let mut ls = Mat::zeros(g.n, g.n);
    for &(i, j) in &g.edges {
        ls[(j, i)] -= 1.0;
        ls[(j, j)] += 1.0;
    }
    ls
}

pub fn is_balanced(ls: &Mat) -> bool {
    (0..ls.ncols()).all(|j| ls.column(j).sum().abs() <= 1e-12)
}

pub fn extend(ls: &Mat, p: usize) -> Result<Mat, TopologyError> {
    if p < 1 {
        return Err(TopologyError::ZeroBlock);
    }
    if !ls.is_square() {
        return Err(TopologyError::NotSquare(ls.nrows(), ls.ncols()));
    }
    Ok(matcore::kron(ls, &Mat::identity(p, p)))
}

pub fn build_laplacian(g: &Digraph, p: usize) -> Result<LaplacianBundle, TopologyError> {
    let ls = laplacian(g);
    let l = extend(&ls, p)?;
    Ok(LaplacianBundle {
        balanced: is_balanced(&ls),
        strongly_connected: g.strongly_connected(),
        ls,
        l,
        p,
    })
}

/// The five-node digraph used by all three case studies.
pub fn case_graph() -> Digraph {
    Digraph::new(5, &CASE_EDGES).expect("static graph is valid")
}

pub const CASE_EDGES: [(usize, usize); 6] = [(1, 2), (2, 3), (3, 4), (3, 5), (4, 1), (5, 4)];
