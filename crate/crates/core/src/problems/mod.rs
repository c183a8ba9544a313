//! The applications, each built as a [`FunctionFamily`](crate::FunctionFamily)
//! with a decoder. Vertices, men, women and agents are 0-based.

mod closure;
mod counting;
mod marriage;
mod paths;
mod subsidy;

pub use closure::transitive_closure_family;
pub use counting::count_greater_family;
pub use marriage::stable_marriage_family;
pub use paths::{
    bellman_ford_family, edge_relaxation_family, floyd_warshall_family, johnson_family, shortest_path_bound,
};
pub use subsidy::subsidy_family;

use crate::error::{Error, Result};

/// A directed graph with integer edge weights. Unweighted problems ignore
/// the weights; parallel edges are allowed and the lightest one counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, i64)>) -> Result<Self> {
        let g = Digraph { n, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Digraph::new(n, pairs.iter().map(|&(a, b)| (a, b, 1)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("a graph needs at least one vertex".into()));
        }
        if let Some(&(a, b, _)) = self.edges.iter().find(|&&(a, b, _)| a >= self.n || b >= self.n) {
            return Err(Error::InvalidInstance(format!(
                "edge ({a},{b}) leaves the {} vertices",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn require_non_negative(&self) -> Result<()> {
        match self.edges.iter().find(|e| e.2 < 0) {
            Some(&(a, b, w)) => Err(Error::InvalidInstance(format!(
                "edge ({a},{b}) has negative weight {w}"
            ))),
            None => Ok(()),
        }
    }

    /// Lightest weight per ordered pair, `None` when there is no edge.
    pub(crate) fn weight_matrix(&self) -> Vec<Vec<Option<i64>>> {
        let mut w = vec![vec![None; self.n]; self.n];
        for &(a, b, x) in &self.edges {
            let cell: &mut Option<i64> = &mut w[a][b];
            *cell = Some(cell.map_or(x, |y| y.min(x)));
        }
        w
    }
}

/// Strict preferences for `n` men and `n` women.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    /// `men_prefs[m][k]`: the woman man `m` ranks `k`-th.
    pub men_prefs: Vec<Vec<usize>>,
    /// `women_prefs[w][k]`: the man woman `w` ranks `k`-th.
    pub women_prefs: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    pub fn new(men_prefs: Vec<Vec<usize>>, women_prefs: Vec<Vec<usize>>) -> Result<Self> {
        let p = PreferenceProfile { men_prefs, women_prefs };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.men_prefs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.men_prefs.len();
        if n == 0 || self.women_prefs.len() != n {
            return Err(Error::InvalidInstance(format!(
                "need n >= 1 men and as many women, got {} and {}",
                n,
                self.women_prefs.len()
            )));
        }
        for (who, lists) in [("man", &self.men_prefs), ("woman", &self.women_prefs)] {
            for (i, list) in lists.iter().enumerate() {
                let mut seen = vec![false; n];
                let ok = list.len() == n && list.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true));
                if !ok {
                    return Err(Error::InvalidInstance(format!(
                        "{who} {i}: list is not a permutation of 0..{n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `rank[w][m]`: position of man `m` in woman `w`'s list; lower is better.
    pub fn rank(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut rank = vec![vec![0; n]; n];
        for (w, list) in self.women_prefs.iter().enumerate() {
            for (k, &m) in list.iter().enumerate() {
                rank[w][m] = k;
            }
        }
        rank
    }
}

/// One bundle per agent: `valuations[i][j]` is agent `i`'s value for the
/// bundle held by agent `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsidyInstance {
    pub valuations: Vec<Vec<u64>>,
}

impl SubsidyInstance {
    pub fn new(valuations: Vec<Vec<u64>>) -> Result<Self> {
        let inst = SubsidyInstance { valuations };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.valuations.len()
    }

    /// Largest valuation.
    pub fn delta(&self) -> u64 {
        self.valuations.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Payment cap `n * delta`.
    pub fn cap(&self) -> u64 {
        self.n() as u64 * self.delta()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || self.valuations.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance(
                "valuations must form a non-empty square matrix".into(),
            ));
        }
        Ok(())
    }

    /// True when the envy graph (edge `i -> j` of weight `v_i(X_j) - v_i(X_i)`)
    /// has no positive-weight cycle.
    pub fn is_envy_freeable(&self) -> bool {
        let n = self.n();
        let v = &self.valuations;
        let mut best: Vec<Vec<Option<i64>>> = (0..n)
            .map(|i| (0..n).map(|j| Some(v[i][j] as i64 - v[i][i] as i64)).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (best[i][k], best[k][j]) {
                        if best[i][j].is_none_or(|c| a + b > c) {
                            best[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        (0..n).all(|i| best[i][i].is_none_or(|c| c <= 0))
    }
}
