//! PageRank by power iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Digraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    /// Stop once the L1 change between iterations drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub residual: f64,
    pub converged: bool,
}

/// Power iteration over directed arcs. Each arc carries `1 / out-degree`
/// of its source's mass, so parallel arcs count with multiplicity; nodes
/// without out-arcs spread their mass uniformly.
pub fn pagerank(g: &Digraph, params: &PageRankParams) -> PageRank {
    let n = g.node_count();
    if n == 0 {
        return PageRank {
            scores: Vec::new(),
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let nf = n as f64;
    let d = params.damping;
    let out_deg: Vec<f64> = (0..n).map(|u| g.out_arcs(u).len() as f64).collect();
    let mut x = vec![1.0 / nf; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&u| out_deg[u] == 0.0).map(|u| x[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        let mut next: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|v| {
                let inflow: f64 = g
                    .in_arcs(v)
                    .iter()
                    .map(|&a| {
                        let u = g.arc(a).source;
                        x[u] / out_deg[u]
                    })
                    .sum();
                base + d * inflow
            })
            .collect();
        // Rounding drifts the total by a few ulps per step; pin it to 1.
        let total: f64 = next.iter().sum();
        for v in &mut next {
            *v /= total;
        }
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if residual < params.tol {
            break;
        }
    }
    PageRank {
        scores: x,
        iterations,
        converged: residual < params.tol,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_uniform() {
        let g = Digraph::from_arcs(2, [(0, 1, 1.0), (1, 0, 1.0)]);
        let pr = pagerank(&g, &PageRankParams::default());
        assert!(pr.converged);
        assert!((pr.scores[0] - 0.5).abs() < 1e-12 && (pr.scores[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn in_edges_dominate() {
        let g = Digraph::from_arcs(3, [(0, 2, 1.0), (1, 2, 1.0)]);
        let pr = pagerank(&g, &PageRankParams::default());
        assert!(pr.scores[2] > pr.scores[0] && pr.scores[2] > pr.scores[1]);
        assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_iter_exit_is_flagged() {
        let g = Digraph::from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (0, 2, 1.0)]);
        let pr = pagerank(
            &g,
            &PageRankParams {
                max_iter: 1,
                ..Default::default()
            },
        );
        assert_eq!(pr.iterations, 1);
        assert!(!pr.converged);
    }
}
