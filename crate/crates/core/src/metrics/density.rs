use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::store::SubgraphView;

/// `|E| / (|N| (|N| - 1))` over directed edges, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub nodes: u64,
    pub edges: u64,
    pub numerator: u64,
    pub denominator: u64,
    /// Parallel edges can push the ratio past 1; it is reported unclamped.
    pub exceeds_one: bool,
}

impl Density {
    pub fn from_counts(nodes: u64, edges: u64) -> Self {
        let ratio = if nodes < 2 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(edges, nodes * (nodes - 1))
        };
        Density {
            nodes,
            edges,
            numerator: *ratio.numer(),
            denominator: *ratio.denom(),
            exceeds_one: ratio > Ratio::from_integer(1),
        }
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

pub fn density(view: &SubgraphView<'_>) -> Density {
    Density::from_counts(view.node_count() as u64, view.edge_count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_cases() {
        assert_eq!(Density::from_counts(2, 1).ratio(), Ratio::new(1, 2));
        assert_eq!(Density::from_counts(3, 6).ratio(), Ratio::from_integer(1));
        assert_eq!(Density::from_counts(3, 2).ratio(), Ratio::new(1, 3));
        assert_eq!(Density::from_counts(1, 0).ratio(), Ratio::from_integer(0));
        let d = Density::from_counts(2, 3);
        assert!(d.exceeds_one);
        assert_eq!(d.value(), 1.5);
    }
}
