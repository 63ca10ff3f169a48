use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The five ways of grouping electron (`x`), photon (`y`) and the fixed
/// center (`0`) into clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusterId {
    /// `(xy0)`: everything bound together.
    Bound,
    /// `(y)(x0)`: electron bound to the center, photon free.
    PhotonFree,
    /// `(x)(y0)`: photon bound to the center, electron free.
    ElectronFree,
    /// `(xy)(0)`: electron-photon pair away from the center.
    Pair,
    /// `(x)(y)(0)`: three free clusters.
    Free,
}

impl ClusterId {
    pub const ALL: [ClusterId; 5] = [
        ClusterId::Bound,
        ClusterId::PhotonFree,
        ClusterId::ElectronFree,
        ClusterId::Pair,
        ClusterId::Free,
    ];

    pub const TWO_CLUSTER: [ClusterId; 3] = [
        ClusterId::PhotonFree,
        ClusterId::ElectronFree,
        ClusterId::Pair,
    ];

    /// Number of clusters `#(a)`.
    pub fn n_clusters(self) -> usize {
        match self {
            ClusterId::Bound => 1,
            ClusterId::PhotonFree | ClusterId::ElectronFree | ClusterId::Pair => 2,
            ClusterId::Free => 3,
        }
    }

    pub fn is_two_cluster(self) -> bool {
        self.n_clusters() == 2
    }

    pub fn ensure_two_cluster(self) -> Result<()> {
        if self.is_two_cluster() {
            Ok(())
        } else {
            Err(Error::NotTwoCluster(self))
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ClusterId::Bound => "(xy0)",
            ClusterId::PhotonFree => "(y)(x0)",
            ClusterId::ElectronFree => "(x)(y0)",
            ClusterId::Pair => "(xy)(0)",
            ClusterId::Free => "(x)(y)(0)",
        }
    }

    /// Filesystem-safe tag.
    pub fn slug(self) -> &'static str {
        match self {
            ClusterId::Bound => "xy0",
            ClusterId::PhotonFree => "y_x0",
            ClusterId::ElectronFree => "x_y0",
            ClusterId::Pair => "xy_0",
            ClusterId::Free => "x_y_0",
        }
    }
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClusterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        ClusterId::ALL
            .into_iter()
            .find(|c| c.label() == t || c.slug() == t)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown cluster `{s}`")))
    }
}

/// External and internal chart coordinates of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub external: Vec<f64>,
    pub internal: Vec<f64>,
}

/// Split `(x, y)` into the cluster's external coordinate `x_a` and internal
/// coordinate `x^a`.
pub fn cluster_coordinates(a: ClusterId, point: [f64; 2]) -> ChartPoint {
    let [x, y] = point;
    let (external, internal) = match a {
        ClusterId::PhotonFree => (vec![y], vec![x]),
        ClusterId::ElectronFree => (vec![x], vec![y]),
        ClusterId::Pair => (vec![x + y], vec![x - y]),
        ClusterId::Bound => (vec![], vec![x, y]),
        ClusterId::Free => (vec![x, y], vec![]),
    };
    ChartPoint { external, internal }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_rows() {
        let p = cluster_coordinates(ClusterId::Pair, [1.0, 0.5]);
        assert_eq!(p.external, vec![1.5]);
        assert_eq!(p.internal, vec![0.5]);
        let p = cluster_coordinates(ClusterId::PhotonFree, [1.0, 0.5]);
        assert_eq!(p.external, vec![0.5]);
        assert_eq!(p.internal, vec![1.0]);
        let p = cluster_coordinates(ClusterId::Free, [0.3, -2.0]);
        assert_eq!(p.external, vec![0.3, -2.0]);
        assert!(p.internal.is_empty());
    }

    #[test]
    fn cluster_counts_and_parsing() {
        let counts: Vec<usize> = ClusterId::ALL.iter().map(|c| c.n_clusters()).collect();
        assert_eq!(counts, vec![1, 2, 2, 2, 3]);
        for c in ClusterId::ALL {
            assert_eq!(c.label().parse::<ClusterId>().unwrap(), c);
            assert_eq!(c.slug().parse::<ClusterId>().unwrap(), c);
        }
        assert!("(x)(y)".parse::<ClusterId>().is_err());
    }
}
