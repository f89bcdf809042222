//! The canonical point `c(mu)` of a measure and the sufficient/insufficient
//! depth classification.

use serde::{Deserialize, Serialize};

use crate::depth::{self, DepthRegion, WeightedPointCloud};
use crate::error::{domain, Error, Result};
use crate::rational::{self, Point, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Sufficient,
    Insufficient,
}

/// Label attached to every report: for atomic measures the deepest point is a
/// region, and `c` is that region's centroid.
pub const CENTER_CONVENTION: &str = "region-centroid";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterReport {
    #[serde(with = "rational::as_str")]
    pub depth_of_measure: Rational,
    #[serde(with = "rational::as_str")]
    pub threshold: Rational,
    pub classification: Classification,
    #[serde(with = "rational::vec_as_str")]
    pub c: Point,
    pub region: Option<DepthRegion>,
    pub convention: String,
}

fn check(cloud: &WeightedPointCloud, n: usize) -> Result<()> {
    if cloud.dim() != n {
        return Err(domain(format!("cloud has dimension {}, expected {n}", cloud.dim())));
    }
    if !(1..=2).contains(&n) {
        return Err(domain(format!("centers are exact only for n = 1 or 2, got {n}")));
    }
    Ok(())
}

/// Insufficient exactly when the maximal depth is strictly below the improved
/// threshold; equality counts as sufficient.
pub fn classify(cloud: &WeightedPointCloud, n: usize) -> Result<Classification> {
    check(cloud, n)?;
    let (_, improved) = depth::thresholds(n)?;
    let (level, _) = depth::max_depth_region(cloud)?;
    Ok(if level < improved { Classification::Insufficient } else { Classification::Sufficient })
}

/// `c(mu)`: centroid of the maximal-depth region when depth is insufficient,
/// centroid of the superlevel set at the improved threshold otherwise.
pub fn center_point(cloud: &WeightedPointCloud, n: usize) -> Result<CenterReport> {
    check(cloud, n)?;
    let (_, improved) = depth::thresholds(n)?;
    let (level, deepest) = depth::max_depth_region(cloud)?;
    let (classification, region) = if level < improved {
        (Classification::Insufficient, deepest)
    } else {
        (Classification::Sufficient, depth::depth_region(cloud, &improved)?)
    };
    let c = region.barycenter().ok_or_else(|| Error::Internal("empty region at an achieved level".into()))?;
    Ok(CenterReport {
        depth_of_measure: level,
        threshold: improved,
        classification,
        c,
        region: Some(region),
        convention: CENTER_CONVENTION.to_string(),
    })
}
