//! End-to-end analysis of one map.

use crate::dynamics::{compute_reach, compute_xf, is_sigma_like, partition_xf, Partition, Reach};
use crate::error::Error;
use crate::pamap::PAMap;
use crate::par;
use crate::rational::Rational;
use crate::rotset::{
    approximate_rotation_set, periodic_point, rationals_in, rotation_set, MarkovSystem, PeriodicPoint, RotConfig,
    RotationSet,
};
use crate::space::BranchSegment;

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub rot: RotConfig,
    /// Largest denominator of the rationals realized by periodic points.
    pub max_den: i64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            rot: RotConfig::default(),
            max_den: 6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Realized {
    pub rho: Rational,
    pub result: Result<PeriodicPoint, String>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub map: PAMap,
    pub reach: Reach,
    pub xf: Option<BranchSegment>,
    pub sigma_like: bool,
    pub partition: Option<Partition>,
    pub system: Option<MarkovSystem>,
    /// Why the exact Markov route was unavailable.
    pub issue: Option<String>,
    pub rotation: RotationSet,
    pub realized: Vec<Realized>,
}

impl Analysis {
    /// Every reported quantity is exact.
    pub fn exact(&self) -> bool {
        self.rotation.exact && self.system.is_some() && self.realized.iter().all(|r| r.result.is_ok())
    }
}

pub fn analyze(map: PAMap, cfg: &AnalysisConfig) -> Result<Analysis, Error> {
    let reach = compute_reach(&map, cfg.rot.reach_cap);
    let xf = compute_xf(&reach);
    let sigma_like = is_sigma_like(&map, &reach);
    let mut issue = None;
    let mut partition = None;
    let mut system = None;
    if reach.exact {
        match partition_xf(&map, &reach) {
            Ok(p) => partition = Some(p),
            Err(e) => issue = Some(e.to_string()),
        }
        if partition.is_some() {
            match MarkovSystem::build(map.clone(), cfg.rot.reach_cap) {
                Ok(s) => system = Some(s),
                Err(e) => issue = Some(e.to_string()),
            }
        }
    } else {
        issue = Some(Error::InexactReach { cap: cfg.rot.reach_cap }.to_string());
    }
    let rotation = match &system {
        Some(sys) => rotation_set(sys, &cfg.rot)?,
        None => approximate_rotation_set(&map, &reach, &cfg.rot),
    };
    let targets = rationals_in(&rotation.components, cfg.max_den);
    let realized = par::map(cfg.rot.exec, &targets, |r| Realized {
        rho: r.clone(),
        result: periodic_point(&map, system.as_ref(), &rotation.line, r).map_err(|e| e.to_string()),
    });
    Ok(Analysis {
        map,
        reach,
        xf,
        sigma_like,
        partition,
        system,
        issue,
        rotation,
        realized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sigma_example;

    #[test]
    fn fixture_analysis_is_exact() {
        let a = analyze(sigma_example(), &AnalysisConfig::default()).unwrap();
        assert!(a.exact());
        assert!(a.sigma_like);
        assert_eq!(a.realized.len(), 13);
        for r in &a.realized {
            let p = r.result.as_ref().unwrap();
            assert_eq!(a.map.iterate(&p.point, p.period), p.point.translate(p.shift));
        }
    }
}
