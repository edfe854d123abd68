//! Rational points, Galois-fixed points of the Čech type and homotopy fixed
//! points of a zero-dimensional scheme, and the maps
//! `X(k) → π₀(fixed) → π₀(hfp)` between them, level by level.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::Result;
use crate::etale::{cech_nerve, rational_point_section, rational_points_surjection, structure_map, GSetScheme, RigidCovering};
use crate::sections::{eta_pi0, pi0_map_over_bg};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub galois_order: usize,
    pub nerve_counts: Vec<usize>,
    pub fixed_vertices: Vec<usize>,
    pub fixed_components: Vec<Vec<usize>>,
    /// Component of each rational point.
    pub rational_to_fixed: Vec<usize>,
    pub rational_to_fixed_surjective: bool,
    /// `None` when the model over `BΓ` could not be searched.
    pub hfp_classes: Option<usize>,
    pub hfp_error: Option<String>,
    /// Homotopy class of each fixed component.
    pub eta: Vec<usize>,
    pub eta_surjective: Option<bool>,
    pub eta_injective: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub tool_version: &'static str,
    pub schema_version: u32,
    pub scheme: String,
    pub trunc_dim: usize,
    pub depth: usize,
    pub points: usize,
    pub rational_points: Vec<usize>,
    pub levels: Vec<LevelReport>,
    /// `PASS` when `X(k) → π₀(fixed)` is surjective at every level.
    pub verdict: &'static str,
}

/// Runs the pipeline for tower levels `0..depth`. The Galois-fixed points
/// are taken on the nerve of `X` over the top field; the homotopy fixed
/// points are maps `BΓ_ℓ → N_ℓ` over `BΓ_ℓ`, where `N_ℓ` is the Čech nerve
/// over `k` of the canonical cover at level `ℓ`.
pub fn run_pipeline(name: &str, scheme: &GSetScheme, depth: Option<usize>, trunc_dim: usize) -> Result<PipelineReport> {
    let tower = scheme.tower();
    let depth = depth.unwrap_or(tower.depth()).clamp(1, tower.depth());
    let top = tower.depth() - 1;
    let rational = scheme.rational_points().to_vec();
    let over_top = scheme.base_change(top)?;
    let mut levels = Vec::with_capacity(depth);
    for level in 0..depth {
        let bar = cech_nerve(&RigidCovering::canonical(&over_top, level)?, trunc_dim)?;
        let fixed = rational_points_surjection(scheme, &bar)?;
        let n = cech_nerve(&RigidCovering::canonical(scheme, level)?, trunc_dim)?;
        let p = structure_map(&n, level)?;
        let gamma = tower.level(level);
        let (hfp_classes, hfp_error, eta, eta_surjective, eta_injective) =
            match pi0_map_over_bg(gamma, &n.set().clone().with_basepoint(None), &p) {
                Ok(classes) => {
                    let mut assignment = HashMap::new();
                    for &x in &fixed.fixed_vertices {
                        let s = rational_point_section(&n, level, x)?;
                        let c = classes.class_of(&s).expect("sections over BΓ are enumerated");
                        assignment.insert(x, c);
                    }
                    let r = eta_pi0(&fixed.fixed_components, classes.class_count(), &assignment)?;
                    (Some(r.hfp_classes), None, r.images, Some(r.surjective), Some(r.injective))
                }
                Err(e) => (None, Some(e.to_string()), Vec::new(), None, None),
            };
        levels.push(LevelReport {
            level,
            galois_order: gamma.order(),
            nerve_counts: n.set().counts().to_vec(),
            fixed_vertices: fixed.fixed_vertices,
            fixed_components: fixed.fixed_components,
            rational_to_fixed: fixed.images,
            rational_to_fixed_surjective: fixed.surjective,
            hfp_classes,
            hfp_error,
            eta,
            eta_surjective,
            eta_injective,
        });
    }
    let pass = levels.iter().all(|l| l.rational_to_fixed_surjective);
    Ok(PipelineReport {
        tool_version: TOOL_VERSION,
        schema_version: crate::workspace::SCHEMA_VERSION,
        scheme: name.to_string(),
        trunc_dim,
        depth,
        points: scheme.points(),
        rational_points: rational,
        levels,
        verdict: if pass { "PASS" } else { "FAIL" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, GroupHom, GroupTower};

    fn quadratic() -> GroupTower {
        let (one, z2) = (FiniteGroup::trivial(), FiniteGroup::cyclic(2));
        GroupTower::new(vec![one.clone(), z2.clone()], vec![GroupHom::trivial(&z2, &one)]).unwrap()
    }

    #[test]
    fn two_rational_points() {
        let r = run_pipeline("kk", &GSetScheme::split(&quadratic(), 2), None, 2).unwrap();
        let top = r.levels.last().unwrap();
        assert_eq!(r.rational_points.len(), 2);
        assert_eq!(top.fixed_components.len(), 2);
        assert_eq!(top.hfp_classes, Some(2));
        assert!(top.rational_to_fixed_surjective && top.eta_surjective == Some(true));
        assert_eq!(r.verdict, "PASS");
    }

    #[test]
    fn quadratic_field_has_no_points() {
        let r = run_pipeline("L", &GSetScheme::spec_field(&quadratic(), 1).unwrap(), None, 2).unwrap();
        assert!(r.rational_points.is_empty());
        assert_eq!(r.levels[0].hfp_classes, Some(1));
        assert_eq!(r.levels[0].eta_surjective, Some(false));
        assert_eq!(r.levels[1].hfp_classes, Some(0));
        assert_eq!(r.verdict, "PASS");
    }

    #[test]
    fn empty_scheme_is_vacuous() {
        let empty = GSetScheme::split(&quadratic(), 0);
        let r = run_pipeline("empty", &empty, None, 2).unwrap();
        assert!(r.levels.iter().all(|l| l.hfp_classes == Some(0) && l.fixed_components.is_empty()));
        assert_eq!(r.verdict, "PASS");
    }
}
