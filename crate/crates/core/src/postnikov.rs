//! Postnikov towers over `BΓ` assembled from homotopy groups, `π₁`-actions
//! and k-invariants.
//!
//! Stage `X(n)` is the pullback of `X(n-1) → Eπ₁ ×_{π₁} W̄K(π_n, n)` along
//! `Eπ₁ ×_{π₁} WK(π_n, n) → Eπ₁ ×_{π₁} W̄K(π_n, n)`.

use serde::Serialize;

use crate::classifying::{
    borel, em_automorphism, em_space, nerve, nerve_map, w_and_wbar, Borel, SimplicialAction, WConstruction,
};
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupHom};
use crate::simplicial::{
    is_fibration, pullback, FibrationReport, LabeledSet, SimplicialMap, TruncatedSimplicialSet, UnionFind,
};

/// A stage of the tower together with its map to `Bπ₁`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub degree: usize,
    pub space: TruncatedSimplicialSet,
    pub to_pi1: SimplicialMap,
}

#[derive(Clone, Debug)]
pub enum KInvariant {
    /// The map `x ↦ (p(x), *)` through the basepoint section.
    Trivial,
    /// An explicit map into the Borel construction of `W̄K(π_n, n)`, indexed
    /// as produced by [`kinvariant_target`].
    Map(SimplicialMap),
}

/// Input for one stage above the base.
#[derive(Clone, Debug)]
pub struct PostnikovStage {
    pub n: usize,
    pub pi_n: FiniteGroup,
    /// `action[g]` is the automorphism of `pi_n` by which `g ∈ π₁` acts.
    pub action: Vec<Vec<Elem>>,
    pub k_invariant: KInvariant,
}

impl PostnikovStage {
    pub fn trivial_action(n: usize, pi1: &FiniteGroup, pi_n: FiniteGroup) -> Self {
        let id: Vec<Elem> = pi_n.elements().collect();
        PostnikovStage { n, action: vec![id; pi1.order()], pi_n, k_invariant: KInvariant::Trivial }
    }

    /// Checks that `action` is a homomorphism `π₁ → Aut(π_n)`.
    pub fn check_action(&self, pi1: &FiniteGroup) -> Result<()> {
        let a = &self.pi_n;
        if self.action.len() != pi1.order() {
            return Err(Error::ActionInvalid(format!("{} automorphisms for {} elements", self.action.len(), pi1.order())));
        }
        for (g, phi) in self.action.iter().enumerate() {
            GroupHom::new(a.clone(), a.clone(), phi.clone())
                .ok()
                .filter(GroupHom::is_injective)
                .ok_or_else(|| Error::ActionInvalid(format!("element {g} does not act by an automorphism")))?;
        }
        if self.action[pi1.identity()].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(Error::ActionInvalid("identity acts nontrivially".into()));
        }
        for g in pi1.elements() {
            for h in pi1.elements() {
                let gh = pi1.mul(g, h);
                if let Some(x) = a.elements().find(|&x| self.action[g][self.action[h][x]] != self.action[gh][x]) {
                    return Err(Error::ActionInvalid(format!("action law fails for ({g}, {h}) at {x}")));
                }
            }
        }
        Ok(())
    }
}

/// The square's right column for one stage: `Eπ₁ ×_{π₁} WK → Eπ₁ ×_{π₁} W̄K`.
#[derive(Clone, Debug)]
pub struct KInvariantTarget {
    pub w: WConstruction,
    pub total: Borel,
    pub base: Borel,
    pub q: SimplicialMap,
}

/// Builds the Borel constructions of `WK(π_n, n)` and `W̄K(π_n, n)` for the
/// given `π₁`-action.
pub fn kinvariant_target(pi1: &FiniteGroup, data: &PostnikovStage, trunc_dim: usize) -> Result<KInvariantTarget> {
    data.check_action(pi1)?;
    let k = em_space(&data.pi_n, data.n, trunc_dim)?;
    let w = w_and_wbar(&k)?;
    let autos: Vec<Vec<Vec<usize>>> =
        data.action.iter().map(|phi| em_automorphism(&data.pi_n, data.n, trunc_dim, phi)).collect();
    let coordinatewise = |set: &LabeledSet<Vec<Elem>>, shift: usize| -> Result<SimplicialAction> {
        let unpointed = set.set.clone().with_basepoint(None);
        let maps = autos
            .iter()
            .map(|auto| {
                SimplicialMap::from_fn(&unpointed, &unpointed, |m, x| {
                    let label = set.label(m, x);
                    let top = m + 1 - shift;
                    let mapped: Vec<Elem> = label.iter().enumerate().map(|(p, &c)| auto[top - 1 - p][c]).collect();
                    set.index_of(m, &mapped).expect("automorphisms preserve coordinates")
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SimplicialAction::new(pi1.clone(), &set.set, maps)
    };
    let total = borel(&w.w.set, &coordinatewise(&w.w, 0)?)?;
    let base = borel(&w.wbar.set, &coordinatewise(&w.wbar, 1)?)?;
    let q = SimplicialMap::from_levels_unchecked(
        (0..=trunc_dim)
            .map(|m| {
                let (wm, bm) = (w.w.set.count(m), w.wbar.set.count(m));
                (0..total.space.count(m)).map(|x| (x / wm) * bm + w.q.apply(m, x % wm)).collect()
            })
            .collect(),
    );
    q.check(&total.space.clone().with_basepoint(None), &base.space.clone().with_basepoint(None))?;
    Ok(KInvariantTarget { w, total, base, q })
}

/// A Postnikov tower over `BΓ`, built from `X(1) = Bπ₁`.
#[derive(Clone, Debug)]
pub struct PostnikovTower {
    pi1: FiniteGroup,
    gamma: GroupHom,
    trunc_dim: usize,
    stages: Vec<Stage>,
    bondings: Vec<SimplicialMap>,
}

/// `X(1) = Bπ₁` over `BΓ` via a surjection `π₁ → Γ`.
pub fn base_stage(pi1: &FiniteGroup, gamma: &GroupHom, trunc_dim: usize) -> Result<PostnikovTower> {
    if gamma.source() != pi1 {
        return Err(Error::MismatchedSource("the map to Γ does not start at π₁".into()));
    }
    if let Some(w) = gamma.surjectivity_witness() {
        return Err(Error::NotSurjective(w));
    }
    let space = nerve(pi1, trunc_dim)?;
    let to_pi1 = SimplicialMap::identity(&space);
    Ok(PostnikovTower {
        pi1: pi1.clone(),
        gamma: gamma.clone(),
        trunc_dim,
        stages: vec![Stage { degree: 1, space, to_pi1 }],
        bondings: Vec::new(),
    })
}

impl PostnikovTower {
    pub fn pi1(&self) -> &FiniteGroup {
        &self.pi1
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn top(&self) -> &Stage {
        self.stages.last().expect("towers have a base stage")
    }

    pub fn bondings(&self) -> &[SimplicialMap] {
        &self.bondings
    }

    pub fn trunc_dim(&self) -> usize {
        self.trunc_dim
    }

    /// The structure map of stage `i` to `BΓ`.
    pub fn to_gamma(&self, i: usize) -> Result<SimplicialMap> {
        Ok(nerve_map(&self.gamma, self.trunc_dim)?.compose(&self.stages[i].to_pi1))
    }

    /// Appends the pullback stage for `data`.
    pub fn next_stage(&mut self, data: &PostnikovStage) -> Result<&Stage> {
        let prev = self.top().clone();
        if data.n != prev.degree + 1 {
            return Err(Error::MismatchedSource(format!("stage of degree {} after degree {}", data.n, prev.degree)));
        }
        if self.trunc_dim < data.n + 1 {
            return Err(Error::DimensionBudget { have: self.trunc_dim, need: data.n + 1 });
        }
        let target = kinvariant_target(&self.pi1, data, self.trunc_dim)?;
        let k = match &data.k_invariant {
            KInvariant::Trivial => {
                let wbar = &target.w.wbar.set;
                SimplicialMap::from_levels_unchecked(
                    (0..=self.trunc_dim)
                        .map(|m| {
                            let star = wbar.degenerate_vertex(0, m);
                            (0..prev.space.count(m)).map(|x| prev.to_pi1.apply(m, x) * wbar.count(m) + star).collect()
                        })
                        .collect(),
                )
            }
            KInvariant::Map(f) => f.clone(),
        };
        k.check(&prev.space.clone().with_basepoint(None), &target.base.space.clone().with_basepoint(None))
            .map_err(|e| Error::MismatchedSource(format!("k-invariant is not a map from the previous stage: {e}")))?;
        if target.base.projection.compose(&k) != prev.to_pi1 {
            return Err(Error::MismatchedSource("k-invariant does not commute with the projections to Bπ₁".into()));
        }
        let pb = pullback(&prev.space, &k, &target.total.space, &target.q)?;
        let to_pi1 = prev.to_pi1.compose(&pb.to_left);
        self.stages.push(Stage { degree: data.n, space: pb.space.set, to_pi1 });
        self.bondings.push(pb.to_left);
        Ok(self.top())
    }

    /// Horn-filling reports for every bonding map, up to the truncation.
    pub fn bonding_fibrations(&self) -> Result<Vec<FibrationReport>> {
        (1..self.stages.len())
            .map(|i| is_fibration(&self.stages[i].space, &self.stages[i - 1].space, &self.bondings[i - 1], self.trunc_dim))
            .collect()
    }

    /// Whether each bonding map is a bijection in dimensions below the
    /// stage's degree.
    pub fn stages_agree_below_degree(&self) -> bool {
        (1..self.stages.len()).all(|i| {
            let n = self.stages[i].degree;
            let b = &self.bondings[i - 1];
            (0..n.min(self.trunc_dim + 1)).all(|m| {
                let below = self.stages[i - 1].space.count(m);
                let mut seen = vec![false; below];
                b.levels()[m].len() == below && b.levels()[m].iter().all(|&y| !std::mem::replace(&mut seen[y], true))
            })
        })
    }

    /// Stages and bondings as a plain tower of spaces.
    pub fn as_tower(&self) -> TowerOfSpaces {
        TowerOfSpaces {
            stages: self.stages.iter().map(|s| s.space.clone()).collect(),
            bondings: self.bondings.clone(),
        }
    }
}

/// `X(1) ← X(2) ← …` with `bondings[i]: X(i+2) → X(i+1)`.
#[derive(Clone, Debug)]
pub struct TowerOfSpaces {
    pub stages: Vec<TruncatedSimplicialSet>,
    pub bondings: Vec<SimplicialMap>,
}

impl TowerOfSpaces {
    pub fn new(stages: Vec<TruncatedSimplicialSet>, bondings: Vec<SimplicialMap>) -> Result<Self> {
        if stages.is_empty() || bondings.len() + 1 != stages.len() {
            return Err(Error::Malformed("a tower of n stages needs n-1 bonding maps".into()));
        }
        for (i, b) in bondings.iter().enumerate() {
            b.check(&stages[i + 1], &stages[i])?;
        }
        Ok(TowerOfSpaces { stages, bondings })
    }

    pub fn truncate(&self, n: usize) -> Result<Self> {
        let stages = self.stages.iter().map(|s| s.truncate(n)).collect::<Result<Vec<_>>>()?;
        let bondings = self
            .bondings
            .iter()
            .map(|b| SimplicialMap::from_levels_unchecked(b.levels()[..=n].to_vec()))
            .collect();
        Ok(TowerOfSpaces { stages, bondings })
    }
}

/// The level-wise limit: compatible tuples `(x_1, …, x_k)` with
/// `bonding(x_{i+1}) = x_i`.
pub fn tower_limit(tower: &TowerOfSpaces) -> Result<LabeledSet<Vec<usize>>> {
    let top = tower.stages.last().expect("nonempty");
    let n = top.trunc_dim();
    let below = |m: usize, x: usize| -> Vec<usize> {
        let mut tuple = vec![x];
        for b in tower.bondings.iter().rev() {
            let next = b.apply(m, tuple[0]);
            tuple.insert(0, next);
        }
        tuple
    };
    // Every compatible tuple is determined by its last entry.
    let levels: Vec<Vec<Vec<usize>>> = (0..=n).map(|m| (0..top.count(m)).map(|x| below(m, x)).collect()).collect();
    let k = tower.stages.len();
    let basepoint = top.basepoint().map(|b| below(0, b));
    TruncatedSimplicialSet::from_labeled(
        levels,
        |m, i, t| (0..k).map(|s| tower.stages[s].face(m, i, t[s])).collect(),
        |m, j, t| (0..k).map(|s| tower.stages[s].degen(m, j, t[s])).collect(),
        basepoint,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeCheck {
    pub degree: usize,
    pub expected: usize,
    pub computed: Option<usize>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub degrees: Vec<DegreeCheck>,
}

impl HomotopyReport {
    pub fn all_verifiable_pass(&self) -> bool {
        self.degrees.iter().all(|d| d.verdict != Verdict::Fail)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.degrees.iter().find(|d| d.verdict == Verdict::Fail).map(|d| d.degree)
    }
}

/// The order of `π_n(X, *)`: spherical `n`-simplices modulo the relation
/// `x ~ y` whenever some `(n+1)`-simplex `z` has `d_i z = *` for `i < n`,
/// `d_n z = x` and `d_{n+1} z = y`. Needs `n < trunc_dim`.
pub fn homotopy_group_order(x: &TruncatedSimplicialSet, n: usize) -> Option<usize> {
    if n == 0 || n >= x.trunc_dim() {
        return None;
    }
    let base = x.basepoint().unwrap_or(0);
    let star = |m: usize| x.degenerate_vertex(base, m);
    let spheres: Vec<usize> = (0..x.count(n)).filter(|&s| (0..=n).all(|i| x.face(n, i, s) == star(n - 1))).collect();
    let position: std::collections::HashMap<usize, usize> = spheres.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut uf = UnionFind::new(spheres.len());
    for z in 0..x.count(n + 1) {
        if (0..n).all(|i| x.face(n + 1, i, z) == star(n)) {
            if let (Some(&a), Some(&b)) = (position.get(&x.face(n + 1, n, z)), position.get(&x.face(n + 1, n + 1, z))) {
                uf.union(a, b);
            }
        }
    }
    Some(uf.classes().len())
}

/// Compares `|π_n|` at the basepoint of `x` with `expected[n-1]` for each
/// listed degree. Degrees at or above the truncation are `Unknown`.
pub fn verify_homotopy_groups(x: &TruncatedSimplicialSet, expected: &[usize]) -> HomotopyReport {
    let degrees = expected
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let degree = i + 1;
            let computed = homotopy_group_order(x, degree);
            let verdict = match computed {
                None => Verdict::Unknown,
                Some(c) if c == e => Verdict::Pass,
                Some(_) => Verdict::Fail,
            };
            DegreeCheck { degree, expected: e, computed, verdict }
        })
        .collect();
    HomotopyReport { degrees }
}

/// One two-stage tower with trivial k-invariant.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub name: &'static str,
    pub pi1: FiniteGroup,
    pub gamma: GroupHom,
    pub pi2: FiniteGroup,
    pub action: Vec<Vec<Elem>>,
}

impl TowerSpec {
    pub fn assemble(&self, trunc_dim: usize) -> Result<PostnikovTower> {
        let mut tower = base_stage(&self.pi1, &self.gamma, trunc_dim)?;
        tower.next_stage(&PostnikovStage {
            n: 2,
            pi_n: self.pi2.clone(),
            action: self.action.clone(),
            k_invariant: KInvariant::Trivial,
        })?;
        Ok(tower)
    }
}

/// Two-stage towers with trivial and nontrivial `π₁`-actions.
pub fn two_stage_corpus() -> Vec<TowerSpec> {
    use crate::catalog::{permutation_sign, power_map, symmetric};
    let z = FiniteGroup::cyclic;
    let trivial_action = |pi1: &FiniteGroup, a: &FiniteGroup| vec![a.elements().collect::<Vec<_>>(); pi1.order()];
    let by_sign = |pi1: &FiniteGroup, sign: &dyn Fn(Elem) -> usize, a: &FiniteGroup, flip: Vec<Elem>| {
        pi1.elements().map(|g| if sign(g) == 0 { a.elements().collect() } else { flip.clone() }).collect::<Vec<_>>()
    };
    let mut out = Vec::new();
    let z2 = z(2);
    out.push(TowerSpec {
        name: "Z2 with Z2, trivial action",
        gamma: GroupHom::identity(&z2),
        action: trivial_action(&z2, &z2),
        pi1: z2.clone(),
        pi2: z2.clone(),
    });
    out.push(TowerSpec {
        name: "Z2 with Z3, inversion",
        gamma: GroupHom::identity(&z2),
        action: by_sign(&z2, &|g| g, &z(3), power_map(&z(3), 2)),
        pi1: z2.clone(),
        pi2: z(3),
    });
    let s3 = symmetric(3);
    let sign = GroupHom::from_fn(&s3.group, &z2, |g| permutation_sign(&s3.labels[g])).expect("sign is a homomorphism");
    out.push(TowerSpec {
        name: "S3 over Z2 with Z3, sign inversion",
        action: by_sign(&s3.group, &|g| sign.apply(g), &z(3), power_map(&z(3), 2)),
        gamma: sign.clone(),
        pi1: s3.group.clone(),
        pi2: z(3),
    });
    let z4 = z(4);
    out.push(TowerSpec {
        name: "Z4 over Z2 with Z2, trivial action",
        gamma: GroupHom::from_fn(&z4, &z2, |g| g % 2).expect("reduction"),
        action: trivial_action(&z4, &z2),
        pi1: z4.clone(),
        pi2: z2.clone(),
    });
    let v4 = z2.direct_product(&z2);
    let z3 = z(3);
    // Rotation of the three involutions of V4 = {0, (0,1), (1,0), (1,1)}.
    let rot: Vec<Elem> = vec![0, 2, 3, 1];
    out.push(TowerSpec {
        name: "Z3 with V4, rotation",
        gamma: GroupHom::identity(&z3),
        action: z3.elements().map(|g| (0..4).map(|x| (0..g).fold(x, |y, _| rot[y])).collect()).collect(),
        pi1: z3.clone(),
        pi2: v4,
    });
    out.push(TowerSpec {
        name: "Z2 with Z4, inversion",
        gamma: GroupHom::identity(&z2),
        action: by_sign(&z2, &|g| g, &z4, power_map(&z4, 3)),
        pi1: z2.clone(),
        pi2: z4.clone(),
    });
    let one = FiniteGroup::trivial();
    out.push(TowerSpec {
        name: "trivial with Z2",
        gamma: GroupHom::identity(&one),
        action: trivial_action(&one, &z2),
        pi1: one,
        pi2: z2,
    });
    out
}
