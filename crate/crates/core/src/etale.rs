//! Zero-dimensional schemes over `k` as finite Galois sets, their rigid
//! coverings and Čech nerves.
//!
//! A scheme is the set `X(k̄)` with an action of the top level `Γ` of a
//! Galois tower. Over a field `L_ℓ` of the tower the acting group shrinks
//! to `K_ℓ = ker(Γ → Γ_ℓ)`; over `k` it is all of `Γ`.
//!
//! A pointed connected cover of `x` is the orbit `K/S_x` marked at the
//! trivial coset, for a subgroup `S_x` of the stabilizer of `x`. A rigid
//! covering is one such subgroup per geometric point. The element `hS_x`
//! lies over `h·x`.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::classifying::{nerve, nerve_index};
use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupTower};
use crate::simplicial::{drop_at, pi0, repeat_at, LabeledSet, SimplicialMap, TruncatedSimplicialSet};

/// A finite set of geometric points with an action of the top tower level,
/// considered over `k` or over a field `L_ℓ` of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSetScheme {
    tower: GroupTower,
    action: Vec<Vec<usize>>,
    field_level: Option<usize>,
    acting: Vec<Elem>,
    rational: Vec<usize>,
}

impl GSetScheme {
    /// `action[g][p]` for every element `g` of the top level.
    pub fn new(tower: GroupTower, action: Vec<Vec<usize>>) -> Result<Self> {
        let top = tower.top();
        if action.len() != top.order() {
            return Err(Error::ActionInvalid(format!("expected {} action rows, got {}", top.order(), action.len())));
        }
        let n = action.first().map_or(0, Vec::len);
        for (g, row) in action.iter().enumerate() {
            if row.len() != n || row.iter().any(|&p| p >= n) {
                return Err(Error::ActionInvalid(format!("row {g} is not a map of the point set")));
            }
        }
        if action[top.identity()].iter().enumerate().any(|(p, &q)| p != q) {
            return Err(Error::ActionInvalid("identity acts nontrivially".into()));
        }
        for g in top.elements() {
            for h in top.elements() {
                let gh = top.mul(g, h);
                if let Some(p) = (0..n).find(|&p| action[g][action[h][p]] != action[gh][p]) {
                    return Err(Error::ActionInvalid(format!("action law fails for ({g}, {h}) at point {p}")));
                }
            }
        }
        let acting: Vec<Elem> = top.elements().collect();
        let mut scheme = GSetScheme { tower, action, field_level: None, acting, rational: Vec::new() };
        scheme.rational = scheme.fixed_points();
        Ok(scheme)
    }

    /// `Spec k`.
    pub fn spec_k(tower: &GroupTower) -> Self {
        let rows = vec![vec![0]; tower.top().order()];
        GSetScheme::new(tower.clone(), rows).expect("trivial action")
    }

    /// `n` rational points, `Spec(k × … × k)`.
    pub fn split(tower: &GroupTower, n: usize) -> Self {
        let rows = vec![(0..n).collect(); tower.top().order()];
        GSetScheme::new(tower.clone(), rows).expect("trivial action")
    }

    /// `Spec L_ℓ`: the points are `Γ_ℓ`, acted on through `Γ → Γ_ℓ`.
    pub fn spec_field(tower: &GroupTower, level: usize) -> Result<Self> {
        check_level(tower, level)?;
        let pr = tower.projection(tower.depth() - 1, level);
        let gl = tower.level(level);
        let rows = tower.top().elements().map(|g| gl.elements().map(|x| gl.mul(pr.apply(g), x)).collect()).collect();
        GSetScheme::new(tower.clone(), rows)
    }

    /// Disjoint union; points of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &GSetScheme) -> Result<Self> {
        if self.tower != other.tower || self.field_level != other.field_level {
            return Err(Error::TowerMismatch);
        }
        let shift = self.points();
        let rows = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&p| p + shift)).collect())
            .collect();
        let mut out = GSetScheme::new(self.tower.clone(), rows)?;
        if let Some(l) = self.field_level {
            out = out.base_change(l)?;
        }
        Ok(out)
    }

    /// The same points considered over `L_ℓ`, acted on by `ker(Γ → Γ_ℓ)`.
    pub fn base_change(&self, level: usize) -> Result<Self> {
        check_level(&self.tower, level)?;
        let pr = self.tower.projection(self.tower.depth() - 1, level);
        let mut out = self.clone();
        out.field_level = Some(level);
        out.acting = pr.kernel();
        out.rational = out.fixed_points();
        Ok(out)
    }

    pub fn tower(&self) -> &GroupTower {
        &self.tower
    }

    pub fn points(&self) -> usize {
        self.action.first().map_or(0, Vec::len)
    }

    pub fn field_level(&self) -> Option<usize> {
        self.field_level
    }

    /// Elements of the top level acting over the base field.
    pub fn acting(&self) -> &[Elem] {
        &self.acting
    }

    #[inline]
    pub fn act(&self, g: Elem, p: usize) -> usize {
        self.action[g][p]
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Points fixed by the acting group.
    pub fn rational_points(&self) -> &[usize] {
        &self.rational
    }

    fn fixed_points(&self) -> Vec<usize> {
        (0..self.points()).filter(|&p| self.acting.iter().all(|&g| self.action[g][p] == p)).collect()
    }

    fn stabilizer(&self, p: usize) -> Vec<Elem> {
        self.acting.iter().copied().filter(|&g| self.action[g][p] == p).collect()
    }

    /// Orbits of the acting group, the connected components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let pts: Vec<usize> = (0..self.points()).collect();
        crate::group::orbits(&pts, &self.acting, |g, &p| self.action[g][p])
    }
}

fn check_level(tower: &GroupTower, level: usize) -> Result<()> {
    if level >= tower.depth() {
        return Err(Error::Malformed(format!("tower has no level {level}")));
    }
    Ok(())
}

/// One pointed connected cover `K/S_x` per geometric point `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidCovering {
    base: GSetScheme,
    stabilizers: Vec<Vec<Elem>>,
    /// `reps[x][h]`: the smallest element of `h S_x`, for every `h` in the
    /// top level.
    reps: Vec<Vec<Elem>>,
}

/// A point of a covering: a geometric point `x` and a coset
/// representative `h`, lying over `h·x`.
pub type CoverPoint = (usize, Elem);

impl RigidCovering {
    /// `stabilizers[x]` must be a subgroup of the stabilizer of `x` in the
    /// acting group.
    pub fn new(base: GSetScheme, stabilizers: Vec<Vec<Elem>>) -> Result<Self> {
        if stabilizers.len() != base.points() {
            return Err(Error::Malformed(format!("{} points need {} components", base.points(), base.points())));
        }
        let top = base.tower.top().clone();
        let acting: HashSet<Elem> = base.acting.iter().copied().collect();
        let mut reps = Vec::with_capacity(stabilizers.len());
        let mut sorted = Vec::with_capacity(stabilizers.len());
        for (x, s) in stabilizers.into_iter().enumerate() {
            let mut s: Vec<Elem> = s;
            s.sort_unstable();
            s.dedup();
            top.check_subgroup(&s)?;
            if let Some(&h) = s.iter().find(|&&h| !acting.contains(&h) || base.act(h, x) != x) {
                return Err(Error::NotStable { point: x, by: h });
            }
            reps.push(top.elements().map(|h| s.iter().map(|&t| top.mul(h, t)).min().expect("nonempty")).collect());
            sorted.push(s);
        }
        Ok(RigidCovering { base, stabilizers: sorted, reps })
    }

    /// `U = X`: every component is the point itself.
    pub fn trivial(base: &GSetScheme) -> Self {
        let stabs = (0..base.points()).map(|x| base.stabilizer(x)).collect();
        RigidCovering::new(base.clone(), stabs).expect("stabilizers are subgroups")
    }

    /// `U_L`: the component of `X ×_k L_ℓ` through `(x, e)` for each `x`.
    pub fn canonical(base: &GSetScheme, level: usize) -> Result<Self> {
        check_level(&base.tower, level)?;
        let kernel: HashSet<Elem> = base.tower.projection(base.tower.depth() - 1, level).kernel().into_iter().collect();
        let stabs = (0..base.points())
            .map(|x| base.stabilizer(x).into_iter().filter(|h| kernel.contains(h)).collect())
            .collect();
        RigidCovering::new(base.clone(), stabs)
    }

    pub fn base(&self) -> &GSetScheme {
        &self.base
    }

    pub fn stabilizer(&self, x: usize) -> &[Elem] {
        &self.stabilizers[x]
    }

    /// The elements of the component over `x`, marked point first.
    pub fn component(&self, x: usize) -> Vec<CoverPoint> {
        let set: BTreeSet<Elem> = self.base.acting.iter().map(|&h| self.reps[x][h]).collect();
        set.into_iter().map(|h| (x, h)).collect()
    }

    pub fn marked_point(&self, x: usize) -> CoverPoint {
        (x, self.reps[x][self.base.tower.top().identity()])
    }

    /// `α`: the geometric point below a cover point.
    pub fn over(&self, u: CoverPoint) -> usize {
        self.base.act(u.1, u.0)
    }

    /// The acting element `k` applied to a cover point.
    pub fn act(&self, k: Elem, u: CoverPoint) -> CoverPoint {
        let top = self.base.tower.top();
        (u.0, self.reps[u.0][top.mul(k, u.1)])
    }

    /// `ρ_g(h S_x) = g h g⁻¹ S_{g x}`, defined for every `g` in the top
    /// level when `g S_x g⁻¹ = S_{gx}`.
    pub fn galois_act(&self, g: Elem, u: CoverPoint) -> CoverPoint {
        let top = self.base.tower.top();
        let gx = self.base.act(g, u.0);
        (gx, self.reps[gx][top.conj(g, u.1)])
    }

    /// Checks `g S_x g⁻¹ = S_{gx}` for all `g` and `x`.
    pub fn check_galois_stable(&self) -> Result<()> {
        let top = self.base.tower.top();
        for g in top.elements() {
            for x in 0..self.base.points() {
                let gx = self.base.act(g, x);
                let conj: BTreeSet<Elem> = self.stabilizers[x].iter().map(|&s| top.conj(g, s)).collect();
                if conj.into_iter().ne(self.stabilizers[gx].iter().copied()) {
                    return Err(Error::NotEquivariant { point: x, elem: g });
                }
            }
        }
        Ok(())
    }

    /// True when every `S_x` lies in `ker(Γ → Γ_ℓ)`, so cover points carry a
    /// coordinate in `Γ_ℓ`.
    pub fn has_galois_coordinate(&self, level: usize) -> bool {
        if level >= self.base.tower.depth() {
            return false;
        }
        let pr = self.base.tower.projection(self.base.tower.depth() - 1, level);
        let e = pr.target().identity();
        self.stabilizers.iter().flatten().all(|&s| pr.apply(s) == e)
    }
}

/// `U ×^R V` over `X × Y`: for each `(x, y)` the orbit of `(u_x, v_y)`.
/// Points of `X × Y` are indexed `x·|Y| + y`.
pub fn rigid_product(u: &RigidCovering, v: &RigidCovering) -> Result<RigidCovering> {
    let (x, y) = (&u.base, &v.base);
    if x.tower != y.tower || x.field_level != y.field_level {
        return Err(Error::TowerMismatch);
    }
    let ny = y.points();
    let rows = x
        .action
        .iter()
        .zip(&y.action)
        .map(|(a, b)| (0..x.points() * ny).map(|p| a[p / ny] * ny + b[p % ny]).collect())
        .collect();
    let mut base = GSetScheme::new(x.tower.clone(), rows)?;
    if let Some(l) = x.field_level {
        base = base.base_change(l)?;
    }
    let stabs = (0..base.points())
        .map(|p| {
            let t: HashSet<Elem> = v.stabilizers[p % ny].iter().copied().collect();
            u.stabilizers[p / ny].iter().copied().filter(|h| t.contains(h)).collect()
        })
        .collect();
    RigidCovering::new(base, stabs)
}

/// `f^* V`: over `x`, the component of `V_{f(x)} ×_Y X` through
/// `(v_{f(x)}, x)`.
pub fn pullback_covering(source: &GSetScheme, f: &[usize], v: &RigidCovering) -> Result<RigidCovering> {
    let y = &v.base;
    if source.tower != y.tower || source.field_level != y.field_level {
        return Err(Error::TowerMismatch);
    }
    check_scheme_map(source, y, f)?;
    let stabs = (0..source.points())
        .map(|x| {
            let t: HashSet<Elem> = v.stabilizers[f[x]].iter().copied().collect();
            source.stabilizer(x).into_iter().filter(|h| t.contains(h)).collect()
        })
        .collect();
    RigidCovering::new(source.clone(), stabs)
}

/// Checks that `f` is an equivariant map of point sets.
pub fn check_scheme_map(source: &GSetScheme, target: &GSetScheme, f: &[usize]) -> Result<()> {
    if f.len() != source.points() || f.iter().any(|&p| p >= target.points()) {
        return Err(Error::Malformed("scheme map has the wrong shape".into()));
    }
    for g in source.tower.top().elements() {
        for x in 0..source.points() {
            if f[source.act(g, x)] != target.act(g, f[x]) {
                return Err(Error::NotEquivariant { point: x, elem: g });
            }
        }
    }
    Ok(())
}

/// The Čech nerve of a rigid covering: `m`-simplices are orbits of
/// `(m+1)`-tuples of cover points over a common geometric point, labeled by
/// their least tuple. Vertices are the geometric points in order.
#[derive(Clone, Debug)]
pub struct CechNerve {
    pub covering: RigidCovering,
    pub nerve: LabeledSet<Vec<CoverPoint>>,
}

impl CechNerve {
    pub fn set(&self) -> &TruncatedSimplicialSet {
        &self.nerve.set
    }

    pub fn trunc_dim(&self) -> usize {
        self.nerve.set.trunc_dim()
    }

    fn canonical(&self, t: &[CoverPoint]) -> Vec<CoverPoint> {
        canonical_tuple(&self.covering, t)
    }

    /// Index of the simplex containing the tuple `t`.
    pub fn simplex_of(&self, t: &[CoverPoint]) -> usize {
        self.nerve.index_of(t.len() - 1, &self.canonical(t)).expect("tuple over a common point")
    }
}

fn canonical_tuple(u: &RigidCovering, t: &[CoverPoint]) -> Vec<CoverPoint> {
    u.base
        .acting
        .iter()
        .map(|&k| t.iter().map(|&p| u.act(k, p)).collect::<Vec<_>>())
        .min()
        .expect("acting group is nonempty")
}

pub fn cech_nerve(u: &RigidCovering, trunc_dim: usize) -> Result<CechNerve> {
    let n = u.base.points();
    // Cover points grouped by the geometric point below them.
    let mut fibres: Vec<Vec<CoverPoint>> = vec![Vec::new(); n];
    for x in 0..n {
        for p in u.component(x) {
            fibres[u.over(p)].push(p);
        }
    }
    for f in fibres.iter_mut() {
        f.sort_unstable();
    }
    let mut levels: Vec<Vec<Vec<CoverPoint>>> = Vec::with_capacity(trunc_dim + 1);
    for m in 0..=trunc_dim {
        let mut seen: BTreeSet<Vec<CoverPoint>> = BTreeSet::new();
        for fibre in &fibres {
            let k = fibre.len();
            if k == 0 {
                continue;
            }
            let total = k.checked_pow(m as u32 + 1).ok_or_else(|| Error::Budget("fibre power overflows".into()))?;
            for code in 0..total {
                let t: Vec<CoverPoint> = crate::classifying::decode(code, m + 1, k).into_iter().map(|i| fibre[i]).collect();
                seen.insert(canonical_tuple(u, &t));
            }
        }
        levels.push(seen.into_iter().collect());
    }
    let basepoint = (n == 1).then(|| levels[0][0].clone());
    let nerve = TruncatedSimplicialSet::from_labeled(
        levels,
        |_, i, t| canonical_tuple(u, &drop_at(t, i)),
        |_, j, t| canonical_tuple(u, &repeat_at(t, j)),
        basepoint,
    )?;
    Ok(CechNerve { covering: u.clone(), nerve })
}

/// The map to `BΓ_ℓ` sending a simplex `(u_0, …, u_m)` to
/// `(γ_0⁻¹γ_1, …, γ_{m-1}⁻¹γ_m)`, where `γ_i` is the coordinate of `u_i`.
pub fn structure_map(nerve: &CechNerve, level: usize) -> Result<SimplicialMap> {
    let u = &nerve.covering;
    if !u.has_galois_coordinate(level) {
        return Err(Error::WrongCoverShape(format!("cover points have no coordinate in level {level}")));
    }
    let tower = &u.base.tower;
    let pr = tower.projection(tower.depth() - 1, level);
    let gl = tower.level(level);
    let bg = crate::classifying::nerve(gl, nerve.trunc_dim())?;
    let source = nerve.set().clone().with_basepoint(None);
    let target = bg.clone().with_basepoint(None);
    SimplicialMap::from_fn(&source, &target, |m, x| {
        let t = nerve.nerve.label(m, x);
        let steps: Vec<Elem> = t.windows(2).map(|w| gl.mul(gl.inv(pr.apply(w[0].1)), pr.apply(w[1].1))).collect();
        nerve_index(gl, &steps)
    })
}

/// The nerve map induced by the covering map `f^*V → V`, `(x, h) ↦ (f x, h)`.
pub fn induced_nerve_map(pulled: &CechNerve, f: &[usize], target: &CechNerve) -> Result<SimplicialMap> {
    let v = &target.covering;
    let source = pulled.set().clone().with_basepoint(None);
    let tgt = target.set().clone().with_basepoint(None);
    SimplicialMap::from_fn(&source, &tgt, |m, x| {
        let t: Vec<CoverPoint> = pulled.nerve.label(m, x).iter().map(|&(p, h)| v.act(h, v.marked_point(f[p]))).collect();
        target.simplex_of(&t)
    })
}

/// The self-map of the nerve induced by `g` in the top level.
pub fn galois_action_on_nerve(nerve: &CechNerve, g: Elem) -> Result<SimplicialMap> {
    let u = &nerve.covering;
    u.check_galois_stable()?;
    let set = nerve.set().clone().with_basepoint(None);
    SimplicialMap::from_fn(&set, &set, |m, x| {
        let t: Vec<CoverPoint> = nerve.nerve.label(m, x).iter().map(|&p| u.galois_act(g, p)).collect();
        nerve.simplex_of(&t)
    })
}

/// Simplices fixed by every Galois element, as a sub-simplicial set, with the
/// kept simplex indices per dimension.
pub fn fixed_subcomplex(nerve: &CechNerve) -> Result<(TruncatedSimplicialSet, Vec<Vec<usize>>)> {
    let top = nerve.covering.base.tower.top();
    let maps: Vec<SimplicialMap> =
        top.generators().into_iter().map(|g| galois_action_on_nerve(nerve, g)).collect::<Result<_>>()?;
    let set = nerve.set().clone().with_basepoint(None);
    let keep: Vec<Vec<bool>> = (0..=set.trunc_dim())
        .map(|m| (0..set.count(m)).map(|x| maps.iter().all(|f| f.apply(m, x) == x)).collect())
        .collect();
    set.restrict(&keep)
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalPointsReport {
    pub rational_points: Vec<usize>,
    pub fixed_vertices: Vec<usize>,
    /// Fixed components as lists of vertices (geometric points).
    pub fixed_components: Vec<Vec<usize>>,
    /// `images[i]` is the component of `rational_points[i]`.
    pub images: Vec<usize>,
    pub surjective: bool,
    pub vertices_are_rational: bool,
}

/// `X(k) → π₀` of the fixed points of the Galois action on the nerve.
pub fn rational_points_surjection(scheme: &GSetScheme, nerve: &CechNerve) -> Result<RationalPointsReport> {
    let (fixed, kept) = fixed_subcomplex(nerve)?;
    let fixed_vertices: Vec<usize> = kept[0].clone();
    let comps: Vec<Vec<usize>> = pi0(&fixed).into_iter().map(|c| c.into_iter().map(|v| kept[0][v]).collect()).collect();
    let rational: Vec<usize> = scheme.tower().top().elements().fold((0..scheme.points()).collect(), |acc: Vec<usize>, g| {
        acc.into_iter().filter(|&p| scheme.act(g, p) == p).collect()
    });
    let component_of: HashMap<usize, usize> =
        comps.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
    let images: Vec<usize> = rational.iter().filter_map(|x| component_of.get(x).copied()).collect();
    let hit: HashSet<usize> = images.iter().copied().collect();
    Ok(RationalPointsReport {
        surjective: hit.len() == comps.len() && images.len() == rational.len(),
        vertices_are_rational: fixed_vertices == rational,
        rational_points: rational,
        fixed_vertices,
        fixed_components: comps,
        images,
    })
}

/// For a point `x` fixed by the acting group and a cover with coordinates
/// in `Γ_ℓ`, the section `BΓ_ℓ → N` sending `(g_1, …, g_m)` to the tuple of
/// cover points over `x` with coordinates `e, g_1, g_1 g_2, …`.
pub fn rational_point_section(nerve: &CechNerve, level: usize, x: usize) -> Result<SimplicialMap> {
    let u = &nerve.covering;
    let base = &u.base;
    if !base.rational_points().contains(&x) {
        return Err(Error::NotStable { point: x, by: base.acting.iter().copied().find(|&g| base.act(g, x) != x).unwrap_or(0) });
    }
    if !u.has_galois_coordinate(level) {
        return Err(Error::WrongCoverShape(format!("cover points have no coordinate in level {level}")));
    }
    let tower = &base.tower;
    let pr = tower.projection(tower.depth() - 1, level);
    let gl = tower.level(level);
    // A lift in the acting group of every element of Γ_ℓ.
    let mut lift: HashMap<Elem, Elem> = HashMap::new();
    for &h in base.acting() {
        lift.entry(pr.apply(h)).or_insert(h);
    }
    if lift.len() != gl.order() {
        return Err(Error::NotSurjective(gl.elements().find(|g| !lift.contains_key(g)).unwrap_or(0)));
    }
    let bg = nerve_set(gl, nerve.trunc_dim())?;
    SimplicialMap::from_fn(&bg, &nerve.set().clone().with_basepoint(None), |m, s| {
        let steps = crate::classifying::nerve_tuple(gl, m, s);
        let mut acc = gl.identity();
        let mut t = vec![u.act(lift[&acc], u.marked_point(x))];
        for g in steps {
            acc = gl.mul(acc, g);
            t.push(u.act(lift[&acc], u.marked_point(x)));
        }
        nerve.simplex_of(&t)
    })
}

fn nerve_set(g: &FiniteGroup, n: usize) -> Result<TruncatedSimplicialSet> {
    Ok(nerve(g, n)?.with_basepoint(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::GroupHom;
    use crate::simplicial::pi1_image_onto;

    fn tower_of(top: FiniteGroup, middle: Option<(FiniteGroup, GroupHom)>) -> GroupTower {
        let one = FiniteGroup::trivial();
        match middle {
            None => GroupTower::new(vec![one.clone(), top.clone()], vec![GroupHom::trivial(&top, &one)]).unwrap(),
            Some((mid, pr)) => GroupTower::new(
                vec![one.clone(), mid.clone(), top],
                vec![GroupHom::trivial(&mid, &one), pr],
            )
            .unwrap(),
        }
    }

    fn z2_tower() -> GroupTower {
        tower_of(FiniteGroup::cyclic(2), None)
    }

    fn z4_tower() -> GroupTower {
        let (z4, z2) = (FiniteGroup::cyclic(4), FiniteGroup::cyclic(2));
        let pr = GroupHom::from_fn(&z4, &z2, |x| x % 2).unwrap();
        tower_of(z4, Some((z2, pr)))
    }

    fn s3_tower() -> GroupTower {
        let s3 = catalog::symmetric(3);
        let z2 = FiniteGroup::cyclic(2);
        let pr = GroupHom::from_fn(&s3.group, &z2, |x| catalog::permutation_sign(&s3.labels[x])).unwrap();
        tower_of(s3.group, Some((z2, pr)))
    }

    #[test]
    fn spec_k_nerve_is_classifying_space() {
        for tower in [z2_tower(), z4_tower(), s3_tower()] {
            let x = GSetScheme::spec_k(&tower);
            for level in 0..tower.depth() {
                let n = cech_nerve(&RigidCovering::canonical(&x, level).unwrap(), 3).unwrap();
                let f = structure_map(&n, level).unwrap();
                let bg = nerve(tower.level(level), 3).unwrap();
                assert!(f.is_bijective(&bg), "level {level}");
                assert_eq!(n.set().basepoint(), Some(0));
            }
        }
    }

    #[test]
    fn quadratic_nerve_counts() {
        let x = GSetScheme::spec_k(&z2_tower());
        let n = cech_nerve(&RigidCovering::canonical(&x, 1).unwrap(), 3).unwrap();
        assert_eq!(n.set().counts(), &[1, 2, 4, 8]);
        let f = structure_map(&n, 1).unwrap();
        assert!(pi1_image_onto(n.set(), &f, &FiniteGroup::cyclic(2)).unwrap());
    }

    #[test]
    fn trivial_cover_is_discrete() {
        let x = GSetScheme::spec_field(&s3_tower(), 2).unwrap();
        let n = cech_nerve(&RigidCovering::trivial(&x.base_change(2).unwrap()), 2).unwrap();
        assert_eq!(n.set().counts(), &[6, 6, 6]);
        assert!(n.set().nondegenerate(1).is_empty());
        // Over k each point still carries its whole orbit.
        let n = cech_nerve(&RigidCovering::trivial(&x), 2).unwrap();
        assert_eq!(n.set().counts(), &[6, 36, 216]);
        assert_eq!(pi0(n.set()).len(), 1);
    }

    #[test]
    fn vertices_are_geometric_points() {
        let t = s3_tower();
        let x = GSetScheme::spec_field(&t, 1).unwrap().disjoint_union(&GSetScheme::split(&t, 2)).unwrap();
        for level in 0..t.depth() {
            let u = RigidCovering::canonical(&x, level).unwrap();
            let n = cech_nerve(&u, 2).unwrap();
            let labels: Vec<usize> = n.nerve.labels[0].iter().map(|v| v[0].0).collect();
            assert_eq!(labels, (0..x.points()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn two_point_base_has_two_components() {
        let t = z2_tower();
        let x = GSetScheme::split(&t, 2);
        let n = cech_nerve(&RigidCovering::canonical(&x, 1).unwrap(), 2).unwrap();
        assert_eq!(pi0(n.set()).len(), 2);
    }

    #[test]
    fn rigid_product_examples() {
        let t = z2_tower();
        let k = GSetScheme::spec_k(&t);
        let triv = RigidCovering::trivial(&k);
        let p = rigid_product(&triv, &triv).unwrap();
        assert_eq!(p.component(0).len(), 1);
        let l = RigidCovering::canonical(&k, 1).unwrap();
        let p = rigid_product(&l, &l).unwrap();
        assert_eq!(p.component(0).len(), 2);
        let s = s3_tower();
        let a = RigidCovering::canonical(&GSetScheme::spec_field(&s, 1).unwrap(), 2).unwrap();
        let b = RigidCovering::canonical(&GSetScheme::spec_k(&s), 1).unwrap();
        let p = rigid_product(&a, &b).unwrap();
        for x in 0..p.base().points() {
            let (i, j) = (x / b.base().points(), x % b.base().points());
            assert_eq!((a.component(i).len() * b.component(j).len()) % p.component(x).len(), 0);
        }
        assert_eq!(rigid_product(&a, &l), Err(Error::TowerMismatch));
    }

    #[test]
    fn pullback_examples() {
        let t = s3_tower();
        let k = GSetScheme::spec_k(&t);
        let v = RigidCovering::canonical(&k, 2).unwrap();
        let id = [0];
        assert_eq!(pullback_covering(&k, &id, &v).unwrap(), v);
        let split = GSetScheme::split(&t, 2);
        let u = pullback_covering(&split, &[0, 0], &v).unwrap();
        assert!(u.component(0).len() == 6 && u.component(1).len() == 6);
        let l = GSetScheme::spec_field(&t, 1).unwrap();
        let bad = pullback_covering(&l, &[0, 1], &RigidCovering::canonical(&GSetScheme::split(&t, 2), 1).unwrap());
        assert!(matches!(bad, Err(Error::NotEquivariant { .. })));
        // The induced nerve map commutes with the structure maps.
        let nu = cech_nerve(&u, 2).unwrap();
        let nv = cech_nerve(&v, 2).unwrap();
        let f = induced_nerve_map(&nu, &[0, 0], &nv).unwrap();
        assert_eq!(structure_map(&nv, 2).unwrap().compose(&f), structure_map(&nu, 2).unwrap());
    }

    #[test]
    fn structure_map_shape() {
        let t = z4_tower();
        let x = GSetScheme::spec_k(&t);
        let n = cech_nerve(&RigidCovering::canonical(&x, 1).unwrap(), 2).unwrap();
        assert!(matches!(structure_map(&n, 2), Err(Error::WrongCoverShape(_))));
        let f = structure_map(&n, 0).unwrap();
        assert!(f.levels().iter().flatten().all(|&y| y == 0));
    }

    #[test]
    fn rational_point_gives_section() {
        let t = s3_tower();
        let x = GSetScheme::split(&t, 1).disjoint_union(&GSetScheme::spec_field(&t, 1).unwrap()).unwrap();
        let n = cech_nerve(&RigidCovering::canonical(&x, 2).unwrap(), 2).unwrap();
        let s = rational_point_section(&n, 2, 0).unwrap();
        let p = structure_map(&n, 2).unwrap();
        assert_eq!(p.compose(&s), SimplicialMap::identity(&nerve(t.top(), 2).unwrap()));
        assert!(rational_point_section(&n, 2, 1).is_err());
    }

    #[test]
    fn galois_action_examples() {
        let t = s3_tower();
        let top = t.top().clone();
        for scheme in [
            GSetScheme::spec_k(&t),
            GSetScheme::split(&t, 2),
            GSetScheme::spec_field(&t, 1).unwrap(),
            GSetScheme::spec_field(&t, 2).unwrap(),
        ] {
            for field in 0..t.depth() {
                let xb = scheme.base_change(field).unwrap();
                let n = cech_nerve(&RigidCovering::canonical(&xb, 2).unwrap(), 2).unwrap();
                let maps: Vec<SimplicialMap> = top.elements().map(|g| galois_action_on_nerve(&n, g).unwrap()).collect();
                assert_eq!(maps[0], SimplicialMap::identity(n.set()));
                for g in top.elements() {
                    for h in top.elements() {
                        assert_eq!(maps[g].compose(&maps[h]), maps[top.mul(g, h)]);
                    }
                    for x in 0..xb.points() {
                        assert_eq!(maps[g].apply(0, x), xb.act(g, x));
                    }
                }
            }
        }
        let l = GSetScheme::spec_field(&t, 2).unwrap().base_change(2).unwrap();
        let n = cech_nerve(&RigidCovering::canonical(&l, 2).unwrap(), 2).unwrap();
        assert!(rational_points_surjection(&l, &n).unwrap().fixed_vertices.is_empty());
    }

    #[test]
    fn rational_points_examples() {
        let t = z2_tower();
        let cases = [
            (GSetScheme::split(&t, 2), 2),
            (GSetScheme::spec_field(&t, 1).unwrap(), 0),
            (GSetScheme::split(&t, 1).disjoint_union(&GSetScheme::spec_field(&t, 1).unwrap()).unwrap(), 1),
        ];
        for (x, comps) in cases {
            let xb = x.base_change(0).unwrap();
            let n = cech_nerve(&RigidCovering::canonical(&xb, 1).unwrap(), 3).unwrap();
            let r = rational_points_surjection(&x, &n).unwrap();
            assert!(r.surjective && r.vertices_are_rational);
            assert_eq!(r.fixed_components.len(), comps);
        }
    }

    #[test]
    fn scheme_validation() {
        let t = z2_tower();
        assert!(GSetScheme::new(t.clone(), vec![vec![0, 1], vec![0, 0]]).is_err());
        assert!(GSetScheme::new(t.clone(), vec![vec![0, 1]]).is_err());
        let l = GSetScheme::spec_field(&t, 1).unwrap();
        assert!(l.rational_points().is_empty());
        assert_eq!(l.base_change(1).unwrap().rational_points(), &[0, 1]);
        assert!(RigidCovering::new(l.clone(), vec![vec![0, 1], vec![0]]).is_err());
    }
}
