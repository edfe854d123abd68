//! Finite groups as explicit multiplication tables, homomorphisms between
//! them, short exact sequences, and finite towers of surjections standing in
//! for profinite groups.
//!
//! Elements are indices `0..order`; index 0 is always the identity.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupTable", into = "GroupTable")]
pub struct FiniteGroup {
    mul: Vec<Vec<Elem>>,
    inv: Vec<Elem>,
}

/// Serialized form of a group: its order and multiplication-table rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupTable {
    pub order: usize,
    pub mul: Vec<Vec<Elem>>,
}

impl TryFrom<GroupTable> for FiniteGroup {
    type Error = Error;
    fn try_from(t: GroupTable) -> Result<Self> {
        if t.mul.len() != t.order {
            return Err(Error::Malformed(format!(
                "order {} but {} table rows",
                t.order,
                t.mul.len()
            )));
        }
        FiniteGroup::from_table(t.mul)
    }
}

impl From<FiniteGroup> for GroupTable {
    fn from(g: FiniteGroup) -> Self {
        GroupTable { order: g.order(), mul: g.mul }
    }
}

impl FiniteGroup {
    /// Validates a multiplication table: square, in range, 0 is the
    /// identity, every element has an inverse, and the product is associative.
    pub fn from_table(mul: Vec<Vec<Elem>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::Malformed("empty group".into()));
        }
        for (i, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("row {i} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::Malformed(format!("entry {bad} out of range in row {i}")));
            }
        }
        for x in 0..n {
            if mul[0][x] != x || mul[x][0] != x {
                return Err(Error::BadIdentity(x));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for x in 0..n {
            match (0..n).find(|&y| mul[x][y] == 0 && mul[y][x] == 0) {
                Some(y) => inv[x] = y,
                None => return Err(Error::NoInverse(x)),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a][b];
                for c in 0..n {
                    if mul[ab][c] != mul[a][mul[b][c]] {
                        return Err(Error::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(FiniteGroup { mul, inv })
    }

    /// Closes `generators` under `op` starting from `identity`, returning the
    /// group table together with the element labels in index order.
    pub fn from_generators<T, F>(identity: T, generators: &[T], op: F) -> Result<(Self, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut labels = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let p = op(&labels[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), labels.len());
                    queue.push_back(labels.len());
                    labels.push(p);
                }
            }
        }
        let n = labels.len();
        let mut mul = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let p = op(&labels[a], &labels[b]);
                mul[a][b] = *index
                    .get(&p)
                    .ok_or_else(|| Error::Malformed("generated set is not closed".into()))?;
            }
        }
        Ok((FiniteGroup::from_table(mul)?, labels))
    }

    pub fn trivial() -> Self {
        FiniteGroup { mul: vec![vec![0]], inv: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup { mul, inv }
    }

    /// Direct product with element `(a, b)` at index `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order(), other.order());
        let mut mul = vec![vec![0; n * m]; n * m];
        for a in 0..n * m {
            for b in 0..n * m {
                mul[a][b] = self.mul(a / m, b / m) * m + other.mul(a % m, b % m);
            }
        }
        let inv = (0..n * m).map(|a| self.inv(a / m) * m + other.inv(a % m)).collect();
        FiniteGroup { mul, inv }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> Elem {
        0
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a][b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a]
    }

    /// `a * x * a^{-1}`.
    #[inline]
    pub fn conj(&self, a: Elem, x: Elem) -> Elem {
        self.mul(self.mul(a, x), self.inv(a))
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    pub fn table(&self) -> &[Vec<Elem>] {
        &self.mul
    }

    pub fn pow(&self, a: Elem, k: usize) -> Elem {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.commuting_witness().is_none()
    }

    pub fn commuting_witness(&self) -> Option<(Elem, Elem)> {
        for a in self.elements() {
            for b in a + 1..self.order() {
                if self.mul(a, b) != self.mul(b, a) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    /// A small generating set, chosen greedily by ascending element index.
    pub fn generators(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = vec![0];
        for x in self.elements() {
            if span.len() == self.order() {
                break;
            }
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.generated_subgroup(&gens);
            }
        }
        gens
    }

    /// Checks closure under multiplication and inverses; returns the first
    /// element that witnesses failure.
    pub fn check_subgroup(&self, elems: &[Elem]) -> Result<()> {
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= self.order()) {
            return Err(Error::NotClosed(bad));
        }
        if !set.contains(&0) {
            return Err(Error::NotClosed(0));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(Error::NotClosed(a));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotClosed(self.mul(a, b)));
                }
            }
        }
        Ok(())
    }

    /// The subgroup on `elems` re-indexed in ascending order, with its inclusion.
    pub fn subgroup(&self, elems: &[Elem]) -> Result<(FiniteGroup, GroupHom)> {
        self.check_subgroup(elems)?;
        let sorted: Vec<Elem> = elems.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos: HashMap<Elem, usize> = sorted.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mul = sorted
            .iter()
            .map(|&a| sorted.iter().map(|&b| pos[&self.mul(a, b)]).collect())
            .collect();
        let sub = FiniteGroup::from_table(mul)?;
        let incl = GroupHom::new(sub.clone(), self.clone(), sorted)?;
        Ok((sub, incl))
    }

    pub fn is_normal(&self, elems: &[Elem]) -> bool {
        let set: BTreeSet<Elem> = elems.iter().copied().collect();
        self.elements()
            .all(|g| set.iter().all(|&x| set.contains(&self.conj(g, x))))
    }

    /// Relabels the group by a permutation `perm[old] = new` (with
    /// `perm[0] == 0`). Used to test that results do not depend on indexing.
    pub fn relabel(&self, perm: &[Elem]) -> Result<FiniteGroup> {
        let n = self.order();
        if perm.len() != n || perm[0] != 0 {
            return Err(Error::Malformed("relabeling must fix the identity".into()));
        }
        let mut inverse = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inverse[new] != usize::MAX {
                return Err(Error::Malformed("relabeling is not a permutation".into()));
            }
            inverse[new] = old;
        }
        let mul = (0..n)
            .map(|a| (0..n).map(|b| perm[self.mul(inverse[a], inverse[b])]).collect())
            .collect();
        FiniteGroup::from_table(mul)
    }
}

/// A homomorphism stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<Elem>,
}

impl GroupHom {
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<Elem>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::Malformed(format!(
                "image list has {} entries for a group of order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.order()) {
            return Err(Error::Malformed(format!("image {bad} out of range")));
        }
        if map[0] != 0 {
            return Err(Error::NotHomomorphism(0, 0));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(Error::NotHomomorphism(a, b));
                }
            }
        }
        Ok(GroupHom { source, target, map })
    }

    pub fn from_fn(source: &FiniteGroup, target: &FiniteGroup, f: impl Fn(Elem) -> Elem) -> Result<Self> {
        let map = source.elements().map(f).collect();
        GroupHom::new(source.clone(), target.clone(), map)
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), map: g.elements().collect() }
    }

    pub fn trivial(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        GroupHom { source: source.clone(), target: target.clone(), map: vec![0; source.order()] }
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    pub fn images(&self) -> &[Elem] {
        &self.map
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target != self.source {
            return Err(Error::Malformed("composition of non-composable homomorphisms".into()));
        }
        Ok(GroupHom {
            source: inner.source.clone(),
            target: self.target.clone(),
            map: inner.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn kernel(&self) -> Vec<Elem> {
        self.source.elements().filter(|&x| self.map[x] == 0).collect()
    }

    pub fn image(&self) -> Vec<Elem> {
        self.map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn surjectivity_witness(&self) -> Option<Elem> {
        let mut hit = vec![false; self.target.order()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.iter().position(|&h| !h)
    }

    pub fn is_surjective(&self) -> bool {
        self.surjectivity_witness().is_none()
    }
}

/// A short exact sequence `1 → kernel → total → quotient → 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    kernel: FiniteGroup,
    total: FiniteGroup,
    quotient: FiniteGroup,
    inclusion: GroupHom,
    projection: GroupHom,
}

impl Extension {
    pub fn new(
        kernel: FiniteGroup,
        total: FiniteGroup,
        quotient: FiniteGroup,
        inclusion: GroupHom,
        projection: GroupHom,
    ) -> Result<Self> {
        if inclusion.source != kernel || inclusion.target != total {
            return Err(Error::NotExact("inclusion does not map kernel into total".into()));
        }
        if projection.source != total || projection.target != quotient {
            return Err(Error::NotExact("projection does not map total onto quotient".into()));
        }
        let ker_incl = inclusion.kernel();
        if ker_incl.len() > 1 {
            return Err(Error::NotExact(format!(
                "inclusion is not injective: kernel element {} maps to the identity",
                ker_incl[1]
            )));
        }
        if let Some(w) = projection.surjectivity_witness() {
            return Err(Error::NotExact(format!("projection misses quotient element {w}")));
        }
        let image = inclusion.image();
        let ker = projection.kernel();
        if let Some(&w) = image.iter().find(|x| ker.binary_search(x).is_err()) {
            return Err(Error::NotExact(format!(
                "total element {w} lies in the image of the inclusion but not in the kernel of the projection"
            )));
        }
        if let Some(&w) = ker.iter().find(|x| image.binary_search(x).is_err()) {
            return Err(Error::NotExact(format!(
                "total element {w} lies in the kernel of the projection but not in the image of the inclusion"
            )));
        }
        Ok(Extension { kernel, total, quotient, inclusion, projection })
    }

    /// Builds the extension whose kernel is `ker(projection)`.
    pub fn from_projection(projection: GroupHom) -> Result<Self> {
        let (kernel, inclusion) = projection.source.subgroup(&projection.kernel())?;
        Extension::new(
            kernel,
            projection.source.clone(),
            projection.target.clone(),
            inclusion,
            projection,
        )
    }

    pub fn kernel(&self) -> &FiniteGroup {
        &self.kernel
    }
    pub fn total(&self) -> &FiniteGroup {
        &self.total
    }
    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }
    pub fn inclusion(&self) -> &GroupHom {
        &self.inclusion
    }
    pub fn projection(&self) -> &GroupHom {
        &self.projection
    }

    /// Elements of the total group lying in the kernel, ascending.
    pub fn kernel_elements(&self) -> Vec<Elem> {
        self.inclusion.image()
    }
}

/// Finite groups `levels[0] ← levels[1] ← …` linked by surjections;
/// `transitions[i]` maps `levels[i + 1]` onto `levels[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTower {
    levels: Vec<FiniteGroup>,
    transitions: Vec<GroupHom>,
}

impl GroupTower {
    pub fn new(levels: Vec<FiniteGroup>, transitions: Vec<GroupHom>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Malformed("tower has no levels".into()));
        }
        if transitions.len() + 1 != levels.len() {
            return Err(Error::Malformed(format!(
                "{} levels need {} transitions, got {}",
                levels.len(),
                levels.len() - 1,
                transitions.len()
            )));
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.source != levels[i + 1] || t.target != levels[i] {
                return Err(Error::Malformed(format!("transition {i} does not link levels {} and {i}", i + 1)));
            }
            if let Some(w) = t.surjectivity_witness() {
                return Err(Error::NotSurjective(w));
            }
        }
        Ok(GroupTower { levels, transitions })
    }

    pub fn single(g: FiniteGroup) -> Self {
        GroupTower { levels: vec![g], transitions: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &FiniteGroup {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[FiniteGroup] {
        &self.levels
    }

    pub fn transitions(&self) -> &[GroupHom] {
        &self.transitions
    }

    pub fn top(&self) -> &FiniteGroup {
        self.levels.last().expect("non-empty tower")
    }

    /// The composite surjection from `levels[from]` down to `levels[to]`.
    pub fn projection(&self, from: usize, to: usize) -> GroupHom {
        assert!(to <= from && from < self.depth());
        let mut map: Vec<Elem> = self.levels[from].elements().collect();
        for t in self.transitions[to..from].iter().rev() {
            for x in map.iter_mut() {
                *x = t.apply(*x);
            }
        }
        GroupHom { source: self.levels[from].clone(), target: self.levels[to].clone(), map }
    }

    /// Tower truncated to its first `depth` levels.
    pub fn truncate(&self, depth: usize) -> GroupTower {
        let depth = depth.clamp(1, self.depth());
        GroupTower {
            levels: self.levels[..depth].to_vec(),
            transitions: self.transitions[..depth - 1].to_vec(),
        }
    }
}

/// Partitions `points` into orbits under `act(g, p)` for `g` in `acting`.
/// Orbits are sorted internally and listed by their smallest member.
pub fn orbits<P, F>(points: &[P], acting: &[Elem], act: F) -> Vec<Vec<P>>
where
    P: Clone + Ord,
    F: Fn(Elem, &P) -> P,
{
    let mut sorted: Vec<P> = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut assigned = vec![false; sorted.len()];
    let mut out = Vec::new();
    for i in 0..sorted.len() {
        if assigned[i] {
            continue;
        }
        let mut orbit: BTreeSet<P> = BTreeSet::new();
        for &g in acting {
            orbit.insert(act(g, &sorted[i]));
        }
        for p in &orbit {
            if let Ok(j) = sorted.binary_search(p) {
                assigned[j] = true;
            }
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

/// Orbits of `points` under conjugation by the subgroup `subgroup_elems`.
pub fn conjugacy_orbits(group: &FiniteGroup, subgroup_elems: &[Elem], points: &[Elem]) -> Result<Vec<Vec<Elem>>> {
    group.check_subgroup(subgroup_elems)?;
    let set: BTreeSet<Elem> = points.iter().copied().collect();
    for &p in &set {
        for &a in subgroup_elems {
            if !set.contains(&group.conj(a, p)) {
                return Err(Error::NotStable { point: p, by: a });
            }
        }
    }
    Ok(orbits(points, subgroup_elems, |a, &p| group.conj(a, p)))
}

/// All compatible tuples `(g_0, …, g_n)` with `transition_i(g_{i+1}) = g_i`,
/// in lexicographic order.
pub fn tower_limit_elements(tower: &GroupTower) -> Vec<Vec<Elem>> {
    let mut tuples: Vec<Vec<Elem>> = tower.levels[0].elements().map(|g| vec![g]).collect();
    for (i, t) in tower.transitions.iter().enumerate() {
        let mut next = Vec::new();
        for tuple in &tuples {
            for g in tower.levels[i + 1].elements() {
                if t.apply(g) == tuple[i] {
                    let mut extended = tuple.clone();
                    extended.push(g);
                    next.push(extended);
                }
            }
        }
        tuples = next;
    }
    tuples.sort();
    tuples
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn cyclic_tables_are_groups() {
        for n in 1..=8 {
            let g = FiniteGroup::cyclic(n);
            assert!(FiniteGroup::from_table(g.table().to_vec()).is_ok());
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn broken_associativity_names_a_triple() {
        // Latin square with identity 0 that is not associative.
        let mul = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(mul), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn s3_transpositions_form_one_a3_orbit() {
        let s3 = catalog::symmetric(3);
        let a3: Vec<Elem> = s3.group.elements().filter(|&x| s3.group.element_order(x) != 2).collect();
        let transpositions: Vec<Elem> = s3.group.elements().filter(|&x| s3.group.element_order(x) == 2).collect();
        assert_eq!(a3.len(), 3);
        let orbits = conjugacy_orbits(&s3.group, &a3, &transpositions).unwrap();
        assert_eq!(orbits, vec![transpositions.clone()]);
    }

    #[test]
    fn identity_subgroup_gives_singletons() {
        let g = catalog::quaternion8().group;
        let pts = vec![1, 3, 5];
        let orbits = conjugacy_orbits(&g, &[0], &pts).unwrap();
        assert_eq!(orbits, vec![vec![1], vec![3], vec![5]]);
    }

    #[test]
    fn abelian_conjugation_is_trivial() {
        let z4 = FiniteGroup::cyclic(4);
        let all: Vec<Elem> = z4.elements().collect();
        let orbits = conjugacy_orbits(&z4, &all, &all).unwrap();
        assert_eq!(orbits.len(), 4);
    }

    #[test]
    fn conjugacy_orbit_errors() {
        let s3 = catalog::symmetric(3).group;
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let nonsub = vec![0, (0..6).find(|&x| s3.element_order(x) == 3).unwrap()];
        assert!(matches!(conjugacy_orbits(&s3, &nonsub, &[0]), Err(Error::NotClosed(_))));
        let all: Vec<Elem> = s3.elements().collect();
        assert!(matches!(conjugacy_orbits(&s3, &all, &[t]), Err(Error::NotStable { .. })));
    }

    #[test]
    fn s3_sign_is_exact() {
        let ext = catalog::ext_s3_sign();
        assert_eq!(ext.kernel().order(), 3);
        assert_eq!(ext.total().order(), ext.kernel().order() * ext.quotient().order());
    }

    #[test]
    fn q8_mod_i_is_exact() {
        let q8 = catalog::quaternion8();
        let ext = catalog::ext_quaternion_mod_i(&q8);
        assert_eq!(ext.kernel().order(), 4);
        assert!(ext.kernel().is_abelian());
    }

    #[test]
    fn identity_sequence_is_not_exact() {
        let z2 = FiniteGroup::cyclic(2);
        let id = GroupHom::identity(&z2);
        let err = Extension::new(z2.clone(), z2.clone(), z2.clone(), id.clone(), id).unwrap_err();
        assert!(matches!(err, Error::NotExact(_)));
    }

    #[test]
    fn z4_over_z2_limit_has_four_pairs() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        let red = GroupHom::from_fn(&z4, &z2, |x| x % 2).unwrap();
        let tower = GroupTower::new(vec![z2.clone(), z4.clone()], vec![red.clone()]).unwrap();
        // Oracle: all 8 pairs filtered by compatibility.
        let brute: Vec<Vec<Elem>> = (0..2)
            .flat_map(|a| (0..4).map(move |b| vec![a, b]))
            .filter(|p| red.apply(p[1]) == p[0])
            .collect();
        assert_eq!(tower_limit_elements(&tower), brute);
        assert_eq!(brute.len(), 4);
    }

    #[test]
    fn degenerate_towers() {
        let s3 = catalog::symmetric(3).group;
        assert_eq!(tower_limit_elements(&GroupTower::single(s3)).len(), 6);
        let z2 = FiniteGroup::cyclic(2);
        let triv = FiniteGroup::trivial();
        let t = GroupHom::trivial(&z2, &triv);
        let tower = GroupTower::new(vec![triv, z2], vec![t]).unwrap();
        assert_eq!(tower_limit_elements(&tower).len(), 2);
    }

    #[test]
    fn non_surjective_transition_rejected() {
        let z2 = FiniteGroup::cyclic(2);
        let t = GroupHom::trivial(&z2, &z2);
        assert!(matches!(GroupTower::new(vec![z2.clone(), z2], vec![t]), Err(Error::NotSurjective(1))));
    }

    #[test]
    fn serde_round_trip_validates() {
        let g = catalog::dihedral(4).group;
        let json = serde_json::to_string(&g).unwrap();
        let back: FiniteGroup = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"order":2,"mul":[[0,1],[1,1]]}"#;
        assert!(serde_json::from_str::<FiniteGroup>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_group() -> impl Strategy<Value = FiniteGroup> {
            (0usize..catalog::small_groups().len()).prop_map(|i| catalog::small_groups()[i].1.clone())
        }

        proptest! {
            #[test]
            fn conjugacy_orbits_partition(g in any_group(), seed in any::<u64>()) {
                let all: Vec<Elem> = g.elements().collect();
                let gens: Vec<Elem> = all.iter().copied().filter(|x| (seed >> (x % 64)) & 1 == 1).collect();
                let sub = g.generated_subgroup(&gens);
                let orbits = conjugacy_orbits(&g, &sub, &all).unwrap();
                let mut union: Vec<Elem> = orbits.iter().flatten().copied().collect();
                let total: usize = orbits.iter().map(Vec::len).sum();
                union.sort();
                prop_assert_eq!(total, union.len());
                prop_assert_eq!(union, all);
            }

            #[test]
            fn extension_orders_multiply(i in 0usize..catalog::extension_corpus().len()) {
                let (_, ext) = &catalog::extension_corpus()[i];
                prop_assert_eq!(ext.total().order(), ext.kernel().order() * ext.quotient().order());
            }

            #[test]
            fn limit_size_is_top_order(i in 0usize..catalog::extension_corpus().len()) {
                let (_, ext) = &catalog::extension_corpus()[i];
                let q = ext.quotient().clone();
                let tower = GroupTower::new(
                    vec![FiniteGroup::trivial(), q.clone(), ext.total().clone()],
                    vec![GroupHom::trivial(&q, &FiniteGroup::trivial()), ext.projection().clone()],
                ).unwrap();
                prop_assert_eq!(tower_limit_elements(&tower).len(), ext.total().order());
            }
        }
    }
}
