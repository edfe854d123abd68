//! Finite simplicial sets stored up to a truncation dimension `N`.
//!
//! Every simplex of dimension `m ≤ N` is an index `0..count(m)`. Face maps
//! `d_i` (dimension `m → m-1`) and degeneracies `s_j` (`m → m+1`, only for
//! `m < N`) are total index tables, degenerate simplices included. The
//! simplicial identities are checked on construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SimplicialTable", into = "SimplicialTable")]
pub struct TruncatedSimplicialSet {
    counts: Vec<usize>,
    faces: Vec<Vec<Vec<usize>>>,
    degens: Vec<Vec<Vec<usize>>>,
    basepoint: Option<usize>,
}

/// Serialized form: simplex counts per dimension and the face/degeneracy
/// tables, `faces[m][i][x] = d_i x` for `1 ≤ m ≤ N` and
/// `degeneracies[m][j][x] = s_j x` for `0 ≤ m < N`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplicialTable {
    pub trunc_dim: usize,
    pub counts: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub degeneracies: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<usize>,
}

impl TryFrom<SimplicialTable> for TruncatedSimplicialSet {
    type Error = Error;
    fn try_from(t: SimplicialTable) -> Result<Self> {
        if t.counts.len() != t.trunc_dim + 1 {
            return Err(Error::Malformed(format!(
                "trunc_dim {} needs {} counts, got {}",
                t.trunc_dim,
                t.trunc_dim + 1,
                t.counts.len()
            )));
        }
        let mut faces = vec![Vec::new()];
        faces.extend(t.faces);
        let mut degens = t.degeneracies;
        degens.push(Vec::new());
        TruncatedSimplicialSet::new(t.counts, faces, degens, t.basepoint)
    }
}

impl From<TruncatedSimplicialSet> for SimplicialTable {
    fn from(x: TruncatedSimplicialSet) -> Self {
        let n = x.trunc_dim();
        SimplicialTable {
            trunc_dim: n,
            faces: x.faces[1..].to_vec(),
            degeneracies: x.degens[..n].to_vec(),
            counts: x.counts,
            basepoint: x.basepoint,
        }
    }
}

/// A simplicial set built from labeled simplices, keeping the labels and a
/// reverse index so callers can address simplices by what they represent.
#[derive(Clone, Debug)]
pub struct LabeledSet<K> {
    pub set: TruncatedSimplicialSet,
    pub labels: Vec<Vec<K>>,
    index: Vec<HashMap<K, usize>>,
}

impl<K: Clone + Eq + Hash> LabeledSet<K> {
    pub fn index_of(&self, dim: usize, label: &K) -> Option<usize> {
        self.index[dim].get(label).copied()
    }

    pub fn label(&self, dim: usize, x: usize) -> &K {
        &self.labels[dim][x]
    }
}

impl TruncatedSimplicialSet {
    /// `faces[0]` and `degens[N]` must be empty.
    pub fn new(
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<usize>>>,
        degens: Vec<Vec<Vec<usize>>>,
        basepoint: Option<usize>,
    ) -> Result<Self> {
        let x = TruncatedSimplicialSet { counts, faces, degens, basepoint };
        x.check_shape()?;
        x.check_identities()?;
        Ok(x)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.counts.len();
        if n < 2 {
            return Err(Error::Malformed("truncation dimension must be at least 1".into()));
        }
        if self.faces.len() != n || self.degens.len() != n {
            return Err(Error::Malformed("face/degeneracy tables do not match the dimension count".into()));
        }
        for m in 0..n {
            let want_faces = if m == 0 { 0 } else { m + 1 };
            if self.faces[m].len() != want_faces {
                return Err(Error::Malformed(format!("dimension {m} needs {want_faces} face maps")));
            }
            for (i, table) in self.faces[m].iter().enumerate() {
                check_table(table, self.counts[m], self.counts[m - 1], &format!("d_{i} in dimension {m}"))?;
            }
            let want_degens = if m + 1 == n { 0 } else { m + 1 };
            if self.degens[m].len() != want_degens {
                return Err(Error::Malformed(format!("dimension {m} needs {want_degens} degeneracies")));
            }
            for (j, table) in self.degens[m].iter().enumerate() {
                check_table(table, self.counts[m], self.counts[m + 1], &format!("s_{j} in dimension {m}"))?;
            }
        }
        if let Some(b) = self.basepoint {
            if b >= self.counts[0] {
                return Err(Error::Malformed(format!("basepoint {b} out of range")));
            }
        }
        Ok(())
    }

    fn check_identities(&self) -> Result<()> {
        let top = self.trunc_dim();
        let fail = |identity: String, dim: usize, simplex: usize| Error::SimplicialIdentity { identity, dim, simplex };
        for m in 2..=top {
            for x in 0..self.counts[m] {
                for j in 1..=m {
                    for i in 0..j {
                        if self.face(m - 1, i, self.face(m, j, x)) != self.face(m - 1, j - 1, self.face(m, i, x)) {
                            return Err(fail(format!("d_{i} d_{j} = d_{} d_{i}", j - 1), m, x));
                        }
                    }
                }
            }
        }
        for m in 0..top {
            for x in 0..self.counts[m] {
                for j in 0..=m {
                    let sx = self.degen(m, j, x);
                    for i in 0..=m + 1 {
                        let lhs = self.face(m + 1, i, sx);
                        let rhs = if i == j || i == j + 1 {
                            x
                        } else if i < j {
                            self.degen(m - 1, j - 1, self.face(m, i, x))
                        } else {
                            self.degen(m - 1, j, self.face(m, i - 1, x))
                        };
                        if lhs != rhs {
                            return Err(fail(format!("d_{i} s_{j}"), m, x));
                        }
                    }
                }
                if m + 2 <= top {
                    for j in 0..=m {
                        for i in 0..=j {
                            let lhs = self.degen(m + 1, i, self.degen(m, j, x));
                            let rhs = self.degen(m + 1, j + 1, self.degen(m, i, x));
                            if lhs != rhs {
                                return Err(fail(format!("s_{i} s_{j} = s_{} s_{i}", j + 1), m, x));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a simplicial set from labeled simplices. Labels in each
    /// dimension must be distinct; `face(m, i, x)` and `degen(m, j, x)` must
    /// land on listed labels.
    pub fn from_labeled<K, F, D>(levels: Vec<Vec<K>>, face: F, degen: D, basepoint: Option<K>) -> Result<LabeledSet<K>>
    where
        K: Clone + Eq + Hash + Debug + Send + Sync,
        F: Fn(usize, usize, &K) -> K + Sync,
        D: Fn(usize, usize, &K) -> K + Sync,
    {
        let n = levels.len();
        let mut index: Vec<HashMap<K, usize>> = Vec::with_capacity(n);
        for (m, level) in levels.iter().enumerate() {
            let map: HashMap<K, usize> = level.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            if map.len() != level.len() {
                return Err(Error::Malformed(format!("duplicate labels in dimension {m}")));
            }
            index.push(map);
        }
        let lookup = |m: usize, k: &K, what: &str| -> Result<usize> {
            index[m]
                .get(k)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("{what} produced unknown {m}-simplex {k:?}")))
        };
        let mut faces = vec![Vec::new()];
        for m in 1..n {
            let tables = (0..=m)
                .into_par_iter()
                .map(|i| levels[m].iter().map(|k| lookup(m - 1, &face(m, i, k), "face")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            faces.push(tables);
        }
        let mut degens = Vec::new();
        for m in 0..n {
            if m + 1 == n {
                degens.push(Vec::new());
                continue;
            }
            let tables = (0..=m)
                .into_par_iter()
                .map(|j| levels[m].iter().map(|k| lookup(m + 1, &degen(m, j, k), "degeneracy")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            degens.push(tables);
        }
        let basepoint = match basepoint {
            Some(b) => Some(lookup(0, &b, "basepoint")?),
            None => None,
        };
        let counts = levels.iter().map(Vec::len).collect();
        let set = TruncatedSimplicialSet::new(counts, faces, degens, basepoint)?;
        Ok(LabeledSet { set, labels: levels, index })
    }

    /// The one-point simplicial set, pointed.
    pub fn point(trunc_dim: usize) -> Self {
        Self::discrete(1, trunc_dim).with_basepoint(Some(0))
    }

    /// `n` points, every higher simplex degenerate.
    pub fn discrete(n: usize, trunc_dim: usize) -> Self {
        let counts = vec![n; trunc_dim + 1];
        let id: Vec<usize> = (0..n).collect();
        let faces = (0..=trunc_dim).map(|m| if m == 0 { Vec::new() } else { vec![id.clone(); m + 1] }).collect();
        let degens = (0..=trunc_dim).map(|m| if m == trunc_dim { Vec::new() } else { vec![id.clone(); m + 1] }).collect();
        TruncatedSimplicialSet { counts, faces, degens, basepoint: None }
    }

    /// The standard simplex `Δ[n]`: `m`-simplices are weakly increasing
    /// sequences `a_0 ≤ … ≤ a_m` in `0..=n`.
    pub fn standard_simplex(n: usize, trunc_dim: usize) -> Result<LabeledSet<Vec<usize>>> {
        let mut levels: Vec<Vec<Vec<usize>>> = vec![(0..=n).map(|a| vec![a]).collect()];
        for m in 1..=trunc_dim {
            let mut next = Vec::new();
            for seq in &levels[m - 1] {
                for a in seq[m - 1]..=n {
                    let mut s = seq.clone();
                    s.push(a);
                    next.push(s);
                }
            }
            levels.push(next);
        }
        Self::from_labeled(
            levels,
            |_, i, s| drop_at(s, i),
            |_, j, s| repeat_at(s, j),
            Some(vec![0]),
        )
    }

    pub fn with_basepoint(mut self, basepoint: Option<usize>) -> Self {
        if let Some(b) = basepoint {
            assert!(b < self.counts[0], "basepoint out of range");
        }
        self.basepoint = basepoint;
        self
    }

    pub fn trunc_dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, m: usize) -> usize {
        self.counts[m]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    #[inline]
    pub fn face(&self, m: usize, i: usize, x: usize) -> usize {
        self.faces[m][i][x]
    }

    #[inline]
    pub fn degen(&self, m: usize, j: usize, x: usize) -> usize {
        self.degens[m][j][x]
    }

    pub fn faces_of(&self, m: usize, x: usize) -> Vec<usize> {
        (0..=m).map(|i| self.face(m, i, x)).collect()
    }

    /// `s_0^m v`, the totally degenerate `m`-simplex on vertex `v`.
    pub fn degenerate_vertex(&self, v: usize, m: usize) -> usize {
        (0..m).fold(v, |x, k| self.degen(k, 0, x))
    }

    /// If `x` is degenerate, some `(j, y)` with `x = s_j y`.
    pub fn degeneracy_of(&self, m: usize, x: usize) -> Option<(usize, usize)> {
        if m == 0 {
            return None;
        }
        (0..m).find_map(|j| {
            let y = self.face(m, j, x);
            (self.degen(m - 1, j, y) == x).then_some((j, y))
        })
    }

    pub fn nondegenerate(&self, m: usize) -> Vec<usize> {
        (0..self.counts[m]).filter(|&x| self.degeneracy_of(m, x).is_none()).collect()
    }

    /// Drops every dimension above `n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.trunc_dim() {
            return Err(Error::TruncationMismatch(format!("cannot truncate dimension {} to {n}", self.trunc_dim())));
        }
        let mut degens = self.degens[..=n].to_vec();
        degens[n] = Vec::new();
        Ok(TruncatedSimplicialSet {
            counts: self.counts[..=n].to_vec(),
            faces: self.faces[..=n].to_vec(),
            degens,
            basepoint: self.basepoint,
        })
    }

    /// The sub-simplicial set on the simplices flagged in `keep`, together with
    /// the original index of each kept simplex. Fails if `keep` is not closed
    /// under faces and degeneracies.
    pub fn restrict(&self, keep: &[Vec<bool>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let n = self.trunc_dim();
        let kept: Vec<Vec<usize>> = (0..=n).map(|m| (0..self.counts[m]).filter(|&x| keep[m][x]).collect()).collect();
        let mut new_index: Vec<HashMap<usize, usize>> = Vec::new();
        for level in &kept {
            new_index.push(level.iter().enumerate().map(|(i, &x)| (x, i)).collect());
        }
        let find = |m: usize, x: usize| -> Result<usize> {
            new_index[m]
                .get(&x)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("restriction is not closed: {m}-simplex {x} missing")))
        };
        let mut faces = vec![Vec::new()];
        for m in 1..=n {
            let mut tables = Vec::new();
            for i in 0..=m {
                tables.push(kept[m].iter().map(|&x| find(m - 1, self.face(m, i, x))).collect::<Result<Vec<_>>>()?);
            }
            faces.push(tables);
        }
        let mut degens = Vec::new();
        for m in 0..=n {
            let mut tables = Vec::new();
            if m < n {
                for j in 0..=m {
                    tables.push(kept[m].iter().map(|&x| find(m + 1, self.degen(m, j, x))).collect::<Result<Vec<_>>>()?);
                }
            }
            degens.push(tables);
        }
        let basepoint = self.basepoint.and_then(|b| new_index[0].get(&b).copied());
        let counts = kept.iter().map(Vec::len).collect();
        Ok((TruncatedSimplicialSet::new(counts, faces, degens, basepoint)?, kept))
    }
}

fn check_table(table: &[usize], len: usize, range: usize, what: &str) -> Result<()> {
    if table.len() != len {
        return Err(Error::Malformed(format!("{what}: table has {} entries, expected {len}", table.len())));
    }
    if let Some(&bad) = table.iter().find(|&&y| y >= range) {
        return Err(Error::Malformed(format!("{what}: entry {bad} out of range")));
    }
    Ok(())
}

pub(crate) fn drop_at<T: Clone>(s: &[T], i: usize) -> Vec<T> {
    let mut v = s.to_vec();
    v.remove(i);
    v
}

pub(crate) fn repeat_at<T: Clone>(s: &[T], j: usize) -> Vec<T> {
    let mut v = s.to_vec();
    v.insert(j, s[j].clone());
    v
}

/// Level maps `f[m]` for `m ≤ trunc_dim`. The source and target are not
/// owned; [`SimplicialMap::new`] checks the map against them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplicialMap {
    levels: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn new(source: &TruncatedSimplicialSet, target: &TruncatedSimplicialSet, levels: Vec<Vec<usize>>) -> Result<Self> {
        let f = SimplicialMap { levels };
        f.check(source, target)?;
        Ok(f)
    }

    /// Builds the map level by level from a function on simplices.
    pub fn from_fn(
        source: &TruncatedSimplicialSet,
        target: &TruncatedSimplicialSet,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let top = source.trunc_dim().min(target.trunc_dim());
        let levels = (0..=top).map(|m| (0..source.count(m)).map(|x| f(m, x)).collect()).collect();
        SimplicialMap::new(source, target, levels)
    }

    pub(crate) fn from_levels_unchecked(levels: Vec<Vec<usize>>) -> Self {
        SimplicialMap { levels }
    }

    pub fn identity(x: &TruncatedSimplicialSet) -> Self {
        SimplicialMap { levels: x.counts.iter().map(|&c| (0..c).collect()).collect() }
    }

    /// The constant map to the (unique or basepoint) vertex `v`.
    pub fn constant(source: &TruncatedSimplicialSet, target: &TruncatedSimplicialSet, v: usize) -> Result<Self> {
        Self::from_fn(source, target, |m, _| target.degenerate_vertex(v, m))
    }

    pub fn check(&self, source: &TruncatedSimplicialSet, target: &TruncatedSimplicialSet) -> Result<()> {
        let top = source.trunc_dim().min(target.trunc_dim());
        if self.levels.len() != top + 1 {
            return Err(Error::TruncationMismatch(format!(
                "map has {} levels, expected {}",
                self.levels.len(),
                top + 1
            )));
        }
        for m in 0..=top {
            check_table(&self.levels[m], source.count(m), target.count(m), &format!("map level {m}"))?;
        }
        let fail = |op: String, dim: usize, simplex: usize| Error::NotSimplicial { op, dim, simplex };
        for m in 0..=top {
            for x in 0..source.count(m) {
                let fx = self.levels[m][x];
                if m > 0 {
                    for i in 0..=m {
                        if self.levels[m - 1][source.face(m, i, x)] != target.face(m, i, fx) {
                            return Err(fail(format!("d_{i}"), m, x));
                        }
                    }
                }
                if m < top {
                    for j in 0..=m {
                        if self.levels[m + 1][source.degen(m, j, x)] != target.degen(m, j, fx) {
                            return Err(fail(format!("s_{j}"), m, x));
                        }
                    }
                }
            }
        }
        if let (Some(a), Some(b)) = (source.basepoint(), target.basepoint()) {
            if self.levels[0][a] != b {
                return Err(fail("basepoint".into(), 0, a));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, m: usize, x: usize) -> usize {
        self.levels[m][x]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn top_dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SimplicialMap) -> SimplicialMap {
        let top = self.top_dim().min(inner.top_dim());
        SimplicialMap {
            levels: (0..=top).map(|m| inner.levels[m].iter().map(|&x| self.levels[m][x]).collect()).collect(),
        }
    }

    pub fn is_bijective(&self, target: &TruncatedSimplicialSet) -> bool {
        self.levels.iter().enumerate().all(|(m, level)| {
            let mut seen = vec![false; target.count(m)];
            level.iter().all(|&y| !std::mem::replace(&mut seen[y], true)) && seen.iter().all(|&s| s)
        })
    }

    pub fn is_injective(&self) -> bool {
        self.levels.iter().all(|level| {
            let set: HashSet<usize> = level.iter().copied().collect();
            set.len() == level.len()
        })
    }
}

/// Connected components of the vertex set under the edge relation, each
/// sorted, listed by smallest vertex.
pub fn pi0(x: &TruncatedSimplicialSet) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(x.count(0));
    for e in 0..x.count(1) {
        uf.union(x.face(1, 0, e), x.face(1, 1, e));
    }
    uf.classes()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Unions the classes; the smaller root survives.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.parent.len() {
            let r = self.find(v);
            by_root.entry(r).or_default().push(v);
        }
        by_root.into_values().collect()
    }
}

/// Level-wise product; the simplex `(a, b)` has index `a * |Y_m| + b`.
pub fn product(x: &TruncatedSimplicialSet, y: &TruncatedSimplicialSet) -> Result<TruncatedSimplicialSet> {
    if x.trunc_dim() != y.trunc_dim() {
        return Err(Error::TruncationMismatch(format!(
            "product of dimensions {} and {}",
            x.trunc_dim(),
            y.trunc_dim()
        )));
    }
    let n = x.trunc_dim();
    let counts: Vec<usize> = (0..=n).map(|m| x.count(m) * y.count(m)).collect();
    let pair = |m: usize, a: usize, b: usize| a * y.count(m) + b;
    let faces = (0..=n)
        .map(|m| {
            if m == 0 {
                return Vec::new();
            }
            (0..=m)
                .map(|i| {
                    (0..counts[m])
                        .map(|p| pair(m - 1, x.face(m, i, p / y.count(m)), y.face(m, i, p % y.count(m))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..=n)
        .map(|m| {
            if m == n {
                return Vec::new();
            }
            (0..=m)
                .map(|j| {
                    (0..counts[m])
                        .map(|p| pair(m + 1, x.degen(m, j, p / y.count(m)), y.degen(m, j, p % y.count(m))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let basepoint = match (x.basepoint(), y.basepoint()) {
        (Some(a), Some(b)) => Some(pair(0, a, b)),
        _ => None,
    };
    TruncatedSimplicialSet::new(counts, faces, degens, basepoint)
}

/// Projections `X × Y → X` and `X × Y → Y` for the indexing of [`product`].
pub fn product_projections(x: &TruncatedSimplicialSet, y: &TruncatedSimplicialSet) -> (SimplicialMap, SimplicialMap) {
    let n = x.trunc_dim();
    let first = (0..=n).map(|m| (0..x.count(m) * y.count(m)).map(|p| p / y.count(m)).collect()).collect();
    let second = (0..=n).map(|m| (0..x.count(m) * y.count(m)).map(|p| p % y.count(m)).collect()).collect();
    (SimplicialMap::from_levels_unchecked(first), SimplicialMap::from_levels_unchecked(second))
}

/// The pullback of `X → Z ← Y`, with its two projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub space: LabeledSet<(usize, usize)>,
    pub to_left: SimplicialMap,
    pub to_right: SimplicialMap,
}

pub fn pullback(
    x: &TruncatedSimplicialSet,
    f: &SimplicialMap,
    y: &TruncatedSimplicialSet,
    g: &SimplicialMap,
) -> Result<Pullback> {
    if x.trunc_dim() != y.trunc_dim() {
        return Err(Error::TruncationMismatch("pullback legs have different truncations".into()));
    }
    let n = x.trunc_dim();
    let levels: Vec<Vec<(usize, usize)>> = (0..=n)
        .into_par_iter()
        .map(|m| {
            let mut over: HashMap<usize, Vec<usize>> = HashMap::new();
            for b in 0..y.count(m) {
                over.entry(g.apply(m, b)).or_default().push(b);
            }
            let mut level = Vec::new();
            for a in 0..x.count(m) {
                if let Some(bs) = over.get(&f.apply(m, a)) {
                    level.extend(bs.iter().map(|&b| (a, b)));
                }
            }
            level
        })
        .collect();
    let basepoint = match (x.basepoint(), y.basepoint()) {
        (Some(a), Some(b)) if f.apply(0, a) == g.apply(0, b) => Some((a, b)),
        _ => None,
    };
    let space = TruncatedSimplicialSet::from_labeled(
        levels,
        |m, i, &(a, b)| (x.face(m, i, a), y.face(m, i, b)),
        |m, j, &(a, b)| (x.degen(m, j, a), y.degen(m, j, b)),
        basepoint,
    )?;
    let to_left = SimplicialMap::from_levels_unchecked(space.labels.iter().map(|l| l.iter().map(|p| p.0).collect()).collect());
    let to_right = SimplicialMap::from_levels_unchecked(space.labels.iter().map(|l| l.iter().map(|p| p.1).collect()).collect());
    Ok(Pullback { space, to_left, to_right })
}

/// The `n`-th coskeleton: dimensions `≤ n` are kept, and an `m`-simplex for
/// `m > n` is a family of `m + 1` simplices of dimension `m - 1` satisfying
/// `d_i x_j = d_{j-1} x_i` for `i < j`.
pub fn coskeleton(x: &TruncatedSimplicialSet, n: usize) -> Result<TruncatedSimplicialSet> {
    let top = x.trunc_dim();
    if n > top {
        return Err(Error::DimensionBudget { have: top, need: n });
    }
    if n == top {
        return Ok(x.clone());
    }
    let mut counts = x.counts[..=n].to_vec();
    let mut faces = x.faces[..=n].to_vec();
    let mut degens: Vec<Vec<Vec<usize>>> = x.degens[..n].to_vec();
    let mut families: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
    for m in n + 1..=top {
        let prev = counts[m - 1];
        let prev_faces = &faces[m - 1];
        let face_prev = |i: usize, y: usize| prev_faces[i][y];
        let list = compatible_families(m, prev, &face_prev);
        let index: HashMap<Vec<usize>, usize> = list.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let face_tables: Vec<Vec<usize>> = (0..=m).map(|i| list.iter().map(|fam| fam[i]).collect()).collect();
        // s_j of an (m-1)-simplex y, as the family of its faces.
        let mut degen_tables = Vec::new();
        for j in 0..m {
            let table = (0..prev)
                .map(|y| {
                    let fam: Vec<usize> = (0..=m)
                        .map(|i| {
                            if i == j || i == j + 1 {
                                y
                            } else if i < j {
                                degens[m - 2][j - 1][face_prev(i, y)]
                            } else {
                                degens[m - 2][j][face_prev(i - 1, y)]
                            }
                        })
                        .collect();
                    index[&fam]
                })
                .collect();
            degen_tables.push(table);
        }
        degens.push(degen_tables);
        counts.push(list.len());
        faces.push(face_tables);
        families.push(index);
    }
    degens.push(Vec::new());
    TruncatedSimplicialSet::new(counts, faces, degens, x.basepoint)
}

/// All families `(y_0, …, y_m)` of `(m-1)`-simplices with
/// `d_i y_j = d_{j-1} y_i` for `i < j`, in lexicographic order.
fn compatible_families(m: usize, prev: usize, face: &dyn Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut fam = Vec::with_capacity(m + 1);
    fn rec(
        m: usize,
        prev: usize,
        face: &dyn Fn(usize, usize) -> usize,
        fam: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let j = fam.len();
        if j == m + 1 {
            out.push(fam.clone());
            return;
        }
        for y in 0..prev {
            let ok = m < 2 || (0..j).all(|i| face(i, y) == face(j - 1, fam[i]));
            if ok {
                fam.push(y);
                rec(m, prev, face, fam, out);
                fam.pop();
            }
        }
    }
    rec(m, prev, face, &mut fam, &mut out);
    out
}

/// A horn `Λ^m_k → X` over a simplex of the target with no filler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Horn {
    pub dim: usize,
    pub missing: usize,
    /// Faces `x_i` for `i ≠ missing`, in order.
    pub faces: Vec<usize>,
    pub target_simplex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub holds: bool,
    pub checked_up_to: usize,
    pub failing_horn: Option<Horn>,
}

/// Checks the Kan lifting condition for `f: X → Y` against every horn
/// `Λ^m_k` with `1 ≤ m ≤ up_to_dim`. Horns are enumerated exhaustively; the
/// reported witness is the first failure in enumeration order.
pub fn is_fibration(
    source: &TruncatedSimplicialSet,
    target: &TruncatedSimplicialSet,
    f: &SimplicialMap,
    up_to_dim: usize,
) -> Result<FibrationReport> {
    let top = source.trunc_dim().min(target.trunc_dim());
    if up_to_dim > top {
        return Err(Error::DimensionBudget { have: top, need: up_to_dim });
    }
    for m in 1..=up_to_dim {
        for k in 0..=m {
            if let Some(h) = unfillable_horn(source, target, f, m, k) {
                return Ok(FibrationReport { holds: false, checked_up_to: up_to_dim, failing_horn: Some(h) });
            }
        }
    }
    Ok(FibrationReport { holds: true, checked_up_to: up_to_dim, failing_horn: None })
}

fn horn_key(faces: &[usize], k: usize) -> Vec<usize> {
    faces.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect()
}

fn unfillable_horn(
    source: &TruncatedSimplicialSet,
    target: &TruncatedSimplicialSet,
    f: &SimplicialMap,
    m: usize,
    k: usize,
) -> Option<Horn> {
    let fillable: HashSet<(Vec<usize>, usize)> = (0..source.count(m))
        .map(|x| (horn_key(&source.faces_of(m, x), k), f.apply(m, x)))
        .collect();
    let mut targets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for y in 0..target.count(m) {
        targets.entry(horn_key(&target.faces_of(m, y), k)).or_default().push(y);
    }
    let positions: Vec<usize> = (0..=m).filter(|&i| i != k).collect();
    let prev = source.count(m - 1);
    // by_face[i][v]: (m-1)-simplices whose i-th face is v.
    let by_face: Vec<HashMap<usize, Vec<usize>>> = if m >= 2 {
        (0..m)
            .map(|i| {
                let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
                for y in 0..prev {
                    map.entry(source.face(m - 1, i, y)).or_default().push(y);
                }
                map
            })
            .collect()
    } else {
        Vec::new()
    };
    let ctx = HornSearch { source, f, m, positions: &positions, by_face: &by_face, fillable: &fillable, targets: &targets };
    (0..prev).into_par_iter().find_map_first(|first| {
        let mut chosen = vec![first];
        ctx.search(&mut chosen).map(|(faces, y)| Horn { dim: m, missing: k, faces, target_simplex: y })
    })
}

struct HornSearch<'a> {
    source: &'a TruncatedSimplicialSet,
    f: &'a SimplicialMap,
    m: usize,
    positions: &'a [usize],
    by_face: &'a [HashMap<usize, Vec<usize>>],
    fillable: &'a HashSet<(Vec<usize>, usize)>,
    targets: &'a HashMap<Vec<usize>, Vec<usize>>,
}

impl HornSearch<'_> {
    fn search(&self, chosen: &mut Vec<usize>) -> Option<(Vec<usize>, usize)> {
        let m = self.m;
        if chosen.len() == self.positions.len() {
            let image: Vec<usize> = chosen.iter().map(|&x| self.f.apply(m - 1, x)).collect();
            let ys = self.targets.get(&image)?;
            return ys
                .iter()
                .find(|&&y| !self.fillable.contains(&(chosen.clone(), y)))
                .map(|&y| (chosen.clone(), y));
        }
        let j = self.positions[chosen.len()];
        let (i0, x0) = (self.positions[0], chosen[0]);
        let candidates = self.by_face[i0].get(&self.source.face(m - 1, j - 1, x0))?;
        for &y in candidates {
            let compatible = self.positions[..chosen.len()]
                .iter()
                .zip(chosen.iter())
                .all(|(&i, &xi)| self.source.face(m - 1, i, y) == self.source.face(m - 1, j - 1, xi));
            if compatible {
                chosen.push(y);
                if let Some(w) = self.search(chosen) {
                    return Some(w);
                }
                chosen.pop();
            }
        }
        None
    }
}

/// Whether the edge loops at the basepoint of a connected `X` map onto `Γ`
/// under `f: X → BΓ`. Loops are generated by one edge each on top of a
/// spanning tree of the 1-skeleton; the nerve `BΓ` indexes its 1-simplices
/// by group elements.
pub fn pi1_image_onto(x: &TruncatedSimplicialSet, f: &SimplicialMap, gamma: &FiniteGroup) -> Result<bool> {
    Ok(pi1_image(x, f, gamma)?.len() == gamma.order())
}

/// The subgroup of `Γ` generated by the images of edge loops at the basepoint.
pub fn pi1_image(x: &TruncatedSimplicialSet, f: &SimplicialMap, gamma: &FiniteGroup) -> Result<Vec<Elem>> {
    let comps = pi0(x);
    if comps.len() != 1 {
        return Err(Error::NotConnected(comps.len()));
    }
    let base = x.basepoint().unwrap_or(0);
    let nv = x.count(0);
    // tree[v]: image of a tree path from the basepoint to v.
    let mut tree: Vec<Option<Elem>> = vec![None; nv];
    tree[base] = Some(gamma.identity());
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for e in 0..x.count(1) {
        adjacency[x.face(1, 1, e)].push((e, x.face(1, 0, e)));
        adjacency[x.face(1, 0, e)].push((e, x.face(1, 1, e)));
    }
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &(e, w) in &adjacency[v] {
            if tree[w].is_none() {
                let g = f.apply(1, e);
                let tv = tree[v].expect("visited");
                // An edge runs from d_1 e to d_0 e.
                tree[w] = Some(if x.face(1, 1, e) == v { gamma.mul(tv, g) } else { gamma.mul(tv, gamma.inv(g)) });
                queue.push_back(w);
            }
        }
    }
    let gens: Vec<Elem> = (0..x.count(1))
        .map(|e| {
            let (from, to) = (x.face(1, 1, e), x.face(1, 0, e));
            let t_from = tree[from].expect("connected");
            let t_to = tree[to].expect("connected");
            gamma.mul(gamma.mul(t_from, f.apply(1, e)), gamma.inv(t_to))
        })
        .collect();
    Ok(gamma.generated_subgroup(&gens))
}
