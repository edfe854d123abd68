//! Nerves, `EG`, Eilenberg–MacLane spaces, the `W`/`W̄` constructions and
//! Borel constructions for finite groups.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupHom};
use crate::simplicial::{LabeledSet, SimplicialMap, TruncatedSimplicialSet};

/// Index of a tuple over an alphabet of size `base`, most significant first.
pub(crate) fn encode(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * base + d)
}

pub(crate) fn decode(mut index: usize, len: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

fn all_tuples(len: usize, base: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..base.pow(len as u32)).map(move |i| decode(i, len, base))
}

/// Builds face and degeneracy tables from tuple-level operations, with
/// `m`-simplices indexed as tuples of length `len(m)` over `base`.
fn tuple_set(
    trunc_dim: usize,
    base: usize,
    len: impl Fn(usize) -> usize + Sync,
    face: impl Fn(usize, usize, &[usize]) -> Vec<usize> + Sync,
    degen: impl Fn(usize, usize, &[usize]) -> Vec<usize> + Sync,
    basepoint: Option<usize>,
) -> Result<TruncatedSimplicialSet> {
    let counts: Vec<usize> = (0..=trunc_dim).map(|m| base.pow(len(m) as u32)).collect();
    let faces = (0..=trunc_dim)
        .map(|m| {
            if m == 0 {
                return Vec::new();
            }
            (0..=m)
                .into_par_iter()
                .map(|i| (0..counts[m]).map(|x| encode(&face(m, i, &decode(x, len(m), base)), base)).collect())
                .collect()
        })
        .collect();
    let degens = (0..=trunc_dim)
        .map(|m| {
            if m == trunc_dim {
                return Vec::new();
            }
            (0..=m)
                .into_par_iter()
                .map(|j| (0..counts[m]).map(|x| encode(&degen(m, j, &decode(x, len(m), base)), base)).collect())
                .collect()
        })
        .collect();
    TruncatedSimplicialSet::new(counts, faces, degens, basepoint)
}

/// Face `d_i` of a nerve simplex `(g_1, …, g_m)`.
pub fn nerve_face(g: &FiniteGroup, m: usize, i: usize, t: &[Elem]) -> Vec<Elem> {
    if i == 0 {
        t[1..].to_vec()
    } else if i == m {
        t[..m - 1].to_vec()
    } else {
        let mut v = t[..i - 1].to_vec();
        v.push(g.mul(t[i - 1], t[i]));
        v.extend_from_slice(&t[i + 1..]);
        v
    }
}

/// Degeneracy `s_j`: insert the identity at position `j`.
pub fn nerve_degen(g: &FiniteGroup, j: usize, t: &[Elem]) -> Vec<Elem> {
    let mut v = t.to_vec();
    v.insert(j, g.identity());
    v
}

/// `BG`: `m`-simplices are tuples in `G^m`, indexed lexicographically, so a
/// 1-simplex has the index of its group element.
pub fn nerve(g: &FiniteGroup, trunc_dim: usize) -> Result<TruncatedSimplicialSet> {
    tuple_set(trunc_dim, g.order(), |m| m, |m, i, t| nerve_face(g, m, i, t), |_, j, t| nerve_degen(g, j, t), Some(0))
}

/// The simplex index of a nerve tuple.
pub fn nerve_index(g: &FiniteGroup, tuple: &[Elem]) -> usize {
    encode(tuple, g.order())
}

pub fn nerve_tuple(g: &FiniteGroup, m: usize, index: usize) -> Vec<Elem> {
    decode(index, m, g.order())
}

/// `Bf: BG → BH`, applied coordinatewise.
pub fn nerve_map(f: &GroupHom, trunc_dim: usize) -> Result<SimplicialMap> {
    let (g, h) = (f.source(), f.target());
    let source = nerve(g, trunc_dim)?;
    let target = nerve(h, trunc_dim)?;
    SimplicialMap::from_fn(&source, &target, |m, x| {
        let t: Vec<Elem> = nerve_tuple(g, m, x).into_iter().map(|a| f.apply(a)).collect();
        nerve_index(h, &t)
    })
}

/// `EG`: `m`-simplices are tuples `(h_0, …, h_m)`; `d_i` drops `h_i`, `s_j`
/// repeats `h_j`. The group acts by left translation.
pub fn eg(g: &FiniteGroup, trunc_dim: usize) -> Result<TruncatedSimplicialSet> {
    tuple_set(
        trunc_dim,
        g.order(),
        |m| m + 1,
        |_, i, t| crate::simplicial::drop_at(t, i),
        |_, j, t| crate::simplicial::repeat_at(t, j),
        Some(0),
    )
}

/// Left translation by `a` on `EG`.
pub fn eg_translation(g: &FiniteGroup, trunc_dim: usize, a: Elem) -> Result<SimplicialMap> {
    let e = eg(g, trunc_dim)?.with_basepoint(None);
    SimplicialMap::from_fn(&e, &e, |m, x| {
        let t: Vec<Elem> = decode(x, m + 1, g.order()).into_iter().map(|h| g.mul(a, h)).collect();
        encode(&t, g.order())
    })
}

/// `EG → BG`, `(h_0, …, h_m) ↦ (h_0⁻¹h_1, …, h_{m-1}⁻¹h_m)`.
pub fn eg_quotient(g: &FiniteGroup, trunc_dim: usize) -> Result<SimplicialMap> {
    let e = eg(g, trunc_dim)?;
    let b = nerve(g, trunc_dim)?;
    SimplicialMap::new(&e, &b, (0..=trunc_dim).map(|m| eg_quotient_level(g, m)).collect())
}

fn eg_quotient_level(g: &FiniteGroup, m: usize) -> Vec<usize> {
    all_tuples(m + 1, g.order())
        .map(|t| {
            let k: Vec<Elem> = t.windows(2).map(|w| g.mul(g.inv(w[0]), w[1])).collect();
            nerve_index(g, &k)
        })
        .collect()
}

/// A simplicial set with a group structure on each simplex set for which all
/// faces and degeneracies are homomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialFiniteGroup {
    space: TruncatedSimplicialSet,
    groups: Vec<FiniteGroup>,
}

impl SimplicialFiniteGroup {
    pub fn new(space: TruncatedSimplicialSet, groups: Vec<FiniteGroup>) -> Result<Self> {
        let n = space.trunc_dim();
        if groups.len() != n + 1 {
            return Err(Error::Malformed(format!("{} level groups for truncation {n}", groups.len())));
        }
        for (m, g) in groups.iter().enumerate() {
            if g.order() != space.count(m) {
                return Err(Error::Malformed(format!(
                    "level {m} group has order {}, simplex set has {}",
                    g.order(),
                    space.count(m)
                )));
            }
        }
        for m in 0..=n {
            let check = |target: usize, op: &dyn Fn(usize) -> usize| -> Result<()> {
                let (gs, gt) = (&groups[m], &groups[target]);
                for a in gs.elements() {
                    for b in gs.elements() {
                        if op(gs.mul(a, b)) != gt.mul(op(a), op(b)) {
                            return Err(Error::NotHomomorphism(a, b));
                        }
                    }
                }
                Ok(())
            };
            if m > 0 {
                for i in 0..=m {
                    check(m - 1, &|x| space.face(m, i, x))?;
                }
            }
            if m < n {
                for j in 0..=m {
                    check(m + 1, &|x| space.degen(m, j, x))?;
                }
            }
        }
        Ok(SimplicialFiniteGroup { space, groups })
    }

    /// The constant simplicial group on `h`.
    pub fn constant(h: &FiniteGroup, trunc_dim: usize) -> Self {
        let space = TruncatedSimplicialSet::discrete(h.order(), trunc_dim).with_basepoint(Some(0));
        SimplicialFiniteGroup { space, groups: vec![h.clone(); trunc_dim + 1] }
    }

    pub fn space(&self) -> &TruncatedSimplicialSet {
        &self.space
    }

    pub fn group(&self, m: usize) -> &FiniteGroup {
        &self.groups[m]
    }

    pub fn trunc_dim(&self) -> usize {
        self.space.trunc_dim()
    }
}

/// `(n+1)`-element subsets of `0..=m`, in lexicographic order.
fn subsets(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..=m {
            cur.push(v);
            rec(v + 1, m, size, cur, out);
            cur.pop();
        }
    }
    if size <= m + 1 {
        rec(0, m, size, &mut cur, &mut out);
    }
    out
}

/// Normalized `A`-valued `n`-cocycles on `Δ[m]` with their cochain values.
///
/// The free coordinates are the values on the `n`-simplices containing
/// vertex 0; the index of a cocycle reads them in mixed radix `|A|`, so the
/// zero cocycle is index 0 and the level group is `A^{C(m,n)}`.
#[derive(Clone, Debug)]
pub struct CocycleLevel {
    pub m: usize,
    pub simplices: Vec<Vec<usize>>,
    pub free: Vec<usize>,
    pub values: Vec<Vec<Elem>>,
}

fn cocycle_level(a: &FiniteGroup, n: usize, m: usize) -> CocycleLevel {
    let simplices = subsets(m, n + 1);
    let position: std::collections::HashMap<Vec<usize>, usize> =
        simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let free: Vec<usize> = (0..simplices.len()).filter(|&i| simplices[i][0] == 0).collect();
    let count = a.order().pow(free.len() as u32);
    let values = (0..count)
        .map(|idx| {
            let digits = decode(idx, free.len(), a.order());
            let mut c = vec![a.identity(); simplices.len()];
            for (&p, &d) in free.iter().zip(&digits) {
                c[p] = d;
            }
            for (p, s) in simplices.iter().enumerate() {
                if s[0] == 0 {
                    continue;
                }
                if n == 1 {
                    // c(ij) = c(0i)⁻¹ c(0j)
                    let ci = c[position[&vec![0, s[0]]]];
                    let cj = c[position[&vec![0, s[1]]]];
                    c[p] = a.mul(a.inv(ci), cj);
                    continue;
                }
                // δc({0} ∪ s) = 0 solved for c(s).
                let mut acc = a.identity();
                for k in 0..s.len() {
                    let mut tau = vec![0];
                    tau.extend(s.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v));
                    let v = c[position[&tau]];
                    // sign of the face dropping s[k] from {0} ∪ s is (-1)^(k+1)
                    acc = if k % 2 == 0 { a.mul(acc, v) } else { a.mul(acc, a.inv(v)) };
                }
                c[p] = acc;
            }
            c
        })
        .collect();
    CocycleLevel { m, simplices, free, values }
}

/// `K(A, n)` as the simplicial set of normalized `n`-cocycles on standard
/// simplices, without group structure. Allows nonabelian `A` when `n = 1`.
pub fn em_space_set(a: &FiniteGroup, n: usize, trunc_dim: usize) -> Result<TruncatedSimplicialSet> {
    if n == 0 {
        return Err(Error::Malformed("Eilenberg-MacLane degree must be at least 1".into()));
    }
    if n >= 2 {
        if let Some((x, y)) = a.commuting_witness() {
            return Err(Error::NotAbelian(x, y));
        }
    }
    let levels: Vec<CocycleLevel> = (0..=trunc_dim).map(|m| cocycle_level(a, n, m)).collect();
    let index: Vec<std::collections::HashMap<&Vec<Elem>, usize>> =
        levels.iter().map(|l| l.values.iter().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    // Pull a cocycle on Δ[m] back along θ: [k] → [m].
    let pull = |m: usize, k: usize, c: &[Elem], theta: &dyn Fn(usize) -> usize| -> usize {
        let target = &levels[k];
        let source = &levels[m];
        let pulled: Vec<Elem> = target
            .simplices
            .iter()
            .map(|tau| {
                let image: Vec<usize> = tau.iter().map(|&v| theta(v)).collect();
                if image.windows(2).any(|w| w[0] == w[1]) {
                    a.identity()
                } else {
                    let p = source.simplices.binary_search(&image).expect("image is an n-simplex");
                    c[p]
                }
            })
            .collect();
        index[k][&pulled]
    };
    let faces = (0..=trunc_dim)
        .map(|m| {
            if m == 0 {
                return Vec::new();
            }
            (0..=m)
                .map(|i| {
                    levels[m].values.iter().map(|c| pull(m, m - 1, c, &|v| if v < i { v } else { v + 1 })).collect()
                })
                .collect()
        })
        .collect();
    let degens = (0..=trunc_dim)
        .map(|m| {
            if m == trunc_dim {
                return Vec::new();
            }
            (0..=m)
                .map(|j| {
                    levels[m].values.iter().map(|c| pull(m, m + 1, c, &|v| if v <= j { v } else { v - 1 })).collect()
                })
                .collect()
        })
        .collect();
    let counts = levels.iter().map(|l| l.values.len()).collect();
    TruncatedSimplicialSet::new(counts, faces, degens, Some(0))
}

/// `K(A, n)` as a simplicial group: level `m` is `A^{C(m,n)}` acting on
/// cocycles pointwise.
pub fn em_space(a: &FiniteGroup, n: usize, trunc_dim: usize) -> Result<SimplicialFiniteGroup> {
    if let Some((x, y)) = a.commuting_witness() {
        return Err(Error::NotAbelian(x, y));
    }
    let space = em_space_set(a, n, trunc_dim)?;
    let groups = (0..=trunc_dim).map(|m| power(a, binomial(m, n))).collect();
    SimplicialFiniteGroup::new(space, groups)
}

/// The automorphism of `K(A, n)` induced by an automorphism `phi` of `A`.
pub fn em_automorphism(a: &FiniteGroup, n: usize, trunc_dim: usize, phi: &[Elem]) -> Vec<Vec<usize>> {
    (0..=trunc_dim)
        .map(|m| {
            let len = binomial(m, n);
            (0..a.order().pow(len as u32))
                .map(|x| {
                    let d: Vec<usize> = decode(x, len, a.order()).into_iter().map(|v| phi[v]).collect();
                    encode(&d, a.order())
                })
                .collect()
        })
        .collect()
}

pub(crate) fn binomial(m: usize, k: usize) -> usize {
    if k > m {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (m - i) / (i + 1))
}

/// `A^k` with mixed-radix indexing matching [`encode`].
pub(crate) fn power(a: &FiniteGroup, k: usize) -> FiniteGroup {
    (0..k).fold(FiniteGroup::trivial(), |acc, _| acc.direct_product(a))
}

/// `W𝒢`, `W̄𝒢` and the projection `q: W𝒢 → W̄𝒢`. Labels are coordinate
/// tuples: an `m`-simplex of `W𝒢` is `(g_m, …, g_0)` with `g_k ∈ 𝒢_k`, and
/// of `W̄𝒢` is `(g_{m-1}, …, g_0)`.
#[derive(Clone, Debug)]
pub struct WConstruction {
    pub w: LabeledSet<Vec<Elem>>,
    pub wbar: LabeledSet<Vec<Elem>>,
    pub q: SimplicialMap,
}

fn w_face(g: &SimplicialFiniteGroup, n: usize, i: usize, t: &[Elem]) -> Vec<Elem> {
    let sp = g.space();
    let mut out = Vec::with_capacity(n);
    if i == n {
        for p in 0..n {
            out.push(sp.face(n - p, n - p, t[p]));
        }
        return out;
    }
    for p in 0..i {
        out.push(sp.face(n - p, i - p, t[p]));
    }
    let k = n - i - 1;
    out.push(g.group(k).mul(sp.face(n - i, 0, t[i]), t[i + 1]));
    out.extend_from_slice(&t[i + 2..]);
    out
}

fn w_degen(g: &SimplicialFiniteGroup, n: usize, i: usize, t: &[Elem]) -> Vec<Elem> {
    let sp = g.space();
    let mut out = Vec::with_capacity(n + 2);
    for p in 0..=i {
        out.push(sp.degen(n - p, i - p, t[p]));
    }
    out.push(g.group(n - i).identity());
    out.extend_from_slice(&t[i + 1..]);
    out
}

fn wbar_face(g: &SimplicialFiniteGroup, n: usize, i: usize, t: &[Elem]) -> Vec<Elem> {
    if i == 0 {
        t[1..].to_vec()
    } else {
        w_face(g, n - 1, i - 1, t)
    }
}

fn wbar_degen(g: &SimplicialFiniteGroup, n: usize, i: usize, t: &[Elem]) -> Vec<Elem> {
    if i == 0 {
        let mut out = vec![g.group(n).identity()];
        out.extend_from_slice(t);
        out
    } else {
        w_degen(g, n - 1, i - 1, t)
    }
}

fn coordinate_tuples(g: &SimplicialFiniteGroup, top: usize) -> Vec<Vec<Elem>> {
    // (g_top, …, g_0), lexicographic.
    let mut acc: Vec<Vec<Elem>> = vec![Vec::new()];
    for k in (0..=top).rev() {
        acc = acc
            .into_iter()
            .flat_map(|t| {
                (0..g.group(k).order()).map(move |x| {
                    let mut v = t.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    acc
}

pub fn w_and_wbar(g: &SimplicialFiniteGroup) -> Result<WConstruction> {
    let n = g.trunc_dim();
    let w_levels: Vec<Vec<Vec<Elem>>> = (0..=n).map(|m| coordinate_tuples(g, m)).collect();
    let wbar_levels: Vec<Vec<Vec<Elem>>> =
        (0..=n).map(|m| if m == 0 { vec![Vec::new()] } else { coordinate_tuples(g, m - 1) }).collect();
    let w = TruncatedSimplicialSet::from_labeled(
        w_levels,
        |m, i, t| w_face(g, m, i, t),
        |m, j, t| w_degen(g, m, j, t),
        Some(vec![g.group(0).identity()]),
    )?;
    let wbar = TruncatedSimplicialSet::from_labeled(
        wbar_levels,
        |m, i, t| wbar_face(g, m, i, t),
        |m, j, t| wbar_degen(g, m, j, t),
        Some(Vec::new()),
    )?;
    let q = SimplicialMap::from_fn(&w.set, &wbar.set, |m, x| {
        wbar.index_of(m, &w.label(m, x)[1..].to_vec()).expect("tail of a W-simplex")
    })?;
    Ok(WConstruction { w, wbar, q })
}

/// A group acting on a simplicial set by simplicial automorphisms.
#[derive(Clone, Debug)]
pub struct SimplicialAction {
    group: FiniteGroup,
    maps: Vec<SimplicialMap>,
}

impl SimplicialAction {
    /// `maps[g]` is the automorphism for element `g`; checked to be an action.
    pub fn new(group: FiniteGroup, space: &TruncatedSimplicialSet, maps: Vec<SimplicialMap>) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(Error::ActionInvalid(format!("{} maps for a group of order {}", maps.len(), group.order())));
        }
        let n = space.trunc_dim();
        for (g, f) in maps.iter().enumerate() {
            let unpointed = space.clone().with_basepoint(None);
            f.check(&unpointed, &unpointed)
                .map_err(|e| Error::ActionInvalid(format!("element {g}: {e}")))?;
        }
        if maps[group.identity()] != SimplicialMap::identity(space) {
            return Err(Error::ActionInvalid("identity does not act trivially".into()));
        }
        for a in group.elements() {
            for b in group.elements() {
                let ab = group.mul(a, b);
                for m in 0..=n {
                    for x in 0..space.count(m) {
                        if maps[a].apply(m, maps[b].apply(m, x)) != maps[ab].apply(m, x) {
                            return Err(Error::ActionInvalid(format!(
                                "({a}*{b}) and {a} after {b} differ on {m}-simplex {x}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(SimplicialAction { group, maps })
    }

    pub fn trivial(group: &FiniteGroup, space: &TruncatedSimplicialSet) -> Self {
        SimplicialAction { group: group.clone(), maps: vec![SimplicialMap::identity(space); group.order()] }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    #[inline]
    pub fn act(&self, g: Elem, m: usize, x: usize) -> usize {
        self.maps[g].apply(m, x)
    }

    pub fn map(&self, g: Elem) -> &SimplicialMap {
        &self.maps[g]
    }
}

/// The Borel construction `EG ×_G Z` with its projection to `BG`.
///
/// The orbit of `((h_0, …, h_m), z)` is represented by the normalized key
/// `(k, h_0⁻¹ z)` with `k = (h_0⁻¹h_1, …, h_{m-1}⁻¹h_m)`, stored at index
/// `nerve_index(k) · |Z_m| + z`.
#[derive(Clone, Debug)]
pub struct Borel {
    pub space: TruncatedSimplicialSet,
    pub projection: SimplicialMap,
}

pub fn borel(z: &TruncatedSimplicialSet, action: &SimplicialAction) -> Result<Borel> {
    let g = action.group();
    let n = z.trunc_dim();
    let base = g.order();
    let counts: Vec<usize> = (0..=n).map(|m| base.pow(m as u32) * z.count(m)).collect();
    let split = |m: usize, x: usize| (x / z.count(m), x % z.count(m));
    let faces = (0..=n)
        .map(|m| {
            if m == 0 {
                return Vec::new();
            }
            (0..=m)
                .map(|i| {
                    (0..counts[m])
                        .map(|x| {
                            let (k, zz) = split(m, x);
                            let tuple = decode(k, m, base);
                            let zf = z.face(m, i, zz);
                            let zf = if i == 0 { action.act(g.inv(tuple[0]), m - 1, zf) } else { zf };
                            encode(&nerve_face(g, m, i, &tuple), base) * z.count(m - 1) + zf
                        })
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
                        .map(|x| {
                            let (k, zz) = split(m, x);
                            let tuple = decode(k, m, base);
                            encode(&nerve_degen(g, j, &tuple), base) * z.count(m + 1) + z.degen(m, j, zz)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let space = TruncatedSimplicialSet::new(counts, faces, degens, z.basepoint())?;
    let b = nerve(g, n)?;
    let projection = SimplicialMap::new(
        &space.clone().with_basepoint(None),
        &b.clone().with_basepoint(None),
        (0..=n).map(|m| (0..space.count(m)).map(|x| x / z.count(m)).collect()).collect(),
    )?;
    Ok(Borel { space, projection })
}

/// `G` acting on the discrete simplicial set `G` by left translation.
pub fn translation_action(g: &FiniteGroup, trunc_dim: usize) -> Result<(TruncatedSimplicialSet, SimplicialAction)> {
    let z = TruncatedSimplicialSet::discrete(g.order(), trunc_dim);
    let maps = g
        .elements()
        .map(|a| SimplicialMap::from_fn(&z, &z, |_, x| g.mul(a, x)))
        .collect::<Result<Vec<_>>>()?;
    let action = SimplicialAction::new(g.clone(), &z, maps)?;
    Ok((z, action))
}
