//! Exhaustive search for simplicial maps `S → T`, optionally over a common
//! base `B` and with some simplices pinned.
//!
//! Only nondegenerate simplices are searched; images of degenerate simplices
//! are forced by the degeneracies. Vertices come first, then edges one at a
//! time, and each edge is followed by every higher simplex whose faces are now
//! all determined, so incompatible choices are pruned early.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simplicial::{SimplicialMap, TruncatedSimplicialSet};

const UNSET: usize = usize::MAX;

/// Default cap on search nodes per branch.
pub const DEFAULT_NODE_BUDGET: usize = 50_000_000;

pub struct MapSearch<'a> {
    source: &'a TruncatedSimplicialSet,
    target: &'a TruncatedSimplicialSet,
    over: Option<(&'a SimplicialMap, &'a SimplicialMap)>,
    fixed: HashMap<(usize, usize), usize>,
    node_budget: usize,
}

impl<'a> MapSearch<'a> {
    pub fn new(source: &'a TruncatedSimplicialSet, target: &'a TruncatedSimplicialSet) -> Self {
        MapSearch { source, target, over: None, fixed: HashMap::new(), node_budget: DEFAULT_NODE_BUDGET }
    }

    /// Restricts to maps commuting with `source_over: S → B` and
    /// `target_over: T → B`.
    pub fn over(mut self, source_over: &'a SimplicialMap, target_over: &'a SimplicialMap) -> Self {
        self.over = Some((source_over, target_over));
        self
    }

    /// Pins the image of the `m`-simplex `x`.
    pub fn fix(mut self, m: usize, x: usize, image: usize) -> Self {
        self.fixed.insert((m, x), image);
        self
    }

    /// Pins the source basepoint to the target basepoint.
    pub fn pointed(self) -> Self {
        match (self.source.basepoint(), self.target.basepoint()) {
            (Some(a), Some(b)) => self.fix(0, a, b),
            _ => self,
        }
    }

    pub fn node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    fn top(&self) -> usize {
        self.source.trunc_dim().min(self.target.trunc_dim())
    }

    /// Every map, in depth-first order of the search.
    pub fn all(&self) -> Result<Vec<SimplicialMap>> {
        self.run(None)
    }

    pub fn first(&self) -> Result<Option<SimplicialMap>> {
        Ok(self.run(Some(1))?.into_iter().next())
    }

    pub fn exists(&self) -> Result<bool> {
        Ok(self.first()?.is_some())
    }

    fn run(&self, limit: Option<usize>) -> Result<Vec<SimplicialMap>> {
        let plan = Plan::new(self);
        let mut state = State::new(self.source, self.top());
        // Walk forced steps until the first branching point.
        let mut step = 0;
        let mut nodes = 0usize;
        while step < plan.order.len() {
            let cands = plan.candidates(self, &state, step);
            match cands.len() {
                0 => return Ok(Vec::new()),
                1 => {
                    state.set(plan.order[step], cands[0]);
                    step += 1;
                    nodes += 1;
                }
                _ => break,
            }
        }
        if step == plan.order.len() {
            return Ok(vec![state.to_map(self.source, self.target, self.top())]);
        }
        let branches = plan.candidates(self, &state, step);
        let at = plan.order[step];
        let budget = self.node_budget.saturating_sub(nodes);
        let results: Vec<Result<Vec<SimplicialMap>>> = match limit {
            Some(k) => {
                let found = branches.par_iter().find_map_first(|&c| {
                    let mut s = state.clone();
                    s.set(at, c);
                    match plan.dfs(self, s, step + 1, Some(k), budget) {
                        Ok(v) if v.is_empty() => None,
                        other => Some(other),
                    }
                });
                found.into_iter().collect()
            }
            None => branches
                .par_iter()
                .map(|&c| {
                    let mut s = state.clone();
                    s.set(at, c);
                    plan.dfs(self, s, step + 1, None, budget)
                })
                .collect(),
        };
        let mut out = Vec::new();
        for r in results {
            out.extend(r?);
        }
        if let Some(k) = limit {
            out.truncate(k);
        }
        Ok(out)
    }
}

struct Plan {
    order: Vec<(usize, usize)>,
    /// Degenerate simplices: `x = s_j y` recorded as `(j, y)`.
    recipe: Vec<Vec<Option<(usize, usize)>>>,
    /// Target simplices keyed by (faces, base image).
    index: Vec<HashMap<(Vec<usize>, usize), Vec<usize>>>,
    vertices_over: HashMap<usize, Vec<usize>>,
}

impl Plan {
    fn new(search: &MapSearch) -> Self {
        let (s, t) = (search.source, search.target);
        let top = search.top();
        let recipe: Vec<Vec<Option<(usize, usize)>>> =
            (0..=top).map(|m| (0..s.count(m)).map(|x| s.degeneracy_of(m, x)).collect()).collect();
        let root = |m: usize, x: usize| -> (usize, usize) {
            let (mut m, mut x) = (m, x);
            while let Some((_, y)) = recipe[m][x] {
                m -= 1;
                x = y;
            }
            (m, x)
        };
        let mut pending: HashMap<(usize, usize), usize> = HashMap::new();
        let mut dependents: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for m in 2..=top {
            for x in 0..s.count(m) {
                if recipe[m][x].is_some() {
                    continue;
                }
                let mut deps: Vec<(usize, usize)> = (0..=m).map(|i| root(m - 1, s.face(m, i, x))).collect();
                deps.sort_unstable();
                deps.dedup();
                pending.insert((m, x), deps.len());
                for d in deps {
                    dependents.entry(d).or_default().push((m, x));
                }
            }
        }
        let mut order = Vec::new();
        let mut scheduled = std::collections::HashSet::new();
        let mut schedule = |r: (usize, usize), order: &mut Vec<(usize, usize)>| {
            let mut queue = vec![r];
            while let Some(r) = queue.pop() {
                if !scheduled.insert(r) {
                    continue;
                }
                order.push(r);
                if let Some(ds) = dependents.get(&r) {
                    let mut ready = Vec::new();
                    for d in ds {
                        let p = pending.get_mut(d).expect("registered");
                        *p -= 1;
                        if *p == 0 {
                            ready.push(*d);
                        }
                    }
                    // Lowest dimension and index first.
                    ready.sort_unstable_by(|a, b| b.cmp(a));
                    queue.extend(ready);
                }
            }
        };
        for v in 0..s.count(0) {
            schedule((0, v), &mut order);
        }
        if top >= 1 {
            for e in 0..s.count(1) {
                if recipe[1][e].is_none() {
                    schedule((1, e), &mut order);
                }
            }
        }
        let base_of = |m: usize, y: usize| search.over.map_or(0, |(_, to)| to.apply(m, y));
        let index = (0..=top)
            .map(|m| {
                let mut map: HashMap<(Vec<usize>, usize), Vec<usize>> = HashMap::new();
                if m > 0 {
                    for y in 0..t.count(m) {
                        map.entry((t.faces_of(m, y), base_of(m, y))).or_default().push(y);
                    }
                }
                map
            })
            .collect();
        let mut vertices_over: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..t.count(0) {
            vertices_over.entry(base_of(0, v)).or_default().push(v);
        }
        Plan { order, recipe, index, vertices_over }
    }

    fn candidates(&self, search: &MapSearch, state: &State, step: usize) -> Vec<usize> {
        let (m, x) = self.order[step];
        let base = search.over.map_or(0, |(so, _)| so.apply(m, x));
        let found: &[usize] = if m == 0 {
            self.vertices_over.get(&base).map_or(&[], Vec::as_slice)
        } else {
            let faces: Vec<usize> = (0..=m).map(|i| state.value(self, search.target, m - 1, search.source.face(m, i, x))).collect();
            self.index[m].get(&(faces, base)).map_or(&[], Vec::as_slice)
        };
        match search.fixed.get(&(m, x)) {
            Some(v) => found.iter().copied().filter(|y| y == v).collect(),
            None => found.to_vec(),
        }
    }

    fn dfs(
        &self,
        search: &MapSearch,
        mut state: State,
        start: usize,
        limit: Option<usize>,
        budget: usize,
    ) -> Result<Vec<SimplicialMap>> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut nodes = 0usize;
        let mut step = start;
        loop {
            if step == self.order.len() {
                out.push(state.to_map(search.source, search.target, search.top()));
                if limit.is_some_and(|k| out.len() >= k) {
                    return Ok(out);
                }
            } else {
                nodes += 1;
                if nodes > budget {
                    return Err(Error::Budget(format!("map search exceeded {} nodes", search.node_budget)));
                }
                stack.push((self.candidates(search, &state, step), 0));
            }
            // Advance to the next untried candidate, backtracking as needed.
            loop {
                if stack.is_empty() {
                    return Ok(out);
                }
                let at = start + stack.len() - 1;
                let (cands, pos) = stack.last_mut().expect("nonempty");
                if *pos < cands.len() {
                    let c = cands[*pos];
                    *pos += 1;
                    state.set(self.order[at], c);
                    step = at + 1;
                    break;
                }
                state.clear(self.order[at]);
                stack.pop();
            }
        }
    }
}

#[derive(Clone)]
struct State {
    assign: Vec<Vec<usize>>,
}

impl State {
    fn new(source: &TruncatedSimplicialSet, top: usize) -> Self {
        State { assign: (0..=top).map(|m| vec![UNSET; source.count(m)]).collect() }
    }

    fn set(&mut self, (m, x): (usize, usize), v: usize) {
        self.assign[m][x] = v;
    }

    fn clear(&mut self, (m, x): (usize, usize)) {
        self.assign[m][x] = UNSET;
    }

    fn value(&self, plan: &Plan, target: &TruncatedSimplicialSet, m: usize, x: usize) -> usize {
        match plan.recipe[m][x] {
            Some((j, y)) => target.degen(m - 1, j, self.value(plan, target, m - 1, y)),
            None => {
                debug_assert_ne!(self.assign[m][x], UNSET, "simplex ({m}, {x}) used before assignment");
                self.assign[m][x]
            }
        }
    }

    fn to_map(&self, source: &TruncatedSimplicialSet, target: &TruncatedSimplicialSet, top: usize) -> SimplicialMap {
        // Fill degenerate simplices dimension by dimension.
        let mut levels = self.assign.clone();
        for m in 1..=top {
            for x in 0..source.count(m) {
                if levels[m][x] == UNSET {
                    let (j, y) = source.degeneracy_of(m, x).expect("nondegenerate simplices are assigned");
                    levels[m][x] = target.degen(m - 1, j, levels[m - 1][y]);
                }
            }
        }
        SimplicialMap::from_levels_unchecked(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::classifying::{nerve, nerve_tuple};
    use crate::group::FiniteGroup;

    /// Homomorphisms by brute force over all functions `G → H`.
    fn hom_count_oracle(g: &FiniteGroup, h: &FiniteGroup) -> usize {
        let n = g.order();
        let total = h.order().pow(n as u32);
        (0..total)
            .filter(|&code| {
                let f = crate::classifying::decode(code, n, h.order());
                g.elements().all(|a| g.elements().all(|b| f[g.mul(a, b)] == h.mul(f[a], f[b])))
            })
            .count()
    }

    #[test]
    fn nerve_maps_are_homomorphisms() {
        let s3 = catalog::symmetric(3).group;
        let d4 = catalog::dihedral(4).group;
        let q8 = catalog::quaternion8().group;
        let z2 = FiniteGroup::cyclic(2);
        let z4 = FiniteGroup::cyclic(4);
        let v4 = z2.direct_product(&z2);
        let pairs = [(&z2, &d4), (&z4, &q8), (&v4, &s3), (&s3, &s3), (&s3, &FiniteGroup::cyclic(6)), (&d4, &z2), (&z4, &z4)];
        for (g, h) in pairs {
            let (bg, bh) = (nerve(g, 3).unwrap(), nerve(h, 3).unwrap());
            let maps = MapSearch::new(&bg, &bh).pointed().all().unwrap();
            assert_eq!(maps.len(), hom_count_oracle(g, h));
            for f in &maps {
                f.check(&bg, &bh).unwrap();
                // The map is the nerve of its action on 1-simplices.
                for x in 0..bg.count(2) {
                    let t = nerve_tuple(g, 2, x);
                    let img = nerve_tuple(h, 2, f.apply(2, x));
                    assert_eq!(img, vec![f.apply(1, t[0]), f.apply(1, t[1])]);
                }
            }
        }
    }

    #[test]
    fn pinned_simplices_restrict() {
        let z3 = FiniteGroup::cyclic(3);
        let b = nerve(&z3, 2).unwrap();
        let all = MapSearch::new(&b, &b).all().unwrap();
        assert_eq!(all.len(), 3);
        let fixed = MapSearch::new(&b, &b).fix(1, 1, 2).all().unwrap();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].apply(1, 2), 1);
        assert!(!MapSearch::new(&b, &b).fix(1, 1, 1).fix(1, 2, 1).exists().unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let d = TruncatedSimplicialSet::discrete(8, 2);
        let target = TruncatedSimplicialSet::discrete(3, 2);
        let r = MapSearch::new(&d, &target).node_budget(100).all();
        assert!(matches!(r, Err(Error::Budget(_))));
        assert_eq!(MapSearch::new(&d, &target).all().unwrap().len(), 3usize.pow(8));
    }
}
