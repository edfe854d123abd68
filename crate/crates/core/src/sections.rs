//! Sections of group extensions up to kernel conjugacy, and `π₀` of mapping
//! spaces over `BG`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifying::{borel, nerve, nerve_map, Borel, SimplicialAction};
use crate::error::{Error, Result};
use crate::group::{orbits, Elem, Extension, FiniteGroup, GroupHom};
use crate::maps::MapSearch;
use crate::simplicial::{is_fibration, product, SimplicialMap, TruncatedSimplicialSet, UnionFind};

/// All homomorphic sections of an extension, grouped into kernel-conjugacy
/// classes. Sections are image tables `s[g]`, sorted lexicographically; each
/// class lists indices into `sections` and its representative is the first.
#[derive(Clone, Debug, Serialize)]
pub struct SectionClassSet {
    #[serde(skip)]
    pub extension: Extension,
    pub sections: Vec<Vec<Elem>>,
    pub classes: Vec<Vec<usize>>,
}

impl SectionClassSet {
    pub fn total_section_count(&self) -> usize {
        self.sections.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn representatives(&self) -> Vec<GroupHom> {
        self.classes.iter().map(|c| self.section_hom(c[0])).collect()
    }

    pub fn section_hom(&self, i: usize) -> GroupHom {
        GroupHom::new(self.extension.quotient().clone(), self.extension.total().clone(), self.sections[i].clone())
            .expect("enumerated sections are homomorphisms")
    }

    /// Index of the class containing the section with image table `s`.
    pub fn class_of(&self, s: &[Elem]) -> Option<usize> {
        let i = self.sections.binary_search_by(|t| t.as_slice().cmp(s)).ok()?;
        self.classes.iter().position(|c| c.contains(&i))
    }
}

/// Lifts each generator of the quotient to every preimage and keeps the
/// assignments that extend to a homomorphism splitting the projection.
pub fn enumerate_sections(ext: &Extension) -> SectionClassSet {
    let g = ext.quotient();
    let pi = ext.total();
    let proj = ext.projection();
    let gens = g.generators();
    let mut fibers: Vec<Vec<Elem>> = vec![Vec::new(); g.order()];
    for x in pi.elements() {
        fibers[proj.apply(x)].push(x);
    }
    let choices: Vec<&[Elem]> = gens.iter().map(|&a| fibers[a].as_slice()).collect();
    let total: usize = choices.iter().map(|c| c.len()).product();
    let mut sections: Vec<Vec<Elem>> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut rest = code;
            let lifts: Vec<Elem> = choices
                .iter()
                .rev()
                .map(|c| {
                    let v = c[rest % c.len()];
                    rest /= c.len();
                    v
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            extend_to_hom(g, pi, &gens, &lifts)
        })
        .collect();
    sections.sort();
    let kernel = ext.kernel_elements();
    let indexed: Vec<usize> = (0..sections.len()).collect();
    let position: HashMap<&Vec<Elem>, usize> = sections.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let classes = orbits(&indexed, &kernel, |k, &i| {
        let conj: Vec<Elem> = sections[i].iter().map(|&x| pi.conj(k, x)).collect();
        position[&conj]
    });
    SectionClassSet { extension: ext.clone(), sections, classes }
}

/// The homomorphism `G → π` sending `gens[i]` to `lifts[i]`, if one exists.
fn extend_to_hom(g: &FiniteGroup, pi: &FiniteGroup, gens: &[Elem], lifts: &[Elem]) -> Option<Vec<Elem>> {
    let mut s = vec![usize::MAX; g.order()];
    s[g.identity()] = pi.identity();
    let mut queue = vec![g.identity()];
    while let Some(x) = queue.pop() {
        for (&a, &la) in gens.iter().zip(lifts) {
            let y = g.mul(x, a);
            let sy = pi.mul(s[x], la);
            if s[y] == usize::MAX {
                s[y] = sy;
                queue.push(y);
            } else if s[y] != sy {
                return None;
            }
        }
    }
    let is_hom = g.elements().all(|a| g.elements().all(|b| s[g.mul(a, b)] == pi.mul(s[a], s[b])));
    is_hom.then_some(s)
}

/// A tower of extensions: level `i+1` maps onto level `i` by
/// `pi_transitions[i]` on total groups and `g_transitions[i]` on quotients.
#[derive(Clone, Debug)]
pub struct ExtensionTower {
    levels: Vec<Extension>,
    pi_transitions: Vec<GroupHom>,
    g_transitions: Vec<GroupHom>,
}

impl ExtensionTower {
    pub fn new(levels: Vec<Extension>, pi_transitions: Vec<GroupHom>, g_transitions: Vec<GroupHom>) -> Result<Self> {
        if levels.is_empty() || pi_transitions.len() + 1 != levels.len() || g_transitions.len() + 1 != levels.len() {
            return Err(Error::IncompatibleTower("a tower of d levels needs d-1 transitions on each side".into()));
        }
        for i in 0..levels.len() - 1 {
            let (lo, hi) = (&levels[i], &levels[i + 1]);
            let (tp, tg) = (&pi_transitions[i], &g_transitions[i]);
            if tp.source() != hi.total() || tp.target() != lo.total() || tg.source() != hi.quotient() || tg.target() != lo.quotient() {
                return Err(Error::IncompatibleTower(format!("transition {i} has the wrong source or target")));
            }
            if let Some(w) = tp.surjectivity_witness().or_else(|| tg.surjectivity_witness()) {
                return Err(Error::IncompatibleTower(format!("transition {i} misses element {w}")));
            }
            for x in hi.total().elements() {
                if lo.projection().apply(tp.apply(x)) != tg.apply(hi.projection().apply(x)) {
                    return Err(Error::IncompatibleTower(format!("square {i} does not commute at element {x}")));
                }
            }
        }
        Ok(ExtensionTower { levels, pi_transitions, g_transitions })
    }

    /// The same extension at every level, identity transitions.
    pub fn constant(ext: &Extension, depth: usize) -> Self {
        ExtensionTower {
            levels: vec![ext.clone(); depth],
            pi_transitions: vec![GroupHom::identity(ext.total()); depth - 1],
            g_transitions: vec![GroupHom::identity(ext.quotient()); depth - 1],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &Extension {
        &self.levels[i]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerSectionReport {
    /// `counts[d-1]` is the number of compatible families of section classes
    /// over levels `0..d`.
    pub counts: Vec<usize>,
    pub class_counts: Vec<usize>,
    /// `descend[i][c]` is the class at level `i` below class `c` of level `i+1`.
    pub descend: Vec<Vec<usize>>,
    pub non_increasing: bool,
}

/// Pushes each section down the tower; fails if some section does not
/// induce a section one level lower.
pub fn tower_sections(tower: &ExtensionTower) -> Result<TowerSectionReport> {
    let sets: Vec<SectionClassSet> = tower.levels.iter().map(enumerate_sections).collect();
    let mut descend = Vec::new();
    for i in 0..tower.depth() - 1 {
        let (tp, tg) = (&tower.pi_transitions[i], &tower.g_transitions[i]);
        let (hi, lo) = (&sets[i + 1], &sets[i]);
        let glo = tower.levels[i].quotient();
        let mut down = Vec::new();
        for class in &hi.classes {
            let s = &hi.sections[class[0]];
            let mut induced = vec![usize::MAX; glo.order()];
            for (x, &sx) in s.iter().enumerate() {
                let (gx, px) = (tg.apply(x), tp.apply(sx));
                if induced[gx] == usize::MAX {
                    induced[gx] = px;
                } else if induced[gx] != px {
                    return Err(Error::IncompatibleTower(format!(
                        "section class {} at level {} does not descend",
                        down.len(),
                        i + 1
                    )));
                }
            }
            let c = lo.class_of(&induced).ok_or_else(|| {
                Error::IncompatibleTower(format!("image of a level-{} section is not a section", i + 1))
            })?;
            down.push(c);
        }
        descend.push(down);
    }
    let mut counts = Vec::new();
    for d in 1..=tower.depth() {
        // Families over levels 0..d are determined by their top class.
        counts.push(sets[d - 1].class_count());
    }
    let non_increasing = counts.windows(2).all(|w| w[1] <= w[0]);
    Ok(TowerSectionReport { counts, class_counts: sets.iter().map(|s| s.class_count()).collect(), descend, non_increasing })
}

/// Vertices and connected components of the mapping space of maps
/// `BG → Y` over `BG`.
#[derive(Clone, Debug)]
pub struct HomotopyClasses {
    pub maps: Vec<SimplicialMap>,
    /// Indices into `maps`, each class sorted, classes by smallest member.
    pub classes: Vec<Vec<usize>>,
}

impl HomotopyClasses {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The class of a map `BG → Y` over `BG`.
    pub fn class_of(&self, f: &SimplicialMap) -> Option<usize> {
        let i = self.maps.iter().position(|g| g == f)?;
        self.classes.iter().position(|c| c.contains(&i))
    }
}

/// `π₀` of the space of maps `BG → Y` over `BG`, where `p: Y → BG` must be
/// a Kan fibration up to the truncation dimension.
pub fn pi0_map_over_bg(g: &FiniteGroup, target: &TruncatedSimplicialSet, p: &SimplicialMap) -> Result<HomotopyClasses> {
    let n = target.trunc_dim();
    if n < 2 {
        return Err(Error::DimensionBudget { have: n, need: 2 });
    }
    let bg = nerve(g, n)?;
    p.check(&target.clone().with_basepoint(None), &bg.clone().with_basepoint(None))?;
    let report = is_fibration(target, &bg, p, n)?;
    if let Some(h) = report.failing_horn {
        return Err(Error::NotFibrant { dim: h.dim, horn: h.faces });
    }
    let id = SimplicialMap::identity(&bg);
    let maps = MapSearch::new(&bg, target).over(&id, p).all()?;
    let classes = homotopy_classes(&bg, target, p, &maps)?;
    Ok(HomotopyClasses { maps, classes })
}

/// Union of maps joined by a homotopy `BG × Δ[1] → Y` over `BG`.
fn homotopy_classes(
    bg: &TruncatedSimplicialSet,
    target: &TruncatedSimplicialSet,
    p: &SimplicialMap,
    maps: &[SimplicialMap],
) -> Result<Vec<Vec<usize>>> {
    let n = target.trunc_dim();
    let interval = TruncatedSimplicialSet::standard_simplex(1, n)?;
    let cyl = product(bg, &interval.set)?;
    let width: Vec<usize> = (0..=n).map(|m| interval.set.count(m)).collect();
    let to_bg = SimplicialMap::from_levels_unchecked(
        (0..=n).map(|m| (0..cyl.count(m)).map(|x| x / width[m]).collect()).collect(),
    );
    let end = |m: usize, v: usize| interval.index_of(m, &vec![v; m + 1]).expect("constant sequence");
    let mut uf = UnionFind::new(maps.len());
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if uf.find(i) == uf.find(j) {
                continue;
            }
            let mut search = MapSearch::new(&cyl, target).over(&to_bg, p);
            for m in 0..=n {
                for x in 0..bg.count(m) {
                    search = search
                        .fix(m, x * width[m] + end(m, 0), maps[i].apply(m, x))
                        .fix(m, x * width[m] + end(m, 1), maps[j].apply(m, x));
                }
            }
            if search.exists()? {
                uf.union(i, j);
            }
        }
    }
    Ok(uf.classes())
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfinsectionReport {
    pub section_classes: usize,
    pub total_sections: usize,
    pub hfp_classes: usize,
    /// `bijection[c]` is the homotopy class of `B s` for the representative of
    /// section class `c`.
    pub bijection: Vec<usize>,
    pub pass: bool,
}

/// Compares kernel-conjugacy classes of sections with `π₀` of the mapping
/// space `BG → Bπ` over `BG`, computed independently, and checks that
/// `s ↦ [B s]` is a well-defined bijection.
pub fn verify_profinsection(ext: &Extension, trunc_dim: usize) -> Result<ProfinsectionReport> {
    let sections = enumerate_sections(ext);
    let g = ext.quotient();
    let bpi = nerve(ext.total(), trunc_dim)?;
    let p = nerve_map(ext.projection(), trunc_dim)?;
    let hfp = pi0_map_over_bg(g, &bpi, &p)?;
    let class_of_section = |i: usize| -> Result<Option<usize>> {
        let bs = nerve_map(&sections.section_hom(i), trunc_dim)?;
        Ok(hfp.class_of(&bs))
    };
    let mut bijection = Vec::new();
    let mut well_defined = true;
    for class in &sections.classes {
        let images = class.iter().map(|&i| class_of_section(i)).collect::<Result<Vec<_>>>()?;
        well_defined &= images.iter().all(|c| c.is_some() && *c == images[0]);
        bijection.push(images[0].unwrap_or(usize::MAX));
    }
    let mut hit = vec![false; hfp.class_count()];
    let mut injective = true;
    for &c in &bijection {
        if c < hit.len() {
            injective &= !std::mem::replace(&mut hit[c], true);
        }
    }
    let pass = well_defined
        && injective
        && hit.iter().all(|&h| h)
        && sections.class_count() == hfp.class_count();
    Ok(ProfinsectionReport {
        section_classes: sections.class_count(),
        total_sections: sections.total_section_count(),
        hfp_classes: hfp.class_count(),
        bijection,
        pass,
    })
}

/// Homotopy orbits `Y ×_G EG → BG`.
pub fn homotopy_orbits(y: &TruncatedSimplicialSet, action: &SimplicialAction) -> Result<Borel> {
    borel(y, action)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaReport {
    /// `images[c]` is the homotopy class assigned to fixed component `c`.
    pub images: Vec<usize>,
    pub hfp_classes: usize,
    pub surjective: bool,
    pub injective: bool,
}

/// The map `π₀(fixed points) → π₀(homotopy fixed points)` induced by
/// `assignment`, which sends each fixed vertex to its homotopy class.
/// Vertices in one component must share a class.
pub fn eta_pi0(fixed_components: &[Vec<usize>], hfp_classes: usize, assignment: &HashMap<usize, usize>) -> Result<EtaReport> {
    let mut images = Vec::with_capacity(fixed_components.len());
    for comp in fixed_components {
        let mut class = None;
        for &v in comp {
            let c = *assignment.get(&v).ok_or(Error::UnassignedVertex(v))?;
            if c >= hfp_classes {
                return Err(Error::Malformed(format!("vertex {v} assigned to class {c} of {hfp_classes}")));
            }
            match class {
                None => class = Some(c),
                Some(d) if d != c => {
                    return Err(Error::Malformed(format!("component of vertex {v} meets classes {d} and {c}")))
                }
                _ => {}
            }
        }
        images.push(class.unwrap_or(0));
    }
    let mut seen = vec![false; hfp_classes];
    let mut injective = true;
    for &c in &images {
        injective &= !std::mem::replace(&mut seen[c], true);
    }
    Ok(EtaReport { images, hfp_classes, surjective: seen.iter().all(|&s| s), injective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::classifying::translation_action;
    use crate::simplicial::pi0;

    fn count_sections_naive(ext: &Extension) -> usize {
        // Every function G → π, filtered; feasible for |π|^|G| small.
        let (g, pi) = (ext.quotient(), ext.total());
        let total = pi.order().pow(g.order() as u32);
        (0..total)
            .filter(|&code| {
                let s = crate::classifying::decode(code, g.order(), pi.order());
                g.elements().all(|x| ext.projection().apply(s[x]) == x)
                    && g.elements().all(|a| g.elements().all(|b| s[g.mul(a, b)] == pi.mul(s[a], s[b])))
            })
            .count()
    }

    #[test]
    fn spec_examples() {
        let s = enumerate_sections(&catalog::ext_s3_sign());
        assert_eq!((s.total_section_count(), s.class_count()), (3, 1));
        let q = enumerate_sections(&catalog::ext_quaternion_mod_i(&catalog::quaternion8()));
        assert_eq!(q.total_section_count(), 0);
        let v = enumerate_sections(&catalog::corpus_extension("V4/Z2").unwrap());
        assert_eq!((v.total_section_count(), v.class_count()), (2, 2));
    }

    #[test]
    fn section_counts_match_naive() {
        for (name, ext) in catalog::extension_corpus() {
            let (g, pi) = (ext.quotient(), ext.total());
            if (pi.order() as f64).powi(g.order() as i32) > 2e6 {
                continue;
            }
            let s = enumerate_sections(&ext);
            assert_eq!(s.total_section_count(), count_sections_naive(&ext), "{name}");
            assert_eq!(s.class_sizes().iter().sum::<usize>(), s.total_section_count());
            for r in s.representatives() {
                assert_eq!(ext.projection().compose(&r).unwrap(), GroupHom::identity(g));
            }
        }
    }

    #[test]
    fn class_counts_survive_relabeling() {
        let ext = catalog::corpus_extension("D4/<r^2>").unwrap();
        let before = enumerate_sections(&ext).class_count();
        let n = ext.total().order();
        // Reverse all non-identity labels.
        let perm: Vec<Elem> = (0..n).map(|x| if x == 0 { 0 } else { n - x }).collect();
        let relabeled = ext.total().relabel(&perm).unwrap();
        let proj = GroupHom::new(
            relabeled.clone(),
            ext.quotient().clone(),
            (0..n).map(|y| ext.projection().apply(perm.iter().position(|&p| p == y).unwrap())).collect(),
        )
        .unwrap();
        let ext2 = Extension::from_projection(proj).unwrap();
        assert_eq!(enumerate_sections(&ext2).class_count(), before);
    }

    #[test]
    fn hfp_examples() {
        let g = catalog::symmetric(3).group;
        let b = nerve(&g, 3).unwrap();
        let id = SimplicialMap::identity(&b);
        assert_eq!(pi0_map_over_bg(&g, &b, &id).unwrap().class_count(), 1);
        let r = verify_profinsection(&catalog::ext_s3_sign(), 3).unwrap();
        assert!(r.pass);
        assert_eq!((r.section_classes, r.hfp_classes), (1, 1));
        let r = verify_profinsection(&catalog::ext_quaternion_mod_i(&catalog::quaternion8()), 3).unwrap();
        assert!(r.pass);
        assert_eq!(r.hfp_classes, 0);
        let r = verify_profinsection(&catalog::corpus_extension("V4/Z2").unwrap(), 3).unwrap();
        assert_eq!((r.section_classes, r.hfp_classes, r.pass), (2, 2, true));
    }

    #[test]
    fn non_fibrant_target_rejected() {
        let z2 = FiniteGroup::cyclic(2);
        let d1 = TruncatedSimplicialSet::standard_simplex(1, 2).unwrap().set;
        let b = nerve(&z2, 2).unwrap();
        let c = SimplicialMap::constant(&d1, &b, 0).unwrap();
        // Δ[1] over BZ/2: edges over the identity only, so no lift of the
        // nontrivial edge exists.
        assert!(matches!(pi0_map_over_bg(&z2, &d1, &c), Err(Error::NotFibrant { .. })));
    }

    #[test]
    fn tower_section_examples() {
        let s3 = catalog::ext_s3_sign();
        let r = tower_sections(&ExtensionTower::constant(&s3, 3)).unwrap();
        assert_eq!(r.counts, vec![1, 1, 1]);
        let q8 = catalog::quaternion8();
        let top = catalog::ext_quaternion_mod_i(&q8);
        let bottom = catalog::corpus_extension("Z2/1").unwrap();
        let tp = GroupHom::new(top.total().clone(), bottom.total().clone(), top.projection().images().to_vec()).unwrap();
        let tg = GroupHom::identity(top.quotient());
        let tower = ExtensionTower::new(vec![bottom.clone(), top], vec![tp], vec![tg]).unwrap();
        let r = tower_sections(&tower).unwrap();
        assert_eq!(r.counts, vec![1, 0]);
        assert!(r.non_increasing);
        assert_eq!(tower_sections(&ExtensionTower::constant(&bottom, 1)).unwrap().counts, vec![1]);
    }

    #[test]
    fn homotopy_orbit_examples() {
        let g = catalog::symmetric(3).group;
        let pt = TruncatedSimplicialSet::point(3);
        let h = homotopy_orbits(&pt, &SimplicialAction::trivial(&g, &pt)).unwrap();
        assert_eq!(h.space, nerve(&g, 3).unwrap());
        let (z, action) = translation_action(&g, 2).unwrap();
        let h = homotopy_orbits(&z, &action).unwrap();
        assert_eq!(pi0(&h.space).len(), 1);
    }

    #[test]
    fn homotopy_orbits_of_split_kernel_match_sections() {
        // Z/2 acting on B(Z/3) by inversion: the Borel construction is
        // B(Z/3 ⋊ Z/2) = BS₃ over BZ/2.
        let z2 = FiniteGroup::cyclic(2);
        let z3 = FiniteGroup::cyclic(3);
        let by = nerve(&z3, 3).unwrap();
        let inv = crate::classifying::nerve_map(&GroupHom::from_fn(&z3, &z3, |x| z3.inv(x)).unwrap(), 3).unwrap();
        let action = SimplicialAction::new(z2.clone(), &by, vec![SimplicialMap::identity(&by), inv]).unwrap();
        let h = homotopy_orbits(&by, &action).unwrap();
        let classes = pi0_map_over_bg(&z2, &h.space, &h.projection).unwrap();
        assert_eq!(classes.class_count(), enumerate_sections(&catalog::ext_s3_sign()).class_count());
    }

    #[test]
    fn eta_examples() {
        let comps = vec![vec![0], vec![1]];
        let a: HashMap<usize, usize> = [(0, 0), (1, 1)].into();
        let r = eta_pi0(&comps, 2, &a).unwrap();
        assert!(r.surjective && r.injective);
        let r = eta_pi0(&[], 1, &HashMap::new()).unwrap();
        assert!(!r.surjective);
        assert!(eta_pi0(&[], 0, &HashMap::new()).unwrap().surjective);
        assert_eq!(eta_pi0(&comps, 2, &[(0, 0)].into()), Err(Error::UnassignedVertex(1)));
    }
}
