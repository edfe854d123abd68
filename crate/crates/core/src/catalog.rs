//! Standard small groups and a corpus of extensions of order at most 16.
//!
//! Groups are generated from explicit element labels, so homomorphisms can be
//! written in terms of the labels rather than table indices.

use std::hash::Hash;

use crate::error::{Error, Result};
use crate::group::{Elem, Extension, FiniteGroup, GroupHom};

/// A group together with the label of each element index.
#[derive(Clone, Debug)]
pub struct Labeled<T> {
    pub group: FiniteGroup,
    pub labels: Vec<T>,
}

impl<T: Clone + Eq + Hash> Labeled<T> {
    fn generate(identity: T, gens: &[T], op: impl Fn(&T, &T) -> T) -> Self {
        let (group, labels) = FiniteGroup::from_generators(identity, gens, op).expect("closure of a valid group law");
        Labeled { group, labels }
    }

    pub fn index_of(&self, label: &T) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    /// Elements whose label satisfies `pred`.
    pub fn select(&self, pred: impl Fn(&T) -> bool) -> Vec<Elem> {
        (0..self.labels.len()).filter(|&i| pred(&self.labels[i])).collect()
    }
}

pub fn symmetric(n: usize) -> Labeled<Vec<u8>> {
    assert!((1..=6).contains(&n));
    let id: Vec<u8> = (0..n as u8).collect();
    let mut gens = Vec::new();
    if n > 1 {
        let mut t = id.clone();
        t.swap(0, 1);
        let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
        gens.push(t);
        gens.push(cycle);
    }
    Labeled::generate(id, &gens, compose_perm)
}

pub fn alternating4() -> Labeled<Vec<u8>> {
    Labeled::generate(vec![0, 1, 2, 3], &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]], compose_perm)
}

fn compose_perm(p: &Vec<u8>, q: &Vec<u8>) -> Vec<u8> {
    q.iter().map(|&i| p[i as usize]).collect()
}

pub fn permutation_sign(p: &[u8]) -> usize {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2
}

/// Dihedral group of order `2n`, labels `(k, j)` for `r^k s^j`.
pub fn dihedral(n: usize) -> Labeled<(usize, usize)> {
    Labeled::generate((0, 0), &[(1 % n, 0), (0, 1)], move |&(k1, j1), &(k2, j2)| {
        let k = if j1 == 0 { k1 + k2 } else { k1 + n - k2 };
        (k % n, (j1 + j2) % 2)
    })
}

/// Dicyclic group of order `4n` (`x^2 = a^n`, `x a x^{-1} = a^{-1}`);
/// `n = 2` is the quaternion group, `n = 4` the generalized quaternion group of order 16.
pub fn dicyclic(n: usize) -> Labeled<(usize, usize)> {
    let m = 2 * n;
    Labeled::generate((0, 0), &[(1, 0), (0, 1)], move |&(k1, j1), &(k2, j2)| match (j1, j2) {
        (0, _) => ((k1 + k2) % m, j2),
        (1, 0) => ((k1 + m - k2) % m, 1),
        _ => ((k1 + m - k2 + n) % m, 0),
    })
}

pub fn quaternion8() -> Labeled<(usize, usize)> {
    dicyclic(2)
}

/// Semidihedral group of order 16: `a^8 = x^2 = 1`, `x a x = a^3`.
pub fn semidihedral16() -> Labeled<(usize, usize)> {
    Labeled::generate((0, 0), &[(1, 0), (0, 1)], |&(k1, j1), &(k2, j2)| {
        let twist = if j1 == 0 { 1 } else { 3 };
        ((k1 + twist * k2) % 8, (j1 + j2) % 2)
    })
}

/// `Z/n ⋊ Z/m` where the generator of `Z/m` acts by multiplication with `r`.
pub fn semidirect_cyclic(n: usize, m: usize, r: usize) -> Labeled<(usize, usize)> {
    assert_eq!(mod_pow(r, m, n), 1 % n, "r^m must be 1 mod n");
    Labeled::generate((0, 0), &[(1 % n, 0), (0, 1 % m)], move |&(a, b), &(c, d)| {
        ((a + mod_pow(r, b, n) * c) % n, (b + d) % m)
    })
}

fn mod_pow(base: usize, exp: usize, modulus: usize) -> usize {
    (0..exp).fold(1 % modulus, |acc, _| acc * base % modulus)
}

/// Projection onto the quotient by a normal subgroup. Cosets are ordered by
/// their smallest element, so the identity coset is index 0.
pub fn quotient(group: &FiniteGroup, normal: &[Elem]) -> Result<GroupHom> {
    let normal = group.generated_subgroup(normal);
    if !group.is_normal(&normal) {
        return Err(Error::NotClosed(normal[normal.len() - 1]));
    }
    let mut coset_of = vec![usize::MAX; group.order()];
    let mut reps = Vec::new();
    for g in group.elements() {
        if coset_of[g] == usize::MAX {
            let idx = reps.len();
            reps.push(g);
            for &n in &normal {
                coset_of[group.mul(g, n)] = idx;
            }
        }
    }
    let mul = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| coset_of[group.mul(a, b)]).collect())
        .collect();
    let q = FiniteGroup::from_table(mul)?;
    GroupHom::new(group.clone(), q, coset_of)
}

fn ext_by_normal(group: &FiniteGroup, normal_gens: &[Elem]) -> Extension {
    let proj = quotient(group, normal_gens).expect("normal subgroup");
    Extension::from_projection(proj).expect("quotient sequences are exact")
}

pub fn ext_s3_sign() -> Extension {
    let s3 = symmetric(3);
    let a3 = s3.select(|p| permutation_sign(p) == 0);
    ext_by_normal(&s3.group, &a3)
}

pub fn ext_quaternion_mod_i(q8: &Labeled<(usize, usize)>) -> Extension {
    ext_by_normal(&q8.group, &q8.select(|&(_, j)| j == 0))
}

fn product_elem(right_order: usize, a: Elem, b: Elem) -> Elem {
    a * right_order + b
}

/// A named list of small groups used by property tests.
pub fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    let z2 = FiniteGroup::cyclic(2);
    vec![
        ("1", FiniteGroup::trivial()),
        ("Z2", z2.clone()),
        ("Z3", FiniteGroup::cyclic(3)),
        ("Z4", FiniteGroup::cyclic(4)),
        ("V4", z2.direct_product(&z2)),
        ("Z6", FiniteGroup::cyclic(6)),
        ("S3", symmetric(3).group),
        ("D4", dihedral(4).group),
        ("Q8", quaternion8().group),
        ("A4", alternating4().group),
    ]
}

/// Resolves a builtin group name such as `Z4`, `S3`, `D4`, `Q8`, `V4`,
/// `Dic3`, `SD16`, `A4`, `Z2xS3`, or `Z4:Z4`.
pub fn builtin(name: &str) -> Option<FiniteGroup> {
    if let Some((a, b)) = name.split_once('x') {
        if !a.is_empty() && !b.is_empty() && !name.starts_with("Dic") {
            return Some(builtin(a)?.direct_product(&builtin(b)?));
        }
    }
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    Some(match name {
        "1" | "trivial" => FiniteGroup::trivial(),
        "V4" => builtin("Z2xZ2")?,
        "Q8" => quaternion8().group,
        "Q16" => dicyclic(4).group,
        "SD16" => semidihedral16().group,
        "A4" => alternating4().group,
        "Z4:Z4" => semidirect_cyclic(4, 4, 3).group,
        "Z3:Z4" => semidirect_cyclic(3, 4, 2).group,
        _ => {
            if let Some(n) = num("Z").filter(|&n| n > 0) {
                FiniteGroup::cyclic(n)
            } else if let Some(n) = num("S").filter(|n| (1..=5).contains(n)) {
                symmetric(n).group
            } else if let Some(n) = num("Dic").filter(|&n| n > 0) {
                dicyclic(n).group
            } else if let Some(n) = num("D").filter(|&n| n > 0) {
                dihedral(n).group
            } else {
                return None;
            }
        }
    })
}

/// Extensions with total group of order at most 16, covering split and
/// non-split sequences, abelian and nonabelian kernels, and sequences with
/// no sections at all.
pub fn extension_corpus() -> Vec<(String, Extension)> {
    let mut out: Vec<(String, Extension)> = Vec::new();
    let mut push = |name: &str, ext: Extension| out.push((name.to_string(), ext));
    let z = FiniteGroup::cyclic;
    let z2 = z(2);

    push("S3/A3", ext_s3_sign());
    let q8 = quaternion8();
    push("Q8/<i>", ext_quaternion_mod_i(&q8));
    push("Q8/<-1>", ext_by_normal(&q8.group, &q8.select(|&l| l == (2, 0))));
    push("Q8/Q8", ext_by_normal(&q8.group, &[1, 2]));
    let v4 = z2.direct_product(&z2);
    push("V4/Z2", ext_by_normal(&v4, &[product_elem(2, 0, 1)]));
    push("V4/diag", ext_by_normal(&v4, &[product_elem(2, 1, 1)]));
    push("Z2/1", ext_by_normal(&z2, &[]));
    push("Z4/Z2", ext_by_normal(&z(4), &[2]));
    push("Z6/Z3", ext_by_normal(&z(6), &[2]));
    push("Z6/Z2", ext_by_normal(&z(6), &[3]));
    push("Z8/Z4", ext_by_normal(&z(8), &[2]));
    push("Z8/Z2", ext_by_normal(&z(8), &[4]));
    let z4z2 = z(4).direct_product(&z2);
    push("Z4xZ2/<(0,1)>", ext_by_normal(&z4z2, &[product_elem(2, 0, 1)]));
    push("Z4xZ2/<(2,0),(0,1)>", ext_by_normal(&z4z2, &[product_elem(2, 2, 0), product_elem(2, 0, 1)]));
    push("Z4xZ2/<(1,0)>", ext_by_normal(&z4z2, &[product_elem(2, 1, 0)]));
    let s3 = symmetric(3);
    push("S3/S3", ext_by_normal(&s3.group, &[1, 2]));
    let d4 = dihedral(4);
    push("D4/<r>", ext_by_normal(&d4.group, &d4.select(|&(_, j)| j == 0)));
    push("D4/<r^2>", ext_by_normal(&d4.group, &d4.select(|&l| l == (2, 0))));
    push("D4/<r^2,s>", ext_by_normal(&d4.group, &d4.select(|&(k, j)| j == 0 && k % 2 == 0 || j == 1 && k % 2 == 0)));
    let a4 = alternating4();
    push("A4/V4", ext_by_normal(&a4.group, &a4.select(|p| p.iter().enumerate().all(|(i, &x)| x as usize != i) || p == &vec![0, 1, 2, 3])));
    let d6 = dihedral(6);
    push("D6/<r>", ext_by_normal(&d6.group, &d6.select(|&(_, j)| j == 0)));
    push("D6/<r^3>", ext_by_normal(&d6.group, &d6.select(|&l| l == (3, 0))));
    let dic3 = dicyclic(3);
    push("Dic3/<a>", ext_by_normal(&dic3.group, &dic3.select(|&(_, j)| j == 0)));
    push("Dic3/<a^2>", ext_by_normal(&dic3.group, &dic3.select(|&l| l == (2, 0))));
    let s3z2 = s3.group.direct_product(&z2);
    let a3 = s3.select(|p| permutation_sign(p) == 0);
    push("S3xZ2/Z3", ext_by_normal(&s3z2, &a3.iter().map(|&a| product_elem(2, a, 0)).collect::<Vec<_>>()));
    let z2s3 = z2.direct_product(&s3.group);
    push("Z2xS3/S3", ext_by_normal(&z2s3, &(0..6).map(|b| product_elem(6, 0, b)).collect::<Vec<_>>()));
    let z2q8 = z2.direct_product(&q8.group);
    push("Z2xQ8/Q8", ext_by_normal(&z2q8, &(0..8).map(|b| product_elem(8, 0, b)).collect::<Vec<_>>()));
    let q8z2 = q8.group.direct_product(&z2);
    push("Q8xZ2/Z2", ext_by_normal(&q8z2, &[product_elem(2, 0, 1)]));
    let d4z2 = d4.group.direct_product(&z2);
    push("D4xZ2/Z2", ext_by_normal(&d4z2, &[product_elem(2, 0, 1)]));
    let z4z4 = semidirect_cyclic(4, 4, 3);
    push("Z4:Z4/<a>", ext_by_normal(&z4z4.group, &z4z4.select(|&(_, b)| b == 0)));
    let z2_3 = v4.direct_product(&z2);
    push("Z2^3/Z2^2", ext_by_normal(&z2_3, &[1, 2]));
    let z2_4 = v4.direct_product(&v4);
    push("Z2^4/Z2^2", ext_by_normal(&z2_4, &[1, 2]));
    let d8 = dihedral(8);
    push("D8/<r>", ext_by_normal(&d8.group, &d8.select(|&(_, j)| j == 0)));
    let q16 = dicyclic(4);
    push("Q16/<a>", ext_by_normal(&q16.group, &q16.select(|&(_, j)| j == 0)));
    let sd16 = semidihedral16();
    push("SD16/<a>", ext_by_normal(&sd16.group, &sd16.select(|&(_, j)| j == 0)));
    out
}

/// Looks up a corpus extension by name.
pub fn corpus_extension(name: &str) -> Option<Extension> {
    extension_corpus().into_iter().find(|(n, _)| n == name).map(|(_, e)| e)
}

/// Automorphism of an abelian group given by `x ↦ x^k`, as an element table.
pub fn power_map(group: &FiniteGroup, k: usize) -> Vec<Elem> {
    group.elements().map(|x| group.pow(x, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(symmetric(3).group.order(), 6);
        assert_eq!(alternating4().group.order(), 12);
        assert_eq!(dihedral(4).group.order(), 8);
        assert_eq!(quaternion8().group.order(), 8);
        assert_eq!(dicyclic(4).group.order(), 16);
        assert_eq!(semidihedral16().group.order(), 16);
        assert_eq!(semidirect_cyclic(4, 4, 3).group.order(), 16);
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = quaternion8().group;
        assert_eq!(q.elements().filter(|&x| q.element_order(x) == 2).count(), 1);
        assert!(!q.is_abelian());
    }

    #[test]
    fn builtin_names() {
        for (name, order) in [("Z5", 5), ("S3", 6), ("D4", 8), ("Q8", 8), ("V4", 4), ("Z2xS3", 12), ("Dic3", 12), ("SD16", 16)] {
            assert_eq!(builtin(name).unwrap().order(), order, "{name}");
        }
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn corpus_is_large_and_small() {
        let corpus = extension_corpus();
        assert!(corpus.len() >= 25);
        assert!(corpus.iter().all(|(_, e)| e.total().order() <= 16));
        let names: std::collections::BTreeSet<&str> = corpus.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names.len(), corpus.len());
    }

    #[test]
    fn a4_quotient_is_z3() {
        let e = corpus_extension("A4/V4").unwrap();
        assert_eq!(e.kernel().order(), 4);
        assert_eq!(e.quotient().order(), 3);
    }
}
