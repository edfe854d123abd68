//! Cohomology of finite groups with coefficients in finite modules, from
//! normalized bar cochains.
//!
//! The module is split into its `p`-primary parts. Each part is written as
//! `⊕ Z/p^{a_i}` and the cochain complex is handled as a submodule problem
//! over `Z/p^k` with `k = max a_i`: cocycles are the kernel of a rescaled
//! coboundary matrix, and the invariants of `Z/B` are read off from the
//! orders of `p^t Z + B`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{orbits, Elem, Extension, FiniteGroup};

/// A finite abelian group `M` with a left action of `G` by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    group: FiniteGroup,
    module: FiniteGroup,
    action: Vec<Vec<Elem>>,
}

impl GModule {
    pub fn new(group: FiniteGroup, module: FiniteGroup, action: Vec<Vec<Elem>>) -> Result<Self> {
        if let Some((a, b)) = module.commuting_witness() {
            return Err(Error::NotAbelian(a, b));
        }
        check_action(&group, &module, &action)?;
        Ok(GModule { group, module, action })
    }

    pub fn trivial(group: &FiniteGroup, module: &FiniteGroup) -> Result<Self> {
        let id: Vec<Elem> = module.elements().collect();
        GModule::new(group.clone(), module.clone(), vec![id; group.order()])
    }

    /// The kernel of an extension with abelian kernel, acted on by
    /// conjugation through any lift.
    pub fn from_extension(ext: &Extension) -> Result<Self> {
        let (pi, g, a) = (ext.total(), ext.quotient(), ext.kernel());
        let inc = ext.inclusion();
        let preimage: HashMap<Elem, Elem> = a.elements().map(|x| (inc.apply(x), x)).collect();
        let mut lift = vec![usize::MAX; g.order()];
        for x in pi.elements() {
            let q = ext.projection().apply(x);
            if lift[q] == usize::MAX {
                lift[q] = x;
            }
        }
        let action = g
            .elements()
            .map(|h| a.elements().map(|x| preimage[&pi.conj(lift[h], inc.apply(x))]).collect())
            .collect();
        GModule::new(g.clone(), a.clone(), action)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn module(&self) -> &FiniteGroup {
        &self.module
    }

    #[inline]
    pub fn act(&self, g: Elem, m: Elem) -> Elem {
        self.action[g][m]
    }

    pub fn action(&self) -> &[Vec<Elem>] {
        &self.action
    }
}

fn check_action(group: &FiniteGroup, module: &FiniteGroup, action: &[Vec<Elem>]) -> Result<()> {
    if action.len() != group.order() || action.iter().any(|r| r.len() != module.order()) {
        return Err(Error::ActionInvalid("action table has the wrong shape".into()));
    }
    for (g, phi) in action.iter().enumerate() {
        for a in module.elements() {
            for b in module.elements() {
                if phi[module.mul(a, b)] != module.mul(phi[a], phi[b]) {
                    return Err(Error::ActionInvalid(format!("element {g} does not act by a homomorphism")));
                }
            }
        }
        let mut seen = vec![false; module.order()];
        if phi.iter().any(|&y| y >= module.order() || std::mem::replace(&mut seen[y], true)) {
            return Err(Error::ActionInvalid(format!("element {g} does not act bijectively")));
        }
    }
    if action[group.identity()].iter().enumerate().any(|(x, &y)| x != y) {
        return Err(Error::ActionInvalid("identity acts nontrivially".into()));
    }
    for g in group.elements() {
        for h in group.elements() {
            let gh = group.mul(g, h);
            if module.elements().any(|m| action[g][action[h][m]] != action[gh][m]) {
                return Err(Error::ActionInvalid(format!("action law fails for ({g}, {h})")));
            }
        }
    }
    Ok(())
}

/// A finite abelian group described by its invariant factors
/// `d_1 | d_2 | …`, all greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub invariant_factors: Vec<usize>,
    pub elementary_divisors: Vec<usize>,
}

impl AbelianInvariants {
    pub fn from_elementary_divisors(mut divisors: Vec<usize>) -> Self {
        divisors.retain(|&d| d > 1);
        divisors.sort_unstable();
        // Group prime powers by prime, largest first, then multiply across
        // primes position by position.
        let mut by_prime: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &d in &divisors {
            by_prime.entry(smallest_prime_factor(d)).or_default().push(d);
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1usize; len];
        for powers in by_prime.values() {
            for (i, &q) in powers.iter().rev().enumerate() {
                factors[len - 1 - i] *= q;
            }
        }
        AbelianInvariants { invariant_factors: factors, elementary_divisors: divisors }
    }

    pub fn trivial() -> Self {
        AbelianInvariants { invariant_factors: Vec::new(), elementary_divisors: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.invariant_factors.iter().product()
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..=n).find(|p| n % p == 0).unwrap_or(n)
}

/// A basis of the `p`-part of `M`: elements `b_i` of order `p^{a_i}` with
/// `M_p = ⊕ ⟨b_i⟩`, and the coordinates of every element of `M_p`.
struct PrimaryBasis {
    p: u64,
    exponents: Vec<u32>,
    basis: Vec<Elem>,
    coords: HashMap<Elem, Vec<u64>>,
}

fn primary_parts(m: &FiniteGroup) -> Vec<PrimaryBasis> {
    let n = m.order();
    let mut primes = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            primes.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    primes.into_iter().map(|p| primary_basis(m, p)).collect()
}

fn primary_basis(m: &FiniteGroup, p: usize) -> PrimaryBasis {
    let part: Vec<Elem> = m.elements().filter(|&x| is_power_of(m.element_order(x), p)).collect();
    let size = part.len();
    // Search for a basis with elements of non-increasing order.
    fn search(m: &FiniteGroup, part: &[Elem], size: usize, chosen: &mut Vec<Elem>, span: usize) -> bool {
        if span == size {
            return true;
        }
        let max_order = chosen.last().map_or(usize::MAX, |&b| m.element_order(b));
        let mut candidates: Vec<Elem> = part.iter().copied().filter(|&x| x != 0 && m.element_order(x) <= max_order).collect();
        candidates.sort_by_key(|&x| std::cmp::Reverse(m.element_order(x)));
        let best = candidates.first().map_or(1, |&x| m.element_order(x));
        for x in candidates.into_iter().take_while(|&x| m.element_order(x) == best) {
            chosen.push(x);
            let new_span = m.generated_subgroup(chosen).len();
            if new_span == span * m.element_order(x) && search(m, part, size, chosen, new_span) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut basis = Vec::new();
    assert!(search(m, &part, size, &mut basis, 1), "finite abelian p-groups have a basis");
    let exponents: Vec<u32> = basis.iter().map(|&b| m.element_order(b).trailing_zeros_base(p)).collect();
    let mut coords = HashMap::new();
    let orders: Vec<usize> = basis.iter().map(|&b| m.element_order(b)).collect();
    let total: usize = orders.iter().product();
    for code in 0..total {
        let mut rest = code;
        let mut c = Vec::with_capacity(basis.len());
        let mut x = m.identity();
        for (&b, &o) in basis.iter().zip(&orders) {
            let k = rest % o;
            rest /= o;
            c.push(k as u64);
            x = m.mul(x, m.pow(b, k));
        }
        coords.insert(x, c);
    }
    PrimaryBasis { p: p as u64, exponents, basis, coords }
}

trait BaseValuation {
    fn trailing_zeros_base(self, p: usize) -> u32;
}

impl BaseValuation for usize {
    fn trailing_zeros_base(mut self, p: usize) -> u32 {
        let mut v = 0;
        while self > 1 && self % p == 0 {
            self /= p;
            v += 1;
        }
        v
    }
}

fn is_power_of(mut n: usize, p: usize) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Arithmetic in `Z/p^k`.
#[derive(Clone, Copy)]
struct Local {
    p: u64,
    k: u32,
    q: u64,
}

impl Local {
    fn new(p: u64, k: u32) -> Self {
        Local { p, k, q: p.pow(k) }
    }

    fn val(&self, mut x: u64) -> u32 {
        x %= self.q;
        if x == 0 {
            return self.k;
        }
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    fn inv_unit(&self, u: u64) -> u64 {
        let (mut a, mut b) = (u as i128 % self.q as i128, self.q as i128);
        let (mut x0, mut x1) = (1i128, 0i128);
        while b != 0 {
            let t = a / b;
            (a, b) = (b, a - t * b);
            (x0, x1) = (x1, x0 - t * x1);
        }
        x0.rem_euclid(self.q as i128) as u64
    }

    fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }
}

/// Column-major matrix over `Z/p^k`.
#[derive(Clone)]
struct Matrix {
    rows: usize,
    cols: Vec<Vec<u64>>,
}

impl Matrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols: vec![vec![0; rows]; cols] }
    }

    fn from_columns(rows: usize, cols: Vec<Vec<u64>>) -> Self {
        Matrix { rows, cols }
    }
}

/// Diagonal valuations of the Smith form; if `track` is set, also the column
/// transform `V` with `U A V = D`.
fn smith(r: Local, mut a: Matrix, track: bool) -> (Vec<u32>, Option<Vec<Vec<u64>>>) {
    let n = a.cols.len();
    let mut v: Option<Vec<Vec<u64>>> = track.then(|| {
        (0..n)
            .map(|j| {
                let mut c = vec![0; n];
                c[j] = 1;
                c
            })
            .collect()
    });
    let mut diag = Vec::new();
    let mut t = 0;
    while t < n.min(a.rows) {
        // Pivot of least valuation in the remaining block.
        let mut best: Option<(u32, usize, usize)> = None;
        for j in t..n {
            for i in t..a.rows {
                let x = a.cols[j][i];
                if x != 0 {
                    let vv = r.val(x);
                    if best.is_none_or(|(bv, _, _)| vv < bv) {
                        best = Some((vv, i, j));
                        if vv == 0 {
                            break;
                        }
                    }
                }
            }
            if best.is_some_and(|(bv, _, _)| bv == 0) {
                break;
            }
        }
        let Some((pv, pi, pj)) = best else { break };
        a.cols.swap(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap(t, pj);
        }
        for col in a.cols.iter_mut().skip(t) {
            col.swap(t, pi);
        }
        // Normalize the pivot to p^pv.
        let unit = a.cols[t][t] / r.p.pow(pv);
        let uinv = r.inv_unit(unit % r.q);
        for x in a.cols[t].iter_mut() {
            *x = *x * uinv % r.q;
        }
        if let Some(v) = v.as_mut() {
            for x in v[t].iter_mut() {
                *x = *x * uinv % r.q;
            }
        }
        let pivot = r.p.pow(pv);
        // Clear row t with column operations.
        for j in t + 1..n {
            let x = a.cols[j][t];
            if x == 0 {
                continue;
            }
            let f = x / pivot;
            let (left, right) = a.cols.split_at_mut(j);
            let ct = &left[t];
            for (y, &z) in right[0].iter_mut().zip(ct.iter()) {
                *y = (*y + r.q - f * z % r.q) % r.q;
            }
            if let Some(v) = v.as_mut() {
                let (left, right) = v.split_at_mut(j);
                for (y, &z) in right[0].iter_mut().zip(left[t].iter()) {
                    *y = (*y + r.q - f * z % r.q) % r.q;
                }
            }
        }
        // Clear column t with row operations.
        let ct = a.cols[t].clone();
        for i in t + 1..a.rows {
            let x = ct[i];
            if x == 0 {
                continue;
            }
            let f = x / pivot;
            for col in a.cols.iter_mut().skip(t) {
                col[i] = (col[i] + r.q - f * col[t] % r.q) % r.q;
            }
        }
        diag.push(pv);
        t += 1;
    }
    (diag, v)
}

/// Generators of `{x : A x = 0}` in `(Z/p^k)^n`.
fn kernel(r: Local, a: Matrix) -> Vec<Vec<u64>> {
    let n = a.cols.len();
    let (diag, v) = smith(r, a, true);
    let v = v.expect("tracked");
    let mut gens = Vec::new();
    for (j, col) in v.into_iter().enumerate() {
        let scale = match diag.get(j) {
            Some(&d) if d >= r.k => 1,
            Some(&d) => r.p.pow(r.k - d),
            None => 1,
        };
        if scale < r.q {
            gens.push(col.iter().map(|&x| x * scale % r.q).collect());
        }
    }
    debug_assert!(gens.len() <= n);
    gens
}

/// `log_p` of the order of the span of `gens` in `(Z/p^k)^rows`.
fn span_log_order(r: Local, rows: usize, gens: &[Vec<u64>]) -> u32 {
    if gens.is_empty() {
        return 0;
    }
    let (diag, _) = smith(r, Matrix::from_columns(rows, gens.to_vec()), false);
    diag.iter().map(|&d| r.k.saturating_sub(d)).sum()
}

/// Nonidentity tuples of length `s`, in lexicographic order.
fn tuples(g: &FiniteGroup, s: usize) -> Vec<Vec<Elem>> {
    let nonid: Vec<Elem> = g.elements().filter(|&x| x != g.identity()).collect();
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|t| {
                nonid.iter().map(move |&x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// Default cap on the number of cochain coordinates in one degree.
pub const DEFAULT_COCHAIN_BUDGET: usize = 20_000;

struct PrimaryComplex<'a> {
    g: &'a FiniteGroup,
    r: Local,
    exps: Vec<u32>,
    /// `acting[g]` is the matrix of `g` on the basis, column-major.
    acting: Vec<Vec<Vec<u64>>>,
}

impl PrimaryComplex<'_> {
    fn rank(&self) -> usize {
        self.exps.len()
    }

    /// The coboundary `C^s → C^{s+1}` as a matrix.
    fn coboundary(&self, s: usize) -> Matrix {
        let g = self.g;
        let rk = self.rank();
        let src = tuples(g, s);
        let dst = tuples(g, s + 1);
        let src_index: HashMap<&Vec<Elem>, usize> = src.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut a = Matrix::zeros(dst.len() * rk, src.len() * rk);
        let r = self.r;
        for (row_t, t) in dst.iter().enumerate() {
            let mut add = |col_t: usize, coef: &dyn Fn(usize, usize) -> i64| {
                for i in 0..rk {
                    for j in 0..rk {
                        let c = coef(i, j);
                        if c != 0 {
                            let cell = &mut a.cols[col_t * rk + j][row_t * rk + i];
                            *cell = (*cell + r.reduce(c)) % r.q;
                        }
                    }
                }
            };
            // g_1 · f(g_2, …)
            let tail = t[1..].to_vec();
            let act = &self.acting[t[0]];
            add(src_index[&tail], &|i, j| act[j][i] as i64);
            for i in 1..=s {
                let prod = g.mul(t[i - 1], t[i]);
                if prod == g.identity() {
                    continue;
                }
                let mut merged = t[..i - 1].to_vec();
                merged.push(prod);
                merged.extend_from_slice(&t[i + 1..]);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                add(src_index[&merged], &|a, b| if a == b { sign } else { 0 });
            }
            let head = t[..s].to_vec();
            let sign = if (s + 1) % 2 == 0 { 1 } else { -1 };
            add(src_index[&head], &|a, b| if a == b { sign } else { 0 });
        }
        a
    }

    /// Generators of the relations `p^{a_i} e_i` in `C^s`.
    fn relations(&self, s: usize) -> Vec<Vec<u64>> {
        let rk = self.rank();
        let n = tuples(self.g, s).len() * rk;
        let mut gens = Vec::new();
        for c in 0..n {
            let e = self.exps[c % rk];
            if e < self.r.k {
                let mut v = vec![0; n];
                v[c] = self.r.p.pow(e);
                gens.push(v);
            }
        }
        gens
    }

    fn cohomology(&self, s: usize) -> Vec<usize> {
        let r = self.r;
        let rk = self.rank();
        let n = tuples(self.g, s).len() * rk;
        // Cocycles: D x ≡ 0 modulo p^{a_i} in each target coordinate.
        let mut d = self.coboundary(s);
        for col in d.cols.iter_mut() {
            for (row, x) in col.iter_mut().enumerate() {
                let e = self.exps[row % rk];
                *x = *x * r.p.pow(r.k - e) % r.q;
            }
        }
        let z = kernel(r, d);
        let mut b = self.relations(s);
        if s > 0 {
            b.extend(self.coboundary(s - 1).cols);
        }
        let log_b = span_log_order(r, n, &b);
        let mut sizes = Vec::new();
        for t in 0..=r.k {
            let scale = r.p.pow(t);
            let mut gens: Vec<Vec<u64>> = z.iter().map(|v| v.iter().map(|&x| x * scale % r.q).collect()).collect();
            gens.extend(b.iter().cloned());
            sizes.push(span_log_order(r, n, &gens) - log_b);
        }
        // sizes[t] = log |p^t H|; factors of order ≥ p^{t+1} number sizes[t] - sizes[t+1].
        let mut divisors = Vec::new();
        for t in 0..r.k as usize {
            let at_least = sizes[t] - sizes[t + 1];
            let at_least_next = if t + 2 <= r.k as usize { sizes[t + 1] - sizes[t + 2] } else { 0 };
            for _ in 0..(at_least - at_least_next) {
                divisors.push(r.p.pow(t as u32 + 1) as usize);
            }
        }
        divisors
    }
}

/// `H^s(G; M)` through normalized bar cochains.
pub fn group_cohomology(module: &GModule, s: usize) -> Result<AbelianInvariants> {
    group_cohomology_with_budget(module, s, DEFAULT_COCHAIN_BUDGET)
}

pub fn group_cohomology_with_budget(module: &GModule, s: usize, budget: usize) -> Result<AbelianInvariants> {
    let g = &module.group;
    let m = &module.module;
    let mut divisors = Vec::new();
    for part in primary_parts(m) {
        let cells = (g.order() - 1).pow(s as u32 + 1) * part.basis.len();
        if cells > budget {
            return Err(Error::Budget(format!("degree {s} needs {cells} cochain coordinates")));
        }
        let k = part.exponents.iter().copied().max().unwrap_or(0);
        let r = Local::new(part.p, k);
        let acting = g
            .elements()
            .map(|h| part.basis.iter().map(|&b| part.coords[&module.act(h, b)].clone()).collect())
            .collect();
        let complex = PrimaryComplex { g, r, exps: part.exponents.clone(), acting };
        divisors.extend(complex.cohomology(s));
    }
    Ok(AbelianInvariants::from_elementary_divisors(divisors))
}

/// Cocycles `c: G → A` with `c(gh) = c(g) · g(c(h))`, grouped by
/// `c ~ (g ↦ a⁻¹ c(g) g(a))`.
#[derive(Clone, Debug, Serialize)]
pub struct NonabelianH1 {
    pub cocycles: Vec<Vec<Elem>>,
    pub classes: Vec<Vec<usize>>,
}

impl NonabelianH1 {
    pub fn size(&self) -> usize {
        self.classes.len()
    }

    pub fn representatives(&self) -> Vec<&Vec<Elem>> {
        self.classes.iter().map(|c| &self.cocycles[c[0]]).collect()
    }
}

pub fn h1_nonabelian(g: &FiniteGroup, a: &FiniteGroup, action: &[Vec<Elem>]) -> Result<NonabelianH1> {
    check_action(g, a, action)?;
    let gens = g.generators();
    let total = a.order().pow(gens.len() as u32);
    let mut cocycles: Vec<Vec<Elem>> = (0..total)
        .filter_map(|code| {
            let values = crate::classifying::decode(code, gens.len(), a.order());
            extend_cocycle(g, a, action, &gens, &values)
        })
        .collect();
    cocycles.sort();
    cocycles.dedup();
    let position: HashMap<&Vec<Elem>, usize> = cocycles.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let indices: Vec<usize> = (0..cocycles.len()).collect();
    let acting: Vec<Elem> = a.elements().collect();
    let classes = orbits(&indices, &acting, |x, &i| {
        let twisted: Vec<Elem> = g
            .elements()
            .map(|h| a.mul(a.mul(a.inv(x), cocycles[i][h]), action[h][x]))
            .collect();
        position[&twisted]
    });
    Ok(NonabelianH1 { cocycles, classes })
}

fn extend_cocycle(g: &FiniteGroup, a: &FiniteGroup, action: &[Vec<Elem>], gens: &[Elem], values: &[Elem]) -> Option<Vec<Elem>> {
    let mut c = vec![usize::MAX; g.order()];
    c[g.identity()] = a.identity();
    let mut queue = vec![g.identity()];
    while let Some(x) = queue.pop() {
        for (&s, &v) in gens.iter().zip(values) {
            // c(x s) = c(x) · x(c(s))
            let y = g.mul(x, s);
            let cy = a.mul(c[x], action[x][v]);
            if c[y] == usize::MAX {
                c[y] = cy;
                queue.push(y);
            } else if c[y] != cy {
                return None;
            }
        }
    }
    let ok = g.elements().all(|x| g.elements().all(|y| c[g.mul(x, y)] == a.mul(c[x], action[x][c[y]])));
    ok.then_some(c)
}

/// Coefficients for one row `t` of the `E₂` page.
#[derive(Clone, Debug)]
pub enum Coefficients {
    Zero,
    Abelian(GModule),
    /// A possibly nonabelian group with `G`-action; only `s ≤ 1` is defined.
    Nonabelian { group: FiniteGroup, action: Vec<Vec<Elem>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum E2Entry {
    Group { invariant_factors: Vec<usize>, order: usize },
    PointedSet { size: usize },
    Undefined,
    OverBudget,
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Page {
    /// `entries[t - 1][s]` is `E₂^{s,t}`.
    pub entries: Vec<Vec<E2Entry>>,
}

/// `E₂^{s,t} = H^s(G; π_t)` for `t = 1..=coefficients.len()` and
/// `s = 0..=s_max`. Rows with nonabelian coefficients give a group at
/// `s = 0` and a pointed set at `s = 1`.
pub fn e2_page(g: &FiniteGroup, coefficients: &[Coefficients], s_max: usize, budget: usize) -> Result<E2Page> {
    let mut entries = Vec::new();
    for c in coefficients {
        let mut row = Vec::new();
        for s in 0..=s_max {
            row.push(match c {
                Coefficients::Zero => E2Entry::Group { invariant_factors: Vec::new(), order: 1 },
                Coefficients::Abelian(m) => {
                    if m.group() != g {
                        return Err(Error::ActionInvalid("module is over a different group".into()));
                    }
                    match group_cohomology_with_budget(m, s, budget) {
                        Ok(h) => E2Entry::Group { order: h.order(), invariant_factors: h.invariant_factors },
                        Err(Error::Budget(_)) => E2Entry::OverBudget,
                        Err(e) => return Err(e),
                    }
                }
                Coefficients::Nonabelian { group, action } => match s {
                    0 => {
                        check_action(g, group, action)?;
                        let fixed = group.elements().filter(|&x| g.elements().all(|h| action[h][x] == x)).count();
                        E2Entry::PointedSet { size: fixed }
                    }
                    1 => E2Entry::PointedSet { size: h1_nonabelian(g, group, action)?.size() },
                    _ => E2Entry::Undefined,
                },
            });
        }
        entries.push(row);
    }
    Ok(E2Page { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// Brute-force `|H^s|`: all normalized cochains, cocycles counted
    /// directly and coboundaries as the image of all `(s-1)`-cochains.
    fn oracle_order(m: &GModule, s: usize) -> usize {
        let (g, a) = (m.group(), m.module());
        let src = tuples(g, s);
        let cochains = |t: &[Vec<Elem>]| -> Vec<Vec<Elem>> {
            let n = t.len();
            (0..a.order().pow(n as u32)).map(|code| crate::classifying::decode(code, n, a.order())).collect()
        };
        let index = |t: &[Vec<Elem>]| -> HashMap<Vec<Elem>, usize> { t.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect() };
        let delta = |s: usize, f: &[Elem], domain: &HashMap<Vec<Elem>, usize>| -> Vec<Elem> {
            tuples(g, s + 1)
                .iter()
                .map(|t| {
                    let val = |u: &[Elem]| -> Elem {
                        if u.iter().any(|&x| x == g.identity()) {
                            a.identity()
                        } else {
                            f[domain[u]]
                        }
                    };
                    let mut acc = m.act(t[0], val(&t[1..]));
                    for i in 1..=s {
                        let mut u = t[..i - 1].to_vec();
                        u.push(g.mul(t[i - 1], t[i]));
                        u.extend_from_slice(&t[i + 1..]);
                        let v = val(&u);
                        acc = a.mul(acc, if i % 2 == 0 { v } else { a.inv(v) });
                    }
                    let v = val(&t[..s]);
                    a.mul(acc, if (s + 1) % 2 == 0 { v } else { a.inv(v) })
                })
                .collect()
        };
        let zero_next = vec![a.identity(); tuples(g, s + 1).len()];
        let dom = index(&src);
        let cocycles = cochains(&src).into_iter().filter(|f| delta(s, f, &dom) == zero_next).count();
        let boundaries: std::collections::HashSet<Vec<Elem>> = if s == 0 {
            [vec![a.identity(); 1]].into()
        } else {
            let prev = tuples(g, s - 1);
            let dom = index(&prev);
            cochains(&prev).into_iter().map(|f| delta(s - 1, &f, &dom)).collect()
        };
        cocycles / boundaries.len()
    }

    fn test_modules() -> Vec<(String, GModule)> {
        let mut out = Vec::new();
        let z = FiniteGroup::cyclic;
        for (gn, g) in [("Z2", z(2)), ("Z3", z(3)), ("Z4", z(4)), ("V4", catalog::builtin("V4").unwrap())] {
            for (mn, m) in [("Z2", z(2)), ("Z3", z(3)), ("Z4", z(4)), ("V4", catalog::builtin("V4").unwrap())] {
                if g.order() * m.order() <= 64 {
                    out.push((format!("{gn} on {mn} trivially"), GModule::trivial(&g, &m).unwrap()));
                }
            }
        }
        let inv = |g: &FiniteGroup, m: &FiniteGroup| {
            let flip = catalog::power_map(m, m.order() - 1);
            let id: Vec<Elem> = m.elements().collect();
            GModule::new(g.clone(), m.clone(), g.elements().map(|x| if x % 2 == 0 { id.clone() } else { flip.clone() }).collect())
                .unwrap()
        };
        out.push(("Z2 on Z3 by inversion".into(), inv(&z(2), &z(3))));
        out.push(("Z2 on Z4 by inversion".into(), inv(&z(2), &z(4))));
        out.push(("Z4 on Z3 by inversion".into(), inv(&z(4), &z(3))));
        out.push(("Z2 on Z6 by inversion".into(), inv(&z(2), &z(6))));
        let v4 = catalog::builtin("V4").unwrap();
        let swap = vec![0, 2, 1, 3];
        out.push((
            "Z2 on V4 by swap".into(),
            GModule::new(z(2), v4.clone(), vec![vec![0, 1, 2, 3], swap]).unwrap(),
        ));
        let rot = vec![0, 2, 3, 1];
        let rot2: Vec<Elem> = (0..4).map(|x| rot[rot[x]]).collect();
        out.push(("Z3 on V4 by rotation".into(), GModule::new(z(3), v4, vec![vec![0, 1, 2, 3], rot, rot2]).unwrap()));
        let s3 = catalog::symmetric(3);
        let sign: Vec<usize> = s3.labels.iter().map(|p| catalog::permutation_sign(p)).collect();
        let flip = catalog::power_map(&z(3), 2);
        out.push((
            "S3 on Z3 by sign".into(),
            GModule::new(s3.group.clone(), z(3), sign.iter().map(|&e| if e == 0 { vec![0, 1, 2] } else { flip.clone() }).collect())
                .unwrap(),
        ));
        out.push(("S3 on Z2 trivially".into(), GModule::trivial(&s3.group, &z(2)).unwrap()));
        out
    }

    #[test]
    fn bar_resolution_matches_brute_force() {
        for (name, m) in test_modules() {
            for s in 0..=3 {
                let cells = (m.group().order() - 1).pow(s as u32);
                if (m.module().order() as f64).powi(cells as i32) > 2e5 {
                    continue;
                }
                let h = group_cohomology(&m, s).unwrap();
                assert_eq!(h.order(), oracle_order(&m, s), "{name}, degree {s}");
            }
        }
    }

    #[test]
    fn degree_zero_is_fixed_points() {
        for (name, m) in test_modules() {
            let fixed = m.module().elements().filter(|&x| m.group().elements().all(|g| m.act(g, x) == x)).count();
            assert_eq!(group_cohomology(&m, 0).unwrap().order(), fixed, "{name}");
        }
    }

    #[test]
    fn small_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let m = GModule::trivial(&z2, &z2).unwrap();
        assert_eq!(group_cohomology(&m, 1).unwrap().order(), 2);
        assert_eq!(group_cohomology(&m, 2).unwrap().order(), 2);
        // H^2(Z/4; Z/4) = Z/4 and H^1(V4; Z/2) = (Z/2)^2.
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(group_cohomology(&GModule::trivial(&z4, &z4).unwrap(), 2).unwrap().invariant_factors, vec![4]);
        let v4 = catalog::builtin("V4").unwrap();
        assert_eq!(group_cohomology(&GModule::trivial(&v4, &z2).unwrap(), 1).unwrap().invariant_factors, vec![2, 2]);
        assert_eq!(group_cohomology(&GModule::trivial(&v4, &z2).unwrap(), 2).unwrap().invariant_factors, vec![2, 2, 2]);
        // H^1(Z/2; Z/6 trivial) = Z/2, written with mixed primes.
        let z6 = FiniteGroup::cyclic(6);
        assert_eq!(group_cohomology(&GModule::trivial(&z2, &z6).unwrap(), 1).unwrap().invariant_factors, vec![2]);
        assert_eq!(group_cohomology(&GModule::trivial(&z2, &z6).unwrap(), 2).unwrap().invariant_factors, vec![2]);
    }

    #[test]
    fn trivial_group_cohomology() {
        let one = FiniteGroup::trivial();
        let m = GModule::trivial(&one, &FiniteGroup::cyclic(6)).unwrap();
        assert_eq!(group_cohomology(&m, 0).unwrap().invariant_factors, vec![6]);
        for s in 1..=3 {
            assert_eq!(group_cohomology(&m, s).unwrap().order(), 1);
        }
    }

    #[test]
    fn invariant_factor_assembly() {
        let a = AbelianInvariants::from_elementary_divisors(vec![2, 4, 3, 9, 5]);
        assert_eq!(a.invariant_factors, vec![6, 180]);
        assert_eq!(a.order(), 2 * 4 * 3 * 9 * 5);
    }

    #[test]
    fn nonabelian_h1() {
        let z2 = FiniteGroup::cyclic(2);
        let s3 = catalog::symmetric(3).group;
        let id: Vec<Elem> = s3.elements().collect();
        assert_eq!(h1_nonabelian(&z2, &s3, &[id.clone(), id]).unwrap().size(), 2);
        let one = FiniteGroup::trivial();
        assert_eq!(h1_nonabelian(&one, &s3, &[s3.elements().collect()]).unwrap().size(), 1);
        for (name, m) in test_modules() {
            let h = h1_nonabelian(m.group(), m.module(), m.action()).unwrap();
            assert_eq!(h.size(), group_cohomology(&m, 1).unwrap().order(), "{name}");
        }
    }

    #[test]
    fn module_from_extension() {
        let m = GModule::from_extension(&catalog::ext_s3_sign()).unwrap();
        assert_eq!(group_cohomology(&m, 1).unwrap().order(), 1);
        assert!(matches!(
            GModule::from_extension(&catalog::corpus_extension("Z2xS3/S3").unwrap()),
            Err(Error::NotAbelian(_, _))
        ));
    }

    #[test]
    fn e2_examples() {
        let z2 = FiniteGroup::cyclic(2);
        let page = e2_page(&z2, &[Coefficients::Zero, Coefficients::Zero], 2, DEFAULT_COCHAIN_BUDGET).unwrap();
        assert!(page.entries.iter().flatten().all(|e| matches!(e, E2Entry::Group { order: 1, .. })));
        let m = GModule::from_extension(&catalog::ext_s3_sign()).unwrap();
        let page = e2_page(&z2, &[Coefficients::Abelian(m)], 1, DEFAULT_COCHAIN_BUDGET).unwrap();
        assert_eq!(page.entries[0][1], E2Entry::Group { invariant_factors: vec![], order: 1 });
        let s3 = catalog::symmetric(3).group;
        let id: Vec<Elem> = s3.elements().collect();
        let page = e2_page(&z2, &[Coefficients::Nonabelian { group: s3, action: vec![id.clone(), id] }], 2, 100).unwrap();
        assert_eq!(page.entries[0], vec![E2Entry::PointedSet { size: 6 }, E2Entry::PointedSet { size: 2 }, E2Entry::Undefined]);
        let big = GModule::trivial(&catalog::builtin("S4").unwrap(), &z2).unwrap();
        let page = e2_page(big.group(), &[Coefficients::Abelian(big.clone())], 3, 1000).unwrap();
        assert_eq!(page.entries[0][3], E2Entry::OverBudget);
    }
}
