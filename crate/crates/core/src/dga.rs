//! Finite dg-algebras and right dg-modules over them.
//!
//! Multiplication is stored as sparse structure constants: an entry
//! `(i, j, k, c)` in block `(p, q)` means `e_i * e_j` has coefficient `c` on
//! `e_k`, with `e_i` in degree `p`, `e_j` in degree `q` and `e_k` in degree
//! `p + q`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactlin::{scalar_json, vector, ExactMatrix, Ring, Scalar};
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Scalar,
}

/// Outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, axiom: &str, witness: Option<String>) {
        self.checks.push(AxiomCheck {
            axiom: axiom.to_string(),
            passed: witness.is_none(),
            witness,
        });
    }

    fn into_result(self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(f) => Err(Error::AxiomViolation(format!(
                "{}: {}",
                f.axiom,
                f.witness.as_deref().unwrap_or("")
            ))),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{verdict:4} {}", c.axiom)?;
            if let Some(w) = &c.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A graded algebra `C^0 ⊕ … ⊕ C^N` with a degree-one differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    ring: Ring,
    ranks: Vec<usize>,
    /// `diff[n]` maps `C^n` to `C^{n+1}`, for `n < N`.
    diff: Vec<ExactMatrix>,
    product: BTreeMap<(usize, usize), Vec<ProductEntry>>,
    unit: Vec<Scalar>,
}

impl DgAlgebra {
    /// Checks shapes and index ranges; axioms are left to [`validate`].
    ///
    /// [`validate`]: DgAlgebra::validate
    pub fn new(
        ring: Ring,
        ranks: Vec<usize>,
        diff: Vec<ExactMatrix>,
        product: BTreeMap<(usize, usize), Vec<ProductEntry>>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Format("an algebra needs at least degree 0".into()));
        }
        let top = ranks.len() - 1;
        if diff.len() != top {
            return Err(Error::Format(format!(
                "expected {top} differential matrices, found {}",
                diff.len()
            )));
        }
        for (n, d) in diff.iter().enumerate() {
            if d.shape() != (ranks[n + 1], ranks[n]) {
                return Err(Error::Format(format!(
                    "differential {n} has shape {:?}, expected {:?}",
                    d.shape(),
                    (ranks[n + 1], ranks[n])
                )));
            }
            if d.ring() != ring {
                return Err(Error::InvalidRing(format!(
                    "differential {n} is over {}",
                    d.ring()
                )));
            }
        }
        let mut product = product;
        for (&(p, q), entries) in product.iter_mut() {
            entries.retain(|e| !e.c.is_zero());
            if entries.is_empty() {
                continue;
            }
            if p > top || q > top || p + q > top {
                return Err(Error::Format(format!(
                    "product block {p},{q} lands above the top degree {top}"
                )));
            }
            for e in entries.iter() {
                if e.i >= ranks[p] || e.j >= ranks[q] || e.k >= ranks[p + q] {
                    return Err(Error::Format(format!(
                        "product entry ({}, {}, {}) out of range in block {p},{q}",
                        e.i, e.j, e.k
                    )));
                }
                if !ring.contains(&e.c) {
                    return Err(Error::InvalidRing(format!(
                        "coefficient {} is not in {ring}",
                        e.c
                    )));
                }
            }
            entries.sort_by_key(|e| (e.i, e.j, e.k));
        }
        product.retain(|_, v| !v.is_empty());
        if unit.len() != ranks[0] {
            return Err(Error::Format(format!(
                "unit has {} coordinates, C^0 has rank {}",
                unit.len(),
                ranks[0]
            )));
        }
        Ok(DgAlgebra {
            ring,
            ranks,
            diff,
            product,
            unit,
        })
    }

    /// [`new`](DgAlgebra::new) followed by a full axiom check.
    pub fn validated(
        ring: Ring,
        ranks: Vec<usize>,
        diff: Vec<ExactMatrix>,
        product: BTreeMap<(usize, usize), Vec<ProductEntry>>,
        unit: Vec<Scalar>,
    ) -> Result<Self> {
        let a = Self::new(ring, ranks, diff, product, unit)?;
        a.validate().into_result()?;
        Ok(a)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank of `C^n`; zero outside `0..=N`.
    pub fn rank(&self, n: isize) -> usize {
        if n < 0 {
            0
        } else {
            self.ranks.get(n as usize).copied().unwrap_or(0)
        }
    }

    /// `d: C^n → C^{n+1}` as a `rank(n+1) × rank(n)` matrix; zero outside the stored range.
    pub fn d(&self, n: isize) -> ExactMatrix {
        if n >= 0 && (n as usize) < self.diff.len() {
            self.diff[n as usize].clone()
        } else {
            ExactMatrix::zeros(self.ring, self.rank(n + 1), self.rank(n))
        }
    }

    pub fn diff_ref(&self, n: usize) -> Option<&ExactMatrix> {
        self.diff.get(n)
    }

    pub fn product_block(&self, p: usize, q: usize) -> &[ProductEntry] {
        self.product.get(&(p, q)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn product_blocks(&self) -> &BTreeMap<(usize, usize), Vec<ProductEntry>> {
        &self.product
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    /// Product of `x ∈ C^p` and `y ∈ C^q`, as a vector in `C^{p+q}` (empty
    /// when `p + q` exceeds the top degree).
    pub fn multiply(&self, p: usize, x: &[Scalar], q: usize, y: &[Scalar]) -> Vec<Scalar> {
        let ring = self.ring;
        let mut out = vector::zeros(self.rank((p + q) as isize));
        for e in self.product_block(p, q) {
            let (a, b) = (&x[e.i], &y[e.j]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            ring.add_mul_assign(&mut out[e.k], &ring.mul(a, b), &e.c);
        }
        out
    }

    /// Matrix of `y ↦ z·y` from `C^q` to `C^{p+q}` for fixed `z ∈ C^p`.
    pub fn left_multiplication(&self, p: usize, z: &[Scalar], q: usize) -> ExactMatrix {
        let ring = self.ring;
        let mut m = ExactMatrix::zeros(ring, self.rank((p + q) as isize), self.rank(q as isize));
        for e in self.product_block(p, q) {
            if z[e.i].is_zero() {
                continue;
            }
            let v = ring.add(m.get(e.k, e.j), &ring.mul(&z[e.i], &e.c));
            m.set(e.k, e.j, v);
        }
        m
    }

    /// Matrix of `x ↦ x·z` from `C^p` to `C^{p+q}` for fixed `z ∈ C^q`.
    pub fn right_multiplication(&self, p: usize, q: usize, z: &[Scalar]) -> ExactMatrix {
        let ring = self.ring;
        let mut m = ExactMatrix::zeros(ring, self.rank((p + q) as isize), self.rank(p as isize));
        for e in self.product_block(p, q) {
            if z[e.j].is_zero() {
                continue;
            }
            let v = ring.add(m.get(e.k, e.i), &ring.mul(&z[e.j], &e.c));
            m.set(e.k, e.i, v);
        }
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let top = self.top_degree() as isize;
        let mut report = ValidationReport { checks: Vec::new() };
        let view = AlgebraView(self);
        report.push("d^2 = 0", square_zero(&view, 0, top));
        report.push("unit is a cocycle", unit_cocycle(self));
        report.push("left unit", unit_law(self, true));
        report.push("right unit", unit_law(self, false));
        let mut leibniz = None;
        'l: for p in 0..=top {
            for q in 0..=top - p {
                let entries = |a: isize, b: isize| block(self, a, b);
                if let Some(w) = leibniz_check(&view, &view, &entries, p, q) {
                    leibniz = Some(w);
                    break 'l;
                }
            }
        }
        report.push("graded Leibniz rule", leibniz);
        let mut assoc = None;
        'a: for p in 0..=top {
            for q in 0..=top - p {
                for r in 0..=top - p - q {
                    let entries = |a: isize, b: isize| block(self, a, b);
                    if let Some(w) = associativity_check(self.ring, &entries, &entries, p, q, r) {
                        assoc = Some(w);
                        break 'a;
                    }
                }
            }
        }
        report.push("associativity", assoc);
        report
    }

    /// The same structure constants read in another ring.
    pub fn change_ring(&self, ring: Ring) -> Result<DgAlgebra> {
        let diff = self
            .diff
            .iter()
            .map(|d| d.change_ring(ring))
            .collect::<Result<Vec<_>>>()?;
        let mut product = BTreeMap::new();
        for (key, entries) in &self.product {
            let mapped = entries
                .iter()
                .map(|e| {
                    Ok(ProductEntry {
                        i: e.i,
                        j: e.j,
                        k: e.k,
                        c: ring.element(&e.c)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            product.insert(*key, mapped);
        }
        let unit = self
            .unit
            .iter()
            .map(|x| ring.element(x))
            .collect::<Result<Vec<_>>>()?;
        DgAlgebra::new(ring, self.ranks.clone(), diff, product, unit)
    }

    pub fn to_json_value(&self) -> Value {
        let mut diff = Map::new();
        for (n, d) in self.diff.iter().enumerate() {
            diff.insert(n.to_string(), d.to_json_rows());
        }
        let mut product = Map::new();
        for ((p, q), entries) in &self.product {
            let list: Vec<Value> = entries
                .iter()
                .map(|e| json!([e.i, e.j, e.k, scalar_json::to_value(&e.c)]))
                .collect();
            product.insert(format!("{p},{q}"), Value::Array(list));
        }
        json!({
            "ring": self.ring.to_string(),
            "top_degree": self.top_degree(),
            "ranks": self.ranks,
            "diff": diff,
            "product": product,
            "unit": vector::to_json(&self.unit),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Parses a `.dga.json` document without checking the axioms.
    pub fn from_json_value_unchecked(v: &Value) -> Result<DgAlgebra> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Format(format!("missing field `{name}`")))
        };
        let ring: Ring = field("ring")?
            .as_str()
            .ok_or_else(|| Error::Format("`ring` must be a string".into()))?
            .parse()?;
        let ranks: Vec<usize> = serde_json::from_value(field("ranks")?.clone())?;
        let top: usize = serde_json::from_value(field("top_degree")?.clone())?;
        if ranks.len() != top + 1 {
            return Err(Error::Format(format!(
                "top_degree {top} but {} ranks",
                ranks.len()
            )));
        }
        let diff_obj = field("diff")?
            .as_object()
            .ok_or_else(|| Error::Format("`diff` must be an object".into()))?;
        for key in diff_obj.keys() {
            match key.parse::<usize>() {
                Ok(n) if n < top => {}
                _ => {
                    return Err(Error::Format(format!(
                        "unexpected differential key `{key}`"
                    )))
                }
            }
        }
        let mut diff = Vec::with_capacity(top);
        for n in 0..top {
            let m = match diff_obj.get(&n.to_string()) {
                Some(rows) => ExactMatrix::from_json_rows(ring, rows, ranks[n + 1], ranks[n])?,
                None => ExactMatrix::zeros(ring, ranks[n + 1], ranks[n]),
            };
            diff.push(m);
        }
        let mut product = BTreeMap::new();
        let prod_obj = field("product")?
            .as_object()
            .ok_or_else(|| Error::Format("`product` must be an object".into()))?;
        for (key, list) in prod_obj {
            let (p, q) = key
                .split_once(',')
                .and_then(|(a, b)| {
                    Some((
                        a.trim().parse::<usize>().ok()?,
                        b.trim().parse::<usize>().ok()?,
                    ))
                })
                .ok_or_else(|| Error::Format(format!("product key `{key}` is not `p,q`")))?;
            let list = list
                .as_array()
                .ok_or_else(|| Error::Format(format!("product block `{key}` must be a list")))?;
            let mut entries = Vec::with_capacity(list.len());
            for item in list {
                let parts = item.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
                    Error::Format(format!("product entry {item} must be [i, j, k, c]"))
                })?;
                let idx = |t: &Value| {
                    t.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| Error::Format(format!("bad index {t}")))
                };
                entries.push(ProductEntry {
                    i: idx(&parts[0])?,
                    j: idx(&parts[1])?,
                    k: idx(&parts[2])?,
                    c: ring.element(&scalar_json::from_value(&parts[3])?)?,
                });
            }
            product
                .entry((p, q))
                .or_insert_with(Vec::new)
                .extend(entries);
        }
        let unit = vector::from_json(ring, field("unit")?)?;
        DgAlgebra::new(ring, ranks, diff, product, unit)
    }

    /// Parses and validates; an axiom failure rejects the document.
    pub fn from_json(text: &str) -> Result<DgAlgebra> {
        let a = Self::from_json_value_unchecked(&serde_json::from_str(text)?)?;
        a.validate().into_result()?;
        Ok(a)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DgAlgebra> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub fn load_dga(path: impl AsRef<Path>) -> Result<DgAlgebra> {
    DgAlgebra::load(path)
}

pub fn save_dga(a: &DgAlgebra, path: impl AsRef<Path>) -> Result<()> {
    a.save(path)
}

/// Simplicial cochains with the Alexander–Whitney cup product.
///
/// `C^n` has one basis vector per n-simplex in lexicographic order,
/// `(dφ)(τ) = Σ (-1)^i φ(∂_i τ)`, and `(φ ∪ ψ)(v_0…v_{p+q}) = φ(v_0…v_p) ψ(v_p…v_{p+q})`.
pub fn cochain_algebra(k: &SimplicialComplex, ring: Ring) -> DgAlgebra {
    let simplices = k.simplices();
    let ranks: Vec<usize> = simplices.iter().map(Vec::len).collect();
    let diff = k
        .boundary_matrices(ring)
        .iter()
        .map(ExactMatrix::transpose)
        .collect();
    let index: Vec<BTreeMap<&[usize], usize>> = simplices
        .iter()
        .map(|s| {
            s.iter()
                .enumerate()
                .map(|(i, x)| (x.as_slice(), i))
                .collect()
        })
        .collect();
    let mut product: BTreeMap<(usize, usize), Vec<ProductEntry>> = BTreeMap::new();
    for (n, list) in simplices.iter().enumerate() {
        for (kidx, s) in list.iter().enumerate() {
            for p in 0..=n {
                let q = n - p;
                product.entry((p, q)).or_default().push(ProductEntry {
                    i: index[p][&s[..=p]],
                    j: index[q][&s[p..]],
                    k: kidx,
                    c: ring.one(),
                });
            }
        }
    }
    let unit = vec![ring.one(); ranks[0]];
    DgAlgebra::new(ring, ranks, diff, product, unit).expect("cochain algebra is well formed")
}

/// A right dg-module `M` over a dg-algebra, graded by integers starting at
/// `min_degree`. Action entries `(i, j, k, c)` in block `(p, q)` mean
/// `m_i · e_j` has coefficient `c` on `m_k` (`m_i ∈ M^p`, `e_j ∈ C^q`).
#[derive(Clone, Debug)]
pub struct DgModule {
    ring: Ring,
    min_degree: isize,
    ranks: Vec<usize>,
    /// `diff[i]` maps `M^{min+i}` to `M^{min+i+1}`.
    diff: Vec<ExactMatrix>,
    action: BTreeMap<(isize, usize), Vec<ProductEntry>>,
}

impl DgModule {
    pub fn new(
        ring: Ring,
        min_degree: isize,
        ranks: Vec<usize>,
        diff: Vec<ExactMatrix>,
        action: BTreeMap<(isize, usize), Vec<ProductEntry>>,
    ) -> Result<Self> {
        if diff.len() + 1 != ranks.len() && !(ranks.is_empty() && diff.is_empty()) {
            return Err(Error::Format(
                "module differential count does not match its ranks".into(),
            ));
        }
        for (i, d) in diff.iter().enumerate() {
            if d.shape() != (ranks[i + 1], ranks[i]) {
                return Err(Error::Format(format!(
                    "module differential {i} has the wrong shape"
                )));
            }
        }
        Ok(DgModule {
            ring,
            min_degree,
            ranks,
            diff,
            action,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn min_degree(&self) -> isize {
        self.min_degree
    }

    pub fn max_degree(&self) -> isize {
        self.min_degree + self.ranks.len() as isize - 1
    }

    pub fn rank(&self, n: isize) -> usize {
        let i = n - self.min_degree;
        if i < 0 {
            0
        } else {
            self.ranks.get(i as usize).copied().unwrap_or(0)
        }
    }

    /// `D: M^n → M^{n+1}`.
    pub fn d(&self, n: isize) -> ExactMatrix {
        let i = n - self.min_degree;
        if i >= 0 && (i as usize) < self.diff.len() {
            self.diff[i as usize].clone()
        } else {
            ExactMatrix::zeros(self.ring, self.rank(n + 1), self.rank(n))
        }
    }

    pub fn action_block(&self, p: isize, q: usize) -> &[ProductEntry] {
        self.action.get(&(p, q)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `m · x` for `m ∈ M^p`, `x ∈ C^q`.
    pub fn act(&self, p: isize, m: &[Scalar], q: usize, x: &[Scalar]) -> Vec<Scalar> {
        let ring = self.ring;
        let mut out = vector::zeros(self.rank(p + q as isize));
        for e in self.action_block(p, q) {
            let (a, b) = (&m[e.i], &x[e.j]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            ring.add_mul_assign(&mut out[e.k], &ring.mul(a, b), &e.c);
        }
        out
    }

    /// Module axioms over `base`: `D² = 0`, the Leibniz rule
    /// `D(mx) = D(m)x + (-1)^{|m|} m dx`, `(mx)y = m(xy)` and `m·1 = m`.
    pub fn validate(&self, base: &DgAlgebra) -> ValidationReport {
        let mut report = ValidationReport { checks: Vec::new() };
        let view = ModuleView(self);
        report.push(
            "D^2 = 0",
            square_zero(&view, self.min_degree, self.max_degree()),
        );
        let top = base.top_degree() as isize;
        let mut unit = None;
        'u: for p in self.min_degree..=self.max_degree() {
            let id = ExactMatrix::identity(self.ring, self.rank(p));
            for i in 0..self.rank(p) {
                let m = id.column(i);
                if self.act(p, &m, 0, base.unit()) != m {
                    unit = Some(format!("m_{i} in degree {p}"));
                    break 'u;
                }
            }
        }
        report.push("right unit", unit);
        let entries = |a: isize, b: isize| self.action_block(a, b as usize);
        let algebra = |a: isize, b: isize| block(base, a, b);
        let mut leibniz = None;
        'l: for p in self.min_degree..=self.max_degree() {
            for q in 0..=top {
                if let Some(w) = leibniz_check(&view, &AlgebraView(base), &entries, p, q) {
                    leibniz = Some(w);
                    break 'l;
                }
            }
        }
        report.push("module Leibniz rule", leibniz);
        let mut assoc = None;
        'a: for p in self.min_degree..=self.max_degree() {
            for q in 0..=top {
                for r in 0..=top - q {
                    if let Some(w) = associativity_check(self.ring, &entries, &algebra, p, q, r) {
                        assoc = Some(w);
                        break 'a;
                    }
                }
            }
        }
        report.push("action associativity", assoc);
        report
    }
}

fn block(a: &DgAlgebra, p: isize, q: isize) -> &[ProductEntry] {
    if p < 0 || q < 0 {
        return &[];
    }
    a.product_block(p as usize, q as usize)
}

trait Graded {
    fn diff_at(&self, n: isize) -> ExactMatrix;
}

struct AlgebraView<'a>(&'a DgAlgebra);
struct ModuleView<'a>(&'a DgModule);

impl Graded for AlgebraView<'_> {
    fn diff_at(&self, n: isize) -> ExactMatrix {
        self.0.d(n)
    }
}

impl Graded for ModuleView<'_> {
    fn diff_at(&self, n: isize) -> ExactMatrix {
        self.0.d(n)
    }
}

fn square_zero(g: &dyn Graded, lo: isize, hi: isize) -> Option<String> {
    for n in lo..hi {
        let dd = g
            .diff_at(n + 1)
            .mul(&g.diff_at(n))
            .expect("composable differentials");
        if let Some((i, j)) = first_nonzero(&dd) {
            return Some(format!(
                "d{} d{} has entry ({i}, {j}) = {}",
                n + 1,
                n,
                dd.get(i, j)
            ));
        }
    }
    None
}

fn unit_cocycle(a: &DgAlgebra) -> Option<String> {
    let d1 = a.d(0).mul_vec(a.unit()).expect("unit has rank C^0");
    d1.iter().position(|x| !x.is_zero()).map(|k| {
        format!(
            "d(1) has coefficient {} on basis vector {k} of degree 1",
            d1[k]
        )
    })
}

fn unit_law(a: &DgAlgebra, left: bool) -> Option<String> {
    for q in 0..=a.top_degree() {
        let id = ExactMatrix::identity(a.ring(), a.ranks()[q]);
        for j in 0..a.ranks()[q] {
            let e = id.column(j);
            let v = if left {
                a.multiply(0, a.unit(), q, &e)
            } else {
                a.multiply(q, &e, 0, a.unit())
            };
            if v != e {
                let side = if left { "1·e" } else { "e·1" };
                return Some(format!("{side} != e for e = e_{j} in degree {q}"));
            }
        }
    }
    None
}

fn first_nonzero(m: &ExactMatrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m.get(i, j).is_zero())
}

/// Nonzero entries of each column.
fn sparse_columns(m: &ExactMatrix) -> Vec<Vec<(usize, Scalar)>> {
    let mut cols = vec![Vec::new(); m.cols()];
    for i in 0..m.rows() {
        for (j, x) in m.row(i).iter().enumerate() {
            if !x.is_zero() {
                cols[j].push((i, x.clone()));
            }
        }
    }
    cols
}

/// Nonzero entries of each row.
fn sparse_rows(m: &ExactMatrix) -> Vec<Vec<(usize, Scalar)>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect()
        })
        .collect()
}

fn add_into<K: Ord>(t: &mut BTreeMap<K, Scalar>, ring: Ring, key: K, v: Scalar) {
    let e = t.entry(key).or_insert_with(Scalar::zero);
    *e = ring.add(e, &v);
}

fn first_difference<K: Ord + Copy + fmt::Debug>(
    ring: Ring,
    a: &BTreeMap<K, Scalar>,
    b: &BTreeMap<K, Scalar>,
) -> Option<(K, Scalar, Scalar)> {
    let zero = Scalar::zero();
    let mut keys: Vec<K> = a.keys().chain(b.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let x = a.get(&k).unwrap_or(&zero);
        let y = b.get(&k).unwrap_or(&zero);
        (!ring.sub(x, y).is_zero()).then(|| (k, x.clone(), y.clone()))
    })
}

/// `d(xy) = d(x)y + (-1)^p x d(y)` on all basis pairs of degrees `(p, q)`.
/// The left factor lives in `left` (the algebra or a module), the right in the algebra.
fn leibniz_check<'a>(
    left: &dyn Graded,
    right: &dyn Graded,
    entries: &dyn Fn(isize, isize) -> &'a [ProductEntry],
    p: isize,
    q: isize,
) -> Option<String> {
    let ring = left.diff_at(p).ring();
    let mut lhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
    let mut rhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
    let dt = sparse_columns(&left.diff_at(p + q));
    for e in entries(p, q) {
        for (m, v) in &dt[e.k] {
            add_into(&mut lhs, ring, (e.i, e.j, *m), ring.mul(&e.c, v));
        }
    }
    let dl = sparse_rows(&left.diff_at(p));
    for e in entries(p + 1, q) {
        for (i, v) in &dl[e.i] {
            add_into(&mut rhs, ring, (*i, e.j, e.k), ring.mul(&e.c, v));
        }
    }
    let dr = sparse_rows(&right.diff_at(q));
    let sign = if p.rem_euclid(2) == 0 {
        ring.one()
    } else {
        ring.neg(&ring.one())
    };
    for e in entries(p, q + 1) {
        for (j, v) in &dr[e.j] {
            add_into(
                &mut rhs,
                ring,
                (e.i, *j, e.k),
                ring.mul(&sign, &ring.mul(&e.c, v)),
            );
        }
    }
    first_difference(ring, &lhs, &rhs).map(|((i, j, m), a, b)| {
        format!("degrees ({p}, {q}), basis pair ({i}, {j}): d(xy) has {a} on e_{m}, d(x)y ± x d(y) has {b}")
    })
}

/// `(xy)z = x(yz)` on all basis triples of degrees `(p, q, r)`, where the
/// outer products come from `outer` and the inner `yz` from `inner`.
fn associativity_check<'a>(
    ring: Ring,
    outer: &dyn Fn(isize, isize) -> &'a [ProductEntry],
    inner: &dyn Fn(isize, isize) -> &'a [ProductEntry],
    p: isize,
    q: isize,
    r: isize,
) -> Option<String> {
    let first = outer(p, q);
    let second = outer(p + q, r);
    let yz = inner(q, r);
    let last = outer(p, q + r);
    let mut by_first: BTreeMap<usize, Vec<&ProductEntry>> = BTreeMap::new();
    for e in second {
        by_first.entry(e.i).or_default().push(e);
    }
    let mut by_second: BTreeMap<usize, Vec<&ProductEntry>> = BTreeMap::new();
    for e in last {
        by_second.entry(e.j).or_default().push(e);
    }
    let mut lhs: BTreeMap<[usize; 4], Scalar> = BTreeMap::new();
    for e in first {
        for f in by_first.get(&e.k).into_iter().flatten() {
            add_into(&mut lhs, ring, [e.i, e.j, f.j, f.k], ring.mul(&e.c, &f.c));
        }
    }
    let mut rhs: BTreeMap<[usize; 4], Scalar> = BTreeMap::new();
    for e in yz {
        for f in by_second.get(&e.k).into_iter().flatten() {
            add_into(&mut rhs, ring, [f.i, e.i, e.j, f.k], ring.mul(&e.c, &f.c));
        }
    }
    first_difference(ring, &lhs, &rhs).map(|([i, j, k, m], a, b)| {
        format!("degrees ({p}, {q}, {r}), basis triple ({i}, {j}, {k}): (xy)z has {a} on e_{m}, x(yz) has {b}")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{build_circle, build_point, build_sphere, build_torus};

    #[test]
    fn point_algebra() {
        let a = cochain_algebra(&build_point(), Ring::Integers);
        assert_eq!(a.ranks(), &[1]);
        assert_eq!(a.unit(), &[Ring::Integers.one()]);
        assert!(a.validate().passed());
    }

    #[test]
    fn circle_products_follow_front_and_back_faces() {
        let z = Ring::Integers;
        let a = cochain_algebra(&build_circle(), z);
        assert!(a.validate().passed(), "{}", a.validate());
        let v0 = vector::unit(z, 3, 0);
        assert_eq!(a.multiply(0, &v0, 0, &v0), v0);
        // edge dual of [0,1]: front vertex 0, back vertex 1
        let e01 = vector::unit(z, 3, 0);
        assert_eq!(a.multiply(0, &v0, 1, &e01), e01);
        assert!(vector::is_zero(&a.multiply(1, &e01, 0, &v0)));
        let v1 = vector::unit(z, 3, 1);
        assert_eq!(a.multiply(1, &e01, 0, &v1), e01);
    }

    #[test]
    fn fixtures_pass_over_all_rings() {
        let rings = [
            Ring::Integers,
            Ring::Rationals,
            Ring::PrimeField(2),
            Ring::PrimeField(3),
        ];
        for k in [build_circle(), build_sphere(2), build_torus(2).unwrap()] {
            for ring in rings {
                let report = cochain_algebra(&k, ring).validate();
                assert!(report.passed(), "{ring}: {report}");
            }
        }
    }

    #[test]
    fn sign_flip_is_caught() {
        let z = Ring::Integers;
        let a = cochain_algebra(&build_circle(), z);
        let mut product = a.product_blocks().clone();
        let entry = &mut product.get_mut(&(0, 1)).unwrap()[0];
        entry.c = z.from_i64(-1);
        let bad = DgAlgebra::new(
            z,
            a.ranks().to_vec(),
            vec![a.d(0)],
            product,
            a.unit().to_vec(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.passed());
        let failed: Vec<_> = report.failures().map(|f| f.axiom.as_str()).collect();
        assert!(failed
            .iter()
            .any(|f| f.contains("Leibniz") || f.contains("associativity") || f.contains("unit")));
        assert!(report.failures().all(|f| f.witness.is_some()));
    }

    #[test]
    fn square_nonzero_differential_is_rejected() {
        let ok = r#"{"ring":"Z","top_degree":2,"ranks":[1,1,1],
            "diff":{"0":[[0]],"1":[[1]]},"product":{"0,0":[[0,0,0,1]],"0,1":[[0,0,0,1]],"1,0":[[0,0,0,1]],
            "0,2":[[0,0,0,1]],"2,0":[[0,0,0,1]]},"unit":[1]}"#;
        assert!(DgAlgebra::from_json(ok).is_ok());
        let bad = ok.replace(r#""0":[[0]]"#, r#""0":[[1]]"#);
        let a = DgAlgebra::from_json_value_unchecked(&serde_json::from_str(&bad).unwrap()).unwrap();
        let report = a.validate();
        assert!(report.failures().any(|f| f.axiom == "d^2 = 0"));
        assert!(matches!(
            DgAlgebra::from_json(&bad).unwrap_err(),
            Error::AxiomViolation(_)
        ));
        assert!(DgAlgebra::from_json(r#"{"ring":"Z"}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t2.dga.json");
        let a = cochain_algebra(&build_torus(2).unwrap(), Ring::Integers);
        save_dga(&a, &path).unwrap();
        assert_eq!(load_dga(&path).unwrap(), a);
        let f3 = a.change_ring(Ring::PrimeField(3)).unwrap();
        assert_eq!(DgAlgebra::from_json(&f3.to_json()).unwrap(), f3);
    }

    #[test]
    fn left_and_right_multiplication_matrices() {
        let z = Ring::Integers;
        let a = cochain_algebra(&build_torus(2).unwrap(), z);
        let x: Vec<Scalar> = (0..a.ranks()[1])
            .map(|i| z.from_i64((i % 3) as i64 - 1))
            .collect();
        let y: Vec<Scalar> = (0..a.ranks()[1])
            .map(|i| z.from_i64((i % 2) as i64))
            .collect();
        let l = a.left_multiplication(1, &x, 1);
        let r = a.right_multiplication(1, 1, &y);
        let xy = a.multiply(1, &x, 1, &y);
        assert_eq!(l.mul_vec(&y).unwrap(), xy);
        assert_eq!(r.mul_vec(&x).unwrap(), xy);
    }
}
