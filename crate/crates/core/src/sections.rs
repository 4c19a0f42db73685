//! Cohomology of a dg-algebra together with the splitting data `s`, `q`, `π`.
//!
//! In each degree `n` the cochains decompose as `C^n = S^n ⊕ B^n ⊕ Q^n`:
//! `S^n` are cocycle representatives of a basis of `H^n`, `B^n` is a basis of
//! the coboundaries and `Q^n` lifts the basis of `B^{n+1}` through `d`. The
//! change-of-basis matrix `[S | B | Q]` is unimodular, and its inverse gives
//! `π` and the coboundary coordinates used by `q` in one multiplication.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::dga::DgAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{
    inverse, kernel_basis, section_of_surjection, vector, ExactMatrix, Ring, Scalar, Subquotient,
};

/// `H^n = Ker(d^n) / Im(d^{n-1})` for every degree, with torsion reported
/// through the invariant factors.
pub fn compute_cohomology(a: &DgAlgebra) -> Result<Vec<Subquotient>> {
    (0..=a.top_degree() as isize)
        .map(|n| Subquotient::new(&kernel_basis(&a.d(n)), &a.d(n - 1)))
        .collect()
}

/// Graded algebra structure of `H`, as dense structure constants in the
/// basis chosen by a sections package.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyRing {
    ring: Ring,
    ranks: Vec<usize>,
    /// `mult[(p, q)]` has shape `h_{p+q} × (h_p h_q)`; column `i h_q + j` is `x_i y_j`.
    mult: BTreeMap<(usize, usize), ExactMatrix>,
}

impl CohomologyRing {
    pub fn new(
        ring: Ring,
        ranks: Vec<usize>,
        mult: BTreeMap<(usize, usize), ExactMatrix>,
    ) -> Result<Self> {
        for (&(p, q), m) in &mult {
            let want = (rank_of(&ranks, (p + q) as isize), ranks[p] * ranks[q]);
            if m.shape() != want {
                return Err(Error::ShapeMismatch(format!(
                    "structure constants {p},{q} have shape {:?}",
                    m.shape()
                )));
            }
        }
        Ok(CohomologyRing { ring, ranks, mult })
    }

    /// The algebra itself read as its own cohomology (zero differential).
    pub fn from_formal(a: &DgAlgebra) -> Result<Self> {
        let top = a.top_degree();
        let ranks = a.ranks().to_vec();
        let mut mult = BTreeMap::new();
        for p in 0..=top {
            for q in 0..=top - p {
                let mut m = ExactMatrix::zeros(a.ring(), ranks[p + q], ranks[p] * ranks[q]);
                for e in a.product_block(p, q) {
                    m.set(e.k, e.i * ranks[q] + e.j, e.c.clone());
                }
                mult.insert((p, q), m);
            }
        }
        Self::new(a.ring(), ranks, mult)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, n: isize) -> usize {
        rank_of(&self.ranks, n)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Structure constants for degrees `(p, q)`; zero when `p + q` exceeds the top.
    pub fn product_matrix(&self, p: usize, q: usize) -> ExactMatrix {
        self.mult.get(&(p, q)).cloned().unwrap_or_else(|| {
            ExactMatrix::zeros(
                self.ring,
                self.rank((p + q) as isize),
                self.rank(p as isize) * self.rank(q as isize),
            )
        })
    }

    /// `x_i y_j` for basis classes.
    pub fn basis_product(&self, p: usize, i: usize, q: usize, j: usize) -> Vec<Scalar> {
        match self.mult.get(&(p, q)) {
            Some(m) => m.column(i * self.ranks[q] + j),
            None => vector::zeros(self.rank((p + q) as isize)),
        }
    }

    pub fn multiply(&self, p: usize, x: &[Scalar], q: usize, y: &[Scalar]) -> Vec<Scalar> {
        let ring = self.ring;
        let mut out = vector::zeros(self.rank((p + q) as isize));
        let Some(m) = self.mult.get(&(p, q)) else {
            return out;
        };
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let c = ring.mul(a, b);
                let col = i * self.ranks[q] + j;
                for (k, o) in out.iter_mut().enumerate() {
                    ring.add_mul_assign(o, m.get(k, col), &c);
                }
            }
        }
        out
    }

    /// Matrix of `y ↦ x·y` from `H^q` to `H^{p+q}`.
    pub fn left_multiplication(&self, p: usize, x: &[Scalar], q: usize) -> ExactMatrix {
        let cols: Vec<Vec<Scalar>> = (0..self.rank(q as isize))
            .map(|j| self.multiply(p, x, q, &vector::unit(self.ring, self.ranks[q], j)))
            .collect();
        ExactMatrix::from_columns(self.ring, self.rank((p + q) as isize), &cols)
    }

    /// Matrix of `x ↦ x·y` from `H^p` to `H^{p+q}`.
    pub fn right_multiplication(&self, p: usize, q: usize, y: &[Scalar]) -> ExactMatrix {
        let cols: Vec<Vec<Scalar>> = (0..self.rank(p as isize))
            .map(|i| self.multiply(p, &vector::unit(self.ring, self.ranks[p], i), q, y))
            .collect();
        ExactMatrix::from_columns(self.ring, self.rank((p + q) as isize), &cols)
    }

    /// The unit class, basis vector 0 of `H^0`.
    pub fn unit(&self) -> Vec<Scalar> {
        vector::unit(self.ring, self.ranks[0], 0)
    }
}

/// A homogeneous class given by its degree and coordinates.
#[derive(Clone, Copy, Debug)]
pub struct ClassRef<'a> {
    pub degree: usize,
    pub coords: &'a [Scalar],
}

impl<'a> ClassRef<'a> {
    pub fn new(degree: usize, coords: &'a [Scalar]) -> Self {
        ClassRef { degree, coords }
    }
}

pub(crate) fn rank_of(ranks: &[usize], n: isize) -> usize {
    if n < 0 {
        0
    } else {
        ranks.get(n as usize).copied().unwrap_or(0)
    }
}

/// Cohomology basis with sections `s` of `π: Ker d → H` and `q` of `d: C → Im d`.
#[derive(Clone, Debug)]
pub struct CohomologySections {
    algebra: Arc<DgAlgebra>,
    seed: Option<u64>,
    s: Vec<ExactMatrix>,
    boundaries: Vec<ExactMatrix>,
    /// `d^n · lifts[n]` is the basis `boundaries[n + 1]`.
    lifts: Vec<ExactMatrix>,
    coordinates: Vec<ExactMatrix>,
    cohomology: CohomologyRing,
    /// `q(x_i, y_j)` for basis classes, keyed by `(p, q)`, column `i h_q + j`.
    q_table: BTreeMap<(usize, usize), ExactMatrix>,
}

/// Canonical sections when `seed` is `None`; otherwise the canonical choice
/// perturbed within its freedom by a seeded random coboundary in `s` and a
/// seeded random cocycle correction in `q`.
pub fn build_sections(a: &DgAlgebra, seed: Option<u64>) -> Result<CohomologySections> {
    CohomologySections::build(Arc::new(a.clone()), seed)
}

impl CohomologySections {
    #[allow(clippy::needless_range_loop)]
    pub fn build(algebra: Arc<DgAlgebra>, seed: Option<u64>) -> Result<Self> {
        let a = &*algebra;
        let ring = a.ring();
        let top = a.top_degree();
        let mut boundaries = vec![ExactMatrix::zeros(ring, a.ranks()[0], 0)];
        let mut lifts = Vec::with_capacity(top + 1);
        for n in 0..top {
            let d = a.d(n as isize);
            let target = Subquotient::submodule(&d)?;
            boundaries.push(target.free_generators()?);
            lifts.push(section_of_surjection(&d, &target)?);
        }
        lifts.push(ExactMatrix::zeros(ring, a.ranks()[top], 0));

        let mut s = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let cycles = kernel_basis(&a.d(n as isize));
            let h = Subquotient::new(&cycles, &boundaries[n])?;
            if let Some(f) = h.torsion().first() {
                return Err(Error::TorsionHomology {
                    degree: n,
                    factor: f.to_string(),
                });
            }
            if n == 0 {
                let unit = ExactMatrix::from_columns(ring, a.ranks()[0], &[a.unit().to_vec()]);
                if vector::is_zero(a.unit()) {
                    return Err(Error::AxiomViolation("the unit is zero".into()));
                }
                let rest = Subquotient::new(&cycles, &unit)
                    .map_err(|_| Error::AxiomViolation("the unit is not a cocycle".into()))?;
                let others = rest
                    .free_generators()
                    .map_err(|_| Error::Inconsistent("the unit is divisible in degree 0".into()))?;
                s.push(ExactMatrix::hstack(&[&unit, &others])?);
            } else {
                s.push(h.free_generators()?);
            }
        }

        if let Some(seed) = seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for n in 1..=top {
                let r = ExactMatrix::from_fn(ring, a.ranks()[n - 1], s[n].cols(), |_, _| {
                    ring.random_small(&mut rng, 2)
                });
                s[n] = s[n].add(&a.d(n as isize - 1).mul(&r)?)?;
            }
            for n in 0..=top {
                let cycles = ExactMatrix::hstack(&[&s[n], &boundaries[n]])?;
                let r = ExactMatrix::from_fn(ring, cycles.cols(), lifts[n].cols(), |_, _| {
                    ring.random_small(&mut rng, 2)
                });
                lifts[n] = lifts[n].add(&cycles.mul(&r)?)?;
            }
        }

        let mut coordinates = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let t = ExactMatrix::hstack(&[&s[n], &boundaries[n], &lifts[n]])?;
            if t.cols() != t.rows() {
                return Err(Error::Inconsistent(format!(
                    "degree {n}: {} + {} + {} columns for rank {}",
                    s[n].cols(),
                    boundaries[n].cols(),
                    lifts[n].cols(),
                    t.rows()
                )));
            }
            coordinates.push(inverse(&t).ok_or_else(|| {
                Error::Inconsistent(format!("degree {n} decomposition is not unimodular"))
            })?);
        }
        Self::assemble(algebra, seed, s, boundaries, lifts, coordinates)
    }

    fn assemble(
        algebra: Arc<DgAlgebra>,
        seed: Option<u64>,
        s: Vec<ExactMatrix>,
        boundaries: Vec<ExactMatrix>,
        lifts: Vec<ExactMatrix>,
        coordinates: Vec<ExactMatrix>,
    ) -> Result<Self> {
        let ring = algebra.ring();
        let ranks: Vec<usize> = s.iter().map(ExactMatrix::cols).collect();
        let mut pkg = CohomologySections {
            algebra,
            seed,
            s,
            boundaries,
            lifts,
            coordinates,
            cohomology: CohomologyRing::new(ring, ranks.clone(), BTreeMap::new())?,
            q_table: BTreeMap::new(),
        };
        let top = pkg.top_degree();
        let mut mult = BTreeMap::new();
        let mut q_table = BTreeMap::new();
        for p in 0..=top {
            for q in 0..=top - p {
                let n = p + q;
                let mut m = ExactMatrix::zeros(ring, ranks[n], ranks[p] * ranks[q]);
                let mut qs =
                    ExactMatrix::zeros(ring, pkg.algebra.rank(n as isize - 1), ranks[p] * ranks[q]);
                for i in 0..ranks[p] {
                    let x = pkg.s[p].column(i);
                    for j in 0..ranks[q] {
                        let w = pkg.algebra.multiply(p, &x, q, &pkg.s[q].column(j));
                        let class = pkg.pi(n, &w)?;
                        let rest = vector::sub(ring, &w, &pkg.s[n].mul_vec(&class)?);
                        let col = i * ranks[q] + j;
                        for (k, c) in class.into_iter().enumerate() {
                            m.set(k, col, c);
                        }
                        for (k, c) in pkg.q_apply(n, &rest)?.into_iter().enumerate() {
                            qs.set(k, col, c);
                        }
                    }
                }
                mult.insert((p, q), m);
                q_table.insert((p, q), qs);
            }
        }
        pkg.cohomology = CohomologyRing::new(ring, ranks, mult)?;
        pkg.q_table = q_table;
        Ok(pkg)
    }

    pub fn algebra(&self) -> &DgAlgebra {
        &self.algebra
    }

    pub fn shared_algebra(&self) -> Arc<DgAlgebra> {
        Arc::clone(&self.algebra)
    }

    pub fn ring(&self) -> Ring {
        self.algebra.ring()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn top_degree(&self) -> usize {
        self.algebra.top_degree()
    }

    pub fn h_ranks(&self) -> &[usize] {
        self.cohomology.ranks()
    }

    pub fn h_rank(&self, n: isize) -> usize {
        self.cohomology.rank(n)
    }

    pub fn cohomology_ring(&self) -> &CohomologyRing {
        &self.cohomology
    }

    /// `s: H^n → Ker(d^n)` as a `rank C^n × h_n` matrix.
    pub fn s(&self, n: usize) -> &ExactMatrix {
        &self.s[n]
    }

    /// Basis of `B^n = Im(d^{n-1})`.
    pub fn image_basis(&self, n: usize) -> &ExactMatrix {
        &self.boundaries[n]
    }

    /// `q` on `B^n` in image-basis coordinates: a `rank C^{n-1} × rank B^n` matrix.
    pub fn q_matrix(&self, n: usize) -> ExactMatrix {
        if n == 0 {
            ExactMatrix::zeros(self.ring(), 0, 0)
        } else {
            self.lifts[n - 1].clone()
        }
    }

    /// `s(h)` for a class `h ∈ H^n`.
    pub fn section(&self, n: usize, h: &[Scalar]) -> Result<Vec<Scalar>> {
        self.s[n].mul_vec(h)
    }

    /// Class coordinates of a cocycle.
    pub fn pi(&self, n: usize, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if n > self.top_degree() {
            return Ok(Vec::new());
        }
        let dv = self.algebra.d(n as isize).mul_vec(v)?;
        if !vector::is_zero(&dv) {
            return Err(Error::NotACocycle { degree: n as isize });
        }
        let c = self.coordinates[n].mul_vec(v)?;
        Ok(c[..self.s[n].cols()].to_vec())
    }

    /// Coordinates of a coboundary along the image basis of `B^n`.
    pub fn image_coordinates(&self, n: usize, w: &[Scalar]) -> Result<Vec<Scalar>> {
        let c = self.coordinates[n].mul_vec(w)?;
        let h = self.s[n].cols();
        let b = self.boundaries[n].cols();
        if !vector::is_zero(&c[..h]) || !vector::is_zero(&c[h + b..]) {
            return Err(Error::ProductNotACoboundary { degree: n as isize });
        }
        Ok(c[h..h + b].to_vec())
    }

    /// `q(w)`: the chosen preimage under `d` of a coboundary `w ∈ B^n`, in `C^{n-1}`.
    pub fn q_apply(&self, n: usize, w: &[Scalar]) -> Result<Vec<Scalar>> {
        if n > self.top_degree() {
            return Ok(vector::zeros(self.algebra.rank(n as isize - 1)));
        }
        let b = self.image_coordinates(n, w)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        self.lifts[n - 1].mul_vec(&b)
    }

    /// `q(x_i, y_j) = q(s(x_i)s(y_j) - s(x_i y_j))` for basis classes.
    pub fn q_basis(&self, p: usize, i: usize, q: usize, j: usize) -> Vec<Scalar> {
        match self.q_table.get(&(p, q)) {
            Some(m) => m.column(i * self.h_rank(q as isize) + j),
            None => vector::zeros(self.algebra.rank((p + q) as isize - 1)),
        }
    }

    /// `q(x, y)` for homogeneous classes, a cochain of degree `p + q - 1`
    /// with `d q(x, y) = s(x)s(y) - s(xy)`.
    pub fn q_pair(&self, p: usize, x: &[Scalar], q: usize, y: &[Scalar]) -> Vec<Scalar> {
        let ring = self.ring();
        let mut out = vector::zeros(self.algebra.rank((p + q) as isize - 1));
        let Some(m) = self.q_table.get(&(p, q)) else {
            return out;
        };
        let hq = self.h_rank(q as isize);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let c = ring.mul(a, b);
                let col = i * hq + j;
                for (k, o) in out.iter_mut().enumerate() {
                    ring.add_mul_assign(o, m.get(k, col), &c);
                }
            }
        }
        out
    }

    /// Matrix identities that define a sections package, each as a named verdict.
    pub fn check_invariants(&self) -> Vec<(String, bool)> {
        let a = &*self.algebra;
        let top = self.top_degree();
        let mut out = Vec::new();
        let mut push = |name: String, ok: bool| out.push((name, ok));
        for n in 0..=top {
            let h = self.s[n].cols();
            let b_n = self.boundaries[n].cols();
            let b_next = self.lifts[n].cols();
            push(
                format!("degree {n}: rank C = h + rank B^(n+1) + rank B^n"),
                a.ranks()[n] == h + b_n + b_next,
            );
            let ds = a.d(n as isize).mul(&self.s[n]).expect("shapes agree");
            push(format!("degree {n}: d s = 0"), ds.is_zero());
            let pis = self.coordinates[n]
                .mul(&self.s[n])
                .expect("shapes agree")
                .select_rows(0..h);
            push(format!("degree {n}: pi s = id"), pis.is_identity());
            let dq = a.d(n as isize).mul(&self.lifts[n]).expect("shapes agree");
            push(
                format!("degree {n}: d q = id on Im d"),
                dq == self.next_boundaries(n),
            );
        }
        let unit_ok = self.s[0].cols() > 0 && self.s[0].column(0) == a.unit();
        push("s(1) = 1".to_string(), unit_ok);
        out
    }

    fn next_boundaries(&self, n: usize) -> ExactMatrix {
        if n < self.top_degree() {
            self.boundaries[n + 1].clone()
        } else {
            ExactMatrix::zeros(self.ring(), 0, 0)
        }
    }

    pub fn to_json_value(&self) -> Value {
        let per_degree = |ms: &[ExactMatrix]| {
            let mut m = Map::new();
            for (n, x) in ms.iter().enumerate() {
                m.insert(n.to_string(), x.to_json_rows());
            }
            Value::Object(m)
        };
        json!({
            "ring": self.ring().to_string(),
            "seed": self.seed,
            "ranks": self.algebra.ranks(),
            "h_ranks": self.h_ranks(),
            "image_ranks": self.boundaries.iter().map(ExactMatrix::cols).collect::<Vec<_>>(),
            "s": per_degree(&self.s),
            "image_basis": per_degree(&self.boundaries),
            "q": per_degree(&self.lifts),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Reads a `.sections.json` document for `algebra` and re-checks every
    /// defining identity.
    pub fn from_json(algebra: Arc<DgAlgebra>, text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let ring = algebra.ring();
        let top = algebra.top_degree();
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Format(format!("missing field `{name}`")))
        };
        let file_ring: Ring = field("ring")?
            .as_str()
            .ok_or_else(|| Error::Format("`ring` must be a string".into()))?
            .parse()?;
        if file_ring != ring {
            return Err(Error::InvalidRing(format!(
                "sections over {file_ring} for an algebra over {ring}"
            )));
        }
        let ranks: Vec<usize> = serde_json::from_value(field("ranks")?.clone())?;
        if ranks != algebra.ranks() {
            return Err(Error::ShapeMismatch(
                "sections were computed for different cochain ranks".into(),
            ));
        }
        let h: Vec<usize> = serde_json::from_value(field("h_ranks")?.clone())?;
        let b: Vec<usize> = serde_json::from_value(field("image_ranks")?.clone())?;
        if h.len() != top + 1 || b.len() != top + 1 {
            return Err(Error::Format(
                "rank lists do not match the top degree".into(),
            ));
        }
        let seed: Option<u64> = serde_json::from_value(field("seed")?.clone())?;
        let read = |name: &str, n: usize, rows: usize, cols: usize| -> Result<ExactMatrix> {
            let m = field(name)?
                .get(n.to_string())
                .ok_or_else(|| Error::Format(format!("`{name}` lacks degree {n}")))?;
            ExactMatrix::from_json_rows(ring, m, rows, cols)
        };
        let mut s = Vec::new();
        let mut boundaries = Vec::new();
        let mut lifts = Vec::new();
        for n in 0..=top {
            s.push(read("s", n, ranks[n], h[n])?);
            boundaries.push(read("image_basis", n, ranks[n], b[n])?);
            let next = if n < top { b[n + 1] } else { 0 };
            lifts.push(read("q", n, ranks[n], next)?);
        }
        let mut coordinates = Vec::new();
        for n in 0..=top {
            let t = ExactMatrix::hstack(&[&s[n], &boundaries[n], &lifts[n]])?;
            let inv = (t.rows() == t.cols())
                .then(|| inverse(&t))
                .flatten()
                .ok_or_else(|| {
                    Error::Inconsistent(format!("degree {n} decomposition is not unimodular"))
                })?;
            coordinates.push(inv);
        }
        let pkg = Self::assemble(algebra, seed, s, boundaries, lifts, coordinates)?;
        if let Some((name, _)) = pkg.check_invariants().into_iter().find(|(_, ok)| !ok) {
            return Err(Error::Inconsistent(format!(
                "loaded sections fail `{name}`"
            )));
        }
        Ok(pkg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::cochain_algebra;
    use crate::simplicial::{build_circle, build_sphere, build_torus, SimplicialComplex};
    use proptest::prelude::*;

    fn torus_algebra(n: usize) -> Arc<DgAlgebra> {
        Arc::new(cochain_algebra(&build_torus(n).unwrap(), Ring::Integers))
    }

    fn all_pass(pkg: &CohomologySections) {
        for (name, ok) in pkg.check_invariants() {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn circle_sections() {
        let a = cochain_algebra(&build_circle(), Ring::Integers);
        let pkg = build_sections(&a, None).unwrap();
        assert_eq!(pkg.h_ranks(), &[1, 1]);
        all_pass(&pkg);
        let h = pkg.cohomology_ring();
        assert_eq!(h.basis_product(1, 0, 1, 0), Vec::<Scalar>::new());
        assert_eq!(
            h.basis_product(0, 0, 1, 0),
            vector::from_i64(Ring::Integers, &[1])
        );
    }

    #[test]
    fn cohomology_matches_ranks() {
        let a = torus_algebra(2);
        let h = compute_cohomology(&a).unwrap();
        let ranks: Vec<_> = h.iter().map(Subquotient::free_rank).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        assert!(h.iter().all(Subquotient::is_free));
    }

    #[test]
    fn torus_cup_square_is_a_generator() {
        let pkg = CohomologySections::build(torus_algebra(2), None).unwrap();
        all_pass(&pkg);
        let h = pkg.cohomology_ring();
        let xy = h.basis_product(1, 0, 1, 1);
        let yx = h.basis_product(1, 1, 1, 0);
        assert_eq!(xy.len(), 1);
        assert!(Ring::Integers.is_unit(&xy[0]));
        assert_eq!(vector::add(Ring::Integers, &xy, &yx), vector::zeros(1));
        assert!(vector::is_zero(&h.basis_product(1, 0, 1, 0)));
    }

    #[test]
    fn q_bounds_the_product_defect() {
        let a = torus_algebra(2);
        let pkg = CohomologySections::build(a.clone(), Some(11)).unwrap();
        let ring = a.ring();
        for i in 0..2 {
            for j in 0..2 {
                let q = pkg.q_basis(1, i, 1, j);
                let lhs = a.d(1).mul_vec(&q).unwrap();
                let prod = a.multiply(1, &pkg.s(1).column(i), 1, &pkg.s(1).column(j));
                let class = pkg.cohomology_ring().basis_product(1, i, 1, j);
                let rhs = vector::sub(ring, &prod, &pkg.section(2, &class).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn seeds_change_sections_by_coboundaries() {
        let a = torus_algebra(2);
        let p0 = CohomologySections::build(a.clone(), None).unwrap();
        let p1 = CohomologySections::build(a.clone(), Some(3)).unwrap();
        all_pass(&p1);
        assert_ne!(p0.s(1), p1.s(1));
        let diff = p1.s(1).sub(p0.s(1)).unwrap();
        for col in diff.columns() {
            assert!(vector::is_zero(&p0.pi(1, &col).unwrap()));
            p0.image_coordinates(1, &col).unwrap();
        }
        assert_eq!(p0.cohomology_ring(), p1.cohomology_ring());
    }

    #[test]
    fn pi_rejects_non_cocycles() {
        let a = torus_algebra(2);
        let pkg = CohomologySections::build(a.clone(), None).unwrap();
        let v = vector::unit(a.ring(), a.ranks()[0], 0);
        assert!(matches!(
            pkg.pi(0, &v),
            Err(Error::NotACocycle { degree: 0 })
        ));
        let w = pkg.s(1).column(0);
        assert!(matches!(
            pkg.q_apply(1, &w),
            Err(Error::ProductNotACoboundary { degree: 1 })
        ));
    }

    #[test]
    fn torsion_is_refused() {
        let rp2 = SimplicialComplex::new(
            6,
            vec![
                vec![0, 1, 3],
                vec![0, 1, 4],
                vec![0, 2, 3],
                vec![0, 2, 5],
                vec![0, 4, 5],
                vec![1, 2, 4],
                vec![1, 2, 5],
                vec![1, 3, 5],
                vec![2, 3, 4],
                vec![3, 4, 5],
            ],
        )
        .unwrap();
        let a = cochain_algebra(&rp2, Ring::Integers);
        assert!(matches!(
            build_sections(&a, None),
            Err(Error::TorsionHomology { degree: 2, .. })
        ));
        let f3 = cochain_algebra(&rp2, Ring::PrimeField(3));
        assert_eq!(build_sections(&f3, None).unwrap().h_ranks(), &[1, 0, 0]);
        let f2 = cochain_algebra(&rp2, Ring::PrimeField(2));
        assert_eq!(build_sections(&f2, None).unwrap().h_ranks(), &[1, 1, 1]);
    }

    #[test]
    fn json_round_trip() {
        let a = Arc::new(cochain_algebra(&build_sphere(2), Ring::Integers));
        let pkg = CohomologySections::build(a.clone(), Some(5)).unwrap();
        let back = CohomologySections::from_json(a.clone(), &pkg.to_json()).unwrap();
        assert_eq!(back.s(2), pkg.s(2));
        assert_eq!(back.seed(), Some(5));
        let mut v: Value = serde_json::from_str(&pkg.to_json()).unwrap();
        v["s"]["2"][0][0] = json!(7);
        assert!(CohomologySections::from_json(a, &v.to_string()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn every_seed_gives_valid_sections(seed in any::<u64>()) {
            let a = Arc::new(cochain_algebra(&build_circle(), Ring::Integers));
            let pkg = CohomologySections::build(a.clone(), Some(seed)).unwrap();
            for (name, ok) in pkg.check_invariants() {
                prop_assert!(ok, "{}", name);
            }
            let canonical = CohomologySections::build(a, None).unwrap();
            prop_assert_eq!(pkg.cohomology_ring(), canonical.cohomology_ring());
        }
    }
}
