//! The mapping cone of left multiplication by a class `c`, its cohomology
//! as a right `H`-module, and the extension
//!
//! `0 → H/(cH)[|c|] → H(cone) → Ann(c)[|c|-1] → 0`.
//!
//! With `e = |c| - 1`, the cone has `cone^n = C^n ⊕ C^{n-e}` and
//! `D(x, y) = (dx + s(c)y, (-1)^e dy)`. `C` acts diagonally on the right.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::dga::{DgModule, ProductEntry, ValidationReport};
use crate::error::{Error, Result};
use crate::exactlin::{
    invariant_factors, kernel_basis, rank, vector, ExactMatrix, Infeasibility, LinearSolver, Ring,
    Scalar, Subquotient,
};
use crate::hochschild::{theta, HochschildCochain};
use crate::sections::{ClassRef, CohomologyRing, CohomologySections};

fn sign(ring: Ring, exponent: isize) -> Scalar {
    if exponent.rem_euclid(2) == 0 {
        ring.one()
    } else {
        ring.neg(&ring.one())
    }
}

fn normalize(ring: Ring, xs: impl IntoIterator<Item = Scalar>) -> Vec<Scalar> {
    let mut v: Vec<Scalar> = xs
        .into_iter()
        .map(|x| ring.mul(&x, &ring.normalizing_unit(&x)))
        .collect();
    v.sort();
    v
}

#[derive(Clone, Debug)]
pub struct ConeComplex {
    c_degree: usize,
    c: Vec<Scalar>,
    zc: Vec<Scalar>,
    shift: isize,
    x_ranks: BTreeMap<isize, usize>,
    module: DgModule,
}

impl ConeComplex {
    pub fn module(&self) -> &DgModule {
        &self.module
    }

    pub fn class(&self) -> ClassRef<'_> {
        ClassRef::new(self.c_degree, &self.c)
    }

    /// The cocycle `s(c)` the cone is built from.
    pub fn cocycle(&self) -> &[Scalar] {
        &self.zc
    }

    /// `e = |c| - 1`: the `y` summand of `cone^n` is `C^{n-e}`.
    pub fn shift(&self) -> isize {
        self.shift
    }

    pub fn min_degree(&self) -> isize {
        self.module.min_degree()
    }

    pub fn max_degree(&self) -> isize {
        self.module.max_degree()
    }

    pub fn rank(&self, n: isize) -> usize {
        self.module.rank(n)
    }

    pub fn d(&self, n: isize) -> ExactMatrix {
        self.module.d(n)
    }

    fn x_rank(&self, n: isize) -> usize {
        self.x_ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn join(&self, n: isize, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut v = x.to_vec();
        v.extend_from_slice(y);
        debug_assert_eq!(v.len(), self.rank(n));
        v
    }

    pub fn split<'v>(&self, n: isize, v: &'v [Scalar]) -> (&'v [Scalar], &'v [Scalar]) {
        v.split_at(self.x_rank(n))
    }

    pub fn validate(&self, co: &CohomologySections) -> ValidationReport {
        self.module.validate(co.algebra())
    }
}

/// The cone of `y ↦ s(c)y`.
pub fn mapping_cone(co: &CohomologySections, c: ClassRef) -> Result<ConeComplex> {
    let a = co.algebra();
    let ring = a.ring();
    let top = a.top_degree() as isize;
    let k = c.degree;
    if c.coords.len() != co.h_rank(k as isize) {
        return Err(Error::DimensionMismatch(format!(
            "class with {} coordinates in H^{k} of rank {}",
            c.coords.len(),
            co.h_rank(k as isize)
        )));
    }
    let zc = co.section(k, c.coords)?;
    let e = k as isize - 1;
    let lo = 0.min(e);
    let hi = top.max(top + e);
    let in_range = |n: isize| (0..=top).contains(&n);
    let ranks: Vec<usize> = (lo..=hi).map(|n| a.rank(n) + a.rank(n - e)).collect();
    let x_ranks: BTreeMap<isize, usize> = (lo..=hi).map(|n| (n, a.rank(n))).collect();
    let mut diff = Vec::new();
    for n in lo..hi {
        let dx = a.d(n);
        let l = if in_range(n - e) && n < top {
            a.left_multiplication(k, &zc, (n - e) as usize)
        } else {
            ExactMatrix::zeros(ring, a.rank(n + 1), a.rank(n - e))
        };
        let dy = a.d(n - e).scale(&sign(ring, e));
        let lower = ExactMatrix::zeros(ring, a.rank(n + 1 - e), a.rank(n));
        let upper_row = ExactMatrix::hstack(&[&dx, &l])?;
        let lower_row = ExactMatrix::hstack(&[&lower, &dy])?;
        diff.push(ExactMatrix::vstack(&[&upper_row, &lower_row])?);
    }
    let mut action: BTreeMap<(isize, usize), Vec<ProductEntry>> = BTreeMap::new();
    for p in lo..=hi {
        for q in 0..=top as usize {
            let target = p + q as isize;
            if target > hi {
                continue;
            }
            let mut entries = Vec::new();
            if in_range(p) && in_range(target) {
                for pe in a.product_block(p as usize, q) {
                    entries.push(pe.clone());
                }
            }
            let py = p - e;
            if in_range(py) && in_range(py + q as isize) {
                let (xo, ko) = (a.rank(p), a.rank(target));
                for pe in a.product_block(py as usize, q) {
                    entries.push(ProductEntry {
                        i: pe.i + xo,
                        j: pe.j,
                        k: pe.k + ko,
                        c: pe.c.clone(),
                    });
                }
            }
            if !entries.is_empty() {
                action.insert((p, q), entries);
            }
        }
    }
    let module = DgModule::new(ring, lo, ranks, diff, action)?;
    for n in lo..hi {
        if !module.d(n + 1).mul(&module.d(n))?.is_zero() {
            return Err(Error::Inconsistent(format!(
                "cone differential squares to a nonzero map in degree {n}"
            )));
        }
    }
    Ok(ConeComplex {
        c_degree: k,
        c: c.coords.to_vec(),
        zc,
        shift: e,
        x_ranks,
        module,
    })
}

/// Cohomology of a cone, one subquotient per degree.
#[derive(Clone, Debug)]
pub struct ConeCohomology {
    min_degree: isize,
    groups: Vec<Subquotient>,
}

impl ConeCohomology {
    pub fn min_degree(&self) -> isize {
        self.min_degree
    }

    pub fn max_degree(&self) -> isize {
        self.min_degree + self.groups.len() as isize - 1
    }

    pub fn group(&self, n: isize) -> Option<&Subquotient> {
        let i = n - self.min_degree;
        (i >= 0).then(|| self.groups.get(i as usize)).flatten()
    }

    pub fn shape(&self, n: isize) -> GroupShape {
        match self.group(n) {
            Some(g) => GroupShape::of(g),
            None => GroupShape::default(),
        }
    }

    /// Matrix of `ξ ↦ ξ·h_j` from `H^n(cone)` to `H^{n+q}(cone)` on summand coordinates.
    pub fn action_matrix(
        &self,
        cone: &ConeComplex,
        co: &CohomologySections,
        n: isize,
        q: usize,
        j: usize,
    ) -> Result<ExactMatrix> {
        let ring = co.ring();
        let (Some(src), Some(dst)) = (self.group(n), self.group(n + q as isize)) else {
            let rows = self.group(n + q as isize).map_or(0, |g| g.summands().len());
            let cols = self.group(n).map_or(0, |g| g.summands().len());
            return Ok(ExactMatrix::zeros(ring, rows, cols));
        };
        let h = co.section(q, &vector::unit(ring, co.h_rank(q as isize), j))?;
        let count = src.summands().len();
        let cols: Vec<Vec<Scalar>> = (0..count)
            .map(|i| {
                let rep = src.representative(&vector::unit(ring, count, i));
                dst.class_coordinates(&cone.module().act(n, &rep, q, &h))
            })
            .collect::<Result<_>>()?;
        Ok(ExactMatrix::from_columns(ring, dst.summands().len(), &cols))
    }
}

/// Free rank and torsion of a finitely generated module.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupShape {
    pub free_rank: usize,
    pub torsion: Vec<Scalar>,
}

impl GroupShape {
    pub fn of(g: &Subquotient) -> Self {
        GroupShape {
            free_rank: g.free_rank(),
            torsion: normalize(g.ring(), g.torsion()),
        }
    }
}

pub fn cone_cohomology(cone: &ConeComplex) -> Result<ConeCohomology> {
    let groups = (cone.min_degree()..=cone.max_degree())
        .map(|n| Subquotient::new(&kernel_basis(&cone.d(n)), &cone.d(n - 1)))
        .collect::<Result<_>>()?;
    Ok(ConeCohomology {
        min_degree: cone.min_degree(),
        groups,
    })
}

/// Cone cohomology from ranks and invariant factors of `D` alone:
/// free rank `dim - rank D^n - rank D^{n-1}`, torsion the non-unit
/// invariant factors of `D^{n-1}`.
pub fn cone_cohomology_oracle(cone: &ConeComplex) -> Vec<GroupShape> {
    let ring = cone.module().ring();
    (cone.min_degree()..=cone.max_degree())
        .map(|n| {
            let before = cone.d(n - 1);
            let free_rank = cone.rank(n) - rank(&cone.d(n)) - rank(&before);
            let torsion = invariant_factors(&before)
                .into_iter()
                .filter(|f| !f.is_zero() && !ring.is_unit(f));
            GroupShape {
                free_rank,
                torsion: normalize(ring, torsion),
            }
        })
        .collect()
}

/// An arity-2 cochain `Ann(c) ⊗ H → H`, read modulo `cH`. Block `(m, q)`
/// has `h_{m+q+e}` rows and one column per pair `(x_i, h_j)`, index `i h_q + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCocycle {
    pub blocks: BTreeMap<(usize, usize), ExactMatrix>,
}

impl ExtensionCocycle {
    pub fn sub(&self, other: &ExtensionCocycle) -> Result<ExtensionCocycle> {
        let mut blocks = BTreeMap::new();
        for (key, m) in &self.blocks {
            let o = other
                .blocks
                .get(key)
                .ok_or_else(|| Error::ShapeMismatch(format!("missing block {key:?}")))?;
            blocks.insert(*key, m.sub(o)?);
        }
        Ok(ExtensionCocycle { blocks })
    }
}

/// A degree-`e` linear map `b_m: Ann(c)^m → H^{m+e}`, one matrix per `m`
/// in the annihilator basis.
pub type AnnihilatorMap = BTreeMap<usize, ExactMatrix>;

#[derive(Clone, Debug)]
pub struct GysinExtension<'a> {
    co: &'a CohomologySections,
    cone: ConeComplex,
    middle: ConeCohomology,
    kernel: Vec<Subquotient>,
    c_multiples: Vec<Subquotient>,
    ann: Vec<ExactMatrix>,
    ann_solvers: Vec<LinearSolver>,
    kernel_solvers: BTreeMap<isize, LinearSolver>,
    boundary_solvers: BTreeMap<isize, LinearSolver>,
    sigma: BTreeMap<usize, ExactMatrix>,
    beta_geo: ExtensionCocycle,
}

/// Builds the extension, `σ` and `β_geo`.
pub fn gysin_extension<'a>(co: &'a CohomologySections, c: ClassRef) -> Result<GysinExtension<'a>> {
    let cone = mapping_cone(co, c)?;
    let middle = cone_cohomology(&cone)?;
    let h = co.cohomology_ring();
    let ring = co.ring();
    let top = co.top_degree();
    let k = c.degree;
    let e = cone.shift();
    let mut kernel = Vec::new();
    let mut c_multiples = Vec::new();
    let mut ann = Vec::new();
    for n in 0..=top {
        let cm = if n >= k {
            h.left_multiplication(k, c.coords, n - k)
        } else {
            ExactMatrix::zeros(ring, h.rank(n as isize), 0)
        };
        kernel.push(Subquotient::new(
            &ExactMatrix::identity(ring, h.rank(n as isize)),
            &cm,
        )?);
        c_multiples.push(Subquotient::submodule(&cm)?);
        let lc = if n + k <= top {
            h.left_multiplication(k, c.coords, n)
        } else {
            ExactMatrix::zeros(ring, 0, h.rank(n as isize))
        };
        ann.push(kernel_basis(&lc));
    }
    let ann_solvers = ann.iter().map(LinearSolver::new).collect();
    let mut kernel_solvers = BTreeMap::new();
    let mut boundary_solvers = BTreeMap::new();
    for n in cone.min_degree()..=cone.max_degree() {
        let dprev = cone.d(n - 1);
        boundary_solvers.insert(n, LinearSolver::new(&dprev));
        if (0..=top as isize).contains(&n) {
            let e_n = iota_matrix(co, &cone, n)?;
            kernel_solvers.insert(n, LinearSolver::new(&ExactMatrix::hstack(&[&e_n, &dprev])?));
        }
    }
    let mut ext = GysinExtension {
        co,
        cone,
        middle,
        kernel,
        c_multiples,
        ann,
        ann_solvers,
        kernel_solvers,
        boundary_solvers,
        sigma: BTreeMap::new(),
        beta_geo: ExtensionCocycle {
            blocks: BTreeMap::new(),
        },
    };
    for m in 0..=top {
        let n = m as isize + e;
        let cols: Vec<Vec<Scalar>> = ext.ann[m]
            .columns()
            .iter()
            .map(|x| ext.sigma_of(m, x))
            .collect();
        ext.sigma
            .insert(m, ExactMatrix::from_columns(ring, ext.cone.rank(n), &cols));
    }
    ext.beta_geo = ext.compute_beta_geo()?;
    Ok(ext)
}

/// Columns `(s(h_i), 0)` in `cone^n`.
fn iota_matrix(co: &CohomologySections, cone: &ConeComplex, n: isize) -> Result<ExactMatrix> {
    let ring = co.ring();
    let s = co.s(n as usize);
    let zeros = ExactMatrix::zeros(ring, cone.rank(n) - s.rows(), s.cols());
    ExactMatrix::vstack(&[s, &zeros])
}

impl<'a> GysinExtension<'a> {
    pub fn sections(&self) -> &'a CohomologySections {
        self.co
    }

    pub fn cone(&self) -> &ConeComplex {
        &self.cone
    }

    pub fn middle(&self) -> &ConeCohomology {
        &self.middle
    }

    /// `H^n / c H^{n-|c|}`, sitting in cone degree `n`.
    pub fn kernel(&self, n: usize) -> &Subquotient {
        &self.kernel[n]
    }

    /// Basis of `Ann(c)^m ⊆ H^m`, sitting in cone degree `m + e`.
    pub fn annihilator(&self, m: usize) -> &ExactMatrix {
        &self.ann[m]
    }

    pub fn annihilator_rank(&self, m: isize) -> usize {
        if m < 0 {
            0
        } else {
            self.ann.get(m as usize).map_or(0, ExactMatrix::cols)
        }
    }

    pub fn c_degree(&self) -> usize {
        self.cone.c_degree
    }

    pub fn shift(&self) -> isize {
        self.cone.shift
    }

    pub fn beta_geo(&self) -> &ExtensionCocycle {
        &self.beta_geo
    }

    /// Chain-level `σ` on the annihilator basis of degree `m`.
    pub fn sigma(&self, m: usize) -> &ExactMatrix {
        &self.sigma[&m]
    }

    fn h(&self) -> &CohomologyRing {
        self.co.cohomology_ring()
    }

    fn ring(&self) -> Ring {
        self.co.ring()
    }

    /// `σ(x) = (-q(c, x), s(x))` for `x ∈ H^m`.
    fn sigma_of(&self, m: usize, x: &[Scalar]) -> Vec<Scalar> {
        let ring = self.ring();
        let n = m as isize + self.shift();
        let q = self.co.q_pair(self.c_degree(), &self.cone.c, m, x);
        let s = self.co.section(m, x).expect("class has the right length");
        self.cone
            .join(n, &vector::scale(ring, &q, &sign(ring, 1)), &s)
    }

    /// Coordinates of `x_i h_j` along the annihilator basis of degree `m + q`.
    fn ann_product_coordinates(
        &self,
        m: usize,
        i: usize,
        q: usize,
        j: usize,
    ) -> Result<Option<Vec<Scalar>>> {
        if m + q > self.co.top_degree() {
            return Ok(None);
        }
        let ring = self.ring();
        let x = self.ann[m].column(i);
        let xy = self
            .h()
            .multiply(m, &x, q, &vector::unit(ring, self.h().rank(q as isize), j));
        let t = self.ann_solvers[m + q].solve(&xy)?.ok_or_else(|| {
            Error::Inconsistent("Ann(c) is not closed under right multiplication".into())
        })?;
        Ok(Some(t))
    }

    fn admissible_pairs(&self) -> Vec<(usize, usize, usize)> {
        let top = self.co.top_degree();
        let e = self.shift();
        let mut out = Vec::new();
        for m in 0..=top {
            for q in 0..=top {
                let n = (m + q) as isize + e;
                if self.annihilator_rank(m as isize) > 0
                    && self.h().rank(q as isize) > 0
                    && (0..=top as isize).contains(&n)
                    && self.h().rank(n) > 0
                {
                    out.push((m, q, n as usize));
                }
            }
        }
        out
    }

    fn compute_beta_geo(&self) -> Result<ExtensionCocycle> {
        let ring = self.ring();
        let mut blocks = BTreeMap::new();
        for (m, q, n) in self.admissible_pairs() {
            let hq = self.h().rank(q as isize);
            let hn = self.h().rank(n as isize);
            let solver = &self.kernel_solvers[&(n as isize)];
            let mut block = ExactMatrix::zeros(ring, hn, self.ann[m].cols() * hq);
            for i in 0..self.ann[m].cols() {
                let sx = self.sigma[&m].column(i);
                let x = self.ann[m].column(i);
                for j in 0..hq {
                    let y = vector::unit(ring, hq, j);
                    let moved = self.cone.module().act(
                        m as isize + self.shift(),
                        &sx,
                        q,
                        &self.co.section(q, &y)?,
                    );
                    let xy = self.h().multiply(m, &x, q, &y);
                    let v = vector::sub(ring, &moved, &self.sigma_of(m + q, &xy));
                    let z = solver.solve(&v)?.ok_or_else(|| {
                        Error::Inconsistent(format!(
                            "σ(x)y - σ(xy) is not in the image of H^{n} in degree {n}"
                        ))
                    })?;
                    for (r, val) in z.into_iter().take(hn).enumerate() {
                        block.set(r, i * hq + j, val);
                    }
                }
            }
            blocks.insert((m, q), block);
        }
        Ok(ExtensionCocycle { blocks })
    }

    /// `β_θ(x, y) = θ(c, x, y)` on the same blocks as `β_geo`.
    pub fn beta_from_theta(&self, theta: &HochschildCochain) -> Result<ExtensionCocycle> {
        if theta.arity() != 3 || theta.degree() != -1 {
            return Err(Error::ShapeMismatch(
                "β_θ needs an arity-3 cochain of degree -1".into(),
            ));
        }
        let ring = self.ring();
        let k = self.c_degree();
        let mut blocks = BTreeMap::new();
        for (m, q, n) in self.admissible_pairs() {
            let hq = self.h().rank(q as isize);
            let mut block =
                ExactMatrix::zeros(ring, self.h().rank(n as isize), self.ann[m].cols() * hq);
            for i in 0..self.ann[m].cols() {
                let x = self.ann[m].column(i);
                for j in 0..hq {
                    let y = vector::unit(ring, hq, j);
                    let v = theta.evaluate(self.h(), &[k, m, q], &[&self.cone.c, &x, &y]);
                    for (r, val) in v.into_iter().enumerate() {
                        block.set(r, i * hq + j, val);
                    }
                }
            }
            blocks.insert((m, q), block);
        }
        Ok(ExtensionCocycle { blocks })
    }

    /// `b(x) = a(c, x)` for an arity-2 cochain `a` of degree `-1`.
    pub fn correction_from_witness(&self, a: &HochschildCochain) -> Result<AnnihilatorMap> {
        if a.arity() != 2 || a.degree() != -1 {
            return Err(Error::ShapeMismatch(
                "the witness must have arity 2 and degree -1".into(),
            ));
        }
        let ring = self.ring();
        let k = self.c_degree();
        let mut out = BTreeMap::new();
        for m in 0..=self.co.top_degree() {
            let rows = self.h().rank(m as isize + self.shift());
            let cols: Vec<Vec<Scalar>> = self.ann[m]
                .columns()
                .iter()
                .map(|x| {
                    if rows == 0 {
                        Vec::new()
                    } else {
                        a.evaluate(self.h(), &[k, m], &[&self.cone.c, x])
                    }
                })
                .collect();
            out.insert(m, ExactMatrix::from_columns(ring, rows, &cols));
        }
        Ok(out)
    }

    fn apply_b(&self, b: &AnnihilatorMap, m: usize, coords: &[Scalar]) -> Result<Vec<Scalar>> {
        match b.get(&m) {
            Some(bm) => bm.mul_vec(coords),
            None => Ok(vector::zeros(self.h().rank(m as isize + self.shift()))),
        }
    }

    /// Whether `target(x, y) ≡ b(xy) - b(x)y` modulo `cH` on every basis pair.
    pub fn is_trivialized_by(&self, target: &ExtensionCocycle, b: &AnnihilatorMap) -> Result<bool> {
        let ring = self.ring();
        for (m, q, n) in self.admissible_pairs() {
            let hq = self.h().rank(q as isize);
            for i in 0..self.ann[m].cols() {
                let bx = self.apply_b(b, m, &vector::unit(ring, self.ann[m].cols(), i))?;
                for j in 0..hq {
                    let mut v = target.blocks[&(m, q)].column(i * hq + j);
                    if let Some(t) = self.ann_product_coordinates(m, i, q, j)? {
                        v = vector::sub(ring, &v, &self.apply_b(b, m + q, &t)?);
                    }
                    let bxy = self.h().multiply(
                        (m as isize + self.shift()) as usize,
                        &bx,
                        q,
                        &vector::unit(ring, hq, j),
                    );
                    if !bxy.is_empty() {
                        v = vector::add(ring, &v, &bxy);
                    }
                    if !self.c_multiples[n].contains(&v)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Solves `target(x, y) = b(xy) - b(x)y + c·w(x, y)` for `b` and `w`.
    pub fn solve_trivialization(
        &self,
        target: &ExtensionCocycle,
    ) -> Result<std::result::Result<AnnihilatorMap, Infeasibility>> {
        let ring = self.ring();
        let h = self.h();
        let top = self.co.top_degree();
        let e = self.shift();
        let k = self.c_degree();
        let mut b_offset = BTreeMap::new();
        let mut unknowns = 0;
        for m in 0..=top {
            b_offset.insert(m, unknowns);
            unknowns += h.rank(m as isize + e) * self.ann[m].cols();
        }
        let pairs = self.admissible_pairs();
        let mut equations = Vec::new();
        let mut rows = 0;
        for &(m, q, n) in &pairs {
            for i in 0..self.ann[m].cols() {
                for j in 0..h.rank(q as isize) {
                    let slack = if n >= k { h.rank((n - k) as isize) } else { 0 };
                    equations.push((m, q, n, i, j, rows, unknowns, slack));
                    rows += h.rank(n as isize);
                    unknowns += slack;
                }
            }
        }
        let mut mat = ExactMatrix::zeros(ring, rows, unknowns);
        let mut rhs = vector::zeros(rows);
        let bump = |mat: &mut ExactMatrix, r: usize, col: usize, v: &Scalar| {
            let x = ring.add(mat.get(r, col), v);
            mat.set(r, col, x);
        };
        for &(m, q, n, i, j, row0, slack0, slack) in &equations {
            let hq = h.rank(q as isize);
            let hn = h.rank(n as isize);
            for (r, v) in target.blocks[&(m, q)]
                .column(i * hq + j)
                .into_iter()
                .enumerate()
            {
                rhs[row0 + r] = v;
            }
            if let Some(t) = self.ann_product_coordinates(m, i, q, j)? {
                let a_next = self.ann[m + q].cols();
                for (l, tl) in t.iter().enumerate() {
                    if tl.is_zero() {
                        continue;
                    }
                    for r in 0..hn {
                        bump(&mut mat, row0 + r, b_offset[&(m + q)] + r * a_next + l, tl);
                    }
                }
            }
            let src = m as isize + e;
            if src >= 0 {
                let am = self.ann[m].cols();
                for r in 0..h.rank(src) {
                    let prod = h.basis_product(src as usize, r, q, j);
                    for (rr, v) in prod.iter().enumerate() {
                        if !v.is_zero() {
                            bump(&mut mat, row0 + rr, b_offset[&m] + r * am + i, &ring.neg(v));
                        }
                    }
                }
            }
            if slack > 0 {
                let lc = h.left_multiplication(k, &self.cone.c, n - k);
                for rr in 0..hn {
                    for t in 0..slack {
                        let v = lc.get(rr, t);
                        if !v.is_zero() {
                            bump(&mut mat, row0 + rr, slack0 + t, v);
                        }
                    }
                }
            }
        }
        match LinearSolver::new(&mat).solve_or_certify(&rhs)? {
            Ok(x) => {
                let mut b = BTreeMap::new();
                for m in 0..=top {
                    let rows = h.rank(m as isize + e);
                    let am = self.ann[m].cols();
                    let off = b_offset[&m];
                    b.insert(
                        m,
                        ExactMatrix::from_fn(ring, rows, am, |r, i| x[off + r * am + i].clone()),
                    );
                }
                if !self.is_trivialized_by(target, &b)? {
                    return Err(Error::Inconsistent(
                        "trivialization witness fails on re-check".into(),
                    ));
                }
                Ok(Ok(b))
            }
            Err(cert) => Ok(Err(cert)),
        }
    }

    /// Exactness of the extension and the rank bookkeeping, degree by degree.
    pub fn check_exactness(&self) -> Result<Vec<(String, bool)>> {
        let ring = self.ring();
        let h = self.h();
        let top = self.co.top_degree() as isize;
        let e = self.shift();
        let k = self.c_degree();
        let mut out = Vec::new();
        for n in self.cone.min_degree()..=self.cone.max_degree() {
            let dn = self.cone.d(n);
            let dprev = self.cone.d(n - 1);
            let boundaries = &self.boundary_solvers[&n];
            let in_h = (0..=top).contains(&n);
            let hn = h.rank(n);
            let iota = if in_h {
                iota_matrix(self.co, &self.cone, n)?
            } else {
                ExactMatrix::zeros(ring, self.cone.rank(n), 0)
            };
            if in_h {
                let joint = kernel_basis(&ExactMatrix::hstack(&[&iota, &dprev])?);
                let mut ok = joint
                    .columns()
                    .iter()
                    .map(|col| self.c_multiples[n as usize].contains(&col[..hn]))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter()
                    .all(|b| b);
                if n >= k as isize {
                    let lc = h.left_multiplication(k, &self.cone.c, (n - k as isize) as usize);
                    for col in lc.columns() {
                        ok &= boundaries.solve(&iota.mul_vec(&col)?)?.is_some();
                    }
                }
                out.push((format!("degree {n}: H/cH injects into the cone"), ok));
            }
            let cycles = kernel_basis(&dn);
            let m = n - e;
            let am = self.annihilator_rank(m);
            let hm = h.rank(m);
            let mut proj_cols = Vec::new();
            let mut lands_in_ann = true;
            for z in cycles.columns() {
                let (_, y) = self.cone.split(n, &z);
                let p = if (0..=top).contains(&m) {
                    self.co.pi(m as usize, y)?
                } else {
                    Vec::new()
                };
                if !p.is_empty() && m + k as isize <= top {
                    let cp = h.multiply(k, &self.cone.c, m as usize, &p);
                    lands_in_ann &= vector::is_zero(&cp);
                }
                proj_cols.push(p);
            }
            out.push((
                format!("degree {n}: projection lands in Ann(c)"),
                lands_in_ann,
            ));
            let proj = ExactMatrix::from_columns(ring, hm, &proj_cols);
            let joint_solver = if in_h {
                self.kernel_solvers.get(&n)
            } else {
                None
            };
            let mut middle_ok = true;
            for w in kernel_basis(&proj).columns() {
                let v = cycles.mul_vec(&w)?;
                middle_ok &= match joint_solver {
                    Some(s) => s.solve(&v)?.is_some(),
                    None => boundaries.solve(&v)?.is_some(),
                };
            }
            out.push((format!("degree {n}: exact in the middle"), middle_ok));
            if (0..=top).contains(&m) {
                let sig = &self.sigma[&(m as usize)];
                let mut ok = true;
                for (i, col) in sig.columns().iter().enumerate() {
                    let (_, y) = self.cone.split(n, col);
                    ok &= vector::is_zero(&dn.mul_vec(col)?);
                    ok &= self.co.pi(m as usize, y)? == self.ann[m as usize].column(i);
                }
                out.push((
                    format!("degree {n}: σ splits the projection onto Ann(c)"),
                    ok,
                ));
            }
            let mid = self.middle.shape(n);
            let ker = if in_h {
                GroupShape::of(&self.kernel[n as usize])
            } else {
                GroupShape::default()
            };
            let adds_up = mid.free_rank == ker.free_rank + am && mid.torsion == ker.torsion;
            out.push((format!("degree {n}: ranks and torsion add up"), adds_up));
        }
        Ok(out)
    }
}

/// Result of comparing `β_geo` with `β_θ`.
#[derive(Clone, Debug)]
pub struct TheoremCheck {
    pub holds: bool,
    /// `β_geo - β_θ` vanishes modulo `cH` without any correction.
    pub identical: bool,
    pub witness: Option<AnnihilatorMap>,
    pub certificate: Option<Infeasibility>,
}

/// Whether `β_geo - β_θ` is a trivial extension cocycle.
pub fn verify_theorem_th(co: &CohomologySections, c: ClassRef) -> Result<TheoremCheck> {
    let ext = gysin_extension(co, c)?;
    let th = theta(co)?;
    check_theorem_th(&ext, &th)
}

pub fn check_theorem_th(ext: &GysinExtension, theta: &HochschildCochain) -> Result<TheoremCheck> {
    let diff = ext.beta_geo().sub(&ext.beta_from_theta(theta)?)?;
    let identical = ext.is_trivialized_by(&diff, &BTreeMap::new())?;
    Ok(match ext.solve_trivialization(&diff)? {
        Ok(b) => TheoremCheck {
            holds: true,
            identical,
            witness: Some(b),
            certificate: None,
        },
        Err(cert) => TheoremCheck {
            holds: false,
            identical,
            witness: None,
            certificate: Some(cert),
        },
    })
}

/// An `H`-linear section of the projection onto `Ann(c)`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub correction: AnnihilatorMap,
    /// Chain-level `σ̃(x) = σ(x) + (s(b(x)), 0)` on the annihilator basis.
    pub sections: BTreeMap<usize, ExactMatrix>,
    /// The same as cone cohomology summand coordinates.
    pub classes: BTreeMap<usize, ExactMatrix>,
    pub from_witness: bool,
    /// `σ̃(x)s(h) - σ̃(xh) ∈ Im D` for every basis pair.
    pub h_linear: bool,
    pub projection_identity: bool,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Split(Splitting),
    Obstructed(Infeasibility),
}

impl SplitOutcome {
    pub fn splitting(&self) -> Option<&Splitting> {
        match self {
            SplitOutcome::Split(s) => Some(s),
            SplitOutcome::Obstructed(_) => None,
        }
    }
}

/// Looks for `b` with `β_geo(x, y) = b(xy) - b(x)y` modulo `cH`; a
/// trivializing witness `a` of `θ` is tried first through `b(x) = a(c, x)`.
pub fn split_extension(
    ext: &GysinExtension,
    witness: Option<&HochschildCochain>,
) -> Result<SplitOutcome> {
    let mut found = None;
    if let Some(a) = witness {
        let b = ext.correction_from_witness(a)?;
        if ext.is_trivialized_by(ext.beta_geo(), &b)? {
            found = Some((b, true));
        }
    }
    if found.is_none() {
        match ext.solve_trivialization(ext.beta_geo())? {
            Ok(b) => found = Some((b, false)),
            Err(cert) => return Ok(SplitOutcome::Obstructed(cert)),
        }
    }
    let (b, from_witness) = found.expect("set above");
    let co = ext.sections();
    let ring = co.ring();
    let e = ext.shift();
    let top = co.top_degree();
    let mut sections = BTreeMap::new();
    let mut classes = BTreeMap::new();
    let mut projection_identity = true;
    for m in 0..=top {
        let n = m as isize + e;
        let am = ext.ann[m].cols();
        let mut cols = Vec::with_capacity(am);
        for i in 0..am {
            let mut v = ext.sigma[&m].column(i);
            if (0..=top as isize).contains(&n) {
                let bx = ext.apply_b(&b, m, &vector::unit(ring, am, i))?;
                let lift = co.section(n as usize, &bx)?;
                for (r, x) in lift.into_iter().enumerate() {
                    v[r] = ring.add(&v[r], &x);
                }
            }
            let (_, y) = ext.cone.split(n, &v);
            projection_identity &= co.pi(m, y)? == ext.ann[m].column(i);
            cols.push(v);
        }
        let mat = ExactMatrix::from_columns(ring, ext.cone.rank(n), &cols);
        let class_cols: Vec<Vec<Scalar>> = match ext.middle.group(n) {
            Some(g) => cols
                .iter()
                .map(|v| g.class_coordinates(v))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let summands = ext.middle.group(n).map_or(0, |g| g.summands().len());
        classes.insert(m, ExactMatrix::from_columns(ring, summands, &class_cols));
        sections.insert(m, mat);
    }
    let mut h_linear = true;
    for m in 0..=top {
        for q in 0..=top {
            let hq = co.h_rank(q as isize);
            let n = (m + q) as isize + e;
            if n > ext.cone.max_degree() {
                continue;
            }
            for i in 0..ext.ann[m].cols() {
                for j in 0..hq {
                    let y = vector::unit(ring, hq, j);
                    let moved = ext.cone.module().act(
                        m as isize + e,
                        &sections[&m].column(i),
                        q,
                        &co.section(q, &y)?,
                    );
                    let mut v = moved;
                    if let Some(t) = ext.ann_product_coordinates(m, i, q, j)? {
                        v = vector::sub(ring, &v, &sections[&(m + q)].mul_vec(&t)?);
                    }
                    h_linear &= ext.boundary_solvers[&n].solve(&v)?.is_some();
                }
            }
        }
    }
    Ok(SplitOutcome::Split(Splitting {
        correction: b,
        sections,
        classes,
        from_witness,
        h_linear,
        projection_identity,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::cochain_algebra;
    use crate::hochschild::{trivialize, TwistedBimodule};
    use crate::massey::massey_fixture;
    use crate::simplicial::{build_sphere, build_torus};
    use crate::DgAlgebra;
    use std::sync::Arc;

    fn sections(a: DgAlgebra, seed: Option<u64>) -> CohomologySections {
        CohomologySections::build(Arc::new(a), seed).unwrap()
    }

    fn all_ok(checks: &[(String, bool)]) {
        for (name, ok) in checks {
            assert!(ok, "{name}");
        }
    }

    fn int(k: i64) -> Vec<Scalar> {
        vec![Ring::Integers.from_i64(k)]
    }

    #[test]
    fn zero_class_gives_the_direct_sum() {
        let co = sections(cochain_algebra(&build_sphere(2), Ring::Integers), None);
        let c = int(0);
        let cone = mapping_cone(&co, ClassRef::new(2, &c)).unwrap();
        assert!(cone.validate(&co).passed());
        let hc = cone_cohomology(&cone).unwrap();
        let ranks: Vec<usize> = (cone.min_degree()..=cone.max_degree())
            .map(|n| hc.shape(n).free_rank)
            .collect();
        // H ⊕ H[-1] over degrees 0..=3
        assert_eq!(ranks, vec![1, 1, 1, 1]);
        let ext = gysin_extension(&co, ClassRef::new(2, &c)).unwrap();
        all_ok(&ext.check_exactness().unwrap());
    }

    #[test]
    fn unit_class_gives_an_acyclic_cone() {
        let co = sections(
            cochain_algebra(&build_torus(2).unwrap(), Ring::Integers),
            None,
        );
        let one = int(1);
        let ext = gysin_extension(&co, ClassRef::new(0, &one)).unwrap();
        let hc = ext.middle();
        for n in hc.min_degree()..=hc.max_degree() {
            assert!(hc.group(n).unwrap().is_zero_module());
        }
        all_ok(&ext.check_exactness().unwrap());
        let split = split_extension(&ext, None).unwrap();
        assert!(split
            .splitting()
            .unwrap()
            .sections
            .values()
            .all(|m| m.cols() == 0));
    }

    #[test]
    fn torus_cone_is_heisenberg_like() {
        let co = sections(
            cochain_algebra(&build_torus(2).unwrap(), Ring::Integers),
            Some(6),
        );
        for k in 1..=3 {
            let c = int(k);
            let cone = mapping_cone(&co, ClassRef::new(2, &c)).unwrap();
            assert!(cone.validate(&co).passed());
            let oracle = cone_cohomology_oracle(&cone);
            let hc = cone_cohomology(&cone).unwrap();
            let shapes: Vec<GroupShape> = (0..=3).map(|n| hc.shape(n)).collect();
            assert_eq!(shapes, oracle);
            let z = |x| Ring::Integers.from_i64(x);
            assert_eq!(
                shapes[0],
                GroupShape {
                    free_rank: 1,
                    torsion: vec![]
                }
            );
            assert_eq!(
                shapes[1],
                GroupShape {
                    free_rank: 2,
                    torsion: vec![]
                }
            );
            let t2 = if k == 1 { vec![] } else { vec![z(k)] };
            assert_eq!(
                shapes[2],
                GroupShape {
                    free_rank: 2,
                    torsion: t2
                }
            );
            assert_eq!(
                shapes[3],
                GroupShape {
                    free_rank: 1,
                    torsion: vec![]
                }
            );
        }
    }

    #[test]
    fn theorem_and_splitting_on_torus() {
        let co = sections(
            cochain_algebra(&build_torus(2).unwrap(), Ring::Integers),
            Some(2),
        );
        let th = theta(&co).unwrap();
        let m = TwistedBimodule::new(co.cohomology_ring());
        let a = trivialize(&th, &m).unwrap().into_witness().unwrap();
        for k in 1..=3 {
            let c = int(k);
            let ext = gysin_extension(&co, ClassRef::new(2, &c)).unwrap();
            all_ok(&ext.check_exactness().unwrap());
            let check = check_theorem_th(&ext, &th).unwrap();
            assert!(check.holds && check.identical);
            for witness in [None, Some(&a)] {
                let split = split_extension(&ext, witness).unwrap();
                let s = split.splitting().unwrap();
                assert!(s.h_linear && s.projection_identity);
                assert_eq!(s.from_witness, witness.is_some());
            }
        }
    }

    #[test]
    fn sphere_theorem() {
        let co = sections(cochain_algebra(&build_sphere(2), Ring::Integers), Some(1));
        let c = int(1);
        let check = verify_theorem_th(&co, ClassRef::new(2, &c)).unwrap();
        assert!(check.holds);
        let ext = gysin_extension(&co, ClassRef::new(2, &c)).unwrap();
        all_ok(&ext.check_exactness().unwrap());
    }

    #[test]
    fn action_is_independent_of_the_seed() {
        let alg = Arc::new(cochain_algebra(&build_torus(2).unwrap(), Ring::Integers));
        let co0 = CohomologySections::build(alg.clone(), None).unwrap();
        let co1 = CohomologySections::build(alg, Some(12)).unwrap();
        let c = int(2);
        let cone = mapping_cone(&co0, ClassRef::new(2, &c)).unwrap();
        let hc = cone_cohomology(&cone).unwrap();
        for n in 0..=1 {
            for j in 0..2 {
                assert_eq!(
                    hc.action_matrix(&cone, &co0, n, 1, j).unwrap(),
                    hc.action_matrix(&cone, &co1, n, 1, j).unwrap()
                );
            }
        }
    }

    #[test]
    fn massey_fixture_does_not_split() {
        let co = sections(massey_fixture(), None);
        let a = co.pi(1, &vector::unit(Ring::Integers, 5, 0)).unwrap();
        let ext = gysin_extension(&co, ClassRef::new(1, &a)).unwrap();
        all_ok(&ext.check_exactness().unwrap());
        let th = theta(&co).unwrap();
        assert!(check_theorem_th(&ext, &th).unwrap().holds);
        assert!(split_extension(&ext, None).unwrap().splitting().is_none());
    }
}
