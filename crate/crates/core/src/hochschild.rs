//! Hochschild cochains of a cohomology algebra `H` with values in the
//! twisted bimodule `H̄[1]`, and the secondary multiplication `θ`.
//!
//! A cochain of arity `l` and internal degree `t` is stored as one dense
//! block per degree tuple `(p_1, …, p_l)`, mapping `H^{p_1} ⊗ … ⊗ H^{p_l}`
//! to `H^{p_1 + … + p_l + t}`. Block columns enumerate basis tuples with the
//! first slot most significant. Missing blocks are zero.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlin::{vector, ExactMatrix, Infeasibility, LinearSolver, Ring, Scalar};
use crate::sections::{CohomologyRing, CohomologySections};

fn sign(ring: Ring, exponent: usize) -> Scalar {
    if exponent.is_multiple_of(2) {
        ring.one()
    } else {
        ring.neg(&ring.one())
    }
}

/// `H` viewed as a bimodule over itself with left action
/// `x ∗ m = (-1)^{|x|} x m` and the ordinary right action.
#[derive(Clone, Copy, Debug)]
pub struct TwistedBimodule<'a> {
    base: &'a CohomologyRing,
}

impl<'a> TwistedBimodule<'a> {
    pub fn new(base: &'a CohomologyRing) -> Self {
        TwistedBimodule { base }
    }

    pub fn base(&self) -> &'a CohomologyRing {
        self.base
    }

    pub fn left_act(&self, p: usize, x: &[Scalar], q: usize, m: &[Scalar]) -> Vec<Scalar> {
        let out = self.base.multiply(p, x, q, m);
        if p.is_multiple_of(2) {
            out
        } else {
            vector::scale(self.base.ring(), &out, &sign(self.base.ring(), 1))
        }
    }

    pub fn right_act(&self, q: usize, m: &[Scalar], p: usize, x: &[Scalar]) -> Vec<Scalar> {
        self.base.multiply(q, m, p, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildCochain {
    ring: Ring,
    arity: usize,
    degree: isize,
    blocks: BTreeMap<Vec<usize>, ExactMatrix>,
}

/// Number of basis tuples in `H^{p_1} ⊗ … ⊗ H^{p_l}`.
fn column_count(h: &CohomologyRing, tuple: &[usize]) -> usize {
    tuple.iter().map(|&p| h.rank(p as isize)).product()
}

fn flat_index(h: &CohomologyRing, tuple: &[usize], idx: &[usize]) -> usize {
    tuple
        .iter()
        .zip(idx)
        .fold(0, |acc, (&p, &i)| acc * h.rank(p as isize) + i)
}

fn multi_index(h: &CohomologyRing, tuple: &[usize], mut col: usize) -> Vec<usize> {
    let mut idx = vec![0; tuple.len()];
    for k in (0..tuple.len()).rev() {
        let r = h.rank(tuple[k] as isize);
        idx[k] = col % r;
        col /= r;
    }
    idx
}

fn target_degree(tuple: &[usize], degree: isize) -> isize {
    tuple.iter().sum::<usize>() as isize + degree
}

fn touches_unit(tuple: &[usize], idx: &[usize]) -> bool {
    tuple.iter().zip(idx).any(|(&p, &i)| p == 0 && i == 0)
}

/// Degree tuples of arity `arity` whose blocks can be nonzero.
pub fn admissible_tuples(h: &CohomologyRing, arity: usize, degree: isize) -> Vec<Vec<usize>> {
    let top = h.top_degree();
    let mut out = Vec::new();
    let mut tuple = vec![0; arity];
    loop {
        let t = target_degree(&tuple, degree);
        if t >= 0 && t as usize <= top && h.rank(t) > 0 && column_count(h, &tuple) > 0 {
            out.push(tuple.clone());
        }
        let mut k = arity;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if tuple[k] < top {
                tuple[k] += 1;
                for t in &mut tuple[k + 1..] {
                    *t = 0;
                }
                break;
            }
        }
    }
}

impl HochschildCochain {
    pub fn zero(ring: Ring, arity: usize, degree: isize) -> Self {
        HochschildCochain {
            ring,
            arity,
            degree,
            blocks: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree as a map into `H` (so `θ` has degree `-1`).
    pub fn degree(&self) -> isize {
        self.degree
    }

    pub fn blocks(&self) -> &BTreeMap<Vec<usize>, ExactMatrix> {
        &self.blocks
    }

    pub fn block(&self, tuple: &[usize]) -> Option<&ExactMatrix> {
        self.blocks.get(tuple)
    }

    /// Stores a block after checking its shape; zero blocks are dropped.
    pub fn set_block(
        &mut self,
        h: &CohomologyRing,
        tuple: Vec<usize>,
        m: ExactMatrix,
    ) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::ShapeMismatch(format!(
                "degree tuple {tuple:?} for a cochain of arity {}",
                self.arity
            )));
        }
        let want = (
            h.rank(target_degree(&tuple, self.degree)),
            column_count(h, &tuple),
        );
        if m.shape() != want {
            return Err(Error::ShapeMismatch(format!(
                "block {tuple:?} has shape {:?}, expected {want:?}",
                m.shape()
            )));
        }
        if m.is_zero() {
            self.blocks.remove(&tuple);
        } else {
            self.blocks.insert(tuple, m);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Value on a tuple of basis classes.
    pub fn value(&self, h: &CohomologyRing, tuple: &[usize], idx: &[usize]) -> Vec<Scalar> {
        match self.blocks.get(tuple) {
            Some(m) => m.column(flat_index(h, tuple, idx)),
            None => vector::zeros(h.rank(target_degree(tuple, self.degree))),
        }
    }

    /// Multilinear value on homogeneous classes `xs[k] ∈ H^{tuple[k]}`.
    pub fn evaluate(&self, h: &CohomologyRing, tuple: &[usize], xs: &[&[Scalar]]) -> Vec<Scalar> {
        let ring = self.ring;
        let mut out = vector::zeros(h.rank(target_degree(tuple, self.degree)));
        let Some(m) = self.blocks.get(tuple) else {
            return out;
        };
        let supports: Vec<Vec<usize>> = xs
            .iter()
            .map(|x| (0..x.len()).filter(|&i| !x[i].is_zero()).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return out;
        }
        let mut pos = vec![0; tuple.len()];
        loop {
            let idx: Vec<usize> = pos.iter().zip(&supports).map(|(&p, s)| s[p]).collect();
            let mut c = ring.one();
            for (k, &i) in idx.iter().enumerate() {
                c = ring.mul(&c, &xs[k][i]);
            }
            let col = flat_index(h, tuple, &idx);
            for (r, o) in out.iter_mut().enumerate() {
                ring.add_mul_assign(o, m.get(r, col), &c);
            }
            let mut k = tuple.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                pos[k] += 1;
                if pos[k] < supports[k].len() {
                    break;
                }
                pos[k] = 0;
            }
        }
    }

    pub fn add(&self, h: &CohomologyRing, other: &HochschildCochain) -> Result<Self> {
        self.combine(h, other, |a, b| a.add(b))
    }

    pub fn sub(&self, h: &CohomologyRing, other: &HochschildCochain) -> Result<Self> {
        self.combine(h, other, |a, b| a.sub(b))
    }

    fn combine(
        &self,
        h: &CohomologyRing,
        other: &HochschildCochain,
        f: impl Fn(&ExactMatrix, &ExactMatrix) -> Result<ExactMatrix>,
    ) -> Result<Self> {
        if self.arity != other.arity || self.degree != other.degree {
            return Err(Error::ShapeMismatch(format!(
                "cochains of arity/degree {}/{} and {}/{}",
                self.arity, self.degree, other.arity, other.degree
            )));
        }
        let mut out = HochschildCochain::zero(self.ring, self.arity, self.degree);
        let keys: std::collections::BTreeSet<&Vec<usize>> =
            self.blocks.keys().chain(other.blocks.keys()).collect();
        for t in keys {
            let zero = || {
                ExactMatrix::zeros(
                    self.ring,
                    h.rank(target_degree(t, self.degree)),
                    column_count(h, t),
                )
            };
            let a = self.blocks.get(t).cloned().unwrap_or_else(zero);
            let b = other.blocks.get(t).cloned().unwrap_or_else(zero);
            out.set_block(h, t.clone(), f(&a, &b)?)?;
        }
        Ok(out)
    }

    /// A random cochain over all admissible tuples; entries in `[-bound, bound]`.
    /// With `normalized`, values on tuples containing the unit class are zero.
    pub fn random<R: Rng + ?Sized>(
        h: &CohomologyRing,
        arity: usize,
        degree: isize,
        normalized: bool,
        rng: &mut R,
        bound: i64,
    ) -> Self {
        let layout = Layout::new(h, arity, degree, normalized);
        let v: Vec<Scalar> = (0..layout.len())
            .map(|_| h.ring().random_small(rng, bound))
            .collect();
        layout.cochain(h, &v)
    }

    /// Whether every value with a unit-class argument vanishes.
    pub fn is_normalized(&self, h: &CohomologyRing) -> bool {
        self.blocks.iter().all(|(tuple, m)| {
            (0..m.cols()).all(|col| {
                !touches_unit(tuple, &multi_index(h, tuple, col)) || vector::is_zero(&m.column(col))
            })
        })
    }

    pub fn to_json_value(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|(t, m)| {
                json!({
                    "degrees": t,
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "matrix": m.to_json_rows(),
                })
            })
            .collect();
        json!({
            "ring": self.ring.to_string(),
            "arity": self.arity,
            "degree": self.degree,
            "blocks": blocks,
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Reads a `.hcochain.json` document; block shapes are checked against `h`.
    pub fn from_json(text: &str, h: &CohomologyRing) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Format(format!("missing field `{name}`")))
        };
        let ring: Ring = field("ring")?
            .as_str()
            .ok_or_else(|| Error::Format("`ring` must be a string".into()))?
            .parse()?;
        if ring != h.ring() {
            return Err(Error::InvalidRing(format!(
                "cochain over {ring}, cohomology over {}",
                h.ring()
            )));
        }
        let arity: usize = serde_json::from_value(field("arity")?.clone())?;
        let degree: isize = serde_json::from_value(field("degree")?.clone())?;
        let mut out = HochschildCochain::zero(ring, arity, degree);
        let blocks = field("blocks")?
            .as_array()
            .ok_or_else(|| Error::Format("`blocks` must be an array".into()))?;
        for b in blocks {
            let get = |name: &str| {
                b.get(name)
                    .ok_or_else(|| Error::Format(format!("block lacks `{name}`")))
            };
            let tuple: Vec<usize> = serde_json::from_value(get("degrees")?.clone())?;
            let rows: usize = serde_json::from_value(get("rows")?.clone())?;
            let cols: usize = serde_json::from_value(get("cols")?.clone())?;
            let m = ExactMatrix::from_json_rows(ring, get("matrix")?, rows, cols)?;
            out.set_block(h, tuple, m)?;
        }
        Ok(out)
    }
}

/// Flat coordinates of cochains of a fixed arity and degree.
#[derive(Clone, Debug)]
pub struct Layout {
    arity: usize,
    degree: isize,
    normalized: bool,
    coords: Vec<(Vec<usize>, usize, usize)>,
}

impl Layout {
    /// With `normalized`, coordinates on tuples containing the unit class
    /// are left out.
    pub fn new(h: &CohomologyRing, arity: usize, degree: isize, normalized: bool) -> Self {
        let mut coords = Vec::new();
        for tuple in admissible_tuples(h, arity, degree) {
            let rows = h.rank(target_degree(&tuple, degree));
            for col in 0..column_count(h, &tuple) {
                if normalized && touches_unit(&tuple, &multi_index(h, &tuple, col)) {
                    continue;
                }
                for row in 0..rows {
                    coords.push((tuple.clone(), row, col));
                }
            }
        }
        Layout {
            arity,
            degree,
            normalized,
            coords,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn flatten(&self, a: &HochschildCochain) -> Vec<Scalar> {
        self.coords
            .iter()
            .map(|(t, r, c)| {
                a.block(t)
                    .map_or_else(Scalar::zero, |m| m.get(*r, *c).clone())
            })
            .collect()
    }

    pub fn cochain(&self, h: &CohomologyRing, v: &[Scalar]) -> HochschildCochain {
        let ring = h.ring();
        let mut blocks: BTreeMap<Vec<usize>, ExactMatrix> = BTreeMap::new();
        for ((t, r, c), x) in self.coords.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            blocks
                .entry(t.clone())
                .or_insert_with(|| {
                    ExactMatrix::zeros(
                        ring,
                        h.rank(target_degree(t, self.degree)),
                        column_count(h, t),
                    )
                })
                .set(*r, *c, x.clone());
        }
        HochschildCochain {
            ring,
            arity: self.arity,
            degree: self.degree,
            blocks,
        }
    }
}

/// `(δa)(x_1, …, x_{l+1}) = x_1 ∗ a(x_2, …) + Σ (-1)^i a(…, x_i x_{i+1}, …)
/// + (-1)^{l+1} a(x_1, …, x_l) x_{l+1}`.
pub fn coboundary(a: &HochschildCochain, m: &TwistedBimodule) -> HochschildCochain {
    let h = m.base();
    let ring = a.ring;
    let l = a.arity;
    let top = h.top_degree();
    let mut out = HochschildCochain::zero(ring, l + 1, a.degree);
    if a.is_zero() {
        return out;
    }
    for tuple in admissible_tuples(h, l + 1, a.degree) {
        let target = target_degree(&tuple, a.degree) as usize;
        let cols = column_count(h, &tuple);
        let first = &tuple[1..];
        let init = &tuple[..l];
        let first_live = a.blocks.contains_key(first);
        let init_live = a.blocks.contains_key(init);
        let merged: Vec<Option<Vec<usize>>> = (0..l)
            .map(|k| {
                let d = tuple[k] + tuple[k + 1];
                if d > top {
                    return None;
                }
                let mut t = tuple[..k].to_vec();
                t.push(d);
                t.extend_from_slice(&tuple[k + 2..]);
                a.blocks.contains_key(&t).then_some(t)
            })
            .collect();
        if !first_live && !init_live && merged.iter().all(Option::is_none) {
            continue;
        }
        let mut block = ExactMatrix::zeros(ring, h.rank(target as isize), cols);
        for col in 0..cols {
            let idx = multi_index(h, &tuple, col);
            let mut acc = vector::zeros(h.rank(target as isize));
            if first_live {
                let v = a.value(h, first, &idx[1..]);
                if !vector::is_zero(&v) {
                    let x = vector::unit(ring, h.rank(tuple[0] as isize), idx[0]);
                    let w = m.left_act(tuple[0], &x, target - tuple[0], &v);
                    acc = vector::add(ring, &acc, &w);
                }
            }
            for (k, t) in merged.iter().enumerate() {
                let Some(t) = t else { continue };
                let prod = h.basis_product(tuple[k], idx[k], tuple[k + 1], idx[k + 1]);
                let mut args: Vec<Vec<Scalar>> = Vec::with_capacity(l);
                for (j, &p) in tuple.iter().enumerate() {
                    if j == k {
                        args.push(prod.clone());
                    } else if j != k + 1 {
                        args.push(vector::unit(ring, h.rank(p as isize), idx[j]));
                    }
                }
                let refs: Vec<&[Scalar]> = args.iter().map(Vec::as_slice).collect();
                let w = a.evaluate(h, t, &refs);
                vector::axpy(ring, &mut acc, &sign(ring, k + 1), &w);
            }
            if init_live {
                let v = a.value(h, init, &idx[..l]);
                if !vector::is_zero(&v) {
                    let y = vector::unit(ring, h.rank(tuple[l] as isize), idx[l]);
                    let w = m.right_act(target - tuple[l], &v, tuple[l], &y);
                    vector::axpy(ring, &mut acc, &sign(ring, l + 1), &w);
                }
            }
            for (r, x) in acc.into_iter().enumerate() {
                block.set(r, col, x);
            }
        }
        if !block.is_zero() {
            out.blocks.insert(tuple, block);
        }
    }
    out
}

/// `Θ(x, y, z) = (-1)^{|x|} s(x)q(y,z) - q(xy,z) + q(x,yz) - q(x,y)s(z)`,
/// a cochain of degree `|x|+|y|+|z|-1`.
pub fn theta_chain(
    co: &CohomologySections,
    p: usize,
    x: &[Scalar],
    q: usize,
    y: &[Scalar],
    r: usize,
    z: &[Scalar],
) -> Result<Vec<Scalar>> {
    let a = co.algebra();
    let ring = a.ring();
    let h = co.cohomology_ring();
    let n = p + q + r;
    let mut out = vector::zeros(a.rank(n as isize - 1));
    if n == 0 || n - 1 > a.top_degree() {
        return Ok(out);
    }
    if q + r > 0 {
        let sx = co.section(p, x)?;
        let qyz = co.q_pair(q, y, r, z);
        let w = a.multiply(p, &sx, q + r - 1, &qyz);
        vector::axpy(ring, &mut out, &sign(ring, p), &w);
    }
    let xy = h.multiply(p, x, q, y);
    if !xy.is_empty() {
        let w = co.q_pair(p + q, &xy, r, z);
        out = vector::sub(ring, &out, &w);
    }
    let yz = h.multiply(q, y, r, z);
    if !yz.is_empty() {
        let w = co.q_pair(p, x, q + r, &yz);
        out = vector::add(ring, &out, &w);
    }
    if p + q > 0 {
        let qxy = co.q_pair(p, x, q, y);
        let sz = co.section(r, z)?;
        let w = a.multiply(p + q - 1, &qxy, r, &sz);
        out = vector::sub(ring, &out, &w);
    }
    Ok(out)
}

/// `θ = π ∘ Θ` on every admissible degree triple.
pub fn theta(co: &CohomologySections) -> Result<HochschildCochain> {
    let h = co.cohomology_ring();
    let ring = h.ring();
    let mut out = HochschildCochain::zero(ring, 3, -1);
    for tuple in admissible_tuples(h, 3, -1) {
        let target = target_degree(&tuple, -1) as usize;
        let cols = column_count(h, &tuple);
        let mut block = ExactMatrix::zeros(ring, h.rank(target as isize), cols);
        for col in 0..cols {
            let idx = multi_index(h, &tuple, col);
            let e = |k: usize| vector::unit(ring, h.rank(tuple[k] as isize), idx[k]);
            let w = theta_chain(co, tuple[0], &e(0), tuple[1], &e(1), tuple[2], &e(2))?;
            for (r, c) in co.pi(target, &w)?.into_iter().enumerate() {
                block.set(r, col, c);
            }
        }
        out.set_block(h, tuple, block)?;
    }
    Ok(out)
}

/// Both sides of the chain-level identity
/// `δ_s Θ(x,y,z,w) = (-1)^{|x|+|y|} d(q(x,y) q(z,w))`, where `δ_s` is the
/// Hochschild coboundary with `s(x)` acting on the left (with the twist)
/// and `s(w)` on the right.
pub fn sign_audit(
    co: &CohomologySections,
    degrees: [usize; 4],
    xs: [&[Scalar]; 4],
) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let a = co.algebra();
    let ring = a.ring();
    let h = co.cohomology_ring();
    let [p, q, r, t] = degrees;
    let [x, y, z, w] = xs;
    let n = p + q + r + t;
    let mut lhs = vector::zeros(a.rank(n as isize - 1));
    if n == 0 || n - 1 > a.top_degree() {
        return Ok((lhs.clone(), lhs));
    }
    if q + r + t > 0 {
        let th = theta_chain(co, q, y, r, z, t, w)?;
        let v = a.multiply(p, &co.section(p, x)?, q + r + t - 1, &th);
        vector::axpy(ring, &mut lhs, &sign(ring, p), &v);
    }
    let xy = h.multiply(p, x, q, y);
    if !xy.is_empty() {
        lhs = vector::sub(ring, &lhs, &theta_chain(co, p + q, &xy, r, z, t, w)?);
    }
    let yz = h.multiply(q, y, r, z);
    if !yz.is_empty() {
        lhs = vector::add(ring, &lhs, &theta_chain(co, p, x, q + r, &yz, t, w)?);
    }
    let zw = h.multiply(r, z, t, w);
    if !zw.is_empty() {
        lhs = vector::sub(ring, &lhs, &theta_chain(co, p, x, q, y, r + t, &zw)?);
    }
    if p + q + r > 0 {
        let th = theta_chain(co, p, x, q, y, r, z)?;
        let v = a.multiply(p + q + r - 1, &th, t, &co.section(t, w)?);
        lhs = vector::add(ring, &lhs, &v);
    }
    let mut rhs = vector::zeros(a.rank(n as isize - 1));
    if p + q > 0 && r + t > 0 && n >= 3 {
        let qxy = co.q_pair(p, x, q, y);
        let qzw = co.q_pair(r, z, t, w);
        let prod = a.multiply(p + q - 1, &qxy, r + t - 1, &qzw);
        if !prod.is_empty() {
            let d = a.d(n as isize - 2).mul_vec(&prod)?;
            rhs = vector::scale(ring, &d, &sign(ring, p + q));
        }
    }
    Ok((lhs, rhs))
}

pub fn verify_cocycle(theta: &HochschildCochain, m: &TwistedBimodule) -> bool {
    coboundary(theta, m).is_zero()
}

/// Outcome of solving `δa = θ` over the ring.
#[derive(Clone, Debug)]
pub enum Trivialization {
    Witness(HochschildCochain),
    /// The system in `layout` coordinates has no solution, with a certificate.
    Obstructed {
        certificate: Infeasibility,
        unknowns: usize,
        equations: usize,
    },
}

impl Trivialization {
    pub fn witness(&self) -> Option<&HochschildCochain> {
        match self {
            Trivialization::Witness(a) => Some(a),
            Trivialization::Obstructed { .. } => None,
        }
    }

    pub fn into_witness(self) -> Option<HochschildCochain> {
        match self {
            Trivialization::Witness(a) => Some(a),
            Trivialization::Obstructed { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.witness().is_some()
    }
}

/// Matrix of `δ` from arity-`l` cochains to arity-`l+1` cochains in the
/// given layouts.
pub fn coboundary_matrix(m: &TwistedBimodule, source: &Layout, target: &Layout) -> ExactMatrix {
    let h = m.base();
    let ring = h.ring();
    let cols: Vec<Vec<Scalar>> = (0..source.len())
        .map(|k| {
            let e = source.cochain(h, &vector::unit(ring, source.len(), k));
            target.flatten(&coboundary(&e, m))
        })
        .collect();
    ExactMatrix::from_columns(ring, target.len(), &cols)
}

/// Solves `δa = θ` exactly. Normalized coordinates are used when `θ`
/// vanishes on unit arguments, which keeps the system small.
pub fn trivialize(theta: &HochschildCochain, m: &TwistedBimodule) -> Result<Trivialization> {
    let h = m.base();
    if theta.arity == 0 {
        return Err(Error::ShapeMismatch(
            "an arity-0 cochain is never a coboundary target".into(),
        ));
    }
    if !verify_cocycle(theta, m) {
        return Err(Error::NotACocycle {
            degree: theta.degree,
        });
    }
    let normalized = theta.is_normalized(h);
    let source = Layout::new(h, theta.arity - 1, theta.degree, normalized);
    let target = Layout::new(h, theta.arity, theta.degree, normalized);
    let matrix = coboundary_matrix(m, &source, &target);
    let rhs = target.flatten(theta);
    match LinearSolver::new(&matrix).solve_or_certify(&rhs)? {
        Ok(x) => {
            let a = source.cochain(h, &x);
            if coboundary(&a, m) != *theta {
                return Err(Error::Inconsistent("solver witness fails δa = θ".into()));
            }
            Ok(Trivialization::Witness(a))
        }
        Err(certificate) => {
            if !certificate.certifies(&matrix, &rhs) {
                return Err(Error::Inconsistent(
                    "infeasibility certificate does not check".into(),
                ));
            }
            Ok(Trivialization::Obstructed {
                certificate,
                unknowns: source.len(),
                equations: target.len(),
            })
        }
    }
}

/// Whether `θ_1` and `θ_2` are cohomologous, via `δa = θ_1 - θ_2`.
pub fn classes_equal(
    theta1: &HochschildCochain,
    theta2: &HochschildCochain,
    m: &TwistedBimodule,
) -> Result<Trivialization> {
    trivialize(&theta1.sub(m.base(), theta2)?, m)
}
