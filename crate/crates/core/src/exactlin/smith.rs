//! Smith normal form by elementary row and column operations.
//!
//! Pivot rule: the nonzero entry of smallest size in the active block,
//! ties broken by the lowest `(row, col)` in row-major order. With this rule
//! the transforms are a deterministic function of the input.

use num_traits::Zero;

use super::matrix::ExactMatrix;
use super::ring::{Ring, Scalar};

/// `u * m * v == d` with `u`, `v` invertible and `d` diagonal, each nonzero
/// diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: ExactMatrix,
    pub u_inv: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
    pub v_inv: ExactMatrix,
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Which transforms to accumulate. Skipping the ones a caller does not need
/// saves most of the work on large inputs.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

impl Track {
    pub const ALL: Track = Track {
        u: true,
        u_inv: true,
        v: true,
        v_inv: true,
    };
}

pub(crate) struct Reduction {
    pub d: ExactMatrix,
    pub u: Option<ExactMatrix>,
    pub u_inv: Option<ExactMatrix>,
    pub v: Option<ExactMatrix>,
    pub v_inv: Option<ExactMatrix>,
    pub rank: usize,
}

struct Reducer {
    ring: Ring,
    a: ExactMatrix,
    u: Option<ExactMatrix>,
    u_inv: Option<ExactMatrix>,
    v: Option<ExactMatrix>,
    v_inv: Option<ExactMatrix>,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.u {
            u.swap_rows(i, j);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.v {
            v.swap_cols(i, j);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap_rows(i, j);
        }
    }

    /// `row i += f * row j`
    fn add_row(&mut self, i: usize, j: usize, f: &Scalar) {
        if f.is_zero() {
            return;
        }
        self.a.add_row_multiple(i, j, f);
        if let Some(u) = &mut self.u {
            u.add_row_multiple(i, j, f);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.add_col_multiple(j, i, &self.ring.neg(f));
        }
    }

    /// `col i += f * col j`
    fn add_col(&mut self, i: usize, j: usize, f: &Scalar) {
        if f.is_zero() {
            return;
        }
        self.a.add_col_multiple(i, j, f);
        if let Some(v) = &mut self.v {
            v.add_col_multiple(i, j, f);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.add_row_multiple(j, i, &self.ring.neg(f));
        }
    }

    fn scale_row(&mut self, i: usize, unit: &Scalar) {
        let inv = self.ring.inv(unit).expect("scaling by a non-unit");
        self.a.scale_row(i, unit);
        if let Some(u) = &mut self.u {
            u.scale_row(i, unit);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.scale_col(i, &inv);
        }
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let (m, n) = self.a.shape();
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => self.ring.pivot_less(x, self.a.get(bi, bj)),
                };
                if better {
                    best = Some((i, j));
                    if self.ring.is_minimal_pivot(x) {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// Smallest nonzero entry in row `t` or column `t` of the active block.
    fn find_cross_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let (m, n) = self.a.shape();
        let mut best: Option<(usize, usize)> = None;
        let consider = |i: usize, j: usize, best: &mut Option<(usize, usize)>| {
            let x = self.a.get(i, j);
            if x.is_zero() {
                return;
            }
            let better = match *best {
                None => true,
                Some((bi, bj)) => {
                    let y = self.a.get(bi, bj);
                    self.ring.pivot_less(x, y) || (!self.ring.pivot_less(y, x) && (i, j) < (bi, bj))
                }
            };
            if better {
                *best = Some((i, j));
            }
        };
        for j in t..n {
            consider(t, j, &mut best);
        }
        for i in t + 1..m {
            consider(i, t, &mut best);
        }
        best
    }

    fn run(mut self) -> Reduction {
        let ring = self.ring;
        let (m, n) = self.a.shape();
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                let pivot = self.a.get(t, t).clone();
                for i in t + 1..m {
                    let x = self.a.get(i, t);
                    if x.is_zero() {
                        continue;
                    }
                    let (q, r) = ring.div_rem(x, &pivot);
                    let nq = ring.neg(&q);
                    self.add_row(i, t, &nq);
                    dirty |= !r.is_zero();
                }
                for j in t + 1..n {
                    let x = self.a.get(t, j);
                    if x.is_zero() {
                        continue;
                    }
                    let (q, r) = ring.div_rem(x, &pivot);
                    let nq = ring.neg(&q);
                    self.add_col(j, t, &nq);
                    dirty |= !r.is_zero();
                }
                if dirty {
                    let (pi, pj) = self.find_cross_pivot(t).expect("pivot vanished");
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                if ring.is_field() {
                    break;
                }
                // Divisibility chain: fold an offending row into the pivot row.
                let offending = (t + 1..m)
                    .find(|&i| (t + 1..n).any(|j| !ring.divides(&pivot, self.a.get(i, j))));
                match offending {
                    Some(i) => self.add_row(t, i, &ring.one()),
                    None => break,
                }
            }
            let unit = ring.normalizing_unit(self.a.get(t, t));
            if unit != ring.one() {
                self.scale_row(t, &unit);
            }
            t += 1;
        }
        Reduction {
            d: self.a,
            u: self.u,
            u_inv: self.u_inv,
            v: self.v,
            v_inv: self.v_inv,
            rank: t,
        }
    }
}

pub(crate) fn reduce(m: &ExactMatrix, track: Track) -> Reduction {
    let ring = m.ring();
    let (rows, cols) = m.shape();
    let id = |n: usize, on: bool| on.then(|| ExactMatrix::identity(ring, n));
    Reducer {
        ring,
        a: m.clone(),
        u: id(rows, track.u),
        u_inv: id(rows, track.u_inv),
        v: id(cols, track.v),
        v_inv: id(cols, track.v_inv),
    }
    .run()
}

pub fn smith_normal_form(m: &ExactMatrix) -> SmithForm {
    let r = reduce(m, Track::ALL);
    SmithForm {
        u: r.u.unwrap(),
        u_inv: r.u_inv.unwrap(),
        d: r.d,
        v: r.v.unwrap(),
        v_inv: r.v_inv.unwrap(),
        rank: r.rank,
    }
}

/// Invariant factors only (the diagonal of the normal form, `min(rows, cols)` long).
pub fn invariant_factors(m: &ExactMatrix) -> Vec<Scalar> {
    let r = reduce(m, Track::default());
    (0..m.rows().min(m.cols()))
        .map(|i| r.d.get(i, i).clone())
        .collect()
}

pub fn rank(m: &ExactMatrix) -> usize {
    reduce(m, Track::default()).rank
}

/// Exact inverse: `None` unless the matrix is square and its determinant is a unit.
pub fn inverse(m: &ExactMatrix) -> Option<ExactMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let r = reduce(
        m,
        Track {
            u: true,
            v: true,
            ..Track::default()
        },
    );
    let ring = m.ring();
    if r.rank != m.rows() || !(0..m.rows()).all(|i| ring.is_unit(r.d.get(i, i))) {
        return None;
    }
    // d is the identity after normalization: m^{-1} = v * u.
    r.v.unwrap().mul(&r.u.unwrap()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &ExactMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.u.mul(&s.u_inv).unwrap().is_identity());
        assert!(s.v.mul(&s.v_inv).unwrap().is_identity());
        let ring = m.ring();
        let diag = s.diagonal();
        for (i, x) in diag.iter().enumerate() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
            if i + 1 < diag.len() && !diag[i + 1].is_zero() {
                assert!(ring.divides(x, &diag[i + 1]));
            }
        }
        s
    }

    #[test]
    fn identity_is_fixed() {
        let i = ExactMatrix::identity(Ring::Integers, 2);
        let s = check(&i);
        assert!(s.u.is_identity() && s.v.is_identity() && s.d.is_identity());
    }

    #[test]
    fn two_by_two_integer_example() {
        let z = Ring::Integers;
        let m = ExactMatrix::from_i64_rows(z, &[vec![2, 4], vec![6, 8]]);
        let s = check(&m);
        assert_eq!(s.diagonal(), vec![z.from_i64(2), z.from_i64(4)]);
    }

    #[test]
    fn zero_matrix() {
        let m = ExactMatrix::zeros(Ring::Integers, 2, 3);
        let s = check(&m);
        assert!(s.d.is_zero());
        assert!(s.u.is_identity() && s.v.is_identity());
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn field_rank() {
        let q = Ring::Rationals;
        let m = ExactMatrix::from_i64_rows(q, &[vec![2, 4], vec![6, 8], vec![1, 1]]);
        let s = check(&m);
        assert_eq!(s.rank, 2);
        assert_eq!(s.diagonal(), vec![q.one(), q.one()]);
        let f2 = Ring::PrimeField(2);
        let m2 = ExactMatrix::from_i64_rows(f2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(check(&m2).rank, 1);
    }

    #[test]
    fn inverse_of_unimodular() {
        let z = Ring::Integers;
        let m = ExactMatrix::from_i64_rows(z, &[vec![2, 1], vec![1, 1]]);
        let inv = inverse(&m).unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        let singular = ExactMatrix::from_i64_rows(z, &[vec![2, 0], vec![0, 1]]);
        assert!(inverse(&singular).is_none());
        assert!(inverse(&singular.change_ring(Ring::Rationals).unwrap()).is_some());
    }

    #[test]
    fn divisibility_chain_needs_row_mixing() {
        let z = Ring::Integers;
        let m = ExactMatrix::from_i64_rows(z, &[vec![2, 0], vec![0, 3]]);
        let s = check(&m);
        assert_eq!(s.diagonal(), vec![z.from_i64(1), z.from_i64(6)]);
    }
}
