use num_traits::Zero;

use super::hermite::column_hermite_form;
use super::matrix::{vector, ExactMatrix};
use super::ring::{Ring, Scalar};
use super::smith::{reduce, Track};
use crate::error::{Error, Result};

/// Why `m * x = b` has no solution over the ring: a row functional `w` with
/// `w * m ≡ 0` and `w * b ≢ 0` modulo `modulus` (a zero modulus meaning
/// exact equality).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub functional: Vec<Scalar>,
    pub modulus: Scalar,
}

impl Infeasibility {
    /// Re-checks the certificate against the system it claims to refute.
    pub fn certifies(&self, m: &ExactMatrix, b: &[Scalar]) -> bool {
        let ring = m.ring();
        if self.functional.len() != m.rows() || b.len() != m.rows() {
            return false;
        }
        let kills_columns = (0..m.cols()).all(|j| {
            let mut acc = Scalar::zero();
            for i in 0..m.rows() {
                ring.add_mul_assign(&mut acc, &self.functional[i], m.get(i, j));
            }
            ring.reduce_mod(&acc, &self.modulus).is_zero()
        });
        let rhs = vector::dot(ring, &self.functional, b);
        kills_columns && !ring.reduce_mod(&rhs, &self.modulus).is_zero()
    }
}

/// A matrix factored once so many right-hand sides can be solved against it.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    rows: usize,
    cols: usize,
    ring: Ring,
    u: ExactMatrix,
    v: ExactMatrix,
    diagonal: Vec<Scalar>,
}

impl LinearSolver {
    pub fn new(m: &ExactMatrix) -> Self {
        let r = reduce(
            m,
            Track {
                u: true,
                v: true,
                ..Track::default()
            },
        );
        let diagonal = (0..r.rank).map(|i| r.d.get(i, i).clone()).collect();
        LinearSolver {
            rows: m.rows(),
            cols: m.cols(),
            ring: m.ring(),
            u: r.u.unwrap(),
            v: r.v.unwrap(),
            diagonal,
        }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Deterministic solution, or a certificate that none exists.
    pub fn solve_or_certify(
        &self,
        b: &[Scalar],
    ) -> Result<std::result::Result<Vec<Scalar>, Infeasibility>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a system with {} rows",
                b.len(),
                self.rows
            )));
        }
        let ring = self.ring;
        let y = self.u.mul_vec(b)?;
        let mut x = vector::zeros(self.cols);
        for (i, yi) in y.iter().enumerate() {
            if i < self.diagonal.len() {
                match ring.exact_div(yi, &self.diagonal[i]) {
                    Some(q) => x[i] = q,
                    None => {
                        return Ok(Err(Infeasibility {
                            functional: self.u.row(i).to_vec(),
                            modulus: self.diagonal[i].clone(),
                        }))
                    }
                }
            } else if !yi.is_zero() {
                return Ok(Err(Infeasibility {
                    functional: self.u.row(i).to_vec(),
                    modulus: Scalar::zero(),
                }));
            }
        }
        Ok(Ok(self.v.mul_vec(&x)?))
    }

    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        Ok(self.solve_or_certify(b)?.ok())
    }
}

/// Some `x` with `m * x = b`, if one exists over the ring.
pub fn solve(m: &ExactMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    LinearSolver::new(m).solve(b)
}

/// Columns form a basis of the kernel (a Z-basis over the integers).
pub fn kernel_basis(m: &ExactMatrix) -> ExactMatrix {
    let r = reduce(
        m,
        Track {
            v: true,
            ..Track::default()
        },
    );
    r.v.unwrap().select_columns(r.rank..m.cols())
}

/// Columns form a basis of the column span, in column Hermite form.
pub fn image_basis(m: &ExactMatrix) -> ExactMatrix {
    column_hermite_form(m).basis
}
