//! Column Hermite normal form: a canonical basis of a column span.

use num_traits::Zero;

use super::matrix::ExactMatrix;
use super::ring::Scalar;

/// Column echelon basis of the span of a matrix's columns. Column `k` has
/// its leading (topmost nonzero) entry in row `pivot_rows[k]`, which is
/// strictly increasing; entries to the left of a pivot are reduced modulo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub basis: ExactMatrix,
    pub pivot_rows: Vec<usize>,
}

pub fn column_hermite_form(m: &ExactMatrix) -> HermiteForm {
    let ring = m.ring();
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut pivot_rows = Vec::new();
    let mut k = 0;
    for r in 0..rows {
        if k == cols {
            break;
        }
        loop {
            // smallest nonzero in row r among the unprocessed columns
            let mut best: Option<usize> = None;
            for j in k..cols {
                let x = a.get(r, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|b| ring.pivot_less(x, a.get(r, b))) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            a.swap_cols(k, b);
            let pivot = a.get(r, k).clone();
            let mut dirty = false;
            for j in k + 1..cols {
                let x = a.get(r, j);
                if x.is_zero() {
                    continue;
                }
                let (q, rem) = ring.div_rem(x, &pivot);
                a.add_col_multiple(j, k, &ring.neg(&q));
                dirty |= !rem.is_zero();
            }
            if !dirty {
                break;
            }
        }
        if k < cols && !a.get(r, k).is_zero() {
            let unit = ring.normalizing_unit(a.get(r, k));
            a.scale_col(k, &unit);
            let pivot = a.get(r, k).clone();
            for j in 0..k {
                let x = a.get(r, j);
                if x.is_zero() {
                    continue;
                }
                let q = ring.div_floor(x, &pivot);
                a.add_col_multiple(j, k, &ring.neg(&q));
            }
            pivot_rows.push(r);
            k += 1;
        }
    }
    HermiteForm {
        basis: a.select_columns(0..k),
        pivot_rows,
    }
}

impl HermiteForm {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    /// Whether `b` lies in the span, decided by echelon back-substitution.
    /// This route shares no code with the Smith-form solver.
    pub fn contains(&self, b: &[Scalar]) -> bool {
        let ring = self.basis.ring();
        let mut rest = b.to_vec();
        let mut next_pivot = 0;
        for r in 0..rest.len() {
            if next_pivot < self.pivot_rows.len() && self.pivot_rows[next_pivot] == r {
                let k = next_pivot;
                let x = &rest[r];
                if !x.is_zero() {
                    let Some(q) = ring.exact_div(x, self.basis.get(r, k)) else {
                        return false;
                    };
                    let nq = ring.neg(&q);
                    for (i, t) in rest.iter_mut().enumerate() {
                        let c = self.basis.get(i, k);
                        if !c.is_zero() {
                            *t = ring.add(t, &ring.mul(&nq, c));
                        }
                    }
                }
                next_pivot += 1;
            } else if !rest[r].is_zero() {
                return false;
            }
        }
        true
    }
}
