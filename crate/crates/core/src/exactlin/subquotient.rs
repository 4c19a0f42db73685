use num_traits::Zero;

use super::matrix::{vector, ExactMatrix};
use super::ring::{Ring, Scalar};
use super::smith::{reduce, Track};
use super::solve::{image_basis, LinearSolver};
use crate::error::{Error, Result};

/// The module `span(generators) / span(relations)` inside a free ambient
/// module, with elements written in ambient coordinates.
///
/// `adapted` is a basis of the generator span in which the relations become
/// diagonal: `span(relations) = span(f_i * adapted_i)` where `f_i` are the
/// invariant factors.
#[derive(Clone, Debug)]
pub struct Subquotient {
    ring: Ring,
    ambient_rank: usize,
    generators: ExactMatrix,
    relations: ExactMatrix,
    invariant_factors: Vec<Scalar>,
    adapted: ExactMatrix,
    to_adapted: ExactMatrix,
    generator_solver: LinearSolver,
}

impl Subquotient {
    /// `generators` need not be independent; they are replaced by a basis of
    /// their span. Fails if some relation lies outside that span.
    pub fn new(generators: &ExactMatrix, relations: &ExactMatrix) -> Result<Self> {
        let ring = generators.ring();
        let ambient_rank = generators.rows();
        if relations.rows() != ambient_rank {
            return Err(Error::DimensionMismatch(format!(
                "relations live in rank {}, generators in rank {ambient_rank}",
                relations.rows()
            )));
        }
        let basis = image_basis(generators);
        let g = basis.cols();
        let generator_solver = LinearSolver::new(&basis);
        let mut coords = ExactMatrix::zeros(ring, g, relations.cols());
        for j in 0..relations.cols() {
            let col = relations.column(j);
            let x = generator_solver
                .solve(&col)?
                .ok_or(Error::RelationsNotContained { column: j })?;
            for (i, xi) in x.into_iter().enumerate() {
                coords.set(i, j, xi);
            }
        }
        let r = reduce(
            &coords,
            Track {
                u: true,
                u_inv: true,
                ..Track::default()
            },
        );
        let invariant_factors = (0..g)
            .map(|i| {
                if i < r.rank {
                    r.d.get(i, i).clone()
                } else {
                    Scalar::zero()
                }
            })
            .collect();
        let adapted = basis.mul(r.u_inv.as_ref().unwrap())?;
        Ok(Subquotient {
            ring,
            ambient_rank,
            generators: basis,
            relations: relations.clone(),
            invariant_factors,
            adapted,
            to_adapted: r.u.unwrap(),
            generator_solver,
        })
    }

    /// The submodule spanned by `generators`, with no relations.
    pub fn submodule(generators: &ExactMatrix) -> Result<Self> {
        let rel = ExactMatrix::zeros(generators.ring(), generators.rows(), 0);
        Self::new(generators, &rel)
    }

    /// `ring^n / span(relations)`.
    pub fn quotient_of_free(relations: &ExactMatrix) -> Result<Self> {
        Self::new(
            &ExactMatrix::identity(relations.ring(), relations.rows()),
            relations,
        )
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &ExactMatrix {
        &self.generators
    }

    pub fn relations(&self) -> &ExactMatrix {
        &self.relations
    }

    /// Smith diagonal of the presentation, one entry per generator; zero
    /// marks a free summand and a unit a summand that vanishes.
    pub fn invariant_factors(&self) -> &[Scalar] {
        &self.invariant_factors
    }

    fn nontrivial_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.invariant_factors.len())
            .filter(|&i| !self.ring.is_unit(&self.invariant_factors[i]))
    }

    /// Non-unit invariant factors: the cyclic summands of the module.
    pub fn summands(&self) -> Vec<Scalar> {
        self.nontrivial_indices()
            .map(|i| self.invariant_factors[i].clone())
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors
            .iter()
            .filter(|f| f.is_zero())
            .count()
    }

    /// Nonzero non-unit factors.
    pub fn torsion(&self) -> Vec<Scalar> {
        self.summands()
            .into_iter()
            .filter(|f| !f.is_zero())
            .collect()
    }

    pub fn is_zero_module(&self) -> bool {
        self.nontrivial_indices().next().is_none()
    }

    pub fn is_free(&self) -> bool {
        self.torsion().is_empty()
    }

    /// Whether `v` lies in the generator span.
    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        Ok(self.generator_solver.solve(v)?.is_some())
    }

    /// Coordinates of `v` along the generator basis.
    pub fn generator_coordinates(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        self.generator_solver.solve(v)?.ok_or(Error::NotInSubmodule)
    }

    /// Coordinates of the class of `v`, one per cyclic summand, torsion
    /// coordinates reduced into canonical residues.
    pub fn class_coordinates(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let a = self.generator_coordinates(v)?;
        let y = self.to_adapted.mul_vec(&a)?;
        Ok(self
            .nontrivial_indices()
            .map(|i| self.ring.reduce_mod(&y[i], &self.invariant_factors[i]))
            .collect())
    }

    pub fn is_zero_class(&self, v: &[Scalar]) -> Result<bool> {
        Ok(vector::is_zero(&self.class_coordinates(v)?))
    }

    /// Ambient representative of a class given by its summand coordinates.
    pub fn representative(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let mut out = vector::zeros(self.ambient_rank);
        for (c, i) in coords.iter().zip(self.nontrivial_indices()) {
            vector::axpy(self.ring, &mut out, c, &self.adapted.column(i));
        }
        out
    }

    /// Ambient representatives of the summand generators.
    pub fn summand_generators(&self) -> ExactMatrix {
        let cols: Vec<_> = self
            .nontrivial_indices()
            .map(|i| self.adapted.column(i))
            .collect();
        ExactMatrix::from_columns(self.ring, self.ambient_rank, &cols)
    }

    /// Representatives of a basis of the quotient when it is projective;
    /// their span is a complement of the relations inside the generators.
    pub fn free_generators(&self) -> Result<ExactMatrix> {
        if let Some(f) = self.torsion().first() {
            return Err(Error::TargetNotProjective {
                factor: f.to_string(),
            });
        }
        Ok(self.summand_generators())
    }
}

/// `quotient_presentation(gens, rels)`: the subquotient together with its
/// invariant factors.
pub fn quotient_presentation(
    generators: &ExactMatrix,
    relations: &ExactMatrix,
) -> Result<Subquotient> {
    Subquotient::new(generators, relations)
}

/// A right inverse `s` of `f` on the target: `f * s` equals the target's
/// free generators column by column.
pub fn section_of_surjection(f: &ExactMatrix, target: &Subquotient) -> Result<ExactMatrix> {
    if f.rows() != target.ambient_rank() {
        return Err(Error::DimensionMismatch(format!(
            "map lands in rank {}, target lives in rank {}",
            f.rows(),
            target.ambient_rank()
        )));
    }
    let reps = target.free_generators()?;
    let solver = LinearSolver::new(f);
    let mut cols = Vec::with_capacity(reps.cols());
    for j in 0..reps.cols() {
        let x = solver
            .solve(&reps.column(j))?
            .ok_or(Error::NotSurjective { column: j })?;
        cols.push(x);
    }
    Ok(ExactMatrix::from_columns(f.ring(), f.cols(), &cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_quotient() {
        let z = Ring::Integers;
        for k in [2, 5, 12] {
            let rel = ExactMatrix::from_i64_rows(z, &[vec![k]]);
            let sq = quotient_presentation(&ExactMatrix::identity(z, 1), &rel).unwrap();
            assert_eq!(sq.invariant_factors(), &[z.from_i64(k)]);
            assert_eq!(sq.torsion(), vec![z.from_i64(k)]);
            assert!(sq.is_zero_class(&[z.from_i64(k)]).unwrap());
            assert!(!sq.is_zero_class(&[z.from_i64(1)]).unwrap());
        }
    }

    #[test]
    fn relations_must_lie_in_span() {
        let z = Ring::Integers;
        let gens = ExactMatrix::from_i64_rows(z, &[vec![2], vec![0]]);
        let rels = ExactMatrix::from_i64_rows(z, &[vec![1], vec![0]]);
        assert!(matches!(
            Subquotient::new(&gens, &rels),
            Err(Error::RelationsNotContained { .. })
        ));
    }

    #[test]
    fn class_coordinates_respect_relations() {
        let z = Ring::Integers;
        // Z^2 / <(2, 2)>  ~  Z ⊕ Z/2
        let rels = ExactMatrix::from_i64_rows(z, &[vec![2], vec![2]]);
        let sq = Subquotient::quotient_of_free(&rels).unwrap();
        assert_eq!(sq.summands().len(), 2);
        assert_eq!(sq.torsion(), vec![z.from_i64(2)]);
        let a = sq.class_coordinates(&vector::from_i64(z, &[1, 1])).unwrap();
        let b = sq.class_coordinates(&vector::from_i64(z, &[3, 3])).unwrap();
        assert_eq!(a, b);
        let rep = sq.representative(&a);
        assert_eq!(sq.class_coordinates(&rep).unwrap(), a);
    }

    #[test]
    fn sections_of_simple_surjections() {
        let z = Ring::Integers;
        let id = ExactMatrix::identity(z, 2);
        let target = Subquotient::submodule(&id).unwrap();
        assert!(section_of_surjection(&id, &target).unwrap().is_identity());

        let f = ExactMatrix::from_i64_rows(z, &[vec![1, 0]]);
        let target = Subquotient::submodule(&ExactMatrix::identity(z, 1)).unwrap();
        let s = section_of_surjection(&f, &target).unwrap();
        assert!(f.mul(&s).unwrap().is_identity());

        let two = ExactMatrix::from_i64_rows(z, &[vec![2]]);
        assert!(matches!(
            section_of_surjection(&two, &target),
            Err(Error::NotSurjective { .. })
        ));
        let torsion = Subquotient::quotient_of_free(&two).unwrap();
        assert!(matches!(
            section_of_surjection(&ExactMatrix::identity(z, 1), &torsion),
            Err(Error::TargetNotProjective { .. })
        ));
    }
}
