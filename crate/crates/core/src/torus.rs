//! Exterior algebras as the cohomology of tori, the symmetrization map
//! `S³V → Λ²V` on Hochschild 3-cochains, and the triviality of `[θ]` for
//! the simplicial torus.

use std::collections::BTreeMap;

use num_traits::Zero;
use std::sync::Arc;

use crate::dga::{cochain_algebra, DgAlgebra, ProductEntry};
use crate::error::{Error, Result};
use crate::exactlin::{
    invariant_factors, inverse, kernel_basis, rank, vector, ExactMatrix, LinearSolver, Ring,
    Scalar, Subquotient,
};
use crate::gysin::GroupShape;
use crate::hochschild::{
    coboundary_matrix, theta, trivialize, HochschildCochain, Layout, Trivialization,
    TwistedBimodule,
};
use crate::sections::{CohomologyRing, CohomologySections};
use crate::simplicial::build_torus;

/// Subsets of `0..n` of size `k` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Λ*V` with `rank V = n`, zero differential and basis the sorted subsets.
pub fn exterior_algebra(n: usize, ring: Ring) -> Result<DgAlgebra> {
    if n == 0 {
        return Err(Error::Format(
            "exterior algebra needs rank at least 1".into(),
        ));
    }
    let basis: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
    let index: Vec<BTreeMap<&[usize], usize>> = basis
        .iter()
        .map(|b| {
            b.iter()
                .enumerate()
                .map(|(i, s)| (s.as_slice(), i))
                .collect()
        })
        .collect();
    let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
    let diff = (0..n)
        .map(|k| ExactMatrix::zeros(ring, ranks[k + 1], ranks[k]))
        .collect();
    let mut product = BTreeMap::new();
    for p in 0..=n {
        for q in 0..=n - p {
            let mut entries = Vec::new();
            for (i, s) in basis[p].iter().enumerate() {
                for (j, t) in basis[q].iter().enumerate() {
                    if s.iter().any(|x| t.contains(x)) {
                        continue;
                    }
                    let inversions = s
                        .iter()
                        .map(|&a| t.iter().filter(|&&b| a > b).count())
                        .sum::<usize>();
                    let mut u: Vec<usize> = s.iter().chain(t).copied().collect();
                    u.sort_unstable();
                    entries.push(ProductEntry {
                        i,
                        j,
                        k: index[p + q][u.as_slice()],
                        c: ring.from_i64(if inversions % 2 == 0 { 1 } else { -1 }),
                    });
                }
            }
            product.insert((p, q), entries);
        }
    }
    DgAlgebra::validated(ring, ranks, diff, product, vector::unit(ring, 1, 0))
}

/// Monomials `i ≤ j ≤ k` of `S³V` in lexicographic order.
pub fn cubic_monomials(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

const PERMUTATIONS: [([usize; 3], i64); 6] = [
    ([0, 1, 2], 1),
    ([0, 2, 1], -1),
    ([1, 0, 2], -1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([2, 1, 0], -1),
];

/// Restriction of `θ` to `V ⊗ V ⊗ V = H^1 ⊗ H^1 ⊗ H^1`, summed over the six
/// orderings of each monomial (with the permutation sign when `signed`):
/// a `C(n,2) × #monomials` matrix.
pub fn symmetrize(
    theta: &HochschildCochain,
    h: &CohomologyRing,
    signed: bool,
) -> Result<ExactMatrix> {
    if theta.arity() != 3 || theta.degree() != -1 {
        return Err(Error::ShapeMismatch(
            "symmetrization needs an arity-3 cochain of degree -1".into(),
        ));
    }
    let ring = h.ring();
    let n = h.rank(1);
    let rows = h.rank(2);
    let monomials = cubic_monomials(n);
    let mut out = ExactMatrix::zeros(ring, rows, monomials.len());
    let Some(block) = theta.block(&[1, 1, 1]) else {
        return Ok(out);
    };
    for (col, mono) in monomials.iter().enumerate() {
        let mut acc = vector::zeros(rows);
        for (perm, sgn) in PERMUTATIONS {
            let idx = [mono[perm[0]], mono[perm[1]], mono[perm[2]]];
            let c = ring.from_i64(if signed { sgn } else { 1 });
            vector::axpy(
                ring,
                &mut acc,
                &c,
                &block.column((idx[0] * n + idx[1]) * n + idx[2]),
            );
        }
        for (r, v) in acc.into_iter().enumerate() {
            out.set(r, col, v);
        }
    }
    Ok(out)
}

/// The outcome of the brute-force probe of `HH³_gr(Λ*V, Λ̄*V[1])` in
/// internal degree `-1` (normalized cochains).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomorphismReport {
    pub n: usize,
    pub signed: bool,
    pub cochains: usize,
    pub cocycle_rank: usize,
    pub coboundary_rank: usize,
    pub hh3: GroupShape,
    /// Whether the symmetrization vanishes on coboundaries, so that it
    /// descends to `HH³`.
    pub kills_coboundaries: bool,
    /// Rank of the cocycles whose symmetrization is zero.
    pub kernel_rank: usize,
    /// Every cocycle with zero symmetrization is a coboundary.
    pub monomorphism: bool,
    /// Rank of the image of the cocycles in `Hom(S³V, Λ²V)`.
    pub image_rank: usize,
    /// Non-unit invariant factors of that image; empty with full rank means
    /// the symmetrization is onto.
    pub cokernel_torsion: Vec<Scalar>,
}

pub fn verify_monomorphism(n: usize, ring: Ring, signed: bool) -> Result<MonomorphismReport> {
    let lambda = exterior_algebra(n, ring)?;
    let h = CohomologyRing::from_formal(&lambda)?;
    let m = TwistedBimodule::new(&h);
    let l2 = Layout::new(&h, 2, -1, true);
    let l3 = Layout::new(&h, 3, -1, true);
    let l4 = Layout::new(&h, 4, -1, true);
    let d2 = coboundary_matrix(&m, &l2, &l3);
    let d3 = coboundary_matrix(&m, &l3, &l4);
    let sym_cols: Vec<Vec<Scalar>> = (0..l3.len())
        .map(|k| {
            let e = l3.cochain(&h, &vector::unit(ring, l3.len(), k));
            let s = symmetrize(&e, &h, signed)?;
            Ok(s.columns().concat())
        })
        .collect::<Result<_>>()?;
    let sym_rows = h.rank(2) * cubic_monomials(n).len();
    let sym = ExactMatrix::from_columns(ring, sym_rows, &sym_cols);
    let cycles = kernel_basis(&d3);
    let hh3 = Subquotient::new(&cycles, &d2)?;
    let kills_coboundaries = sym.mul(&d2)?.is_zero();
    let joint = kernel_basis(&ExactMatrix::vstack(&[&d3, &sym])?);
    let solver = LinearSolver::new(&d2);
    let mut monomorphism = true;
    for col in joint.columns() {
        monomorphism &= solver.solve(&col)?.is_some();
    }
    let image = sym.mul(&cycles)?;
    let factors: Vec<Scalar> = invariant_factors(&image)
        .into_iter()
        .filter(|f| !f.is_zero())
        .collect();
    let cokernel_torsion = factors
        .iter()
        .filter(|f| !ring.is_unit(f))
        .cloned()
        .collect();
    Ok(MonomorphismReport {
        n,
        signed,
        cochains: l3.len(),
        cocycle_rank: cycles.cols(),
        coboundary_rank: rank(&d2),
        hh3: GroupShape::of(&hh3),
        kills_coboundaries,
        kernel_rank: joint.cols(),
        monomorphism,
        image_rank: factors.len(),
        cokernel_torsion,
    })
}

/// The ring isomorphism `φ: Λ*V → H` sending `e_i` to the `i`-th basis
/// class of `H^1`, used to move cochains on `H` to cochains on `Λ*V`.
#[derive(Clone, Debug)]
pub struct Transport {
    pub exterior: CohomologyRing,
    /// `phi[k]` has the classes `φ(e_S)` as columns.
    pub phi: Vec<ExactMatrix>,
    phi_inv: Vec<ExactMatrix>,
}

impl Transport {
    pub fn new(h: &CohomologyRing) -> Result<Self> {
        let ring = h.ring();
        let n = h.rank(1);
        let top = h.top_degree();
        if top != n || (0..=n).any(|k| h.rank(k as isize) != subsets(n, k).len()) {
            return Err(Error::ShapeMismatch(format!(
                "ranks {:?} are not binomial",
                h.ranks()
            )));
        }
        let exterior = CohomologyRing::from_formal(&exterior_algebra(n, ring)?)?;
        let mut phi = Vec::new();
        for k in 0..=n {
            let cols: Vec<Vec<Scalar>> = subsets(n, k)
                .iter()
                .map(|s| {
                    let mut v = h.unit();
                    for (deg, &i) in s.iter().enumerate() {
                        v = h.multiply(deg, &v, 1, &vector::unit(ring, n, i));
                    }
                    v
                })
                .collect();
            phi.push(ExactMatrix::from_columns(ring, h.rank(k as isize), &cols));
        }
        let phi_inv = phi
            .iter()
            .enumerate()
            .map(|(k, m)| {
                inverse(m).ok_or_else(|| {
                    Error::Inconsistent(format!("φ is not invertible in degree {k}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let t = Transport {
            exterior,
            phi,
            phi_inv,
        };
        for p in 0..=n {
            for q in 0..=n - p {
                let lhs = t.phi[p + q].mul(&t.exterior.product_matrix(p, q))?;
                let rhs = h.product_matrix(p, q).mul(&t.phi[p].kron(&t.phi[q]))?;
                if lhs != rhs {
                    return Err(Error::Inconsistent(format!(
                        "φ is not multiplicative on degrees {p},{q}"
                    )));
                }
            }
        }
        Ok(t)
    }

    /// `φ^{-1} ∘ a ∘ (φ ⊗ … ⊗ φ)`.
    pub fn pull_back(&self, a: &HochschildCochain) -> Result<HochschildCochain> {
        let mut out = HochschildCochain::zero(a.ring(), a.arity(), a.degree());
        for (tuple, block) in a.blocks() {
            let target = (tuple.iter().sum::<usize>() as isize + a.degree()) as usize;
            let mut src = ExactMatrix::identity(a.ring(), 1);
            for &p in tuple {
                src = src.kron(&self.phi[p]);
            }
            let m = self.phi_inv[target].mul(block)?.mul(&src)?;
            out.set_block(&self.exterior, tuple.clone(), m)?;
        }
        Ok(out)
    }
}

/// `θ` for the simplicial `n`-torus and the attempt to trivialize it.
#[derive(Clone, Debug)]
pub struct TorusTheta {
    pub n: usize,
    pub ring: Ring,
    pub h_ranks: Vec<usize>,
    pub theta: HochschildCochain,
    pub result: Trivialization,
    /// `θ` moved to `Λ*V` and symmetrized.
    pub symmetrized: ExactMatrix,
}

impl TorusTheta {
    pub fn witness(&self) -> Option<&HochschildCochain> {
        self.result.witness()
    }
}

pub fn torus_theta_trivial(n: usize, ring: Ring, seed: Option<u64>) -> Result<TorusTheta> {
    let a = Arc::new(cochain_algebra(&build_torus(n)?, ring));
    let co = CohomologySections::build(a, seed)?;
    let th = theta(&co)?;
    let h = co.cohomology_ring();
    let result = trivialize(&th, &TwistedBimodule::new(h))?;
    let transport = Transport::new(h)?;
    let symmetrized = symmetrize(&transport.pull_back(&th)?, &transport.exterior, false)?;
    Ok(TorusTheta {
        n,
        ring,
        h_ranks: h.ranks().to_vec(),
        theta: th,
        result,
        symmetrized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hochschild::coboundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_exterior_algebras() {
        let z = Ring::Integers;
        let l1 = exterior_algebra(1, z).unwrap();
        assert_eq!(l1.ranks(), &[1, 1]);
        let e = vector::unit(z, 1, 0);
        assert!(l1.multiply(1, &e, 1, &e).is_empty());
        let l2 = exterior_algebra(2, z).unwrap();
        assert_eq!(l2.ranks(), &[1, 2, 1]);
        let (e1, e2) = (vector::unit(z, 2, 0), vector::unit(z, 2, 1));
        let a = l2.multiply(1, &e1, 1, &e2);
        let b = l2.multiply(1, &e2, 1, &e1);
        assert_eq!(a, vector::from_i64(z, &[1]));
        assert_eq!(b, vector::from_i64(z, &[-1]));
        assert_eq!(exterior_algebra(4, z).unwrap().ranks(), &[1, 4, 6, 4, 1]);
    }

    #[test]
    fn exterior_algebra_is_formal() {
        let a = Arc::new(exterior_algebra(3, Ring::Integers).unwrap());
        let co = CohomologySections::build(a.clone(), None).unwrap();
        assert_eq!(
            co.cohomology_ring(),
            &CohomologyRing::from_formal(&a).unwrap()
        );
        assert!(theta(&co).unwrap().is_zero());
    }

    #[test]
    fn torus_cohomology_is_exterior() {
        for n in 1..=3 {
            let a = Arc::new(cochain_algebra(&build_torus(n).unwrap(), Ring::Integers));
            let co = CohomologySections::build(a, None).unwrap();
            Transport::new(co.cohomology_ring()).unwrap();
        }
    }

    #[test]
    fn symmetrization_kills_coboundaries() {
        let lambda = exterior_algebra(3, Ring::Integers).unwrap();
        let h = CohomologyRing::from_formal(&lambda).unwrap();
        let m = TwistedBimodule::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let a = HochschildCochain::random(&h, 2, -1, false, &mut rng, 4);
            let da = coboundary(&a, &m);
            assert!(symmetrize(&da, &h, false).unwrap().is_zero());
        }
        let zero = HochschildCochain::zero(Ring::Integers, 3, -1);
        assert!(symmetrize(&zero, &h, true).unwrap().is_zero());
    }

    #[test]
    fn symmetrization_is_permutation_invariant() {
        let lambda = exterior_algebra(2, Ring::Integers).unwrap();
        let h = CohomologyRing::from_formal(&lambda).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = HochschildCochain::random(&h, 3, -1, true, &mut rng, 5);
        let s = symmetrize(&a, &h, false).unwrap();
        // permuting the slots of the (1,1,1) block leaves the unsigned sum alone
        let block = a.block(&[1, 1, 1]).cloned().unwrap();
        let n = 2;
        let swapped = ExactMatrix::from_fn(Ring::Integers, block.rows(), block.cols(), |r, c| {
            let (i, j, k) = (c / (n * n), (c / n) % n, c % n);
            block.get(r, (j * n + i) * n + k).clone()
        });
        let mut b = a.clone();
        b.set_block(&h, vec![1, 1, 1], swapped).unwrap();
        assert_eq!(symmetrize(&b, &h, false).unwrap(), s);
    }

    #[test]
    fn torus2_theta_is_trivial() {
        let t = torus_theta_trivial(2, Ring::Integers, Some(3)).unwrap();
        assert!(t.witness().is_some());
        assert!(t.symmetrized.is_zero());
        let q = torus_theta_trivial(2, Ring::Rationals, None).unwrap();
        assert!(q.witness().is_some());
    }

    #[test]
    fn monomorphism_probe_frozen() {
        // (n, signed) -> (cochains, cocycles, coboundaries, HH³ rank, kills δ, kernel, mono)
        let frozen = [
            (1, false, (0, 0, 0, 0, true, 0, true)),
            (1, true, (0, 0, 0, 0, true, 0, true)),
            (2, false, (8, 8, 4, 4, true, 4, true)),
            (2, true, (8, 8, 4, 4, true, 8, false)),
            (3, false, (162, 96, 66, 30, true, 66, true)),
            (3, true, (162, 96, 66, 30, false, 93, false)),
        ];
        for (n, signed, want) in frozen {
            let r = verify_monomorphism(n, Ring::Integers, signed).unwrap();
            assert!(r.hh3.torsion.is_empty());
            let got = (
                r.cochains,
                r.cocycle_rank,
                r.coboundary_rank,
                r.hh3.free_rank,
                r.kills_coboundaries,
                r.kernel_rank,
                r.monomorphism,
            );
            assert_eq!(got, want, "n = {n}, signed = {signed}");
            // HH³ in this degree has the rank of Hom(S³V, Λ²V)
            assert_eq!(
                r.hh3.free_rank,
                subsets(n, 2).len() * cubic_monomials(n).len()
            );
        }
        // unsigned: x³ monomials pick up 6, x²y monomials pick up 2
        let count = |r: &MonomorphismReport, k: i64| {
            r.cokernel_torsion
                .iter()
                .filter(|f| **f == Scalar::from_integer(k.into()))
                .count()
        };
        for (n, rank, twos, sixes) in [(1, 0, 0, 0), (2, 4, 2, 2), (3, 30, 18, 9)] {
            let r = verify_monomorphism(n, Ring::Integers, false).unwrap();
            assert_eq!(
                (
                    r.image_rank,
                    count(&r, 2),
                    count(&r, 6),
                    r.cokernel_torsion.len()
                ),
                (rank, twos, sixes, twos + sixes)
            );
        }
        let signed = verify_monomorphism(3, Ring::Integers, true).unwrap();
        assert_eq!((signed.image_rank, signed.cokernel_torsion.len()), (3, 0));
    }
}
