//! Finite ordered simplicial complexes.
//!
//! A complex is stored by its facets; faces are enumerated on demand.
//! Simplices of each dimension are listed in lexicographic order of their
//! vertex tuples, which fixes every basis downstream.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{ExactMatrix, Ring, Subquotient};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub vertex_count: usize,
    pub facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn new(vertex_count: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        let k = SimplicialComplex {
            vertex_count,
            facets,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, f) in self.facets.iter().enumerate() {
            if f.is_empty() {
                return Err(Error::InvalidComplex(format!("facet {n} is empty")));
            }
            if f.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidComplex(format!(
                    "facet {n} {f:?} is not strictly increasing"
                )));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= self.vertex_count) {
                return Err(Error::InvalidComplex(format!(
                    "facet {n} references vertex {v} but vertex_count is {}",
                    self.vertex_count
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.facets.iter().map(|f| f.len() - 1).max().unwrap_or(0)
    }

    /// All simplices by dimension, each list sorted lexicographically.
    /// Vertices not covered by any facet still count as 0-simplices.
    pub fn simplices(&self) -> Vec<Vec<Vec<usize>>> {
        let dim = self.dimension();
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        for v in 0..self.vertex_count {
            by_dim[0].insert(vec![v]);
        }
        for f in &self.facets {
            let n = f.len();
            for mask in 1u64..(1u64 << n) {
                let face: Vec<usize> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                by_dim[face.len() - 1].insert(face);
            }
        }
        by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices().iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Boundary matrices: entry `n` maps n-chains to (n-1)-chains
    /// (`n >= 1`), with `∂σ = Σ (-1)^i ∂_i σ`.
    pub fn boundary_matrices(&self, ring: Ring) -> Vec<ExactMatrix> {
        let simplices = self.simplices();
        let index: Vec<BTreeMap<&[usize], usize>> = simplices
            .iter()
            .map(|s| {
                s.iter()
                    .enumerate()
                    .map(|(i, x)| (x.as_slice(), i))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for n in 1..simplices.len() {
            let mut m = ExactMatrix::zeros(ring, simplices[n - 1].len(), simplices[n].len());
            for (j, s) in simplices[n].iter().enumerate() {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    let row = index[n - 1][face.as_slice()];
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    m.set(row, j, ring.add(m.get(row, j), &ring.from_i64(sign)));
                }
            }
            out.push(m);
        }
        out
    }

    /// Simplicial homology `H_n` for every dimension, computed directly from
    /// the boundary matrices.
    pub fn homology(&self, ring: Ring) -> Result<Vec<Subquotient>> {
        let f = self.f_vector();
        let boundaries = self.boundary_matrices(ring);
        let mut out = Vec::new();
        for n in 0..f.len() {
            let cycles = if n == 0 {
                ExactMatrix::identity(ring, f[0])
            } else {
                crate::exactlin::kernel_basis(&boundaries[n - 1])
            };
            let bounds = if n + 1 < f.len() {
                boundaries[n].clone()
            } else {
                ExactMatrix::zeros(ring, f[n], 0)
            };
            out.push(Subquotient::new(&cycles, &bounds)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let k: SimplicialComplex = serde_json::from_str(text)?;
        k.validate()?;
        Ok(k)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

pub fn build_point() -> SimplicialComplex {
    SimplicialComplex {
        vertex_count: 1,
        facets: vec![vec![0]],
    }
}

/// The 3-vertex circle.
pub fn build_circle() -> SimplicialComplex {
    SimplicialComplex {
        vertex_count: 3,
        facets: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
    }
}

/// Boundary of the (m+1)-simplex.
pub fn build_sphere(m: usize) -> SimplicialComplex {
    let n = m + 2;
    let facets = (0..n)
        .rev()
        .map(|skip| (0..n).filter(|&v| v != skip).collect())
        .collect::<BTreeSet<Vec<usize>>>()
        .into_iter()
        .collect();
    SimplicialComplex {
        vertex_count: n,
        facets,
    }
}

/// Monotone lattice paths from `(0, 0)` to `(p, q)`.
fn staircases(p: usize, q: usize) -> Vec<Vec<(usize, usize)>> {
    if p == 0 && q == 0 {
        return vec![vec![(0, 0)]];
    }
    let mut out = Vec::new();
    if p > 0 {
        for mut path in staircases(p - 1, q) {
            path.push((p, q));
            out.push(path);
        }
    }
    if q > 0 {
        for mut path in staircases(p, q - 1) {
            path.push((p, q));
            out.push(path);
        }
    }
    out
}

/// Staircase triangulation of `|a| × |b|`. Vertex `(u, v)` gets index
/// `u * b.vertex_count + v`.
pub fn product(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    let nb = b.vertex_count;
    let mut cells = BTreeSet::new();
    for fa in &a.facets {
        for fb in &b.facets {
            for path in staircases(fa.len() - 1, fb.len() - 1) {
                cells.insert(
                    path.iter()
                        .map(|&(i, j)| fa[i] * nb + fb[j])
                        .collect::<Vec<_>>(),
                );
            }
        }
    }
    // drop staircases that are faces of others (only happens for impure inputs)
    let all: Vec<Vec<usize>> = cells.into_iter().collect();
    let facets = all
        .iter()
        .filter(|s| {
            !all.iter()
                .any(|t| t.len() > s.len() && s.iter().all(|v| t.binary_search(v).is_ok()))
        })
        .cloned()
        .collect();
    SimplicialComplex {
        vertex_count: a.vertex_count * nb,
        facets,
    }
}

/// n-fold product of the 3-vertex circle.
pub fn build_torus(n: usize) -> Result<SimplicialComplex> {
    if n == 0 {
        return Err(Error::InvalidComplex(
            "torus rank must be at least 1".into(),
        ));
    }
    let circle = build_circle();
    let mut t = circle.clone();
    for _ in 1..n {
        t = product(&t, &circle);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homology_ranks(k: &SimplicialComplex) -> Vec<usize> {
        k.homology(Ring::Integers)
            .unwrap()
            .iter()
            .map(|h| {
                assert!(h.is_free(), "unexpected torsion");
                h.free_rank()
            })
            .collect()
    }

    #[test]
    fn circle() {
        let c = build_circle();
        c.validate().unwrap();
        assert_eq!(c.f_vector(), vec![3, 3]);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(homology_ranks(&c), vec![1, 1]);
    }

    #[test]
    fn spheres() {
        let s0 = build_sphere(0);
        assert_eq!(s0.vertex_count, 2);
        assert_eq!(s0.facets, vec![vec![0], vec![1]]);
        let s2 = build_sphere(2);
        assert_eq!(s2.vertex_count, 4);
        assert_eq!(s2.facets.len(), 4);
        assert_eq!(s2.euler_characteristic(), 2);
        for m in 1..=3 {
            let mut expected = vec![0; m + 1];
            expected[0] = 1;
            expected[m] = 1;
            assert_eq!(homology_ranks(&build_sphere(m)), expected);
        }
    }

    #[test]
    fn products() {
        let c = build_circle();
        assert_eq!(product(&build_point(), &c).f_vector(), c.f_vector());
        let t2 = product(&c, &c);
        assert_eq!(t2.facets.len(), 18);
        assert_eq!(t2.euler_characteristic(), 0);
        assert_eq!(homology_ranks(&t2), vec![1, 2, 1]);
        for f in &t2.facets {
            assert!(f.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn tori() {
        assert_eq!(build_torus(1).unwrap(), build_circle());
        let t2 = build_torus(2).unwrap();
        assert_eq!(t2.vertex_count, 9);
        let t3 = build_torus(3).unwrap();
        assert_eq!(t3.vertex_count, 27);
        assert_eq!(t3.f_vector(), vec![27, 189, 324, 162]);
        assert_eq!(homology_ranks(&t3), vec![1, 3, 3, 1]);
        assert!(build_torus(0).is_err());
    }

    #[test]
    fn product_is_associative_on_fixtures() {
        let c = build_circle();
        let s = build_sphere(1);
        let left = product(&product(&c, &s), &c);
        let right = product(&c, &product(&s, &c));
        assert_eq!(left.f_vector(), right.f_vector());
        assert_eq!(homology_ranks(&left), homology_ranks(&right));
    }

    #[test]
    fn load_rejects_bad_facets() {
        assert!(SimplicialComplex::from_json(r#"{"vertex_count":3,"facets":[[2,1]]}"#).is_err());
        assert!(SimplicialComplex::from_json(r#"{"vertex_count":3,"facets":[[0,9]]}"#).is_err());
        assert!(SimplicialComplex::from_json(r#"{"vertex_count":3"#).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t2.scx.json");
        let t2 = build_torus(2).unwrap();
        t2.save(&path).unwrap();
        assert_eq!(SimplicialComplex::load(&path).unwrap(), t2);
    }

    #[test]
    fn torsion_is_detected() {
        // 6-vertex real projective plane
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
        let h = rp2.homology(Ring::Integers).unwrap();
        assert_eq!(h[1].torsion(), vec![Ring::Integers.from_i64(2)]);
        assert_eq!(rp2.euler_characteristic(), 1);
    }
}
