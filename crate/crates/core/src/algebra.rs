//! Metric 2-step nilpotent Lie algebras.
//!
//! An algebra is stored by its structure constants in a fixed orthonormal
//! basis `e_1..e_{n+1}`. The first `q` basis vectors span the complement
//! `V` of the center, the trailing `dim_center` vectors span the center `Z`.
//! Every bracket lands in `Z`, so the whole structure is encoded by the
//! skew operators `J(Z)` on `V`, defined by `<J(Z)X, Y> = <[X, Y], Z>`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Coordinates of an element of the algebra in its orthonormal basis.
pub type AlgebraVector = DVector<f64>;

/// Threshold on the smallest singular value of the stacked `J` operators
/// below which the declared center is considered wrong.
pub const CENTER_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentAlgebra {
    dim_total: usize,
    dim_center: usize,
    /// Dense `c[i][j][k]`, flattened as `(i * d + j) * d + k`.
    structure: Vec<f64>,
    /// `J(e_{q+k})` as a `q x q` matrix acting on `V` coordinates.
    j_ops: Vec<DMatrix<f64>>,
}

/// One nonzero structure constant `[e_i, e_j] = c e_k` (1-based, `i < j`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// JSON form of an algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub dim_total: usize,
    pub dim_center: usize,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Antisymmetry,
    BracketLandsInCenter,
    CenterIsCentral,
    NonAbelian,
    /// Some nonzero vector of `V` brackets to zero with all of `V`.
    DeclaredCenterTooSmall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Largest offending entry. For `DeclaredCenterTooSmall` this is the
    /// smallest singular value of the stacked `J` operators.
    pub magnitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl NilpotentAlgebra {
    /// Builds an algebra from a dense tensor. No axioms are checked beyond
    /// the shape; call [`validate`](Self::validate) for that.
    pub fn from_dense(dim_total: usize, dim_center: usize, structure: Vec<f64>) -> Result<Self> {
        if dim_center == 0 || dim_center >= dim_total {
            return Err(GeometryError::InvalidAlgebra(format!(
                "need 0 < dim_center < dim_total, got dim_center = {dim_center}, dim_total = {dim_total}"
            )));
        }
        let expected = dim_total.pow(3);
        if structure.len() != expected {
            return Err(GeometryError::DimensionMismatch { expected, found: structure.len() });
        }
        let q = dim_total - dim_center;
        let j_ops = (0..dim_center)
            .map(|k| {
                DMatrix::from_fn(q, q, |b, a| structure[(a * dim_total + b) * dim_total + q + k])
            })
            .collect();
        Ok(NilpotentAlgebra { dim_total, dim_center, structure, j_ops })
    }

    /// Builds an algebra from `i < j` entries (1-based), mirroring each
    /// entry to `c[j][i][k] = -c`.
    pub fn from_brackets(
        dim_total: usize,
        dim_center: usize,
        entries: &[BracketEntry],
    ) -> Result<Self> {
        let d = dim_total;
        let mut structure = vec![0.0; d * d * d];
        for e in entries {
            if e.i == 0 || e.j == 0 || e.k == 0 || e.i > d || e.j > d || e.k > d {
                return Err(GeometryError::InvalidAlgebra(format!(
                    "bracket index out of range 1..={d}: ({}, {}, {})",
                    e.i, e.j, e.k
                )));
            }
            if e.i >= e.j {
                return Err(GeometryError::InvalidAlgebra(format!(
                    "only i < j entries are accepted, got i = {}, j = {}",
                    e.i, e.j
                )));
            }
            let (i, j, k) = (e.i - 1, e.j - 1, e.k - 1);
            structure[(i * d + j) * d + k] += e.c;
            structure[(j * d + i) * d + k] -= e.c;
        }
        Self::from_dense(dim_total, dim_center, structure)
    }

    pub fn from_document(doc: &AlgebraDocument) -> Result<Self> {
        Self::from_brackets(doc.dim_total, doc.dim_center, &doc.brackets)
    }

    pub fn to_document(&self) -> AlgebraDocument {
        let d = self.dim_total;
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    let c = self.c(i, j, k);
                    if c != 0.0 {
                        brackets.push(BracketEntry { i: i + 1, j: j + 1, k: k + 1, c });
                    }
                }
            }
        }
        AlgebraDocument { dim_total: d, dim_center: self.dim_center, brackets }
    }

    /// The `2m+1`-dimensional Heisenberg algebra with orthonormal basis
    /// `K_1..K_m, L_1..L_m, Z` and `[K_i, L_j] = delta_ij Z`.
    pub fn heisenberg(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(GeometryError::InvalidAlgebra("heisenberg(m) needs m >= 1".into()));
        }
        let entries: Vec<_> = (1..=m)
            .map(|i| BracketEntry { i, j: m + i, k: 2 * m + 1, c: 1.0 })
            .collect();
        Self::from_brackets(2 * m + 1, 1, &entries)
    }

    /// Quaternionic Heisenberg algebra: `V = H`, `Z = Im H`, with
    /// `J(Z)X = Z X` (left quaternion multiplication).
    pub fn quaternionic_heisenberg() -> Self {
        // Quaternion product table on basis 1, i, j, k: (sign, index).
        const MUL: [[(f64, usize); 4]; 4] = [
            [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
            [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
            [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
            [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
        ];
        let d = 7;
        let mut structure = vec![0.0; d * d * d];
        // c[a][b][4 + u] = <[e_a, e_b], Z_u> = <J(Z_u) e_a, e_b> = <im_u * e_a, e_b>
        for u in 0..3 {
            for a in 0..4 {
                let (sign, b) = MUL[u + 1][a];
                structure[(a * d + b) * d + 4 + u] = sign;
            }
        }
        Self::from_dense(d, 3, structure).expect("fixed dimensions")
    }

    /// An abelian algebra with a declared `V`/`Z` split. It fails
    /// validation (non-abelian axiom) and exists for Euclidean-limit checks.
    pub fn abelian(dim_total: usize, dim_center: usize) -> Result<Self> {
        Self::from_dense(dim_total, dim_center, vec![0.0; dim_total.pow(3)])
    }

    /// Applies orthogonal changes of basis `qv` on `V` and `qz` on `Z`.
    /// The result is isometric to `self`; H-type is preserved.
    pub fn rotated(&self, qv: &DMatrix<f64>, qz: &DMatrix<f64>) -> Result<Self> {
        let (q, l, d) = (self.dim_v(), self.dim_center, self.dim_total);
        if qv.shape() != (q, q) || qz.shape() != (l, l) {
            return Err(GeometryError::DimensionMismatch { expected: q, found: qv.nrows() });
        }
        let mut full = DMatrix::zeros(d, d);
        full.view_mut((0, 0), (q, q)).copy_from(qv);
        full.view_mut((q, q), (l, l)).copy_from(qz);
        // New basis f_a = sum_i full[i][a] e_i.
        let mut structure = vec![0.0; d * d * d];
        for a in 0..d {
            for b in 0..d {
                let br = self.bracket_raw(&full.column(a).into_owned(), &full.column(b).into_owned());
                let coords = full.transpose() * br;
                for k in 0..d {
                    structure[(a * d + b) * d + k] = coords[k];
                }
            }
        }
        Self::from_dense(d, l, structure)
    }

    pub fn dim_total(&self) -> usize {
        self.dim_total
    }

    pub fn dim_center(&self) -> usize {
        self.dim_center
    }

    /// Dimension `q` of the complement `V`.
    pub fn dim_v(&self) -> usize {
        self.dim_total - self.dim_center
    }

    /// Structure constant `c[i][j][k]` (0-based).
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim_total;
        self.structure[(i * d + j) * d + k]
    }

    /// `J(e_{q+k})` restricted to `V`.
    pub fn j_operator(&self, k: usize) -> &DMatrix<f64> {
        &self.j_ops[k]
    }

    pub fn basis(&self, i: usize) -> AlgebraVector {
        let mut v = AlgebraVector::zeros(self.dim_total);
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> AlgebraVector {
        AlgebraVector::zeros(self.dim_total)
    }

    pub fn v_part(&self, v: &AlgebraVector) -> AlgebraVector {
        let mut out = v.clone();
        out.rows_mut(self.dim_v(), self.dim_center).fill(0.0);
        out
    }

    pub fn z_part(&self, v: &AlgebraVector) -> AlgebraVector {
        let mut out = v.clone();
        out.rows_mut(0, self.dim_v()).fill(0.0);
        out
    }

    fn check_len(&self, v: &AlgebraVector) -> Result<()> {
        if v.len() != self.dim_total {
            return Err(GeometryError::DimensionMismatch { expected: self.dim_total, found: v.len() });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_raw(x, y))
    }

    pub(crate) fn bracket_raw(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let d = self.dim_total;
        let mut out = AlgebraVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                let s = x[i] * y[j];
                for k in 0..d {
                    out[k] += s * self.structure[(i * d + j) * d + k];
                }
            }
        }
        out
    }

    /// `J(z) x` with the `V` part of `z` and the `Z` part of `x` ignored.
    pub(crate) fn j_raw(&self, z: &AlgebraVector, x: &AlgebraVector) -> AlgebraVector {
        let q = self.dim_v();
        let xv = x.rows(0, q);
        let mut acc = DVector::zeros(q);
        for (k, op) in self.j_ops.iter().enumerate() {
            let zk = z[q + k];
            if zk != 0.0 {
                acc += zk * (op * xv);
            }
        }
        let mut out = AlgebraVector::zeros(self.dim_total);
        out.rows_mut(0, q).copy_from(&acc);
        out
    }

    /// The skew operator `J(z)` applied to `x`, defined by
    /// `<J(z) x, y> = <[x, y], z>` for `x, y` in `V` and `z` in `Z`.
    pub fn j_apply(&self, z: &AlgebraVector, x: &AlgebraVector, tol: f64) -> Result<AlgebraVector> {
        self.check_len(z)?;
        self.check_len(x)?;
        let zv = self.v_part(z).norm();
        if zv > tol {
            return Err(GeometryError::NotInSubspace { subspace: "center", norm: zv });
        }
        let xz = self.z_part(x).norm();
        if xz > tol {
            return Err(GeometryError::NotInSubspace { subspace: "complement", norm: xz });
        }
        Ok(self.j_raw(z, x))
    }

    /// Matrix of `J(z)` on `V` for an arbitrary central vector.
    pub fn j_matrix(&self, z: &AlgebraVector) -> DMatrix<f64> {
        let q = self.dim_v();
        let mut m = DMatrix::zeros(q, q);
        for (k, op) in self.j_ops.iter().enumerate() {
            m += z[q + k] * op;
        }
        m
    }

    /// Checks every axiom of a metric 2-step nilpotent algebra with the
    /// declared center. Violations are reported, not raised.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let d = self.dim_total;
        let q = self.dim_v();
        let mut anti: f64 = 0.0;
        let mut lands: f64 = 0.0;
        let mut central: f64 = 0.0;
        let mut largest: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let c = self.c(i, j, k);
                    anti = anti.max((c + self.c(j, i, k)).abs());
                    largest = largest.max(c.abs());
                    if k < q {
                        lands = lands.max(c.abs());
                    }
                    if i >= q || j >= q {
                        central = central.max(c.abs());
                    }
                }
            }
        }
        let mut violations = Vec::new();
        let mut push = |kind, magnitude: f64, bad: bool| {
            if bad {
                violations.push(Violation { kind, magnitude });
            }
        };
        push(ViolationKind::Antisymmetry, anti, anti > tol);
        push(ViolationKind::BracketLandsInCenter, lands, lands > tol);
        push(ViolationKind::CenterIsCentral, central, central > tol);
        push(ViolationKind::NonAbelian, largest, largest <= tol);
        let sigma = self.stacked_j_sigma_min();
        push(ViolationKind::DeclaredCenterTooSmall, sigma, sigma <= CENTER_TOL.max(tol));
        ValidationReport { violations }
    }

    /// Smallest singular value of `[J(Z_1); ...; J(Z_l)]`; zero iff some
    /// nonzero `X` in `V` satisfies `[X, V] = 0`.
    fn stacked_j_sigma_min(&self) -> f64 {
        let q = self.dim_v();
        let l = self.dim_center;
        let mut stacked = DMatrix::zeros(q * l, q);
        for (k, op) in self.j_ops.iter().enumerate() {
            stacked.view_mut((k * q, 0), (q, q)).copy_from(op);
        }
        stacked.singular_values().min()
    }

    /// `J(Z)^2 = -|Z|^2 Id` for every basis vector of the center and every
    /// sum of two of them, which by polarization covers all of `Z`.
    pub fn is_heisenberg_type(&self, tol: f64) -> bool {
        let q = self.dim_v();
        let l = self.dim_center;
        let check = |z: &AlgebraVector| {
            let j = self.j_matrix(z);
            let zz = z.norm_squared();
            let residual = &j * &j + DMatrix::identity(q, q) * zz;
            residual.amax() <= tol
        };
        for a in 0..l {
            if !check(&self.basis(q + a)) {
                return false;
            }
            for b in (a + 1)..l {
                if !check(&(self.basis(q + a) + self.basis(q + b))) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> NilpotentAlgebra {
        NilpotentAlgebra::heisenberg(1).unwrap()
    }

    #[test]
    fn heisenberg_structure_relations() {
        let a = h1();
        let (k, l, z) = (a.basis(0), a.basis(1), a.basis(2));
        assert_eq!(a.bracket(&k, &l).unwrap(), z);
        assert_eq!(a.bracket(&z, &k).unwrap(), a.zero());
        assert_eq!(a.bracket(&l, &l).unwrap(), a.zero());
    }

    #[test]
    fn j_on_nil_brute_force() {
        let a = h1();
        let z = a.basis(2);
        // Brute force <J(Z)X, Y> = <[X, Y], Z> over the basis of V.
        for x in 0..2 {
            let jx = a.j_apply(&z, &a.basis(x), 1e-12).unwrap();
            for y in 0..2 {
                let want = a.bracket(&a.basis(x), &a.basis(y)).unwrap().dot(&z);
                assert_eq!(jx[y], want);
            }
        }
        assert_eq!(a.j_apply(&z, &a.basis(0), 1e-12).unwrap(), a.basis(1));
        assert_eq!(a.j_apply(&z, &a.basis(1), 1e-12).unwrap(), -a.basis(0));
        assert_eq!(a.j_apply(&a.zero(), &a.basis(0), 1e-12).unwrap(), a.zero());
    }

    #[test]
    fn j_rejects_wrong_subspace() {
        let a = h1();
        assert!(a.j_apply(&a.basis(0), &a.basis(0), 1e-12).is_err());
        assert!(a.j_apply(&a.basis(2), &a.basis(2), 1e-12).is_err());
        assert!(matches!(
            a.bracket(&AlgebraVector::zeros(2), &a.basis(0)),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn heisenberg2_j_squared_is_minus_identity() {
        let a = NilpotentAlgebra::heisenberg(2).unwrap();
        let z = a.basis(4);
        for i in 0..4 {
            let x = a.basis(i);
            let jjx = a.j_apply(&z, &a.j_apply(&z, &x, 1e-12).unwrap(), 1e-12).unwrap();
            assert_eq!(jjx, -x);
        }
        let j = a.j_matrix(&z);
        assert!(((&j * &j).trace() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn builtins_validate() {
        for m in 1..=3 {
            let a = NilpotentAlgebra::heisenberg(m).unwrap();
            assert!(a.validate(1e-12).is_valid(), "heisenberg({m})");
            assert_eq!(a.dim_total(), 2 * m + 1);
            assert_eq!(a.dim_center(), 1);
            assert!(a.is_heisenberg_type(1e-12));
        }
        let qh = NilpotentAlgebra::quaternionic_heisenberg();
        assert!(qh.validate(1e-12).is_valid());
        assert!(qh.is_heisenberg_type(1e-12));
        assert!(NilpotentAlgebra::heisenberg(0).is_err());
    }

    #[test]
    fn violations_are_detected() {
        let bad = NilpotentAlgebra::from_brackets(3, 1, &[BracketEntry { i: 1, j: 2, k: 1, c: 1.0 }])
            .unwrap();
        assert!(bad.validate(1e-12).has(ViolationKind::BracketLandsInCenter));

        let flat = NilpotentAlgebra::abelian(3, 1).unwrap();
        assert!(flat.validate(1e-12).has(ViolationKind::NonAbelian));

        let mut dense = vec![0.0; 27];
        dense[5] = 1.0; // c[0][1][2], no mirror
        let lopsided = NilpotentAlgebra::from_dense(3, 1, dense).unwrap();
        assert!(lopsided.validate(1e-12).has(ViolationKind::Antisymmetry));

        let central = NilpotentAlgebra::from_brackets(
            3,
            1,
            &[BracketEntry { i: 1, j: 2, k: 3, c: 1.0 }, BracketEntry { i: 1, j: 3, k: 3, c: 0.5 }],
        )
        .unwrap();
        assert!(central.validate(1e-12).has(ViolationKind::CenterIsCentral));
    }

    #[test]
    fn direct_sum_with_abelian_factor() {
        // heisenberg(1) plus a commuting V direction: the declared center is
        // too small and the algebra is not of Heisenberg type.
        let a = NilpotentAlgebra::from_brackets(4, 1, &[BracketEntry { i: 1, j: 2, k: 4, c: 1.0 }])
            .unwrap();
        assert!(!a.is_heisenberg_type(1e-10));
        assert!(a.validate(1e-12).has(ViolationKind::DeclaredCenterTooSmall));
    }

    #[test]
    fn scaled_heisenberg_is_not_h_type() {
        let a = NilpotentAlgebra::from_brackets(3, 1, &[BracketEntry { i: 1, j: 2, k: 3, c: 2.0 }])
            .unwrap();
        assert!(a.validate(1e-12).is_valid());
        assert!(!a.is_heisenberg_type(1e-10));
    }

    #[test]
    fn document_round_trip() {
        let a = NilpotentAlgebra::quaternionic_heisenberg();
        let text = serde_json::to_string(&a.to_document()).unwrap();
        let doc: AlgebraDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(NilpotentAlgebra::from_document(&doc).unwrap(), a);
    }

    #[test]
    fn json_rejects_lower_triangle() {
        let doc: AlgebraDocument = serde_json::from_str(
            r#"{"dim_total": 3, "dim_center": 1, "brackets": [{"i": 2, "j": 1, "k": 3, "c": 1.0}]}"#,
        )
        .unwrap();
        assert!(NilpotentAlgebra::from_document(&doc).is_err());
    }
}
