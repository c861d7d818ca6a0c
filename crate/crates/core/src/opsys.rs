//! Concrete operator systems, completely positive maps into `M_n`, and the
//! correspondence between such maps and functionals on `M_n ⊗ X`.
//!
//! Elements of `M_n ⊗ X` are stored as `nk x nk` matrices with the Kronecker
//! block convention of [`CMatrix::kron`], so the `(i, j)` block is `x_ij`.

use std::ops::Deref;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::convex::{max_min_eigenvalue, AffineMatrix, SolverOptions};
use crate::error::{input, Error, Result};
use crate::matrix::CMatrix;
use crate::C64;

/// Tolerance for span membership and adjoint closure.
pub const SPAN_TOL: f64 = 1e-10;
/// Tolerance for unitality and state normalization.
pub const UNIT_TOL: f64 = 1e-9;
/// Acceptable restriction error of an ambient extension.
pub const EXTENSION_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct OperatorSystem {
    k: usize,
    basis: Vec<CMatrix>,
    /// `h_0 = I`, then traceless Hermitian matrices, Hilbert-Schmidt
    /// orthonormal.
    herm: Vec<CMatrix>,
    /// Row `l` holds the coordinates of `basis[l]` in `herm`.
    basis_in_herm: Vec<Vec<C64>>,
    /// Row `j` holds the coordinates of `herm[j]` in `basis`.
    herm_in_basis: Vec<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
struct SystemWire {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
}

impl Serialize for OperatorSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemWire {
            ambient_dim: self.k,
            basis: self.basis.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SystemWire::deserialize(d)?;
        if w.basis.iter().any(|b| b.rows() != w.ambient_dim) {
            return Err(serde::de::Error::custom(
                "basis size differs from ambient_dim",
            ));
        }
        OperatorSystem::new(w.basis).map_err(serde::de::Error::custom)
    }
}

fn gram_schmidt_push(acc: &mut Vec<CMatrix>, mut v: CMatrix, tol: f64) -> bool {
    let scale = v.frobenius_norm();
    if scale == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for h in acc.iter() {
            let c = h.hs_inner(&v);
            v.axpy(-c, h);
        }
    }
    let nrm = v.frobenius_norm();
    if nrm <= tol * scale {
        return false;
    }
    acc.push(v.scale_real(1.0 / nrm));
    true
}

/// Hermitian matrix units of `M_k`, Hilbert-Schmidt orthonormal.
fn hermitian_units(k: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(k * k);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..k {
        out.push(CMatrix::unit(k, a, a));
    }
    for a in 0..k {
        for b in a + 1..k {
            let mut s = CMatrix::zeros(k, k);
            s[(a, b)] = Complex::new(r, 0.0);
            s[(b, a)] = Complex::new(r, 0.0);
            out.push(s);
            let mut t = CMatrix::zeros(k, k);
            t[(a, b)] = Complex::new(0.0, -r);
            t[(b, a)] = Complex::new(0.0, r);
            out.push(t);
        }
    }
    out
}

impl OperatorSystem {
    /// Validates the basis: square, common size, `basis[0] = I`, linearly
    /// independent, span closed under adjoints.
    pub fn new(basis: Vec<CMatrix>) -> Result<Self> {
        if basis.is_empty() {
            return input("operator system basis is empty");
        }
        let k = basis[0].rows();
        for b in &basis {
            if !b.is_square() || b.rows() != k {
                return Err(Error::Dimension(
                    "basis matrices must be square of equal size".into(),
                ));
            }
            b.check_finite()?;
        }
        if (&basis[0] - &CMatrix::identity(k)).max_abs() > SPAN_TOL {
            return input("first basis element must be the identity");
        }
        // Hermitian real span of the basis
        let id_normalized = CMatrix::identity(k).scale_real(1.0 / (k as f64).sqrt());
        let mut ortho = vec![id_normalized];
        for b in basis.iter().skip(1) {
            let floor = 1e-12 * b.frobenius_norm();
            for part in [b.re_part(), b.im_part()] {
                if part.frobenius_norm() > floor {
                    gram_schmidt_push(&mut ortho, part, 1e-9);
                }
            }
        }
        let dim = basis.len();
        // complex independence: the complex span has dimension |basis|
        let mut cplx = Vec::new();
        for b in &basis {
            if !gram_schmidt_push(&mut cplx, b.clone(), 1e-9) {
                return input("basis is linearly dependent");
            }
        }
        if ortho.len() != dim {
            return input("span is not closed under the adjoint");
        }
        let mut herm = vec![CMatrix::identity(k)];
        herm.extend(ortho.into_iter().skip(1));
        let mut sys = Self {
            k,
            basis,
            herm,
            basis_in_herm: Vec::new(),
            herm_in_basis: Vec::new(),
        };
        let mut rows = Vec::with_capacity(dim);
        for b in &sys.basis {
            rows.push(sys.coords(b)?);
        }
        let kmat = CMatrix::from_fn(dim, dim, |l, j| rows[l][j]);
        // herm = K^{-1} basis, row by row: solve K^T g_j = e_j
        let kt = kmat.transpose();
        let mut inv_rows = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut e = vec![Complex::new(0.0, 0.0); dim];
            e[j] = Complex::new(1.0, 0.0);
            inv_rows.push(kt.solve(&e)?);
        }
        sys.basis_in_herm = rows;
        sys.herm_in_basis = inv_rows;
        for b in sys.basis.iter().skip(1) {
            let adj = b.adjoint();
            let r = sys.span_residual(&adj);
            if r > SPAN_TOL * (1.0 + b.frobenius_norm()) {
                return input(format!(
                    "adjoint of a basis element leaves the span (residual {r:.2e})"
                ));
            }
        }
        Ok(sys)
    }

    /// The full matrix algebra `M_k` with basis `I` followed by the matrix
    /// units other than `e_{k-1,k-1}`.
    pub fn full(k: usize) -> Self {
        let mut basis = vec![CMatrix::identity(k)];
        for a in 0..k {
            for b in 0..k {
                if a == k - 1 && b == k - 1 {
                    continue;
                }
                basis.push(CMatrix::unit(k, a, b));
            }
        }
        Self::new(basis).expect("matrix units form a valid basis")
    }

    /// Diagonal matrices in `M_k`.
    pub fn diagonal(k: usize) -> Self {
        let mut basis = vec![CMatrix::identity(k)];
        for a in 0..k.saturating_sub(1) {
            basis.push(CMatrix::unit(k, a, a));
        }
        Self::new(basis).expect("diagonal units form a valid basis")
    }

    /// Functions on two points, realized as `{I, diag(1, -1)}` in `M_2`.
    pub fn two_point() -> Self {
        Self::new(vec![CMatrix::identity(2), CMatrix::diag_real(&[1.0, -1.0])]).expect("valid")
    }

    /// The one-point system `C`.
    pub fn scalars() -> Self {
        Self::new(vec![CMatrix::identity(1)]).expect("valid")
    }

    /// `X ⊕ Y` inside `M_{k+l}` with basis `I⊕I, I⊕0, b_i⊕0, 0⊕c_j`.
    pub fn direct_sum(x: &Self, y: &Self) -> Self {
        let (k, l) = (x.k, y.k);
        let zk = CMatrix::zeros(k, k);
        let zl = CMatrix::zeros(l, l);
        let mut basis = vec![
            CMatrix::identity(k + l),
            CMatrix::identity(k).direct_sum(&zl),
        ];
        for b in x.basis.iter().skip(1) {
            basis.push(b.direct_sum(&zl));
        }
        for c in y.basis.iter().skip(1) {
            basis.push(zk.direct_sum(c));
        }
        Self::new(basis).expect("direct sum of operator systems is an operator system")
    }

    pub fn ambient_dim(&self) -> usize {
        self.k
    }

    /// Complex dimension, equal to the real dimension of the self-adjoint part.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hermitian_dim(&self) -> usize {
        self.herm.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn hermitian_basis(&self) -> &[CMatrix] {
        &self.herm
    }

    pub fn basis_in_hermitian(&self) -> &[Vec<C64>] {
        &self.basis_in_herm
    }

    pub fn hermitian_in_basis(&self) -> &[Vec<C64>] {
        &self.herm_in_basis
    }

    fn raw_coords(&self, x: &CMatrix) -> Vec<C64> {
        let k = self.k as f64;
        let mut c = Vec::with_capacity(self.herm.len());
        c.push(x.trace() / k);
        for h in self.herm.iter().skip(1) {
            c.push(h.hs_inner(x));
        }
        c
    }

    fn span_residual(&self, x: &CMatrix) -> f64 {
        let c = self.raw_coords(x);
        (&self.from_coords(&c) - x).frobenius_norm()
    }

    /// Complex coordinates of `x` in the Hermitian basis.
    pub fn coords(&self, x: &CMatrix) -> Result<Vec<C64>> {
        if x.rows() != self.k || x.cols() != self.k {
            return Err(Error::Dimension(format!(
                "expected a {0}x{0} element",
                self.k
            )));
        }
        x.check_finite()?;
        let c = self.raw_coords(x);
        let r = (&self.from_coords(&c) - x).frobenius_norm();
        if r > 1e-8 * (1.0 + x.frobenius_norm()) {
            return input(format!(
                "element is outside the operator system (residual {r:.2e})"
            ));
        }
        Ok(c)
    }

    /// Real coordinates of a self-adjoint element.
    pub fn herm_coords(&self, x: &CMatrix) -> Result<Vec<f64>> {
        let c = self.coords(x)?;
        let im = c.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if im > 1e-8 * (1.0 + x.max_abs()) {
            return Err(Error::NotHermitian(im));
        }
        Ok(c.into_iter().map(|z| z.re).collect())
    }

    pub fn from_coords(&self, c: &[C64]) -> CMatrix {
        crate::matrix::complex_combination(c, &self.herm)
    }

    pub fn from_herm_coords(&self, c: &[f64]) -> CMatrix {
        crate::matrix::real_combination(c, &self.herm)
    }

    pub fn contains(&self, x: &CMatrix) -> bool {
        self.coords(x).is_ok()
    }

    /// Whether products of basis elements stay in the span.
    pub fn is_multiplicatively_closed(&self) -> bool {
        for a in &self.herm {
            for b in &self.herm {
                let p = a * b;
                if self.span_residual(&p) > 1e-8 * (1.0 + p.frobenius_norm()) {
                    return false;
                }
            }
        }
        true
    }

    /// Splits an element of `M_n ⊗ M_k` into its `n x n` blocks.
    pub fn blocks(&self, n: usize, x: &CMatrix) -> Result<Vec<CMatrix>> {
        let k = self.k;
        if x.rows() != n * k || x.cols() != n * k {
            return Err(Error::Dimension(format!(
                "expected a {0}x{0} matrix",
                n * k
            )));
        }
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(x.block(i * k, j * k, k, k));
            }
        }
        Ok(out)
    }

    /// Reassembles `(x_ij)` into an element of `M_n ⊗ M_k`.
    pub fn assemble(&self, n: usize, blocks: &[CMatrix]) -> CMatrix {
        let k = self.k;
        let mut x = CMatrix::zeros(n * k, n * k);
        for i in 0..n {
            for j in 0..n {
                x.set_block(i * k, j * k, &blocks[i * n + j]);
            }
        }
        x
    }

    /// Orthonormal Hermitian basis of the Hilbert-Schmidt complement of
    /// `X^T` in `M_k`; these are the free directions of an extension.
    fn transpose_complement(&self) -> Vec<CMatrix> {
        let k = self.k;
        let mut acc: Vec<CMatrix> = vec![CMatrix::identity(k).scale_real(1.0 / (k as f64).sqrt())];
        for h in self.herm.iter().skip(1) {
            gram_schmidt_push(&mut acc, h.transpose(), 1e-9);
        }
        let fixed = acc.len();
        for u in hermitian_units(k) {
            gram_schmidt_push(&mut acc, u, 1e-9);
        }
        acc.split_off(fixed)
            .into_iter()
            .map(|m| m.re_part())
            .collect()
    }
}

/// A linear map `X -> M_n`, stored by its images of the system's basis.
#[derive(Clone, Debug)]
pub struct CpMap {
    n: usize,
    images: Vec<CMatrix>,
    herm_images: Vec<CMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapWire {
    pub n: usize,
    pub images: Vec<CMatrix>,
}

impl CpMap {
    pub fn from_basis_images(sys: &OperatorSystem, n: usize, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != sys.dim() {
            return Err(Error::Dimension(format!(
                "{} images for a {}-dimensional system",
                images.len(),
                sys.dim()
            )));
        }
        for m in &images {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!("images must be {n}x{n}")));
            }
            m.check_finite()?;
        }
        let herm_images = sys
            .herm_in_basis
            .iter()
            .map(|row| crate::matrix::complex_combination(row, &images))
            .collect();
        Ok(Self {
            n,
            images,
            herm_images,
        })
    }

    pub fn from_herm_images(
        sys: &OperatorSystem,
        n: usize,
        herm_images: Vec<CMatrix>,
    ) -> Result<Self> {
        if herm_images.len() != sys.dim() {
            return Err(Error::Dimension(
                "image count differs from system dimension".into(),
            ));
        }
        let images = sys
            .basis_in_herm
            .iter()
            .map(|row| crate::matrix::complex_combination(row, &herm_images))
            .collect();
        Ok(Self {
            n,
            images,
            herm_images,
        })
    }

    pub fn from_wire(sys: &OperatorSystem, w: MapWire) -> Result<Self> {
        Self::from_basis_images(sys, w.n, w.images)
    }

    pub fn to_wire(&self) -> MapWire {
        MapWire {
            n: self.n,
            images: self.images.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn herm_images(&self) -> &[CMatrix] {
        &self.herm_images
    }

    pub fn unit_image(&self) -> &CMatrix {
        &self.herm_images[0]
    }

    pub fn apply(&self, sys: &OperatorSystem, x: &CMatrix) -> Result<CMatrix> {
        Ok(self.apply_coords(&sys.coords(x)?))
    }

    pub fn apply_coords(&self, c: &[C64]) -> CMatrix {
        crate::matrix::complex_combination(c, &self.herm_images)
    }

    pub fn apply_herm_coords(&self, c: &[f64]) -> CMatrix {
        crate::matrix::real_combination(c, &self.herm_images)
    }

    /// `max_l ||phi(h_l) - psi(h_l)||` over the Hermitian basis.
    pub fn max_image_difference(&self, other: &Self) -> f64 {
        self.herm_images
            .iter()
            .zip(&other.herm_images)
            .map(|(a, b)| (a - b).operator_norm_unchecked())
            .fold(0.0, f64::max)
    }

    /// Composition `x -> self(inner(x))` for a map `inner : W -> X`.
    pub fn compose_after(
        &self,
        sys_x: &OperatorSystem,
        sys_w: &OperatorSystem,
        inner: &CpMap,
    ) -> Result<CpMap> {
        let mut herm = Vec::with_capacity(sys_w.dim());
        for img in inner.herm_images() {
            herm.push(self.apply(sys_x, img)?);
        }
        CpMap::from_herm_images(sys_w, self.n, herm)
    }

    fn check_self_adjoint(&self) -> Result<()> {
        for m in &self.herm_images {
            let d = m.hermitian_defect();
            if d > 1e-9 * (1.0 + m.max_abs()) {
                return Err(Error::Validation(format!(
                    "map is not self-adjoint (defect {d:.2e})"
                )));
            }
        }
        Ok(())
    }
}

/// A unital completely positive map `X -> M_n`.
#[derive(Clone, Debug)]
pub struct UcpMap(CpMap);

/// A completely positive map whose associated functional is a state.
#[derive(Clone, Debug)]
pub struct ScpMap(CpMap);

impl Deref for UcpMap {
    type Target = CpMap;
    fn deref(&self) -> &CpMap {
        &self.0
    }
}

impl Deref for ScpMap {
    type Target = CpMap;
    fn deref(&self) -> &CpMap {
        &self.0
    }
}

impl UcpMap {
    /// Checks unitality and self-adjointness. Complete positivity is not
    /// checked here; see [`certify_cp`].
    pub fn new(map: CpMap) -> Result<Self> {
        let n = map.n;
        let defect = (map.unit_image() - &CMatrix::identity(n)).max_abs();
        if defect > UNIT_TOL {
            return Err(Error::Validation(format!(
                "map is not unital (defect {defect:.2e})"
            )));
        }
        map.check_self_adjoint()?;
        Ok(Self(map))
    }

    pub(crate) fn trusted(map: CpMap) -> Self {
        Self(map)
    }

    pub fn into_inner(self) -> CpMap {
        self.0
    }

    pub fn as_map(&self) -> &CpMap {
        &self.0
    }
}

impl ScpMap {
    pub fn new(map: CpMap) -> Result<Self> {
        let n = map.n as f64;
        map.check_self_adjoint()?;
        let unit = map.unit_image();
        if !unit.is_psd()? {
            return Err(Error::Validation("phi(1) is not positive".into()));
        }
        let norm = unit.trace().re / n;
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Validation(format!(
                "associated functional has mass {norm}"
            )));
        }
        if unit.operator_norm()? > n * n * n + UNIT_TOL {
            return Err(Error::Validation("||phi(1)|| exceeds n^3".into()));
        }
        Ok(Self(map))
    }

    pub fn into_inner(self) -> CpMap {
        self.0
    }

    pub fn as_map(&self) -> &CpMap {
        &self.0
    }
}

/// A linear functional on `M_n ⊗ X`, stored as `sigma(e_ij ⊗ h_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixState {
    n: usize,
    dim: usize,
    values: Vec<C64>,
}

impl MatrixState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, i: usize, j: usize, l: usize) -> C64 {
        self.values[(i * self.n + j) * self.dim + l]
    }

    /// Evaluates the functional on an element of `M_n ⊗ X`.
    pub fn eval(&self, sys: &OperatorSystem, x: &CMatrix) -> Result<C64> {
        let blocks = sys.blocks(self.n, x)?;
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = sys.coords(&blocks[i * self.n + j])?;
                for (l, cl) in c.iter().enumerate() {
                    acc += cl * self.value(i, j, l);
                }
            }
        }
        Ok(acc)
    }

    /// `sigma(1 ⊗ 1)`.
    pub fn mass(&self) -> C64 {
        (0..self.n).map(|i| self.value(i, i, 0)).sum()
    }
}

/// `sigma_phi((x_ij)) = (1/n) sum_ij phi(x_ij)_ij`.
pub fn state_of_ucp(phi: &CpMap) -> MatrixState {
    let n = phi.n;
    let dim = phi.herm_images.len();
    let inv = 1.0 / n as f64;
    let mut values = Vec::with_capacity(n * n * dim);
    for i in 0..n {
        for j in 0..n {
            for h in &phi.herm_images {
                values.push(h[(i, j)] * inv);
            }
        }
    }
    MatrixState { n, dim, values }
}

/// `(phi_sigma(x))_ij = n sigma(e_ij ⊗ x)`.
pub fn ucp_of_state(sys: &OperatorSystem, sigma: &MatrixState) -> Result<ScpMap> {
    let n = sigma.n;
    if sigma.dim != sys.dim() {
        return input("state was built on a different system");
    }
    let mass = sigma.mass();
    if (mass - Complex::new(1.0, 0.0)).norm() > UNIT_TOL {
        return input(format!("functional is not normalized (mass {mass})"));
    }
    let nf = n as f64;
    let herm: Vec<CMatrix> = (0..sys.dim())
        .map(|l| CMatrix::from_fn(n, n, |i, j| sigma.value(i, j, l) * nf))
        .collect();
    let map = CpMap::from_herm_images(sys, n, herm)?;
    ScpMap::new(map).map_err(|e| Error::Input(format!("not a state: {e}")))
}

/// A linear map `M_k -> M_n` given by the images of the matrix units.
#[derive(Clone, Debug)]
pub struct AmbientMap {
    pub k: usize,
    pub n: usize,
    /// `units[a * k + b] = phi(e_ab)`.
    pub units: Vec<CMatrix>,
}

impl AmbientMap {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for a in 0..self.k {
            for b in 0..self.k {
                let c = x[(a, b)];
                if c.norm_sqr() != 0.0 {
                    out.axpy(c, &self.units[a * self.k + b]);
                }
            }
        }
        out
    }

    /// `C = sum_ab e_ab ⊗ phi(e_ab)`; the map is completely positive iff
    /// `C >= 0`.
    pub fn choi(&self) -> CMatrix {
        let (k, n) = (self.k, self.n);
        let mut c = CMatrix::zeros(k * n, k * n);
        for a in 0..k {
            for b in 0..k {
                c.set_block(a * n, b * n, &self.units[a * k + b]);
            }
        }
        c
    }

    pub fn from_choi(k: usize, n: usize, c: &CMatrix) -> Self {
        let mut units = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                units.push(c.block(a * n, b * n, n, n));
            }
        }
        Self { k, n, units }
    }

    /// `x -> V* x V` for `V : C^n -> C^k`.
    pub fn compression(v: &CMatrix) -> Self {
        let (k, n) = (v.rows(), v.cols());
        let va = v.adjoint();
        let mut units = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                units.push(CMatrix::from_fn(n, n, |i, j| va[(i, a)] * v[(b, j)]));
            }
        }
        Self { k, n, units }
    }

    pub fn is_cp(&self) -> Result<bool> {
        self.choi().is_psd()
    }

    pub fn restrict(&self, sys: &OperatorSystem) -> CpMap {
        let herm = sys.herm.iter().map(|h| self.apply(h)).collect();
        CpMap::from_herm_images(sys, self.n, herm).expect("dimensions agree")
    }

    /// `phi(1)^{-1/2} phi phi(1)^{-1/2}`, or `None` when `phi(1)` is not
    /// safely invertible.
    fn unitalized(&self) -> Option<Self> {
        let unit = self.apply(&CMatrix::identity(self.k));
        let d = unit.eigh().ok()?;
        if d.eigenvalues[0] <= 1e-8 * (1.0 + d.eigenvalues[d.eigenvalues.len() - 1]) {
            return None;
        }
        let s = d.map_spectrum(|l| 1.0 / l.sqrt());
        Some(Self {
            k: self.k,
            n: self.n,
            units: self.units.iter().map(|u| &(&s * u) * &s).collect(),
        })
    }

    /// Unitalization with a convex perturbation toward `tr(x)/k · 1` when
    /// `phi(1)` is singular.
    pub fn unitalize(&self) -> Self {
        if let Some(u) = self.unitalized() {
            return u;
        }
        let mut t = 1e-6;
        loop {
            let mut p = self.clone();
            let w = t / self.k as f64;
            for a in 0..self.k {
                p.units[a * self.k + a].axpy_real(w, &CMatrix::identity(self.n));
            }
            if let Some(u) = p.unitalized() {
                return u;
            }
            t *= 10.0;
        }
    }
}

fn ginibre(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| {
        Complex::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

/// Random unital completely positive map `M_k -> M_n`.
///
/// Draws a Ginibre matrix `G` in `M_{nk}`, forms the density `GG*/tr`, reads
/// it as a state on `M_n ⊗ M_k`, converts it to a map and unitalizes.
pub fn random_ambient_ucp(k: usize, n: usize, rng: &mut ChaCha8Rng) -> AmbientMap {
    let m = n * k;
    let g = ginibre(rng, m);
    let rho = &g * &g.adjoint();
    let rho = rho.scale_real(1.0 / rho.trace().re);
    let nf = n as f64;
    let mut units = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            // n * sigma(e_ij ⊗ e_ab) = n * rho[(j k + b), (i k + a)]
            units.push(CMatrix::from_fn(n, n, |i, j| {
                rho[(j * k + b, i * k + a)] * nf
            }));
        }
    }
    AmbientMap { k, n, units }.unitalize()
}

/// Seeded random element of `UCP_n(X)`; the stream is
/// `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_ucp(sys: &OperatorSystem, n: usize, seed: u64) -> UcpMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_ucp_with(sys, n, &mut rng).0
}

/// Random UCP map together with the ambient map it was restricted from.
pub fn random_ucp_with(
    sys: &OperatorSystem,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (UcpMap, AmbientMap) {
    let amb = random_ambient_ucp(sys.k, n, rng);
    (UcpMap::trusted(amb.restrict(sys)), amb)
}

/// `x -> sigma(x) 1_n` for a state `sigma` (a level-one map).
pub fn scalar_embedding(sys: &OperatorSystem, state: &CpMap, n: usize) -> UcpMap {
    let id = CMatrix::identity(n);
    let herm = state
        .herm_images
        .iter()
        .map(|s| id.scale(s[(0, 0)]))
        .collect();
    UcpMap::trusted(CpMap::from_herm_images(sys, n, herm).expect("dimensions agree"))
}

/// `x -> V* x V` restricted to the system, for an isometry `V : C^n -> C^k`.
pub fn compression(sys: &OperatorSystem, v: &CMatrix) -> Result<UcpMap> {
    let n = v.cols();
    if v.rows() != sys.k {
        return Err(Error::Dimension(
            "isometry codomain must be the ambient space".into(),
        ));
    }
    let defect = (&(&v.adjoint() * v) - &CMatrix::identity(n)).max_abs();
    if defect > 1e-9 {
        return input("compression requires an isometry");
    }
    Ok(UcpMap::trusted(AmbientMap::compression(v).restrict(sys)))
}

/// Random isometry `C^n -> C^k` from the QR-like orthonormalization of a
/// Gaussian matrix.
pub fn random_isometry(k: usize, n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..k)
            .map(|_| {
                Complex::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        for _ in 0..2 {
            for c in &cols {
                let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= p * ci;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    CMatrix::from_fn(k, n, |i, j| cols[j][i])
}

/// Outcome of the ambient extension search.
#[derive(Clone, Debug)]
pub struct Extension {
    pub map: AmbientMap,
    /// `max_l ||ext(h_l) - phi(h_l)||` over the Hermitian basis.
    pub restriction_error: f64,
    /// Smallest Choi eigenvalue reached before the final positive projection.
    pub min_choi_eigenvalue: f64,
    /// `restriction_error <= EXTENSION_TOL`.
    pub certified: bool,
}

/// Finds a unital completely positive map on `M_k` extending `phi`.
///
/// The Choi matrices of linear extensions of `phi` form an affine family; we
/// maximize its smallest eigenvalue with the barrier solver, project onto the
/// positive cone, re-unitalize, and report the resulting restriction error.
pub fn extend_to_ambient(sys: &OperatorSystem, phi: &CpMap) -> Result<Extension> {
    let (k, n) = (sys.k, phi.n);
    let kf = k as f64;
    // particular solution, block by block: C^{ij} = sum_l t_l h_l^T with
    // t_0 scaled by 1/k
    let herm_t: Vec<CMatrix> = sys.herm.iter().map(|h| h.transpose()).collect();
    let mut constant = CMatrix::zeros(k * n, k * n);
    for i in 0..n {
        for j in 0..n {
            let mut cij = CMatrix::zeros(k, k);
            for (l, ht) in herm_t.iter().enumerate() {
                let mut t = phi.herm_images[l][(i, j)];
                if l == 0 {
                    t /= kf;
                }
                cij.axpy(t, ht);
            }
            for a in 0..k {
                for b in 0..k {
                    constant[(a * n + i, b * n + j)] = cij[(a, b)];
                }
            }
        }
    }
    let free = sys.transpose_complement();
    let mut coeffs = Vec::new();
    let embed = |g: &CMatrix, i: usize, j: usize, s: C64| {
        let mut m = CMatrix::zeros(k * n, k * n);
        for a in 0..k {
            for b in 0..k {
                m[(a * n + i, b * n + j)] += g[(a, b)] * s;
                m[(b * n + j, a * n + i)] += (g[(a, b)] * s).conj();
            }
        }
        m
    };
    for g in &free {
        for i in 0..n {
            // diagonal blocks: Hermitian g counted once
            coeffs.push(embed(g, i, i, Complex::new(0.5, 0.0)));
            for j in i + 1..n {
                coeffs.push(embed(g, i, j, Complex::new(1.0, 0.0)));
                coeffs.push(embed(g, i, j, Complex::new(0.0, 1.0)));
            }
        }
    }
    let constant = constant.re_part();
    let (choi, min_eig) = if coeffs.is_empty() {
        let e = constant.eigh()?.eigenvalues[0];
        (constant, e)
    } else {
        let fam = AffineMatrix { constant, coeffs };
        let sol = max_min_eigenvalue(&fam, SolverOptions::default())?;
        (fam.eval(&sol.w).re_part(), sol.value)
    };
    let projected = if min_eig < 0.0 {
        choi.psd_projection()
    } else {
        choi
    };
    let map = AmbientMap::from_choi(k, n, &projected).unitalize();
    let restricted = map.restrict(sys);
    let restriction_error = restricted.max_image_difference(phi);
    Ok(Extension {
        map,
        restriction_error,
        min_choi_eigenvalue: min_eig,
        certified: restriction_error <= EXTENSION_TOL,
    })
}

/// Certifies complete positivity of a unital map through an ambient extension.
pub fn certify_cp(sys: &OperatorSystem, phi: &CpMap) -> Result<Extension> {
    let ext = extend_to_ambient(sys, phi)?;
    if !ext.certified {
        return Err(Error::Validation(format!(
            "no completely positive extension found (restriction error {:.2e})",
            ext.restriction_error
        )));
    }
    Ok(ext)
}

/// The vector state `x -> <xi, x xi>` as a level-one map.
pub fn vector_state(sys: &OperatorSystem, xi: &[C64]) -> Result<UcpMap> {
    let v = CMatrix::column(xi);
    compression(sys, &v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    fn identity_map(sys: &OperatorSystem) -> CpMap {
        CpMap::from_basis_images(sys, sys.ambient_dim(), sys.basis().to_vec()).unwrap()
    }

    #[test]
    fn validation_of_bases() {
        assert!(OperatorSystem::new(vec![CMatrix::identity(2), CMatrix::unit(2, 0, 1)]).is_err());
        assert!(OperatorSystem::new(vec![CMatrix::diag_real(&[1.0, 2.0])]).is_err());
        assert!(OperatorSystem::new(vec![CMatrix::identity(2), CMatrix::identity(2)]).is_err());
        let s = OperatorSystem::new(vec![
            CMatrix::identity(2),
            CMatrix::unit(2, 0, 1),
            CMatrix::unit(2, 1, 0),
        ])
        .unwrap();
        assert_eq!(s.hermitian_dim(), 3);
        assert!(!s.is_multiplicatively_closed());
        assert!(OperatorSystem::full(3).is_multiplicatively_closed());
        assert_eq!(OperatorSystem::full(3).dim(), 9);
    }

    #[test]
    fn coordinates_round_trip() {
        let s = OperatorSystem::full(2);
        let x = CMatrix::from_fn(2, 2, |i, j| Complex::new(i as f64 + 0.5, j as f64 - 0.25));
        let cx = s.coords(&x).unwrap();
        assert!((&s.from_coords(&cx) - &x).max_abs() < 1e-14);
        assert!(OperatorSystem::two_point()
            .coords(&CMatrix::unit(2, 0, 1))
            .is_err());
    }

    #[test]
    fn state_of_identity_map() {
        let s = OperatorSystem::full(2);
        let sigma = state_of_ucp(&identity_map(&s));
        let x = CMatrix::unit(2, 0, 0).kron(&CMatrix::unit(2, 0, 0));
        assert!((sigma.eval(&s, &x).unwrap() - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn state_of_scalar_map() {
        let s = OperatorSystem::full(2);
        let omega = vector_state(&s, &[c(0.6), c(0.8)]).unwrap();
        let phi = scalar_embedding(&s, &omega, 3);
        let sigma = state_of_ucp(&phi);
        let a = CMatrix::from_fn(3, 3, |i, j| Complex::new((i * 3 + j) as f64, i as f64));
        let x = CMatrix::from_fn(2, 2, |i, j| Complex::new(1.0 + i as f64, j as f64));
        let expect = a.trace() / 3.0 * omega.apply(&s, &x).unwrap()[(0, 0)];
        assert!((sigma.eval(&s, &a.kron(&x)).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn level_one_state_is_the_map() {
        let s = OperatorSystem::two_point();
        let phi = random_ucp(&s, 1, 4);
        let sigma = state_of_ucp(&phi);
        let x = CMatrix::diag_real(&[0.3, -2.0]);
        assert!((sigma.eval(&s, &x).unwrap() - phi.apply(&s, &x).unwrap()[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn round_trip_identity_and_random() {
        let s = OperatorSystem::full(2);
        let id = identity_map(&s);
        let back = ucp_of_state(&s, &state_of_ucp(&id)).unwrap();
        assert!(back.max_image_difference(&id) < 1e-12);
        for seed in 0..5 {
            for n in [2, 3] {
                let phi = random_ucp(&s, n, seed);
                let back = ucp_of_state(&s, &state_of_ucp(&phi)).unwrap();
                assert!(back.max_image_difference(&phi) < 1e-12);
            }
        }
    }

    #[test]
    fn random_ucp_is_deterministic_and_valid() {
        let s = OperatorSystem::diagonal(3);
        let a = random_ucp(&s, 2, 17);
        let b = random_ucp(&s, 2, 17);
        assert_eq!(a.images(), b.images());
        UcpMap::new(a.as_map().clone()).unwrap();
        let ext = certify_cp(&s, &a).unwrap();
        assert!(ext.map.is_cp().unwrap());
    }

    #[test]
    fn random_states_average_to_trace() {
        let s = OperatorSystem::diagonal(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = CMatrix::unit(2, 0, 0);
        let mut mean = 0.0;
        let m = 10_000;
        for _ in 0..m {
            let (phi, _) = random_ucp_with(&s, 1, &mut rng);
            mean += phi.apply(&s, &x).unwrap()[(0, 0)].re;
        }
        assert!((mean / m as f64 - 0.5).abs() < 0.05);
    }

    #[test]
    fn extension_of_full_algebra_is_exact() {
        let s = OperatorSystem::full(2);
        let phi = random_ucp(&s, 2, 3);
        let ext = extend_to_ambient(&s, &phi).unwrap();
        assert!(ext.restriction_error < 1e-12);
    }

    #[test]
    fn extension_of_diagonal_functional() {
        let s = OperatorSystem::diagonal(2);
        let phi = CpMap::from_herm_images(
            &s,
            1,
            vec![CMatrix::identity(1), {
                // herm[1] is the normalized traceless diagonal; phi(diag(a,b)) = a
                let h = &s.hermitian_basis()[1];
                CMatrix::diag_real(&[h[(0, 0)].re])
            }],
        )
        .unwrap();
        let ext = extend_to_ambient(&s, &phi).unwrap();
        assert!(ext.restriction_error <= 1e-10, "{}", ext.restriction_error);
        let y = CMatrix::from_fn(2, 2, |i, j| Complex::new((i + j) as f64, 0.0));
        assert!((ext.map.apply(&y)[(0, 0)] - y[(0, 0)]).norm() < 1e-6);
    }

    #[test]
    fn extension_of_random_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = ginibre(&mut rng, 3);
        let h = &g + &g.adjoint();
        let s = OperatorSystem::new(vec![CMatrix::identity(3), h.clone(), &h * &h]).unwrap();
        let phi = random_ucp(&s, 2, 8);
        let ext = extend_to_ambient(&s, &phi).unwrap();
        assert!(ext.certified, "{}", ext.restriction_error);
        assert!(ext.map.is_cp().unwrap());
    }

    #[test]
    fn direct_sum_system() {
        let s =
            OperatorSystem::direct_sum(&OperatorSystem::two_point(), &OperatorSystem::scalars());
        assert_eq!(s.dim(), 3);
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn scp_bound_and_unital_checks() {
        let s = OperatorSystem::two_point();
        let phi = random_ucp(&s, 2, 5);
        let scp = ucp_of_state(&s, &state_of_ucp(&phi)).unwrap();
        assert!(scp.unit_image().operator_norm().unwrap() <= 8.0);
        let bad = CpMap::from_herm_images(
            &s,
            1,
            vec![CMatrix::diag_real(&[2.0]), CMatrix::diag_real(&[0.0])],
        )
        .unwrap();
        assert!(UcpMap::new(bad).is_err());
    }
}
