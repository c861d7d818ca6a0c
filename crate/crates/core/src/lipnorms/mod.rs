//! Lip-norms on operator systems and their evaluators.
//!
//! A [`LipNorm`] keeps its structural description ([`Variant`]) next to a
//! compiled normal form (see [`compiled`]) that all evaluators share.

pub mod bridge;
mod checks;
pub mod compiled;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::convex::SolverOptions;
use crate::error::{input, Error, Result};
use crate::matrix::CMatrix;
use crate::opsys::{CpMap, MapWire, OperatorSystem};
use crate::real::RMat;
use crate::C64;

pub use bridge::{Bridge, BridgeKind, BridgeSpec};
pub use checks::{check_f_leibniz, leibniz_f, validate_lipnorm, LeibnizReport, LipReport};
pub use compiled::{Compiled, LatentEval};

/// How far a reported value is from the true seminorm value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Exact,
    Bracketed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub kind: ValueKind,
}

impl SeminormValue {
    pub fn exact(v: f64) -> Self {
        Self {
            value: v,
            lower: v,
            upper: v,
            kind: ValueKind::Exact,
        }
    }

    pub fn bracket(lower: f64, value: f64, upper: f64) -> Self {
        if lower == upper {
            return Self::exact(value);
        }
        Self {
            value,
            lower,
            upper,
            kind: ValueKind::Bracketed,
        }
    }

    fn from_latent(e: &LatentEval) -> Self {
        if e.exact {
            Self::exact(e.value)
        } else {
            Self::bracket((e.value - e.gap).max(0.0), e.value, e.value)
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Self {
            value: self.value * s,
            lower: self.lower * s,
            upper: self.upper * s,
            kind: self.kind,
        }
    }
}

/// How an automorphism was supplied.
#[derive(Clone, Debug)]
pub enum ActionSource {
    /// `x -> U x U*`.
    Unitary(CMatrix),
    /// `k^2 x k^2` matrix acting on row-major `vec(x)`.
    Matrix(CMatrix),
}

/// One sampled group element: its action on the system and its length.
#[derive(Clone, Debug)]
pub struct Action {
    pub herm_images: Vec<CMatrix>,
    pub length: f64,
    pub source: ActionSource,
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return input(format!(
            "group element length must be positive, got {length}"
        ));
    }
    Ok(())
}

fn check_in_system(sys: &OperatorSystem, images: &[CMatrix]) -> Result<()> {
    for m in images {
        sys.coords(m).map_err(|_| {
            Error::Input("automorphism does not preserve the operator system".into())
        })?;
    }
    Ok(())
}

fn apply_vec_matrix(m: &CMatrix, x: &CMatrix) -> CMatrix {
    let k = x.rows();
    let v = m.mul_vec(x.as_slice());
    CMatrix::from_fn(k, k, |a, b| v[a * k + b])
}

impl Action {
    pub fn conjugation(sys: &OperatorSystem, u: &CMatrix, length: f64) -> Result<Self> {
        check_length(length)?;
        let k = sys.ambient_dim();
        if u.rows() != k || u.cols() != k {
            return Err(Error::Dimension(
                "unitary must act on the ambient space".into(),
            ));
        }
        if (&(&u.adjoint() * u) - &CMatrix::identity(k)).max_abs() > 1e-9 {
            return input("conjugating matrix is not unitary");
        }
        let herm_images: Vec<CMatrix> = sys
            .hermitian_basis()
            .iter()
            .map(|h| h.conjugate_by(u))
            .collect();
        check_in_system(sys, &herm_images)?;
        Ok(Self {
            herm_images,
            length,
            source: ActionSource::Unitary(u.clone()),
        })
    }

    pub fn linear(sys: &OperatorSystem, m: &CMatrix, length: f64) -> Result<Self> {
        check_length(length)?;
        let k = sys.ambient_dim();
        if m.rows() != k * k || m.cols() != k * k {
            return Err(Error::Dimension("action matrix must be k^2 x k^2".into()));
        }
        let herm_images: Vec<CMatrix> = sys
            .hermitian_basis()
            .iter()
            .map(|h| apply_vec_matrix(m, h))
            .collect();
        check_in_system(sys, &herm_images)?;
        Ok(Self {
            herm_images,
            length,
            source: ActionSource::Matrix(m.clone()),
        })
    }

    /// From the images of the Hermitian basis; the stored ambient matrix
    /// agrees with the action on the system and kills its complement.
    pub fn from_herm_images(
        sys: &OperatorSystem,
        herm_images: Vec<CMatrix>,
        length: f64,
    ) -> Result<Self> {
        check_length(length)?;
        check_in_system(sys, &herm_images)?;
        let k = sys.ambient_dim();
        let mut m = CMatrix::zeros(k * k, k * k);
        for (l, (h, img)) in sys.hermitian_basis().iter().zip(&herm_images).enumerate() {
            let dual = if l == 0 {
                h.scale_real(1.0 / k as f64)
            } else {
                h.clone()
            };
            for p in 0..k * k {
                let v = img.as_slice()[p];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for (q, d) in dual.as_slice().iter().enumerate() {
                    m[(p, q)] += v * d.conj();
                }
            }
        }
        Ok(Self {
            herm_images,
            length,
            source: ActionSource::Matrix(m),
        })
    }

    fn term(&self, sys: &OperatorSystem) -> Vec<CMatrix> {
        let inv = 1.0 / self.length;
        self.herm_images
            .iter()
            .zip(sys.hermitian_basis())
            .map(|(g, h)| (g - h).scale_real(inv))
            .collect()
    }

    pub fn apply(&self, sys: &OperatorSystem, x: &CMatrix) -> Result<CMatrix> {
        let c = sys.coords(x)?;
        Ok(crate::matrix::complex_combination(&c, &self.herm_images))
    }

    fn to_spec(&self) -> ActionSpec {
        match &self.source {
            ActionSource::Unitary(u) => ActionSpec {
                length: self.length,
                conjugation: true,
                unitary: Some(u.clone()),
                matrix: None,
            },
            ActionSource::Matrix(m) => ActionSpec {
                length: self.length,
                conjugation: false,
                unitary: None,
                matrix: Some(m.clone()),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub enum Variant {
    /// `max_i ||T_i(x)||`, maps stored by Hermitian-basis images.
    Functional {
        maps: Vec<Vec<CMatrix>>,
    },
    /// `max_g ||gamma_g(x) - x|| / l(g)`.
    Action {
        actions: Vec<Action>,
    },
    Scaled {
        inner: Box<LipNorm>,
        factor: f64,
    },
    /// `inf { L(x) : Phi(x) = y }`.
    Quotient {
        parent: Box<LipNorm>,
        map: CpMap,
    },
    /// `max(L_X(x), L_Y(y), N(x, y))` on `X ⊕ Y`.
    DirectSum {
        x: Box<LipNorm>,
        y: Box<LipNorm>,
        bridge: Bridge,
    },
}

#[derive(Clone, Debug)]
pub struct LipNorm {
    system: OperatorSystem,
    variant: Variant,
    compiled: Compiled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionSpec {
    pub length: f64,
    pub conjugation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<CMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<CMatrix>,
}

/// Images of the system's basis under one linear map; any common shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermWire {
    pub images: Vec<CMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum LipSpec {
    Functional {
        maps: Vec<TermWire>,
    },
    Action {
        actions: Vec<ActionSpec>,
    },
    Scaled {
        factor: f64,
        inner: Box<LipSpec>,
    },
    Quotient {
        parent_system: OperatorSystem,
        parent: Box<LipSpec>,
        map: MapWire,
    },
    DirectSum {
        x_system: OperatorSystem,
        x: Box<LipSpec>,
        y_system: OperatorSystem,
        y: Box<LipSpec>,
        bridge: BridgeSpec,
    },
}

fn herm_images_of(sys: &OperatorSystem, basis_images: &[CMatrix]) -> Result<Vec<CMatrix>> {
    if basis_images.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "{} images for a {}-dimensional system",
            basis_images.len(),
            sys.dim()
        )));
    }
    let shape = (basis_images[0].rows(), basis_images[0].cols());
    for m in basis_images {
        if (m.rows(), m.cols()) != shape {
            return Err(Error::Dimension(
                "images of one map must share a shape".into(),
            ));
        }
        m.check_finite()?;
    }
    // herm_j = sum_l G_jl b_l
    Ok(sys
        .hermitian_in_basis()
        .iter()
        .map(|row| crate::matrix::complex_combination(row, basis_images))
        .collect())
}

impl LipNorm {
    pub fn system(&self) -> &OperatorSystem {
        &self.system
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn compiled(&self) -> &Compiled {
        &self.compiled
    }

    /// Functional seminorm from maps given on the system's basis.
    pub fn functional(sys: &OperatorSystem, maps: Vec<Vec<CMatrix>>) -> Result<Self> {
        let mut herm = Vec::with_capacity(maps.len());
        for m in &maps {
            herm.push(herm_images_of(sys, m)?);
        }
        Self::functional_herm(sys, herm)
    }

    /// Functional seminorm from maps given on the Hermitian basis.
    pub fn functional_herm(sys: &OperatorSystem, maps: Vec<Vec<CMatrix>>) -> Result<Self> {
        if maps.is_empty() {
            return input("functional seminorm needs at least one map");
        }
        for m in &maps {
            if m.len() != sys.dim() {
                return Err(Error::Dimension(
                    "map arity differs from system dimension".into(),
                ));
            }
            if m[0].max_abs() > 1e-10 {
                return input("defining maps must vanish on the identity");
            }
        }
        let compiled = Compiled::direct(sys.dim(), maps.clone());
        Ok(Self {
            system: sys.clone(),
            variant: Variant::Functional { maps },
            compiled,
        })
    }

    /// The zero seminorm on the one-point system `C`.
    pub fn one_point() -> Self {
        let sys = OperatorSystem::scalars();
        Self::functional_herm(&sys, vec![vec![CMatrix::zeros(1, 1)]]).expect("valid")
    }

    pub fn action(sys: &OperatorSystem, actions: Vec<Action>) -> Result<Self> {
        if actions.is_empty() {
            return input("action seminorm needs at least one group element");
        }
        let terms = actions.iter().map(|a| a.term(sys)).collect();
        Ok(Self {
            system: sys.clone(),
            compiled: Compiled::direct(sys.dim(), terms),
            variant: Variant::Action { actions },
        })
    }

    pub fn scaled(inner: LipNorm, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return input("scaling factor must be positive");
        }
        Ok(Self {
            system: inner.system.clone(),
            compiled: inner.compiled.scaled(factor),
            variant: Variant::Scaled {
                inner: Box::new(inner),
                factor,
            },
        })
    }

    /// Quotient of `parent` by a surjective unital self-adjoint map into
    /// `child`'s ambient algebra.
    pub fn quotient(parent: LipNorm, map: CpMap, child: &OperatorSystem) -> Result<Self> {
        let ps = &parent.system;
        if map.herm_images().len() != ps.dim() || map.n() != child.ambient_dim() {
            return Err(Error::Dimension(
                "quotient map does not match the systems".into(),
            ));
        }
        if (map.unit_image() - &CMatrix::identity(child.ambient_dim())).max_abs() > 1e-9 {
            return input("quotient map must be unital");
        }
        let dc = child.dim();
        let mut phi = RMat::zeros(dc, ps.dim());
        for (m, img) in map.herm_images().iter().enumerate() {
            let c = child
                .herm_coords(img)
                .map_err(|e| Error::Input(format!("quotient map image: {e}")))?;
            for (r, v) in c.into_iter().enumerate() {
                phi.set(r, m, v);
            }
        }
        if phi.rank(1e-10) != dc {
            return input("quotient map is not surjective");
        }
        let proj = phi.mul(&parent.compiled.proj);
        Ok(Self {
            system: child.clone(),
            compiled: parent.compiled.with_proj(proj),
            variant: Variant::Quotient {
                parent: Box::new(parent),
                map,
            },
        })
    }

    pub fn direct_sum(x: LipNorm, y: LipNorm, bridge: Bridge) -> Result<Self> {
        let (sx, sy) = (&x.system, &y.system);
        if bridge.left.len() != sx.dim() || bridge.right.len() != sy.dim() {
            return Err(Error::Dimension(
                "bridge maps do not match the summands".into(),
            ));
        }
        let sum = OperatorSystem::direct_sum(sx, sy);
        let (dx, dy) = (sx.dim(), sy.dim());
        let (kx, ky) = (sx.ambient_dim(), sy.ambient_dim());
        let mut s = RMat::zeros(dx + dy, dx + dy);
        for (j, h) in sx.hermitian_basis().iter().enumerate() {
            let c = sum.herm_coords(&h.direct_sum(&CMatrix::zeros(ky, ky)))?;
            for (r, v) in c.into_iter().enumerate() {
                s.set(r, j, v);
            }
        }
        for (j, h) in sy.hermitian_basis().iter().enumerate() {
            let c = sum.herm_coords(&CMatrix::zeros(kx, kx).direct_sum(h))?;
            for (r, v) in c.into_iter().enumerate() {
                s.set(r, dx + j, v);
            }
        }
        let (cx, cy) = (&x.compiled, &y.compiled);
        let (px, py) = (cx.latent, cy.latent);
        let mut block = RMat::zeros(dx + dy, px + py);
        for i in 0..dx {
            for j in 0..px {
                block.set(i, j, cx.proj.get(i, j));
            }
        }
        for i in 0..dy {
            for j in 0..py {
                block.set(dx + i, px + j, cy.proj.get(i, j));
            }
        }
        let proj = s.mul(&block);
        let mut terms = Vec::new();
        for t in &cx.terms {
            let z = CMatrix::zeros(t[0].rows(), t[0].cols());
            let mut row = t.clone();
            row.extend(std::iter::repeat_n(z, py));
            terms.push(row);
        }
        for t in &cy.terms {
            let z = CMatrix::zeros(t[0].rows(), t[0].cols());
            let mut row: Vec<CMatrix> = std::iter::repeat_n(z, px).collect();
            row.extend(t.iter().cloned());
            terms.push(row);
        }
        let mut bterm = Vec::with_capacity(px + py);
        for j in 0..px {
            let col = cx.proj.column(j);
            bterm
                .push(crate::matrix::real_combination(&col, &bridge.left).scale_real(bridge.scale));
        }
        for j in 0..py {
            let col = cy.proj.column(j);
            bterm.push(
                crate::matrix::real_combination(&col, &bridge.right).scale_real(-bridge.scale),
            );
        }
        terms.push(bterm);
        Ok(Self {
            system: sum,
            compiled: Compiled::new(dx + dy, terms, proj),
            variant: Variant::DirectSum {
                x: Box::new(x),
                y: Box::new(y),
                bridge,
            },
        })
    }

    pub fn from_spec(sys: &OperatorSystem, spec: &LipSpec) -> Result<Self> {
        let built = match spec {
            LipSpec::Functional { maps } => {
                Self::functional(sys, maps.iter().map(|m| m.images.clone()).collect())?
            }
            LipSpec::Action { actions } => {
                let mut out = Vec::with_capacity(actions.len());
                for a in actions {
                    let act = match (a.conjugation, &a.unitary, &a.matrix) {
                        (true, Some(u), _) => Action::conjugation(sys, u, a.length)?,
                        (false, _, Some(m)) => Action::linear(sys, m, a.length)?,
                        _ => return input("action needs a unitary (conjugation) or a matrix"),
                    };
                    out.push(act);
                }
                Self::action(sys, out)?
            }
            LipSpec::Scaled { factor, inner } => {
                Self::scaled(Self::from_spec(sys, inner)?, *factor)?
            }
            LipSpec::Quotient {
                parent_system,
                parent,
                map,
            } => {
                let p = Self::from_spec(parent_system, parent)?;
                let phi = CpMap::from_basis_images(parent_system, map.n, map.images.clone())?;
                Self::quotient(p, phi, sys)?
            }
            LipSpec::DirectSum {
                x_system,
                x,
                y_system,
                y,
                bridge,
            } => {
                let lx = Self::from_spec(x_system, x)?;
                let ly = Self::from_spec(y_system, y)?;
                let b = Bridge::from_spec(bridge, x_system, y_system)?;
                Self::direct_sum(lx, ly, b)?
            }
        };
        if built.system.ambient_dim() != sys.ambient_dim() || built.system.dim() != sys.dim() {
            return input("Lip-norm spec does not match the operator system");
        }
        Ok(built)
    }

    pub fn to_spec(&self) -> LipSpec {
        match &self.variant {
            Variant::Functional { maps } => LipSpec::Functional {
                maps: maps
                    .iter()
                    .map(|herm| TermWire {
                        images: self
                            .system
                            .basis_in_hermitian()
                            .iter()
                            .map(|row| crate::matrix::complex_combination(row, herm))
                            .collect(),
                    })
                    .collect(),
            },
            Variant::Action { actions } => LipSpec::Action {
                actions: actions.iter().map(|a| a.to_spec()).collect(),
            },
            Variant::Scaled { inner, factor } => LipSpec::Scaled {
                factor: *factor,
                inner: Box::new(inner.to_spec()),
            },
            Variant::Quotient { parent, map } => LipSpec::Quotient {
                parent_system: parent.system.clone(),
                parent: Box::new(parent.to_spec()),
                map: map.to_wire(),
            },
            Variant::DirectSum { x, y, bridge } => LipSpec::DirectSum {
                x_system: x.system.clone(),
                x: Box::new(x.to_spec()),
                y_system: y.system.clone(),
                y: Box::new(y.to_spec()),
                bridge: bridge.to_spec(&x.system, &y.system),
            },
        }
    }

    /// Evaluation at complex Hermitian coordinates. The scalar coordinate is
    /// dropped first (Lip-norms vanish on scalars), so `L(0) = L(1) = 0`
    /// exactly.
    pub fn eval_coords_with(&self, c: &[C64], opts: SolverOptions) -> Result<SeminormValue> {
        Ok(SeminormValue::from_latent(&self.eval_latent(c, opts)?))
    }

    pub fn eval_latent(&self, c: &[C64], opts: SolverOptions) -> Result<LatentEval> {
        if c.len() != self.system.dim() {
            return Err(Error::Dimension(
                "coordinate vector has the wrong length".into(),
            ));
        }
        let mut re: Vec<f64> = c.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = c.iter().map(|z| z.im).collect();
        re[0] = 0.0;
        im[0] = 0.0;
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for v in re.iter_mut().chain(im.iter_mut()) {
            if v.abs() <= 1e-15 * scale {
                *v = 0.0;
            }
        }
        if re.iter().chain(&im).all(|v| *v == 0.0) {
            let p = self.compiled.latent;
            return Ok(LatentEval {
                value: 0.0,
                gap: 0.0,
                exact: true,
                w_re: vec![0.0; p],
                w_im: vec![0.0; p],
            });
        }
        self.compiled.eval(&re, &im, opts)
    }

    pub fn eval_coords(&self, c: &[C64]) -> Result<SeminormValue> {
        self.eval_coords_with(c, SolverOptions::default())
    }

    pub fn eval_herm(&self, c: &[f64]) -> Result<SeminormValue> {
        let cc: Vec<C64> = c.iter().map(|v| Complex::new(*v, 0.0)).collect();
        self.eval_coords(&cc)
    }

    /// Raw value without discarding the scalar coordinate.
    pub(crate) fn eval_raw(&self, c: &[f64]) -> Result<f64> {
        let zero = vec![0.0; c.len()];
        Ok(self
            .compiled
            .eval(c, &zero, SolverOptions::default())?
            .value)
    }

    pub fn eval(&self, x: &CMatrix) -> Result<SeminormValue> {
        self.eval_coords(&self.system.coords(x)?)
    }
}

/// `L(x)` for an element of the system.
pub fn eval_lip(l: &LipNorm, x: &CMatrix) -> Result<SeminormValue> {
    l.eval(x)
}

/// Number of angles in the `L^e` reduction grid.
pub const LE_ANGLES: usize = 32;

/// Bracket for the extended seminorm `L^e(x)`.
///
/// States are Hermitian functionals, so `|(s - w)(x)| = max_theta
/// (s - w)(Re(e^{-i theta} x))` and hence `L^e(x) = max_theta
/// L(cos(theta) Re x + sin(theta) Im x)`. The grid maximum `G` over
/// `LE_ANGLES` angles in `[0, pi)` is a lower bound, and since consecutive
/// angles differ by `h`, `L^e(x) <= G / (1 - 2 sin(h/4))`. The result is
/// intersected with `[max(L(Re x), L(Im x)), L(Re x) + L(Im x)]`.
pub fn eval_lip_e(l: &LipNorm, x: &CMatrix) -> Result<SeminormValue> {
    let c = l.system.coords(x)?;
    let re: Vec<f64> = c.iter().map(|z| z.re).collect();
    let im: Vec<f64> = c.iter().map(|z| z.im).collect();
    let lre = l.eval_herm(&re)?;
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if im.iter().skip(1).all(|v| v.abs() <= 1e-14 * (1.0 + scale)) {
        return Ok(lre);
    }
    let lim = l.eval_herm(&im)?;
    if re.iter().skip(1).all(|v| v.abs() <= 1e-14 * (1.0 + scale)) {
        return Ok(lim);
    }
    let h = std::f64::consts::PI / LE_ANGLES as f64;
    let mut g_lo: f64 = lre.lower.max(lim.lower);
    let mut g_val: f64 = lre.value.max(lim.value);
    let mut g_up: f64 = lre.upper.max(lim.upper);
    for j in 1..LE_ANGLES {
        let t = j as f64 * h;
        let (s, co) = t.sin_cos();
        let mix: Vec<f64> = re.iter().zip(&im).map(|(a, b)| co * a + s * b).collect();
        let v = l.eval_herm(&mix)?;
        g_lo = g_lo.max(v.lower);
        g_val = g_val.max(v.value);
        g_up = g_up.max(v.upper);
    }
    let upper = (g_up / (1.0 - 2.0 * (h / 4.0).sin())).min(lre.upper + lim.upper);
    let lower = g_lo.max(lre.lower).max(lim.lower);
    Ok(SeminormValue::bracket(lower, g_val.min(upper), upper))
}

/// `L^n(x) = max_ij L^e(x_ij)` for `x` in `M_n ⊗ X`.
pub fn eval_lip_n(l: &LipNorm, n: usize, x: &CMatrix) -> Result<SeminormValue> {
    let blocks = l.system.blocks(n, x)?;
    let mut out = SeminormValue::exact(0.0);
    for b in &blocks {
        let v = eval_lip_e(l, b)?;
        out.value = out.value.max(v.value);
        out.lower = out.lower.max(v.lower);
        out.upper = out.upper.max(v.upper);
        if v.kind == ValueKind::Bracketed {
            out.kind = ValueKind::Bracketed;
        }
    }
    if out.lower == out.upper {
        out.kind = ValueKind::Exact;
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
