use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::matrix::{complex_combination, CMatrix};
use crate::opsys::{CpMap, MapWire, OperatorSystem};
use crate::C64;

/// A bridge seminorm `N(x, y) = scale * ||left(x) - right(y)||` on `X ⊕ Y`,
/// with `left`, `right` linear maps into a common matrix space given by their
/// images of the Hermitian bases.
#[derive(Clone, Debug)]
pub struct Bridge {
    pub kind: BridgeKind,
    pub scale: f64,
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BridgeKind {
    /// `eps^{-1} ||x - y||` for subsystems of a common matrix algebra.
    Norm {
        epsilon: f64,
    },
    /// `eta^{-1} ||Phi(x) - y||`; `epsilon` is the caller's bound on
    /// `||Gamma(Phi(x)) - x||` over the Lip ball.
    Quotient {
        eta: f64,
        epsilon: f64,
    },
    /// `C^{-1} lambda ||x - mu 1||` towards the one-point system.
    Scaling {
        lambda: f64,
        c: f64,
    },
    /// `gamma^{-1} |sigma0(x) - omega0(y)|`; the diameters are the caller's
    /// estimates entering the bound.
    Point {
        gamma: f64,
        diam_x: f64,
        diam_y: f64,
    },
    General,
}

/// Serialized bridge; maps are given on the user bases of the summands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BridgeSpec {
    Norm {
        epsilon: f64,
    },
    Quotient {
        eta: f64,
        epsilon: f64,
        map: MapWire,
    },
    Scaling {
        lambda: f64,
        c: f64,
    },
    Point {
        gamma: f64,
        sigma0: MapWire,
        omega0: MapWire,
        diam_x: f64,
        diam_y: f64,
    },
    General {
        scale: f64,
        left: MapWire,
        right: MapWire,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return input(format!("{name} must be positive, got {v}"));
    }
    Ok(())
}

impl Bridge {
    pub fn norm(epsilon: f64, x: &OperatorSystem, y: &OperatorSystem) -> Result<Self> {
        positive("epsilon", epsilon)?;
        if x.ambient_dim() != y.ambient_dim() {
            return Err(Error::Dimension(
                "norm bridge needs a common ambient algebra".into(),
            ));
        }
        Ok(Self {
            kind: BridgeKind::Norm { epsilon },
            scale: 1.0 / epsilon,
            left: x.hermitian_basis().to_vec(),
            right: y.hermitian_basis().to_vec(),
        })
    }

    /// `phi : X -> Y` as a map into `Y`'s ambient algebra.
    pub fn quotient(eta: f64, epsilon: f64, phi: &CpMap, y: &OperatorSystem) -> Result<Self> {
        positive("eta", eta)?;
        if !(epsilon >= 0.0) {
            return input("epsilon must be nonnegative");
        }
        if phi.n() != y.ambient_dim() {
            return Err(Error::Dimension(
                "quotient map must land in Y's ambient algebra".into(),
            ));
        }
        Ok(Self {
            kind: BridgeKind::Quotient { eta, epsilon },
            scale: 1.0 / eta,
            left: phi.herm_images().to_vec(),
            right: y.hermitian_basis().to_vec(),
        })
    }

    pub fn scaling(lambda: f64, c: f64, x: &OperatorSystem) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("C", c)?;
        Ok(Self {
            kind: BridgeKind::Scaling { lambda, c },
            scale: lambda / c,
            left: x.hermitian_basis().to_vec(),
            right: vec![CMatrix::identity(x.ambient_dim())],
        })
    }

    /// States are level-one maps on the respective systems.
    pub fn point(
        gamma: f64,
        sigma0: &CpMap,
        omega0: &CpMap,
        diam_x: f64,
        diam_y: f64,
    ) -> Result<Self> {
        positive("gamma", gamma)?;
        if sigma0.n() != 1 || omega0.n() != 1 {
            return input("point bridge needs states");
        }
        Ok(Self {
            kind: BridgeKind::Point {
                gamma,
                diam_x,
                diam_y,
            },
            scale: 1.0 / gamma,
            left: sigma0.herm_images().to_vec(),
            right: omega0.herm_images().to_vec(),
        })
    }

    pub fn general(scale: f64, left: &CpMap, right: &CpMap) -> Result<Self> {
        positive("scale", scale)?;
        if left.n() != right.n() {
            return Err(Error::Dimension("bridge maps must share a codomain".into()));
        }
        Ok(Self {
            kind: BridgeKind::General,
            scale,
            left: left.herm_images().to_vec(),
            right: right.herm_images().to_vec(),
        })
    }

    pub fn from_spec(spec: &BridgeSpec, x: &OperatorSystem, y: &OperatorSystem) -> Result<Self> {
        match spec {
            BridgeSpec::Norm { epsilon } => Self::norm(*epsilon, x, y),
            BridgeSpec::Quotient { eta, epsilon, map } => {
                let phi = CpMap::from_basis_images(x, map.n, map.images.clone())?;
                Self::quotient(*eta, *epsilon, &phi, y)
            }
            BridgeSpec::Scaling { lambda, c } => {
                if y.dim() != 1 {
                    return input("scaling bridge targets the one-point system");
                }
                Self::scaling(*lambda, *c, x)
            }
            BridgeSpec::Point {
                gamma,
                sigma0,
                omega0,
                diam_x,
                diam_y,
            } => {
                let s = CpMap::from_basis_images(x, sigma0.n, sigma0.images.clone())?;
                let o = CpMap::from_basis_images(y, omega0.n, omega0.images.clone())?;
                Self::point(*gamma, &s, &o, *diam_x, *diam_y)
            }
            BridgeSpec::General { scale, left, right } => {
                let l = CpMap::from_basis_images(x, left.n, left.images.clone())?;
                let r = CpMap::from_basis_images(y, right.n, right.images.clone())?;
                Self::general(*scale, &l, &r)
            }
        }
    }

    pub fn to_spec(&self, x: &OperatorSystem, y: &OperatorSystem) -> BridgeSpec {
        let wire = |sys: &OperatorSystem, herm: &[CMatrix]| {
            let m = CpMap::from_herm_images(sys, herm[0].rows(), herm.to_vec())
                .expect("dimensions agree");
            m.to_wire()
        };
        match &self.kind {
            BridgeKind::Norm { epsilon } => BridgeSpec::Norm { epsilon: *epsilon },
            BridgeKind::Quotient { eta, epsilon } => BridgeSpec::Quotient {
                eta: *eta,
                epsilon: *epsilon,
                map: wire(x, &self.left),
            },
            BridgeKind::Scaling { lambda, c } => BridgeSpec::Scaling {
                lambda: *lambda,
                c: *c,
            },
            BridgeKind::Point {
                gamma,
                diam_x,
                diam_y,
            } => BridgeSpec::Point {
                gamma: *gamma,
                sigma0: wire(x, &self.left),
                omega0: wire(y, &self.right),
                diam_x: *diam_x,
                diam_y: *diam_y,
            },
            BridgeKind::General => BridgeSpec::General {
                scale: self.scale,
                left: wire(x, &self.left),
                right: wire(y, &self.right),
            },
        }
    }

    /// `N` at complex Hermitian coordinates of `x` and `y`.
    pub fn eval_coords(&self, cx: &[C64], cy: &[C64]) -> f64 {
        let d = &complex_combination(cx, &self.left) - &complex_combination(cy, &self.right);
        self.scale * d.operator_norm_unchecked()
    }

    pub fn eval(
        &self,
        x_sys: &OperatorSystem,
        y_sys: &OperatorSystem,
        x: &CMatrix,
        y: &CMatrix,
    ) -> Result<f64> {
        Ok(self.eval_coords(&x_sys.coords(x)?, &y_sys.coords(y)?))
    }

    /// The uniform distance bound proved for the named constructions.
    pub fn analytic_bound(&self) -> Option<f64> {
        match self.kind {
            BridgeKind::Norm { epsilon } => Some(epsilon),
            BridgeKind::Quotient { eta, epsilon } => Some(epsilon + eta),
            BridgeKind::Scaling { lambda, c } => Some(c / lambda),
            BridgeKind::Point {
                gamma,
                diam_x,
                diam_y,
            } => Some(diam_x + diam_y + gamma),
            BridgeKind::General => None,
        }
    }

    /// Condition (i): `N(1, 1) = 0` and `N(1, 0) != 0`.
    pub fn condition_i(&self, x: &OperatorSystem, y: &OperatorSystem) -> (f64, f64) {
        let mut one_x = vec![C64::new(0.0, 0.0); x.dim()];
        one_x[0] = C64::new(1.0, 0.0);
        let mut one_y = vec![C64::new(0.0, 0.0); y.dim()];
        one_y[0] = C64::new(1.0, 0.0);
        let zero_y = vec![C64::new(0.0, 0.0); y.dim()];
        (
            self.eval_coords(&one_x, &one_y),
            self.eval_coords(&one_x, &zero_y),
        )
    }
}
