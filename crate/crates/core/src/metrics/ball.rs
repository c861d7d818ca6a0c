use crate::convex::{max_linear_over_ball, AffineMatrix, SolverOptions};
use crate::error::Result;
use crate::lipnorms::LipNorm;
use crate::real::dot;

/// The unit ball `D_1(L)` of a Lip-norm, on Hermitian coordinates.
pub struct LipBall<'a> {
    lip: &'a LipNorm,
    terms: Vec<AffineMatrix>,
    pub opts: SolverOptions,
}

/// `sup { ell . c : L(c) <= 1 }` together with a feasible maximizer.
#[derive(Clone, Debug)]
pub struct Support {
    /// Attained at `point`; the supremum is at most `value + gap`.
    pub value: f64,
    pub gap: f64,
    pub point: Vec<f64>,
}

impl<'a> LipBall<'a> {
    pub fn new(lip: &'a LipNorm) -> Self {
        Self {
            lip,
            terms: lip.compiled().ball_terms(),
            opts: SolverOptions::default(),
        }
    }

    pub fn lip(&self) -> &LipNorm {
        self.lip
    }

    pub fn dim(&self) -> usize {
        self.lip.system().dim()
    }

    /// The scalar coordinate of `ell` is ignored (the ball is unbounded along
    /// the identity).
    pub fn support(&self, ell: &[f64]) -> Result<Support> {
        let comp = self.lip.compiled();
        let mut e = ell.to_vec();
        e[0] = 0.0;
        let lat = comp.proj.tmul_vec(&e);
        if lat.iter().all(|v| v.abs() < 1e-300) {
            return Ok(Support {
                value: 0.0,
                gap: 0.0,
                point: vec![0.0; e.len()],
            });
        }
        let sol = max_linear_over_ball(&self.terms, &lat, self.opts)?;
        let mut point = comp.proj.mul_vec(&sol.w);
        point[0] = 0.0;
        Ok(Support {
            value: dot(&e, &point),
            gap: sol.gap,
            point,
        })
    }

    /// Scales Hermitian coordinates into the ball (`L = 1` unless `L = 0`).
    pub fn normalize(&self, c: &[f64]) -> Result<Option<Vec<f64>>> {
        let mut c = c.to_vec();
        c[0] = 0.0;
        let l = self.lip.eval_herm(&c)?.upper;
        if !(l > 1e-12) {
            return Ok(None);
        }
        Ok(Some(c.iter().map(|v| v / l).collect()))
    }
}
