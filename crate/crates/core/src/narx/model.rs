use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::Mlp;
use crate::error::{Error, Result};

/// Output lags in the regressor.
pub const N_Y: usize = 7;
/// Input lags in the regressor.
pub const N_U: usize = 6;
/// Regressor length.
pub const N_IN: usize = N_Y + N_U;
/// Hidden units per network unless configured otherwise.
pub const DEFAULT_HIDDEN: usize = 5;
/// Half-width of the uniform initialization interval.
pub const INIT_SCALE: f64 = 0.5;

/// Joint parameter vector of both networks, f-net first.
pub type ThetaVector = DVector<f64>;

/// `[y(k), ..., y(k-6), u(k-1), ..., u(k-6)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regressor(pub [f64; N_IN]);

impl Regressor {
    /// Builds `z(k)` from newest-first histories; extra entries are ignored.
    pub fn from_history(y_newest_first: &[f64], u_newest_first: &[f64]) -> Result<Self> {
        if y_newest_first.len() < N_Y {
            return Err(Error::InsufficientHistory {
                needed: N_Y,
                have: y_newest_first.len(),
            });
        }
        if u_newest_first.len() < N_U {
            return Err(Error::InsufficientHistory {
                needed: N_U,
                have: u_newest_first.len(),
            });
        }
        let mut z = [0.0; N_IN];
        z[..N_Y].copy_from_slice(&y_newest_first[..N_Y]);
        z[N_Y..].copy_from_slice(&u_newest_first[..N_U]);
        Ok(Self(z))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// One training pair: regressor, applied input and the next output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub z: Regressor,
    pub u: f64,
    pub y_next: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Affine predictor `y(k+1) = f(z) + g(z) u(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NarxModel {
    pub f: Mlp,
    pub g: Mlp,
}

impl NarxModel {
    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            f: Mlp::zeros(p, N_IN),
            g: Mlp::zeros(q, N_IN),
        }
    }

    /// Uniform `[-0.5, 0.5]` initialization from a seeded ChaCha8 stream, f-net first.
    pub fn random(p: usize, q: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Mlp::random(p, N_IN, INIT_SCALE, &mut rng);
        let g = Mlp::random(q, N_IN, INIT_SCALE, &mut rng);
        Self { f, g }
    }

    pub fn param_count(&self) -> usize {
        self.f.param_count() + self.g.param_count()
    }

    pub fn theta(&self) -> ThetaVector {
        let mut v = self.f.params();
        v.extend(self.g.params());
        DVector::from_vec(v)
    }

    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                found: theta.len(),
            });
        }
        let nf = self.f.param_count();
        self.f.set_params(&theta[..nf]);
        self.g.set_params(&theta[nf..]);
        Ok(())
    }

    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        let mut m = self.clone();
        m.set_theta(theta)?;
        Ok(m)
    }

    /// `(f(z), g(z))`.
    pub fn components(&self, z: &Regressor) -> (f64, f64) {
        (
            self.f.forward_unchecked(z.as_slice()),
            self.g.forward_unchecked(z.as_slice()),
        )
    }

    pub fn predict(&self, z: &Regressor, u: f64) -> f64 {
        let (f, g) = self.components(z);
        f + g * u
    }

    /// Prediction and its gradient with respect to the joint parameter vector.
    pub fn predict_with_jacobian(&self, z: &Regressor, u: f64) -> (f64, ThetaVector) {
        let nf = self.f.param_count();
        let mut grad = DVector::zeros(self.param_count());
        let slice = grad.as_mut_slice();
        let f = self
            .f
            .forward_with_grad(z.as_slice(), 1.0, &mut slice[..nf]);
        let g = self.g.forward_with_grad(z.as_slice(), u, &mut slice[nf..]);
        (f + g * u, grad)
    }

    /// `(1/2N) sum (y_next - y_hat)^2`.
    pub fn mse_cost(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let sse: f64 = data
            .records
            .iter()
            .map(|r| {
                let e = self.predict(&r.z, r.u) - r.y_next;
                e * e
            })
            .sum();
        Ok(sse / (2.0 * data.len() as f64))
    }
}

/// `f(z) + g(z) u`.
pub fn narx_predict(model: &NarxModel, z: &Regressor, u: f64) -> f64 {
    model.predict(z, u)
}

/// Gradient of the prediction with respect to [`NarxModel::theta`].
pub fn weight_jacobian(model: &NarxModel, z: &Regressor, u: f64) -> ThetaVector {
    model.predict_with_jacobian(z, u).1
}

pub fn mse_cost(model: &NarxModel, data: &Dataset) -> Result<f64> {
    model.mse_cost(data)
}
