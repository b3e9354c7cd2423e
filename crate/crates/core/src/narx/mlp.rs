use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// One-hidden-layer network `out_w . tanh(hidden_w z + hidden_b) + out_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// `hidden x inputs`.
    pub hidden_w: DMatrix<f64>,
    pub hidden_b: DVector<f64>,
    pub out_w: DVector<f64>,
    pub out_b: f64,
}

impl Mlp {
    pub fn zeros(hidden: usize, inputs: usize) -> Self {
        Self {
            hidden_w: DMatrix::zeros(hidden, inputs),
            hidden_b: DVector::zeros(hidden),
            out_w: DVector::zeros(hidden),
            out_b: 0.0,
        }
    }

    /// Every weight and bias uniform in `[-scale, scale]`, drawn in flattened order.
    pub fn random<R: Rng + ?Sized>(hidden: usize, inputs: usize, scale: f64, rng: &mut R) -> Self {
        let mut net = Self::zeros(hidden, inputs);
        let values: Vec<f64> = (0..net.param_count())
            .map(|_| rng.random_range(-scale..=scale))
            .collect();
        net.set_params(&values);
        net
    }

    pub fn hidden(&self) -> usize {
        self.hidden_b.len()
    }

    pub fn inputs(&self) -> usize {
        self.hidden_w.ncols()
    }

    /// `hidden * inputs + 2 * hidden + 1`.
    pub fn param_count(&self) -> usize {
        let h = self.hidden();
        h * self.inputs() + 2 * h + 1
    }

    fn check(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                found: z.len(),
            });
        }
        Ok(())
    }

    fn activations(&self, z: &[f64]) -> Vec<f64> {
        (0..self.hidden())
            .map(|i| {
                let mut s = self.hidden_b[i];
                for (j, zj) in z.iter().enumerate() {
                    s += self.hidden_w[(i, j)] * zj;
                }
                s.tanh()
            })
            .collect()
    }

    pub fn forward(&self, z: &[f64]) -> Result<f64> {
        self.check(z)?;
        Ok(self.forward_unchecked(z))
    }

    pub(crate) fn forward_unchecked(&self, z: &[f64]) -> f64 {
        let h = self.activations(z);
        let mut acc = 0.0;
        for (hi, wi) in h.iter().zip(self.out_w.iter()) {
            acc += wi * hi;
        }
        acc + self.out_b
    }

    /// Output and its gradient with respect to the flattened parameters,
    /// written into `grad` (length [`Mlp::param_count`]) scaled by `scale`.
    pub(crate) fn forward_with_grad(&self, z: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let (nh, ni) = (self.hidden(), self.inputs());
        let h = self.activations(z);
        let mut acc = 0.0;
        for i in 0..nh {
            acc += self.out_w[i] * h[i];
            let back = self.out_w[i] * (1.0 - h[i] * h[i]) * scale;
            for j in 0..ni {
                grad[i * ni + j] = back * z[j];
            }
            grad[nh * ni + i] = back;
            grad[nh * ni + nh + i] = h[i] * scale;
        }
        grad[nh * ni + 2 * nh] = scale;
        acc + self.out_b
    }

    /// Upper bound on `|forward(z)|` for every input.
    pub fn output_bound(&self) -> f64 {
        self.out_w.iter().map(|w| w.abs()).sum::<f64>() + self.out_b.abs()
    }

    /// `[hidden_w row-major, hidden_b, out_w, out_b]`.
    pub fn params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        for i in 0..self.hidden() {
            v.extend(self.hidden_w.row(i).iter());
        }
        v.extend(self.hidden_b.iter());
        v.extend(self.out_w.iter());
        v.push(self.out_b);
        v
    }

    /// Inverse of [`Mlp::params`]; `values` must hold exactly `param_count` entries.
    pub fn set_params(&mut self, values: &[f64]) {
        let (nh, ni) = (self.hidden(), self.inputs());
        assert_eq!(values.len(), self.param_count());
        for i in 0..nh {
            for j in 0..ni {
                self.hidden_w[(i, j)] = values[i * ni + j];
            }
        }
        let rest = &values[nh * ni..];
        for i in 0..nh {
            self.hidden_b[i] = rest[i];
            self.out_w[i] = rest[nh + i];
        }
        self.out_b = rest[2 * nh];
    }
}
