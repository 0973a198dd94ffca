use serde::{Deserialize, Serialize};

use super::design::Design;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// `log(1 + exp(-m))`
    Logistic,
    /// `max(0, 1 - m)²`
    SquaredHinge,
}

impl Loss {
    /// Loss at margin `m = t·(wᵀx + w0)`.
    pub fn value(self, m: f64) -> f64 {
        match self {
            Loss::Logistic => {
                if m > 0.0 {
                    (-m).exp().ln_1p()
                } else {
                    -m + m.exp().ln_1p()
                }
            }
            Loss::SquaredHinge => {
                let h = (1.0 - m).max(0.0);
                h * h
            }
        }
    }

    /// d loss / d m.
    pub fn derivative(self, m: f64) -> f64 {
        match self {
            Loss::Logistic => {
                if m > 0.0 {
                    let e = (-m).exp();
                    -e / (1.0 + e)
                } else {
                    -1.0 / (1.0 + m.exp())
                }
            }
            Loss::SquaredHinge => -2.0 * (1.0 - m).max(0.0),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Loss::Logistic => "LR",
            Loss::SquaredHinge => "LSVM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `‖w‖₁`
    L1,
    /// `‖w‖₂²`
    L2,
}

impl PenaltyKind {
    pub fn short_name(self) -> &'static str {
        match self {
            PenaltyKind::L1 => "L1",
            PenaltyKind::L2 => "L2",
        }
    }
}

/// Regularization of `J(w) = C·Σ loss + λ·R(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub kind: PenaltyKind,
    pub lambda: f64,
    #[serde(rename = "C")]
    pub cost: f64,
    /// Apply the penalty to the intercept as well, as if it were the weight
    /// of a constant feature. Off by default.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub penalize_intercept: bool,
}

impl Penalty {
    pub fn new(kind: PenaltyKind, lambda: f64, cost: f64) -> Result<Self> {
        let p = Penalty {
            kind,
            lambda,
            cost,
            penalize_intercept: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("λ must be positive, got {}", self.lambda)));
        }
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.cost)));
        }
        Ok(())
    }

    pub fn with_penalized_intercept(mut self, on: bool) -> Self {
        self.penalize_intercept = on;
        self
    }

    /// `λ·R(w)`.
    pub fn value(&self, w: &[f64]) -> f64 {
        let r: f64 = match self.kind {
            PenaltyKind::L1 => w.iter().map(|x| x.abs()).sum(),
            PenaltyKind::L2 => w.iter().map(|x| x * x).sum(),
        };
        self.lambda * r
    }

    /// Proximal map of `step·λ·R` applied in place.
    pub fn prox(&self, w: &mut [f64], step: f64) {
        match self.kind {
            PenaltyKind::L1 => {
                let t = step * self.lambda;
                for x in w.iter_mut() {
                    *x = if *x > t {
                        *x - t
                    } else if *x < -t {
                        *x + t
                    } else {
                        0.0
                    };
                }
            }
            PenaltyKind::L2 => {
                let s = 1.0 / (1.0 + 2.0 * step * self.lambda);
                w.iter_mut().for_each(|x| *x *= s);
            }
        }
    }
}

/// A binary problem: design matrix, ±1 targets and the regularized objective.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub design: &'a Design,
    pub targets: &'a [f64],
    pub loss: Loss,
    pub penalty: Penalty,
}

impl Problem<'_> {
    /// `C·Σ loss(t_i (wᵀx_i + b))`.
    pub fn smooth_value(&self, w: &[f64], b: f64) -> f64 {
        let sum: f64 = (0..self.design.n_rows())
            .map(|i| self.loss.value(self.targets[i] * (self.design.row_dot(i, w) + b)))
            .sum();
        self.penalty.cost * sum
    }

    /// Smooth value and gradient; `grad_w` is overwritten, the intercept
    /// gradient is returned.
    pub fn smooth_gradient(&self, w: &[f64], b: f64, grad_w: &mut [f64]) -> (f64, f64) {
        let n = self.design.n_rows();
        let mut value = 0.0;
        let mut residual = vec![0.0; n];
        for i in 0..n {
            let t = self.targets[i];
            let m = t * (self.design.row_dot(i, w) + b);
            value += self.loss.value(m);
            residual[i] = self.penalty.cost * t * self.loss.derivative(m);
        }
        self.design.transpose_mul(&residual, grad_w);
        (self.penalty.cost * value, residual.iter().sum())
    }

    /// `λ·R(b)` when the intercept is penalized, else 0.
    pub fn intercept_penalty(&self, b: f64) -> f64 {
        if self.penalty.penalize_intercept {
            self.penalty.value(&[b])
        } else {
            0.0
        }
    }

    /// Full objective `J(w, b)`.
    pub fn objective(&self, w: &[f64], b: f64) -> f64 {
        self.smooth_value(w, b) + self.penalty.value(w) + self.intercept_penalty(b)
    }

    /// Gradient of `J`, using `λ·sign(w_i)` for L1 (0 at w_i = 0).
    pub fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut g = vec![0.0; w.len()];
        let (_, mut gb) = self.smooth_gradient(w, b, &mut g);
        let lambda = self.penalty.lambda;
        let d = |x: f64| match self.penalty.kind {
            PenaltyKind::L2 => 2.0 * lambda * x,
            PenaltyKind::L1 => lambda * if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 },
        };
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi += d(*wi);
        }
        if self.penalty.penalize_intercept {
            gb += d(b);
        }
        (g, gb)
    }
}
