//! Adadelta (Zeiler, 2012) over flat parameter buffers.
//!
//! Parameters are viewed as rows of `row_width` entries. A row whose
//! gradient is entirely zero is skipped: neither moved nor decayed. For the
//! embedding trainer this makes batches touching a subset of rows cost only
//! those rows; with `row_width == 1` every zero-gradient entry is skipped.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdadeltaConfig {
    /// Decay of both running averages, in (0, 1).
    pub rho: f64,
    pub eps: f64,
}

impl Default for AdadeltaConfig {
    fn default() -> Self {
        Self {
            rho: 0.95,
            eps: 1e-6,
        }
    }
}

impl AdadeltaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must be in (0,1), got {}", self.rho)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        Ok(())
    }
}

/// Running averages E[g^2] and E[dx^2], one entry per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Adadelta {
    config: AdadeltaConfig,
    row_width: usize,
    avg_sq_grad: Vec<f64>,
    avg_sq_update: Vec<f64>,
}

impl Adadelta {
    pub fn new(len: usize, row_width: usize, config: AdadeltaConfig) -> Result<Self> {
        config.validate()?;
        if row_width == 0 || len % row_width != 0 {
            return Err(Error::Shape(format!(
                "parameter length {len} is not a multiple of row width {row_width}"
            )));
        }
        Ok(Self {
            config,
            row_width,
            avg_sq_grad: vec![0.0; len],
            avg_sq_update: vec![0.0; len],
        })
    }

    pub fn config(&self) -> AdadeltaConfig {
        self.config
    }

    pub fn avg_sq_grad(&self) -> &[f64] {
        &self.avg_sq_grad
    }

    pub fn avg_sq_update(&self) -> &[f64] {
        &self.avg_sq_update
    }

    /// One step moving `params` along `grad` (maximization).
    pub fn ascend(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        self.step(params, grad, 1.0)
    }

    /// One step moving `params` against `grad` (minimization).
    pub fn descend(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        self.step(params, grad, -1.0)
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], sign: f64) -> Result<()> {
        if params.len() != self.avg_sq_grad.len() || grad.len() != params.len() {
            return Err(Error::Shape(format!(
                "optimizer holds {} entries, got params {} and gradient {}",
                self.avg_sq_grad.len(),
                params.len(),
                grad.len()
            )));
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        let AdadeltaConfig { rho, eps } = self.config;
        let w = self.row_width;
        for (row, g_row) in grad.chunks_exact(w).enumerate() {
            if g_row.iter().all(|&g| g == 0.0) {
                continue;
            }
            let base = row * w;
            for (k, &g) in g_row.iter().enumerate() {
                let i = base + k;
                let eg = rho * self.avg_sq_grad[i] + (1.0 - rho) * g * g;
                self.avg_sq_grad[i] = eg;
                let delta = ((self.avg_sq_update[i] + eps).sqrt() / (eg + eps).sqrt()) * g;
                params[i] += sign * delta;
                self.avg_sq_update[i] = rho * self.avg_sq_update[i] + (1.0 - rho) * delta * delta;
            }
        }
        Ok(())
    }
}
