use ndarray::{Array1, Array2, Zip};
use serde::{Deserialize, Serialize};

/// Every trainable array of a model: embedding slots and per-direction bias
/// vectors. Gradients and Adam moments reuse the same container so shapes
/// line up by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embeddings: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Params {
    pub fn zeros_like(other: &Params) -> Self {
        Self {
            embeddings: other
                .embeddings
                .iter()
                .map(|e| Array2::zeros(e.raw_dim()))
                .collect(),
            biases: other.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn same_shape(&self, other: &Params) -> bool {
        self.embeddings.len() == other.embeddings.len()
            && self.biases.len() == other.biases.len()
            && self
                .embeddings
                .iter()
                .zip(&other.embeddings)
                .all(|(a, b)| a.dim() == b.dim())
            && self.biases.iter().zip(&other.biases).all(|(a, b)| a.len() == b.len())
    }

    pub fn num_values(&self) -> usize {
        self.embeddings.iter().map(Array2::len).sum::<usize>()
            + self.biases.iter().map(Array1::len).sum::<usize>()
    }

    /// All values in a fixed order: embedding slots row-major, then biases.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.embeddings
            .iter()
            .flat_map(|e| e.iter().copied())
            .chain(self.biases.iter().flat_map(|b| b.iter().copied()))
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for e in &mut self.embeddings {
            e.iter_mut().for_each(&mut f);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(&mut f);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.values().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.values().all(f64::is_finite)
    }

    pub fn scale(&mut self, factor: f64) {
        self.for_each_mut(|x| *x *= factor);
    }

    /// Adds `other` into `self` elementwise.
    pub fn accumulate(&mut self, other: &Params) {
        for (a, b) in self.embeddings.iter_mut().zip(&other.embeddings) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }
}

/// Scales `grads` so their joint L2 norm is at most `clip_norm`.
///
/// Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut Params, clip_norm: f64) -> f64 {
    assert!(clip_norm > 0.0, "clip_norm must be positive");
    let norm = grads.global_norm();
    if norm > clip_norm {
        grads.scale(clip_norm / norm);
    }
    norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Params,
    pub v: Params,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &Params) -> Self {
        Self {
            m: Params::zeros_like(params),
            v: Params::zeros_like(params),
            t: 0,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut Params, grads: &Params, lr: f64, cfg: &AdamConfig) {
        assert!(
            self.m.same_shape(params) && grads.same_shape(params),
            "optimizer state does not match parameters"
        );
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let (b1, b2, eps) = (cfg.beta1, cfg.beta2, cfg.eps);

        let update = |p: &mut f64, g: &f64, m: &mut f64, v: &mut f64| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        };

        for (i, p) in params.embeddings.iter_mut().enumerate() {
            Zip::from(p)
                .and(&grads.embeddings[i])
                .and(&mut self.m.embeddings[i])
                .and(&mut self.v.embeddings[i])
                .for_each(update);
        }
        for (i, p) in params.biases.iter_mut().enumerate() {
            Zip::from(p)
                .and(&grads.biases[i])
                .and(&mut self.m.biases[i])
                .and(&mut self.v.biases[i])
                .for_each(update);
        }
    }
}
