//! Minimal dense MLP with tanh hidden layers and exact reverse-mode
//! gradients. Parameters expose a flat view for the optimizer, the
//! checkpoint format, and finite-difference checking.

use rand::Rng;

use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// Layer widths, input first: e.g. `[25, 64, 64, 12]`.
    pub sizes: Vec<usize>,
    /// Row-major `(out, in)` weight matrices per layer.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Post-activation values per layer from one forward pass; `acts[0]` is the
/// input, `acts.last()` the linear output.
#[derive(Debug, Clone)]
pub struct MlpCache {
    pub acts: Vec<Vec<f64>>,
}

/// Gradient accumulator shaped like the MLP parameters.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub d_weights: Vec<Vec<f64>>,
    pub d_biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// Xavier-uniform weights, zero biases, drawn deterministically from
    /// `rng`.
    pub fn init(sizes: &[usize], rng: &mut RandomStream) -> Mlp {
        assert!(sizes.len() >= 2, "mlp needs input and output sizes");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-s..=s))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Mlp {
            sizes: sizes.to_vec(),
            weights,
            biases,
        }
    }

    pub fn zeros(sizes: &[usize]) -> Mlp {
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..sizes.len() - 1 {
            weights.push(vec![0.0; sizes[l] * sizes[l + 1]]);
            biases.push(vec![0.0; sizes[l + 1]]);
        }
        Mlp {
            sizes: sizes.to_vec(),
            weights,
            biases,
        }
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn n_params(&self) -> usize {
        (0..self.n_layers())
            .map(|l| self.sizes[l] * self.sizes[l + 1] + self.sizes[l + 1])
            .sum()
    }

    /// Forward pass caching every post-activation; hidden layers are tanh,
    /// the last layer is linear.
    pub fn forward(&self, input: &[f64]) -> MlpCache {
        assert_eq!(input.len(), self.sizes[0], "input size mismatch");
        let mut acts = Vec::with_capacity(self.sizes.len());
        acts.push(input.to_vec());
        for l in 0..self.n_layers() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let x = &acts[l];
            let w = &self.weights[l];
            let b = &self.biases[l];
            let mut y = vec![0.0; n_out];
            for o in 0..n_out {
                let mut z = b[o];
                let row = &w[o * n_in..(o + 1) * n_in];
                for i in 0..n_in {
                    z += row[i] * x[i];
                }
                y[o] = if l < self.n_layers() - 1 { z.tanh() } else { z };
            }
            acts.push(y);
        }
        MlpCache { acts }
    }

    pub fn output<'a>(&self, cache: &'a MlpCache) -> &'a [f64] {
        cache.acts.last().expect("cache from forward")
    }

    /// Accumulates parameter gradients for upstream gradient `d_out` on the
    /// cached forward pass.
    pub fn backward(&self, cache: &MlpCache, d_out: &[f64], grads: &mut MlpGrads) {
        let last = self.n_layers() - 1;
        assert_eq!(d_out.len(), self.sizes[last + 1], "d_out size mismatch");
        let mut d_cur = d_out.to_vec();
        for l in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let x = &cache.acts[l];
            let y = &cache.acts[l + 1];
            // dL/dz: tanh derivative on hidden layers, identity on output.
            let mut dz = d_cur;
            if l < last {
                for (g, &yo) in dz.iter_mut().zip(y.iter()) {
                    *g *= 1.0 - yo * yo;
                }
            }
            let dw = &mut grads.d_weights[l];
            let db = &mut grads.d_biases[l];
            for o in 0..n_out {
                db[o] += dz[o];
                let row = &mut dw[o * n_in..(o + 1) * n_in];
                for i in 0..n_in {
                    row[i] += dz[o] * x[i];
                }
            }
            if l == 0 {
                break;
            }
            let w = &self.weights[l];
            let mut d_prev = vec![0.0; n_in];
            for o in 0..n_out {
                let row = &w[o * n_in..(o + 1) * n_in];
                for i in 0..n_in {
                    d_prev[i] += dz[o] * row[i];
                }
            }
            d_cur = d_prev;
        }
    }

    pub fn grads(&self) -> MlpGrads {
        MlpGrads {
            d_weights: self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            d_biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn flatten_into(&self, out: &mut Vec<f64>) {
        for l in 0..self.n_layers() {
            out.extend_from_slice(&self.weights[l]);
            out.extend_from_slice(&self.biases[l]);
        }
    }

    pub fn set_from_flat(&mut self, flat: &[f64]) -> usize {
        let mut k = 0;
        for l in 0..self.n_layers() {
            let wl = self.weights[l].len();
            self.weights[l].copy_from_slice(&flat[k..k + wl]);
            k += wl;
            let bl = self.biases[l].len();
            self.biases[l].copy_from_slice(&flat[k..k + bl]);
            k += bl;
        }
        k
    }
}

impl MlpGrads {
    pub fn zero(&mut self) {
        for w in &mut self.d_weights {
            w.fill(0.0);
        }
        for b in &mut self.d_biases {
            b.fill(0.0);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for w in &mut self.d_weights {
            for v in w.iter_mut() {
                *v *= s;
            }
        }
        for b in &mut self.d_biases {
            for v in b.iter_mut() {
                *v *= s;
            }
        }
    }

    /// `self += s * other`, elementwise.
    pub fn axpy(&mut self, s: f64, other: &MlpGrads) {
        for (a, b) in self.d_weights.iter_mut().zip(&other.d_weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
        for (a, b) in self.d_biases.iter_mut().zip(&other.d_biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }

    pub fn flatten_into(&self, out: &mut Vec<f64>) {
        for l in 0..self.d_weights.len() {
            out.extend_from_slice(&self.d_weights[l]);
            out.extend_from_slice(&self.d_biases[l]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn zero_network_outputs_bias() {
        let mlp = Mlp::zeros(&[4, 8, 3]);
        let cache = mlp.forward(&[1.0, -2.0, 0.5, 0.0]);
        assert_eq!(mlp.output(&cache), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = substream(0, "mlp", 0);
        let mlp = Mlp::init(&[5, 16, 2], &mut rng);
        let x = [0.1, -0.2, 0.3, 0.0, 1.0];
        let a = mlp.forward(&x);
        let b = mlp.forward(&x);
        assert_eq!(mlp.output(&a), mlp.output(&b));
    }

    #[test]
    fn flat_round_trip() {
        let mut rng = substream(1, "mlp", 0);
        let mlp = Mlp::init(&[3, 7, 2], &mut rng);
        let mut flat = Vec::new();
        mlp.flatten_into(&mut flat);
        assert_eq!(flat.len(), mlp.n_params());
        let mut other = Mlp::zeros(&[3, 7, 2]);
        let used = other.set_from_flat(&flat);
        assert_eq!(used, flat.len());
        assert_eq!(other, mlp);
    }

    #[test]
    fn quadratic_gradient_matches() {
        // loss = 0.5 * ||f(x)||^2 with upstream gradient f(x).
        let mut rng = substream(2, "mlp", 0);
        let mlp = Mlp::init(&[3, 6, 2], &mut rng);
        let x = [0.4, -0.1, 0.9];
        let cache = mlp.forward(&x);
        let out = mlp.output(&cache).to_vec();
        let mut grads = mlp.grads();
        mlp.backward(&cache, &out, &mut grads);

        let mut flat = Vec::new();
        mlp.flatten_into(&mut flat);
        let mut gflat = Vec::new();
        grads.flatten_into(&mut gflat);

        let eps = 1e-6;
        for idx in [0usize, 5, 11, flat.len() - 1] {
            let mut probe = mlp.clone();
            let mut p = flat.clone();
            p[idx] += eps;
            probe.set_from_flat(&p);
            let lp: f64 = probe
                .output(&probe.forward(&x))
                .iter()
                .map(|v| 0.5 * v * v)
                .sum();
            p[idx] -= 2.0 * eps;
            probe.set_from_flat(&p);
            let lm: f64 = probe
                .output(&probe.forward(&x))
                .iter()
                .map(|v| 0.5 * v * v)
                .sum();
            let numeric = (lp - lm) / (2.0 * eps);
            assert!(
                (numeric - gflat[idx]).abs() <= 1e-7 * numeric.abs().max(1.0),
                "idx {idx}: numeric {numeric} vs analytic {}",
                gflat[idx]
            );
        }
    }
}
