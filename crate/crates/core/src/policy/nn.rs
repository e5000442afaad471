//! Minimal dense feed-forward network with tanh hidden activations,
//! analytic backpropagation, and an Adam optimizer.
//!
//! Parameters live in one flat `Vec<f64>` (per layer: weights row-major,
//! then biases), which keeps optimizer state, checkpointing, and
//! finite-difference checks straightforward.

use rand::Rng;

/// Fully connected network. `dims` lists layer widths from input to
/// output; hidden layers apply tanh, the final layer is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    params: Vec<f64>,
    /// Per linear layer: (weight offset, bias offset) into `params`.
    offsets: Vec<(usize, usize)>,
}

/// Forward activations retained for backpropagation. `acts[0]` is the
/// input; `acts[l + 1]` is layer `l`'s output after its activation.
pub struct Tape {
    acts: Vec<Vec<f64>>,
}

impl Mlp {
    /// Layer offsets for a dims list; returns (offsets, total length).
    fn layout(dims: &[usize]) -> (Vec<(usize, usize)>, usize) {
        let mut offsets = Vec::with_capacity(dims.len() - 1);
        let mut cursor = 0;
        for l in 0..dims.len() - 1 {
            let (rows, cols) = (dims[l + 1], dims[l]);
            offsets.push((cursor, cursor + rows * cols));
            cursor += rows * cols + rows;
        }
        (offsets, cursor)
    }

    /// Initialize with orthogonal-style scaled random weights and zero
    /// biases. With `zero_final`, the last layer starts at zero so the
    /// initial policy is uniform (or the initial value estimate zero).
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R, zero_final: bool) -> Mlp {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let (offsets, len) = Self::layout(dims);
        let mut net = Mlp { dims: dims.to_vec(), params: vec![0.0; len], offsets };
        let n_layers = dims.len() - 1;
        for l in 0..n_layers {
            if zero_final && l == n_layers - 1 {
                continue;
            }
            let (rows, cols) = (dims[l + 1], dims[l]);
            // 5/3 is the usual tanh gain.
            let gain = if l == n_layers - 1 { 1.0 } else { 5.0 / 3.0 };
            let w = orthogonal_matrix(rows, cols, gain, rng);
            let (w_off, _) = net.offsets[l];
            net.params[w_off..w_off + rows * cols].copy_from_slice(&w);
        }
        net
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Build directly from a flat parameter vector (checkpoint restore).
    pub fn from_params(dims: &[usize], params: Vec<f64>) -> Mlp {
        let (offsets, len) = Self::layout(dims);
        assert_eq!(params.len(), len, "parameter count mismatch for dims {dims:?}");
        Mlp { dims: dims.to_vec(), params, offsets }
    }

    fn layer(&self, l: usize) -> (&[f64], &[f64], usize, usize) {
        let (rows, cols) = (self.dims[l + 1], self.dims[l]);
        let (w_off, b_off) = self.offsets[l];
        (&self.params[w_off..w_off + rows * cols], &self.params[b_off..b_off + rows], rows, cols)
    }

    /// Plain forward pass.
    ///
    /// # Panics
    /// If `input.len()` does not match the input dimension.
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_cached(input).0
    }

    /// Forward pass retaining activations for a later backward pass.
    pub fn forward_cached(&self, input: &[f64]) -> (Vec<f64>, Tape) {
        assert_eq!(input.len(), self.dims[0], "observation length mismatch");
        let n_layers = self.dims.len() - 1;
        let mut acts = Vec::with_capacity(n_layers + 1);
        acts.push(input.to_vec());
        for l in 0..n_layers {
            let (w, b, rows, cols) = self.layer(l);
            let x = &acts[l];
            let mut y = Vec::with_capacity(rows);
            for r in 0..rows {
                let row = &w[r * cols..(r + 1) * cols];
                let mut sum = b[r];
                for (wi, xi) in row.iter().zip(x.iter()) {
                    sum += wi * xi;
                }
                y.push(if l + 1 < n_layers { sum.tanh() } else { sum });
            }
            acts.push(y);
        }
        let out = acts.last().unwrap().clone();
        (out, Tape { acts })
    }

    /// Accumulate parameter gradients for `d loss / d output = dout` into
    /// `grads` (same layout as `params`).
    pub fn backward(&self, tape: &Tape, dout: &[f64], grads: &mut [f64]) {
        assert_eq!(grads.len(), self.params.len());
        let n_layers = self.dims.len() - 1;
        assert_eq!(dout.len(), self.dims[n_layers]);
        let mut dz = dout.to_vec();
        for l in (0..n_layers).rev() {
            let (w, _, rows, cols) = self.layer(l);
            let (w_off, b_off) = self.offsets[l];
            let x = &tape.acts[l];
            for r in 0..rows {
                let g = dz[r];
                let grow = &mut grads[w_off + r * cols..w_off + (r + 1) * cols];
                for (gw, xi) in grow.iter_mut().zip(x.iter()) {
                    *gw += g * xi;
                }
                grads[b_off + r] += g;
            }
            if l > 0 {
                // d loss / d input of this layer, through the previous tanh.
                let mut dx = vec![0.0; cols];
                for r in 0..rows {
                    let g = dz[r];
                    let row = &w[r * cols..(r + 1) * cols];
                    for (dxi, wi) in dx.iter_mut().zip(row.iter()) {
                        *dxi += g * wi;
                    }
                }
                let a = &tape.acts[l];
                for (dxi, ai) in dx.iter_mut().zip(a.iter()) {
                    *dxi *= 1.0 - ai * ai;
                }
                dz = dx;
            }
        }
    }
}

/// Random matrix with orthonormal rows (or columns when rows > cols),
/// scaled by `gain`. Modified Gram-Schmidt on Gaussian samples.
fn orthogonal_matrix<R: Rng>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Vec<f64> {
    let (n, m, transpose) = if rows <= cols { (rows, cols, false) } else { (cols, rows, true) };
    // n vectors of length m, n <= m.
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..m).map(|_| gaussian(rng)).collect())
        .collect();
    for i in 0..n {
        for j in 0..i {
            let dot: f64 = basis[i].iter().zip(basis[j].iter()).map(|(a, b)| a * b).sum();
            let (head, tail) = basis.split_at_mut(i);
            for (vi, vj) in tail[0].iter_mut().zip(head[j].iter()) {
                *vi -= dot * vj;
            }
        }
        let norm: f64 = basis[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        // Degenerate draws are essentially impossible; re-randomize defensively.
        let inv = if norm > 1e-12 { 1.0 / norm } else { 0.0 };
        for x in basis[i].iter_mut() {
            *x *= inv;
        }
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = if transpose { basis[c][r] } else { basis[r][c] };
            out[r * cols + c] = gain * v;
        }
    }
    out
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; both uniforms strictly inside (0, 1).
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Adam optimizer state over one flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(n_params: usize) -> Adam {
        Adam { m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Scale `grads` in place so the global L2 norm does not exceed `max_norm`.
pub fn clip_grad_norm(grads: &mut [Vec<f64>], max_norm: f64) -> f64 {
    let norm: f64 = grads
        .iter()
        .flat_map(|g| g.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm && norm > 0.0 {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            for x in g.iter_mut() {
                *x *= scale;
            }
        }
    }
    norm
}
