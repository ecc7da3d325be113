use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Fully connected network: ReLU on hidden layers, identity output.
/// Parameters live in one flat vector, layer by layer, each layer as its
/// `out × in` weight matrix (row-major) followed by its `out` biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations of one forward pass; `acts[0]` is the input and the last
/// entry the output.
#[derive(Clone, Debug, PartialEq)]
pub struct Forward {
    pub acts: Vec<Matrix>,
}

impl Forward {
    pub fn output(&self) -> &Matrix {
        self.acts.last().expect("input is always present")
    }
}

fn n_params(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::invalid("hidden", "layer sizes must be nonempty and >= 1"));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params: alloc::vec![0.0; n_params(sizes)],
        })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut Rng) -> Result<Self> {
        let mut m = Self::zeros(sizes)?;
        let mut off = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = math::sqrt(6.0 / (fan_in + fan_out) as f64);
            for p in &mut m.params[off..off + fan_in * fan_out] {
                *p = rng.uniform_range(-limit, limit);
            }
            off += fan_in * fan_out + fan_out;
        }
        Ok(m)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("at least two layers")
    }

    fn layers(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let mut off = 0;
        self.sizes.windows(2).map(move |w| {
            let start = off;
            off += w[0] * w[1] + w[1];
            (start, w[0], w[1])
        })
    }

    pub fn forward(&self, x: &Matrix) -> Result<Forward> {
        if x.cols() != self.input_dim() {
            return Err(Error::dims("feature-dimension", self.input_dim(), x.cols()));
        }
        let n = x.rows();
        let last = self.sizes.len() - 2;
        let mut acts = alloc::vec![x.clone()];
        for (li, (off, fin, fout)) in self.layers().enumerate() {
            let w = &self.params[off..off + fin * fout];
            let b = &self.params[off + fin * fout..off + fin * fout + fout];
            let input = acts.last().expect("nonempty");
            let mut out = Matrix::zeros(n, fout);
            for r in 0..n {
                let xin = input.row(r);
                let row = out.row_mut(r);
                for o in 0..fout {
                    let z = math::dot(&w[o * fin..(o + 1) * fin], xin) + b[o];
                    row[o] = if li < last { z.max(0.0) } else { z };
                }
            }
            acts.push(out);
        }
        Ok(Forward { acts })
    }

    /// Network output for `x` (logits for classifiers).
    pub fn output(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.forward(x)?.acts.pop().expect("nonempty"))
    }

    /// Gradient of a loss with respect to all parameters, given the pass
    /// `fwd` and `d_out = dL/d(output)`.
    pub fn backward(&self, fwd: &Forward, d_out: &Matrix) -> Vec<f64> {
        let mut grads = alloc::vec![0.0; self.params.len()];
        self.backward_into(fwd, d_out, &mut grads);
        grads
    }

    /// Like [`backward`](Self::backward) but adds into `grads`.
    pub fn backward_into(&self, fwd: &Forward, d_out: &Matrix, grads: &mut [f64]) {
        let layers: Vec<(usize, usize, usize)> = self.layers().collect();
        let n = d_out.rows();
        let mut delta = d_out.clone();
        for (li, &(off, fin, fout)) in layers.iter().enumerate().rev() {
            let input = &fwd.acts[li];
            {
                let (gw, gb) = grads[off..off + fin * fout + fout].split_at_mut(fin * fout);
                for r in 0..n {
                    let d = delta.row(r);
                    let xin = input.row(r);
                    for o in 0..fout {
                        if d[o] == 0.0 {
                            continue;
                        }
                        gb[o] += d[o];
                        for (g, xv) in gw[o * fin..(o + 1) * fin].iter_mut().zip(xin) {
                            *g += d[o] * xv;
                        }
                    }
                }
            }
            if li == 0 {
                break;
            }
            let w = &self.params[off..off + fin * fout];
            let mut prev = Matrix::zeros(n, fin);
            for r in 0..n {
                let d = delta.row(r);
                let a = input.row(r);
                let pr = prev.row_mut(r);
                for o in 0..fout {
                    if d[o] == 0.0 {
                        continue;
                    }
                    for (p, wv) in pr.iter_mut().zip(&w[o * fin..(o + 1) * fin]) {
                        *p += d[o] * wv;
                    }
                }
                for (p, av) in pr.iter_mut().zip(a) {
                    if *av <= 0.0 {
                        *p = 0.0;
                    }
                }
            }
            delta = prev;
        }
    }
}

/// `x` plus iid Gaussian noise of the given sd (a copy when `sd == 0`).
pub fn add_noise(x: &Matrix, sd: f64, rng: &mut Rng) -> Matrix {
    let mut out = x.clone();
    if sd > 0.0 {
        for v in out.as_mut_slice() {
            *v += sd * rng.normal();
        }
    }
    out
}

/// Forward pass, with input noise in training mode.
pub fn mlp_forward(m: &Mlp, x: &Matrix, train_mode: bool, noise_sd: f64, rng: &mut Rng) -> Result<Forward> {
    if train_mode {
        m.forward(&add_noise(x, noise_sd, rng))
    } else {
        m.forward(x)
    }
}

pub fn softmax_rows(z: &Matrix) -> Matrix {
    let mut p = z.clone();
    for i in 0..p.rows() {
        math::softmax_in_place(p.row_mut(i));
    }
    p
}

/// Mean softmax cross-entropy and its gradient with respect to the logits.
pub fn softmax_cross_entropy(logits: &Matrix, targets: &[usize]) -> (f64, Matrix) {
    let n = logits.rows();
    let mut grad = softmax_rows(logits);
    let mut loss = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        let z = logits.row(i);
        loss += math::log_sum_exp(z) - z[t];
        grad[(i, t)] -= 1.0;
    }
    let scale = 1.0 / n as f64;
    for g in grad.as_mut_slice() {
        *g *= scale;
    }
    (loss * scale, grad)
}

/// Mean squared error over samples and outputs, with its gradient.
pub fn mse(out: &Matrix, targets: &Matrix) -> (f64, Matrix) {
    let m = out.as_slice().len().max(1) as f64;
    let mut grad = Matrix::zeros(out.rows(), out.cols());
    let mut loss = 0.0;
    for ((g, o), t) in grad.as_mut_slice().iter_mut().zip(out.as_slice()).zip(targets.as_slice()) {
        let e = o - t;
        loss += e * e;
        *g = 2.0 * e / m;
    }
    (loss / m, grad)
}

/// Mean squared difference of the softmax outputs of two passes, with the
/// gradient for each pass's logits.
pub fn consistency_mse(a: &Matrix, b: &Matrix) -> (f64, Matrix, Matrix) {
    let pa = softmax_rows(a);
    let pb = softmax_rows(b);
    let m = pa.as_slice().len().max(1) as f64;
    let mut loss = 0.0;
    let mut ga = Matrix::zeros(a.rows(), a.cols());
    let mut gb = Matrix::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        let (ra, rb) = (pa.row(i), pb.row(i));
        let dp: Vec<f64> = ra.iter().zip(rb).map(|(x, y)| 2.0 * (x - y) / m).collect();
        loss += ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
        softmax_vjp(ra, &dp, ga.row_mut(i), 1.0);
        softmax_vjp(rb, &dp, gb.row_mut(i), -1.0);
    }
    (loss / m, ga, gb)
}

/// `out = sign · Jᵀ g` for the softmax Jacobian at probabilities `p`.
pub(crate) fn softmax_vjp(p: &[f64], g: &[f64], out: &mut [f64], sign: f64) {
    let s = math::dot(p, g);
    for ((o, pj), gj) in out.iter_mut().zip(p).zip(g) {
        *o = sign * pj * (gj - s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_gives_uniform_softmax() {
        let m = Mlp::zeros(&[3, 4, 2]).unwrap();
        let out = m.output(&Matrix::from_rows(&[[1.0, -2.0, 3.0]]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 0.0]);
        assert_eq!(softmax_rows(&out).as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn single_layer_is_affine() {
        let mut m = Mlp::zeros(&[2, 2]).unwrap();
        m.params_mut().copy_from_slice(&[1.0, 2.0, 3.0, 4.0, 0.5, -0.5]);
        let out = m.output(&Matrix::from_rows(&[[1.0, 1.0]]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[3.5, 6.5]);
    }

    #[test]
    fn zero_noise_train_pass_matches_eval() {
        let m = Mlp::new(&[2, 5, 2], &mut Rng::new(1)).unwrap();
        let x = Matrix::from_rows(&[[0.3, -0.7], [1.0, 2.0]]).unwrap();
        let a = mlp_forward(&m, &x, true, 0.0, &mut Rng::new(2)).unwrap();
        let b = mlp_forward(&m, &x, false, 0.0, &mut Rng::new(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_mse_gradient() {
        let mut m = Mlp::zeros(&[1, 1]).unwrap();
        m.params_mut().copy_from_slice(&[1.5, 0.0]);
        let x = Matrix::column(&[2.0]);
        let f = m.forward(&x).unwrap();
        let (loss, d) = mse(f.output(), &Matrix::column(&[1.0]));
        assert_eq!(loss, 4.0);
        let g = m.backward(&f, &d);
        // 2(wx − y)x = 2·2·2
        assert_eq!(g[0], 8.0);
    }

    #[test]
    fn saturated_softmax_has_tiny_gradient() {
        let logits = Matrix::from_rows(&[[50.0, -50.0]]).unwrap();
        let (loss, g) = softmax_cross_entropy(&logits, &[0]);
        assert!(loss < 1e-40);
        assert!(g.as_slice().iter().all(|v| v.abs() < 1e-40));
    }

    #[test]
    fn rejects_wrong_width() {
        let m = Mlp::zeros(&[3, 2]).unwrap();
        assert!(m.forward(&Matrix::zeros(1, 2)).is_err());
    }
}
