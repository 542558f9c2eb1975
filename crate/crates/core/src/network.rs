//! Single-hidden-layer feedforward networks: tansig hidden units, linear
//! outputs, and for the cascade variant a direct input-to-output block.
//!
//! All weights live in one flat parameter vector with a fixed layout:
//! input→hidden weights (row-major, one row per hidden unit), hidden biases,
//! input→output skip weights (cascade only, row-major), hidden→output weights
//! (row-major), output biases.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("empty sample set")]
    Empty,
    #[error("network file: {0}")]
    Parse(String),
}

pub type Result<T, E = NetworkError> = std::result::Result<T, E>;

/// Flat weights and biases in the documented layout.
pub type ParamVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Architecture {
    /// Multi-layer feedforward.
    Mlff,
    /// Cascade feedforward: MLFF plus a linear input→output block.
    Cffn,
}

impl Architecture {
    pub const ALL: [Architecture; 2] = [Architecture::Mlff, Architecture::Cffn];

    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Mlff => "MLFF",
            Architecture::Cffn => "CFFN",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            Architecture::Mlff => "Multi-Layer Feed Forward Network",
            Architecture::Cffn => "Cascade Feed Forward Network",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MLFF" => Ok(Architecture::Mlff),
            "CFFN" => Ok(Architecture::Cffn),
            other => Err(format!("unknown architecture `{other}` (expected MLFF or CFFN)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Topology {
    pub architecture: Architecture,
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
}

impl Topology {
    pub fn new(architecture: Architecture, n_inputs: usize, n_hidden: usize, n_outputs: usize) -> Result<Self> {
        if n_inputs == 0 || n_hidden == 0 || n_outputs == 0 {
            return Err(NetworkError::InvalidTopology(format!(
                "{n_inputs}-{n_hidden}-{n_outputs}: every layer needs at least one unit"
            )));
        }
        Ok(Self {
            architecture,
            n_inputs,
            n_hidden,
            n_outputs,
        })
    }

    pub fn has_skip(&self) -> bool {
        self.architecture == Architecture::Cffn
    }

    pub fn param_count(&self) -> usize {
        let Layout { end, .. } = self.layout();
        end
    }

    pub(crate) fn layout(&self) -> Layout {
        let (i, h, o) = (self.n_inputs, self.n_hidden, self.n_outputs);
        let w_ih = 0;
        let b_h = w_ih + h * i;
        let w_io = b_h + h;
        let w_ho = w_io + if self.has_skip() { o * i } else { 0 };
        let b_o = w_ho + o * h;
        Layout {
            w_ih,
            b_h,
            w_io,
            w_ho,
            b_o,
            end: b_o + o,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}-{}-{}",
            self.architecture, self.n_inputs, self.n_hidden, self.n_outputs
        )
    }
}

/// Offsets of each block inside the parameter vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub w_ih: usize,
    pub b_h: usize,
    pub w_io: usize,
    pub w_ho: usize,
    pub b_o: usize,
    pub end: usize,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub input: Vec<f64>,
    pub hidden_net: Vec<f64>,
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    topology: Topology,
    seed: u64,
    params: ParamVector,
}

impl Network {
    /// Weights uniform in `±1/sqrt(fan_in)` of the receiving unit, biases zero.
    /// Cascade output units count both hidden and input connections as fan-in.
    pub fn init(topology: Topology, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lay = topology.layout();
        let mut params = vec![0.0; lay.end];
        let (i, h, o) = (topology.n_inputs, topology.n_hidden, topology.n_outputs);

        let hidden_bound = 1.0 / (i as f64).sqrt();
        for w in &mut params[lay.w_ih..lay.b_h] {
            *w = rng.random_range(-hidden_bound..=hidden_bound);
        }
        let out_fan_in = if topology.has_skip() { h + i } else { h };
        let out_bound = 1.0 / (out_fan_in as f64).sqrt();
        for w in &mut params[lay.w_io..lay.w_ho] {
            *w = rng.random_range(-out_bound..=out_bound);
        }
        for w in &mut params[lay.w_ho..lay.b_o] {
            *w = rng.random_range(-out_bound..=out_bound);
        }
        debug_assert_eq!(lay.end - lay.b_o, o);
        Self { topology, seed, params }
    }

    pub fn from_params(topology: Topology, seed: u64, params: ParamVector) -> Result<Self> {
        if params.len() != topology.param_count() {
            return Err(NetworkError::DimensionMismatch {
                what: "parameter vector",
                expected: topology.param_count(),
                got: params.len(),
            });
        }
        Ok(Self { topology, seed, params })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn to_params(&self) -> ParamVector {
        self.params.clone()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(NetworkError::DimensionMismatch {
                what: "parameter vector",
                expected: self.params.len(),
                got: params.len(),
            });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn w_ih(&self) -> &[f64] {
        let l = self.topology.layout();
        &self.params[l.w_ih..l.b_h]
    }

    pub fn b_h(&self) -> &[f64] {
        let l = self.topology.layout();
        &self.params[l.b_h..l.w_io]
    }

    /// `None` for MLFF, which has no skip block at all.
    pub fn w_io(&self) -> Option<&[f64]> {
        let l = self.topology.layout();
        self.topology.has_skip().then(|| &self.params[l.w_io..l.w_ho])
    }

    pub fn w_ho(&self) -> &[f64] {
        let l = self.topology.layout();
        &self.params[l.w_ho..l.b_o]
    }

    pub fn b_o(&self) -> &[f64] {
        let l = self.topology.layout();
        &self.params[l.b_o..l.end]
    }

    /// Mutable access to a block by layout offsets, for tests and tools.
    pub fn blocks_mut(&mut self) -> BlocksMut<'_> {
        let l = self.topology.layout();
        let (w_ih, rest) = self.params.split_at_mut(l.b_h);
        let (b_h, rest) = rest.split_at_mut(l.w_io - l.b_h);
        let (w_io, rest) = rest.split_at_mut(l.w_ho - l.w_io);
        let (w_ho, b_o) = rest.split_at_mut(l.b_o - l.w_ho);
        BlocksMut {
            w_ih,
            b_h,
            w_io: if self.topology.has_skip() { Some(w_io) } else { None },
            w_ho,
            b_o,
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardTrace> {
        forward(&self.topology, &self.params, x)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        predict(&self.topology, &self.params, x)
    }

    pub fn batch_loss(&self, x: &Matrix, y: &Matrix) -> Result<f64> {
        batch_loss(&self.topology, &self.params, x, y)
    }

    pub fn gradient(&self, x: &Matrix, y: &Matrix) -> Result<ParamVector> {
        loss_and_gradient(&self.topology, &self.params, x, y).map(|(_, g)| g)
    }

    pub fn jacobian(&self, x: &Matrix) -> Result<Matrix> {
        jacobian(&self.topology, &self.params, x)
    }

    /// Text format: one header line, then each parameter on its own line with
    /// 17 significant digits.
    pub fn to_text(&self) -> String {
        let t = &self.topology;
        let mut out = format!(
            "{NETWORK_MAGIC} architecture={} inputs={} hidden={} outputs={} seed={}\n",
            t.architecture, t.n_inputs, t.n_hidden, t.n_outputs, self.seed
        );
        for p in &self.params {
            out.push_str(&format!("{p:.16e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| NetworkError::Parse("empty file".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(NETWORK_MAGIC) {
            return Err(NetworkError::Parse(format!("unrecognized header `{header}`")));
        }
        let mut get = |key: &str| -> Result<&str> {
            let field = fields
                .next()
                .ok_or_else(|| NetworkError::Parse(format!("header missing `{key}`")))?;
            field
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| NetworkError::Parse(format!("expected `{key}=`, found `{field}`")))
        };
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| NetworkError::Parse(format!("bad count `{s}`")))
        };
        let architecture: Architecture = get("architecture")?.parse().map_err(NetworkError::Parse)?;
        let n_inputs = num(get("inputs")?)?;
        let n_hidden = num(get("hidden")?)?;
        let n_outputs = num(get("outputs")?)?;
        let seed_str = get("seed")?;
        let seed: u64 = seed_str
            .parse()
            .map_err(|_| NetworkError::Parse(format!("bad seed `{seed_str}`")))?;
        let topology = Topology::new(architecture, n_inputs, n_hidden, n_outputs)?;
        let params = lines
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|_| NetworkError::Parse(format!("bad parameter `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_params(topology, seed, params)
    }
}

const NETWORK_MAGIC: &str = "volnet-network/1";

pub struct BlocksMut<'a> {
    pub w_ih: &'a mut [f64],
    pub b_h: &'a mut [f64],
    pub w_io: Option<&'a mut [f64]>,
    pub w_ho: &'a mut [f64],
    pub b_o: &'a mut [f64],
}

fn check_params(t: &Topology, params: &[f64]) -> Result<Layout> {
    let lay = t.layout();
    if params.len() != lay.end {
        return Err(NetworkError::DimensionMismatch {
            what: "parameter vector",
            expected: lay.end,
            got: params.len(),
        });
    }
    Ok(lay)
}

fn check_batch(t: &Topology, x: &Matrix, y: Option<&Matrix>) -> Result<()> {
    if x.rows() == 0 {
        return Err(NetworkError::Empty);
    }
    if x.cols() != t.n_inputs {
        return Err(NetworkError::DimensionMismatch {
            what: "input columns",
            expected: t.n_inputs,
            got: x.cols(),
        });
    }
    if let Some(y) = y {
        if y.cols() != t.n_outputs {
            return Err(NetworkError::DimensionMismatch {
                what: "target columns",
                expected: t.n_outputs,
                got: y.cols(),
            });
        }
        if y.rows() != x.rows() {
            return Err(NetworkError::DimensionMismatch {
                what: "target rows",
                expected: x.rows(),
                got: y.rows(),
            });
        }
    }
    Ok(())
}

/// Hidden pre-activations and activations, then outputs, written into the
/// caller's buffers.
#[inline]
fn forward_into(t: &Topology, lay: &Layout, p: &[f64], x: &[f64], net: &mut [f64], z: &mut [f64], y: &mut [f64]) {
    let (ni, nh) = (t.n_inputs, t.n_hidden);
    for j in 0..nh {
        let row = &p[lay.w_ih + j * ni..lay.w_ih + (j + 1) * ni];
        let s = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + p[lay.b_h + j];
        net[j] = s;
        z[j] = s.tanh();
    }
    for (o, out) in y.iter_mut().enumerate() {
        let row = &p[lay.w_ho + o * nh..lay.w_ho + (o + 1) * nh];
        let mut s = row.iter().zip(z.iter()).map(|(w, v)| w * v).sum::<f64>() + p[lay.b_o + o];
        if t.has_skip() {
            let skip = &p[lay.w_io + o * ni..lay.w_io + (o + 1) * ni];
            s += skip.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        *out = s;
    }
}

pub fn forward(t: &Topology, params: &[f64], x: &[f64]) -> Result<ForwardTrace> {
    let lay = check_params(t, params)?;
    if x.len() != t.n_inputs {
        return Err(NetworkError::DimensionMismatch {
            what: "input vector",
            expected: t.n_inputs,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(NetworkError::NonFiniteInput);
    }
    let mut trace = ForwardTrace {
        input: x.to_vec(),
        hidden_net: vec![0.0; t.n_hidden],
        hidden: vec![0.0; t.n_hidden],
        output: vec![0.0; t.n_outputs],
    };
    forward_into(t, &lay, params, x, &mut trace.hidden_net, &mut trace.hidden, &mut trace.output);
    Ok(trace)
}

pub fn predict(t: &Topology, params: &[f64], x: &Matrix) -> Result<Matrix> {
    let lay = check_params(t, params)?;
    check_batch(t, x, None)?;
    let mut net = vec![0.0; t.n_hidden];
    let mut z = vec![0.0; t.n_hidden];
    let mut out = Matrix::zeros(x.rows(), t.n_outputs);
    for i in 0..x.rows() {
        forward_into(t, &lay, params, x.row(i), &mut net, &mut z, out.row_mut(i));
    }
    Ok(out)
}

/// Prediction minus target, flattened row-major (sample-major, then output).
pub fn residuals(t: &Topology, params: &[f64], x: &Matrix, y: &Matrix) -> Result<Vec<f64>> {
    check_batch(t, x, Some(y))?;
    let pred = predict(t, params, x)?;
    Ok(pred.as_slice().iter().zip(y.as_slice()).map(|(p, a)| p - a).collect())
}

/// Mean of squared errors over every sample and output.
pub fn batch_loss(t: &Topology, params: &[f64], x: &Matrix, y: &Matrix) -> Result<f64> {
    let r = residuals(t, params, x, y)?;
    Ok(r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64)
}

/// Loss and its exact gradient by reverse-mode accumulation.
pub fn loss_and_gradient(t: &Topology, params: &[f64], x: &Matrix, y: &Matrix) -> Result<(f64, ParamVector)> {
    let lay = check_params(t, params)?;
    check_batch(t, x, Some(y))?;
    let (ni, nh, no) = (t.n_inputs, t.n_hidden, t.n_outputs);
    let scale = 2.0 / (x.rows() * no) as f64;

    let mut grad = vec![0.0; lay.end];
    let mut net = vec![0.0; nh];
    let mut z = vec![0.0; nh];
    let mut out = vec![0.0; no];
    let mut delta_o = vec![0.0; no];
    let mut sse = 0.0;

    for s in 0..x.rows() {
        let xs = x.row(s);
        forward_into(t, &lay, params, xs, &mut net, &mut z, &mut out);
        for o in 0..no {
            let r = out[o] - y[(s, o)];
            sse += r * r;
            delta_o[o] = scale * r;
        }
        for o in 0..no {
            let d = delta_o[o];
            grad[lay.b_o + o] += d;
            for (g, zj) in grad[lay.w_ho + o * nh..lay.w_ho + (o + 1) * nh].iter_mut().zip(&z) {
                *g += d * zj;
            }
            if t.has_skip() {
                for (g, xi) in grad[lay.w_io + o * ni..lay.w_io + (o + 1) * ni].iter_mut().zip(xs) {
                    *g += d * xi;
                }
            }
        }
        for j in 0..nh {
            let back: f64 = (0..no).map(|o| params[lay.w_ho + o * nh + j] * delta_o[o]).sum();
            let dh = back * (1.0 - z[j] * z[j]);
            grad[lay.b_h + j] += dh;
            for (g, xi) in grad[lay.w_ih + j * ni..lay.w_ih + (j + 1) * ni].iter_mut().zip(xs) {
                *g += dh * xi;
            }
        }
    }
    Ok((sse / (x.rows() * no) as f64, grad))
}

/// Derivative of every output on every sample with respect to every
/// parameter. Row `s * n_outputs + o` holds output `o` on sample `s`.
pub fn jacobian(t: &Topology, params: &[f64], x: &Matrix) -> Result<Matrix> {
    let lay = check_params(t, params)?;
    check_batch(t, x, None)?;
    let (ni, nh, no) = (t.n_inputs, t.n_hidden, t.n_outputs);
    let mut jac = Matrix::zeros(x.rows() * no, lay.end);
    let mut net = vec![0.0; nh];
    let mut z = vec![0.0; nh];
    let mut out = vec![0.0; no];

    for s in 0..x.rows() {
        let xs = x.row(s);
        forward_into(t, &lay, params, xs, &mut net, &mut z, &mut out);
        for o in 0..no {
            let row = jac.row_mut(s * no + o);
            row[lay.b_o + o] = 1.0;
            row[lay.w_ho + o * nh..lay.w_ho + (o + 1) * nh].copy_from_slice(&z);
            if t.has_skip() {
                row[lay.w_io + o * ni..lay.w_io + (o + 1) * ni].copy_from_slice(xs);
            }
            for j in 0..nh {
                let dh = params[lay.w_ho + o * nh + j] * (1.0 - z[j] * z[j]);
                row[lay.b_h + j] = dh;
                for (slot, xi) in row[lay.w_ih + j * ni..lay.w_ih + (j + 1) * ni].iter_mut().zip(xs) {
                    *slot = dh * xi;
                }
            }
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(a: Architecture, i: usize, h: usize, o: usize) -> Topology {
        Topology::new(a, i, h, o).unwrap()
    }

    #[test]
    fn param_counts() {
        assert_eq!(topo(Architecture::Mlff, 7, 40, 2).param_count(), 402);
        assert_eq!(topo(Architecture::Cffn, 7, 40, 2).param_count(), 416);
        assert!(Topology::new(Architecture::Mlff, 0, 3, 1).is_err());
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let t = topo(Architecture::Cffn, 7, 20, 2);
        let a = Network::init(t, 11);
        assert_eq!(a, Network::init(t, 11));
        assert_ne!(a.params(), Network::init(t, 12).params());
        let bound = 1.0 / 7f64.sqrt();
        assert!(a.w_ih().iter().all(|w| w.abs() <= bound));
        assert!(a.b_h().iter().chain(a.b_o()).all(|&b| b == 0.0));
        let out_bound = 1.0 / 27f64.sqrt();
        assert!(a.w_ho().iter().chain(a.w_io().unwrap()).all(|w| w.abs() <= out_bound));
    }

    #[test]
    fn mlff_has_no_skip_block() {
        let mut n = Network::init(topo(Architecture::Mlff, 3, 2, 2), 1);
        assert!(n.w_io().is_none());
        assert!(n.blocks_mut().w_io.is_none());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let t = topo(Architecture::Cffn, 3, 4, 2);
        let n = Network::from_params(t, 0, vec![0.0; t.param_count()]).unwrap();
        let tr = n.forward(&[0.3, -2.0, 5.0]).unwrap();
        assert_eq!(tr.output, vec![0.0, 0.0]);
    }

    #[test]
    fn scalar_path_is_tanh() {
        let t = topo(Architecture::Mlff, 1, 1, 1);
        // layout: w_ih, b_h, w_ho, b_o
        let n = Network::from_params(t, 0, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let y = n.forward(&[0.5]).unwrap().output[0];
        assert!((y - 0.462_117_157_260_009_8).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_bad_input() {
        let n = Network::init(topo(Architecture::Mlff, 2, 2, 1), 0);
        assert!(matches!(n.forward(&[1.0]), Err(NetworkError::DimensionMismatch { .. })));
        assert_eq!(n.forward(&[1.0, f64::NAN]), Err(NetworkError::NonFiniteInput));
        let x = Matrix::from_rows(&[[1.0, 2.0]]);
        let y = Matrix::from_rows(&[[1.0, 2.0]]);
        assert!(n.batch_loss(&x, &y).is_err());
        assert_eq!(n.batch_loss(&Matrix::zeros(0, 2), &Matrix::zeros(0, 1)), Err(NetworkError::Empty));
    }

    #[test]
    fn loss_examples() {
        let t = topo(Architecture::Mlff, 1, 1, 2);
        // zero hidden weights; output biases set to 1 → prediction [1, 1]
        let n = Network::from_params(t, 0, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let x = Matrix::from_rows(&[[0.7]]);
        assert_eq!(n.batch_loss(&x, &Matrix::from_rows(&[[0.0, 0.0]])).unwrap(), 1.0);
        assert_eq!(n.batch_loss(&x, &Matrix::from_rows(&[[1.0, 1.0]])).unwrap(), 0.0);
    }

    #[test]
    fn linear_jacobian_columns_are_inputs() {
        let t = topo(Architecture::Cffn, 3, 2, 1);
        let mut n = Network::init(t, 5);
        n.blocks_mut().w_ho.fill(0.0);
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [-4.0, 5.5, 0.25]]);
        let j = n.jacobian(&x).unwrap();
        let l = t.layout();
        for s in 0..2 {
            assert_eq!(&j.row(s)[l.w_io..l.w_ho], x.row(s));
            // no hidden path when the hidden→output weights vanish
            assert!(j.row(s)[l.w_ih..l.w_io].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let n = Network::init(topo(Architecture::Cffn, 7, 5, 2), 99);
        let text = n.to_text();
        assert!(text.starts_with("volnet-network/1 architecture=CFFN inputs=7 hidden=5 outputs=2 seed=99\n"));
        let back = Network::from_text(&text).unwrap();
        assert_eq!(back, n);
        assert!(back.params().iter().zip(n.params()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(Network::from_text("garbage\n").is_err());
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            Network::from_text(&truncated),
            Err(NetworkError::DimensionMismatch { .. })
        ));
    }
}
