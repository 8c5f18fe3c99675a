//! Sheaf diffusion, the sign-equivariant layer and its hypernetwork, and
//! gradients of filtration values with respect to edge weights.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Filtration, WeightedGraph};
use crate::error::{Error, Result};
use crate::io::FeatureFile;
use crate::linalg::Field;
use crate::local_sheaf::{AssembledLaplacian, LocalStalk};
use crate::persistence::PersistentCocycle;

/// Features over the direct sum of the stalks of one order, `C` channels.
/// Coordinates follow the layout of an [`AssembledLaplacian`].
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureBundle {
    pub vertices: Vec<usize>,
    pub offsets: Vec<usize>,
    pub channels: Vec<Vec<f64>>,
}

impl FeatureBundle {
    pub fn zeros<F: Field>(lap: &AssembledLaplacian<F>, channels: usize) -> Self {
        Self { vertices: lap.vertices.clone(), offsets: lap.offsets.clone(), channels: vec![vec![0.0; lap.dim()]; channels] }
    }

    pub fn from_channels<F: Field>(lap: &AssembledLaplacian<F>, channels: Vec<Vec<f64>>) -> Result<Self> {
        for c in &channels {
            if c.len() != lap.dim() {
                return Err(Error::contract(format!("channel of length {} for a stalk sum of size {}", c.len(), lap.dim())));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::contract("features must be finite"));
            }
        }
        Ok(Self { vertices: lap.vertices.clone(), offsets: lap.offsets.clone(), channels })
    }

    /// Uniform features in `[-1, 1)`.
    pub fn random<F: Field>(lap: &AssembledLaplacian<F>, channels: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let channels = (0..channels).map(|_| (0..lap.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        Self { vertices: lap.vertices.clone(), offsets: lap.offsets.clone(), channels }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Features of `vertex` in channel `c`.
    pub fn at(&self, c: usize, vertex: usize) -> Option<&[f64]> {
        let i = self.vertices.binary_search(&vertex).ok()?;
        Some(&self.channels[c][self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn from_file<F: Field>(lap: &AssembledLaplacian<F>, file: &FeatureFile) -> Result<Self> {
        let mut out = Self::zeros(lap, file.len());
        for (c, channel) in file.iter().enumerate() {
            for (vertex, values) in channel {
                let i = out
                    .vertices
                    .binary_search(vertex)
                    .map_err(|_| Error::Config(format!("features name unknown vertex {vertex}")))?;
                let (lo, hi) = (out.offsets[i], out.offsets[i + 1]);
                for (&idx, &x) in values {
                    if idx >= hi - lo {
                        return Err(Error::Config(format!("vertex {vertex} has no cocycle {idx}")));
                    }
                    if !x.is_finite() {
                        return Err(Error::Config("features must be finite".into()));
                    }
                    out.channels[c][lo + idx] = x;
                }
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> FeatureFile {
        self.channels
            .iter()
            .map(|ch| {
                self.vertices
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, (self.offsets[i]..self.offsets[i + 1]).map(|j| (j - self.offsets[i], ch[j])).collect()))
                    .collect::<BTreeMap<_, _>>()
            })
            .collect()
    }

    fn check(&self, lap: &AssembledLaplacian<f64>) -> Result<()> {
        if self.dim() != lap.dim() || self.offsets != lap.offsets {
            return Err(Error::contract(format!("features of size {} do not fit a Laplacian of size {}", self.dim(), lap.dim())));
        }
        Ok(())
    }
}

/// `Σ_c x_c^T Δ x_c`.
pub fn dirichlet_energy(features: &FeatureBundle, lap: &AssembledLaplacian<f64>) -> Result<f64> {
    features.check(lap)?;
    let mut e = 0.0;
    for x in &features.channels {
        let y = lap.apply(x)?;
        e += x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(e)
}

/// Largest eigenvalue magnitude by power iteration from a fixed-seed
/// random start, stopping once `‖Δx - λx‖ <= 1e-12 λ`.
///
/// A structured start such as `1 + frac(iφ)` can be exactly orthogonal to
/// the top eigenvector (it has zero second differences, like a path
/// Laplacian's kernel complement), which silently yields a smaller
/// eigenvalue and an unstable step size.
pub fn lambda_max(lap: &AssembledLaplacian<f64>, iterations: usize) -> f64 {
    let n = lap.dim();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|a| *a /= norm);
        let y = lap.apply(&x).expect("sizes match");
        lambda = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        let residual = y.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        let flipped = y.iter().zip(&x).map(|(a, b)| (a + lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual.min(flipped) <= 1e-12 * lambda.max(f64::MIN_POSITIVE) {
            break;
        }
        x = y;
    }
    lambda
}

/// Result of [`diffuse`]: the final features and the energy before each
/// step plus the final one.
#[derive(Clone, Debug)]
pub struct Diffusion {
    pub features: FeatureBundle,
    pub energies: Vec<f64>,
}

/// Explicit Euler steps `x <- x - α Δ x`. Requires `0 < α < 2 / λ_max`.
pub fn diffuse(features: &FeatureBundle, lap: &AssembledLaplacian<f64>, alpha: f64, steps: usize) -> Result<Diffusion> {
    features.check(lap)?;
    let lmax = lambda_max(lap, 10_000);
    if !(alpha > 0.0 && (lmax == 0.0 || alpha < 2.0 / lmax)) {
        return Err(Error::contract(format!("step size {alpha} outside (0, 2/λ_max) with λ_max ≈ {lmax}")));
    }
    let mut x = features.clone();
    let mut energies = vec![dirichlet_energy(&x, lap)?];
    for _ in 0..steps {
        for ch in &mut x.channels {
            let y = lap.apply(ch)?;
            ch.iter_mut().zip(&y).for_each(|(a, b)| *a -= alpha * b);
        }
        energies.push(dirichlet_energy(&x, lap)?);
    }
    Ok(Diffusion { features: x, energies })
}

/// `Δ x` per channel.
pub fn message_pass(features: &FeatureBundle, lap: &AssembledLaplacian<f64>) -> Result<FeatureBundle> {
    features.check(lap)?;
    let channels = features.channels.iter().map(|x| lap.apply(x)).collect::<Result<_>>()?;
    Ok(FeatureBundle { channels, ..features.clone() })
}

/// The gain `ρ` of a sign-equivariant layer.
pub trait Gain {
    fn dim(&self) -> usize;
    fn eval(&self, z: &[f64]) -> Vec<f64>;
}

/// `ρ(z) = W z`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearGain(pub Vec<Vec<f64>>);

impl Gain for LinearGain {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.0.iter().map(|row| row.iter().zip(z).map(|(w, x)| w * x).sum()).collect()
    }
}

/// `ρ ≡ c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantGain {
    pub dim: usize,
    pub value: f64,
}

impl Gain for ConstantGain {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _z: &[f64]) -> Vec<f64> {
        vec![self.value; self.dim]
    }
}

/// `ψ(x) = x ∘ ρ(|x|)`. Commutes with every diagonal sign matrix because
/// `ρ` only ever sees `|x|`.
pub fn sign_equivariant_layer(x: &[f64], gain: &dyn Gain) -> Result<Vec<f64>> {
    if gain.dim() != x.len() {
        return Err(Error::contract(format!("gain of size {} on a vector of size {}", gain.dim(), x.len())));
    }
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let g = gain.eval(&abs);
    if g.len() != x.len() {
        return Err(Error::contract("gain output has the wrong size"));
    }
    Ok(x.iter().zip(&g).map(|(a, b)| a * b).collect())
}

/// A scalar function of two cocycle descriptors `(k_i, s_i, t_i, k_j, s_j, t_j)`.
pub trait Psi {
    fn eval(&self, input: &[f64; 6]) -> f64;
}

impl<T: Fn(&[f64; 6]) -> f64> Psi for T {
    fn eval(&self, input: &[f64; 6]) -> f64 {
        self(input)
    }
}

/// Fully connected network with `tanh` hidden layers and a linear output.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    /// Per layer: `out x in` weights, row-major, followed by `out` biases.
    layers: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Default hypernetwork widths.
pub const PSI_WIDTHS: [usize; 4] = [6, 16, 16, 1];
pub const PSI_SEED: u64 = 0x9e37_79b9;

impl Mlp {
    /// Uniform initialization in `±1/sqrt(fan_in)` from a seeded generator.
    pub fn new(widths: &[usize], seed: u64) -> Result<Self> {
        Self::check_widths(widths)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = widths
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                let weights = (0..w[0] * w[1]).map(|_| rng.gen_range(-bound..bound)).collect();
                let biases = (0..w[1]).map(|_| rng.gen_range(-bound..bound)).collect();
                (weights, biases)
            })
            .collect();
        Ok(Self { widths: widths.to_vec(), layers })
    }

    /// The default Ψ: widths `[6, 16, 16, 1]`, seed [`PSI_SEED`].
    pub fn default_psi() -> Self {
        Self::new(&PSI_WIDTHS, PSI_SEED).expect("valid widths")
    }

    fn check_widths(widths: &[usize]) -> Result<()> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::Config(format!("invalid layer widths {widths:?}")));
        }
        Ok(())
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|(w, b)| w.iter().chain(b).copied()).collect()
    }

    pub fn from_params(widths: &[usize], params: &[f64]) -> Result<Self> {
        Self::check_widths(widths)?;
        let mut rest = params;
        let mut layers = Vec::new();
        for w in widths.windows(2) {
            let (nw, nb) = (w[0] * w[1], w[1]);
            if rest.len() < nw + nb {
                return Err(Error::Config("too few parameters for the layer widths".into()));
            }
            layers.push((rest[..nw].to_vec(), rest[nw..nw + nb].to_vec()));
            rest = &rest[nw + nb..];
        }
        if !rest.is_empty() {
            return Err(Error::Config("too many parameters for the layer widths".into()));
        }
        Ok(Self { widths: widths.to_vec(), layers })
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.jvp(input, &vec![0.0; input.len()], None).0
    }

    /// Forward pass together with its directional derivative along `d_input`
    /// and, optionally, along the parameter direction `d_params` (laid out
    /// like [`Mlp::params`]).
    pub fn jvp(&self, input: &[f64], d_input: &[f64], d_params: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(input.len(), self.widths[0], "input width");
        let mut x = input.to_vec();
        let mut dx = d_input.to_vec();
        let mut offset = 0;
        let last = self.layers.len() - 1;
        for (l, (w, b)) in self.layers.iter().enumerate() {
            let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
            let mut y = b.clone();
            let mut dy = match d_params {
                Some(dp) => dp[offset + n_in * n_out..offset + n_in * n_out + n_out].to_vec(),
                None => vec![0.0; n_out],
            };
            for o in 0..n_out {
                for i in 0..n_in {
                    let wi = w[o * n_in + i];
                    y[o] += wi * x[i];
                    dy[o] += wi * dx[i];
                    if let Some(dp) = d_params {
                        dy[o] += dp[offset + o * n_in + i] * x[i];
                    }
                }
            }
            offset += n_in * n_out + n_out;
            if l < last {
                for o in 0..n_out {
                    let th = y[o].tanh();
                    dy[o] *= 1.0 - th * th;
                    y[o] = th;
                }
            }
            x = y;
            dx = dy;
        }
        (x, dx)
    }
}

impl Psi for Mlp {
    fn eval(&self, input: &[f64; 6]) -> f64 {
        self.forward(input)[0]
    }
}

fn psi_input(a: (usize, f64, f64), b: (usize, f64, f64), horizon: f64) -> [f64; 6] {
    let fin = |t: f64| if t.is_finite() { t } else { horizon };
    [a.0 as f64, a.1, fin(a.2), b.0 as f64, b.1, fin(b.2)]
}

/// `W[i][j] = Ψ(k_i, s_i, t_i, k_j, s_j, t_j)` over `(order, birth, death)`
/// descriptors; infinite deaths are replaced by `horizon`.
pub fn weights_from_descriptors(descriptors: &[(usize, f64, f64)], psi: &dyn Psi, horizon: f64) -> Vec<Vec<f64>> {
    descriptors
        .iter()
        .map(|&a| descriptors.iter().map(|&b| psi.eval(&psi_input(a, b, horizon))).collect())
        .collect()
}

/// Per-node gain matrix from the hypernetwork, over the order-`k` cocycles
/// of `stalk`.
pub fn hypernet_weights<F: Field>(stalk: &LocalStalk<F>, k: usize, psi: &dyn Psi, horizon: f64) -> Vec<Vec<f64>> {
    weights_from_descriptors(&stalk.descriptors(k), psi, horizon)
}

/// The hypernetwork-parameterized layer `x ∘ (W |x|)` with `W` from `mlp`,
/// and its derivative along `dx` and the parameter direction `d_params`.
pub fn psi_layer_jvp(
    x: &[f64],
    dx: &[f64],
    descriptors: &[(usize, f64, f64)],
    mlp: &Mlp,
    d_params: Option<&[f64]>,
    horizon: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = descriptors.len();
    if x.len() != n || dx.len() != n {
        return Err(Error::contract("layer input does not match the stalk size"));
    }
    if mlp.widths()[0] != 6 || *mlp.widths().last().expect("widths") != 1 {
        return Err(Error::Config("Ψ must map 6 inputs to 1 output".into()));
    }
    let mut w = vec![vec![0.0; n]; n];
    let mut dw = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (y, dy) = mlp.jvp(&psi_input(descriptors[i], descriptors[j], horizon), &[0.0; 6], d_params);
            w[i][j] = y[0];
            dw[i][j] = dy[0];
        }
    }
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let dabs: Vec<f64> = x.iter().zip(dx).map(|(v, d)| v.signum() * d * (*v != 0.0) as u8 as f64).collect();
    let mut y = vec![0.0; n];
    let mut dy = vec![0.0; n];
    for i in 0..n {
        let g: f64 = (0..n).map(|j| w[i][j] * abs[j]).sum();
        let dg: f64 = (0..n).map(|j| dw[i][j] * abs[j] + w[i][j] * dabs[j]).sum();
        y[i] = x[i] * g;
        dy[i] = dx[i] * g + x[i] * dg;
    }
    Ok((y, dy))
}

/// Which end of a persistence pair to differentiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Birth,
    Death,
}

/// Gradient of a birth or death value with respect to the edge weights of
/// `graph`, as `(edge index, derivative)` pairs.
///
/// A simplex's value is the largest weight among its edges, so the gradient
/// is 1 on the edge realizing that maximum (the latest edge in the filtration
/// order when several tie) and 0 elsewhere. Vertices have constant value 0.
pub fn filtration_gradient<F: Field>(
    filtration: &Filtration,
    graph: &WeightedGraph,
    cocycle: &PersistentCocycle<F>,
    endpoint: Endpoint,
) -> Result<Vec<(usize, f64)>> {
    let simplex = match endpoint {
        Endpoint::Birth => cocycle.birth_index,
        Endpoint::Death => cocycle.death_index.ok_or(Error::Essential)?,
    };
    if simplex >= filtration.len() {
        return Err(Error::contract(format!("simplex index {simplex} out of range")));
    }
    let Some(&edge) = filtration.edges_of(simplex).last() else { return Ok(Vec::new()) };
    let index: HashMap<(usize, usize), usize> =
        graph.edges().iter().enumerate().map(|(i, &(u, v, _))| ((u, v), i)).collect();
    let vs = filtration.simplex(edge).vertices();
    let e = *index
        .get(&(vs[0], vs[1]))
        .ok_or_else(|| Error::contract(format!("edge {vs:?} is not in the graph")))?;
    Ok(vec![(e, 1.0)])
}
