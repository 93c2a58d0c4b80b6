//! Product quadrature rules on `S^{n-1}`.
//!
//! Layout for `n ≥ 3`: the first coordinate `t = u₁` runs over Gauss–Jacobi
//! nodes for the weight `(1 - t²)^{(n-3)/2}`, and each level carries a scaled
//! copy of the `S^{n-2}` rule. The circle uses the equi-angular trapezoid rule.
//! Node order is polar-major, so node `i·inner + j` lies on polar level `i`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gauss_legendre, sin_power_integral, sphere_area};

/// Upper bound on default node counts in high dimension.
pub const MAX_DEFAULT_NODES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Pair,
    Circle { count: usize },
    Product { polar: Vec<f64>, inner: Box<Layout>, inner_len: usize },
}

/// Nodes (flattened, row-major `count × dim`) and positive weights.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    dim: usize,
    resolution: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    layout: Layout,
}

/// Serializable grid descriptor; the grid itself is rebuilt on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub resolution: usize,
}

impl SphereGrid {
    /// Builds the rule for `S^{n-1}` at the given refinement.
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("sphere grids need dimension n >= 1"));
        }
        if resolution < 1 {
            return Err(Error::invalid("grid resolution must be >= 1"));
        }
        let (nodes, weights, layout) = build(n, resolution);
        Ok(SphereGrid { dim: n, resolution, nodes, weights, layout })
    }

    /// Grid at [`default_resolution`], wrapped for sharing.
    pub fn default_for(n: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(n, default_resolution(n))?))
    }

    /// Process-wide default grid, built once per dimension.
    pub fn shared_default(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SphereGrid>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = cache.lock().expect("grid cache poisoned").get(&n) {
            return Ok(g.clone());
        }
        let g = Self::default_for(n)?;
        cache.lock().expect("grid cache poisoned").entry(n).or_insert(g.clone());
        Ok(g)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { dim: self.dim, resolution: self.resolution }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node closest to `u` coordinate-by-coordinate through the
    /// product layout.
    pub fn nearest(&self, u: &[f64]) -> usize {
        locate(&self.layout, u)
    }
}

/// Default refinement per dimension: 4096 circle nodes, 128×256 on `S²`,
/// and the finest level with at most [`MAX_DEFAULT_NODES`] nodes beyond.
pub fn default_resolution(n: usize) -> usize {
    match n {
        0 | 1 => 1,
        2 => 2048,
        3 => 64,
        _ => {
            let mut res = 1;
            while node_count(n, res + 1) <= MAX_DEFAULT_NODES {
                res += 1;
            }
            res
        }
    }
}

/// Number of nodes produced by `SphereGrid::new(n, res)`.
pub fn node_count(n: usize, res: usize) -> usize {
    match n {
        0 => 0,
        1 => 2,
        2 => 2 * res,
        _ => 2 * res * subsphere_count(n - 1, res),
    }
}

fn subsphere_count(n: usize, res: usize) -> usize {
    if n == 2 {
        4 * res
    } else {
        2 * res * subsphere_count(n - 1, res)
    }
}

fn build(n: usize, res: usize) -> (Vec<f64>, Vec<f64>, Layout) {
    match n {
        1 => (vec![1.0, -1.0], vec![1.0, 1.0], Layout::Pair),
        2 => circle(2 * res),
        _ => product(n, res),
    }
}

fn circle(count: usize) -> (Vec<f64>, Vec<f64>, Layout) {
    let h = 2.0 * PI / count as f64;
    let mut nodes = Vec::with_capacity(2 * count);
    for k in 0..count {
        let (s, c) = (k as f64 * h).sin_cos();
        nodes.push(c);
        nodes.push(s);
    }
    (nodes, vec![h; count], Layout::Circle { count })
}

/// Azimuth uses `4·res` points, every polar level `2·res`; doubling `res`
/// multiplies the node count by `2^{n-1}`.
fn product(n: usize, res: usize) -> (Vec<f64>, Vec<f64>, Layout) {
    let (inner_nodes, inner_weights, inner_layout) = if n == 3 {
        circle(4 * res)
    } else {
        product(n - 1, res)
    };
    let inner_len = inner_weights.len();
    let (ts, ws) = gauss_jacobi_sym(2 * res, n);
    let mut nodes = Vec::with_capacity(ts.len() * inner_len * n);
    let mut weights = Vec::with_capacity(ts.len() * inner_len);
    for (&t, &w) in ts.iter().zip(&ws) {
        let r = (1.0 - t * t).max(0.0).sqrt();
        for (v, &wv) in inner_nodes.chunks_exact(n - 1).zip(&inner_weights) {
            nodes.push(t);
            nodes.extend(v.iter().map(|x| r * x));
            weights.push(w * wv);
        }
    }
    (nodes, weights, Layout::Product { polar: ts, inner: Box::new(inner_layout), inner_len })
}

/// Gauss rule on `[-1, 1]` for the weight `(1 - t²)^{(n-3)/2}`, ascending nodes.
fn gauss_jacobi_sym(p: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 3 {
        return gauss_legendre(p);
    }
    let g = (n as f64 - 3.0) / 2.0;
    // Golub–Welsch on the symmetric Jacobi matrix
    let mut jm = DMatrix::zeros(p, p);
    for j in 1..p {
        let jf = j as f64;
        let s = 2.0 * jf + 2.0 * g;
        let b = (jf * (jf + 2.0 * g) / ((s + 1.0) * (s - 1.0))).sqrt();
        jm[(j - 1, j)] = b;
        jm[(j, j - 1)] = b;
    }
    let mu0 = 2.0 * sin_power_integral(n - 2, FRAC_PI_2);
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..p)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize against round-off
    for k in 0..p / 2 {
        let x = 0.5 * (pairs[p - 1 - k].0 - pairs[k].0);
        let w = 0.5 * (pairs[p - 1 - k].1 + pairs[k].1);
        pairs[k] = (-x, w);
        pairs[p - 1 - k] = (x, w);
    }
    if p % 2 == 1 {
        pairs[p / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

fn locate(layout: &Layout, u: &[f64]) -> usize {
    match layout {
        Layout::Pair => usize::from(u[0] < 0.0),
        Layout::Circle { count } => {
            let h = 2.0 * PI / *count as f64;
            let theta = u[1].atan2(u[0]).rem_euclid(2.0 * PI);
            ((theta / h).round() as usize) % count
        }
        Layout::Product { polar, inner, inner_len } => {
            let t = u[0];
            let i = match polar.binary_search_by(|p| p.total_cmp(&t)) {
                Ok(i) => i,
                Err(0) => 0,
                Err(k) if k >= polar.len() => polar.len() - 1,
                Err(k) => {
                    if (polar[k] - t).abs() < (t - polar[k - 1]).abs() {
                        k
                    } else {
                        k - 1
                    }
                }
            };
            let rest = &u[1..];
            let norm = rest.iter().map(|x| x * x).sum::<f64>().sqrt();
            let j = if norm > 0.0 {
                let v: Vec<f64> = rest.iter().map(|x| x / norm).collect();
                locate(inner, &v)
            } else {
                0
            };
            i * inner_len + j
        }
    }
}

/// Total spherical measure `σ(S^{n-1})`.
pub fn total_measure(n: usize) -> f64 {
    if n == 1 {
        2.0
    } else {
        sphere_area(n)
    }
}
