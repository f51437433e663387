//! Small numerical helpers: Gauss-Legendre rules, monotone inversion,
//! seeded low-discrepancy points and a deterministic summation tree.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights mapped to [0, 1].
#[derive(Clone, Debug)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(n.max(2)).expect("rule order >= 2");
        let mut pairs: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        UnitRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        let parts: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .collect();
        h * pairwise_sum(&parts)
    }
}

/// Shared 64-node rule.
pub fn gauss64() -> &'static UnitRule {
    static R: OnceLock<UnitRule> = OnceLock::new();
    R.get_or_init(|| UnitRule::new(64))
}

/// Sum in a fixed binary tree; the result depends only on the order of
/// `xs`, not on how the work producing them was scheduled.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let m = n / 2;
            pairwise_sum(&xs[..m]) + pairwise_sum(&xs[m..])
        }
    }
}

/// Root of the increasing function `f - target` on `[lo, hi]` by bisection
/// followed by Newton polishing with the supplied derivative. Endpoints
/// count as roots when within `tol`.
pub fn invert_increasing<F, D>(f: F, df: D, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let flo = f(lo) - target;
    let fhi = f(hi) - target;
    if flo.abs() <= tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol {
        return Ok(hi);
    }
    if flo > 0.0 || fhi < 0.0 || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) - target < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let d = df(x);
        if d.is_finite() && d > 0.0 {
            let nx = x - (f(x) - target) / d;
            if nx >= lo && nx <= hi {
                x = nx;
            }
        }
    }
    Ok(x)
}

/// Root of a continuous function with a sign change on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let sa = fa.signum();
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Halton points in [0,1)^dim with a seeded Cranley-Patterson rotation.
pub fn quasi_random(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    const BASES: [u8; 6] = [2, 3, 5, 7, 11, 13];
    assert!(dim <= BASES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..n)
        .map(|i| {
            (0..dim)
                .map(|k| {
                    let x = halton::number(BASES[k], i + 1) + shift[k];
                    x - x.floor()
                })
                .collect()
        })
        .collect()
}
