use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, tensor, ComplexMatrix, DensityMatrix, HermitianOperator, SeededRng};

/// Unit vectors for the settings `a, a′` of one party and `b, b′` of the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirections {
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
}

/// File form; identical to the struct.
pub type DirectionsFile = MeasurementDirections;

fn xz(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl MeasurementDirections {
    pub fn new(a: [f64; 3], a_prime: [f64; 3], b: [f64; 3], b_prime: [f64; 3]) -> Result<Self> {
        let d = Self { a, a_prime, b, b_prime };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            let n = norm3(v);
            if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDirections(format!("{name} has norm {n}")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, [f64; 3]); 4] {
        [("a", self.a), ("a_prime", self.a_prime), ("b", self.b), ("b_prime", self.b_prime)]
    }

    /// Coplanar settings in the x-z plane at angles `0, −π/2` and `3π/4, π/4`;
    /// the singlet reaches `+2√2` on them.
    pub fn canonical() -> Self {
        use std::f64::consts::PI;
        Self {
            a: xz(0.0),
            a_prime: xz(-PI / 2.0),
            b: xz(3.0 * PI / 4.0),
            b_prime: xz(PI / 4.0),
        }
    }

    /// All four settings along one direction.
    pub fn collapsed(n: [f64; 3]) -> Result<Self> {
        Self::new(n, n, n, n)
    }

    pub fn random(rng: &mut SeededRng) -> Self {
        Self {
            a: rng.unit_vector3(),
            a_prime: rng.unit_vector3(),
            b: rng.unit_vector3(),
            b_prime: rng.unit_vector3(),
        }
    }
}

/// `n · σ`.
pub fn spin(n: [f64; 3]) -> ComplexMatrix<f64> {
    let [x, y, z] = pauli::<f64>();
    &(&x.scale_real(n[0]) + &y.scale_real(n[1])) + &z.scale_real(n[2])
}

/// `M = AB − AB′ + A′B + A′B′` with `A = a·σ ⊗ I`, `B = I ⊗ b·σ`.
pub fn chsh_operator(dirs: &MeasurementDirections) -> Result<HermitianOperator<f64>> {
    dirs.validate()?;
    let (a, ap, b, bp) = (spin(dirs.a), spin(dirs.a_prime), spin(dirs.b), spin(dirs.b_prime));
    let m = &(&(&tensor(&a, &b) - &tensor(&a, &bp)) + &tensor(&ap, &b)) + &tensor(&ap, &bp);
    HermitianOperator::new(m)
}

/// `tr(ρ M)`.
pub fn chsh_value(state: &DensityMatrix<f64>, dirs: &MeasurementDirections) -> Result<f64> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit state required, got dimension {}", state.dim())));
    }
    Ok(state.expectation(chsh_operator(dirs)?.matrix()).re)
}

/// `T_ij = tr(ρ σ_i ⊗ σ_j)`.
pub fn correlation_tensor(state: &DensityMatrix<f64>) -> Result<[[f64; 3]; 3]> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit state required, got dimension {}", state.dim())));
    }
    let p = pauli::<f64>();
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = state.expectation(&tensor(&p[i], &p[j])).re;
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChshOptimum {
    pub dirs: MeasurementDirections,
    pub value: f64,
    /// Best value among the random starting points.
    pub best_start: f64,
    pub restarts: usize,
}

fn apply(t: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| t[i][0] * v[0] + t[i][1] * v[1] + t[i][2] * v[2])
}

fn apply_t(t: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|j| t[0][j] * v[0] + t[1][j] * v[1] + t[2][j] * v[2])
}

fn add(u: [f64; 3], v: [f64; 3], s: f64) -> [f64; 3] {
    [u[0] + s * v[0], u[1] + s * v[1], u[2] + s * v[2]]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Unit vector along `v`, or `fallback` when `v` vanishes.
fn unit_or(v: [f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    if n > 1e-300 {
        v.map(|x| x / n)
    } else {
        fallback
    }
}

fn value_from_tensor(t: &[[f64; 3]; 3], d: &MeasurementDirections) -> f64 {
    dot(d.a, apply(t, add(d.b, d.b_prime, -1.0))) + dot(d.a_prime, apply(t, add(d.b, d.b_prime, 1.0)))
}

fn ascend(t: &[[f64; 3]; 3], mut d: MeasurementDirections) -> MeasurementDirections {
    let mut last = value_from_tensor(t, &d);
    for _ in 0..500 {
        d.a = unit_or(apply(t, add(d.b, d.b_prime, -1.0)), d.a);
        d.a_prime = unit_or(apply(t, add(d.b, d.b_prime, 1.0)), d.a_prime);
        d.b = unit_or(apply_t(t, add(d.a, d.a_prime, 1.0)), d.b);
        d.b_prime = unit_or(apply_t(t, add(d.a_prime, d.a, -1.0)), d.b_prime);
        let v = value_from_tensor(t, &d);
        if v - last <= 1e-15 * v.abs().max(1.0) {
            break;
        }
        last = v;
    }
    d
}

/// Multi-start coordinate ascent. Each step maximizes over one setting with
/// the others fixed; the optimum of a linear form on the sphere is its
/// normalized gradient.
pub fn maximize_chsh(state: &DensityMatrix<f64>, seed: u64, restarts: usize) -> Result<ChshOptimum> {
    let t = correlation_tensor(state)?;
    let restarts = restarts.max(1);
    let runs: Vec<(f64, f64, MeasurementDirections)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = SeededRng::with_stream(seed, r as u64);
            let start = MeasurementDirections::random(&mut rng);
            let s = value_from_tensor(&t, &start);
            let end = ascend(&t, start);
            (s, value_from_tensor(&t, &end), end)
        })
        .collect();
    let best_start = runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let (_, _, dirs) = runs
        .iter()
        .copied()
        .reduce(|x, y| if y.1 > x.1 { y } else { x })
        .expect("at least one restart");
    let value = chsh_value(state, &dirs)?;
    Ok(ChshOptimum {
        dirs,
        value,
        best_start,
        restarts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalBound {
    pub max: i32,
    /// `(A, A′, B, B′)` assignments reaching `|M| = max`.
    pub maximizers: Vec<[i32; 4]>,
    /// Value of every deterministic strategy.
    pub values: Vec<([i32; 4], i32)>,
}

/// Enumerate the 16 deterministic assignments of `±1` to `A, A′, B, B′`.
pub fn classical_max() -> ClassicalBound {
    let mut values = Vec::with_capacity(16);
    for bits in 0..16u32 {
        let s = [0, 1, 2, 3].map(|k| if bits & (1 << k) == 0 { 1i32 } else { -1 });
        let [a, ap, b, bp] = s;
        values.push((s, a * b - a * bp + ap * b + ap * bp));
    }
    let max = values.iter().map(|v| v.1.abs()).max().unwrap_or(0);
    let maximizers = values.iter().filter(|v| v.1.abs() == max).map(|v| v.0).collect();
    ClassicalBound { max, maximizers, values }
}
