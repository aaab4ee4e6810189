use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, tensor, ComplexMatrix, DensityMatrix};
use crate::nonlocal::chsh::{spin, MeasurementDirections};
use crate::scalar::C;

const SETTINGS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
const OUTCOMES: [f64; 2] = [1.0, -1.0];

/// `P(A, B | a, b)` indexed `[a][b][i][j]` with outcome index 0 for `+1` and 1 for `−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationBox {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

/// `{"table": [[P(++), P(+−), P(−+), P(−−)] for (a,b) in (0,0),(0,1),(1,0),(1,1)]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxFile {
    pub table: [[f64; 4]; 4],
}

impl CorrelationBox {
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for &(a, b) in &SETTINGS {
            let mut total = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let v = p[a][b][i][j];
                    if !v.is_finite() || v < -1e-12 {
                        return Err(Error::InvalidBox(format!("P(.,.|{a},{b}) has entry {v}")));
                    }
                    total += v;
                }
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidBox(format!("setting ({a},{b}) sums to {total}")));
            }
        }
        Ok(Self { p })
    }

    pub fn from_file(f: &BoxFile) -> Result<Self> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (row, &(a, b)) in f.table.iter().zip(&SETTINGS) {
            p[a][b] = [[row[0], row[1]], [row[2], row[3]]];
        }
        Self::new(p)
    }

    pub fn to_file(&self) -> BoxFile {
        BoxFile {
            table: SETTINGS.map(|(a, b)| {
                let q = self.p[a][b];
                [q[0][0], q[0][1], q[1][0], q[1][1]]
            }),
        }
    }

    /// `P(A, B | a, b)` for outcomes `A, B ∈ {+1, −1}`.
    pub fn prob(&self, outcome_a: i32, outcome_b: i32, a: usize, b: usize) -> f64 {
        self.p[a][b][usize::from(outcome_a < 0)][usize::from(outcome_b < 0)]
    }

    pub fn table(&self) -> &[[[[f64; 2]; 2]; 2]; 2] {
        &self.p
    }

    /// `E(a, b) = Σ A B P(A, B | a, b)`.
    pub fn correlator(&self, a: usize, b: usize) -> f64 {
        let mut e = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                e += OUTCOMES[i] * OUTCOMES[j] * self.p[a][b][i][j];
            }
        }
        e
    }

    fn as_vector(&self) -> Vec<f64> {
        SETTINGS
            .iter()
            .flat_map(|&(a, b)| [self.p[a][b][0][0], self.p[a][b][0][1], self.p[a][b][1][0], self.p[a][b][1][1]])
            .collect()
    }
}

/// `E(0,0) − E(0,1) + E(1,0) + E(1,1)`, setting 0 standing for the unprimed
/// direction.
pub fn box_chsh(bx: &CorrelationBox) -> f64 {
    bx.correlator(0, 0) - bx.correlator(0, 1) + bx.correlator(1, 0) + bx.correlator(1, 1)
}

/// Largest change of a one-party marginal under a change of the remote setting.
pub fn is_nonsignaling(bx: &CorrelationBox, tol: f64) -> (bool, f64) {
    let p = &bx.p;
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for i in 0..2 {
            let m0 = p[a][0][i][0] + p[a][0][i][1];
            let m1 = p[a][1][i][0] + p[a][1][i][1];
            worst = worst.max((m0 - m1).abs());
        }
    }
    for b in 0..2 {
        for j in 0..2 {
            let m0 = p[0][b][0][j] + p[0][b][1][j];
            let m1 = p[1][b][0][j] + p[1][b][1][j];
            worst = worst.max((m0 - m1).abs());
        }
    }
    (worst <= tol, worst)
}

/// Box reaching the algebraic maximum 4 of [`box_chsh`]: uniform on the two
/// outcome pairs with `A B = s(a, b)`, where `s(0, 1) = −1` and `s = +1`
/// otherwise.
pub fn pr_box() -> CorrelationBox {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for &(a, b) in &SETTINGS {
        let sign = if (a, b) == (0, 1) { -1.0 } else { 1.0 };
        for i in 0..2 {
            for j in 0..2 {
                if OUTCOMES[i] * OUTCOMES[j] == sign {
                    p[a][b][i][j] = 0.5;
                }
            }
        }
    }
    CorrelationBox { p }
}

/// Deterministic local strategy `(A_0, A_1, B_0, B_1)` with entries `±1`.
pub type Strategy = [i32; 4];

pub fn deterministic_box(s: Strategy) -> CorrelationBox {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for &(a, b) in &SETTINGS {
        p[a][b][usize::from(s[a] < 0)][usize::from(s[2 + b] < 0)] = 1.0;
    }
    CorrelationBox { p }
}

fn all_strategies() -> Vec<Strategy> {
    (0..16u32)
        .map(|bits| [0, 1, 2, 3].map(|k| if bits & (1 << k) == 0 { 1 } else { -1 }))
        .collect()
}

/// Born probabilities of spin measurements along the given directions.
pub fn quantum_box(state: &DensityMatrix<f64>, dirs: &MeasurementDirections) -> Result<CorrelationBox> {
    if state.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit state required, got dimension {}", state.dim())));
    }
    dirs.validate()?;
    let id = ComplexMatrix::<f64>::identity(2);
    let proj = |n: [f64; 3], s: f64| (&id + &spin(n).scale_real(s)).scale_real(0.5);
    let alice = [dirs.a, dirs.a_prime];
    let bob = [dirs.b, dirs.b_prime];
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for &(a, b) in &SETTINGS {
        for i in 0..2 {
            for j in 0..2 {
                let op = tensor(&proj(alice[a], OUTCOMES[i]), &proj(bob[b], OUTCOMES[j]));
                p[a][b][i][j] = state.expectation(&op).re.max(0.0);
            }
        }
    }
    CorrelationBox::new(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ViolatedInequality {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalMembership {
    pub local: bool,
    /// Weights over deterministic strategies, when local.
    pub weights: Option<Vec<(Strategy, f64)>>,
    /// Largest box-space distance between the mixture and the box.
    pub reconstruction_error: Option<f64>,
    pub violated: Option<ViolatedInequality>,
    /// Values of all eight CHSH variants, in a fixed order.
    pub chsh_variants: Vec<ViolatedInequality>,
}

/// Membership in the local polytope via positivity, non-signaling and the
/// eight CHSH variants; local boxes get non-negative weights on the 16
/// deterministic strategies.
pub fn local_membership(bx: &CorrelationBox, violation_tol: f64) -> Result<LocalMembership> {
    let (ok, dev) = is_nonsignaling(bx, 1e-10);
    if !ok {
        return Err(Error::NotNonSignaling(dev));
    }
    let e = [[bx.correlator(0, 0), bx.correlator(0, 1)], [bx.correlator(1, 0), bx.correlator(1, 1)]];
    let total = e[0][0] + e[0][1] + e[1][0] + e[1][1];
    let mut variants = Vec::with_capacity(8);
    for &(x, y) in &SETTINGS {
        let v = total - 2.0 * e[x][y];
        variants.push(ViolatedInequality {
            name: format!("chsh_minus_{x}{y}"),
            value: v,
        });
        variants.push(ViolatedInequality {
            name: format!("neg_chsh_minus_{x}{y}"),
            value: -v,
        });
    }
    let violated = variants
        .iter()
        .filter(|v| v.value > 2.0 + violation_tol)
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .cloned();
    if violated.is_some() {
        return Ok(LocalMembership {
            local: false,
            weights: None,
            reconstruction_error: None,
            violated,
            chsh_variants: variants,
        });
    }
    let strategies = all_strategies();
    let columns: Vec<Vec<f64>> = strategies.iter().map(|&s| deterministic_box(s).as_vector()).collect();
    let target = bx.as_vector();
    let w = nnls(&columns, &target);
    let mut recon = vec![0.0; target.len()];
    for (col, wi) in columns.iter().zip(&w) {
        for (r, c) in recon.iter_mut().zip(col) {
            *r += wi * c;
        }
    }
    let err = recon.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let weights = strategies.into_iter().zip(w).filter(|(_, w)| *w > 1e-14).collect();
    Ok(LocalMembership {
        local: true,
        weights: Some(weights),
        reconstruction_error: Some(err),
        violated: None,
        chsh_variants: variants,
    })
}

/// Lawson-Hanson non-negative least squares `min ‖Σ w_k c_k − t‖`, `w ≥ 0`.
fn nnls(columns: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = columns.len();
    let m = target.len();
    let mut w = vec![0.0; n];
    let mut passive = vec![false; n];
    let residual = |w: &[f64]| -> Vec<f64> {
        let mut r = target.to_vec();
        for (k, col) in columns.iter().enumerate() {
            for i in 0..m {
                r[i] -= w[k] * col[i];
            }
        }
        r
    };
    let solve = |passive: &[bool]| -> Vec<f64> {
        let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
        let a = ComplexMatrix::from_fn(m, idx.len(), |i, j| C::new(columns[idx[j]][i], 0.0));
        let b: Vec<C<f64>> = target.iter().map(|&x| C::new(x, 0.0)).collect();
        let z = least_squares(&a, &b, 1e-12).expect("finite system");
        let mut full = vec![0.0; n];
        for (j, &k) in idx.iter().enumerate() {
            full[k] = z[j].re;
        }
        full
    };
    for _ in 0..(3 * n) {
        let r = residual(&w);
        let grad: Vec<f64> = columns.iter().map(|c| c.iter().zip(&r).map(|(x, y)| x * y).sum()).collect();
        let Some(k) = (0..n)
            .filter(|&k| !passive[k] && grad[k] > 1e-12)
            .max_by(|&x, &y| grad[x].total_cmp(&grad[y]))
        else {
            break;
        };
        passive[k] = true;
        loop {
            let z = solve(&passive);
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > 1e-15) {
                w = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for j in (0..n).filter(|&j| passive[j] && z[j] <= 1e-15) {
                let denom = w[j] - z[j];
                if denom > 0.0 {
                    alpha = alpha.min(w[j] / denom);
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for j in 0..n {
                w[j] += alpha * (z[j] - w[j]);
                if passive[j] && w[j] <= 1e-15 {
                    passive[j] = false;
                    w[j] = 0.0;
                }
            }
        }
    }
    w
}
