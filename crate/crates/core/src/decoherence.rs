//! Von Neumann measurement of a q-bit by an `N`-level apparatus.
//!
//! The interaction `|up><up| (x) H+ + |down><down| (x) H-` leaves the joint
//! state `a |up> F+ + b |down> F-` with pointer states `F(+/-) = exp(-i t H(+/-)) |I>`.
//! Joint vectors use the index `system * N + apparatus`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, eigh, gue, inner, norm, reduced_from_pure, tensor_vec, unitary_action, ComplexMatrix,
    DensityMatrix, HermitianOperator, SeededRng, StateVector,
};
use crate::scalar::C;

type C64 = C<f64>;

/// Interaction time used when none is given. Chosen so that GUE pointer
/// overlaps have reached the `1/N` plateau for `N` up to a few hundred.
pub const DEFAULT_INTERACTION_TIME: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct MeasurementModel {
    h_plus: HermitianOperator<f64>,
    h_minus: HermitianOperator<f64>,
    initial: StateVector<f64>,
    time: f64,
}

impl MeasurementModel {
    pub fn new(
        h_plus: HermitianOperator<f64>,
        h_minus: HermitianOperator<f64>,
        initial: StateVector<f64>,
        time: f64,
    ) -> Result<Self> {
        let n = h_plus.dim();
        if h_minus.dim() != n || initial.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "apparatus dimensions {n}, {}, {}",
                h_minus.dim(),
                initial.dim()
            )));
        }
        if !time.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            h_plus,
            h_minus,
            initial,
            time,
        })
    }

    /// Two-level apparatus whose pointers end up orthogonal at time `t`:
    /// `H+ = 0`, `H- = (pi / 2t) sigma_x`, `|I> = |0>`.
    pub fn orthogonal_pointers(time: f64) -> Result<Self> {
        if !(time > 0.0) {
            return Err(Error::PreconditionFailed("orthogonal pointers need t > 0".into()));
        }
        let s = std::f64::consts::FRAC_PI_2 / time;
        let hm = ComplexMatrix::from_real_rows(&[vec![0.0, s], vec![s, 0.0]]);
        Self::new(
            HermitianOperator::new(ComplexMatrix::zeros(2, 2))?,
            HermitianOperator::new(hm)?,
            StateVector::basis(2, 0),
            time,
        )
    }

    pub fn system_dim(&self) -> usize {
        2
    }

    pub fn apparatus_dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(&self, time: f64) -> Result<Self> {
        Self::new(self.h_plus.clone(), self.h_minus.clone(), self.initial.clone(), time)
    }

    pub fn h_plus(&self) -> &HermitianOperator<f64> {
        &self.h_plus
    }

    pub fn h_minus(&self) -> &HermitianOperator<f64> {
        &self.h_minus
    }

    pub fn initial(&self) -> &StateVector<f64> {
        &self.initial
    }

    /// `(F+, F-)`.
    pub fn pointer_states(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let i = self.initial.amplitudes();
        let fp = unitary_action(self.h_plus.matrix(), self.time, i)?;
        let fm = unitary_action(self.h_minus.matrix(), self.time, i)?;
        Ok((fp, fm))
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub joint: StateVector<f64>,
    pub f_plus: StateVector<f64>,
    pub f_minus: StateVector<f64>,
    /// `<F+|F->`.
    pub overlap: C64,
}

fn check_amplitudes(alpha: C64, beta: C64) -> Result<()> {
    let n2 = alpha.norm_sqr() + beta.norm_sqr();
    if !n2.is_finite() || (n2 - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm: n2.sqrt() });
    }
    Ok(())
}

fn branch_sum(alpha: C64, up: &[C64], beta: C64, down: &[C64]) -> Vec<C64> {
    up.iter().map(|z| *z * alpha).chain(down.iter().map(|z| *z * beta)).collect()
}

pub fn measure_evolution(model: &MeasurementModel, alpha: C64, beta: C64) -> Result<MeasurementOutcome> {
    check_amplitudes(alpha, beta)?;
    let (fp, fm) = model.pointer_states()?;
    let overlap = inner(&fp, &fm);
    let joint = branch_sum(alpha, &fp, beta, &fm);
    Ok(MeasurementOutcome {
        joint: StateVector::new(joint)?,
        f_plus: StateVector::new(fp)?,
        f_minus: StateVector::new(fm)?,
        overlap,
    })
}

/// State of the q-bit after tracing out the apparatus.
pub fn reduced_system_state(joint: &StateVector<f64>) -> Result<DensityMatrix<f64>> {
    let len = joint.dim();
    if len < 2 || !len.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!("joint state of length {len} is not 2 x N")));
    }
    let rho = reduced_from_pure(joint.amplitudes(), &[2, len / 2], &[0])?;
    DensityMatrix::new(rho.hermitian_part())
}

/// Which conditional Hamiltonians the scaling experiment draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Conditional {
    /// Independent GUE samples for `H+` and `H-`.
    #[default]
    Independent,
    /// `H- = H+`, so the pointers never separate.
    Identical,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapRow {
    pub dim: usize,
    pub trials: usize,
    pub mean_overlap_sq: f64,
    pub std_error: f64,
    /// `mean_overlap_sq * N`; about 1 on the random-state plateau.
    pub ratio: f64,
}

fn overlap_trial(dim: usize, time: f64, kind: Conditional, rng: &mut SeededRng) -> Result<f64> {
    let hp = gue::<f64>(dim, rng);
    let hm = match kind {
        Conditional::Independent => gue::<f64>(dim, rng),
        Conditional::Identical => hp.clone(),
    };
    let i = basis_vector::<f64>(dim, 0);
    let fp = unitary_action(&hp, time, &i)?;
    let fm = unitary_action(&hm, time, &i)?;
    Ok(inner(&fp, &fm).norm_sqr())
}

/// Mean `|<F+|F->|^2` over GUE conditional Hamiltonians, one row per
/// apparatus dimension. Trial `k` at dimension `N` draws from stream
/// `(N << 32) | k`, so rows do not depend on the thread count.
pub fn overlap_scaling_experiment(
    dims: &[usize],
    trials: usize,
    time: f64,
    seed: u64,
    kind: Conditional,
) -> Result<Vec<OverlapRow>> {
    if trials < 100 {
        return Err(Error::PreconditionFailed(format!("need at least 100 trials, got {trials}")));
    }
    if !time.is_finite() {
        return Err(Error::NonFinite);
    }
    dims.iter()
        .map(|&dim| {
            if dim == 0 {
                return Err(Error::DimensionMismatch("apparatus dimension 0".into()));
            }
            let samples = (0..trials)
                .into_par_iter()
                .map(|k| {
                    let mut rng = SeededRng::with_stream(seed, ((dim as u64) << 32) | k as u64);
                    overlap_trial(dim, time, kind, &mut rng)
                })
                .collect::<Result<Vec<f64>>>()?;
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(OverlapRow {
                dim,
                trials,
                mean_overlap_sq: mean,
                std_error: (var / n).sqrt(),
                ratio: mean * dim as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RepeatedMeasurement {
    /// Norm of the joint state on the sectors where the second apparatus
    /// reports the opposite branch from the system.
    pub cross_amplitude: f64,
    /// Trace distance between the first apparatus marginal with and without
    /// the second apparatus.
    pub marginal_shift: f64,
    /// `P(first, second)` for pointer readouts `+`/`-` at each apparatus.
    pub joint_probabilities: [[f64; 2]; 2],
}

/// Readout basis `(F+, component of F- orthogonal to F+)`; the second entry is
/// `None` when the pointers are parallel.
fn readout(fp: &[C64], fm: &[C64]) -> (Vec<C64>, Option<Vec<C64>>) {
    let ov = inner(fp, fm);
    let perp: Vec<C64> = fm.iter().zip(fp).map(|(m, p)| *m - *p * ov).collect();
    let n = norm(&perp);
    let perp = (n > 1e-12).then(|| perp.into_iter().map(|z| z / n).collect());
    (fp.to_vec(), perp)
}

fn trace_distance(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> Result<f64> {
    let d = (a - b).hermitian_part();
    Ok(0.5 * eigh(&d)?.values.iter().map(|x| x.abs()).sum::<f64>())
}

/// Measure the q-bit with `first` and then with an independent `second`
/// apparatus: `a |up> F+ F'+ + b |down> F- F'-` on `2 (x) N (x) N'`.
pub fn repeated_measurement(
    first: &MeasurementModel,
    second: &MeasurementModel,
    alpha: C64,
    beta: C64,
) -> Result<RepeatedMeasurement> {
    check_amplitudes(alpha, beta)?;
    let (n1, n2) = (first.apparatus_dim(), second.apparatus_dim());
    let (fp, fm) = first.pointer_states()?;
    let (gp, gm) = second.pointer_states()?;
    let up = tensor_vec(&fp, &gp);
    let down = tensor_vec(&fm, &gm);
    let joint = branch_sum(alpha, &up, beta, &down);

    let block = n1 * n2;
    // Contract the second apparatus against a readout vector within one system branch.
    let contract = |sys: usize, r: &[C64]| -> Vec<C64> {
        (0..n1)
            .map(|a| (0..n2).map(|b| r[b].conj() * joint[sys * block + a * n2 + b]).sum())
            .collect()
    };
    // Up pairs with the part of F'- that F'+ cannot produce, and vice versa.
    let mut cross = 0.0;
    if let Some(r) = readout(&gp, &gm).1 {
        cross += norm(&contract(0, &r)).powi(2);
    }
    if let Some(r) = readout(&gm, &gp).1 {
        cross += norm(&contract(1, &r)).powi(2);
    }

    let with_second = reduced_from_pure(&joint, &[2, n1, n2], &[1])?;
    let single = branch_sum(alpha, &fp, beta, &fm);
    let without = reduced_from_pure(&single, &[2, n1], &[1])?;
    let marginal_shift = trace_distance(&with_second, &without)?;

    let (r1p, r1m) = readout(&fp, &fm);
    let (r2p, r2m) = readout(&gp, &gm);
    let mut probs = [[0.0; 2]; 2];
    let firsts = [Some(r1p), r1m];
    let seconds = [Some(r2p), r2m];
    for (i, x) in firsts.iter().enumerate() {
        for (j, y) in seconds.iter().enumerate() {
            let (Some(x), Some(y)) = (x, y) else { continue };
            let xy = tensor_vec(x, y);
            let amp_up = inner(&xy, &joint[..block]);
            let amp_down = inner(&xy, &joint[block..]);
            probs[i][j] = amp_up.norm_sqr() + amp_down.norm_sqr();
        }
    }
    Ok(RepeatedMeasurement {
        cross_amplitude: cross.sqrt(),
        marginal_shift,
        joint_probabilities: probs,
    })
}
