use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::io::ComplexEntry;
use crate::linalg::{inner, normalized};
use crate::scalar::C;
use crate::tolerance::Tolerances;

type C64 = C<f64>;

/// On-disk form of a ray set: `{"dim", "rays", "contexts"}` plus metadata and
/// a `sha256:` checksum over the canonical JSON of the three data fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KsFile {
    #[serde(default)]
    pub version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub provenance: String,
    pub dim: usize,
    pub rays: Vec<Vec<ComplexEntry>>,
    pub contexts: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checksum: Option<String>,
}

#[derive(Serialize)]
struct Canonical<'a> {
    dim: usize,
    rays: Vec<Vec<[f64; 2]>>,
    contexts: &'a [Vec<usize>],
}

impl KsFile {
    pub fn compute_checksum(&self) -> Result<String> {
        let canon = Canonical {
            dim: self.dim,
            rays: self
                .rays
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|e| {
                            let z: C64 = e.to_complex();
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
            contexts: &self.contexts,
        };
        let bytes = serde_json::to_vec(&canon)?;
        let digest = Sha256::digest(&bytes);
        Ok(format!("sha256:{}", digest.iter().map(|b| format!("{b:02x}")).collect::<String>()))
    }

    pub fn verify_checksum(&self) -> Result<()> {
        if let Some(expected) = &self.checksum {
            let computed = self.compute_checksum()?;
            if &computed != expected {
                return Err(Error::Checksum {
                    expected: expected.clone(),
                    computed,
                });
            }
        }
        Ok(())
    }
}

/// Rays of `C^dim` grouped into orthonormal bases.
#[derive(Debug, Clone)]
pub struct KsContextSet {
    name: String,
    dim: usize,
    rays: Vec<Vec<C64>>,
    contexts: Vec<Vec<usize>>,
    /// Rays whose normalized overlap modulus is within this of 1 are one variable.
    identify_tol: f64,
}

impl KsContextSet {
    pub fn new(name: impl Into<String>, dim: usize, rays: Vec<Vec<C64>>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_tol(name, dim, rays, contexts, &Tolerances::default())
    }

    /// Rays are normalized; every context must be a full set of mutually
    /// orthogonal rays.
    pub fn with_tol(
        name: impl Into<String>,
        dim: usize,
        rays: Vec<Vec<C64>>,
        contexts: Vec<Vec<usize>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::MalformedContexts(m));
        let mut unit = Vec::with_capacity(rays.len());
        for (k, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return bad(format!("ray {k} has {} components, expected {dim}", r.len()));
            }
            match normalized(r) {
                Some(u) if u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => unit.push(u),
                _ => return bad(format!("ray {k} is zero or not finite")),
            }
        }
        for (c, ctx) in contexts.iter().enumerate() {
            if ctx.len() != dim {
                return bad(format!("context {c} has {} rays, expected {dim}", ctx.len()));
            }
            if let Some(&i) = ctx.iter().find(|&&i| i >= unit.len()) {
                return bad(format!("context {c} refers to missing ray {i}"));
            }
            for x in 0..dim {
                for y in x + 1..dim {
                    let ov = inner(&unit[ctx[x]], &unit[ctx[y]]).norm();
                    if ov > tol.orthogonality {
                        return bad(format!(
                            "context {c}: rays {} and {} have overlap {ov:e}",
                            ctx[x], ctx[y]
                        ));
                    }
                }
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            rays: unit,
            contexts,
            identify_tol: tol.ray_identification,
        })
    }

    pub fn from_file(f: &KsFile) -> Result<Self> {
        Self::from_file_with_tol(f, &Tolerances::default())
    }

    pub fn from_file_with_tol(f: &KsFile, tol: &Tolerances) -> Result<Self> {
        f.verify_checksum()?;
        let rays = f.rays.iter().map(|r| r.iter().map(|e| e.to_complex()).collect()).collect();
        Self::with_tol(f.name.clone(), f.dim, rays, f.contexts.clone(), tol)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<C64>] {
        &self.rays
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    /// Same rays with only the listed contexts kept.
    pub fn with_contexts(&self, keep: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            dim: self.dim,
            rays: self.rays.clone(),
            contexts: keep.iter().map(|&c| self.contexts[c].clone()).collect(),
            identify_tol: self.identify_tol,
        }
    }

    /// Variable index of every ray after identifying rays equal up to phase.
    pub fn ray_variables(&self) -> (Vec<usize>, usize) {
        let mut var = vec![usize::MAX; self.rays.len()];
        let mut reps: Vec<usize> = Vec::new();
        for k in 0..self.rays.len() {
            match reps
                .iter()
                .position(|&r| inner(&self.rays[r], &self.rays[k]).norm() >= 1.0 - self.identify_tol)
            {
                Some(v) => var[k] = v,
                None => {
                    var[k] = reps.len();
                    reps.push(k);
                }
            }
        }
        (var, reps.len())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KsStats {
    /// Branch assignments tried.
    pub nodes: u64,
    /// Branches refuted.
    pub backtracks: u64,
    pub max_depth: usize,
    /// Distinct rays after identification.
    pub variables: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KsVerdict {
    pub satisfiable: bool,
    /// Value of every input ray in a satisfying assignment.
    pub witness: Option<Vec<u8>>,
    pub stats: KsStats,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unset,
    Zero,
    One,
}

struct Search<'a> {
    contexts: &'a [Vec<usize>],
    stats: KsStats,
}

impl Search<'_> {
    /// Unit propagation; `false` on a conflict.
    fn propagate(&self, vals: &mut [Val]) -> bool {
        loop {
            let mut changed = false;
            for ctx in self.contexts {
                let ones = ctx.iter().filter(|&&v| vals[v] == Val::One).count();
                let unset: Vec<usize> = ctx.iter().copied().filter(|&v| vals[v] == Val::Unset).collect();
                match ones {
                    0 if unset.is_empty() => return false,
                    0 if unset.len() == 1 => {
                        vals[unset[0]] = Val::One;
                        changed = true;
                    }
                    0 => {}
                    1 => {
                        for v in unset {
                            vals[v] = Val::Zero;
                            changed = true;
                        }
                    }
                    _ => return false,
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn solve(&mut self, mut vals: Vec<Val>, depth: usize) -> Option<Vec<Val>> {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        if !self.propagate(&mut vals) {
            return None;
        }
        let open = self
            .contexts
            .iter()
            .find(|ctx| !ctx.iter().any(|&v| vals[v] == Val::One));
        let Some(ctx) = open else {
            return Some(vals);
        };
        let choices: Vec<usize> = ctx.iter().copied().filter(|&v| vals[v] == Val::Unset).collect();
        for v in choices {
            self.stats.nodes += 1;
            let mut next = vals.clone();
            next[v] = Val::One;
            if let Some(done) = self.solve(next, depth + 1) {
                return Some(done);
            }
            self.stats.backtracks += 1;
        }
        None
    }
}

/// Search for a 0/1 assignment with exactly one 1 in every context. An
/// unsatisfiable verdict means the whole search tree was refuted.
pub fn ks_verify(set: &KsContextSet) -> KsVerdict {
    let (var, n) = set.ray_variables();
    let contexts: Vec<Vec<usize>> = set
        .contexts
        .iter()
        .map(|c| c.iter().map(|&r| var[r]).collect())
        .collect();
    let mut search = Search {
        contexts: &contexts,
        stats: KsStats {
            variables: n,
            ..KsStats::default()
        },
    };
    let result = search.solve(vec![Val::Unset; n], 0);
    let witness = result.map(|vals| var.iter().map(|&v| u8::from(vals[v] == Val::One)).collect());
    KsVerdict {
        satisfiable: witness.is_some(),
        witness,
        stats: search.stats,
    }
}

pub const BUILTIN_KS_SETS: [&str; 2] = ["cabello18", "peres33"];

/// Bundled ray sets by name.
pub fn builtin_ks_set(name: &str) -> Option<KsFile> {
    let text = match name {
        "cabello18" => include_str!("../../sets/cabello18.json"),
        "peres33" => include_str!("../../sets/peres33.json"),
        _ => return None,
    };
    Some(serde_json::from_str(text).expect("bundled set is valid JSON"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(name: &str) -> KsContextSet {
        KsContextSet::from_file(&builtin_ks_set(name).unwrap()).unwrap()
    }

    fn check(set: &KsContextSet, w: &[u8]) -> bool {
        set.contexts().iter().all(|c| c.iter().map(|&r| w[r] as usize).sum::<usize>() == 1)
    }

    #[test]
    fn bundled_checksums_match() {
        for name in BUILTIN_KS_SETS {
            let f = builtin_ks_set(name).unwrap();
            assert_eq!(f.checksum.clone().unwrap(), f.compute_checksum().unwrap());
        }
    }

    #[test]
    fn tampered_file_rejected() {
        let mut f = builtin_ks_set("cabello18").unwrap();
        f.contexts.swap(0, 1);
        assert!(matches!(KsContextSet::from_file(&f), Err(Error::Checksum { .. })));
    }

    #[test]
    fn single_context_satisfiable() {
        let rays = (0..3).map(|k| crate::linalg::basis_vector(3, k)).collect();
        let set = KsContextSet::new("basis", 3, rays, vec![vec![0, 1, 2]]).unwrap();
        let v = ks_verify(&set);
        assert!(v.satisfiable);
        assert!(check(&set, v.witness.as_ref().unwrap()));
    }

    #[test]
    fn cabello_unsatisfiable_with_parity_reason() {
        let set = load("cabello18");
        let mut count = vec![0usize; set.rays().len()];
        for c in set.contexts() {
            for &r in c {
                count[r] += 1;
            }
        }
        assert!(count.iter().all(|&n| n == 2));
        assert_eq!(set.contexts().len() % 2, 1);
        let v = ks_verify(&set);
        assert!(!v.satisfiable);
        assert!(v.stats.nodes > 0);
    }

    #[test]
    fn dropping_any_context_restores_assignment() {
        let set = load("cabello18");
        let n = set.contexts().len();
        for drop in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&c| c != drop).collect();
            let sub = set.with_contexts(&keep);
            let v = ks_verify(&sub);
            assert!(v.satisfiable, "dropping {drop}");
            assert!(check(&sub, v.witness.as_ref().unwrap()));
        }
    }

    #[test]
    fn peres_triples_validate() {
        let set = load("peres33");
        assert_eq!(set.dim(), 3);
        assert_eq!(set.rays().len(), 33);
        assert_eq!(set.ray_variables().1, 33);
    }

    #[test]
    fn non_orthogonal_context_rejected() {
        let s = 0.5f64.sqrt();
        let rays = vec![
            vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
            vec![C::new(s, 0.0), C::new(s, 0.0)],
        ];
        assert!(matches!(
            KsContextSet::new("bad", 2, rays, vec![vec![0, 1]]),
            Err(Error::MalformedContexts(_))
        ));
    }

    #[test]
    fn phase_multiples_identified() {
        let rays = vec![
            crate::linalg::basis_vector(2, 0),
            crate::linalg::basis_vector(2, 1),
            vec![C::new(0.0, 0.0), C::new(0.0, 1.0)],
        ];
        let set = KsContextSet::new("p", 2, rays, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let (var, n) = set.ray_variables();
        assert_eq!(n, 2);
        assert_eq!(var[1], var[2]);
        let v = ks_verify(&set);
        assert!(v.satisfiable);
    }
}
