use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complement entry: index into `elements` or one of its labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

/// On-disk form: `{"elements": [...], "leq": [[bool...]...], "complement": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub complement: Vec<ElementRef>,
}

/// Finite bounded lattice with an orthocomplementation candidate.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    comp: Vec<usize>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    pub fn from_file(f: &LatticeFile) -> Result<Self> {
        let n = f.elements.len();
        let bad = |m: String| Err(Error::MalformedTable(m));
        if n == 0 {
            return bad("no elements".into());
        }
        if f.leq.len() != n || f.leq.iter().any(|r| r.len() != n) {
            return bad(format!("leq must be a {n}×{n} table"));
        }
        if f.complement.len() != n {
            return bad(format!("complement must list {n} entries"));
        }
        for (i, l) in f.elements.iter().enumerate() {
            if f.elements[..i].contains(l) {
                return bad(format!("duplicate element label {l:?}"));
            }
        }
        let comp = f
            .complement
            .iter()
            .map(|r| match r {
                ElementRef::Index(i) if *i < n => Ok(*i),
                ElementRef::Index(i) => Err(Error::MalformedTable(format!("complement index {i} out of range"))),
                ElementRef::Label(s) => f
                    .elements
                    .iter()
                    .position(|e| e == s)
                    .ok_or_else(|| Error::MalformedTable(format!("unknown complement label {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let leq = f.leq.clone();
        for a in 0..n {
            if !leq[a][a] {
                return bad(format!("leq is not reflexive at {:?}", f.elements[a]));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return bad(format!("leq is not antisymmetric on {:?}, {:?}", f.elements[a], f.elements[b]));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return bad(format!(
                            "leq is not transitive on {:?}, {:?}, {:?}",
                            f.elements[a], f.elements[b], f.elements[c]
                        ));
                    }
                }
            }
        }
        let bound = |lower: bool, a: usize, b: usize| -> Option<usize> {
            let cands: Vec<usize> = (0..n)
                .filter(|&c| if lower { leq[c][a] && leq[c][b] } else { leq[a][c] && leq[b][c] })
                .collect();
            cands
                .iter()
                .copied()
                .find(|&c| cands.iter().all(|&d| if lower { leq[d][c] } else { leq[c][d] }))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = bound(true, a, b).ok_or_else(|| {
                    Error::MalformedTable(format!("{:?} and {:?} have no meet", f.elements[a], f.elements[b]))
                })?;
                join[a][b] = bound(false, a, b).ok_or_else(|| {
                    Error::MalformedTable(format!("{:?} and {:?} have no join", f.elements[a], f.elements[b]))
                })?;
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| leq[b][x])).expect("a finite lattice has a bottom");
        let top = (0..n).find(|&t| (0..n).all(|x| leq[x][t])).expect("a finite lattice has a top");
        Ok(Self {
            labels: f.elements.clone(),
            leq,
            comp,
            meet,
            join,
            bottom,
            top,
        })
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            name: None,
            elements: self.labels.clone(),
            leq: self.leq.clone(),
            complement: self.comp.iter().map(|&i| ElementRef::Label(self.labels[i].clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn complement(&self, a: usize) -> usize {
        self.comp[a]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// `a = (a ∧ b) ∨ (a ∧ b′)`.
    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.join(self.meet(a, b), self.meet(a, self.comp[b])) == a
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeAudit {
    pub elements: usize,
    pub is_ortholattice: bool,
    pub ortholattice_failures: Vec<String>,
    pub is_orthomodular: bool,
    /// A pair `(a, b)` with `b ⪯ a` and `(a ∧ b′) ∨ b ≠ a`.
    pub orthomodular_counterexample: Option<(String, String)>,
    pub atoms: Vec<String>,
    pub is_atomistic: bool,
    pub covering_holds: bool,
    pub center: Vec<String>,
    pub is_irreducible: bool,
}

/// Exhaustive audit of a finite lattice.
pub fn lattice_audit(l: &FiniteLattice) -> LatticeAudit {
    let n = l.len();
    let name = |i: usize| l.labels[i].clone();
    let mut failures = Vec::new();
    for a in 0..n {
        let ac = l.comp[a];
        if l.comp[ac] != a {
            failures.push(format!("complement is not an involution at {}", name(a)));
        }
        if l.meet(a, ac) != l.bottom {
            failures.push(format!("{} ∧ {}′ ≠ 0", name(a), name(a)));
        }
        if l.join(a, ac) != l.top {
            failures.push(format!("{} ∨ {}′ ≠ 1", name(a), name(a)));
        }
        for b in 0..n {
            if l.leq(a, b) && !l.leq(l.comp[b], ac) {
                failures.push(format!("complement does not reverse {} ⪯ {}", name(a), name(b)));
            }
        }
    }
    let is_ortholattice = failures.is_empty();

    let mut counterexample = None;
    'outer: for a in 0..n {
        for b in 0..n {
            if l.leq(b, a) && l.join(l.meet(a, l.comp[b]), b) != a {
                counterexample = Some((name(a), name(b)));
                break 'outer;
            }
        }
    }

    let atoms: Vec<usize> = (0..n)
        .filter(|&p| p != l.bottom && (0..n).all(|x| x == l.bottom || x == p || !l.leq(x, p)))
        .collect();
    let is_atomistic = (0..n).all(|x| {
        let below = atoms.iter().filter(|&&p| l.leq(p, x)).fold(l.bottom, |acc, &p| l.join(acc, p));
        below == x
    });
    let covering_holds = atoms.iter().all(|&p| {
        (0..n).filter(|&b| l.meet(p, b) == l.bottom).all(|b| {
            let pb = l.join(p, b);
            !(0..n).any(|c| c != b && c != pb && l.leq(b, c) && l.leq(c, pb))
        })
    });
    let center: Vec<usize> = (0..n)
        .filter(|&c| (0..n).all(|x| l.commutes(x, c) && l.commutes(c, x)))
        .collect();
    let is_irreducible = center.iter().all(|&c| c == l.bottom || c == l.top);

    LatticeAudit {
        elements: n,
        is_ortholattice,
        ortholattice_failures: failures,
        is_orthomodular: is_ortholattice && counterexample.is_none(),
        orthomodular_counterexample: counterexample,
        atoms: atoms.into_iter().map(name).collect(),
        is_atomistic,
        covering_holds,
        center: center.into_iter().map(name).collect(),
        is_irreducible,
    }
}

pub const BUILTIN_LATTICES: [&str; 3] = ["boolean3", "mo2", "o6"];

/// `boolean3` (subsets of a 3-set), `mo2` (Chinese lantern) or `o6`
/// (benzene ring).
pub fn builtin_lattice(name: &str) -> Option<LatticeFile> {
    match name {
        "boolean3" => {
            let labels = ["0", "a", "b", "c", "ab", "ac", "bc", "1"];
            let masks = [0u8, 1, 2, 4, 3, 5, 6, 7];
            let leq = masks.iter().map(|&x| masks.iter().map(|&y| x & !y == 0).collect()).collect();
            let complement = masks
                .iter()
                .map(|&x| ElementRef::Index(masks.iter().position(|&y| y == 7 & !x).expect("closed")))
                .collect();
            Some(LatticeFile {
                name: Some(name.into()),
                elements: labels.iter().map(|s| s.to_string()).collect(),
                leq,
                complement,
            })
        }
        "mo2" => {
            let labels = ["0", "a", "a'", "b", "b'", "1"];
            let leq = (0..6)
                .map(|i| (0..6).map(|j| i == j || i == 0 || j == 5).collect())
                .collect();
            Some(LatticeFile {
                name: Some(name.into()),
                elements: labels.iter().map(|s| s.to_string()).collect(),
                leq,
                complement: [5, 2, 1, 4, 3, 0].iter().map(|&i| ElementRef::Index(i)).collect(),
            })
        }
        "o6" => {
            // 0 < a < b < 1 and 0 < b' < a' < 1
            let labels = ["0", "a", "b", "b'", "a'", "1"];
            let rel = |i: usize, j: usize| -> bool {
                i == j || i == 0 || j == 5 || (i == 1 && j == 2) || (i == 3 && j == 4)
            };
            let leq = (0..6).map(|i| (0..6).map(|j| rel(i, j)).collect()).collect();
            Some(LatticeFile {
                name: Some(name.into()),
                elements: labels.iter().map(|s| s.to_string()).collect(),
                leq,
                complement: [5, 4, 3, 2, 1, 0].iter().map(|&i| ElementRef::Index(i)).collect(),
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn audit(name: &str) -> LatticeAudit {
        lattice_audit(&FiniteLattice::from_file(&builtin_lattice(name).unwrap()).unwrap())
    }

    #[test]
    fn boolean_cube() {
        let r = audit("boolean3");
        assert!(r.is_ortholattice && r.is_orthomodular && r.is_atomistic && r.covering_holds);
        assert_eq!(r.atoms, vec!["a", "b", "c"]);
        assert_eq!(r.center.len(), 8);
        assert!(!r.is_irreducible);
    }

    #[test]
    fn chinese_lantern() {
        let r = audit("mo2");
        assert!(r.is_ortholattice && r.is_orthomodular && r.is_irreducible);
        assert_eq!(r.atoms.len(), 4);
        assert_eq!(r.center, vec!["0", "1"]);
    }

    #[test]
    fn benzene_ring() {
        let r = audit("o6");
        assert!(r.is_ortholattice);
        assert!(!r.is_orthomodular);
        assert_eq!(r.orthomodular_counterexample, Some(("b".into(), "a".into())));
    }

    #[test]
    fn malformed_tables() {
        let mut f = builtin_lattice("mo2").unwrap();
        f.leq.pop();
        assert!(matches!(FiniteLattice::from_file(&f), Err(Error::MalformedTable(_))));
        let mut f = builtin_lattice("mo2").unwrap();
        f.complement[0] = ElementRef::Label("zz".into());
        assert!(FiniteLattice::from_file(&f).is_err());
        // two incomparable maximal elements: no join
        let f = LatticeFile {
            name: None,
            elements: vec!["0".into(), "x".into(), "y".into()],
            leq: vec![vec![true, true, true], vec![false, true, false], vec![false, false, true]],
            complement: vec![ElementRef::Index(0), ElementRef::Index(2), ElementRef::Index(1)],
        };
        assert!(matches!(FiniteLattice::from_file(&f), Err(Error::MalformedTable(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = builtin_lattice("o6").unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: LatticeFile = serde_json::from_str(&s).unwrap();
        let l = FiniteLattice::from_file(&back).unwrap();
        assert_eq!(l.to_file().elements, f.elements);
    }
}
