//! Promise checking, exhaustive enumeration of promise-satisfying gate sets,
//! the reference fixture tables, and conjugation-equivalence classes.

mod equivalence;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use equivalence::{
    equivalence_classes, find_conjugator, ClassMethod, EquivalenceClass, EquivalenceClassification, EquivalenceMode,
};

use crate::error::{Error, Result};
use crate::gates::{NamedGate, SignMatrix};
use crate::switch::{all_products, OracleSet, PermutationSet};

/// Tolerance of the operator equalities in the promise.
pub const PROMISE_TOL: f64 = 1e-9;

/// Largest number of tuples `enumerate_promise_sets` will walk.
pub const MAX_ENUMERATION: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PromiseVerdict {
    pub satisfied: bool,
    /// Smallest satisfying column, when satisfied.
    pub y: Option<usize>,
    /// `min_y max_x ||Π_x - m_{x,y} Π_0||_max`.
    pub residual: f64,
}

/// Whether `Π_x = m_{x,y} Π_0` holds for every `x` and some column `y`,
/// as an exact operator equality (global phases included).
pub fn check_promise(oracle: &OracleSet, perms: &PermutationSet, m: &SignMatrix) -> Result<PromiseVerdict> {
    if m.order() != perms.p() {
        return Err(Error::DimensionMismatch { expected: perms.p(), found: m.order() });
    }
    let pis = all_products(oracle, perms)?;
    Ok(verdict_from_products(&pis, m))
}

fn verdict_from_products(pis: &[crate::tensor::ComplexMatrix], m: &SignMatrix) -> PromiseVerdict {
    let pi0 = &pis[0];
    let mut best = f64::INFINITY;
    let mut found = None;
    for y in 0..m.order() {
        let mut residual = 0f64;
        for (x, pi) in pis.iter().enumerate() {
            let s = m.entry(x, y) as f64;
            for (a, b) in pi.data().iter().zip(pi0.data()) {
                residual = residual.max((a - b * s).norm());
            }
        }
        if residual <= PROMISE_TOL && found.is_none() {
            found = Some(y);
        }
        best = best.min(residual);
    }
    PromiseVerdict { satisfied: found.is_some(), y: found, residual: best }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationCensus {
    pub total: usize,
    pub per_column: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromiseSet {
    /// Position of each gate in the enumerated gate list.
    pub indices: Vec<usize>,
    pub y: usize,
    pub oracle: OracleSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub census: EnumerationCensus,
    pub sets: Vec<PromiseSet>,
}

/// Walks every ordered `N`-tuple over `gates` (labels matter) and keeps the
/// ones satisfying the promise. Output order is the mixed-radix tuple order
/// with gate `A` most significant, independent of thread count.
pub fn enumerate_promise_sets(gates: &[NamedGate], perms: &PermutationSet, m: &SignMatrix) -> Result<Enumeration> {
    if gates.is_empty() {
        return Err(Error::Invalid("gate list is empty".into()));
    }
    if m.order() != perms.p() {
        return Err(Error::DimensionMismatch { expected: perms.p(), found: m.order() });
    }
    // validates unitarity and common dimension once
    OracleSet::new(gates.to_vec())?;
    let k = gates.len();
    let n = perms.n();
    let total = u32::try_from(n)
        .ok()
        .and_then(|n| k.checked_pow(n))
        .filter(|&t| t <= MAX_ENUMERATION)
        .ok_or_else(|| Error::LimitExceeded(format!("{k}^{n} tuples exceeds {MAX_ENUMERATION}")))?;

    let digits = |mut idx: usize| {
        let mut d = vec![0; n];
        for slot in d.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        d
    };
    let hits: Vec<(Vec<usize>, usize)> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let indices = digits(idx);
            let oracle = OracleSet::new(indices.iter().map(|&i| gates[i].clone()).collect()).ok()?;
            let pis = all_products(&oracle, perms).ok()?;
            verdict_from_products(&pis, m).y.map(|y| (indices, y))
        })
        .collect();

    let mut per_column = vec![0; m.order()];
    let sets = hits
        .into_iter()
        .map(|(indices, y)| {
            per_column[y] += 1;
            let oracle = OracleSet::new(indices.iter().map(|&i| gates[i].clone()).collect())?.with_claimed_y(y);
            Ok(PromiseSet { indices, y, oracle })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { census: EnumerationCensus { total: sets.len(), per_column }, sets })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// Four Pauli sets, one per column.
    Table1,
    /// Four sets, one per column, including a non-Pauli gate.
    Table2,
    /// Thirty Pauli sets with column multiplicities (16, 6, 4, 4).
    Thirty,
}

const TABLE1: [([&str; 4], usize); 4] = [
    (["1", "X", "1", "X"], 0),
    (["Z", "X", "Z", "X"], 1),
    (["1", "X", "Z", "X"], 2),
    (["Z", "X", "1", "X"], 3),
];

const TABLE2: [([&str; 4], usize); 4] = [
    (["(Z+X)/sqrt2", "(Z+X)/sqrt2", "1", "1"], 0),
    (["1", "X", "Z", "1"], 1),
    (["Z", "X", "1", "1"], 2),
    (["Z", "X", "1", "X"], 3),
];

// one string per gate, one character per set
const THIRTY_A: &str = "111Z11Z1ZZ1ZZZZZ1ZZZZZ1ZZZ1ZZZ";
const THIRTY_B: &str = "11Z11Z1Z1ZZ1ZZZXZ1ZXXXZ1XZ1XXX";
const THIRTY_C: &str = "1Z11Z11ZZ1ZZ1ZZXX1XZXYXZ1XZ1ZY";
const THIRTY_D: &str = "Z111ZZZ111ZZZ1ZZ1XXXYZZX1YXX1Y";
const THIRTY_Y: [(usize, usize); 4] = [(0, 16), (1, 6), (2, 4), (3, 4)];

/// The reference gate sets, each tagged with its promise column.
pub fn chart_fixture(which: Chart) -> Vec<OracleSet> {
    let build = |names: &[&str], y: usize| OracleSet::from_names(names).expect("fixture gates are known").with_claimed_y(y);
    match which {
        Chart::Table1 => TABLE1.iter().map(|(g, y)| build(g, *y)).collect(),
        Chart::Table2 => TABLE2.iter().map(|(g, y)| build(g, *y)).collect(),
        Chart::Thirty => {
            let ys = THIRTY_Y.iter().flat_map(|&(y, count)| std::iter::repeat_n(y, count));
            let rows = [THIRTY_A, THIRTY_B, THIRTY_C, THIRTY_D].map(|r| r.chars().collect::<Vec<_>>());
            ys.enumerate()
                .map(|(j, y)| {
                    let names: Vec<String> = rows.iter().map(|r| r[j].to_string()).collect();
                    let names: Vec<&str> = names.iter().map(String::as_str).collect();
                    build(&names, y)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::gates::{gate_set_g, hadamard_m4, pauli};
    use crate::tensor::{random_qubit_unitary, ComplexMatrix};

    fn sigma() -> PermutationSet {
        PermutationSet::sigma_star()
    }

    fn mat(name: &str) -> ComplexMatrix {
        crate::gates::gate_by_name(name).unwrap().matrix
    }

    #[test]
    fn table1_column3_satisfies_column3() {
        let o = OracleSet::from_names(&["Z", "X", "1", "X"]).unwrap();
        let v = check_promise(&o, &sigma(), &hadamard_m4()).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.y, Some(3));
        assert!(v.residual < 1e-15);
    }

    #[test]
    fn identity_satisfies_column0() {
        let o = OracleSet::from_names(&["1"; 4]).unwrap();
        assert_eq!(check_promise(&o, &sigma(), &hadamard_m4()).unwrap().y, Some(0));
    }

    #[test]
    fn zxy1_matches_hand_products() {
        // products written out by hand: Π_x = U_{σ(3)} U_{σ(2)} U_{σ(1)} U_{σ(0)}
        let (z, x, y, one) = (mat("Z"), mat("X"), mat("Y"), mat("1"));
        let pi0 = &(&(&one * &y) * &x) * &z; // ABCD
        let pi1 = &(&(&y * &one) * &z) * &x; // BADC
        let pi2 = &(&(&z * &one) * &x) * &y; // CBDA
        let pi3 = &(&(&x * &y) * &z) * &one; // DACB
        let m = hadamard_m4();
        let mut expected = None;
        for col in 0..4 {
            let ok = [&pi0, &pi1, &pi2, &pi3]
                .iter()
                .enumerate()
                .all(|(r, p)| p.approx_eq(&pi0.scale_real(m.entry(r, col) as f64), 1e-12));
            if ok && expected.is_none() {
                expected = Some(col);
            }
        }
        let o = OracleSet::from_names(&["Z", "X", "Y", "1"]).unwrap();
        let v = check_promise(&o, &sigma(), &m).unwrap();
        assert_eq!(v.y, expected);
        assert_eq!(v.satisfied, expected.is_some());
    }

    #[test]
    fn promise_is_phase_sensitive() {
        // i·1 on one gate only changes Π_x by a common phase: still satisfied
        let o = OracleSet::new(vec![
            NamedGate::new("i1", ComplexMatrix::identity(2).scale(num_complex::Complex64::new(0.0, 1.0))).unwrap(),
            pauli("1").unwrap(),
            pauli("1").unwrap(),
            pauli("1").unwrap(),
        ])
        .unwrap();
        assert_eq!(check_promise(&o, &sigma(), &hadamard_m4()).unwrap().y, Some(0));
        // Z and X anticommute: the sign flip between orderings must be visible
        let o = OracleSet::from_names(&["Z", "X", "1", "1"]).unwrap();
        assert_eq!(check_promise(&o, &sigma(), &hadamard_m4()).unwrap().y, Some(2));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let o = OracleSet::from_names(&["1"; 4]).unwrap();
        let m2 = crate::gates::sylvester_hadamard(1).unwrap();
        assert!(check_promise(&o, &sigma(), &m2).is_err());
    }

    #[test]
    fn full_gate_set_census() {
        let e = enumerate_promise_sets(&gate_set_g(), &sigma(), &hadamard_m4()).unwrap();
        assert_eq!(e.census.total, 460);
        assert_eq!(e.census.per_column, vec![316, 60, 42, 42]);
        assert_eq!(e.sets.len(), 460);
        assert!(e.sets.windows(2).all(|w| w[0].indices < w[1].indices));
    }

    #[test]
    fn identity_only_census() {
        let e = enumerate_promise_sets(&[pauli("1").unwrap()], &sigma(), &hadamard_m4()).unwrap();
        assert_eq!(e.census, EnumerationCensus { total: 1, per_column: vec![1, 0, 0, 0] });
    }

    fn brute_force_pauli_census() -> Vec<usize> {
        let names = ["1", "Z", "X", "Y"];
        let s = sigma();
        let m = hadamard_m4();
        let mut counts = vec![0; 4];
        for a in names {
            for b in names {
                for c in names {
                    for d in names {
                        let g = [mat(a), mat(b), mat(c), mat(d)];
                        let pis: Vec<ComplexMatrix> = (0..4)
                            .map(|x| {
                                let o = s.ordering(x);
                                &(&(&g[o[3]] * &g[o[2]]) * &g[o[1]]) * &g[o[0]]
                            })
                            .collect();
                        if let Some(y) = (0..4).find(|&y| {
                            (0..4).all(|x| pis[x].approx_eq(&pis[0].scale_real(m.entry(x, y) as f64), 1e-12))
                        }) {
                            counts[y] += 1;
                        }
                    }
                }
            }
        }
        counts
    }

    #[test]
    fn pauli_census_matches_brute_force() {
        let paulis: Vec<NamedGate> = ["1", "Z", "X", "Y"].iter().map(|n| pauli(n).unwrap()).collect();
        let e = enumerate_promise_sets(&paulis, &sigma(), &hadamard_m4()).unwrap();
        let brute = brute_force_pauli_census();
        assert_eq!(e.census.per_column, brute);
        assert_eq!(e.census.per_column, vec![PAULI_CENSUS[0], PAULI_CENSUS[1], PAULI_CENSUS[2], PAULI_CENSUS[3]]);
        assert_eq!(e.census.total, PAULI_CENSUS.iter().sum::<usize>());
    }

    const PAULI_CENSUS: [usize; 4] = [52, 36, 24, 24];

    #[test]
    fn census_independent_of_gate_order() {
        let mut gates = gate_set_g();
        gates.reverse();
        gates.swap(2, 7);
        let e = enumerate_promise_sets(&gates, &sigma(), &hadamard_m4()).unwrap();
        assert_eq!(e.census.per_column, vec![316, 60, 42, 42]);
    }

    #[test]
    fn enumeration_limits() {
        assert!(enumerate_promise_sets(&[], &sigma(), &hadamard_m4()).is_err());
        let big: Vec<NamedGate> = (0..100).map(|_| pauli("1").unwrap()).collect();
        let s = PermutationSet::from_labels(&["ABCDEFGH"]).unwrap();
        let m1 = crate::gates::sylvester_hadamard(0).unwrap();
        assert!(matches!(enumerate_promise_sets(&big, &s, &m1), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn fixtures_pass_their_columns() {
        for which in [Chart::Table1, Chart::Table2, Chart::Thirty] {
            for o in chart_fixture(which) {
                let v = check_promise(&o, &sigma(), &hadamard_m4()).unwrap();
                assert_eq!(v.y, o.claimed_y, "{which:?} {:?}", o.names());
            }
        }
    }

    #[test]
    fn fixture_shapes() {
        let t1 = chart_fixture(Chart::Table1);
        assert_eq!(t1.len(), 4);
        assert!(t1.iter().flat_map(|o| o.names()).all(|n| ["1", "Z", "X"].contains(&n.as_str())));
        assert_eq!(chart_fixture(Chart::Table2)[0].names(), vec!["(Z+X)/sqrt2", "(Z+X)/sqrt2", "1", "1"]);
        let thirty = chart_fixture(Chart::Thirty);
        assert_eq!(thirty.len(), 30);
        let mut mult = [0; 4];
        thirty.iter().for_each(|o| mult[o.claimed_y.unwrap()] += 1);
        assert_eq!(mult, [16, 6, 4, 4]);
    }

    #[test]
    fn conjugation_preserves_verdict() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = hadamard_m4();
        let e = enumerate_promise_sets(&gate_set_g(), &sigma(), &m).unwrap();
        for set in e.sets.iter().step_by(7) {
            let v = random_qubit_unitary(&mut rng);
            let conj = set.oracle.conjugated(&v);
            let verdict = check_promise(&conj, &sigma(), &m).unwrap();
            assert_eq!(verdict.y, Some(set.y));
        }
        for names in [["Z", "X", "Y", "1"], ["(Z+Y)/sqrt2", "X", "Z", "Y"]] {
            let o = OracleSet::from_names(&names).unwrap();
            let v = random_qubit_unitary(&mut rng);
            assert_eq!(
                check_promise(&o, &sigma(), &m).unwrap().y,
                check_promise(&o.conjugated(&v), &sigma(), &m).unwrap().y
            );
        }
    }
}
