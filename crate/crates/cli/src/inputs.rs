//! Presets and the JSON file formats accepted on the command line.
//!
//! Gate sets: `[{"name": "A", "matrix": [[[re, im], [re, im]], [[re, im], [re, im]]]}, ...]`,
//! where an entry may also be a bare gate name such as `"X"` or
//! `"(Z+X)/sqrt2"`. An object form `{"gates": [...], "claimed_y": 2}` is also
//! accepted. Permutation sets are arrays of label strings (`["ABCD", ...]`)
//! and sign matrices are arrays of integer rows.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;
use serde_json::Value;
use switchlab_core::gates::{gate_by_name, gate_set_g, hadamard_m4, pauli, sylvester_hadamard, NamedGate, SignMatrix};
use switchlab_core::oracle::{chart_fixture, Chart};
use switchlab_core::switch::{OracleSet, PermutationSet};
use switchlab_core::tensor::ComplexMatrix;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Name(String),
    Full { name: String, matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GateFile {
    Bare(Vec<GateSpec>),
    Wrapped { gates: Vec<GateSpec>, claimed_y: Option<usize> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PermFile {
    Bare(Vec<String>),
    Wrapped { permutations: Vec<String> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SignFile {
    Bare(Vec<Vec<i64>>),
    Wrapped { rows: Vec<Vec<i64>> },
}

#[derive(Debug, Clone, Deserialize)]
pub struct ComponentSpec {
    pub gates: Vec<GateSpec>,
    pub y: usize,
    pub weight: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed {path}: {e}")))
}

fn looks_like_file(s: &str) -> bool {
    s.ends_with(".json") || Path::new(s).is_file()
}

impl GateSpec {
    pub fn resolve(&self) -> Result<NamedGate, CliError> {
        match self {
            GateSpec::Name(n) => Ok(gate_by_name(n)?),
            GateSpec::Full { name, matrix } => {
                let rows: Vec<Vec<C64>> = matrix.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Usage(format!("gate {name:?} is not square")));
                }
                let m = ComplexMatrix::new(n, n, rows.into_iter().flatten().collect())?;
                Ok(NamedGate::new(name.clone(), m)?)
            }
        }
    }
}

pub fn resolve_gates(specs: &[GateSpec]) -> Result<Vec<NamedGate>, CliError> {
    specs.iter().map(GateSpec::resolve).collect()
}

/// `G` (the ten-gate set), `pauli`, `identity-only`, or a gate file.
pub fn gate_set(name: &str) -> Result<Vec<NamedGate>, CliError> {
    match name {
        "G" | "g" => Ok(gate_set_g()),
        "pauli" => Ok(["1", "Z", "X", "Y"].iter().map(|n| pauli(n)).collect::<Result<_, _>>()?),
        "identity-only" => Ok(vec![pauli("1")?]),
        f if looks_like_file(f) => {
            let (specs, _) = gate_file(f)?;
            resolve_gates(&specs)
        }
        other => Err(CliError::Usage(format!("unknown gate set {other:?} (expected G, pauli, identity-only or a JSON file)"))),
    }
}

fn gate_file(path: &str) -> Result<(Vec<GateSpec>, Option<usize>), CliError> {
    Ok(match read_json::<GateFile>(path)? {
        GateFile::Bare(g) => (g, None),
        GateFile::Wrapped { gates, claimed_y } => (gates, claimed_y),
    })
}

/// `sigma-star`, a comma-separated label list such as `ABCD,BADC`, or a file.
pub fn permutations(spec: &str) -> Result<PermutationSet, CliError> {
    match spec {
        "sigma-star" | "sigma*" => Ok(PermutationSet::sigma_star()),
        f if looks_like_file(f) => {
            let labels = match read_json::<PermFile>(f)? {
                PermFile::Bare(l) => l,
                PermFile::Wrapped { permutations } => permutations,
            };
            Ok(PermutationSet::from_labels(&labels)?)
        }
        list => {
            let labels: Vec<&str> = list.split(',').map(str::trim).collect();
            Ok(PermutationSet::from_labels(&labels)?)
        }
    }
}

/// `M4`, `sylvester` (of the order `p`), or a file of integer rows.
pub fn sign_matrix(spec: &str, p: usize) -> Result<SignMatrix, CliError> {
    let m = match spec {
        "M4" | "m4" => hadamard_m4(),
        "sylvester" => {
            if !p.is_power_of_two() {
                return Err(CliError::Usage(format!("no Sylvester matrix of order {p}")));
            }
            sylvester_hadamard(p.trailing_zeros())?
        }
        f if looks_like_file(f) => {
            let rows = match read_json::<SignFile>(f)? {
                SignFile::Bare(r) => r,
                SignFile::Wrapped { rows } => rows,
            };
            SignMatrix::new(rows)?
        }
        other => return Err(CliError::Usage(format!("unknown sign matrix {other:?} (expected M4, sylvester or a JSON file)"))),
    };
    if m.order() != p {
        return Err(CliError::Usage(format!("sign matrix has order {}, permutation set has {p} orderings", m.order())));
    }
    Ok(m)
}

pub fn chart(name: &str) -> Option<Chart> {
    match name {
        "1" | "table1" => Some(Chart::Table1),
        "2" | "table2" => Some(Chart::Table2),
        "30" | "thirty" => Some(Chart::Thirty),
        _ => None,
    }
}

/// The oracle of a fixture table with the given column (the `index`-th
/// such set), or the single oracle stored in a gate file.
pub fn oracle(table: &str, column: Option<usize>, index: usize) -> Result<OracleSet, CliError> {
    if let Some(c) = chart(table) {
        let sets = chart_fixture(c);
        let y = column.ok_or_else(|| CliError::Usage("--column is required for fixture tables".into()))?;
        return sets
            .into_iter()
            .filter(|o| o.claimed_y == Some(y))
            .nth(index)
            .ok_or_else(|| CliError::Usage(format!("table {table} has no set #{index} for column {y}")));
    }
    if looks_like_file(table) {
        let (specs, claimed) = gate_file(table)?;
        let mut o = OracleSet::new(resolve_gates(&specs)?)?;
        if let Some(y) = column.or(claimed) {
            o = o.with_claimed_y(y);
        }
        return Ok(o);
    }
    Err(CliError::Usage(format!("unknown table {table:?} (expected 1, 2, thirty or a JSON file)")))
}

pub fn components(path: &str) -> Result<Vec<ComponentSpec>, CliError> {
    read_json(path)
}

/// `0`, `1`, `+`, `-` or a JSON array of `[re, im]` amplitudes.
pub fn target_state(spec: &str) -> Result<switchlab_core::tensor::PureState, CliError> {
    use switchlab_core::tensor::PureState;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match spec {
        "0" => PureState::basis(2, 0),
        "1" => PureState::basis(2, 1),
        "+" => PureState::new(vec![C64::new(r, 0.0), C64::new(r, 0.0)])?,
        "-" => PureState::new(vec![C64::new(r, 0.0), C64::new(-r, 0.0)])?,
        json => {
            let v: Value = serde_json::from_str(json).map_err(|_| CliError::Usage(format!("bad target state {json:?}")))?;
            let amps: Vec<[f64; 2]> = serde_json::from_value(v).map_err(|_| CliError::Usage(format!("bad target state {json:?}")))?;
            PureState::normalized(amps.into_iter().map(|[re, im]| C64::new(re, im)).collect())?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        assert_eq!(gate_set("G").unwrap().len(), 10);
        assert_eq!(gate_set("pauli").unwrap().len(), 4);
        assert!(gate_set("H").is_err());
        assert_eq!(permutations("sigma-star").unwrap(), PermutationSet::sigma_star());
        assert_eq!(permutations("ABCD, BADC").unwrap().p(), 2);
        assert_eq!(sign_matrix("sylvester", 4).unwrap().order(), 4);
        assert!(sign_matrix("sylvester", 3).is_err());
        assert!(sign_matrix("M4", 2).is_err());
    }

    #[test]
    fn fixture_oracles() {
        let o = oracle("1", Some(3), 0).unwrap();
        assert_eq!(o.names(), ["Z", "X", "1", "X"]);
        assert_eq!(oracle("thirty", Some(0), 15).unwrap().claimed_y, Some(0));
        assert!(oracle("thirty", Some(0), 16).is_err());
        assert!(oracle("1", None, 0).is_err());
    }

    #[test]
    fn gate_specs() {
        let g: GateSpec = serde_json::from_str(r#"{"name": "Y", "matrix": [[[0, 0], [0, -1]], [[0, 1], [0, 0]]]}"#).unwrap();
        let g = g.resolve().unwrap();
        assert!(g.matrix.approx_eq(&pauli("Y").unwrap().matrix, 1e-15));
        let named: GateSpec = serde_json::from_str(r#""(1+iX)/sqrt2""#).unwrap();
        assert_eq!(named.resolve().unwrap().name, "(1+iX)/sqrt2");
        let ragged: GateSpec = serde_json::from_str(r#"{"name": "R", "matrix": [[[1, 0]], [[0, 0], [1, 0]]]}"#).unwrap();
        assert!(ragged.resolve().is_err());
    }

    #[test]
    fn target_states() {
        assert_eq!(target_state("1").unwrap().probabilities(), vec![0.0, 1.0]);
        let t = target_state("[[3, 0], [0, 4]]").unwrap();
        assert!((t.probabilities()[1] - 0.64).abs() < 1e-12);
        assert!(target_state("up").is_err());
    }
}
