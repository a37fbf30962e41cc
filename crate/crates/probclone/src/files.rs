//! JSON formats for state sets and cloning machines.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in shortest
//! round-trip form and parsed with exact rounding, so every value survives a
//! save/load cycle bit for bit.

use std::fs;
use std::path::Path;

use probclone_core::{CMatrix, CloningMachine, Complex64, ConstantsMatrix, MachineParts, StateSet, StateVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Tag stored in every machine file.
pub const MACHINE_FORMAT: &str = "probclone-machine/1";
/// Composite index convention recorded in machine headers.
pub const INDEX_CONVENTION: &str = "copies-major-probe-fastest";

const NORM_TOL: f64 = 1e-12;

type Pair = [f64; 2];

fn to_pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

fn from_pair(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `{ "dimension": N, "states": [[[re, im], ...], ...] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetFile {
    pub dimension: usize,
    pub states: Vec<Vec<Pair>>,
}

impl StateSetFile {
    pub fn from_set(set: &StateSet) -> Self {
        StateSetFile {
            dimension: set.dim(),
            states: set.states().iter().map(|s| s.amplitudes().iter().map(to_pair).collect()).collect(),
        }
    }

    /// Validates shapes and builds the set. States already normalized to
    /// within `1e-12` are kept exactly; others are rescaled.
    pub fn to_set(&self) -> Result<StateSet, String> {
        if self.dimension == 0 {
            return Err("dimension: must be at least 1".into());
        }
        if self.states.is_empty() {
            return Err("states: at least one state is required".into());
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, amps)| {
                if amps.len() != self.dimension {
                    return Err(format!(
                        "states[{i}]: expected {} amplitudes, found {}",
                        self.dimension,
                        amps.len()
                    ));
                }
                state_from_pairs(amps).map_err(|e| format!("states[{i}]: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        StateSet::new(states).map_err(|e| e.to_string())
    }
}

fn state_from_pairs(amps: &[Pair]) -> Result<StateVector, probclone_core::Error> {
    let amps: Vec<Complex64> = amps.iter().map(from_pair).collect();
    let norm = probclone_core::linalg::norm(&amps);
    if (norm - 1.0).abs() <= NORM_TOL {
        StateVector::from_normalized(amps)
    } else {
        probclone_core::make_state(amps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineHeader {
    pub system_dim: usize,
    pub copies: u32,
    pub n_states: usize,
    pub probe_dim: usize,
    pub eta: f64,
    pub fill_state_index: usize,
    pub index_convention: String,
}

/// Persisted [`CloningMachine`]. Matrices are row-major lists of pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub format: String,
    pub header: MachineHeader,
    pub states: Vec<Vec<Pair>>,
    pub blank: Vec<Pair>,
    pub constants: Vec<Pair>,
    pub unitary: Vec<Pair>,
}

fn matrix_pairs(m: &CMatrix) -> Vec<Pair> {
    m.as_slice().iter().map(to_pair).collect()
}

fn matrix_from_pairs(field: &str, n: usize, pairs: &[Pair]) -> Result<CMatrix, String> {
    CMatrix::from_row_major(n, n, pairs.iter().map(from_pair).collect())
        .ok_or_else(|| format!("{field}: expected {} entries for a {n}x{n} matrix, found {}", n * n, pairs.len()))
}

impl MachineFile {
    pub fn from_machine(machine: &CloningMachine) -> Self {
        let parts = machine.parts();
        MachineFile {
            format: MACHINE_FORMAT.into(),
            header: MachineHeader {
                system_dim: machine.system_dim(),
                copies: machine.copies(),
                n_states: machine.n_states(),
                probe_dim: machine.probe_dim(),
                eta: machine.eta(),
                fill_state_index: machine.fill_state_index(),
                index_convention: INDEX_CONVENTION.into(),
            },
            states: StateSetFile::from_set(&parts.states).states,
            blank: parts.blank.amplitudes().iter().map(to_pair).collect(),
            constants: matrix_pairs(parts.constants.matrix()),
            unitary: matrix_pairs(&parts.unitary),
        }
    }

    pub fn to_machine(&self) -> Result<CloningMachine, String> {
        if self.format != MACHINE_FORMAT {
            return Err(format!("format: expected \"{MACHINE_FORMAT}\", found \"{}\"", self.format));
        }
        let h = &self.header;
        if h.index_convention != INDEX_CONVENTION {
            return Err(format!(
                "header.index_convention: expected \"{INDEX_CONVENTION}\", found \"{}\"",
                h.index_convention
            ));
        }
        if h.probe_dim != h.n_states + 1 {
            return Err(format!("header.probe_dim: expected {}, found {}", h.n_states + 1, h.probe_dim));
        }
        if self.states.len() != h.n_states {
            return Err(format!("states: expected {} states, found {}", h.n_states, self.states.len()));
        }
        let set = StateSetFile { dimension: h.system_dim, states: self.states.clone() }.to_set()?;
        let blank = StateVector::from_normalized(self.blank.iter().map(from_pair).collect())
            .map_err(|e| format!("blank: {e}"))?;
        let constants = matrix_from_pairs("constants", h.n_states, &self.constants)?;
        let constants = ConstantsMatrix::from_parts(constants, h.eta).map_err(|e| format!("constants: {e}"))?;
        let d = h
            .system_dim
            .checked_pow(h.copies)
            .and_then(|x| x.checked_mul(h.probe_dim))
            .ok_or("header: composite dimension overflows")?;
        let unitary = matrix_from_pairs("unitary", d, &self.unitary)?;
        CloningMachine::from_parts(MachineParts {
            states: set,
            copies: h.copies,
            eta: h.eta,
            blank,
            constants,
            unitary,
            fill_state_index: h.fill_state_index,
        })
        .map_err(|e| e.to_string())
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        message: format!("{}: {}", e.path(), e.inner()),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).expect("plain data serializes");
    fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn load_states(path: &Path) -> Result<StateSet, CliError> {
    let file: StateSetFile = read_json(path)?;
    file.to_set().map_err(|message| CliError::Invalid { path: path.to_owned(), message })
}

pub fn save_states(path: &Path, set: &StateSet) -> Result<(), CliError> {
    write_json(path, &StateSetFile::from_set(set))
}

pub fn load_machine(path: &Path) -> Result<CloningMachine, CliError> {
    let file: MachineFile = read_json(path)?;
    file.to_machine().map_err(|message| CliError::Invalid { path: path.to_owned(), message })
}

pub fn save_machine(path: &Path, machine: &CloningMachine) -> Result<(), CliError> {
    write_json(path, &MachineFile::from_machine(machine))
}
