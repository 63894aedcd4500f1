//! Product basis of the cavity + N-atom system, split into excitation-number
//! subspaces.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atom capacity of the excited-set bitmask.
pub const MAX_ATOMS: usize = 16;

/// `|m; c⟩`: photon number `m` and the set `c` of excited atoms (bit `j` set when
/// atom `j`, zero-based, is excited).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub photons: u32,
    pub excited: u16,
}

impl BasisState {
    pub fn new(photons: u32, excited_atoms: &[usize]) -> Result<Self> {
        let mut mask = 0u16;
        for &j in excited_atoms {
            if j >= MAX_ATOMS {
                return Err(Error::InvalidParameter(format!(
                    "atom index {j} exceeds capacity {MAX_ATOMS}"
                )));
            }
            mask |= 1 << j;
        }
        Ok(Self {
            photons,
            excited: mask,
        })
    }

    pub const fn from_mask(photons: u32, excited: u16) -> Self {
        Self { photons, excited }
    }

    pub fn is_excited(&self, atom: usize) -> bool {
        atom < MAX_ATOMS && self.excited & (1 << atom) != 0
    }

    pub fn num_excited(&self) -> u32 {
        self.excited.count_ones()
    }

    /// Total excitation `m + |c|`.
    pub fn excitation(&self) -> u32 {
        self.photons + self.num_excited()
    }

    pub fn excited_atoms(&self) -> Vec<usize> {
        (0..MAX_ATOMS).filter(|&j| self.is_excited(j)).collect()
    }

    /// Label such as `1,gg` or `0,eg` for `n_atoms` atoms.
    pub fn label(&self, n_atoms: usize) -> String {
        let config: String = (0..n_atoms)
            .map(|j| if self.is_excited(j) { 'e' } else { 'g' })
            .collect();
        format!("{},{}", self.photons, config)
    }

    /// Parses labels like `0,eg`, `|0,e,g>` or `|1,ggg⟩`; returns the state and
    /// the atom count implied by the label.
    pub fn parse_label(label: &str) -> Result<(Self, usize)> {
        let bad = || Error::InvalidParameter(format!("malformed basis label {label:?}"));
        let body = label
            .trim()
            .trim_start_matches('|')
            .trim_end_matches('>')
            .trim_end_matches('⟩');
        let (photons, config) = body.split_once(',').ok_or_else(bad)?;
        let photons: u32 = photons.trim().parse().map_err(|_| bad())?;
        let config: Vec<char> = config.chars().filter(|c| !matches!(c, ',' | ' ')).collect();
        if config.is_empty() || config.len() > MAX_ATOMS {
            return Err(bad());
        }
        let mut mask = 0u16;
        for (j, c) in config.iter().enumerate() {
            match c {
                'e' => mask |= 1 << j,
                'g' => {}
                _ => return Err(bad()),
            }
        }
        Ok((Self::from_mask(photons, mask), config.len()))
    }
}

/// Ordered basis of one excitation subspace. Upper states (photons > 0) come
/// first, ordered by descending photon number and then lexicographically by the
/// excited-atom index tuple; lower states (no photons) follow.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    n_atoms: usize,
    excitation: u32,
    states: Vec<BasisState>,
    n_upper: usize,
    index: HashMap<BasisState, usize>,
}

impl PartialEq for SubspaceBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n_atoms == other.n_atoms
            && self.excitation == other.excitation
            && self.states == other.states
    }
}

fn check_atoms(n_atoms: usize) -> Result<()> {
    if n_atoms == 0 || n_atoms > MAX_ATOMS {
        return Err(Error::InvalidParameter(format!(
            "atom count must be in 1..={MAX_ATOMS}, got {n_atoms}"
        )));
    }
    Ok(())
}

/// Basis of the `n`-excitation subspace of `n_atoms` atoms.
pub fn enumerate_subspace(n_atoms: usize, n: u32) -> Result<SubspaceBasis> {
    check_atoms(n_atoms)?;
    let max_k = (n as usize).min(n_atoms);
    let mut states = Vec::new();
    // photons = n - k, so ascending k is descending photon number
    for k in 0..=max_k {
        for atoms in (0..n_atoms).combinations(k) {
            let mask = atoms.iter().fold(0u16, |m, &j| m | (1 << j));
            states.push(BasisState::from_mask(n - k as u32, mask));
        }
    }
    SubspaceBasis::from_states(n_atoms, n, states)
}

impl SubspaceBasis {
    /// Wraps an explicit state list. Upper states must precede lower states and
    /// no state may repeat; excitation numbers are not checked here (see
    /// [`crate::model::excitation_operator_check`]).
    pub fn from_states(n_atoms: usize, excitation: u32, states: Vec<BasisState>) -> Result<Self> {
        check_atoms(n_atoms)?;
        let n_upper = states.iter().take_while(|s| s.photons > 0).count();
        if states[n_upper..].iter().any(|s| s.photons > 0) {
            return Err(Error::InvalidParameter(
                "upper states must precede lower states".into(),
            ));
        }
        let limit = if n_atoms == MAX_ATOMS {
            u16::MAX
        } else {
            (1u16 << n_atoms) - 1
        };
        if let Some(s) = states.iter().find(|s| s.excited & !limit != 0) {
            return Err(Error::InvalidParameter(format!(
                "state with mask {:#b} excites atoms beyond {n_atoms}",
                s.excited
            )));
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, &s) in states.iter().enumerate() {
            if index.insert(s, i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate basis state {}",
                    s.label(n_atoms)
                )));
            }
        }
        Ok(Self {
            n_atoms,
            excitation,
            states,
            n_upper,
            index,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn excitation(&self) -> u32 {
        self.excitation
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_upper(&self) -> usize {
        self.n_upper
    }

    pub fn n_lower(&self) -> usize {
        self.states.len() - self.n_upper
    }

    pub fn upper_range(&self) -> Range<usize> {
        0..self.n_upper
    }

    pub fn lower_range(&self) -> Range<usize> {
        self.n_upper..self.states.len()
    }

    pub fn index_of(&self, s: &BasisState) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::StateNotFound(s.label(self.n_atoms)))
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label(self.n_atoms)).collect()
    }
}

impl fmt::Display for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} n={} [", self.n_atoms, self.excitation)?;
        for (i, s) in self.states.iter().enumerate() {
            if i == self.n_upper {
                write!(f, " ;")?;
            }
            write!(f, " |{}>", s.label(self.n_atoms))?;
        }
        write!(f, " ]")
    }
}

/// Direct sum of the subspaces `n = 0..=n_max` with a global index.
#[derive(Debug, Clone)]
pub struct LadderBasis {
    n_atoms: usize,
    spaces: Vec<SubspaceBasis>,
    offsets: Vec<usize>,
    dim: usize,
}

pub fn ladder_spaces(n_atoms: usize, n_max: u32) -> Result<LadderBasis> {
    let spaces = (0..=n_max)
        .map(|n| enumerate_subspace(n_atoms, n))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut dim = 0;
    for s in &spaces {
        offsets.push(dim);
        dim += s.len();
    }
    Ok(LadderBasis {
        n_atoms,
        spaces,
        offsets,
        dim,
    })
}

impl LadderBasis {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_max(&self) -> u32 {
        (self.spaces.len() - 1) as u32
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spaces(&self) -> &[SubspaceBasis] {
        &self.spaces
    }

    pub fn subspace(&self, n: u32) -> Option<&SubspaceBasis> {
        self.spaces.get(n as usize)
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(SubspaceBasis::len).collect()
    }

    /// Global index range occupied by subspace `n`.
    pub fn block(&self, n: u32) -> Range<usize> {
        let n = n as usize;
        self.offsets[n]..self.offsets[n] + self.spaces[n].len()
    }

    pub fn global_index(&self, s: &BasisState) -> Result<usize> {
        let n = s.excitation() as usize;
        let space = self
            .spaces
            .get(n)
            .ok_or_else(|| Error::StateNotFound(s.label(self.n_atoms)))?;
        Ok(self.offsets[n] + space.index_of(s)?)
    }

    pub fn state(&self, global: usize) -> BasisState {
        let n = self.offsets.partition_point(|&o| o <= global) - 1;
        self.spaces[n].state(global - self.offsets[n])
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        self.spaces.iter().flat_map(|s| s.states().iter().copied())
    }

    pub fn labels(&self) -> Vec<String> {
        self.states().map(|s| s.label(self.n_atoms)).collect()
    }

    /// Places a vector over subspace `n` into the full ladder, zero elsewhere.
    pub fn embed<T: Copy + Default>(&self, n: u32, v: &[T]) -> Result<Vec<T>> {
        let space = self.subspace(n).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "subspace {n} is above the ladder top {}",
                self.n_max()
            ))
        })?;
        if v.len() != space.len() {
            return Err(Error::DimensionMismatch {
                context: "vector length vs subspace dimension",
                expected: space.len(),
                found: v.len(),
            });
        }
        let mut out = vec![T::default(); self.dim];
        out[self.block(n)].copy_from_slice(v);
        Ok(out)
    }
}
