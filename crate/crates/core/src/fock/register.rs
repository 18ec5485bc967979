use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of labeled bosonic modes with per-mode photon-number cutoffs.
///
/// Basis states are photon-number tuples flattened in row-major order, so the
/// last mode varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeRegister {
    entries: Vec<(String, usize)>,
}

impl ModeRegister {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let entries: Vec<(String, usize)> =
            entries.into_iter().map(|(l, c)| (l.into(), c)).collect();
        for (i, (label, cutoff)) in entries.iter().enumerate() {
            if *cutoff < 1 {
                return Err(Error::InvalidCutoff {
                    label: label.clone(),
                    cutoff: *cutoff,
                });
            }
            if entries[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateMode(label.clone()));
            }
        }
        Ok(Self { entries })
    }

    pub fn single(label: &str, cutoff: usize) -> Result<Self> {
        Self::new([(label, cutoff)])
    }

    /// Register with no modes; its Hilbert space is one-dimensional.
    pub fn empty() -> Self {
        Self { entries: vec![] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn cutoffs(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(_, c)| c)
    }

    pub fn label(&self, pos: usize) -> &str {
        &self.entries[pos].0
    }

    pub fn cutoff(&self, pos: usize) -> usize {
        self.entries[pos].1
    }

    /// Local dimension of the mode at `pos`.
    pub fn local_dim(&self, pos: usize) -> usize {
        self.entries[pos].1 + 1
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.entries
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn cutoff_of(&self, label: &str) -> Result<usize> {
        Ok(self.entries[self.position(label)?].1)
    }

    pub fn dim(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c + 1).product()
    }

    /// Row-major strides, one per mode.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.local_dim(i + 1);
        }
        strides
    }

    pub fn flatten(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "tuple of length {} for {} modes",
                occupation.len(),
                self.len()
            )));
        }
        let mut idx = 0;
        for (pos, &n) in occupation.iter().enumerate() {
            if n > self.cutoff(pos) {
                return Err(Error::DimensionMismatch(format!(
                    "occupation {n} above cutoff {} of mode `{}`",
                    self.cutoff(pos),
                    self.label(pos)
                )));
            }
            idx = idx * self.local_dim(pos) + n;
        }
        Ok(idx)
    }

    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for pos in (0..self.len()).rev() {
            let d = self.local_dim(pos);
            out[pos] = idx % d;
            idx /= d;
        }
        out
    }

    /// Concatenation; labels must stay unique.
    pub fn join(&self, other: &ModeRegister) -> Result<ModeRegister> {
        ModeRegister::new(self.entries.iter().chain(&other.entries).cloned())
    }

    /// Register restricted to the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> ModeRegister {
        ModeRegister {
            entries: positions.iter().map(|&p| self.entries[p].clone()).collect(),
        }
    }

    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let positions: Vec<usize> = labels
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<_>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(Error::DuplicateMode(self.label(*p).to_string()));
            }
        }
        Ok(positions)
    }

    /// Positions not in `positions`, in register order.
    pub fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|p| !positions.contains(p)).collect()
    }

    pub fn with_cutoff(&self, label: &str, cutoff: usize) -> Result<ModeRegister> {
        let pos = self.position(label)?;
        let mut entries = self.entries.clone();
        entries[pos].1 = cutoff;
        ModeRegister::new(entries)
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<ModeRegister> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} modes",
                labels.len(),
                self.len()
            )));
        }
        ModeRegister::new(labels.iter().zip(self.cutoffs()).map(|(l, c)| (*l, c)))
    }
}

/// Splits flat indices of a register into a "local" part over a subset of
/// modes and the remaining "rest" part.
pub(crate) struct IndexSplit {
    /// Flat offset contributed by each local basis state.
    pub local_offsets: Vec<usize>,
    /// Flat offset contributed by each rest basis state.
    pub rest_offsets: Vec<usize>,
}

impl IndexSplit {
    pub fn new(register: &ModeRegister, local: &[usize]) -> Self {
        let strides = register.strides();
        let rest = register.complement(local);
        let offsets = |positions: &[usize]| -> Vec<usize> {
            let sub = register.select(positions);
            (0..sub.dim())
                .map(|i| {
                    sub.unflatten(i)
                        .iter()
                        .zip(positions)
                        .map(|(n, &p)| n * strides[p])
                        .sum()
                })
                .collect()
        };
        Self {
            local_offsets: offsets(local),
            rest_offsets: offsets(&rest),
        }
    }
}
