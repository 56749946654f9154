//! JSON file formats for MUB sets and density matrices.
//!
//! MUB set: `{"d": 3, "bases": [[[[re, im], …], …], …]}` (basis → vectors →
//! amplitudes). Density matrix: `{"dim": 9, "re": [[…]], "im": [[…]]}`.
//! Both are checked on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mubs::{verify_mub_set, Basis, MubSet};
use crate::qmath::{ComplexMatrix, DensityMatrix, PureState, C64};
use crate::settings::STRUCTURAL_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubFile {
    pub d: usize,
    pub bases: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&MubSet> for MubFile {
    fn from(set: &MubSet) -> Self {
        let bases = set
            .bases()
            .iter()
            .map(|b| {
                b.vectors()
                    .iter()
                    .map(|v| v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            })
            .collect();
        Self { d: set.dim(), bases }
    }
}

impl MubFile {
    /// Rebuilds the set after `verify_mub_set` accepts it at `tolerance`.
    pub fn into_mub_set(self, tolerance: f64) -> Result<MubSet> {
        let d = self.d;
        if d == 0 || self.bases.is_empty() {
            return Err(Error::domain("MUB file needs d >= 1 and at least one basis"));
        }
        let mut matrices = Vec::with_capacity(self.bases.len());
        for (k, basis) in self.bases.iter().enumerate() {
            if basis.len() != d || basis.iter().any(|v| v.len() != d) {
                return Err(Error::domain(format!("basis {k} is not {d} vectors of length {d}")));
            }
            let columns: Vec<Vec<C64>> = basis
                .iter()
                .map(|v| v.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect();
            matrices.push(ComplexMatrix::from_columns(&columns)?);
        }
        let report = verify_mub_set(&matrices, tolerance)?;
        if !report.pass {
            return Err(Error::Verification(report.summary()));
        }
        let bases = matrices
            .iter()
            .map(|m| {
                let vectors = (0..d).map(|j| PureState::normalized(m.column(j))).collect::<Result<Vec<_>>>()?;
                Basis::new(vectors)
            })
            .collect::<Result<Vec<_>>>()?;
        MubSet::new(bases)
    }
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = m.rows();
        Self {
            dim: n,
            re: (0..n).map(|i| m.row(i).iter().map(|z| z.re).collect()).collect(),
            im: (0..n).map(|i| m.row(i).iter().map(|z| z.im).collect()).collect(),
        }
    }
}

impl DensityFile {
    pub fn into_density(self) -> Result<DensityMatrix> {
        let n = self.dim;
        let rows_ok = |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&self.re) || !rows_ok(&self.im) {
            return Err(Error::domain(format!("density file must hold two {n}x{n} arrays")));
        }
        let data = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        DensityMatrix::new(ComplexMatrix::from_vec(n, n, data)?)
    }
}

pub fn write_mub_set(path: &Path, set: &MubSet) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&MubFile::from(set))?)?;
    Ok(())
}

pub fn read_mub_set(path: &Path) -> Result<MubSet> {
    let file: MubFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.into_mub_set(STRUCTURAL_TOL)
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&DensityFile::from(rho))?)?;
    Ok(())
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    let file: DensityFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.into_density()
}
