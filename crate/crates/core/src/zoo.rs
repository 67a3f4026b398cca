//! Open-boundary spin-chain Hamiltonian families, their parameter grids and
//! ground-state banks.
//!
//! Index conventions on an `n`-site chain: single-site terms on `0..n`,
//! bonds on `0..n-1`, three-site terms on `0..n-2`.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ground_state, Pauli, PauliString, Statevector, TermList};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Heisenberg,
    Spt,
    Ising,
    Xyz,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Heisenberg, Family::Spt, Family::Ising, Family::Xyz];

    pub fn name(self) -> &'static str {
        match self {
            Family::Heisenberg => "heisenberg",
            Family::Spt => "spt",
            Family::Ising => "ising",
            Family::Xyz => "xyz",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Family::Spt => 2,
            _ => 1,
        }
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(c: u8) -> Option<Self> {
        Family::ALL.get(c as usize).copied()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown Hamiltonian family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub family: Family,
    pub n_qubits: usize,
    pub params: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(family: Family, n_qubits: usize, params: Vec<f64>) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::Input(format!(
                "{family} takes {} parameter(s), got {}",
                family.arity(),
                params.len()
            )));
        }
        Ok(Self {
            family,
            n_qubits,
            params,
        })
    }
}

/// Collects `-coeff * P` terms, dropping zero coefficients.
struct TermBuilder {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl TermBuilder {
    fn push(&mut self, coeff: f64, sites: &[(usize, Pauli)]) -> Result<()> {
        if coeff != 0.0 {
            self.terms.push((-coeff, PauliString::from_sites(self.n, sites)?));
        }
        Ok(())
    }
}

pub fn build_family(spec: &HamiltonianSpec) -> Result<TermList> {
    use Pauli::{X, Y, Z};

    let n = spec.n_qubits;
    if n < 3 {
        return Err(Error::Size(format!("chains need at least 3 sites, got {n}")));
    }
    if spec.params.len() != spec.family.arity() {
        return Err(Error::Input(format!("bad parameter arity for {}", spec.family)));
    }
    let mut b = TermBuilder { n, terms: Vec::new() };
    match spec.family {
        Family::Heisenberg => {
            let h = spec.params[0];
            for j in 0..n - 1 {
                for p in [X, Y, Z] {
                    b.push(1.0, &[(j, p), (j + 1, p)])?;
                }
            }
            for j in 0..n {
                for p in [X, Y, Z] {
                    b.push(h, &[(j, p)])?;
                }
            }
        }
        Family::Spt => {
            let (h1, h2) = (spec.params[0], spec.params[1]);
            for j in 0..n - 2 {
                b.push(1.0, &[(j, Z), (j + 1, X), (j + 2, Z)])?;
            }
            for j in 0..n {
                b.push(h1, &[(j, X)])?;
            }
            for j in 0..n - 1 {
                b.push(h2, &[(j, X), (j + 1, X)])?;
            }
        }
        Family::Ising => {
            let h = spec.params[0];
            for j in 0..n - 1 {
                b.push(1.0, &[(j, Z), (j + 1, Z)])?;
            }
            for j in 0..n {
                b.push(h, &[(j, X)])?;
            }
        }
        Family::Xyz => {
            let h = spec.params[0];
            for j in 0..n - 2 {
                b.push(1.0, &[(j, X), (j + 1, Y), (j + 2, Z)])?;
            }
            for j in 0..n {
                b.push(h, &[(j, [X, Y, Z][j % 3])])?;
            }
        }
    }
    TermList::new(n, b.terms)
}

/// The 100 parameter vectors for `family`, in grid order.
///
/// Single-parameter families use `h = 1.10 + 0.02 k`, `k = 0..100`. The SPT
/// grid is `h1 = 0.06 a` (`a = 0..5`) crossed with `h2 = -0.20 + 0.02 b`
/// (`b = 0..20`), `h1` outermost. Values are the nearest doubles to the
/// decimal grid points.
pub fn parameter_grid(family: Family) -> Vec<Vec<f64>> {
    match family {
        Family::Spt => (0..5)
            .flat_map(|a| (0..20).map(move |b| vec![(6 * a) as f64 / 100.0, (2 * b - 20) as f64 / 100.0]))
            .collect(),
        _ => (0..100).map(|k| vec![(110 + 2 * k) as f64 / 100.0]).collect(),
    }
}

/// Human-readable description of [`parameter_grid`], echoed into reports.
pub fn grid_description(family: Family) -> &'static str {
    match family {
        Family::Spt => "h1 in {0, 0.06, 0.12, 0.18, 0.24} (outer) x h2 in {-0.20, -0.18, ..., 0.18} (inner)",
        _ => "h in {1.10, 1.12, ..., 3.08}",
    }
}

/// Every distinct Pauli string appearing in any family on `n_qubits` sites,
/// sorted lexicographically (`I < X < Y < Z`, qubit 0 first).
pub fn observable_pool(n_qubits: usize) -> Result<Vec<PauliString>> {
    let mut pool = Vec::new();
    for family in Family::ALL {
        // unit parameters switch on every field term
        let spec = HamiltonianSpec::new(family, n_qubits, vec![1.0; family.arity()])?;
        pool.extend(build_family(&spec)?.terms().iter().map(|(_, p)| p.clone()));
    }
    pool.sort();
    pool.dedup();
    Ok(pool)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BankEntry {
    pub params: Vec<f64>,
    pub energy: f64,
    pub state: Statevector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateBank {
    pub family: Family,
    pub n_qubits: usize,
    pub entries: Vec<BankEntry>,
}

/// Ground state at every grid point of `family`.
pub fn ground_state_bank(family: Family, n_qubits: usize) -> Result<GroundStateBank> {
    let entries = parameter_grid(family)
        .into_par_iter()
        .map(|params| {
            let spec = HamiltonianSpec::new(family, n_qubits, params.clone())?;
            let gs = ground_state(&build_family(&spec)?).map_err(|e| Error::Bank {
                family: family.to_string(),
                params: params.clone(),
                source: Box::new(e),
            })?;
            Ok(BankEntry {
                params,
                energy: gs.energy,
                state: gs.state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundStateBank {
        family,
        n_qubits,
        entries,
    })
}

const BANK_MAGIC: &[u8; 8] = b"QSBANK01";

impl GroundStateBank {
    /// Binary layout, all little-endian:
    /// magic `QSBANK01`, `u32` n_qubits, `u8` family code, `u32` parameter
    /// arity, `u32` entry count, then per entry the parameters (`f64`), the
    /// energy (`f64`) and `2^n` amplitudes as interleaved re/im `f64` pairs.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(BANK_MAGIC)?;
        w.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        w.write_all(&[self.family.code()])?;
        w.write_all(&(self.family.arity() as u32).to_le_bytes())?;
        w.write_all(&(self.entries.len() as u32).to_le_bytes())?;
        for e in &self.entries {
            for p in &e.params {
                w.write_all(&p.to_le_bytes())?;
            }
            w.write_all(&e.energy.to_le_bytes())?;
            for a in e.state.amplitudes() {
                w.write_all(&a.re.to_le_bytes())?;
                w.write_all(&a.im.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |reason: String| Error::Format {
            path: path.to_path_buf(),
            reason,
        };
        let io = |e: std::io::Error| Error::io(path, e);

        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != BANK_MAGIC {
            return Err(bad("bad magic".into()));
        }
        let n_qubits = read_u32(&mut r).map_err(io)? as usize;
        let mut code = [0u8; 1];
        r.read_exact(&mut code).map_err(io)?;
        let family = Family::from_code(code[0]).ok_or_else(|| bad(format!("unknown family code {}", code[0])))?;
        let arity = read_u32(&mut r).map_err(io)? as usize;
        if arity != family.arity() {
            return Err(bad(format!("arity {arity} does not match {family}")));
        }
        if n_qubits == 0 || n_qubits > 30 {
            return Err(bad(format!("implausible qubit count {n_qubits}")));
        }
        let count = read_u32(&mut r).map_err(io)? as usize;
        let dim = 1usize << n_qubits;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let params = (0..arity).map(|_| read_f64(&mut r)).collect::<std::io::Result<Vec<_>>>().map_err(io)?;
            let energy = read_f64(&mut r).map_err(io)?;
            let amps = (0..dim)
                .map(|_| Ok(Complex64::new(read_f64(&mut r)?, read_f64(&mut r)?)))
                .collect::<std::io::Result<Vec<_>>>()
                .map_err(io)?;
            let state = Statevector::from_amplitudes(amps).map_err(|e| bad(e.to_string()))?;
            entries.push(BankEntry { params, energy, state });
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest).map_err(io)?;
        if !rest.is_empty() {
            return Err(bad(format!("{} trailing bytes", rest.len())));
        }
        Ok(Self {
            family,
            n_qubits,
            entries,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
