//! State files: the JSON interchange format shared by the library and the
//! CLI, `{"dim": int, "modes": 1|2, "coeffs": [[re, im], ...]}` with
//! two-mode coefficients flattened row-major (n_a major, n_b minor).
//!
//! Serialization uses the shortest representation that parses back to the
//! identical double, so writing, reading and re-writing a state is
//! byte-identical.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockVector, TruncationSpec, TwoModeFockVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub modes: u8,
    pub coeffs: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_single(v: &FockVector) -> StateFile {
        StateFile {
            dim: v.trunc().dim(),
            modes: 1,
            coeffs: v.coeffs().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_two(v: &TwoModeFockVector) -> StateFile {
        StateFile {
            dim: v.trunc().dim(),
            modes: 2,
            coeffs: v.coeffs().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    fn check(&self, modes: u8) -> Result<()> {
        if self.modes != modes {
            return Err(Error::Serialization(format!(
                "state has modes = {}, expected {modes}",
                self.modes
            )));
        }
        let expected = match modes {
            1 => self.dim,
            _ => self.dim * self.dim,
        };
        if self.coeffs.len() != expected {
            return Err(Error::Serialization(format!(
                "state with dim {} and modes {modes} needs {expected} coefficients, found {}",
                self.dim,
                self.coeffs.len()
            )));
        }
        Ok(())
    }

    fn complex_coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }

    /// Rebuild the vector; the guard is not part of the interchange format
    /// and is supplied by the consumer.
    pub fn to_single(&self, guard: usize) -> Result<FockVector> {
        self.check(1)?;
        let trunc = TruncationSpec::new(self.dim, guard)?;
        FockVector::from_coeffs(trunc, self.complex_coeffs())
    }

    pub fn to_two(&self, guard: usize) -> Result<TwoModeFockVector> {
        self.check(2)?;
        let trunc = TruncationSpec::new(self.dim, guard)?;
        TwoModeFockVector::from_coeffs(trunc, self.complex_coeffs())
    }

    pub fn to_json(&self) -> Result<String> {
        if self.modes != 1 && self.modes != 2 {
            return Err(Error::Serialization(format!(
                "modes must be 1 or 2, found {}",
                self.modes
            )));
        }
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<StateFile> {
        let file: StateFile =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.modes != 1 && file.modes != 2 {
            return Err(Error::Serialization(format!(
                "modes must be 1 or 2, found {}",
                file.modes
            )));
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_round_trip_is_byte_identical() {
        let trunc = TruncationSpec::new(8, 1).unwrap();
        let coeffs: Vec<C64> = (0..8)
            .map(|n| C64::new((n as f64 + 0.1).sin() / 3.0, -(n as f64).cos() * 0.7))
            .collect();
        let v = FockVector::from_coeffs(trunc, coeffs).unwrap();
        let json = StateFile::from_single(&v).to_json().unwrap();
        let reread = StateFile::from_json(&json).unwrap();
        assert_eq!(reread.to_json().unwrap(), json);
        let back = reread.to_single(1).unwrap();
        for (u, w) in back.coeffs().iter().zip(v.coeffs()) {
            assert_eq!(u.re.to_bits(), w.re.to_bits());
            assert_eq!(u.im.to_bits(), w.im.to_bits());
        }
    }

    #[test]
    fn two_mode_layout_is_row_major() {
        let trunc = TruncationSpec::new(8, 1).unwrap();
        let mut v = TwoModeFockVector::zero(trunc);
        let marked = TwoModeFockVector::basis_state(trunc, 1, 2).unwrap();
        v = v.add(&marked.scale(C64::new(0.5, -0.25))).unwrap();
        let file = StateFile::from_two(&v);
        assert_eq!(file.coeffs.len(), 64);
        assert_eq!(file.coeffs[1 * 8 + 2], [0.5, -0.25]);
        let back = file.to_two(1).unwrap();
        assert_eq!(back.coeff(1, 2), C64::new(0.5, -0.25));
    }

    #[test]
    fn malformed_states_are_rejected() {
        assert!(StateFile::from_json("{\"dim\": 4}").is_err());
        assert!(StateFile::from_json("{\"dim\": 4, \"modes\": 3, \"coeffs\": []}").is_err());
        let short = StateFile {
            dim: 4,
            modes: 1,
            coeffs: vec![[1.0, 0.0]],
        };
        assert!(short.to_single(1).is_err());
        let wrong_mode = StateFile {
            dim: 8,
            modes: 2,
            coeffs: vec![[1.0, 0.0]; 64],
        };
        assert!(wrong_mode.to_single(1).is_err());
        assert!(wrong_mode.to_two(1).is_ok());
    }
}
