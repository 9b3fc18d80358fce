//! Truncated Fock spaces: state vectors, banded matrix operators, and
//! invariant-sector bookkeeping.
//!
//! A [`TruncationSpec`] fixes the retained ladder `|0⟩ … |dim-1⟩` per mode
//! and a guard band. Two-mode objects live on the Kronecker product space
//! with row-major flattening: the flat index of `|n_a, n_b⟩` is
//! `n_a * dim + n_b`.
//!
//! [`MatrixOperator`] stores a dense matrix plus the exact list of occupied
//! flattened diagonals. Every operator in this problem family (ladder
//! polynomials, diagonal level functions, their products) occupies a handful
//! of diagonals, so products and applications walk those diagonals instead
//! of the full matrix; `bandwidth()` exposes the occupied range as an
//! integer sparsity hint.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    dim: usize,
    guard: usize,
}

impl TruncationSpec {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim < 8 {
            return Err(Error::InvalidTruncation(format!(
                "dim must be at least 8, got {dim}"
            )));
        }
        if guard > dim / 4 {
            return Err(Error::InvalidTruncation(format!(
                "guard {guard} must be at most dim/4 = {}",
                dim / 4
            )));
        }
        Ok(TruncationSpec { dim, guard })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// First index (per mode) that truncation artifacts may touch, for
    /// operator identities built from factors that shift occupation by at
    /// most `reach` levels per mode. Indices below the limit are exact.
    pub fn interior_limit(&self, reach: usize) -> usize {
        self.dim.saturating_sub(self.guard.saturating_mul(reach))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Lower,
    Raise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeCount {
    One,
    Two,
}

fn side_dim(trunc: TruncationSpec, modes: ModeCount) -> usize {
    match modes {
        ModeCount::One => trunc.dim(),
        ModeCount::Two => trunc.dim() * trunc.dim(),
    }
}

fn ensure_finite(coeffs: &[C64], what: &str) -> Result<()> {
    if coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    trunc: TruncationSpec,
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn zero(trunc: TruncationSpec) -> Self {
        FockVector {
            trunc,
            coeffs: vec![C64::ZERO; trunc.dim()],
        }
    }

    pub fn basis_state(trunc: TruncationSpec, n: usize) -> Result<Self> {
        if n >= trunc.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis level {n} outside truncation dim {}",
                trunc.dim()
            )));
        }
        let mut v = Self::zero(trunc);
        v.coeffs[n] = C64::ONE;
        Ok(v)
    }

    pub fn from_coeffs(trunc: TruncationSpec, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != trunc.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient count {} does not match dim {}",
                coeffs.len(),
                trunc.dim()
            )));
        }
        ensure_finite(&coeffs, "Fock vector coefficients")?;
        Ok(FockVector { trunc, coeffs })
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, f: C64) -> Self {
        FockVector {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|z| z * f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.trunc != other.trunc {
            return Err(Error::ShapeMismatch("adding vectors with different truncations".into()));
        }
        Ok(FockVector {
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeFockVector {
    trunc: TruncationSpec,
    coeffs: Vec<C64>,
}

impl TwoModeFockVector {
    pub fn zero(trunc: TruncationSpec) -> Self {
        TwoModeFockVector {
            trunc,
            coeffs: vec![C64::ZERO; trunc.dim() * trunc.dim()],
        }
    }

    pub fn basis_state(trunc: TruncationSpec, na: usize, nb: usize) -> Result<Self> {
        if na >= trunc.dim() || nb >= trunc.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis pair ({na},{nb}) outside truncation dim {}",
                trunc.dim()
            )));
        }
        let mut v = Self::zero(trunc);
        v.coeffs[na * trunc.dim() + nb] = C64::ONE;
        Ok(v)
    }

    pub fn from_coeffs(trunc: TruncationSpec, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != trunc.dim() * trunc.dim() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient count {} does not match dim² = {}",
                coeffs.len(),
                trunc.dim() * trunc.dim()
            )));
        }
        ensure_finite(&coeffs, "two-mode Fock vector coefficients")?;
        Ok(TwoModeFockVector { trunc, coeffs })
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    pub fn coeff(&self, na: usize, nb: usize) -> C64 {
        self.coeffs[na * self.trunc.dim() + nb]
    }

    pub fn coeff_flat(&self, idx: usize) -> C64 {
        self.coeffs[idx]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, f: C64) -> Self {
        TwoModeFockVector {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|z| z * f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.trunc != other.trunc {
            return Err(Error::ShapeMismatch("adding vectors with different truncations".into()));
        }
        Ok(TwoModeFockVector {
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }
}

/// ⟨u|v⟩, conjugate-linear in the first argument.
pub fn inner(u: &FockVector, v: &FockVector) -> Result<C64> {
    if u.trunc != v.trunc {
        return Err(Error::ShapeMismatch("inner product across truncations".into()));
    }
    Ok(u.coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// ⟨u|v⟩ on the two-mode space, conjugate-linear in the first argument.
pub fn inner_two(u: &TwoModeFockVector, v: &TwoModeFockVector) -> Result<C64> {
    if u.trunc != v.trunc {
        return Err(Error::ShapeMismatch("inner product across truncations".into()));
    }
    Ok(u.coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Membership predicate for an invariant subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorSpec {
    /// Single-mode levels with `n % modulus == residue`.
    Residue { modulus: usize, residue: usize },
    /// Two-mode diagonal family `n_b - n_a == excess`.
    DiagonalFamily { excess: i64 },
    /// Union of the two-mode diagonal families whose base state carries
    /// `residue` quanta in the given mode: for mode a this is
    /// `n_a ≡ residue (mod modulus)` with `n_b - n_a ≥ -residue`, and the
    /// mirror image for mode b.
    FamilyUnion {
        mode: Mode,
        modulus: usize,
        residue: usize,
    },
}

impl SectorSpec {
    pub fn even() -> Self {
        SectorSpec::Residue {
            modulus: 2,
            residue: 0,
        }
    }

    pub fn odd() -> Self {
        SectorSpec::Residue {
            modulus: 2,
            residue: 1,
        }
    }

    pub fn contains_level(&self, n: usize) -> bool {
        match *self {
            SectorSpec::Residue { modulus, residue } => n % modulus == residue,
            _ => false,
        }
    }

    pub fn contains_pair(&self, na: usize, nb: usize) -> bool {
        match *self {
            SectorSpec::Residue { .. } => false,
            SectorSpec::DiagonalFamily { excess } => nb as i64 - na as i64 == excess,
            SectorSpec::FamilyUnion {
                mode,
                modulus,
                residue,
            } => match mode {
                Mode::A => {
                    na % modulus == residue && nb as i64 - na as i64 >= -(residue as i64)
                }
                Mode::B => {
                    nb % modulus == residue && na as i64 - nb as i64 >= -(residue as i64)
                }
            },
        }
    }

    pub fn contains_flat(&self, idx: usize, trunc: TruncationSpec, modes: ModeCount) -> bool {
        match modes {
            ModeCount::One => self.contains_level(idx),
            ModeCount::Two => self.contains_pair(idx / trunc.dim(), idx % trunc.dim()),
        }
    }

    fn expects_modes(&self) -> ModeCount {
        match self {
            SectorSpec::Residue { .. } => ModeCount::One,
            _ => ModeCount::Two,
        }
    }

    /// Flat indices of the sector members, in increasing order.
    pub fn members_flat(&self, trunc: TruncationSpec, modes: ModeCount) -> Result<Vec<usize>> {
        if self.expects_modes() != modes {
            return Err(Error::InvalidParameter(
                "sector kind does not match the mode count of the space".into(),
            ));
        }
        let dim = trunc.dim();
        Ok(match modes {
            ModeCount::One => (0..dim).filter(|&n| self.contains_level(n)).collect(),
            ModeCount::Two => (0..dim * dim)
                .filter(|&i| self.contains_pair(i / dim, i % dim))
                .collect(),
        })
    }
}

/// Zero out every component outside the sector.
pub fn sector_project(v: &FockVector, sector: &SectorSpec) -> Result<FockVector> {
    if sector.expects_modes() != ModeCount::One {
        return Err(Error::InvalidParameter(
            "two-mode sector applied to a single-mode vector".into(),
        ));
    }
    let coeffs = v
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &z)| if sector.contains_level(n) { z } else { C64::ZERO })
        .collect();
    Ok(FockVector {
        trunc: v.trunc,
        coeffs,
    })
}

/// Zero out every component outside the sector, two-mode version.
pub fn sector_project_two(
    v: &TwoModeFockVector,
    sector: &SectorSpec,
) -> Result<TwoModeFockVector> {
    if sector.expects_modes() != ModeCount::Two {
        return Err(Error::InvalidParameter(
            "single-mode sector applied to a two-mode vector".into(),
        ));
    }
    let dim = v.trunc.dim();
    let coeffs = v
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if sector.contains_pair(i / dim, i % dim) {
                z
            } else {
                C64::ZERO
            }
        })
        .collect();
    Ok(TwoModeFockVector {
        trunc: v.trunc,
        coeffs,
    })
}

#[derive(Clone, Debug)]
pub struct MatrixOperator {
    trunc: TruncationSpec,
    modes: ModeCount,
    matrix: DMatrix<C64>,
    /// Sorted occupied flattened diagonals; entry (i, j) lives on diagonal
    /// i - j, so positive offsets raise occupation.
    offsets: Vec<i64>,
}

fn diagonal_has_nonzero(m: &DMatrix<C64>, d: i64) -> bool {
    let n = m.nrows() as i64;
    let lo = d.max(0);
    let hi = (n + d).min(n);
    (lo..hi).any(|i| m[(i as usize, (i - d) as usize)] != C64::ZERO)
}

fn prune_offsets(m: &DMatrix<C64>, candidates: impl IntoIterator<Item = i64>) -> Vec<i64> {
    let mut out: Vec<i64> = candidates.into_iter().collect();
    out.sort_unstable();
    out.dedup();
    out.retain(|&d| diagonal_has_nonzero(m, d));
    out
}

impl MatrixOperator {
    pub fn zero(trunc: TruncationSpec, modes: ModeCount) -> Self {
        let n = side_dim(trunc, modes);
        MatrixOperator {
            trunc,
            modes,
            matrix: DMatrix::zeros(n, n),
            offsets: Vec::new(),
        }
    }

    pub fn identity(trunc: TruncationSpec, modes: ModeCount) -> Self {
        let n = side_dim(trunc, modes);
        MatrixOperator {
            trunc,
            modes,
            matrix: DMatrix::identity(n, n),
            offsets: vec![0],
        }
    }

    /// Wrap an arbitrary dense matrix, scanning it for occupied diagonals.
    pub fn from_matrix(
        trunc: TruncationSpec,
        modes: ModeCount,
        matrix: DMatrix<C64>,
    ) -> Result<Self> {
        let n = side_dim(trunc, modes);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, expected {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let offsets = prune_offsets(&matrix, -(n as i64 - 1)..=(n as i64 - 1));
        Ok(MatrixOperator {
            trunc,
            modes,
            matrix,
            offsets,
        })
    }

    /// Ladder operator matrix. Mode a yields the single-mode matrix with
    /// `⟨n-1|a|n⟩ = √n` and `⟨n+1|a†|n⟩ = √(n+1)`; mode b yields the
    /// two-mode operator `1 ⊗ b`, since mode-b operators only exist on the
    /// product space. The two-mode `a ⊗ 1` is `kron(ladder(A, ..), identity)`.
    pub fn ladder(mode: Mode, kind: LadderKind, trunc: TruncationSpec) -> Self {
        let dim = trunc.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let offset = match kind {
            LadderKind::Lower => {
                for n in 1..dim {
                    m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
                }
                -1
            }
            LadderKind::Raise => {
                for n in 0..dim - 1 {
                    m[(n + 1, n)] = C64::new((n as f64 + 1.0).sqrt(), 0.0);
                }
                1
            }
        };
        let single = MatrixOperator {
            trunc,
            modes: ModeCount::One,
            matrix: m,
            offsets: vec![offset],
        };
        match mode {
            Mode::A => single,
            Mode::B => kron(&MatrixOperator::identity(trunc, ModeCount::One), &single)
                .expect("identity and ladder share the truncation"),
        }
    }

    /// Single-mode diagonal operator `f(n̂)`.
    pub fn diag_fn(f: impl Fn(usize) -> C64, trunc: TruncationSpec) -> Self {
        let dim = trunc.dim();
        let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { f(i) } else { C64::ZERO });
        let offsets = prune_offsets(&m, [0]);
        MatrixOperator {
            trunc,
            modes: ModeCount::One,
            matrix: m,
            offsets,
        }
    }

    /// Two-mode diagonal operator `f(n̂_a, n̂_b)`.
    pub fn diag_fn_two(f: impl Fn(usize, usize) -> C64, trunc: TruncationSpec) -> Self {
        let dim = trunc.dim();
        let n = dim * dim;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                f(i / dim, i % dim)
            } else {
                C64::ZERO
            }
        });
        let offsets = prune_offsets(&m, [0]);
        MatrixOperator {
            trunc,
            modes: ModeCount::Two,
            matrix: m,
            offsets,
        }
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    pub fn modes(&self) -> ModeCount {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn is_zero(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest occupied |flattened diagonal| — an integer sparsity hint.
    pub fn bandwidth(&self) -> usize {
        self.offsets
            .iter()
            .map(|d| d.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Largest per-mode occupation shift among the occupied diagonals.
    /// For two-mode operators the flattened offset `d = d_a·dim + d_b`
    /// is decoded assuming |d_b| < dim/2, which holds for every ladder
    /// polynomial of low degree.
    pub fn per_mode_reach(&self) -> usize {
        match self.modes {
            ModeCount::One => self.bandwidth(),
            ModeCount::Two => {
                let dim = self.trunc.dim() as i64;
                self.offsets
                    .iter()
                    .map(|&d| {
                        let da = (d as f64 / dim as f64).round() as i64;
                        let db = d - da * dim;
                        da.unsigned_abs().max(db.unsigned_abs()) as usize
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.trunc != other.trunc || self.modes != other.modes {
            return Err(Error::ShapeMismatch(format!(
                "{what} on operators with different truncations or mode counts"
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        let matrix = &self.matrix + &other.matrix;
        let offsets = prune_offsets(
            &matrix,
            self.offsets.iter().chain(&other.offsets).copied(),
        );
        Ok(MatrixOperator {
            trunc: self.trunc,
            modes: self.modes,
            matrix,
            offsets,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-C64::ONE))
    }

    pub fn scale(&self, f: C64) -> Self {
        if f == C64::ZERO {
            return MatrixOperator::zero(self.trunc, self.modes);
        }
        MatrixOperator {
            trunc: self.trunc,
            modes: self.modes,
            matrix: &self.matrix * f,
            offsets: self.offsets.clone(),
        }
    }

    pub fn dagger(&self) -> Self {
        let mut offsets: Vec<i64> = self.offsets.iter().map(|d| -d).collect();
        offsets.sort_unstable();
        MatrixOperator {
            trunc: self.trunc,
            modes: self.modes,
            matrix: self.matrix.adjoint(),
            offsets,
        }
    }

    /// Operator product, walking occupied diagonal pairs: O(n·|A|·|B|).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "mul")?;
        let n = side_dim(self.trunc, self.modes) as i64;
        let mut matrix = DMatrix::zeros(n as usize, n as usize);
        for &da in &self.offsets {
            for &db in &other.offsets {
                let lo = 0.max(da).max(da + db);
                let hi = n.min(n + da).min(n + da + db);
                for i in lo..hi {
                    let k = (i - da) as usize;
                    let j = (i - da - db) as usize;
                    matrix[(i as usize, j)] += self.matrix[(i as usize, k)] * other.matrix[(k, j)];
                }
            }
        }
        let candidates: Vec<i64> = self
            .offsets
            .iter()
            .flat_map(|&da| other.offsets.iter().map(move |&db| da + db))
            .collect();
        let offsets = prune_offsets(&matrix, candidates);
        Ok(MatrixOperator {
            trunc: self.trunc,
            modes: self.modes,
            matrix,
            offsets,
        })
    }

    pub(crate) fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        let n = v.len() as i64;
        let mut out = vec![C64::ZERO; v.len()];
        for &d in &self.offsets {
            let lo = 0.max(d);
            let hi = n.min(n + d);
            for i in lo..hi {
                out[i as usize] += self.matrix[(i as usize, (i - d) as usize)] * v[(i - d) as usize];
            }
        }
        out
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if self.modes != ModeCount::One || self.trunc != v.trunc {
            return Err(Error::ShapeMismatch(
                "applying operator to a vector from a different space".into(),
            ));
        }
        Ok(FockVector {
            trunc: v.trunc,
            coeffs: self.apply_slice(&v.coeffs),
        })
    }

    pub fn apply_two(&self, v: &TwoModeFockVector) -> Result<TwoModeFockVector> {
        if self.modes != ModeCount::Two || self.trunc != v.trunc {
            return Err(Error::ShapeMismatch(
                "applying operator to a vector from a different space".into(),
            ));
        }
        Ok(TwoModeFockVector {
            trunc: v.trunc,
            coeffs: self.apply_slice(&v.coeffs),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_where(|_| true)
    }

    /// Largest |entry| over occupied diagonals, restricted to entries whose
    /// row and column flat indices both satisfy the predicate.
    pub fn max_abs_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        let n = side_dim(self.trunc, self.modes) as i64;
        let mut best = 0.0_f64;
        for &d in &self.offsets {
            let lo = 0.max(d);
            let hi = n.min(n + d);
            for i in lo..hi {
                let j = (i - d) as usize;
                if pred(i as usize) && pred(j) {
                    best = best.max(self.matrix[(i as usize, j)].norm());
                }
            }
        }
        best
    }
}

/// Kronecker product of two single-mode operators: the result acts on the
/// two-mode space with the first factor on mode a.
pub fn kron(a: &MatrixOperator, b: &MatrixOperator) -> Result<MatrixOperator> {
    if a.modes != ModeCount::One || b.modes != ModeCount::One {
        return Err(Error::ShapeMismatch("kron expects single-mode factors".into()));
    }
    if a.trunc != b.trunc {
        return Err(Error::ShapeMismatch("kron factors must share the truncation".into()));
    }
    let dim = a.trunc.dim() as i64;
    let matrix = a.matrix.kronecker(&b.matrix);
    let candidates: Vec<i64> = a
        .offsets
        .iter()
        .flat_map(|&da| b.offsets.iter().map(move |&db| da * dim + db))
        .collect();
    let offsets = prune_offsets(&matrix, candidates);
    Ok(MatrixOperator {
        trunc: a.trunc,
        modes: ModeCount::Two,
        matrix,
        offsets,
    })
}

/// [A, B] = AB - BA.
pub fn commutator(a: &MatrixOperator, b: &MatrixOperator) -> Result<MatrixOperator> {
    a.mul(b)?.sub(&b.mul(a)?)
}
