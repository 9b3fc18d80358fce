//! Brute-force ground truth, structurally independent of the closed-form
//! modules.
//!
//! Three routes live here: three-term recursions obtained by projecting the
//! eigenvalue equation onto the number basis, a least-squares nullspace
//! solver that knows nothing about the algebraic construction, and a
//! position-space sum over Hermite functions. The cross-validation suite
//! pits each closed form against at least one of these.

use crate::error::{Error, Result};
use crate::fock::{FockVector, MatrixOperator, ModeCount, SectorSpec};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecursionKind {
    /// Even ladder of the single-mode operator: entry m is the coefficient
    /// of |2m⟩, with the base pinned to 1.
    F1Even,
    /// Odd ladder: entry m is the coefficient of |2m+1⟩.
    F1Odd,
    /// Two-mode ladder with a fixed occupation difference: entry m is the
    /// coefficient of |m, m+offset⟩ (equivalently |m+offset, m⟩; the
    /// recursion is symmetric under swapping the modes).
    F2Diagonal { offset: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct RecursionOracle {
    pub kind: RecursionKind,
    pub beta: C64,
    pub lambda: C64,
    pub len: usize,
}

/// Ladder coefficients of the eigenstate, gauge-fixed to a unit base entry.
///
/// Projecting (F - λ)|ψ⟩ = 0 onto the number basis couples three consecutive
/// ladder entries:
///
/// ```text
/// single even   √((2m+1)(2m+2)) c_{m+1} = λ c_m − β √((2m−1) 2m)   c_{m−1}
/// single odd    √((2m+2)(2m+3)) c_{m+1} = λ c_m − β √(2m (2m+1))   c_{m−1}
/// two-mode      √((m+1)(m+1+k)) c_{m+1} = λ c_m − β √(m (m+k))     c_{m−1}
/// ```
pub fn recursion_coefficients(oracle: &RecursionOracle) -> Result<Vec<C64>> {
    if oracle.len == 0 {
        return Err(Error::InvalidParameter("recursion length must be positive".into()));
    }
    for (name, v) in [("beta", oracle.beta), ("lambda", oracle.lambda)] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!("recursion parameter {name}")));
        }
    }
    let mut c = Vec::with_capacity(oracle.len);
    c.push(C64::ONE);
    for m in 0..oracle.len.saturating_sub(1) {
        let mf = m as f64;
        let (up, down) = match oracle.kind {
            RecursionKind::F1Even => (
                ((2.0 * mf + 1.0) * (2.0 * mf + 2.0)).sqrt(),
                ((2.0 * mf - 1.0) * (2.0 * mf)).sqrt(),
            ),
            RecursionKind::F1Odd => (
                ((2.0 * mf + 2.0) * (2.0 * mf + 3.0)).sqrt(),
                ((2.0 * mf) * (2.0 * mf + 1.0)).sqrt(),
            ),
            RecursionKind::F2Diagonal { offset } => {
                let k = offset as f64;
                (
                    ((mf + 1.0) * (mf + 1.0 + k)).sqrt(),
                    (mf * (mf + k)).sqrt(),
                )
            }
        };
        let prev = if m == 0 { C64::ZERO } else { c[m - 1] };
        c.push((oracle.lambda * c[m] - oracle.beta * down * prev) / up);
    }
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct NullspaceState {
    /// Flat coefficient vector over the full truncated space, zero outside
    /// the sector, with the sector's base member pinned to 1.
    pub coeffs: Vec<C64>,
    /// 2-norm of the interior rows of (F - λ)v, divided by the 2-norm of v.
    pub residual: f64,
    /// The least-squares system had more than one direction consistent with
    /// the interior equations.
    pub rank_deficient: bool,
}

/// Solve (F - λ)v = 0 on a sector by least squares, pinning the base member.
///
/// Only interior rows enter the system: rows within the operator's per-mode
/// reach of the truncation edge see an amputated ladder and would poison the
/// solve. The construction modules never feed this function anything but a
/// matrix; agreement between the two is therefore a genuine cross-check.
pub fn nullspace_eigenstate(
    op: &MatrixOperator,
    lambda: C64,
    sector: &SectorSpec,
) -> Result<NullspaceState> {
    let trunc = op.trunc();
    let modes = op.modes();
    let dim = trunc.dim();
    let members = sector.members_flat(trunc, modes)?;
    if members.is_empty() {
        return Err(Error::InvalidParameter("sector has no members on this truncation".into()));
    }
    let reach = op.per_mode_reach().max(1);
    let limit = trunc.interior_limit(reach);
    let interior = |flat: usize| -> bool {
        match modes {
            ModeCount::One => flat < limit,
            ModeCount::Two => flat / dim < limit && flat % dim < limit,
        }
    };
    let total = match modes {
        ModeCount::One => dim,
        ModeCount::Two => dim * dim,
    };
    let rows: Vec<usize> = (0..total).filter(|&r| interior(r)).collect();
    if rows.is_empty() {
        return Err(Error::InvalidParameter(
            "truncation has no interior rows for this operator".into(),
        ));
    }

    let shifted = op.sub(&MatrixOperator::identity(trunc, modes).scale(lambda))?;
    let full = shifted.matrix();
    let mut system = DMatrix::<C64>::zeros(rows.len(), members.len());
    for (ri, &r) in rows.iter().enumerate() {
        for (ci, &c) in members.iter().enumerate() {
            system[(ri, ci)] = full[(r, c)];
        }
    }

    // Members so close to the edge that no interior row touches them have a
    // structurally zero column. They carry no information, so pin them to
    // zero instead of letting them poison the rank count.
    let constrained: Vec<usize> = (1..members.len())
        .filter(|&ci| system.column(ci).iter().any(|z| *z != C64::ZERO))
        .collect();

    let rhs = -system.column(0).clone_owned();
    let (solution, rank_deficient): (Vec<C64>, bool) = if constrained.is_empty() {
        (Vec::new(), false)
    } else {
        let mut unknowns = DMatrix::<C64>::zeros(rows.len(), constrained.len());
        for (j, &ci) in constrained.iter().enumerate() {
            unknowns.set_column(j, &system.column(ci));
        }
        let svd = unknowns.svd(true, true);
        let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let eps = 1e-12 * max_sv.max(1.0);
        let rank = svd.rank(eps);
        let sol = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::SolveFailed(e.to_string()))?;
        (sol.iter().cloned().collect(), rank < constrained.len())
    };

    let mut coeffs = vec![C64::ZERO; total];
    coeffs[members[0]] = C64::ONE;
    for (j, &ci) in constrained.iter().enumerate() {
        coeffs[members[ci]] = solution[j];
    }
    let vnorm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut rnorm = 0.0;
    for &r in &rows {
        let mut acc = C64::ZERO;
        for &m in &members {
            acc += full[(r, m)] * coeffs[m];
        }
        rnorm += acc.norm_sqr();
    }
    Ok(NullspaceState {
        coeffs,
        residual: rnorm.sqrt() / vnorm,
        rank_deficient,
    })
}

/// Evaluate ⟨x|ψ⟩ = Σ_n c_n φ_n(x) on a grid, with φ_n the Hermite
/// functions: φ₀ = π^(−1/4) e^(−x²/2) and
/// φ_{n+1} = √(2/(n+1)) x φ_n − √(n/(n+1)) φ_{n−1}.
///
/// The sum is only trustworthy when the truncation has visibly converged, so
/// states whose trailing coefficients have not decayed below 1e−14 of the
/// largest one are rejected.
pub fn hermite_position_sum(state: &FockVector, xgrid: &[f64]) -> Result<Vec<C64>> {
    let dim = state.trunc().dim();
    let band = state.trunc().guard().max(2);
    let peak = (0..dim).map(|n| state.coeff(n).norm()).fold(0.0, f64::max);
    let tail = (dim.saturating_sub(band)..dim)
        .map(|n| state.coeff(n).norm())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::InvalidParameter("state is identically zero".into()));
    }
    if tail > 1e-14 * peak {
        return Err(Error::InsufficientDecay(format!(
            "trailing coefficients reach {:.3e} of the peak {:.3e}; enlarge the truncation",
            tail / peak,
            peak
        )));
    }
    if xgrid.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("position grid".into()));
    }
    let norm0 = std::f64::consts::PI.powf(-0.25);
    let mut out = Vec::with_capacity(xgrid.len());
    for &x in xgrid {
        let mut prev = 0.0_f64;
        let mut cur = norm0 * (-0.5 * x * x).exp();
        let mut acc = state.coeff(0) * cur;
        for n in 0..dim - 1 {
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            acc += state.coeff(n + 1) * cur;
        }
        out.push(acc);
    }
    Ok(out)
}
