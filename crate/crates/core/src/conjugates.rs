//! Canonical conjugates of generalized annihilation operators.
//!
//! For a single-mode annihilator `F = f(n̂) aᵖ` whose level function has no
//! zeros at the retained levels, the operators
//!
//! ```text
//! G†_i = (1/p) F† (F F†)⁻¹ (n̂ + p - i),    i = 0..p-1
//! ```
//!
//! satisfy the canonical conjugacy `[F, G†_i] = 1` on the invariant sector
//! built on `|i⟩` (levels `n ≡ i mod p`). `F F† = |f(n̂)|² (n̂+1)⋯(n̂+p)` is a
//! strictly positive diagonal, inverted in closed form rather than
//! numerically. For a two-mode product annihilator
//! `F = f_a(n̂_a) aᵏ · f_b(n̂_b) bˡ` there is one conjugate per base index on
//! each side: the indexed factor carries the `(1/k)(n̂+k-i)` weight while the
//! other factor contributes its bare `F† (F F†)⁻¹`.

use crate::error::{Error, Result};
use crate::fock::{
    commutator, kron, LadderKind, MatrixOperator, Mode, ModeCount, SectorSpec, TruncationSpec,
};
use num_complex::Complex64 as C64;
use std::sync::Arc;

pub type LevelFn = Arc<dyn Fn(usize) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum GeneralizedAnnihilator {
    Single { f: LevelFn, p: usize },
    Product {
        fa: LevelFn,
        k: usize,
        fb: LevelFn,
        l: usize,
    },
}

impl std::fmt::Debug for GeneralizedAnnihilator {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneralizedAnnihilator::Single { p, .. } => {
                write!(fmt, "GeneralizedAnnihilator::Single {{ p: {p} }}")
            }
            GeneralizedAnnihilator::Product { k, l, .. } => {
                write!(fmt, "GeneralizedAnnihilator::Product {{ k: {k}, l: {l} }}")
            }
        }
    }
}

impl GeneralizedAnnihilator {
    pub fn single(f: impl Fn(usize) -> C64 + Send + Sync + 'static, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter(
                "annihilator power p must be at least 1".into(),
            ));
        }
        Ok(GeneralizedAnnihilator::Single { f: Arc::new(f), p })
    }

    pub fn product(
        fa: impl Fn(usize) -> C64 + Send + Sync + 'static,
        k: usize,
        fb: impl Fn(usize) -> C64 + Send + Sync + 'static,
        l: usize,
    ) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::InvalidParameter(
                "annihilator powers k, l must be at least 1".into(),
            ));
        }
        Ok(GeneralizedAnnihilator::Product {
            fa: Arc::new(fa),
            k,
            fb: Arc::new(fb),
            l,
        })
    }

    /// Matrix of the annihilator on the given truncation (two-mode for
    /// products).
    pub fn matrix(&self, trunc: TruncationSpec) -> Result<MatrixOperator> {
        match self {
            GeneralizedAnnihilator::Single { f, p } => single_annihilator(f, *p, trunc),
            GeneralizedAnnihilator::Product { fa, k, fb, l } => kron(
                &single_annihilator(fa, *k, trunc)?,
                &single_annihilator(fb, *l, trunc)?,
            ),
        }
    }
}

fn check_level_fn(f: &LevelFn, trunc: TruncationSpec) -> Result<()> {
    for n in 0..trunc.dim() {
        let v = f(n);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!("level function at n = {n}")));
        }
        if v == C64::ZERO {
            return Err(Error::InvalidParameter(format!(
                "level function vanishes at n = {n}; the conjugate needs (F F†)⁻¹"
            )));
        }
    }
    Ok(())
}

/// f(n̂) aᵖ as a matrix: the diagonal acts after the lowering.
fn single_annihilator(f: &LevelFn, p: usize, trunc: TruncationSpec) -> Result<MatrixOperator> {
    let lower = MatrixOperator::ladder(Mode::A, LadderKind::Lower, trunc);
    let mut power = MatrixOperator::identity(trunc, ModeCount::One);
    for _ in 0..p {
        power = lower.mul(&power)?;
    }
    MatrixOperator::diag_fn(|n| f(n), trunc).mul(&power)
}

/// (n+1)(n+2)⋯(n+p) as f64; exact for every retained level at the dims used
/// here.
fn rising_product(n: usize, p: usize) -> f64 {
    (1..=p).map(|j| (n + j) as f64).product()
}

/// F† (F F†)⁻¹ D(n̂) for a single-mode factor, where D is an optional
/// `(1/p')(n̂ + p' - i)` conjugate-index weight.
fn conjugate_factor(
    f: &LevelFn,
    p: usize,
    index_weight: Option<usize>,
    trunc: TruncationSpec,
) -> Result<MatrixOperator> {
    check_level_fn(f, trunc)?;
    let fmat = single_annihilator(f, p, trunc)?;
    let diag = MatrixOperator::diag_fn(
        |n| {
            let ffdag = f(n).norm_sqr() * rising_product(n, p);
            let weight = match index_weight {
                Some(i) => (n + p - i) as f64 / p as f64,
                None => 1.0,
            };
            C64::new(weight / ffdag, 0.0)
        },
        trunc,
    );
    fmat.dagger().mul(&diag)
}

/// A canonical pair: the annihilator, its conjugate, the sector on which the
/// conjugacy holds, and the per-mode occupation reach of either operator.
#[derive(Clone, Debug)]
pub struct ConjugatePair {
    pub annihilator: MatrixOperator,
    pub conjugate: MatrixOperator,
    pub sector: SectorSpec,
    pub reach: usize,
}

/// Canonical conjugate of a single-mode annihilator for the sector built on
/// `|index⟩`.
pub fn conjugate_single(
    op: &GeneralizedAnnihilator,
    index: usize,
    trunc: TruncationSpec,
) -> Result<ConjugatePair> {
    let GeneralizedAnnihilator::Single { f, p } = op else {
        return Err(Error::InvalidParameter(
            "conjugate_single expects a single-mode annihilator".into(),
        ));
    };
    if index >= *p {
        return Err(Error::InvalidParameter(format!(
            "conjugate index {index} must be below the power {p}"
        )));
    }
    let annihilator = single_annihilator(f, *p, trunc)?;
    let conjugate = conjugate_factor(f, *p, Some(index), trunc)?;
    Ok(ConjugatePair {
        annihilator,
        conjugate,
        sector: SectorSpec::Residue {
            modulus: *p,
            residue: index,
        },
        reach: *p,
    })
}

/// Canonical conjugate of a two-mode product annihilator for the sectors
/// built on base states carrying `index` quanta in the given mode.
pub fn conjugate_product(
    op: &GeneralizedAnnihilator,
    side: Mode,
    index: usize,
    trunc: TruncationSpec,
) -> Result<ConjugatePair> {
    let GeneralizedAnnihilator::Product { fa, k, fb, l } = op else {
        return Err(Error::InvalidParameter(
            "conjugate_product expects a two-mode product annihilator".into(),
        ));
    };
    let (indexed_power, modulus) = match side {
        Mode::A => (*k, *k),
        Mode::B => (*l, *l),
    };
    if index >= indexed_power {
        return Err(Error::InvalidParameter(format!(
            "conjugate index {index} must be below the power {indexed_power}"
        )));
    }
    let (ma, mb) = match side {
        Mode::A => (
            conjugate_factor(fa, *k, Some(index), trunc)?,
            conjugate_factor(fb, *l, None, trunc)?,
        ),
        Mode::B => (
            conjugate_factor(fa, *k, None, trunc)?,
            conjugate_factor(fb, *l, Some(index), trunc)?,
        ),
    };
    let annihilator = kron(
        &single_annihilator(fa, *k, trunc)?,
        &single_annihilator(fb, *l, trunc)?,
    )?;
    let conjugate = kron(&ma, &mb)?;
    Ok(ConjugatePair {
        annihilator,
        conjugate,
        sector: SectorSpec::FamilyUnion {
            mode: side,
            modulus,
            residue: index,
        },
        reach: (*k).max(*l),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ConjugacyReport {
    pub max_residual: f64,
    pub interior_limit: usize,
    pub pass: bool,
}

/// Check `[F, G†] = 1` on the pair's sector, away from the truncation edge.
/// An empty interior fails rather than passing vacuously.
pub fn verify_conjugacy(pair: &ConjugatePair, tol: f64) -> Result<ConjugacyReport> {
    let trunc = pair.annihilator.trunc();
    let modes = pair.annihilator.modes();
    let dev = commutator(&pair.annihilator, &pair.conjugate)?
        .sub(&MatrixOperator::identity(trunc, modes))?;
    let limit = trunc.interior_limit(pair.reach);
    let dim = trunc.dim();
    let sector = pair.sector;
    let max_residual = dev.max_abs_where(|idx| match modes {
        ModeCount::One => idx < limit && sector.contains_level(idx),
        ModeCount::Two => {
            let (na, nb) = (idx / dim, idx % dim);
            na < limit && nb < limit && sector.contains_pair(na, nb)
        }
    });
    Ok(ConjugacyReport {
        max_residual,
        interior_limit: limit,
        pass: limit > 0 && max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockVector;

    fn t(dim: usize, guard: usize) -> TruncationSpec {
        TruncationSpec::new(dim, guard).unwrap()
    }

    fn one() -> impl Fn(usize) -> C64 + Send + Sync + 'static {
        |_| C64::ONE
    }

    #[test]
    fn squared_lowering_conjugates_match_closed_forms() {
        let trunc = t(16, 2);
        let a2 = GeneralizedAnnihilator::single(one(), 2).unwrap();
        let pair0 = conjugate_single(&a2, 0, trunc).unwrap();
        let pair1 = conjugate_single(&a2, 1, trunc).unwrap();
        // g†₀ = (a†²/2)(n̂+1)⁻¹ and g†₁ = (a†²/2)(n̂+2)⁻¹, diagonal acting first.
        for n in 0..14 {
            let amp = ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt();
            let want0 = amp / (2.0 * (n as f64 + 1.0));
            let want1 = amp / (2.0 * (n as f64 + 2.0));
            assert!((pair0.conjugate.entry(n + 2, n) - C64::new(want0, 0.0)).norm() < 1e-15);
            assert!((pair1.conjugate.entry(n + 2, n) - C64::new(want1, 0.0)).norm() < 1e-15);
        }
        for pair in [&pair0, &pair1] {
            let report = verify_conjugacy(pair, 1e-12).unwrap();
            assert!(report.pass, "residual {}", report.max_residual);
        }
    }

    #[test]
    fn squared_conjugates_satisfy_the_square_commutator() {
        // [a†², g†ᵢ] = 4 (g†ᵢ)², at every level away from the edge.
        let trunc = t(32, 2);
        let a2 = GeneralizedAnnihilator::single(one(), 2).unwrap();
        let raise2 = {
            let r = MatrixOperator::ladder(Mode::A, LadderKind::Raise, trunc);
            r.mul(&r).unwrap()
        };
        for i in 0..2 {
            let g = conjugate_single(&a2, i, trunc).unwrap().conjugate;
            let lhs = commutator(&raise2, &g).unwrap();
            let rhs = g.mul(&g).unwrap().scale(C64::new(4.0, 0.0));
            let dev = lhs.sub(&rhs).unwrap();
            let limit = trunc.interior_limit(4);
            assert!(dev.max_abs_where(|n| n < limit) < 1e-13);
        }
    }

    #[test]
    fn weighted_quartic_conjugates_match_the_four_closed_forms() {
        // F = a⁴/((n̂+1)(n̂+2)) has G†_i = (a†⁴/4)(n̂+4-i)/((n̂+3)(n̂+4)).
        let trunc = t(24, 2);
        let f = GeneralizedAnnihilator::single(
            |n| C64::new(1.0 / ((n as f64 + 1.0) * (n as f64 + 2.0)), 0.0),
            4,
        )
        .unwrap();
        for i in 0..4 {
            let pair = conjugate_single(&f, i, trunc).unwrap();
            for n in 0..18 {
                let nf = n as f64;
                let amp = ((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt();
                let want = amp * (nf + 4.0 - i as f64) / (4.0 * (nf + 3.0) * (nf + 4.0));
                let got = pair.conjugate.entry(n + 4, n);
                assert!(
                    (got - C64::new(want, 0.0)).norm() < 1e-14,
                    "i={i} n={n}: {got} vs {want}"
                );
            }
            let report = verify_conjugacy(&pair, 1e-12).unwrap();
            assert!(report.pass, "i={i} residual {}", report.max_residual);
        }
    }

    #[test]
    fn product_conjugates_match_closed_forms_and_sectors() {
        let trunc = t(12, 2);
        let ab = GeneralizedAnnihilator::product(one(), 1, one(), 1).unwrap();
        let pa = conjugate_product(&ab, Mode::A, 0, trunc).unwrap();
        let pb = conjugate_product(&ab, Mode::B, 0, trunc).unwrap();
        // g†₀ = a†b†/(n̂_b+1), g†₁ = a†b†/(n̂_a+1).
        let va = pa
            .conjugate
            .apply_two(&crate::fock::TwoModeFockVector::basis_state(trunc, 0, 2).unwrap())
            .unwrap();
        let amp = (1.0_f64 * 3.0).sqrt() / 3.0;
        assert!((va.coeff(1, 3) - C64::new(amp, 0.0)).norm() < 1e-15);
        let vb = pb
            .conjugate
            .apply_two(&crate::fock::TwoModeFockVector::basis_state(trunc, 2, 0).unwrap())
            .unwrap();
        assert!((vb.coeff(3, 1) - C64::new(amp, 0.0)).norm() < 1e-15);
        for pair in [&pa, &pb] {
            let report = verify_conjugacy(pair, 1e-12).unwrap();
            assert!(report.pass, "residual {}", report.max_residual);
        }
        // The conjugacy genuinely fails outside the sector: at (1,0) the
        // commutator [ab, g†₀] evaluates to 2, not 1.
        let dev = commutator(&pa.annihilator, &pa.conjugate)
            .unwrap()
            .sub(&MatrixOperator::identity(trunc, ModeCount::Two))
            .unwrap();
        let flat = trunc.dim();
        assert!((dev.entry(flat, flat) - C64::ONE).norm() < 1e-14);
    }

    #[test]
    fn weighted_two_mode_quartic_passes_all_four_sectors() {
        let trunc = t(14, 2);
        let f = GeneralizedAnnihilator::product(
            |n| C64::new(1.0 / (n as f64 + 1.0), 0.0),
            2,
            |n| C64::new(1.0 / (n as f64 + 1.0), 0.0),
            2,
        )
        .unwrap();
        for (side, index) in [(Mode::A, 0), (Mode::B, 0), (Mode::A, 1), (Mode::B, 1)] {
            let pair = conjugate_product(&f, side, index, trunc).unwrap();
            let report = verify_conjugacy(&pair, 1e-12).unwrap();
            assert!(
                report.pass,
                "side {side:?} index {index}: residual {}",
                report.max_residual
            );
        }
    }

    #[test]
    fn two_mode_quartic_conjugate_matches_printed_diagonal() {
        // For F = a²b²/((n̂_a+1)(n̂_b+1)), the mode-a index-0 conjugate is
        // (1/2) a†²b†² /(n̂_b+2).
        let trunc = t(10, 2);
        let f = GeneralizedAnnihilator::product(
            |n| C64::new(1.0 / (n as f64 + 1.0), 0.0),
            2,
            |n| C64::new(1.0 / (n as f64 + 1.0), 0.0),
            2,
        )
        .unwrap();
        let pair = conjugate_product(&f, Mode::A, 0, trunc).unwrap();
        let v = pair
            .conjugate
            .apply_two(&crate::fock::TwoModeFockVector::basis_state(trunc, 0, 1).unwrap())
            .unwrap();
        // ⟨2,3| G† |0,1⟩ = √(2·1·3·2) / (2·(1+2))
        let want = (2.0_f64 * 1.0 * 3.0 * 2.0).sqrt() / 6.0;
        assert!((v.coeff(2, 3) - C64::new(want, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let trunc = t(8, 1);
        assert!(GeneralizedAnnihilator::single(one(), 0).is_err());
        let a2 = GeneralizedAnnihilator::single(one(), 2).unwrap();
        assert!(conjugate_single(&a2, 2, trunc).is_err());
        assert!(conjugate_product(&a2, Mode::A, 0, trunc).is_err());
        let vanishing = GeneralizedAnnihilator::single(|n| C64::new(n as f64, 0.0), 2).unwrap();
        assert!(conjugate_single(&vanishing, 0, trunc).is_err());
    }

    #[test]
    fn empty_interior_is_reported_as_failure() {
        let trunc = t(8, 2);
        let f = GeneralizedAnnihilator::single(one(), 4).unwrap();
        let pair = conjugate_single(&f, 0, trunc).unwrap();
        let report = verify_conjugacy(&pair, 1e-12).unwrap();
        assert_eq!(report.interior_limit, 0);
        assert!(!report.pass);
    }

    #[test]
    fn annihilator_matrix_applies_diagonal_after_lowering() {
        let trunc = t(8, 1);
        let f = GeneralizedAnnihilator::single(|n| C64::new((n as f64 + 1.0).recip(), 0.0), 2)
            .unwrap();
        let m = f.matrix(trunc).unwrap();
        let v = m
            .apply(&FockVector::basis_state(trunc, 4).unwrap())
            .unwrap();
        // f(n̂) a² |4⟩ = √(4·3) f(2) |2⟩
        assert!((v.coeff(2) - C64::new(12.0_f64.sqrt() / 3.0, 0.0)).norm() < 1e-15);
    }
}
