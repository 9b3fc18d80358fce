//! Eigenstates of the pair operator F₂ = ab + βa†b† and their closed-form
//! overlaps.
//!
//! F₂ conserves the occupation imbalance n̂_b - n̂_a, so each eigenstate splits
//! into independent families living on the diagonals {|m+q_a, m+q_b⟩}. Every
//! family is built algebraically the same way as the single-mode ones:
//! a quartic-conjugate exponential supplies the kernel of F₂ on the family,
//! and an arctangent-resummed conjugate of ab shifts the eigenvalue to λ.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::conjugates::{conjugate_product, ConjugatePair, GeneralizedAnnihilator};
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::f1::{
    arctan_conjugate, exp_apply_flat, nonzero_beta, ArctanSeries, OverlapValue, SqrtBranch,
};
use crate::fock::{
    commutator, kron, LadderKind, MatrixOperator, Mode, ModeCount, SectorSpec, TruncationSpec,
    TwoModeFockVector,
};
use crate::specfun::{atan_c, gauss_2f1_terminating_dd, kummer_m};

/// Label of one diagonal family: `ZeroP` families grow from |0,p⟩ and keep
/// mode b ahead by p quanta, `QZero` families grow from |q,0⟩ and keep mode
/// a ahead by q. `QZero { q: 0 }` and `ZeroP { p: 0 }` both name the
/// balanced family on |0,0⟩; the `ZeroP` spelling is canonical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyLabel {
    ZeroP { p: usize },
    QZero { q: usize },
}

impl FamilyLabel {
    pub fn canonical(self) -> FamilyLabel {
        match self {
            FamilyLabel::QZero { q: 0 } => FamilyLabel::ZeroP { p: 0 },
            other => other,
        }
    }

    /// Occupations (n_a, n_b) of the base state.
    pub fn base(self) -> (usize, usize) {
        match self {
            FamilyLabel::ZeroP { p } => (0, p),
            FamilyLabel::QZero { q } => (q, 0),
        }
    }

    /// Occupation imbalance n_b - n_a, constant along the family.
    pub fn excess(self) -> i64 {
        match self {
            FamilyLabel::ZeroP { p } => p as i64,
            FamilyLabel::QZero { q } => -(q as i64),
        }
    }

    /// The k in the family's ladder amplitudes √((m+1)(m+1+k)); equals
    /// p or q.
    pub fn offset(self) -> usize {
        match self {
            FamilyLabel::ZeroP { p } => p,
            FamilyLabel::QZero { q } => q,
        }
    }

    pub fn sector(self) -> SectorSpec {
        SectorSpec::DiagonalFamily {
            excess: self.excess(),
        }
    }

    /// The mode whose occupation hits zero at the base state. Conjugates
    /// indexed on this side are the ones defined on the family.
    fn side(self) -> Mode {
        match self {
            FamilyLabel::ZeroP { .. } => Mode::A,
            FamilyLabel::QZero { .. } => Mode::B,
        }
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (qa, qb) = self.base();
        write!(f, "{qa}:{qb}")
    }
}

impl FromStr for FamilyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(':').ok_or_else(|| {
            Error::InvalidParameter(format!("family label '{s}' is not of the form 'na:nb'"))
        })?;
        let parse = |part: &str| -> Result<usize> {
            part.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad occupation '{part}' in '{s}'")))
        };
        let (qa, qb) = (parse(a)?, parse(b)?);
        if qa != 0 && qb != 0 {
            return Err(Error::InvalidParameter(format!(
                "family base {qa}:{qb} must have one empty mode"
            )));
        }
        Ok(if qa == 0 {
            FamilyLabel::ZeroP { p: qb }
        } else {
            FamilyLabel::QZero { q: qa }
        })
    }
}

#[derive(Clone, Debug)]
pub struct F2Problem {
    beta: C64,
    lambda: C64,
    weights: BTreeMap<FamilyLabel, C64>,
    trunc: TruncationSpec,
}

impl F2Problem {
    pub fn new(
        beta: C64,
        lambda: C64,
        weights: BTreeMap<FamilyLabel, C64>,
        trunc: TruncationSpec,
    ) -> Result<Self> {
        for (name, v) in [("beta", beta), ("lambda", lambda)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!("F2 parameter {name}")));
            }
        }
        let mut canon = BTreeMap::new();
        for (label, w) in weights {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::NonFinite(format!("weight of family {label}")));
            }
            *canon.entry(label.canonical()).or_insert(C64::ZERO) += w;
        }
        Ok(F2Problem {
            beta,
            lambda,
            weights: canon,
            trunc,
        })
    }

    /// Problem with unit weight on a single family.
    pub fn single_family(
        beta: C64,
        lambda: C64,
        family: FamilyLabel,
        trunc: TruncationSpec,
    ) -> Result<Self> {
        F2Problem::new(beta, lambda, BTreeMap::from([(family, C64::ONE)]), trunc)
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn weights(&self) -> &BTreeMap<FamilyLabel, C64> {
        &self.weights
    }

    pub fn weight(&self, family: FamilyLabel) -> C64 {
        self.weights
            .get(&family.canonical())
            .copied()
            .unwrap_or(C64::ZERO)
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }
}

pub fn f2_operator(beta: C64, trunc: TruncationSpec) -> Result<MatrixOperator> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite("beta".into()));
    }
    let lower = MatrixOperator::ladder(Mode::A, LadderKind::Lower, trunc);
    let ab = kron(&lower, &lower)?;
    ab.add(&ab.dagger().scale(beta))
}

/// Conjugate pair of the bare product annihilator ab; the index-0 conjugate
/// is a†b†/(n̂_b+1) on the a side and a†b†/(n̂_a+1) on the b side.
pub(crate) fn ab_pair(side: Mode, trunc: TruncationSpec) -> Result<ConjugatePair> {
    conjugate_product(
        &GeneralizedAnnihilator::product(|_| C64::ONE, 1, |_| C64::ONE, 1)?,
        side,
        0,
        trunc,
    )
}

/// Conjugate pair of the weighted quartic product annihilator
/// a²b²/((n̂_a+1)(n̂_b+1)). Exponentiating -β times its side index-0
/// conjugate produces the kernel of F₂ on that side's families.
pub(crate) fn quartic_product_pair(
    side: Mode,
    index: usize,
    trunc: TruncationSpec,
) -> Result<ConjugatePair> {
    let weight = |n: usize| C64::new(1.0 / (n as f64 + 1.0), 0.0);
    conjugate_product(
        &GeneralizedAnnihilator::product(weight, 2, weight, 2)?,
        side,
        index,
        trunc,
    )
}

/// Kernel of F₂ on one family: exp(-β G†)|q_a, q_b⟩ with the quartic product
/// conjugate G† on the family's side.
pub fn f2_kernel_state(
    beta: C64,
    family: FamilyLabel,
    trunc: TruncationSpec,
) -> Result<TwoModeFockVector> {
    let pair = quartic_product_pair(family.side(), 0, trunc)?;
    let (qa, qb) = family.base();
    let base = TwoModeFockVector::basis_state(trunc, qa, qb)?;
    let coeffs = exp_apply_flat(&pair.conjugate.scale(-beta), base.coeffs())?;
    TwoModeFockVector::from_coeffs(trunc, coeffs)
}

fn family_from_kernel(
    prob: &F2Problem,
    family: FamilyLabel,
    kernel: TwoModeFockVector,
) -> Result<TwoModeFockVector> {
    let g = ab_pair(family.side(), prob.trunc)?.conjugate;
    let series = ArctanSeries::for_two_mode(prob.beta, prob.trunc.dim());
    let gcal = arctan_conjugate(&series, &g)?;
    let coeffs = exp_apply_flat(&gcal.scale(prob.lambda), kernel.coeffs())?;
    TwoModeFockVector::from_coeffs(prob.trunc, coeffs)
}

/// One diagonal family of the eigenstate, gauge-fixed to a unit base
/// coefficient: exp(λ 𝒢†) exp(-β G†) |q_a, q_b⟩.
pub fn f2_family_state(prob: &F2Problem, family: FamilyLabel) -> Result<TwoModeFockVector> {
    let kernel = f2_kernel_state(prob.beta, family, prob.trunc)?;
    family_from_kernel(prob, family, kernel)
}

/// The full eigenstate: the weighted sum over the problem's families.
pub fn f2_eigenstate(prob: &F2Problem) -> Result<TwoModeFockVector> {
    let mut acc = TwoModeFockVector::zero(prob.trunc);
    for (&family, &w) in prob.weights() {
        if w == C64::ZERO {
            continue;
        }
        acc = acc.add(&f2_family_state(prob, family)?.scale(w))?;
    }
    Ok(acc)
}

/// Family state with the kernel resummed as (1 + β g†²)^(-(k+1)/2) |base⟩,
/// k the family offset.
pub fn f2_state_via_binomial(prob: &F2Problem, family: FamilyLabel) -> Result<TwoModeFockVector> {
    let g = ab_pair(family.side(), prob.trunc)?.conjugate;
    let g2 = g.mul(&g)?;
    let alpha = (family.offset() as f64 + 1.0) / 2.0;
    let (qa, qb) = family.base();
    let base = TwoModeFockVector::basis_state(prob.trunc, qa, qb)?;
    let mut term = base.coeffs().to_vec();
    let mut sum = term.clone();
    let mut q = 0.0_f64;
    loop {
        let scalar = prob.beta * (-(alpha + q) / (q + 1.0));
        term = g2.apply_slice(&term);
        let mut vanished = true;
        for t in term.iter_mut() {
            *t *= scalar;
            if *t != C64::ZERO {
                vanished = false;
            }
        }
        if vanished {
            break;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += *t;
        }
        q += 1.0;
    }
    let kernel = TwoModeFockVector::from_coeffs(prob.trunc, sum)?;
    family_from_kernel(prob, family, kernel)
}

pub fn f2_state_via_kummer(prob: &F2Problem, family: FamilyLabel) -> Result<TwoModeFockVector> {
    f2_state_via_kummer_with_root(prob, family, SqrtBranch::Principal)
}

/// Family state through the confluent-hypergeometric normal form
/// exp(-i√β a†b†) M(a, b, 2i√β a†b†) |base⟩ with a = (k+1)/2 - iλ/(2√β),
/// b = k+1, k the family offset. Everything lives on the family diagonal,
/// so the series run over the diagonal position alone; like the single-mode
/// normal form they cancel catastrophically in f64 and are carried in
/// double-double arithmetic.
pub fn f2_state_via_kummer_with_root(
    prob: &F2Problem,
    family: FamilyLabel,
    root: SqrtBranch,
) -> Result<TwoModeFockVector> {
    nonzero_beta(prob.beta)?;
    let dim = prob.trunc.dim();
    let (qa, qb) = family.base();
    let len = dim - qa.max(qb);
    let s = root.sqrt_dd(Cdd::from_c64(prob.beta));
    let is = s.mul_i();
    let lam = Cdd::from_c64(prob.lambda);
    let k = family.offset() as f64;
    let a = Cdd::new((k + 1.0) / 2.0, 0.0).sub(lam.div(s.scale(2.0)).mul_i());
    let b = Cdd::new(k + 1.0, 0.0);

    let amps: Vec<Dd> = (0..len.saturating_sub(1))
        .map(|m| Dd::new(((m + 1 + qa) * (m + 1 + qb)) as f64).sqrt())
        .collect();
    let raise = |v: &[Cdd]| -> Vec<Cdd> {
        let mut out = vec![Cdd::zero(); len];
        for (m, &amp) in amps.iter().enumerate() {
            out[m + 1] = v[m].scale_dd(amp);
        }
        out
    };

    let two_is = is.scale(2.0);
    let mut term = vec![Cdd::zero(); len];
    term[0] = Cdd::one();
    let mut msum = term.clone();
    for j in 0..len {
        let jf = j as f64;
        let scalar = two_is
            .mul(a.add(Cdd::new(jf, 0.0)))
            .div(b.add(Cdd::new(jf, 0.0)).scale(jf + 1.0));
        term = raise(&term);
        let mut vanished = true;
        for t in term.iter_mut() {
            *t = t.mul(scalar);
            if !t.is_zero() {
                vanished = false;
            }
        }
        if vanished {
            break;
        }
        for (acc, t) in msum.iter_mut().zip(&term) {
            *acc = acc.add(*t);
        }
    }

    let neg_is = is.neg();
    let mut exp_term = msum.clone();
    let mut acc = msum;
    for j in 0..len {
        // Divide in dd; rounding 1/(j+1) to f64 first costs ~1e-16 relative
        // per term, which the cancellation then amplifies.
        let scalar = neg_is.div(Cdd::new(j as f64 + 1.0, 0.0));
        exp_term = raise(&exp_term);
        let mut vanished = true;
        for t in exp_term.iter_mut() {
            *t = t.mul(scalar);
            if !t.is_zero() {
                vanished = false;
            }
        }
        if vanished {
            break;
        }
        for (a_, t) in acc.iter_mut().zip(&exp_term) {
            *a_ = a_.add(*t);
        }
    }

    let mut flat = vec![C64::ZERO; dim * dim];
    for (m, z) in acc.iter().enumerate() {
        flat[(m + qa) * dim + (m + qb)] = z.to_c64();
    }
    TwoModeFockVector::from_coeffs(prob.trunc, flat)
}

pub fn f2_overlap_caves_schumaker(
    prob: &F2Problem,
    mu: C64,
    family: FamilyLabel,
) -> Result<OverlapValue> {
    f2_overlap_caves_schumaker_with_root(prob, mu, family, SqrtBranch::Principal)
}

/// Overlap with the gauge-fixed pair-squeezed probe of matching imbalance,
/// Σ_m μ^m √C(m+k, k) |m+q_a, m+q_b⟩ with a unit base coefficient:
/// exp((λ/√β) atan(√β μ*)) (1 + β μ*²)^(-(k+1)/2), k the family offset.
/// The underlying series converges for |μ√β| < 1; outside, the value is
/// only a formal continuation.
pub fn f2_overlap_caves_schumaker_with_root(
    prob: &F2Problem,
    mu: C64,
    family: FamilyLabel,
    root: SqrtBranch,
) -> Result<OverlapValue> {
    let beta = nonzero_beta(prob.beta)?;
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::NonFinite("mu".into()));
    }
    let s = root.sqrt(beta);
    let mus = mu.conj();
    let phase = ((prob.lambda / s) * atan_c(s * mus)).exp();
    let w = C64::ONE + beta * mus * mus;
    let exponent = -(family.offset() as f64 + 1.0) / 2.0;
    Ok(OverlapValue {
        value: phase * w.powf(exponent),
        valid: mu.norm() * beta.norm().sqrt() < 1.0,
    })
}

pub fn f2_overlap_coherent(
    prob: &F2Problem,
    gamma: C64,
    delta: C64,
    family: FamilyLabel,
) -> Result<OverlapValue> {
    f2_overlap_coherent_with_root(prob, gamma, delta, family, SqrtBranch::Principal)
}

/// ⟨γ| ⊗ ⟨δ| on one gauge-fixed family:
/// e^(-(|γ|²+|δ|²)/2) exp(-i√β γ*δ*) M(a, b, 2i√β γ*δ*) times the base
/// monomial δ*^p/√(p!) resp. γ*^q/√(q!), with the normal-form (a, b).
pub fn f2_overlap_coherent_with_root(
    prob: &F2Problem,
    gamma: C64,
    delta: C64,
    family: FamilyLabel,
    root: SqrtBranch,
) -> Result<OverlapValue> {
    let beta = nonzero_beta(prob.beta)?;
    for (name, v) in [("gamma", gamma), ("delta", delta)] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(name.into()));
        }
    }
    let s = root.sqrt(beta);
    let i = C64::i();
    let gd = gamma.conj() * delta.conj();
    let k = family.offset() as f64;
    let a = C64::new((k + 1.0) / 2.0, 0.0) - i * prob.lambda / (2.0 * s);
    let m = kummer_m(a, C64::new(k + 1.0, 0.0), 2.0 * i * s * gd)?;
    let mono_base = match family.side() {
        Mode::A => delta.conj(),
        Mode::B => gamma.conj(),
    };
    let mut monomial = C64::ONE;
    let mut fact = 1.0_f64;
    for j in 1..=family.offset() {
        monomial *= mono_base;
        fact *= j as f64;
    }
    monomial /= fact.sqrt();
    let front = (-i * s * gd).exp() * (-0.5 * (gamma.norm_sqr() + delta.norm_sqr())).exp();
    Ok(OverlapValue {
        value: front * m * monomial,
        valid: true,
    })
}

pub fn f2_overlap_number(prob: &F2Problem, na: usize, nb: usize) -> Result<C64> {
    f2_overlap_number_with_root(prob, na, nb, SqrtBranch::Principal)
}

/// ⟨n_a, n_b| on the full weighted eigenstate. The occupation pair fixes
/// the family through its imbalance n_b - n_a, so the family weight is
/// included:
///
/// ```text
/// ⟨n+q_a, n+q_b|ψ⟩ = C_fam (-i√β)ⁿ (√(n!(n+k)!)/(n!√(k!))) ₂F₁(-n, a; k+1; 2)
/// ```
///
/// with a = (k+1)/2 - iλ/(2√β), k the family offset and n the position
/// along the family. The terminating Gauss sum at argument 2 cancels
/// catastrophically in f64, so it is carried in double-double arithmetic.
pub fn f2_overlap_number_with_root(
    prob: &F2Problem,
    na: usize,
    nb: usize,
    root: SqrtBranch,
) -> Result<C64> {
    nonzero_beta(prob.beta)?;
    let family = if nb >= na {
        FamilyLabel::ZeroP { p: nb - na }
    } else {
        FamilyLabel::QZero { q: na - nb }
    };
    let n = na.min(nb);
    let k = family.offset();
    let s = root.sqrt_dd(Cdd::from_c64(prob.beta));
    let neg_is = s.mul_i().neg();
    let lam = Cdd::from_c64(prob.lambda);
    let a = Cdd::new((k as f64 + 1.0) / 2.0, 0.0).sub(lam.div(s.scale(2.0)).mul_i());
    let c = Cdd::new(k as f64 + 1.0, 0.0);
    let mut pref = Cdd::one();
    for j in 1..=n {
        pref = pref
            .mul(neg_is)
            .scale_dd(Dd::new((j * (j + k)) as f64).sqrt())
            .div(Cdd::new(j as f64, 0.0));
    }
    let f = gauss_2f1_terminating_dd(n, a, c, Cdd::new(2.0, 0.0));
    Ok(prob.weight(family) * pref.mul(f).to_c64())
}

/// Deviations of the mode-sum decoupling: with c = (a + b)/√2 and
/// d = -i(a - b)/√2 the pair operator equals a sum of two single-mode
/// quadratic operators, F₂ = ½(c² + d²) + β ½(c†² + d†²).
#[derive(Clone, Copy, Debug)]
pub struct TransformReport {
    /// Max entry of F₂ minus the recombined single-mode form, whole matrix.
    pub identity_deviation: f64,
    /// Max entry of [c, d], whole matrix.
    pub cd_commutator: f64,
    /// Max interior entry of [c, c†] - 1 and [d, d†] - 1.
    pub canonical_interior_deviation: f64,
}

pub fn f2_via_f1_transform(beta: C64, trunc: TruncationSpec) -> Result<TransformReport> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite("beta".into()));
    }
    let lower = MatrixOperator::ladder(Mode::A, LadderKind::Lower, trunc);
    let id = MatrixOperator::identity(trunc, ModeCount::One);
    let a = kron(&lower, &id)?;
    let b = kron(&id, &lower)?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let c = a.add(&b)?.scale(C64::new(inv_sqrt2, 0.0));
    let d = a.sub(&b)?.scale(C64::new(0.0, -inv_sqrt2));

    let quad = c.mul(&c)?.add(&d.mul(&d)?)?.scale(C64::new(0.5, 0.0));
    let recombined = quad.add(&quad.dagger().scale(beta))?;
    let identity_deviation = f2_operator(beta, trunc)?.sub(&recombined)?.max_abs();

    let cd_commutator = commutator(&c, &d)?.max_abs();

    let one = MatrixOperator::identity(trunc, ModeCount::Two);
    let canon_c = commutator(&c, &c.dagger())?.sub(&one)?;
    let canon_d = commutator(&d, &d.dagger())?.sub(&one)?;
    let dim = trunc.dim();
    let limit = trunc.interior_limit(1);
    let interior = |flat: usize| flat / dim < limit && flat % dim < limit;
    let canonical_interior_deviation = canon_c
        .max_abs_where(&interior)
        .max(canon_d.max_abs_where(&interior));

    Ok(TransformReport {
        identity_deviation,
        cd_commutator,
        canonical_interior_deviation,
    })
}
