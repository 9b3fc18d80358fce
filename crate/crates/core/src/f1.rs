//! Eigenstates of the single-mode operator F₁ = a² + β a†² and their
//! closed-form overlaps.
//!
//! The construction is purely algebraic. On the parity sector built on |i⟩
//! the kernel of F₁ is `exp(-β G†_i)|i⟩`, with `G†_i` the canonical
//! conjugate of the weighted quartic annihilator `a⁴/((n̂+1)(n̂+2))`, and the
//! eigenstate with eigenvalue λ follows as `exp(λ 𝒢†_i)` applied to the
//! kernel, where `𝒢†_i` is the arctangent series in the conjugate `g†_i` of
//! a². Both exponentials are evaluated as vector series; every term raises
//! the occupation, so on a truncated ladder the series terminate exactly and
//! the base coefficient stays pinned at 1.
//!
//! Two rival routes to the same states live here as well, kept deliberately
//! separate so the test suite can play them against each other: a binomial
//! resummation of the kernel, `(1 + 4β g†_i²)^(-1/4)` (even) or `^(-3/4)`
//! (odd), and a confluent-hypergeometric normal form evaluated in
//! double-double arithmetic.

use crate::conjugates::{conjugate_single, ConjugatePair, GeneralizedAnnihilator};
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::fock::{
    FockVector, LadderKind, MatrixOperator, Mode, ModeCount, SectorSpec, TruncationSpec,
};
use crate::specfun::{atan_c, gauss_2f1_terminating_dd, kummer_m};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn base_level(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn of_level(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sector(self) -> SectorSpec {
        SectorSpec::Residue {
            modulus: 2,
            residue: self.base_level(),
        }
    }
}

/// Complex square roots are two-valued; every closed form here is invariant
/// under the choice, and the variants taking a branch exist so that the
/// invariance can be checked rather than assumed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SqrtBranch {
    #[default]
    Principal,
    Flipped,
}

impl SqrtBranch {
    pub fn sqrt(self, z: C64) -> C64 {
        match self {
            SqrtBranch::Principal => z.sqrt(),
            SqrtBranch::Flipped => -z.sqrt(),
        }
    }

    pub(crate) fn sqrt_dd(self, z: Cdd) -> Cdd {
        match self {
            SqrtBranch::Principal => z.sqrt(),
            SqrtBranch::Flipped => z.sqrt().neg(),
        }
    }
}

/// A closed-form overlap together with the convergence status of the
/// analytic continuation it came from: `valid` is false where the defining
/// series diverges and the printed value is only a formal continuation.
#[derive(Clone, Copy, Debug)]
pub struct OverlapValue {
    pub value: C64,
    pub valid: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct F1Problem {
    beta: C64,
    lambda: C64,
    weight_even: C64,
    weight_odd: C64,
    trunc: TruncationSpec,
}

impl F1Problem {
    pub fn new(
        beta: C64,
        lambda: C64,
        weight_even: C64,
        weight_odd: C64,
        trunc: TruncationSpec,
    ) -> Result<Self> {
        for (name, v) in [
            ("beta", beta),
            ("lambda", lambda),
            ("weight_even", weight_even),
            ("weight_odd", weight_odd),
        ] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!("F1 parameter {name}")));
            }
        }
        Ok(F1Problem {
            beta,
            lambda,
            weight_even,
            weight_odd,
            trunc,
        })
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn weight(&self, parity: Parity) -> C64 {
        match parity {
            Parity::Even => self.weight_even,
            Parity::Odd => self.weight_odd,
        }
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }
}

pub fn f1_operator(beta: C64, trunc: TruncationSpec) -> Result<MatrixOperator> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite("beta".into()));
    }
    let a = MatrixOperator::ladder(Mode::A, LadderKind::Lower, trunc);
    let a2 = a.mul(&a)?;
    a2.add(&a2.dagger().scale(beta))
}

/// Conjugate pair of the bare squared lowering operator; `g†_i` raises by 2.
pub(crate) fn a2_pair(index: usize, trunc: TruncationSpec) -> Result<ConjugatePair> {
    conjugate_single(
        &GeneralizedAnnihilator::single(|_| C64::ONE, 2)?,
        index,
        trunc,
    )
}

/// Conjugate pair of the weighted quartic annihilator a⁴/((n̂+1)(n̂+2)),
/// whose index-i conjugate is (a†⁴/4)(n̂+4-i)/((n̂+3)(n̂+4)). Exponentiating
/// -β times it produces the kernel of F₁.
pub(crate) fn quartic_pair(index: usize, trunc: TruncationSpec) -> Result<ConjugatePair> {
    conjugate_single(
        &GeneralizedAnnihilator::single(
            |n| C64::new(1.0 / ((n as f64 + 1.0) * (n as f64 + 2.0)), 0.0),
            4,
        )?,
        index,
        trunc,
    )
}

/// Odd-power coefficient table of the arctangent expansion
/// `𝒢† = Σ_m b_{2m+1} (g†)^{2m+1}` that upgrades a conjugate of the bare
/// annihilator to a conjugate of the full quadratic operator.
#[derive(Clone, Debug)]
pub struct ArctanSeries {
    odd_coefficients: Vec<C64>,
}

impl ArctanSeries {
    /// Single-mode series: b_{2m+1} = (-4β)^m / (2m+1), summing to
    /// (4β)^(-1/2) atan(√(4β) g†).
    pub fn for_single_mode(beta: C64, max_power: usize) -> Self {
        Self::build(-4.0 * beta, max_power)
    }

    /// Two-mode series: b_{2m+1} = (-β)^m / (2m+1), summing to
    /// β^(-1/2) atan(√β g†). The ratio differs from the single-mode one by
    /// the factor 4 because [a†², g†] = 4 g†² while [a†b†, g†] = g†².
    pub fn for_two_mode(beta: C64, max_power: usize) -> Self {
        Self::build(-beta, max_power)
    }

    fn build(ratio: C64, max_power: usize) -> Self {
        let count = (max_power + 1) / 2;
        let mut odd_coefficients = Vec::with_capacity(count);
        let mut pow = C64::ONE;
        for m in 0..count {
            odd_coefficients.push(pow / (2.0 * m as f64 + 1.0));
            pow *= ratio;
        }
        ArctanSeries { odd_coefficients }
    }

    pub fn coefficient(&self, power: usize) -> C64 {
        if power % 2 == 1 && power / 2 < self.odd_coefficients.len() {
            self.odd_coefficients[power / 2]
        } else {
            C64::ZERO
        }
    }

    pub fn max_power(&self) -> usize {
        match self.odd_coefficients.len() {
            0 => 0,
            len => 2 * len - 1,
        }
    }
}

/// Sum the arctangent series in a raising operator. On a truncated ladder
/// the powers vanish once they overshoot the top level, so the sum is exact
/// as long as the series covers powers up to the space dimension. The
/// accumulation walks only the occupied bands; a full-matrix add per term
/// would dominate the two-mode construction cost.
pub fn arctan_conjugate(series: &ArctanSeries, base: &MatrixOperator) -> Result<MatrixOperator> {
    let square = base.mul(base)?;
    let mut power = base.clone();
    let n = match base.modes() {
        ModeCount::One => base.trunc().dim(),
        ModeCount::Two => base.trunc().dim() * base.trunc().dim(),
    };
    let mut acc = nalgebra::DMatrix::zeros(n, n);
    let mut m = 0;
    while 2 * m + 1 <= series.max_power() {
        if power.is_zero() {
            break;
        }
        let coeff = series.coefficient(2 * m + 1);
        for &off in power.offsets() {
            let lo = 0.max(off);
            let hi = (n as i64).min(n as i64 + off);
            for i in lo..hi {
                let j = (i - off) as usize;
                acc[(i as usize, j)] += coeff * power.entry(i as usize, j);
            }
        }
        power = power.mul(&square)?;
        m += 1;
    }
    MatrixOperator::from_matrix(base.trunc(), base.modes(), acc)
}

/// exp(op)·v as a terminating series; errors if the series fails to
/// terminate (the operators fed in here are nilpotent on the truncation).
pub(crate) fn exp_apply_flat(op: &MatrixOperator, v: &[C64]) -> Result<Vec<C64>> {
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    let cap = 2 * v.len() + 4;
    for k in 1..=cap {
        term = op.apply_slice(&term);
        let scale = 1.0 / k as f64;
        let mut vanished = true;
        for t in term.iter_mut() {
            *t *= scale;
            if *t != C64::ZERO {
                vanished = false;
            }
        }
        if vanished {
            return Ok(sum);
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += *t;
        }
    }
    Err(Error::InvalidParameter(
        "exponential series did not terminate; the operator is not nilpotent on this truncation"
            .into(),
    ))
}

pub(crate) fn nonzero_beta(beta: C64) -> Result<C64> {
    if beta == C64::ZERO {
        return Err(Error::InvalidParameter(
            "closed forms divide by √β and need β ≠ 0".into(),
        ));
    }
    Ok(beta)
}

/// Kernel of F₁ on a parity sector: exp(-β G†)|base⟩ with the quartic
/// conjugate G† of matching index.
pub fn f1_kernel_state(beta: C64, parity: Parity, trunc: TruncationSpec) -> Result<FockVector> {
    let pair = quartic_pair(parity.base_level(), trunc)?;
    let base = FockVector::basis_state(trunc, parity.base_level())?;
    let coeffs = exp_apply_flat(&pair.conjugate.scale(-beta), base.coeffs())?;
    FockVector::from_coeffs(trunc, coeffs)
}

/// The same kernel through the binomial resummation
/// (1 + 4β g†_i²)^(-1/4) |0⟩ resp. (1 + 4β g†_1²)^(-3/4) |1⟩.
pub fn f1_kernel_via_binomial(
    beta: C64,
    parity: Parity,
    trunc: TruncationSpec,
) -> Result<FockVector> {
    let g = a2_pair(parity.base_level(), trunc)?.conjugate;
    let g2 = g.mul(&g)?;
    let alpha = match parity {
        Parity::Even => 0.25,
        Parity::Odd => 0.75,
    };
    let base = FockVector::basis_state(trunc, parity.base_level())?;
    let mut term = base.coeffs().to_vec();
    let mut sum = term.clone();
    let mut q = 0.0_f64;
    loop {
        let scalar = beta * (-4.0 * (alpha + q) / (q + 1.0));
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
    FockVector::from_coeffs(trunc, sum)
}

fn family_from_kernel(prob: &F1Problem, parity: Parity, kernel: FockVector) -> Result<FockVector> {
    let g = a2_pair(parity.base_level(), prob.trunc)?.conjugate;
    let series = ArctanSeries::for_single_mode(prob.beta, prob.trunc.dim());
    let gcal = arctan_conjugate(&series, &g)?;
    let coeffs = exp_apply_flat(&gcal.scale(prob.lambda), kernel.coeffs())?;
    FockVector::from_coeffs(prob.trunc, coeffs)
}

/// One parity family of the eigenstate, gauge-fixed to a unit base
/// coefficient: exp(λ 𝒢†_i) exp(-β G†_i) |i⟩.
pub fn f1_family_state(prob: &F1Problem, parity: Parity) -> Result<FockVector> {
    let kernel = f1_kernel_state(prob.beta, parity, prob.trunc)?;
    family_from_kernel(prob, parity, kernel)
}

/// The full eigenstate: the weighted sum of the two parity families.
pub fn f1_eigenstate(prob: &F1Problem) -> Result<FockVector> {
    let even = f1_family_state(prob, Parity::Even)?;
    let odd = f1_family_state(prob, Parity::Odd)?;
    even.scale(prob.weight_even)
        .add(&odd.scale(prob.weight_odd))
}

/// Family state with the kernel taken through the binomial route instead of
/// the quartic-conjugate exponential.
pub fn f1_state_via_binomial(prob: &F1Problem, parity: Parity) -> Result<FockVector> {
    let kernel = f1_kernel_via_binomial(prob.beta, parity, prob.trunc)?;
    family_from_kernel(prob, parity, kernel)
}

pub fn f1_state_via_kummer(prob: &F1Problem, parity: Parity) -> Result<FockVector> {
    f1_state_via_kummer_with_root(prob, parity, SqrtBranch::Principal)
}

/// Family state through the confluent-hypergeometric normal form
/// exp(-(i/2)√β a†²) M(a, b, i√β a†²) |base⟩ with
/// a = 1/4 - iλ/(4√β), b = 1/2 (even) or a = 3/4 - iλ/(4√β), b = 3/2 (odd).
///
/// The expansion of the M series suffers catastrophic cancellation in plain
/// f64 once the occupation grows, so the whole construction runs in
/// double-double arithmetic.
pub fn f1_state_via_kummer_with_root(
    prob: &F1Problem,
    parity: Parity,
    root: SqrtBranch,
) -> Result<FockVector> {
    nonzero_beta(prob.beta)?;
    let dim = prob.trunc.dim();
    let s = root.sqrt_dd(Cdd::from_c64(prob.beta));
    let is = s.mul_i();
    let lam = Cdd::from_c64(prob.lambda);
    let (a0, b0, base) = match parity {
        Parity::Even => (0.25, 0.5, 0),
        Parity::Odd => (0.75, 1.5, 1),
    };
    let a = Cdd::new(a0, 0.0).sub(lam.div(s.scale(4.0)).mul_i());
    let b = Cdd::new(b0, 0.0);

    let amps: Vec<Dd> = (0..dim.saturating_sub(2))
        .map(|n| Dd::new(((n + 1) * (n + 2)) as f64).sqrt())
        .collect();
    let raise2 = |v: &[Cdd]| -> Vec<Cdd> {
        let mut out = vec![Cdd::zero(); dim];
        for (n, &amp) in amps.iter().enumerate() {
            out[n + 2] = v[n].scale_dd(amp);
        }
        out
    };

    let mut term = vec![Cdd::zero(); dim];
    term[base] = Cdd::one();
    let mut msum = term.clone();
    for k in 0..dim {
        let kf = k as f64;
        let scalar = is
            .mul(a.add(Cdd::new(kf, 0.0)))
            .div(b.add(Cdd::new(kf, 0.0)).scale(kf + 1.0));
        term = raise2(&term);
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
        for (s_, t) in msum.iter_mut().zip(&term) {
            *s_ = s_.add(*t);
        }
    }

    let half_neg_is = is.scale(-0.5);
    let mut exp_term = msum.clone();
    let mut acc = msum;
    for j in 0..dim {
        // Divide in dd: rounding 1/(j+1) to f64 first would cost ~1e-16
        // relative per term, which the cancellation then amplifies.
        let scalar = half_neg_is.div(Cdd::new(j as f64 + 1.0, 0.0));
        exp_term = raise2(&exp_term);
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
        for (s_, t) in acc.iter_mut().zip(&exp_term) {
            *s_ = s_.add(*t);
        }
    }

    FockVector::from_coeffs(prob.trunc, acc.iter().map(|z| z.to_c64()).collect())
}

pub fn f1_overlap_squeezed(prob: &F1Problem, mu: C64, parity: Parity) -> Result<OverlapValue> {
    f1_overlap_squeezed_with_root(prob, mu, parity, SqrtBranch::Principal)
}

/// Overlap with the gauge-fixed squeezed probe of matching parity,
/// Σ_n μ*ⁿ-weighted ladder states with a unit base coefficient:
/// exp((λ/√(4β)) atan(√(4β) μ*)) (1 + 4β μ*²)^(-1/4) for the even family
/// and exponent -3/4 for the odd one. The underlying series converges for
/// |μ√β| < 1/2; outside, the value is flagged as a formal continuation.
pub fn f1_overlap_squeezed_with_root(
    prob: &F1Problem,
    mu: C64,
    parity: Parity,
    root: SqrtBranch,
) -> Result<OverlapValue> {
    let beta = nonzero_beta(prob.beta)?;
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::NonFinite("mu".into()));
    }
    let root4 = root.sqrt(4.0 * beta);
    let mus = mu.conj();
    let phase = ((prob.lambda / root4) * atan_c(root4 * mus)).exp();
    let w = C64::ONE + 4.0 * beta * mus * mus;
    let exponent = match parity {
        Parity::Even => -0.25,
        Parity::Odd => -0.75,
    };
    Ok(OverlapValue {
        value: phase * w.powf(exponent),
        valid: mu.norm() * beta.norm().sqrt() < 0.5,
    })
}

pub fn f1_overlap_coherent(prob: &F1Problem, alpha: C64, parity: Parity) -> Result<OverlapValue> {
    f1_overlap_coherent_with_root(prob, alpha, parity, SqrtBranch::Principal)
}

/// ⟨α| applied to one gauge-fixed parity family:
/// e^(-|α|²/2) exp(-(i/2)√β α*²) M(a, b, i√β α*²), times α* for the odd
/// family, with the same (a, b) as the normal form.
pub fn f1_overlap_coherent_with_root(
    prob: &F1Problem,
    alpha: C64,
    parity: Parity,
    root: SqrtBranch,
) -> Result<OverlapValue> {
    let beta = nonzero_beta(prob.beta)?;
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::NonFinite("alpha".into()));
    }
    let s = root.sqrt(beta);
    let i = C64::i();
    let as2 = alpha.conj() * alpha.conj();
    let z = i * s * as2;
    let (a0, b0) = match parity {
        Parity::Even => (0.25, 0.5),
        Parity::Odd => (0.75, 1.5),
    };
    let a = C64::new(a0, 0.0) - i * prob.lambda / (4.0 * s);
    let m = kummer_m(a, C64::new(b0, 0.0), z)?;
    let front = (-0.5 * i * s * as2).exp() * (-0.5 * alpha.norm_sqr()).exp();
    let odd_factor = match parity {
        Parity::Even => C64::ONE,
        Parity::Odd => alpha.conj(),
    };
    Ok(OverlapValue {
        value: front * m * odd_factor,
        valid: true,
    })
}

pub fn f1_overlap_number(prob: &F1Problem, n: usize) -> Result<C64> {
    f1_overlap_number_with_root(prob, n, SqrtBranch::Principal)
}

/// ⟨n| on the full weighted eigenstate. The number state's parity selects
/// the family, so the family weight is included:
///
/// ```text
/// ⟨2m|ψ⟩   = C_even (-i√β/2)^m (√((2m)!)/m!)  ₂F₁(-m, 1/4 - iλ/(4√β); 1/2; 2)
/// ⟨2m+1|ψ⟩ = C_odd  (-i√β/2)^m (√((2m+1)!)/m!) ₂F₁(-m, 3/4 - iλ/(4√β); 3/2; 2)
/// ```
///
/// The terminating Gauss sum at argument 2 cancels catastrophically in f64
/// (the terms outgrow the sum by many orders), so it is carried out in
/// double-double arithmetic.
pub fn f1_overlap_number_with_root(prob: &F1Problem, n: usize, root: SqrtBranch) -> Result<C64> {
    nonzero_beta(prob.beta)?;
    let s = root.sqrt_dd(Cdd::from_c64(prob.beta));
    let neg_is_half = s.mul_i().scale(-0.5);
    let lam = Cdd::from_c64(prob.lambda);
    let parity = Parity::of_level(n);
    let m = n / 2;
    let (a0, c0) = match parity {
        Parity::Even => (0.25, 0.5),
        Parity::Odd => (0.75, 1.5),
    };
    let a = Cdd::new(a0, 0.0).sub(lam.div(s.scale(4.0)).mul_i());
    let c = Cdd::new(c0, 0.0);
    let mut pref = Cdd::one();
    for j in 1..=m {
        let top = match parity {
            Parity::Even => (2 * j) * (2 * j - 1),
            Parity::Odd => (2 * j + 1) * (2 * j),
        };
        pref = pref
            .mul(neg_is_half)
            .scale_dd(Dd::new(top as f64).sqrt())
            .div(Cdd::new(j as f64, 0.0));
    }
    let f = gauss_2f1_terminating_dd(m, a, c, Cdd::new(2.0, 0.0));
    Ok(prob.weight(parity) * pref.mul(f).to_c64())
}

pub fn f1_wavefunction(prob: &F1Problem, x: f64, parity: Parity) -> Result<C64> {
    f1_wavefunction_with_root(prob, x, parity, SqrtBranch::Principal)
}

/// Unnormalized position wavefunction of one gauge-fixed parity family:
///
/// ```text
/// f_even(x) = exp(-(x²/2)(1+i√β)/(1-i√β)) M(1/4 - iλ/(4√β), 1/2, (2i√β/(1+β)) x²)
/// f_odd(x)  = x · (same with 3/4, 3/2)
/// ```
///
/// Only ratios f(x)/f(x₀) are physically meaningful; the overall scale ties
/// to the Fock-space gauge in a way that depends on π^(-1/4) factors left
/// out here.
pub fn f1_wavefunction_with_root(
    prob: &F1Problem,
    x: f64,
    parity: Parity,
    root: SqrtBranch,
) -> Result<C64> {
    let beta = nonzero_beta(prob.beta)?;
    if !x.is_finite() {
        return Err(Error::NonFinite("x".into()));
    }
    let s = root.sqrt(beta);
    let i = C64::i();
    let denom = C64::ONE - i * s;
    let shift = C64::ONE + beta;
    if denom.norm() < 1e-300 || shift.norm() < 1e-300 {
        return Err(Error::InvalidParameter(
            "β = -1 is outside the domain of the position-space form".into(),
        ));
    }
    let x2 = C64::new(x * x, 0.0);
    let envelope = (-0.5 * x2 * (C64::ONE + i * s) / denom).exp();
    let z = 2.0 * i * s / shift * x2;
    let (a0, b0) = match parity {
        Parity::Even => (0.25, 0.5),
        Parity::Odd => (0.75, 1.5),
    };
    let a = C64::new(a0, 0.0) - i * prob.lambda / (4.0 * s);
    let m = kummer_m(a, C64::new(b0, 0.0), z)?;
    let odd_factor = match parity {
        Parity::Even => C64::ONE,
        Parity::Odd => C64::new(x, 0.0),
    };
    Ok(envelope * m * odd_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::commutator;
    use crate::oracle::{recursion_coefficients, RecursionKind, RecursionOracle};

    fn t(dim: usize, guard: usize) -> TruncationSpec {
        TruncationSpec::new(dim, guard).unwrap()
    }

    fn prob(beta: C64, lambda: C64, trunc: TruncationSpec) -> F1Problem {
        F1Problem::new(beta, lambda, C64::ONE, C64::ONE, trunc).unwrap()
    }

    /// Relative agreement with a floor: values that are both negligible on
    /// the state's own scale (base coefficient 1) count as equal.
    fn close(a: C64, b: C64, rel: f64, floor: f64) -> bool {
        let (na, nb) = (a.norm(), b.norm());
        if na < floor && nb < floor {
            return true;
        }
        (a - b).norm() / na.max(nb) <= rel
    }

    #[test]
    fn operator_has_the_expected_matrix_elements() {
        let beta = C64::new(0.0, 0.09);
        let op = f1_operator(beta, t(16, 2)).unwrap();
        assert!((op.entry(0, 2) - C64::new(2.0_f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((op.entry(4, 2) - beta * 12.0_f64.sqrt()).norm() < 1e-15);
        assert_eq!(op.entry(3, 2), C64::ZERO);
    }

    #[test]
    fn arctan_series_coefficients() {
        let beta = C64::new(0.05, 0.05);
        let s = ArctanSeries::for_single_mode(beta, 8);
        assert_eq!(s.coefficient(1), C64::ONE);
        assert!((s.coefficient(3) - (-4.0 * beta / 3.0)).norm() < 1e-16);
        assert!((s.coefficient(5) - 16.0 * beta * beta / 5.0).norm() < 1e-16);
        assert_eq!(s.coefficient(2), C64::ZERO);
        let s2 = ArctanSeries::for_two_mode(beta, 8);
        assert!((s2.coefficient(3) - (-beta / 3.0)).norm() < 1e-16);
    }

    #[test]
    fn arctan_conjugate_is_canonical_only_with_the_matching_series() {
        let trunc = t(64, 4);
        let beta = C64::new(0.0, 0.09);
        let f = f1_operator(beta, trunc).unwrap();
        let g = a2_pair(0, trunc).unwrap().conjugate;
        let good = arctan_conjugate(&ArctanSeries::for_single_mode(beta, 64), &g).unwrap();
        let dev = commutator(&f, &good)
            .unwrap()
            .sub(&MatrixOperator::identity(trunc, crate::fock::ModeCount::One))
            .unwrap();
        let limit = trunc.interior_limit(2);
        let sector = Parity::Even.sector();
        let resid = dev.max_abs_where(|n| n < limit && sector.contains_level(n));
        assert!(resid < 1e-12, "residual {resid}");

        // The two-mode coefficient ratio differs by a factor 4; using it
        // here must break the conjugacy by a visible margin.
        let bad = arctan_conjugate(&ArctanSeries::for_two_mode(beta, 64), &g).unwrap();
        let dev = commutator(&f, &bad)
            .unwrap()
            .sub(&MatrixOperator::identity(trunc, crate::fock::ModeCount::One))
            .unwrap();
        let resid = dev.max_abs_where(|n| n < limit && sector.contains_level(n));
        assert!(resid > 1e-3, "residual {resid}");
    }

    #[test]
    fn kernel_routes_agree_and_hit_the_algebraic_spot_value() {
        let trunc = t(64, 4);
        for beta in [C64::new(0.04, 0.0), C64::new(0.0, 0.09), C64::new(0.05, 0.05)] {
            for parity in [Parity::Even, Parity::Odd] {
                let exp_route = f1_kernel_state(beta, parity, trunc).unwrap();
                let binom = f1_kernel_via_binomial(beta, parity, trunc).unwrap();
                let dev = (0..trunc.dim())
                    .map(|n| (exp_route.coeff(n) - binom.coeff(n)).norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-14, "beta {beta} parity {parity:?}: dev {dev}");
            }
            let even = f1_kernel_state(beta, Parity::Even, trunc).unwrap();
            let c4 = -beta / 6.0_f64.sqrt();
            assert!((even.coeff(4) - c4).norm() < 1e-15);
            assert_eq!(even.coeff(2), C64::ZERO);
            assert_eq!(even.coeff(1), C64::ZERO);
        }
    }

    #[test]
    fn kernels_annihilate_under_the_operator() {
        let trunc = t(96, 6);
        let beta = C64::new(0.05, 0.05);
        let f = f1_operator(beta, trunc).unwrap();
        let limit = trunc.interior_limit(2);
        for parity in [Parity::Even, Parity::Odd] {
            let kernel = f1_kernel_state(beta, parity, trunc).unwrap();
            let image = f.apply(&kernel).unwrap();
            let resid = (0..limit).map(|n| image.coeff(n).norm()).fold(0.0, f64::max);
            assert!(resid < 1e-13, "parity {parity:?}: residual {resid}");
        }
    }

    #[test]
    fn family_state_matches_frozen_recursion_values() {
        let trunc = t(128, 8);
        let even = f1_family_state(
            &prob(C64::new(0.0, 0.09), C64::new(0.7, 0.0), trunc),
            Parity::Even,
        )
        .unwrap();
        assert_eq!(even.coeff(0), C64::ONE);
        assert_eq!(even.coeff(1), C64::ZERO);
        let want = C64::new(6.6756519539201401e-6, 1.2597484167282187e-6);
        assert!(
            (even.coeff(20) - want).norm() < 1e-12,
            "c20 = {}",
            even.coeff(20)
        );

        let odd = f1_family_state(
            &prob(C64::new(0.05, 0.05), C64::new(1.0, 0.3), trunc),
            Parity::Odd,
        )
        .unwrap();
        assert_eq!(odd.coeff(1), C64::ONE);
        let want = C64::new(-7.4875562599592037e-7, -7.7458476239805202e-7);
        assert!(
            (odd.coeff(21) - want).norm() < 1e-12,
            "c21 = {}",
            odd.coeff(21)
        );
    }

    #[test]
    fn eigenstate_mixes_families_with_weights() {
        let trunc = t(64, 4);
        let beta = C64::new(0.04, 0.0);
        let lambda = C64::new(0.7, 0.0);
        let p = F1Problem::new(beta, lambda, C64::new(2.0, 0.0), C64::new(0.0, 3.0), trunc)
            .unwrap();
        let psi = f1_eigenstate(&p).unwrap();
        let even = f1_family_state(&p, Parity::Even).unwrap();
        let odd = f1_family_state(&p, Parity::Odd).unwrap();
        for n in 0..trunc.dim() {
            let want = 2.0 * even.coeff(n) + C64::new(0.0, 3.0) * odd.coeff(n);
            assert!((psi.coeff(n) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn lambda_zero_reduces_the_family_to_the_kernel() {
        let trunc = t(64, 4);
        let beta = C64::new(0.0, 0.09);
        let p = prob(beta, C64::ZERO, trunc);
        for parity in [Parity::Even, Parity::Odd] {
            let fam = f1_family_state(&p, parity).unwrap();
            let ker = f1_kernel_state(beta, parity, trunc).unwrap();
            for n in 0..trunc.dim() {
                assert_eq!(fam.coeff(n), ker.coeff(n));
            }
        }
    }

    #[test]
    fn beta_zero_still_produces_an_a_squared_eigenstate() {
        let trunc = t(64, 4);
        let lambda = C64::new(1.0, 0.3);
        let p = prob(C64::ZERO, lambda, trunc);
        let psi = f1_eigenstate(&p).unwrap();
        let f = f1_operator(C64::ZERO, trunc).unwrap();
        let image = f.apply(&psi).unwrap();
        let limit = trunc.interior_limit(2);
        let resid = (0..limit)
            .map(|n| (image.coeff(n) - lambda * psi.coeff(n)).norm())
            .fold(0.0, f64::max);
        assert!(resid < 1e-12, "residual {resid}");
    }

    #[test]
    fn all_three_construction_routes_agree() {
        let trunc = t(96, 6);
        for beta in [C64::new(0.04, 0.0), C64::new(0.0, 0.09), C64::new(0.05, 0.05)] {
            for lambda in [C64::ZERO, C64::new(0.7, 0.0), C64::new(1.0, 0.3)] {
                let p = prob(beta, lambda, trunc);
                for parity in [Parity::Even, Parity::Odd] {
                    let via_exp = f1_family_state(&p, parity).unwrap();
                    let via_binom = f1_state_via_binomial(&p, parity).unwrap();
                    let via_kummer = f1_state_via_kummer(&p, parity).unwrap();
                    for n in 0..60 {
                        let a = via_exp.coeff(n);
                        let b = via_binom.coeff(n);
                        let c = via_kummer.coeff(n);
                        assert!(close(a, b, 1e-11, 1e-13), "binomial n={n}: {a} vs {b}");
                        assert!(close(a, c, 1e-11, 1e-13), "kummer n={n}: {a} vs {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn squeezed_overlap_matches_frozen_values_and_flags_validity() {
        let trunc = t(64, 4);
        let p = prob(C64::new(0.0, 0.09), C64::new(0.7, 0.0), trunc);
        let mu = C64::new(0.3, -0.2);
        let even = f1_overlap_squeezed(&p, mu, Parity::Even).unwrap();
        let want = C64::new(1.2407187126447050, 0.16982253991436618);
        assert!((even.value - want).norm() < 1e-14, "even {}", even.value);
        assert!(even.valid);
        let odd = f1_overlap_squeezed(&p, mu, Parity::Odd).unwrap();
        let want = C64::new(1.2698834433297394, 0.16166240559545486);
        assert!((odd.value - want).norm() < 1e-14, "odd {}", odd.value);

        // |μ√β| = 0.5 exactly sits outside the convergence disc.
        let p = prob(C64::new(0.25, 0.0), C64::new(0.7, 0.0), trunc);
        let at_edge = f1_overlap_squeezed(&p, C64::ONE, Parity::Even).unwrap();
        assert!(!at_edge.valid);
        let inside = f1_overlap_squeezed(&p, C64::new(0.99, 0.0), Parity::Even).unwrap();
        assert!(inside.valid);
    }

    #[test]
    fn coherent_overlap_matches_frozen_values() {
        let trunc = t(64, 4);
        let p = prob(C64::new(0.04, 0.0), C64::new(0.7, 0.0), trunc);
        let alpha = C64::new(0.8, 0.3);
        let even = f1_overlap_coherent(&p, alpha, Parity::Even).unwrap();
        let want = C64::new(0.82869714219163600, -0.12287065064556949);
        assert!((even.value - want).norm() < 1e-14, "even {}", even.value);
        assert!(even.valid);
        let odd = f1_overlap_coherent(&p, alpha, Parity::Odd).unwrap();
        let want = C64::new(0.57919913680568439, -0.25335410569889330);
        assert!((odd.value - want).norm() < 1e-14, "odd {}", odd.value);
    }

    #[test]
    fn number_overlap_dispatches_weights_and_matches_the_recursion() {
        let trunc = t(64, 4);
        let beta = C64::new(0.0, 0.09);
        let lambda = C64::new(0.7, 0.0);
        let p = prob(beta, lambda, trunc);
        let c2 = f1_overlap_number(&p, 2).unwrap();
        assert!((c2 - lambda / 2.0_f64.sqrt()).norm() < 1e-15);

        let doubled = F1Problem::new(beta, lambda, C64::new(2.0, 0.0), C64::ZERO, trunc).unwrap();
        let c2w = f1_overlap_number(&doubled, 2).unwrap();
        assert!((c2w - 2.0 * c2).norm() < 1e-15);
        assert_eq!(f1_overlap_number(&doubled, 3).unwrap(), C64::ZERO);

        let odd = recursion_coefficients(&RecursionOracle {
            kind: RecursionKind::F1Odd,
            beta,
            lambda,
            len: 12,
        })
        .unwrap();
        for m in 0..12 {
            let got = f1_overlap_number(&p, 2 * m + 1).unwrap();
            let scale = odd[m].norm().max(1e-13);
            assert!(
                (got - odd[m]).norm() / scale < 1e-12,
                "m={m}: {got} vs {}",
                odd[m]
            );
        }
    }

    #[test]
    fn number_overlap_vanishes_on_odd_gauss_indices_at_lambda_zero() {
        let trunc = t(64, 4);
        let p = prob(C64::new(0.0, 0.09), C64::ZERO, trunc);
        // At λ = 0 the terminating Gauss sum at argument 2 is exactly zero
        // for odd series order, so levels 2m with odd m drop out.
        for n in [2, 6, 10] {
            let v = f1_overlap_number(&p, n).unwrap();
            assert!(v.norm() < 1e-25, "n={n}: {v}");
        }
        assert!(f1_overlap_number(&p, 4).unwrap().norm() > 1e-3);
    }

    #[test]
    fn wavefunction_matches_the_frozen_ratio() {
        let trunc = t(64, 4);
        let p = prob(C64::new(0.04, 0.0), C64::new(0.7, 0.0), trunc);
        let f1 = f1_wavefunction(&p, 1.0, Parity::Even).unwrap();
        let f0 = f1_wavefunction(&p, 0.5, Parity::Even).unwrap();
        let ratio = f1 / f0;
        assert!(
            (ratio - C64::new(1.0473922081730518, 0.0)).norm() < 1e-12,
            "ratio {ratio}"
        );
    }

    #[test]
    fn closed_forms_are_branch_invariant() {
        let trunc = t(64, 4);
        for beta in [C64::new(0.0, 0.09), C64::new(0.05, 0.05)] {
            let p = prob(beta, C64::new(1.0, 0.3), trunc);
            for parity in [Parity::Even, Parity::Odd] {
                let mu = C64::new(0.3, -0.2);
                let a = f1_overlap_squeezed_with_root(&p, mu, parity, SqrtBranch::Principal)
                    .unwrap()
                    .value;
                let b = f1_overlap_squeezed_with_root(&p, mu, parity, SqrtBranch::Flipped)
                    .unwrap()
                    .value;
                assert!((a - b).norm() / a.norm() < 1e-12, "squeezed {a} vs {b}");

                let alpha = C64::new(0.8, 0.3);
                let a = f1_overlap_coherent_with_root(&p, alpha, parity, SqrtBranch::Principal)
                    .unwrap()
                    .value;
                let b = f1_overlap_coherent_with_root(&p, alpha, parity, SqrtBranch::Flipped)
                    .unwrap()
                    .value;
                assert!((a - b).norm() / a.norm() < 1e-12, "coherent {a} vs {b}");

                let a = f1_wavefunction_with_root(&p, 1.1, parity, SqrtBranch::Principal).unwrap();
                let b = f1_wavefunction_with_root(&p, 1.1, parity, SqrtBranch::Flipped).unwrap();
                assert!((a - b).norm() / a.norm() < 1e-12, "wavefunction {a} vs {b}");
            }
            for n in [6, 7] {
                let a = f1_overlap_number_with_root(&p, n, SqrtBranch::Principal).unwrap();
                let b = f1_overlap_number_with_root(&p, n, SqrtBranch::Flipped).unwrap();
                assert!((a - b).norm() / a.norm() < 1e-12, "number {a} vs {b}");
            }
        }
    }

    #[test]
    fn kummer_route_is_branch_invariant_too() {
        let trunc = t(96, 6);
        let p = prob(C64::new(0.05, 0.05), C64::new(1.0, 0.3), trunc);
        let a = f1_state_via_kummer_with_root(&p, Parity::Even, SqrtBranch::Principal).unwrap();
        let b = f1_state_via_kummer_with_root(&p, Parity::Even, SqrtBranch::Flipped).unwrap();
        for n in 0..60 {
            assert!(close(a.coeff(n), b.coeff(n), 1e-12, 1e-13));
        }
    }

    #[test]
    fn closed_forms_refuse_beta_zero() {
        let trunc = t(32, 2);
        let p = prob(C64::ZERO, C64::new(0.7, 0.0), trunc);
        assert!(f1_overlap_squeezed(&p, C64::new(0.2, 0.0), Parity::Even).is_err());
        assert!(f1_overlap_coherent(&p, C64::ONE, Parity::Even).is_err());
        assert!(f1_overlap_number(&p, 4).is_err());
        assert!(f1_wavefunction(&p, 1.0, Parity::Even).is_err());
        assert!(f1_state_via_kummer(&p, Parity::Even).is_err());
    }
}
