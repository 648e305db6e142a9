//! Level-1 building blocks and their scaled combinations.
//!
//! - [`EtaQuotient`]: products ∏ η(d·τ)^{r_d}, expanded exactly via sparse
//!   Euler-product factors (the pentagonal-number series for ∏(1−q^{dn})).
//! - [`eisenstein`]: E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) q^n with exact Bernoulli
//!   numbers.
//! - [`j_function`]: the normalized J = E₄³/Δ − 744 = q^{-1} + 196884q + ….
//! - [`FormExpr`]: symbolic rational combinations of scaled level-1 generators
//!   (Δ, E_k, η-powers), closed under the Atkin–Lehner slash action
//!   f(dτ)|_k W_e = ((d*e)/d)^{k/2} f((d*e)τ).  The slash exists only here,
//!   never on raw truncated series, because that is the only slash rule the
//!   finite computations need.
//! - Constructed forms: the Δ-quotient g with g ≡ 1 (mod p) and its W_p image,
//!   the symmetrized Eisenstein series F̂ ≡ #AL(Γ) (mod p), and the trace
//!   tr f = f + p^{1−k/2}(f|W_p)|U_p down one level.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::catalog::GroupSymbol;
use crate::numutil::{exact_sqrt_rat, int, is_prime, legendre, rat, star};
use crate::qseries::LaurentSeries;
use crate::{Int, Rat};

/// Errors from expansion, slashing, and the constructed forms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eta quotient q-offset {0}/24 is not an integer")]
    FractionalOffset(i64),
    #[error("Eisenstein weight {0} must be even and >= 4")]
    BadWeight(u64),
    #[error("term weight {term} does not match expression weight {expr}")]
    MixedWeight { term: Rat, expr: Rat },
    #[error("{e} is not an exact divisor of {n}")]
    NotExactDivisor { e: u64, n: u64 },
    #[error("slash scalar ({num}/{den})^({k}/2) is irrational")]
    IrrationalScalar { num: Int, den: Int, k: i64 },
    #[error("group precondition failed: {0}")]
    BadGroup(String),
    #[error("trace formula needs even weight, got {0}")]
    OddWeight(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Series(#[from] crate::qseries::Error),
}

// ---------------------------------------------------------------------------
// Eta quotients
// ---------------------------------------------------------------------------

/// A product ∏ η(d_i·τ)^{r_i}, kept as the raw factor list (repeated scales
/// allowed; expansion handles them independently).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    terms: Vec<(u64, i64)>,
}

impl EtaQuotient {
    pub fn new(terms: Vec<(u64, i64)>) -> Self {
        assert!(terms.iter().all(|&(d, _)| d >= 1), "eta scale must be >= 1");
        EtaQuotient { terms }
    }

    /// The empty product (constant 1).
    pub fn one() -> Self {
        EtaQuotient { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    /// Concatenation of factor lists: expand(concat) = expand(a)·expand(b).
    pub fn concat(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        EtaQuotient { terms }
    }

    /// 24·(q-offset) = Σ d_i·r_i.
    pub fn offset24(&self) -> i64 {
        self.terms.iter().map(|&(d, r)| d as i64 * r).sum()
    }

    /// Twice the weight, Σ r_i (weight is Σ r_i / 2; informational).
    pub fn weight_x2(&self) -> i64 {
        self.terms.iter().map(|&(_, r)| r).sum()
    }

    /// Parse the `d^r` factors-joined-by-`*` text format, e.g.
    /// `1^6*3^6*2^-6*6^-6`.  The empty string denotes the constant 1.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::one());
        }
        let mut terms = Vec::new();
        for factor in text.split('*') {
            let (d_txt, r_txt) = factor
                .split_once('^')
                .ok_or_else(|| bad_quotient(factor, "expected d^r"))?;
            let d: u64 = d_txt.trim().parse().map_err(|_| bad_quotient(factor, "bad scale"))?;
            let r: i64 = r_txt.trim().parse().map_err(|_| bad_quotient(factor, "bad exponent"))?;
            if d == 0 {
                return Err(bad_quotient(factor, "scale must be positive"));
            }
            terms.push((d, r));
        }
        Ok(Self::new(terms))
    }
}

fn bad_quotient(factor: &str, why: &str) -> Error {
    Error::BadGroup(format!("eta quotient factor `{factor}`: {why}"))
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(d, r)| format!("{d}^{r}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse Euler factor for ∏_{n≥1}(1 − q^{dn}) truncated below `len`:
/// the pentagonal-number terms (exponent, sign) with exponent in (0, len).
fn pentagonal_terms(d: u64, len: usize) -> Vec<(usize, bool)> {
    let mut terms = Vec::new();
    let d = d as i64;
    let len = len as i64;
    for k in 1.. {
        let g1 = d * k * (3 * k - 1) / 2;
        let g2 = d * k * (3 * k + 1) / 2;
        if g1 >= len {
            break;
        }
        let neg = k % 2 == 1;
        terms.push((g1 as usize, neg));
        if g2 < len {
            terms.push((g2 as usize, neg));
        }
    }
    terms.sort_unstable();
    terms
}

/// In-place multiply the dense series `c` by `1 + Σ ±q^{e_t}`.
fn mul_sparse(c: &mut [Int], terms: &[(usize, bool)]) {
    for m in (0..c.len()).rev() {
        for &(e, neg) in terms {
            if e > m {
                break;
            }
            if c[m - e].is_zero() {
                continue;
            }
            if neg {
                let t = c[m - e].clone();
                c[m] -= t;
            } else {
                let t = c[m - e].clone();
                c[m] += t;
            }
        }
    }
}

/// In-place divide the dense series `c` by `1 + Σ ±q^{e_t}`.
fn div_sparse(c: &mut [Int], terms: &[(usize, bool)]) {
    for m in 0..c.len() {
        for &(e, neg) in terms {
            if e > m {
                break;
            }
            if c[m - e].is_zero() {
                continue;
            }
            if neg {
                let t = c[m - e].clone();
                c[m] += t;
            } else {
                let t = c[m - e].clone();
                c[m] -= t;
            }
        }
    }
}

/// Exact expansion of ∏ η(d_i·τ)^{r_i} through exponent `high − 1`.
///
/// Each scale contributes the sparse pentagonal factor for ∏(1−q^{dn}),
/// multiplied or divided into the dense accumulator |r| times; all
/// intermediate coefficients are integers.
pub fn expand_eta_quotient(eq: &EtaQuotient, high: i64) -> Result<LaurentSeries, Error> {
    let off24 = eq.offset24();
    if off24 % 24 != 0 {
        return Err(Error::FractionalOffset(off24));
    }
    let offset = off24 / 24;
    if high <= offset {
        return Err(Error::Series(crate::qseries::Error::EmptyWindow));
    }
    let len = (high - offset) as usize;
    let mut c = vec![Int::zero(); len];
    c[0] = Int::one();
    // Merge repeated scales so each pentagonal factor is built once.
    let mut merged: BTreeMap<u64, i64> = BTreeMap::new();
    for &(d, r) in eq.terms() {
        *merged.entry(d).or_insert(0) += r;
    }
    for (d, r) in merged {
        if r == 0 {
            continue;
        }
        let terms = pentagonal_terms(d, len);
        for _ in 0..r.unsigned_abs() {
            if r > 0 {
                mul_sparse(&mut c, &terms);
            } else {
                div_sparse(&mut c, &terms);
            }
        }
    }
    Ok(LaurentSeries::from_integers(offset, c))
}

// ---------------------------------------------------------------------------
// Eisenstein series and j
// ---------------------------------------------------------------------------

/// Bernoulli numbers B_0..B_n (B_1 = −1/2 convention), exact.
pub fn bernoulli(n: u64) -> Vec<Rat> {
    let n = n as usize;
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::one());
    for m in 1..=n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rat::zero();
        let mut binom = Int::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += bj * Rat::from_integer(binom.clone());
            }
            // C(m+1, j+1) = C(m+1, j)·(m+1-j)/(j+1)
            binom = binom * int((m + 1 - j) as i64) / int((j + 1) as i64);
        }
        b.push(-acc / Rat::from_integer(binom));
    }
    b
}

/// E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) q^n on the window [0, high).
pub fn eisenstein(k: u64, high: i64) -> Result<LaurentSeries, Error> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::BadWeight(k));
    }
    assert!(high >= 1, "window must contain the constant term");
    let bk = bernoulli(k).pop().expect("B_k");
    let c = -Rat::from_integer(int(2 * k as i64)) / bk;
    let len = high as usize;
    let mut sigma = vec![Int::zero(); len];
    for d in 1..len {
        let dp = int(d as i64).pow(k as u32 - 1);
        let mut m = d;
        while m < len {
            sigma[m] += &dp;
            m += d;
        }
    }
    let mut coeffs = Vec::with_capacity(len);
    coeffs.push(Rat::one());
    for s in sigma.into_iter().skip(1) {
        coeffs.push(&c * Rat::from_integer(s));
    }
    Ok(LaurentSeries::new(0, coeffs))
}

/// Δ = η(τ)^24 on [1, high).
pub fn delta(high: i64) -> Result<LaurentSeries, Error> {
    expand_eta_quotient(&EtaQuotient::new(vec![(1, 24)]), high)
}

/// The normalized J = E₄³/Δ − 744 = q^{-1} + 0 + 196884q + … on [−1, high).
pub fn j_function(high: i64) -> Result<LaurentSeries, Error> {
    assert!(high >= 0);
    let n = high + 1;
    let e4 = eisenstein(4, n)?;
    let e4_cubed = e4.mul(&e4)?.mul(&e4)?;
    // 1/Δ = q^{-1}·∏(1−q^n)^{-24}, window [−1, n−1)
    let delta_inv = expand_eta_quotient(&EtaQuotient::new(vec![(1, -24)]), n - 1)?;
    let j = e4_cubed.mul(&delta_inv)?;
    Ok(j.sub(&LaurentSeries::monomial(0, rat(744), j.high()))?)
}

// ---------------------------------------------------------------------------
// Symbolic forms and the slash action
// ---------------------------------------------------------------------------

/// A level-1 generator, expanded at a scale recorded separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Δ = η^24, weight 12.
    Delta,
    /// E_k, weight k.
    Eisenstein(u64),
    /// η^r, weight r/2 (r must be even so the expression weight is integral).
    EtaPower(i64),
}

impl Generator {
    /// Twice the weight (integral for every generator).
    pub fn weight_x2(&self) -> i64 {
        match self {
            Generator::Delta => 24,
            Generator::Eisenstein(k) => 2 * *k as i64,
            Generator::EtaPower(r) => *r,
        }
    }
}

/// One scaled generator with a rational scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormTerm {
    pub gen: Generator,
    pub scale: u64,
    pub coeff: Rat,
}

/// A rational linear combination of scaled level-1 generators sharing one
/// weight; the class of expressions closed under [`slash_we`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormExpr {
    weight: i64,
    terms: Vec<FormTerm>,
}

impl FormExpr {
    pub fn new(weight: i64, terms: Vec<FormTerm>) -> Result<Self, Error> {
        for t in &terms {
            if t.gen.weight_x2() != 2 * weight {
                return Err(Error::MixedWeight {
                    term: crate::numutil::rat_frac(t.gen.weight_x2(), 2),
                    expr: rat(weight),
                });
            }
        }
        Ok(FormExpr { weight, terms })
    }

    /// Single generator f(d·τ) with scalar 1.
    pub fn single(gen: Generator, scale: u64) -> Result<Self, Error> {
        let w2 = gen.weight_x2();
        if w2 % 2 != 0 {
            return Err(Error::OddWeight(w2));
        }
        Self::new(w2 / 2, vec![FormTerm { gen, scale, coeff: Rat::one() }])
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn terms(&self) -> &[FormTerm] {
        &self.terms
    }

    pub fn scale(&self, c: &Rat) -> Self {
        FormExpr {
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|t| FormTerm {
                    gen: t.gen,
                    scale: t.scale,
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.terms.is_empty() {
            return Ok(other.clone());
        }
        if other.terms.is_empty() {
            return Ok(self.clone());
        }
        if self.weight != other.weight {
            return Err(Error::MixedWeight {
                term: rat(other.weight),
                expr: rat(self.weight),
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(FormExpr { weight: self.weight, terms })
    }

    /// Expand to a series on [min term offset, high).
    pub fn expand(&self, high: i64) -> Result<LaurentSeries, Error> {
        let mut acc: Option<LaurentSeries> = None;
        for t in &self.terms {
            let d = t.scale;
            // base window high b with d·(b−1)+1 ≥ high
            let base_high = Integer::div_ceil(&(high - 1), &(d as i64)) + 1;
            let base = match t.gen {
                Generator::Delta => delta(base_high)?,
                Generator::Eisenstein(k) => eisenstein(k, base_high)?,
                Generator::EtaPower(r) => expand_eta_quotient(&EtaQuotient::new(vec![(1, r)]), base_high)?,
            };
            let series = base.v_m(d).scale(&t.coeff);
            let series = series.truncate(series.low(), high)?;
            acc = Some(match acc {
                None => series,
                Some(s) => s.add(&series)?,
            });
        }
        match acc {
            Some(s) => Ok(s),
            None => Ok(LaurentSeries::zero(0, high)),
        }
    }
}

/// The Atkin–Lehner slash action on a symbolic expression at level `n_level`:
/// each term f(dτ) maps to ((d*e)/d)^{k/2}·f((d*e)τ).
pub fn slash_we(f: &FormExpr, e: u64, n_level: u64) -> Result<FormExpr, Error> {
    if !crate::numutil::exactly_divides(e, n_level) {
        return Err(Error::NotExactDivisor { e, n: n_level });
    }
    let k = f.weight();
    let mut terms = Vec::with_capacity(f.terms().len());
    for t in f.terms() {
        if n_level % t.scale != 0 {
            return Err(Error::NotExactDivisor { e: t.scale, n: n_level });
        }
        let new_scale = star(t.scale, e);
        let ratio = crate::numutil::rat_frac(new_scale as i64, t.scale as i64);
        let scalar = rational_half_power(&ratio, k)?;
        terms.push(FormTerm {
            gen: t.gen,
            scale: new_scale,
            coeff: &t.coeff * scalar,
        });
    }
    FormExpr::new(k, terms)
}

/// `ratio^{k/2}` as an exact rational; errors when k is odd and `ratio^k` is
/// not a perfect square.
fn rational_half_power(ratio: &Rat, k: i64) -> Result<Rat, Error> {
    if k % 2 == 0 {
        return Ok(rat_pow(ratio, k / 2));
    }
    let full = rat_pow(ratio, k);
    exact_sqrt_rat(&full).ok_or_else(|| Error::IrrationalScalar {
        num: ratio.numer().clone(),
        den: ratio.denom().clone(),
        k,
    })
}

/// `x^k` for possibly negative integer k (x ≠ 0 when k < 0).
fn rat_pow(x: &Rat, k: i64) -> Rat {
    let p = x.pow(k.unsigned_abs().try_into().expect("exponent fits i32"));
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

// ---------------------------------------------------------------------------
// Constructed forms
// ---------------------------------------------------------------------------

/// The Δ-quotient form of a p·n|h-type group Γ (p exactly dividing the level):
///
///   g = ∏_{E ∈ AL(Γ)} (Δ(hτ)^p / Δ(phτ)) | W_E
///     = ∏_E ((h*E)/h)^{6(p−1)} · Δ((h*E)τ)^p / Δ(p(h*E)τ),
///
/// of weight 12·m·(p−1) with m = #AL(Γ), satisfying g ≡ 1 (mod p).  Also
/// returns g|W_p = p^{6m(p+1)} ∏_E ((h*E)/h)^{6(p−1)} Δ(p(h*E)τ)^p/Δ((h*E)τ),
/// whose coefficient valuations satisfy v_p ≥ 6m(p+1).
pub fn delta_quotient_g(
    gamma: &GroupSymbol,
    p: u64,
    high: i64,
) -> Result<(LaurentSeries, i64, LaurentSeries), Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n_total = gamma.n();
    let h = gamma.h();
    if n_total % p != 0 || (n_total / p) % p == 0 {
        return Err(Error::BadGroup(format!(
            "level {n_total} of {gamma} is not exactly divisible by {p}"
        )));
    }
    if h % p == 0 {
        return Err(Error::BadGroup(format!("p = {p} divides h = {h}")));
    }
    let al = gamma.al_set();
    for &e in &al {
        if e % p == 0 {
            return Err(Error::BadGroup(format!("p = {p} divides AL element {e}")));
        }
    }
    let m = al.len() as i64;
    let weight = 12 * m * (p as i64 - 1);

    let mut g_terms: Vec<(u64, i64)> = Vec::new();
    let mut gwp_terms: Vec<(u64, i64)> = Vec::new();
    let mut scalar = Rat::one();
    let six_p_minus_1 = 6 * (p as i64 - 1);
    for &e in &al {
        let he = star(h, e);
        scalar *= rat_pow(&crate::numutil::rat_frac(he as i64, h as i64), six_p_minus_1);
        g_terms.push((he, 24 * p as i64));
        g_terms.push((p * he, -24));
        gwp_terms.push((p * he, 24 * p as i64));
        gwp_terms.push((he, -24));
    }
    let g = expand_eta_quotient(&EtaQuotient::new(g_terms), high)?.scale(&scalar);
    let p_power = rat_pow(&rat(p as i64), 6 * m * (p as i64 + 1));
    let g_wp = expand_eta_quotient(&EtaQuotient::new(gwp_terms), high)?.scale(&(scalar * p_power));
    Ok((g, weight, g_wp))
}

/// The symmetrized Eisenstein series of Prop-3.2 type for an n|h group Γ with
/// p ∤ nh: F̂ = Σ_{E ∈ AL(Γ)} (E/p) · E_{p−1}(hτ)|_{p−1} W_E, which reduces to
/// the constant #AL(Γ) mod p.
pub fn hat_f(gamma: &GroupSymbol, p: u64, high: i64) -> Result<LaurentSeries, Error> {
    if !is_prime(p) || p < 5 {
        return Err(Error::BadGroup(format!("p = {p} must be a prime >= 5")));
    }
    let level = gamma.n() * gamma.h();
    if level % p == 0 {
        return Err(Error::BadGroup(format!("p = {p} divides the level {level}")));
    }
    let h = gamma.h();
    let f = FormExpr::single(Generator::Eisenstein(p - 1), h)?;
    let mut acc = FormExpr::new((p as i64) - 1, Vec::new())?;
    for &e in &gamma.al_set() {
        let chi = legendre(e as i64, p);
        debug_assert!(chi != 0, "p coprime to level implies nonzero symbol");
        let hit = slash_we(&f, e, level)?;
        acc = acc.add(&hit.scale(&rat(chi)))?;
    }
    Ok(acc.expand(high)?)
}

/// Lemma-2.10(b) trace from level pN to level N:
/// tr f = f + p^{1−k/2}·(f|_k W_p)|U_p.  The caller supplies f|W_p (slash is
/// only symbolically available), so misuse of the slash is explicit.
pub fn trace_down(
    f: &LaurentSeries,
    f_slash_wp: &LaurentSeries,
    k: i64,
    p: u64,
) -> Result<LaurentSeries, Error> {
    if k % 2 != 0 {
        return Err(Error::OddWeight(k));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let scalar = rat_pow(&rat(p as i64), 1 - k / 2);
    let hit = f_slash_wp.u_p(p)?.scale(&scalar);
    Ok(f.add(&hit)?)
}
