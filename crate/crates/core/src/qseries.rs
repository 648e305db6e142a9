//! Truncated Laurent series in q over exact rationals.
//!
//! A [`LaurentSeries`] stores coefficients for the exponent window
//! `[low, high)`.  Coefficients below `low` are identically zero; coefficients
//! at exponents `>= high` are *unknown*.  Every operation propagates the
//! tightest window it can prove:
//!
//! - sum: `[min(low_a, low_b), min(high_a, high_b))`
//! - product: `[low_a + low_b, min(low_a + high_b, low_b + high_a))`
//! - `U_p`: `[ceil(low/p), floor((high-1)/p) + 1)`
//! - `V_m`: `[m·low, m·(high-1) + 1)`
//!
//! Equality is only decidable on the overlap of two windows; comparing series
//! whose windows do not overlap is an error, never a silent "true".

use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::numutil::{int, int_pow, is_prime, residue_mod, valuation_rat};
use crate::{Int, Rat};

/// Errors from series arithmetic and (de)serialization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("result precision window is empty")]
    EmptyWindow,
    #[error("precision windows [{0}, {1}) and [{2}, {3}) do not overlap")]
    EmptyOverlap(i64, i64, i64, i64),
    #[error("leading coefficient at exponent {0} is zero")]
    ZeroLeadingCoefficient(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coefficient at exponent {exponent} has denominator divisible by {p}")]
    NonPIntegral { exponent: i64, p: u64 },
    #[error("malformed series text: {0}")]
    Malformed(String),
}

/// Truncated Laurent series over exact rationals; see the module docs for the
/// window semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    low: i64,
    high: i64,
    coeffs: Vec<Rat>,
}

/// Window-minimum p-adic valuation of a series, together with the precision
/// bound through which the minimum was taken.  `value = None` means every
/// inspected coefficient was zero (v_p = +∞ as far as the window can tell).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationP {
    pub value: Option<i64>,
    pub window_high: i64,
}

impl ValuationP {
    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

impl LaurentSeries {
    /// Series with the given lowest exponent and dense coefficient list;
    /// `high = low + coeffs.len()`.
    pub fn new(low: i64, coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "window [low, high) must be nonempty");
        let high = low + coeffs.len() as i64;
        LaurentSeries { low, high, coeffs }
    }

    /// Series from integer coefficients.
    pub fn from_integers(low: i64, coeffs: Vec<Int>) -> Self {
        Self::new(low, coeffs.into_iter().map(Rat::from_integer).collect())
    }

    /// The zero series on `[low, high)`.
    pub fn zero(low: i64, high: i64) -> Self {
        assert!(low < high);
        LaurentSeries {
            low,
            high,
            coeffs: vec![Rat::zero(); (high - low) as usize],
        }
    }

    /// `c·q^exp` known through `high`.
    pub fn monomial(exp: i64, c: Rat, high: i64) -> Self {
        let mut s = Self::zero(exp, high.max(exp + 1));
        s.coeffs[0] = c;
        s
    }

    /// The constant series 1 known through `high`.
    pub fn one(high: i64) -> Self {
        Self::monomial(0, Rat::one(), high)
    }

    /// Sparse constructor: `(exponent, coefficient)` pairs inside `[low, high)`.
    pub fn from_pairs(low: i64, high: i64, pairs: &[(i64, Rat)]) -> Self {
        let mut s = Self::zero(low, high);
        for (e, c) in pairs {
            assert!(*e >= low && *e < high, "exponent {e} outside [{low}, {high})");
            s.coeffs[(e - low) as usize] = c.clone();
        }
        s
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.high
    }

    /// Coefficient at exponent `n`: zero below the window, `None` at or above
    /// the precision bound.
    pub fn coeff(&self, n: i64) -> Option<Rat> {
        if n >= self.high {
            None
        } else if n < self.low {
            Some(Rat::zero())
        } else {
            Some(self.coeffs[(n - self.low) as usize].clone())
        }
    }

    /// Borrowed view of the dense coefficient slice for `[low, high)`.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// True when every stored coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when every stored coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Restrict the window to `[new_low, new_high) ∩ [low, high)`, keeping the
    /// "zero below low" semantics (so `new_low < low` is allowed and pads with
    /// explicit zeros).
    pub fn truncate(&self, new_low: i64, new_high: i64) -> Result<Self, Error> {
        let high = new_high.min(self.high);
        if high <= new_low {
            return Err(Error::EmptyWindow);
        }
        let mut coeffs = Vec::with_capacity((high - new_low) as usize);
        for n in new_low..high {
            coeffs.push(self.coeff(n).expect("n < high"));
        }
        Ok(LaurentSeries { low: new_low, high, coeffs })
    }

    /// Drop leading zero coefficients (raising `low`); keeps at least one
    /// coefficient so the window stays nonempty.
    pub fn trim(&self) -> Self {
        let mut lead = 0usize;
        while lead + 1 < self.coeffs.len() && self.coeffs[lead].is_zero() {
            lead += 1;
        }
        LaurentSeries {
            low: self.low + lead as i64,
            high: self.high,
            coeffs: self.coeffs[lead..].to_vec(),
        }
    }

    /// Coefficientwise sum on the common provable window.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        let low = self.low.min(other.low);
        let high = self.high.min(other.high);
        if high <= low {
            return Err(Error::EmptyWindow);
        }
        let mut coeffs = Vec::with_capacity((high - low) as usize);
        for n in low..high {
            coeffs.push(self.coeff(n).unwrap() + other.coeff(n).unwrap());
        }
        Ok(LaurentSeries { low, high, coeffs })
    }

    /// Coefficientwise difference on the common provable window.
    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            low: self.low,
            high: self.high,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Multiply every coefficient by the scalar `c`.
    pub fn scale(&self, c: &Rat) -> Self {
        LaurentSeries {
            low: self.low,
            high: self.high,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Shift exponents by `k` (multiplication by q^k).
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            low: self.low + k,
            high: self.high + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Cauchy product on the tightest provable window.
    ///
    /// The reference algorithm is the O(n²) schoolbook convolution; the
    /// all-integer fast path below performs the *same* convolution over
    /// `BigInt` (skipping rational normalization) and is bit-identical.
    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        let low = self.low + other.low;
        let high = (self.low + other.high).min(other.low + self.high);
        if high <= low {
            return Err(Error::EmptyWindow);
        }
        let out_len = (high - low) as usize;
        let a = &self.coeffs;
        let b = &other.coeffs;
        if self.is_integral() && other.is_integral() {
            let ai: Vec<Int> = a.iter().map(|c| c.numer().clone()).collect();
            let bi: Vec<Int> = b.iter().map(|c| c.numer().clone()).collect();
            let conv = |k: usize| -> Int {
                let mut acc = Int::zero();
                let i_min = k.saturating_sub(bi.len() - 1);
                let i_max = k.min(ai.len() - 1);
                for i in i_min..=i_max {
                    if !ai[i].is_zero() && !bi[k - i].is_zero() {
                        acc += &ai[i] * &bi[k - i];
                    }
                }
                acc
            };
            let coeffs: Vec<Int> = if out_len >= 512 {
                (0..out_len).into_par_iter().map(conv).collect()
            } else {
                (0..out_len).map(conv).collect()
            };
            return Ok(Self::from_integers(low, coeffs));
        }
        let conv = |k: usize| -> Rat {
            let mut acc = Rat::zero();
            let i_min = k.saturating_sub(b.len() - 1);
            let i_max = k.min(a.len() - 1);
            for i in i_min..=i_max {
                if !a[i].is_zero() && !b[k - i].is_zero() {
                    acc += &a[i] * &b[k - i];
                }
            }
            acc
        };
        let coeffs: Vec<Rat> = if out_len >= 512 {
            (0..out_len).into_par_iter().map(conv).collect()
        } else {
            (0..out_len).map(conv).collect()
        };
        Ok(LaurentSeries { low, high, coeffs })
    }

    /// Multiplicative inverse: `b` with `a·b = 1` on the provable window
    /// `[-low, high - 2·low)`.
    pub fn recip(&self) -> Result<Self, Error> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroLeadingCoefficient(self.low));
        }
        let n = self.coeffs.len();
        let inv0 = a0.recip();
        let mut b: Vec<Rat> = Vec::with_capacity(n);
        b.push(inv0.clone());
        for k in 1..n {
            let mut acc = Rat::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() && !b[k - i].is_zero() {
                    acc += &self.coeffs[i] * &b[k - i];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(LaurentSeries {
            low: -self.low,
            high: self.high - 2 * self.low,
            coeffs: b,
        })
    }

    /// Nonnegative integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Result<Self, Error> {
        if k == 0 {
            // x^0 is the exactly-known constant 1; report it through our own
            // precision bound (or [0,1) if that bound is not positive).
            return Ok(Self::one(self.high.max(1)));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The U_p operator: coefficient at n becomes a(pn).
    pub fn u_p(&self, p: u64) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p_i = p as i64;
        let low = Integer::div_ceil(&self.low, &p_i);
        let high = Integer::div_floor(&(self.high - 1), &p_i) + 1;
        if high <= low {
            return Err(Error::EmptyWindow);
        }
        let mut coeffs = Vec::with_capacity((high - low) as usize);
        for n in low..high {
            coeffs.push(self.coeff(p_i * n).expect("p·n inside window"));
        }
        Ok(LaurentSeries { low, high, coeffs })
    }

    /// The V_m operator: a(n)q^n ↦ a(n)q^{mn}.
    pub fn v_m(&self, m: u64) -> Self {
        assert!(m >= 1, "V_m needs m >= 1");
        let m_i = m as i64;
        let low = m_i * self.low;
        let high = m_i * (self.high - 1) + 1;
        let mut coeffs = vec![Rat::zero(); (high - low) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c.clone();
        }
        LaurentSeries { low, high, coeffs }
    }

    /// Window-minimum p-adic valuation.  Requires every coefficient to be
    /// p-integral.
    pub fn valuation_p(&self, p: u64) -> Result<ValuationP, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut min: Option<i64> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = valuation_rat(c, p);
            if v < 0 {
                return Err(Error::NonPIntegral {
                    exponent: self.low + i as i64,
                    p,
                });
            }
            min = Some(match min {
                None => v,
                Some(m) => m.min(v),
            });
            if min == Some(0) {
                break;
            }
        }
        Ok(ValuationP {
            value: min,
            window_high: self.high,
        })
    }

    /// Replace every coefficient by its canonical residue in `[0, p^k)`.
    pub fn reduce_mod(&self, p: u64, k: u32) -> Result<Self, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        assert!(k >= 1, "modulus exponent must be positive");
        let m = int_pow(p, k);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            match residue_mod(c, &m) {
                Some(r) => coeffs.push(Rat::from_integer(r)),
                None => {
                    return Err(Error::NonPIntegral {
                        exponent: self.low + i as i64,
                        p,
                    })
                }
            }
        }
        Ok(LaurentSeries {
            low: self.low,
            high: self.high,
            coeffs,
        })
    }

    /// Exponent of the first coefficient where the two series differ on the
    /// overlap window, or `None` when they agree throughout.  Errors when the
    /// windows do not overlap.
    pub fn first_difference(&self, other: &Self) -> Result<Option<i64>, Error> {
        let high = self.high.min(other.high);
        if high <= self.low.max(other.low) {
            return Err(Error::EmptyOverlap(self.low, self.high, other.low, other.high));
        }
        let low = self.low.min(other.low);
        for n in low..high {
            if self.coeff(n) != other.coeff(n) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Equality on the overlap window; errors when the windows do not overlap.
    pub fn eq_on_overlap(&self, other: &Self) -> Result<bool, Error> {
        Ok(self.first_difference(other)?.is_none())
    }

    /// Serialize in the line-oriented text format: a `# low=.. high=..` header
    /// followed by one `exponent<TAB>numerator[/denominator]` line per nonzero
    /// coefficient, exponents strictly increasing.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# low={} high={}", self.low, self.high).unwrap();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.low + i as i64;
            if c.denom().is_one() {
                writeln!(out, "{e}\t{}", c.numer()).unwrap();
            } else {
                writeln!(out, "{e}\t{}/{}", c.numer(), c.denom()).unwrap();
            }
        }
        out
    }

    /// Parse the text format produced by [`Self::to_text`].  Additional `#`
    /// comment lines (e.g. provenance notes) are permitted anywhere.
    pub fn from_text(text: &str) -> Result<Self, Error> {
        let mut header: Option<(i64, i64)> = None;
        let mut pairs: Vec<(i64, Rat)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(spec) = rest.strip_prefix("low=") {
                    let mut it = spec.split_whitespace();
                    let low: i64 = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Malformed(format!("line {}: bad header", lineno + 1)))?;
                    let high: i64 = it
                        .next()
                        .and_then(|t| t.strip_prefix("high="))
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Malformed(format!("line {}: bad header", lineno + 1)))?;
                    if header.replace((low, high)).is_some() {
                        return Err(Error::Malformed("duplicate header line".into()));
                    }
                }
                continue;
            }
            let (e_txt, c_txt) = line
                .split_once('\t')
                .ok_or_else(|| Error::Malformed(format!("line {}: expected TAB", lineno + 1)))?;
            let e: i64 = e_txt
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("line {}: bad exponent", lineno + 1)))?;
            let c = parse_rational(c_txt.trim())
                .ok_or_else(|| Error::Malformed(format!("line {}: bad coefficient", lineno + 1)))?;
            if let Some((last, _)) = pairs.last() {
                if e <= *last {
                    return Err(Error::Malformed(format!(
                        "line {}: exponents must be strictly increasing",
                        lineno + 1
                    )));
                }
            }
            pairs.push((e, c));
        }
        let (low, high) = header.ok_or_else(|| Error::Malformed("missing `# low= high=` header".into()))?;
        if low >= high {
            return Err(Error::Malformed("empty window in header".into()));
        }
        for (e, _) in &pairs {
            if *e < low || *e >= high {
                return Err(Error::Malformed(format!("exponent {e} outside [{low}, {high})")));
            }
        }
        Ok(Self::from_pairs(low, high, &pairs))
    }
}

fn parse_rational(t: &str) -> Option<Rat> {
    match t.split_once('/') {
        None => {
            let n: Int = t.parse().ok()?;
            Some(Rat::from_integer(n))
        }
        Some((n_txt, d_txt)) => {
            let n: Int = n_txt.parse().ok()?;
            let d: Int = d_txt.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
    }
}

/// `c·q^e` monomial helper with integer coefficient.
pub fn int_monomial(e: i64, c: i64, high: i64) -> LaurentSeries {
    LaurentSeries::monomial(e, Rat::from_integer(int(c)), high)
}
