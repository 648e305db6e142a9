//! Valuation sequences under repeated `U_p`, the arrow notation for eventual
//! arithmetic-progression sequences, and coefficientwise checkers: congruence
//! families for `j`, compression identities between Hauptmoduln, functional
//! equations with their polynomial companions, rate bounds, and mod-`p` cycle
//! detection.
//!
//! Every checker returns a [`CheckReport`] rather than panicking: `fail`
//! always carries the first offending exponent, and `indeterminate` is
//! reserved for windows too small (or searches too vacuous) to decide.

use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::catalog::{Catalog, GroupSymbol};
use crate::numutil::{int_pow, is_prime, rat, valuation_rat};
use crate::qseries::ValuationP;
use crate::report::{CheckReport, Verdict};
use crate::{LaurentSeries, Rat};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("sequence term {index} requested but pattern defines only {defined} terms")]
    OutOfRange { index: u64, defined: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no catalog entry for required symbol {0}")]
    MissingCatalogEntry(String),
    #[error("no bundled functional-equation data for symbol {0}")]
    UnknownDatum(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Catalog(#[from] crate::catalog::Error),
    #[error(transparent)]
    Series(#[from] crate::qseries::Error),
}

/// The notation `a_1,...,a_m -> b_1,...,b_k`: an explicit head followed by a
/// cycle of increments.  `term(i)` equals `a_i` for `i <= m` and thereafter
/// each step adds the next increment, cycling through the `b_j`.  A bare list
/// (no arrow) has an empty cycle and is undefined past its head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatePattern {
    head: Vec<i64>,
    cycle: Vec<i64>,
}

fn parse_int_list(text: &str, what: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| Error::Malformed(format!("bad integer {part:?} in {what}")))
        })
        .collect()
}

impl RatePattern {
    pub fn new(head: Vec<i64>, cycle: Vec<i64>) -> Result<Self, Error> {
        if head.is_empty() {
            return Err(Error::Malformed("pattern head must be nonempty".into()));
        }
        Ok(RatePattern { head, cycle })
    }

    pub fn head(&self) -> &[i64] {
        &self.head
    }

    pub fn cycle(&self) -> &[i64] {
        &self.cycle
    }

    /// 1-indexed term of the sequence.
    pub fn term(&self, i: u64) -> Result<i64, Error> {
        if i == 0 {
            return Err(Error::OutOfRange {
                index: 0,
                defined: self.head.len(),
            });
        }
        let m = self.head.len() as u64;
        if i <= m {
            return Ok(self.head[(i - 1) as usize]);
        }
        if self.cycle.is_empty() {
            return Err(Error::OutOfRange {
                index: i,
                defined: self.head.len(),
            });
        }
        let k = self.cycle.len() as u64;
        let steps = i - m;
        let mut value = self.head[self.head.len() - 1];
        // Whole cycles contribute their sum; then walk the remainder.
        let cycle_sum: i64 = self.cycle.iter().sum();
        value += cycle_sum * ((steps / k) as i64);
        for j in 0..(steps % k) {
            value += self.cycle[j as usize];
        }
        Ok(value)
    }
}

/// Parse the arrow grammar `a,...[->b,...]`.
pub fn parse_rate_pattern(text: &str) -> Result<RatePattern, Error> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Malformed("empty rate pattern".into()));
    }
    match text.split_once("->") {
        None => RatePattern::new(parse_int_list(text, "pattern head")?, Vec::new()),
        Some((head, cycle)) => RatePattern::new(
            parse_int_list(head, "pattern head")?,
            parse_int_list(cycle, "pattern cycle")?,
        ),
    }
}

/// One row of the bundled functional-equation data: a group whose Hauptmodul
/// `𝒯` (with unnormalized companion `𝔗` and `Z = 1/𝔗`) satisfies
/// `p(𝒯|U_p) + p^e Z = c` and `Z|U_p = Σ_j scaled_b[j] Z^j`.  `alpha` is the
/// annihilation rate; only the integer products `p^alpha·b_j` enter any
/// computation, so everything stays rational.
#[derive(Clone, Debug)]
pub struct LehnerDatum {
    pub symbol: GroupSymbol,
    pub p: u64,
    pub e: u32,
    pub alpha: Rat,
    pub scaled_b: Vec<i64>,
}

/// The six bundled rows.
pub fn lehner_data() -> Vec<LehnerDatum> {
    let row = |symbol: &str, p: u64, e: u32, alpha_num: i64, alpha_den: i64, scaled_b: Vec<i64>| {
        LehnerDatum {
            symbol: GroupSymbol::parse(symbol).expect("bundled symbol parses"),
            p,
            e,
            alpha: crate::numutil::rat_frac(alpha_num, alpha_den),
            scaled_b,
        }
    };
    vec![
        row("6+2", 3, 4, 3, 2, vec![18, 324, 2187]),
        row("6+3", 2, 6, 1, 1, vec![6, 32]),
        row("10+5", 2, 4, 3, 2, vec![4, 8]),
        row("22+11", 2, 2, 1, 2, vec![2, 2]),
        row("6|3", 2, 4, 3, 2, vec![0, 8]),
        row("24|4+2", 3, 1, 1, 2, vec![0, 0, 3]),
    ]
}

/// Look up the bundled row for a symbol (any accepted spelling).
pub fn lehner_datum(symbol: &str) -> Result<LehnerDatum, Error> {
    let canonical = GroupSymbol::parse(symbol)?.to_string();
    lehner_data()
        .into_iter()
        .find(|d| d.symbol.to_string() == canonical)
        .ok_or(Error::UnknownDatum(canonical))
}

fn checked_window(base_window: i64, p: u64, iters: u32) -> Result<i64, Error> {
    if base_window <= 0 {
        return Err(Error::Malformed("window must be positive".into()));
    }
    let mut high = base_window;
    for _ in 0..iters {
        high = high
            .checked_mul(p as i64)
            .ok_or_else(|| Error::Malformed("window overflows i64".into()))?;
    }
    high.checked_add(1)
        .ok_or_else(|| Error::Malformed("window overflows i64".into()))
}

/// Window-minimum valuations `v_p(𝒯|U_p^n)` for `n = 1..=iters`, each reliable
/// over at least `base_window` coefficients.
pub fn valuation_sequence(
    catalog: &Catalog,
    symbol: &str,
    p: u64,
    iters: u32,
    base_window: i64,
) -> Result<Vec<ValuationP>, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let high = checked_window(base_window, p, iters)?;
    let mut f = catalog.hauptmodul(symbol, high)?;
    let mut out = Vec::with_capacity(iters as usize);
    for _ in 0..iters {
        f = f.u_p(p)?;
        out.push(f.valuation_p(p)?);
    }
    Ok(out)
}

/// The congruence exponent for the classical prime-power coefficient
/// congruences of `j`: `v_p(c(p^alpha n))` is at least this value.
pub fn lehner_exponent(p: u64, alpha: u32) -> Option<i64> {
    let a = alpha as i64;
    match p {
        2 => Some(3 * a + 8),
        3 => Some(2 * a + 3),
        5 => Some(a + 1),
        7 => Some(a),
        11 => Some(a),
        _ => None,
    }
}

/// Verify `v_p(c(p^alpha n)) >= exp_fn(alpha)` for the coefficients `c` of the
/// normalized `j`-series, for all `alpha <= alpha_max` and all `n` up to
/// `window`.
pub fn check_congruence_family(
    catalog: &Catalog,
    p: u64,
    exp_fn: impl Fn(u32) -> i64,
    alpha_max: u32,
    window: i64,
) -> Result<CheckReport, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let params = json!({ "p": p, "alpha_max": alpha_max });
    if alpha_max == 0 {
        return Ok(
            CheckReport::new("congruence-family", params, window, Verdict::Pass)
                .with_note("vacuous: alpha_max = 0"),
        );
    }
    let high = checked_window(window, p, alpha_max)?;
    let j = catalog.hauptmodul("1", high)?;
    let mut mins: Vec<Option<i64>> = Vec::new();
    for alpha in 1..=alpha_max {
        let bound = exp_fn(alpha);
        let step = (p as i64).pow(alpha);
        let mut min_seen: Option<i64> = None;
        for n in 1..=window {
            let exponent = step * n;
            if exponent >= j.high() {
                break;
            }
            let c = j.coeff(exponent).expect("in window");
            if c.is_zero() {
                continue;
            }
            let v = valuation_rat(&c, p);
            if v < bound {
                return Ok(CheckReport::new(
                    "congruence-family",
                    params,
                    window,
                    Verdict::Fail,
                )
                .with_witness(exponent)
                .with_note(format!("v_{p} = {v} < required {bound} at alpha = {alpha}")));
            }
            min_seen = Some(min_seen.map_or(v, |m: i64| m.min(v)));
        }
        mins.push(min_seen);
    }
    Ok(
        CheckReport::new("congruence-family", params, window, Verdict::Pass)
            .with_valuations(mins)
            .with_note("valuations field records min observed valuation per alpha"),
    )
}

/// The five compression identities relating `𝒯_Γ|U_p` to Hauptmoduln of
/// companion groups.  Each case carries its own hypotheses on how `p` sits
/// inside `Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompressionCase {
    A,
    B,
    C,
    D,
    Conway,
}

impl std::str::FromStr for CompressionCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "a" => Ok(CompressionCase::A),
            "b" => Ok(CompressionCase::B),
            "c" => Ok(CompressionCase::C),
            "d" => Ok(CompressionCase::D),
            "conway" => Ok(CompressionCase::Conway),
            other => Err(Error::Malformed(format!("unknown compression case {other:?}"))),
        }
    }
}

impl std::fmt::Display for CompressionCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CompressionCase::A => "a",
            CompressionCase::B => "b",
            CompressionCase::C => "c",
            CompressionCase::D => "d",
            CompressionCase::Conway => "conway",
        };
        f.write_str(s)
    }
}

fn require_symbol(catalog: &Catalog, sym: &GroupSymbol) -> Result<String, Error> {
    let s = sym.to_string();
    if catalog.contains(&s) {
        Ok(s)
    } else {
        Err(Error::MissingCatalogEntry(s))
    }
}

fn p_valuation_of(n: u64, p: u64) -> u32 {
    let mut r = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    r
}

/// Verify one compression identity coefficientwise through exponent `window`.
///
/// * `a`: `p·𝒯_Γ|U_p = 𝒯_Γ − 𝒯_{⟨Γ,w_p⟩}` (needs `p‖n`, `p∤h`, `p∤e` for all
///   Atkin–Lehner exponents of `Γ`)
/// * `b`: `p²·𝒯_Γ|U_p² = 𝒯_Γ − 𝒯_{Γ^p}` (same hypotheses)
/// * `c`: `p·𝒯_Γ|U_p = 𝒯_{⟨Γ^p,w_{p^{r−1}}⟩} − 𝒯_{Γ^p}` (needs `r ≥ 2` and
///   `w_{p^r} ∈ Γ`)
/// * `d`: `𝒯_Γ|U_p = −𝒯_{Γ^p}|U_p` (needs `r = 2` and `w_{p²} ∈ Γ`)
/// * `conway`: `p·𝒯_Γ|U_p = 𝒯_{Γ^p} − 𝒯_Γ` (needs `w_p ∈ Γ`)
pub fn check_compression(
    catalog: &Catalog,
    case: CompressionCase,
    gamma: &str,
    p: u64,
    window: i64,
) -> Result<CheckReport, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let g = GroupSymbol::parse(gamma)?;
    let r = p_valuation_of(g.n(), p);
    let hyp = |ok: bool, msg: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::HypothesisViolated(format!("case {case} on {g}: {msg}")))
        }
    };

    // Number of U_p applications on the left side fixes the input precision.
    let ups: u32 = match case {
        CompressionCase::B => 2,
        _ => 1,
    };
    let high = checked_window(window, p, ups)?;
    let p_rat = rat(p as i64);

    let (lhs, rhs) = match case {
        CompressionCase::A | CompressionCase::B => {
            hyp(r == 1, "p must exactly divide n")?;
            hyp(g.h() % p != 0, "p must not divide h")?;
            hyp(
                g.fricke().iter().all(|e| e % p != 0),
                "p must not divide any Atkin-Lehner exponent",
            )?;
            let t = catalog.hauptmodul(&require_symbol(catalog, &g)?, high)?;
            if case == CompressionCase::A {
                let companion = g.adjoin_we(p)?;
                let t2 = catalog.hauptmodul(&require_symbol(catalog, &companion)?, window + 1)?;
                (t.u_p(p)?.scale(&p_rat), t.sub(&t2)?)
            } else {
                let companion = g.power_group(p);
                let t2 = catalog.hauptmodul(&require_symbol(catalog, &companion)?, window + 1)?;
                (
                    t.u_p(p)?.u_p(p)?.scale(&(&p_rat * &p_rat)),
                    t.sub(&t2)?,
                )
            }
        }
        CompressionCase::C => {
            hyp(r >= 2, "p^r with r >= 2 must divide n")?;
            let pr = (p as u64).pow(r);
            hyp(g.al_set().contains(&pr), "w_{p^r} must lie in the group")?;
            let t = catalog.hauptmodul(&require_symbol(catalog, &g)?, high)?;
            let down = g.power_group(p);
            let adjoined = down.adjoin_we((p as u64).pow(r - 1))?;
            let t_adj = catalog.hauptmodul(&require_symbol(catalog, &adjoined)?, window + 1)?;
            let t_down = catalog.hauptmodul(&require_symbol(catalog, &down)?, window + 1)?;
            (t.u_p(p)?.scale(&p_rat), t_adj.sub(&t_down)?)
        }
        CompressionCase::D => {
            hyp(r == 2, "n must be exactly divisible by p^2")?;
            let p2 = p * p;
            hyp(g.al_set().contains(&p2), "w_{p^2} must lie in the group")?;
            let t = catalog.hauptmodul(&require_symbol(catalog, &g)?, high)?;
            let down = g.power_group(p);
            let t_down = catalog.hauptmodul(&require_symbol(catalog, &down)?, high)?;
            (t.u_p(p)?, t_down.u_p(p)?.neg())
        }
        CompressionCase::Conway => {
            hyp(r == 1, "p must exactly divide n")?;
            hyp(g.al_set().contains(&p), "w_p must lie in the group")?;
            let t = catalog.hauptmodul(&require_symbol(catalog, &g)?, high)?;
            let down = g.power_group(p);
            let t_down = catalog.hauptmodul(&require_symbol(catalog, &down)?, window + 1)?;
            (t.u_p(p)?.scale(&p_rat), t_down.sub(&t)?)
        }
    };

    let params = json!({ "case": case.to_string(), "gamma": g.to_string(), "p": p });
    let report = match lhs.first_difference(&rhs)? {
        None => CheckReport::new("compression", params, window, Verdict::Pass),
        Some(w) => CheckReport::new("compression", params, window, Verdict::Fail).with_witness(w),
    };
    Ok(report)
}

/// Verify both halves of a bundled functional-equation row through exponent
/// `window`: (i) `p(𝒯|U_p) + p^e·Z` is a constant series (the constant is
/// inferred from the `q^0` coefficient and reported), and (ii)
/// `Z|U_p = Σ_j scaled_b[j]·Z^j` where `Z = 1/𝔗`.
pub fn check_lehner(catalog: &Catalog, datum: &LehnerDatum, window: i64) -> Result<CheckReport, Error> {
    if window < 600 {
        return Err(Error::Malformed(format!(
            "functional-equation checks need window >= 600, got {window}"
        )));
    }
    let p = datum.p;
    let symbol = require_symbol(catalog, &datum.symbol)?;
    let high = checked_window(window, p, 1)?;
    let t = catalog.hauptmodul(&symbol, high)?;
    let t_raw = catalog.unnormalized(&symbol, high)?;
    let z = t_raw.recip()?;

    let params = json!({
        "symbol": symbol,
        "p": p,
        "e": datum.e,
        "alpha": datum.alpha.to_string(),
        "scaled_b": datum.scaled_b,
    });

    // (i) functional equation: everything except the constant term vanishes.
    let pe = Rat::from_integer(int_pow(p, datum.e));
    let lhs = t.u_p(p)?.scale(&rat(p as i64)).add(&z.scale(&pe))?;
    let constant = lhs.coeff(0).unwrap_or_else(Rat::zero);
    let check_high = lhs.high().min(window + 1);
    for n in lhs.low()..check_high {
        if n == 0 {
            continue;
        }
        if !lhs.coeff(n).expect("in window").is_zero() {
            return Ok(CheckReport::new("lehner", params, window, Verdict::Fail)
                .with_witness(n)
                .with_note("functional equation: nonconstant term survives"));
        }
    }

    // (ii) polynomial relation for Z|U_p.
    let z_up = z.u_p(p)?;
    let mut rhs = LaurentSeries::zero(1, z.high());
    let mut z_pow = LaurentSeries::one(z.high());
    for b in &datum.scaled_b {
        z_pow = z_pow.mul(&z)?;
        if *b != 0 {
            rhs = rhs.add(&z_pow.scale(&rat(*b)))?;
        }
    }
    if let Some(w) = z_up.first_difference(&rhs)? {
        return Ok(CheckReport::new("lehner", params, window, Verdict::Fail)
            .with_witness(w)
            .with_note("polynomial relation for Z|U_p fails"));
    }

    Ok(CheckReport::new("lehner", params, window, Verdict::Pass)
        .with_note(format!("inferred constant c = {constant}")))
}

/// Assert `v_p(𝒯|U_p^n) >= floor(n·alpha)` for `n <= n_max`.
pub fn check_rate_bound(
    catalog: &Catalog,
    symbol: &str,
    p: u64,
    alpha: &Rat,
    n_max: u32,
    base_window: i64,
) -> Result<CheckReport, Error> {
    let canonical = GroupSymbol::parse(symbol)?.to_string();
    let params = json!({
        "symbol": canonical,
        "p": p,
        "alpha": alpha.to_string(),
        "n_max": n_max,
    });
    if n_max == 0 {
        return Ok(
            CheckReport::new("rate-bound", params, base_window, Verdict::Pass)
                .with_note("vacuous: n_max = 0"),
        );
    }
    let seq = valuation_sequence(catalog, &canonical, p, n_max, base_window)?;
    let values: Vec<Option<i64>> = seq.iter().map(|v| v.value).collect();
    for (idx, term) in seq.iter().enumerate() {
        let n = (idx + 1) as i64;
        let bound = (alpha * Rat::from_integer(n.into()))
            .floor()
            .to_integer()
            .to_i64()
            .expect("small bound");
        if let Some(v) = term.value {
            if v < bound {
                return Ok(
                    CheckReport::new("rate-bound", params, base_window, Verdict::Fail)
                        .with_witness(n)
                        .with_valuations(values)
                        .with_note(format!("v_{p} = {v} < floor({n}*alpha) = {bound}")),
                );
            }
        }
    }
    Ok(CheckReport::new("rate-bound", params, base_window, Verdict::Pass).with_valuations(values))
}

/// Search for `1 <= n1 < n2 <= n_max` and a unit `lambda` mod `p` with
/// `𝒯|U_p^{n2} ≡ lambda·𝒯|U_p^{n1} ≢ 0 (mod p)` on `window` coefficients.
/// Such a residue line is fixed by `U_p^{n2-n1}` up to a nonzero scalar, so
/// every further iterate stays nonzero mod `p` on the window: evidence
/// against p-adic annihilation, reported as `pass` with the cycle pair and
/// scalar recorded in `params`.  No hit is `indeterminate` (a finite window
/// can never refute the existence of a cycle further out).
///
/// For `J` at `p = 13` the hit is `(n1, n2) = (1, 2)` with `lambda = 8`:
/// `J|U_13` reduces to `-Δ` mod 13, an eigenline with unit eigenvalue.
pub fn detect_mod_p_cycle(
    catalog: &Catalog,
    symbol: &str,
    p: u64,
    n_max: u32,
    window: i64,
) -> Result<CheckReport, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n_max < 2 {
        return Err(Error::Malformed("cycle search needs n_max >= 2".into()));
    }
    let high = checked_window(window, p, n_max)?;
    let mut f = catalog.hauptmodul(symbol, high)?;
    let mut reductions: Vec<LaurentSeries> = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        f = f.u_p(p)?;
        reductions.push(f.reduce_mod(p, 1)?.truncate(0, window)?);
    }
    for n1 in 0..reductions.len() {
        if reductions[n1].is_zero() {
            continue;
        }
        for n2 in (n1 + 1)..reductions.len() {
            if let Some(lambda) = proportionality_mod_p(&reductions[n1], &reductions[n2], p) {
                let pair = ((n1 + 1) as u32, (n2 + 1) as u32);
                return Ok(CheckReport::new(
                    "mod-p-cycle",
                    json!({
                        "symbol": symbol, "p": p, "n_max": n_max,
                        "cycle": [pair.0, pair.1], "lambda": lambda,
                    }),
                    window,
                    Verdict::Pass,
                )
                .with_note(format!(
                    "nonzero residue eigen-cycle T|U^{} = {} * T|U^{} mod {}: \
                     evidence of non-annihilation",
                    pair.1, lambda, pair.0, p
                )));
            }
        }
    }
    let note = if reductions.iter().all(|r| r.is_zero()) {
        "all reductions vanish on the window; cycle search is vacuous"
    } else {
        "no repeated nonzero residue found up to n_max"
    };
    Ok(CheckReport::new(
        "mod-p-cycle",
        json!({ "symbol": symbol, "p": p, "n_max": n_max }),
        window,
        Verdict::Indeterminate,
    )
    .with_note(note))
}

/// If `b ≡ lambda·a (mod p)` coefficientwise for a unit `lambda`, return it.
/// Both series must share the same window; `a` must be nonzero.
fn proportionality_mod_p(a: &LaurentSeries, b: &LaurentSeries, p: u64) -> Option<u64> {
    debug_assert_eq!(a.low(), b.low());
    debug_assert_eq!(a.high(), b.high());
    let p_int = crate::Int::from(p);
    let as_res = |c: &Rat| c.to_integer().to_i64().expect("small residue");
    // Pin lambda down from the first exponent where a is nonzero.
    let mut lambda: Option<i64> = None;
    for (ca, cb) in a.coeffs().iter().zip(b.coeffs()) {
        let (ra, rb) = (as_res(ca), as_res(cb));
        match lambda {
            None => {
                if ra == 0 {
                    if rb != 0 {
                        return None;
                    }
                } else {
                    let inv = crate::numutil::mod_inverse(&crate::Int::from(ra), &p_int)?;
                    let l = (crate::Int::from(rb) * inv) % &p_int;
                    let l = l.to_i64().expect("small residue");
                    if l == 0 {
                        return None;
                    }
                    lambda = Some(l);
                }
            }
            Some(l) => {
                if (l * ra - rb).rem_euclid(p as i64) != 0 {
                    return None;
                }
            }
        }
    }
    lambda.map(|l| l as u64)
}
