//! Group symbols n|h+e,… and the Hauptmodul registry.
//!
//! A [`GroupSymbol`] records the data of an n|h-type genus-zero group: the
//! integers n and h (with h | gcd(n,24)) and the set of Atkin–Lehner indices
//! e‖n/h whose cosets w_e lie in the group.  It supports the power-map rule
//! Γ ↦ Γ^d, coset adjunction ⟨Γ, w_e⟩, and the AL(Γ) index set.
//!
//! A [`Catalog`] maps symbols to normalized Hauptmodul q-expansions
//! (q^{-1} + 0 + O(q)).  Expansions come from several constructors:
//!
//! - `PaperEta`: an explicit eta quotient for the unnormalized Hauptmodul;
//! - `EtaPower(N)`: (η(τ)/η(Nτ))^{24/(N−1)} for N−1 | 24;
//! - `FrickeSym(N)`: the Fricke symmetrization t_N + N^{12/(N−1)}/t_N;
//! - `FormalRoot`: an h-th root R with R^h = T_base(scale·τ) + constant,
//!   verified by re-powering (consistency) and by the support constraint
//!   a(k) = 0 unless k ≡ −1 (mod h);
//! - `Coeffs`: a coefficient file in the series text format, carrying its
//!   provenance in header comments;
//! - `JFunction`: the built-in normalized J (the symbol "1" has no eta-quotient
//!   or symmetrization constructor, so it is wired to the exact E₄³/Δ − 744
//!   expansion).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::forms::{expand_eta_quotient, j_function, EtaQuotient};
use crate::numutil::{exact_sqrt, exactly_divides, gcd_u64, int, rat, star};
use crate::qseries::LaurentSeries;
use crate::{Int, Rat};

/// Errors from symbol parsing/validation and catalog loading/expansion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed symbol or catalog record: {0}")]
    Malformed(String),
    #[error("symbol invariant violated: {0}")]
    InvariantViolation(String),
    #[error("{e} is not an exact divisor of {n}")]
    NotExactDivisor { e: u64, n: u64 },
    #[error("duplicate catalog symbol {0}")]
    DuplicateSymbol(String),
    #[error("no catalog entry for symbol {0}")]
    MissingEntry(String),
    #[error("catalog entry {symbol} provides {have} coefficients, needed {want}")]
    PrecisionExhausted { symbol: String, have: i64, want: i64 },
    #[error("formal root for {symbol} fails consistency at exponent {exponent}")]
    RootMismatch { symbol: String, exponent: i64 },
    #[error("catalog file error: {0}")]
    File(#[from] std::io::Error),
    #[error(transparent)]
    Forms(#[from] crate::forms::Error),
    #[error(transparent)]
    Series(#[from] crate::qseries::Error),
}

// ---------------------------------------------------------------------------
// Group symbols
// ---------------------------------------------------------------------------

/// An n|h+e,… symbol.  Invariants: h | gcd(n, 24); every e in `fricke`
/// exactly divides n/h and is ≥ 2; the set ∪ {1} is closed under
/// e₁*e₂ = e₁e₂/gcd(e₁,e₂)².
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupSymbol {
    n: u64,
    h: u64,
    fricke: BTreeSet<u64>,
}

/// All exact divisors of `m` that are ≥ 2.
fn exact_divisors(m: u64) -> BTreeSet<u64> {
    (2..=m).filter(|&e| exactly_divides(e, m)).collect()
}

impl GroupSymbol {
    /// Construct with validation.
    pub fn build(n: u64, h: u64, fricke: BTreeSet<u64>) -> Result<Self, Error> {
        if n == 0 || h == 0 {
            return Err(Error::InvariantViolation("n and h must be positive".into()));
        }
        if gcd_u64(n, 24) % h != 0 {
            return Err(Error::InvariantViolation(format!(
                "h = {h} does not divide gcd(n, 24) = {}",
                gcd_u64(n, 24)
            )));
        }
        let m = n / h;
        let fricke: BTreeSet<u64> = fricke.into_iter().filter(|&e| e != 1).collect();
        for &e in &fricke {
            if !exactly_divides(e, m) {
                return Err(Error::NotExactDivisor { e, n: m });
            }
        }
        let with_one = |s: &BTreeSet<u64>| -> Vec<u64> {
            let mut v: Vec<u64> = s.iter().copied().collect();
            v.push(1);
            v
        };
        for &e1 in &with_one(&fricke) {
            for &e2 in &with_one(&fricke) {
                let s = star(e1, e2);
                if s != 1 && !fricke.contains(&s) {
                    return Err(Error::InvariantViolation(format!(
                        "Atkin–Lehner set not closed: {e1}*{e2} = {s} missing"
                    )));
                }
            }
        }
        Ok(GroupSymbol { n, h, fricke })
    }

    /// Parse "n", "n+", "n+e,f", "n|h", "n|h+", "n|h+e,f".
    pub fn parse(text: &str) -> Result<Self, Error> {
        let t = text.trim();
        let (head, plus) = match t.find('+') {
            Some(i) => (&t[..i], Some(&t[i + 1..])),
            None => (t, None),
        };
        let (n_txt, h_txt) = match head.split_once('|') {
            Some((a, b)) => (a, Some(b)),
            None => (head, None),
        };
        let n: u64 = n_txt
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad n in `{text}`")))?;
        let h: u64 = match h_txt {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad h in `{text}`")))?,
            None => 1,
        };
        if h == 0 || n == 0 {
            return Err(Error::Malformed(format!("zero n or h in `{text}`")));
        }
        let fricke: BTreeSet<u64> = match plus {
            None => BTreeSet::new(),
            Some("") => {
                if gcd_u64(n, 24) % h != 0 {
                    return Err(Error::InvariantViolation(format!(
                        "h = {h} does not divide gcd(n, 24)"
                    )));
                }
                exact_divisors(n / h)
            }
            Some(list) => {
                let mut s = BTreeSet::new();
                for part in list.split(',') {
                    let e: u64 = part
                        .trim()
                        .parse()
                        .map_err(|_| Error::Malformed(format!("bad Atkin–Lehner index `{part}`")))?;
                    if e == 0 {
                        return Err(Error::Malformed("Atkin–Lehner index 0".into()));
                    }
                    s.insert(e);
                }
                s
            }
        };
        Self::build(n, h, fricke)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn fricke(&self) -> &BTreeSet<u64> {
        &self.fricke
    }

    /// The group Γ^d governing the d-th power map:
    /// n' = n/gcd(n,d), h' = h/gcd(h,d), keeping the e that divide n'/h'.
    pub fn power_group(&self, d: u64) -> GroupSymbol {
        assert!(d >= 1);
        let n = self.n / gcd_u64(self.n, d);
        let h = self.h / gcd_u64(self.h, d);
        let m = n / h;
        let fricke: BTreeSet<u64> = self
            .fricke
            .iter()
            .copied()
            .filter(|&e| m % e == 0 && exactly_divides(e, m))
            .collect();
        GroupSymbol::build(n, h, fricke).expect("power group of a valid symbol is valid")
    }

    /// ⟨Γ, w_e⟩: adjoin the coset w_e and close under *.
    pub fn adjoin_we(&self, e: u64) -> Result<GroupSymbol, Error> {
        let m = self.n / self.h;
        if !exactly_divides(e, m) {
            return Err(Error::NotExactDivisor { e, n: m });
        }
        let mut fricke = self.fricke.clone();
        if e != 1 {
            fricke.insert(e);
        }
        for &e1 in &self.fricke {
            let s = star(e1, e);
            if s != 1 {
                fricke.insert(s);
            }
        }
        GroupSymbol::build(self.n, self.h, fricke)
    }

    /// AL(Γ) ⊆ divisors of nh: for each e ∈ {1} ∪ fricke, the index
    /// E = e·h_e² with h_e = ∏_{ℓ | gcd(e,h)} ℓ^{v_ℓ(h)}.
    pub fn al_set(&self) -> BTreeSet<u64> {
        let mut al = BTreeSet::new();
        let mut members: Vec<u64> = vec![1];
        members.extend(self.fricke.iter().copied());
        for e in members {
            let mut h_e = 1u64;
            let mut rem = self.h;
            let mut l = 2u64;
            while l * l <= rem {
                if rem % l == 0 {
                    let mut lp = 1u64;
                    while rem % l == 0 {
                        rem /= l;
                        lp *= l;
                    }
                    if e % l == 0 {
                        h_e *= lp;
                    }
                }
                l += 1;
            }
            if rem > 1 && e % rem == 0 {
                h_e *= rem;
            }
            al.insert(e * h_e * h_e);
        }
        al
    }
}

impl fmt::Display for GroupSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.h == 1 {
            write!(f, "{}", self.n)?;
        } else {
            write!(f, "{}|{}", self.n, self.h)?;
        }
        if self.fricke.is_empty() {
            return Ok(());
        }
        let all = exact_divisors(self.n / self.h);
        if self.fricke == all {
            write!(f, "+")
        } else {
            let parts: Vec<String> = self.fricke.iter().map(|e| e.to_string()).collect();
            write!(f, "+{}", parts.join(","))
        }
    }
}

/// [SL₂(ℤ) : Γ₀(N)] = N·∏_{ℓ|N}(1 + 1/ℓ).
pub fn sturm_index(n: u64) -> u64 {
    assert!(n >= 1);
    let mut idx = n;
    let mut rem = n;
    let mut l = 2u64;
    while l * l <= rem {
        if rem % l == 0 {
            while rem % l == 0 {
                rem /= l;
            }
            idx = idx / l * (l + 1);
        }
        l += 1;
    }
    if rem > 1 {
        idx = idx / rem * (rem + 1);
    }
    idx
}

// ---------------------------------------------------------------------------
// Hauptmodul definitions and the catalog
// ---------------------------------------------------------------------------

/// How a Hauptmodul expansion is produced.
#[derive(Clone, Debug)]
pub enum Construction {
    /// The built-in J = E₄³/Δ − 744 for the symbol "1".
    JFunction,
    /// Eta quotient for the unnormalized Hauptmodul.
    PaperEta(EtaQuotient),
    /// (η(τ)/η(Nτ))^{24/(N−1)}.
    EtaPower(u64),
    /// EtaPower(N) + N^{12/(N−1)}/EtaPower(N).
    FrickeSym(u64),
    /// R with R^root = T_base(scale·τ) + constant.
    FormalRoot {
        root: u64,
        base: String,
        scale: u64,
        constant: i64,
    },
    /// Coefficients loaded from a serialized series file.
    Coeffs(LaurentSeries),
}

/// One catalog record: a validated symbol plus its construction.
#[derive(Clone, Debug)]
pub struct HauptmodulDef {
    pub symbol: GroupSymbol,
    pub construction: Construction,
}

/// Registry of Hauptmodul definitions with a synchronized expansion cache.
pub struct Catalog {
    defs: BTreeMap<String, HauptmodulDef>,
    cache: Mutex<HashMap<String, LaurentSeries>>,
}

/// Embedded default catalog (Table-4 eta quotients, eta-power and Fricke
/// symmetrization families, the 3|3 formal root, and a derived 11+ file).
const BUNDLED_CATALOG: &str = include_str!("../data/catalog.tsv");
const BUNDLED_11PLUS: &str = include_str!("../data/coeffs/11plus.tsv");

/// Bundled A₅ group fixture (re-exported here so the CLI can embed it).
pub const BUNDLED_A5_JSON: &str = include_str!("../data/groups/a5.json");

fn bundled_file(path: &str) -> Option<&'static str> {
    match path {
        "coeffs/11plus.tsv" => Some(BUNDLED_11PLUS),
        _ => None,
    }
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn bundled() -> Catalog {
        Self::from_records(BUNDLED_CATALOG, |p| {
            bundled_file(p)
                .map(str::to_owned)
                .ok_or_else(|| Error::Malformed(format!("no bundled file {p}")))
        })
        .expect("bundled catalog is valid")
    }

    /// Load a catalog from a TSV file; `file:` payload paths are resolved
    /// relative to the catalog file's directory.
    pub fn load(path: &Path) -> Result<Catalog, Error> {
        let text = std::fs::read_to_string(path)?;
        let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_records(&text, |rel| Ok(std::fs::read_to_string(dir.join(rel))?))
    }

    /// Parse catalog records, resolving `file:` payloads through `read_file`.
    pub fn from_records(
        text: &str,
        read_file: impl Fn(&str) -> Result<String, Error>,
    ) -> Result<Catalog, Error> {
        let mut defs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (sym_txt, kind) = match (fields.next(), fields.next()) {
                (Some(s), Some(k)) => (s, k),
                _ => {
                    return Err(Error::Malformed(format!(
                        "line {}: expected symbol<TAB>kind",
                        lineno + 1
                    )))
                }
            };
            let payload = fields.next().unwrap_or("");
            let symbol = GroupSymbol::parse(sym_txt)?;
            let construction = parse_construction(kind, payload, &read_file)
                .map_err(|e| match e {
                    Error::Malformed(m) => Error::Malformed(format!("line {}: {m}", lineno + 1)),
                    other => other,
                })?;
            let key = symbol.to_string();
            if defs
                .insert(key.clone(), HauptmodulDef { symbol, construction })
                .is_some()
            {
                return Err(Error::DuplicateSymbol(key));
            }
        }
        Ok(Catalog {
            defs,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Canonical symbol strings present in the catalog.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(String::as_str)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.lookup(symbol).is_ok()
    }

    /// Definition for a symbol (accepts any spelling that parses to the same
    /// canonical form).
    pub fn lookup(&self, symbol: &str) -> Result<&HauptmodulDef, Error> {
        let key = GroupSymbol::parse(symbol)
            .map(|g| g.to_string())
            .unwrap_or_else(|_| symbol.trim().to_string());
        self.defs
            .get(&key)
            .ok_or_else(|| Error::MissingEntry(symbol.trim().to_string()))
    }

    /// Normalized Hauptmodul expansion q^{-1} + 0 + O(q) on [−1, high).
    pub fn hauptmodul(&self, symbol: &str, high: i64) -> Result<LaurentSeries, Error> {
        let def = self.lookup(symbol)?;
        let key = def.symbol.to_string();
        if let Some(cached) = self.cache.lock().unwrap().get(&key) {
            if cached.high() >= high {
                return Ok(cached.truncate(cached.low(), high)?);
            }
        }
        let series = self.expand_def(def, high)?;
        let series = normalize(&series)?;
        check_support(&def.symbol, &series)?;
        let mut cache = self.cache.lock().unwrap();
        let entry = cache.entry(key).or_insert_with(|| series.clone());
        if entry.high() < series.high() {
            *entry = series.clone();
        }
        Ok(series)
    }

    /// Unnormalized expansion 𝔗 = 𝒯 + constant for constructions that define
    /// one (eta-quotient-backed entries).
    pub fn unnormalized(&self, symbol: &str, high: i64) -> Result<LaurentSeries, Error> {
        let def = self.lookup(symbol)?;
        match &def.construction {
            Construction::PaperEta(eq) => Ok(expand_eta_quotient(eq, high)?),
            Construction::EtaPower(n) => Ok(expand_eta_quotient(&eta_power_quotient(*n)?, high)?),
            other => Err(Error::InvariantViolation(format!(
                "no unnormalized form for construction {other:?}"
            ))),
        }
    }

    fn expand_def(&self, def: &HauptmodulDef, high: i64) -> Result<LaurentSeries, Error> {
        match &def.construction {
            Construction::JFunction => Ok(j_function(high)?),
            Construction::PaperEta(eq) => Ok(expand_eta_quotient(eq, high)?),
            Construction::EtaPower(n) => {
                Ok(expand_eta_quotient(&eta_power_quotient(*n)?, high)?)
            }
            Construction::FrickeSym(n) => {
                let quotient = eta_power_quotient(*n)?;
                let t = expand_eta_quotient(&quotient, high)?;
                let c = fricke_constant(*n)?;
                // 1/t_N is itself an eta quotient (negated exponents), which
                // the sparse expansion handles far faster than a series
                // reciprocal.
                let inverse: Vec<(u64, i64)> =
                    quotient.terms().iter().map(|(d, r)| (*d, -r)).collect();
                let t_inv = expand_eta_quotient(&EtaQuotient::new(inverse), high)?;
                Ok(t.add(&t_inv.scale(&Rat::from_integer(c)))?)
            }
            Construction::FormalRoot {
                root,
                base,
                scale,
                constant,
            } => self.expand_root(&def.symbol, *root, base, *scale, *constant, high),
            Construction::Coeffs(series) => {
                if series.high() < high {
                    return Err(Error::PrecisionExhausted {
                        symbol: def.symbol.to_string(),
                        have: series.high(),
                        want: high,
                    });
                }
                Ok(series.truncate(series.low(), high)?)
            }
        }
    }

    /// Formal root extraction: find R = q^{-scale/root}(1 + …) with
    /// R^root = T_base(scale·τ) + constant, by the exact power-series
    /// recurrence for T^{1/root}, then verify by re-powering.
    fn expand_root(
        &self,
        symbol: &GroupSymbol,
        root: u64,
        base: &str,
        scale: u64,
        constant: i64,
        high: i64,
    ) -> Result<LaurentSeries, Error> {
        if root == 0 || scale % root != 0 {
            return Err(Error::Malformed(format!(
                "root {root} must divide scale {scale}"
            )));
        }
        let lead = (scale / root) as i64;
        // Need the root series through exponent high − 1, i.e. the scaled base
        // through exponent high − 1 + scale/root relative to its leading term.
        let len = (high + lead) as usize;
        let scale_i = scale as i64;
        let base_high = Integer::div_ceil(&(len as i64 - 1 - scale_i), &scale_i) + 2;
        let b = self.hauptmodul(base, base_high.max(1))?;
        let bv = b.v_m(scale);
        let s = bv.add(&LaurentSeries::monomial(0, rat(constant), bv.high()))?;
        // T = q^{scale}·S has constant term 1.
        let t = s.shift(scale_i).truncate(0, len as i64)?;
        if t.coeff(0) != Some(Rat::one()) {
            return Err(Error::RootMismatch {
                symbol: symbol.to_string(),
                exponent: -scale_i,
            });
        }
        // u_m = (1/m)·Σ_{j=1}^{m} ((α+1)·j − m)·t_j·u_{m−j}, α = 1/root.
        let alpha = crate::numutil::rat_frac(1, root as i64);
        let tc = t.coeffs();
        let mut u: Vec<Rat> = Vec::with_capacity(len);
        u.push(Rat::one());
        for m in 1..len {
            let mut acc = Rat::zero();
            for j in 1..=m {
                if tc[j].is_zero() || u[m - j].is_zero() {
                    continue;
                }
                let w = &alpha * rat(j as i64) + rat(j as i64) - rat(m as i64);
                acc += w * &tc[j] * &u[m - j];
            }
            u.push(acc / rat(m as i64));
        }
        let u_series = LaurentSeries::new(0, u);
        // Consistency: U^root must reproduce T on the window.
        let repow = u_series.pow(root as u32)?;
        if let Some(e) = repow.first_difference(&t)? {
            return Err(Error::RootMismatch {
                symbol: symbol.to_string(),
                exponent: e - scale_i,
            });
        }
        Ok(u_series.shift(-lead).truncate(-lead, high)?)
    }
}

/// The quotient (η(τ)/η(Nτ))^{24/(N−1)}; errors unless N−1 | 24.
fn eta_power_quotient(n: u64) -> Result<EtaQuotient, Error> {
    if n < 2 || 24 % (n - 1) != 0 {
        return Err(Error::Malformed(format!(
            "eta power needs N−1 | 24, got N = {n}"
        )));
    }
    let r = (24 / (n - 1)) as i64;
    Ok(EtaQuotient::new(vec![(1, r), (n, -r)]))
}

/// N^{12/(N−1)} as an exact integer (the square root of N^{24/(N−1)});
/// errors when it is irrational.
fn fricke_constant(n: u64) -> Result<Int, Error> {
    if n < 2 || 24 % (n - 1) != 0 {
        return Err(Error::Malformed(format!(
            "Fricke symmetrization needs N−1 | 24, got N = {n}"
        )));
    }
    let sq = int(n as i64).pow((24 / (n - 1)) as u32);
    exact_sqrt(&sq).ok_or_else(|| {
        Error::Malformed(format!("N^{{12/(N−1)}} is irrational for N = {n}"))
    })
}

fn parse_construction(
    kind: &str,
    payload: &str,
    read_file: &impl Fn(&str) -> Result<String, Error>,
) -> Result<Construction, Error> {
    let mut parts = kind.split(':');
    let head = parts.next().unwrap_or("");
    let rest: Vec<&str> = parts.collect();
    match head {
        "j" => Ok(Construction::JFunction),
        "eta" => Ok(Construction::PaperEta(EtaQuotient::parse(payload)?)),
        "etapower" => {
            let n = parse_param(&rest, 0, "etapower:N")?;
            eta_power_quotient(n)?;
            Ok(Construction::EtaPower(n))
        }
        "fricke" => {
            let n = parse_param(&rest, 0, "fricke:N")?;
            fricke_constant(n)?;
            Ok(Construction::FrickeSym(n))
        }
        "root" => {
            if rest.len() != 4 {
                return Err(Error::Malformed(
                    "root kind needs root:h:base:scale:constant".into(),
                ));
            }
            let root: u64 = parse_param(&rest, 0, "root degree")?;
            let base = rest[1].to_string();
            let scale: u64 = parse_param(&rest, 2, "root scale")?;
            let constant: i64 = rest[3]
                .parse()
                .map_err(|_| Error::Malformed("bad root constant".into()))?;
            if root == 0 || scale % root != 0 {
                return Err(Error::Malformed(format!(
                    "root degree {root} must divide scale {scale}"
                )));
            }
            Ok(Construction::FormalRoot { root, base, scale, constant })
        }
        "file" => {
            if rest.len() != 1 {
                return Err(Error::Malformed("file kind needs file:relative/path".into()));
            }
            let text = read_file(rest[0])?;
            Ok(Construction::Coeffs(LaurentSeries::from_text(&text)?))
        }
        other => Err(Error::Malformed(format!("unknown construction kind `{other}`"))),
    }
}

fn parse_param(rest: &[&str], idx: usize, what: &str) -> Result<u64, Error> {
    rest.get(idx)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Malformed(format!("bad parameter for {what}")))
}

/// Subtract the constant term so the expansion is q^{-1} + 0 + O(q).
fn normalize(series: &LaurentSeries) -> Result<LaurentSeries, Error> {
    let a0 = series.coeff(0).unwrap_or_else(Rat::zero);
    if a0.is_zero() {
        return Ok(series.clone());
    }
    Ok(series.sub(&LaurentSeries::monomial(0, a0, series.high()))?)
}

/// For h > 1 symbols, coefficients must vanish off the residue class
/// −1 (mod h).
fn check_support(symbol: &GroupSymbol, series: &LaurentSeries) -> Result<(), Error> {
    let h = symbol.h();
    if h <= 1 {
        return Ok(());
    }
    let h_i = h as i64;
    for k in series.low()..series.high() {
        if !series.coeff(k).unwrap().is_zero() && (k - (-1)).rem_euclid(h_i) != 0 {
            return Err(Error::InvariantViolation(format!(
                "support of {symbol} contains exponent {k} ≢ −1 (mod {h})"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(t: &str) -> GroupSymbol {
        GroupSymbol::parse(t).unwrap()
    }

    #[test]
    fn parse_worked_examples() {
        let g = sym("8|2+");
        assert_eq!((g.n(), g.h()), (8, 2));
        assert_eq!(g.fricke().iter().copied().collect::<Vec<_>>(), vec![4]);

        let one = sym("1");
        assert_eq!((one.n(), one.h()), (1, 1));
        assert!(one.fricke().is_empty());

        let g = sym("60|2+5,6,30");
        assert_eq!((g.n(), g.h()), (60, 2));
        assert_eq!(g.fricke().iter().copied().collect::<Vec<_>>(), vec![5, 6, 30]);
    }

    #[test]
    fn parse_rejects_invalid() {
        // h must divide gcd(n, 24)
        assert!(GroupSymbol::parse("6|4").is_err());
        // 2 is not an exact divisor of 8
        assert!(GroupSymbol::parse("8+2").is_err());
        // {2,3} without 6 is not *-closed
        assert!(GroupSymbol::parse("30+2,3").is_err());
        assert!(GroupSymbol::parse("x").is_err());
        assert!(GroupSymbol::parse("0").is_err());
    }

    #[test]
    fn display_is_canonical() {
        for t in ["1", "2", "2+", "6+2", "6+3", "6|3", "8|2+", "22+11", "24|4+2", "60|2+5,6,30"] {
            assert_eq!(sym(t).to_string(), t, "roundtrip of {t}");
        }
        // "6+2,3,6" collapses to the full-set shorthand
        assert_eq!(sym("6+2,3,6").to_string(), "6+");
    }

    #[test]
    fn power_group_rule() {
        assert_eq!(sym("6+3").power_group(2).to_string(), "3+");
        assert_eq!(sym("6+3").power_group(3).to_string(), "2");
        assert_eq!(sym("3|3").power_group(3).to_string(), "1");
        assert_eq!(sym("22+11").power_group(2).to_string(), "11+");
        assert_eq!(sym("6|3").power_group(2).to_string(), "3|3");
        assert_eq!(sym("9+").power_group(3).to_string(), "3");
        let g = sym("10+5");
        assert_eq!(g.power_group(1), g);
        assert_eq!(g.power_group(5).to_string(), "2");
    }

    #[test]
    fn power_group_composition() {
        for t in ["1", "2+", "6+3", "6|3", "10+5", "22+11", "24|4+2", "9+"] {
            let g = sym(t);
            for a in 1..=6u64 {
                for b in 1..=6u64 {
                    assert_eq!(
                        g.power_group(a).power_group(b),
                        g.power_group(a * b),
                        "({t})^{a})^{b}"
                    );
                }
            }
            assert_eq!(g.power_group(g.n() * g.h()).to_string(), "1");
        }
    }

    #[test]
    fn adjoin_we_closure() {
        assert_eq!(sym("6+3").adjoin_we(2).unwrap().to_string(), "6+");
        assert_eq!(sym("2").adjoin_we(2).unwrap().to_string(), "2+");
        let g = sym("6+2");
        assert_eq!(g.adjoin_we(1).unwrap(), g);
        assert_eq!(g.adjoin_we(2).unwrap(), g, "idempotent");
        assert!(sym("8").adjoin_we(2).is_err());
    }

    #[test]
    fn al_sets() {
        let al: Vec<u64> = sym("8|2+").al_set().into_iter().collect();
        assert_eq!(al, vec![1, 16]);
        assert_eq!(sym("7").al_set().into_iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(sym("2+").al_set().into_iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(sym("6+3").al_set().into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn sturm_indices() {
        assert_eq!(sturm_index(1), 1);
        assert_eq!(sturm_index(6), 12);
        assert_eq!(sturm_index(11), 12);
        assert_eq!(sturm_index(24), 48);
    }

    #[test]
    fn bundled_catalog_loads() {
        let cat = Catalog::bundled();
        for t in ["1", "2", "3", "5", "7", "2+", "3+", "9+", "3|3", "6+2", "6+3", "10+5", "22+11", "6|3", "24|4+2", "11+"] {
            assert!(cat.contains(t), "missing bundled symbol {t}");
        }
    }

    #[test]
    fn empty_catalog() {
        let cat = Catalog::from_records("", |_| unreachable!("no files")).unwrap();
        assert_eq!(cat.symbols().count(), 0);
        assert!(matches!(cat.hauptmodul("1", 5), Err(Error::MissingEntry(_))));
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let text = "2\tetapower:2\n2\tetapower:2\n";
        assert!(matches!(
            Catalog::from_records(text, |_| unreachable!()),
            Err(Error::DuplicateSymbol(_))
        ));
    }

    #[test]
    fn j_is_symbol_one() {
        let cat = Catalog::bundled();
        let t = cat.hauptmodul("1", 5).unwrap();
        let j = j_function(5).unwrap();
        assert_eq!(t, j);
    }

    #[test]
    fn normalization_invariants() {
        let cat = Catalog::bundled();
        for s in ["1", "2", "5", "2+", "3+", "3|3", "6+2", "6+3", "10+5", "22+11", "6|3", "24|4+2"] {
            let t = cat.hauptmodul(s, 20).unwrap();
            assert_eq!(t.low(), -1, "{s} low");
            assert_eq!(t.coeff(-1), Some(Rat::one()), "{s} leading");
            assert_eq!(t.coeff(0), Some(Rat::zero()), "{s} constant");
            assert!(t.is_integral(), "{s} integrality");
        }
    }

    #[test]
    fn fricke_symmetrization_value() {
        // t₂ + 4096/t₂ normalized has a(1) = 4372.
        let cat = Catalog::bundled();
        let t = cat.hauptmodul("2+", 4).unwrap();
        assert_eq!(t.coeff(1), Some(rat(4372)));
    }

    #[test]
    fn eta_power_five_value() {
        let cat = Catalog::bundled();
        let t = cat.hauptmodul("5", 4).unwrap();
        assert_eq!(t.coeff(1), Some(rat(9)));
    }

    #[test]
    fn formal_root_three_three() {
        let cat = Catalog::bundled();
        let t = cat.hauptmodul("3|3", 30).unwrap();
        assert_eq!(t.low(), -1);
        // cube root of j(3τ): a(2) = 744/3 = 248
        assert_eq!(t.coeff(2), Some(rat(248)));
        // support lies in −1 (mod 3)
        for k in t.low()..t.high() {
            if !t.coeff(k).unwrap().is_zero() {
                assert_eq!((k + 1).rem_euclid(3), 0, "exponent {k}");
            }
        }
        // R³ = J(3τ) + 744 on the window
        let j = cat.hauptmodul("1", 11).unwrap();
        let rhs = j
            .v_m(3)
            .add(&LaurentSeries::monomial(0, rat(744), 40))
            .unwrap();
        let cube = t.pow(3).unwrap();
        assert!(cube.eq_on_overlap(&rhs).unwrap());
    }

    #[test]
    fn support_constraint_enforced() {
        let cat = Catalog::bundled();
        for s in ["6|3", "24|4+2"] {
            let g = sym(s);
            let t = cat.hauptmodul(s, 50).unwrap();
            let h = g.h() as i64;
            for k in t.low()..t.high() {
                if !t.coeff(k).unwrap().is_zero() {
                    assert_eq!((k + 1).rem_euclid(h), 0, "{s} exponent {k}");
                }
            }
        }
    }

    #[test]
    fn unnormalized_has_constant() {
        let cat = Catalog::bundled();
        // 𝔗₅ = (η(τ)/η(5τ))⁶ = q^{-1} − 6 + 9q + …
        let t = cat.unnormalized("5", 3).unwrap();
        assert_eq!(t.coeff(0), Some(rat(-6)));
        assert_eq!(t.coeff(1), Some(rat(9)));
        assert!(cat.unnormalized("2+", 3).is_err());
    }

    #[test]
    fn cache_is_consistent_across_windows() {
        let cat = Catalog::bundled();
        let wide = cat.hauptmodul("6+3", 40).unwrap();
        let narrow = cat.hauptmodul("6+3", 10).unwrap();
        assert!(narrow.eq_on_overlap(&wide).unwrap());
        assert_eq!(narrow.high(), 10);
    }

    #[test]
    fn coeff_file_roundtrip_and_precision() {
        let series = LaurentSeries::from_pairs(-1, 6, &[(-1, Rat::one()), (1, rat(17))]);
        let text = format!("# provenance: test fixture\n{}", series.to_text());
        let cat_text = "46+23\tfile:t.tsv\n";
        let cat = Catalog::from_records(cat_text, |p| {
            assert_eq!(p, "t.tsv");
            Ok(text.clone())
        })
        .unwrap();
        let t = cat.hauptmodul("46+23", 6).unwrap();
        assert_eq!(t.coeff(1), Some(rat(17)));
        assert!(matches!(
            cat.hauptmodul("46+23", 100),
            Err(Error::PrecisionExhausted { .. })
        ));
    }
}
