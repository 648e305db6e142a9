//! Finite-group data over a quadratic extension (character tables, power
//! maps), per-class Hauptmodul assignments, multiplicity generating functions
//! via Schur orthogonality, and the p-adic / weakly-p-adic checks built on
//! them, including feasibility of coefficient congruences modulo prime
//! powers.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::catalog::{Catalog, GroupSymbol};
use crate::numutil::{gcd_u64, is_prime, rat, residue_mod};
use crate::qseries::ValuationP;
use crate::report::{CheckReport, Verdict};
use crate::{Int, LaurentSeries, Rat};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed group data: {0}")]
    Malformed(String),
    #[error("character rows {i} and {j} violate Schur orthogonality")]
    OrthogonalityFailure { i: usize, j: usize },
    #[error("power map inconsistent: {0}")]
    PowerMapInconsistent(String),
    #[error("irrational part of multiplicity series {chi} survives at exponent {exponent}")]
    IrrationalResidue { chi: String, exponent: i64 },
    #[error("no catalog entry for required symbol {0}")]
    MissingCatalogEntry(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("group file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("group file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Annihilation(#[from] crate::annihilation::Error),
    #[error(transparent)]
    Catalog(#[from] crate::catalog::Error),
    #[error(transparent)]
    Series(#[from] crate::qseries::Error),
}

/// An element `a + b√d` of the quadratic extension `ℚ(√d)`, with `d` a fixed
/// squarefree integer shared by a whole character table.  Conjugation is
/// complex conjugation: it negates `b` when `d < 0` and is the identity when
/// `d > 0` (the table embeds into ℝ, where real numbers are self-conjugate).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNum {
    pub a: Rat,
    pub b: Rat,
    pub d: i64,
}

impl QuadNum {
    pub fn new(a: Rat, b: Rat, d: i64) -> Self {
        QuadNum { a, b, d }
    }

    pub fn from_rat(a: Rat, d: i64) -> Self {
        QuadNum {
            a,
            b: Rat::zero(),
            d,
        }
    }

    pub fn zero(d: i64) -> Self {
        Self::from_rat(Rat::zero(), d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "mixed quadratic fields");
        QuadNum::new(&self.a + &other.a, &self.b + &other.b, self.d)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "mixed quadratic fields");
        QuadNum::new(&self.a - &other.a, &self.b - &other.b, self.d)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "mixed quadratic fields");
        let d = Rat::from_integer(Int::from(self.d));
        QuadNum::new(
            &self.a * &other.a + &(&self.b * &other.b) * &d,
            &self.a * &other.b + &self.b * &other.a,
            self.d,
        )
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QuadNum::new(&self.a * c, &self.b * c, self.d)
    }

    pub fn conj(&self) -> Self {
        if self.d < 0 {
            QuadNum::new(self.a.clone(), -self.b.clone(), self.d)
        } else {
            self.clone()
        }
    }
}

/// One conjugacy class: a name, its size, and the order of its elements.
#[derive(Clone, Debug)]
pub struct ConjClass {
    pub name: String,
    pub size: u64,
    pub order: u64,
}

/// A per-class choice of Hauptmodul symbol (class name → catalog symbol).
pub type Assignment = BTreeMap<String, String>;

/// A validated character table: classes, irreducible characters with values
/// in `ℚ(√d)`, and a power map.  Orthogonality and power-map consistency are
/// enforced at load time.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub name: String,
    pub order: u64,
    pub quad_d: i64,
    pub classes: Vec<ConjClass>,
    pub char_names: Vec<String>,
    pub characters: Vec<Vec<QuadNum>>,
    power: BTreeMap<(usize, u64), usize>,
    identity: usize,
    pub assignment: Option<Assignment>,
}

fn parse_rat_value(v: &Value) -> Result<Rat, Error> {
    if let Some(n) = v.as_i64() {
        return Ok(rat(n));
    }
    if let Some(s) = v.as_str() {
        return s
            .parse::<Rat>()
            .map_err(|_| Error::Malformed(format!("bad rational {s:?}")));
    }
    Err(Error::Malformed(format!("bad rational value {v}")))
}

impl CharacterTable {
    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let v: Value = serde_json::from_str(text)?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("group file must be a JSON object".into()))?;
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("G")
            .to_owned();
        let order = obj
            .get("order")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Malformed("missing group order".into()))?;
        let quad_d = obj.get("quad_d").and_then(Value::as_i64).unwrap_or(1);
        if quad_d == 0 {
            return Err(Error::Malformed("quad_d must be nonzero".into()));
        }

        let classes_v = obj
            .get("classes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing classes".into()))?;
        let mut classes = Vec::with_capacity(classes_v.len());
        for c in classes_v {
            let name = c
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Malformed("class without name".into()))?;
            let size = c
                .get("size")
                .and_then(Value::as_u64)
                .filter(|s| *s > 0)
                .ok_or_else(|| Error::Malformed(format!("class {name} needs a positive size")))?;
            let ord = c
                .get("order")
                .and_then(Value::as_u64)
                .filter(|s| *s > 0)
                .ok_or_else(|| Error::Malformed(format!("class {name} needs a positive order")))?;
            classes.push(ConjClass {
                name: name.to_owned(),
                size,
                order: ord,
            });
        }
        if classes.is_empty() {
            return Err(Error::Malformed("group needs at least one class".into()));
        }
        let size_sum: u64 = classes.iter().map(|c| c.size).sum();
        if size_sum != order {
            return Err(Error::Malformed(format!(
                "class sizes sum to {size_sum}, group order is {order}"
            )));
        }
        let identities: Vec<usize> = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.order == 1)
            .map(|(i, _)| i)
            .collect();
        let identity = match identities.as_slice() {
            [i] => *i,
            _ => {
                return Err(Error::Malformed(
                    "group needs exactly one class of element order 1".into(),
                ))
            }
        };

        let chars_v = obj
            .get("characters")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing characters".into()))?;
        let char_names: Vec<String> = match obj.get("char_names").and_then(Value::as_array) {
            Some(names) => names
                .iter()
                .map(|n| {
                    n.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| Error::Malformed("char_names must be strings".into()))
                })
                .collect::<Result<_, _>>()?,
            None => (0..chars_v.len()).map(|i| format!("chi{i}")).collect(),
        };
        if char_names.len() != chars_v.len() {
            return Err(Error::Malformed(
                "char_names length differs from character count".into(),
            ));
        }
        let mut characters = Vec::with_capacity(chars_v.len());
        for row in chars_v {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Malformed("character row must be an array".into()))?;
            if row.len() != classes.len() {
                return Err(Error::Malformed(
                    "character row length differs from class count".into(),
                ));
            }
            let mut values = Vec::with_capacity(row.len());
            for entry in row {
                let pair = entry
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Malformed("character value must be [a, b]".into()))?;
                values.push(QuadNum::new(
                    parse_rat_value(&pair[0])?,
                    parse_rat_value(&pair[1])?,
                    quad_d,
                ));
            }
            characters.push(values);
        }

        let mut power = BTreeMap::new();
        if let Some(pm) = obj.get("power_map") {
            let pm = pm
                .as_object()
                .ok_or_else(|| Error::Malformed("power_map must be an object".into()))?;
            for (class_name, entries) in pm {
                let ci = classes
                    .iter()
                    .position(|c| &c.name == class_name)
                    .ok_or_else(|| Error::Malformed(format!("power_map class {class_name} unknown")))?;
                let entries = entries
                    .as_object()
                    .ok_or_else(|| Error::Malformed("power_map entries must be objects".into()))?;
                for (m_text, target) in entries {
                    let m: u64 = m_text
                        .parse()
                        .map_err(|_| Error::Malformed(format!("bad power {m_text:?}")))?;
                    let target = target
                        .as_str()
                        .and_then(|t| classes.iter().position(|c| c.name == t))
                        .ok_or_else(|| {
                            Error::Malformed(format!("power_map target for {class_name}^{m} unknown"))
                        })?;
                    power.insert((ci, m % classes[ci].order), target);
                }
            }
        }

        let assignment = match obj.get("assignment") {
            None => None,
            Some(a) => {
                let a = a
                    .as_object()
                    .ok_or_else(|| Error::Malformed("assignment must be an object".into()))?;
                let mut map = Assignment::new();
                for (class, symbol) in a {
                    let symbol = symbol
                        .as_str()
                        .ok_or_else(|| Error::Malformed("assignment symbols must be strings".into()))?;
                    map.insert(class.clone(), symbol.to_owned());
                }
                Some(map)
            }
        };

        let table = CharacterTable {
            name,
            order,
            quad_d,
            classes,
            char_names,
            characters,
            power,
            identity,
            assignment,
        };
        table.validate()?;
        Ok(table)
    }

    /// Class index of `g^m` for `g` in class `c`.  Total: `m` is reduced mod
    /// the element order, `m ≡ 0` is the identity class, `m ≡ 1` is `c`
    /// itself, and every other residue was checked present at load time.
    pub fn power_map(&self, c: usize, m: u64) -> usize {
        let ord = self.classes[c].order;
        match m % ord {
            0 => self.identity,
            1 => c,
            mm => *self
                .power
                .get(&(c, mm))
                .expect("validated total at load time"),
        }
    }

    pub fn identity_class(&self) -> usize {
        self.identity
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    fn validate(&self) -> Result<(), Error> {
        // Schur row orthogonality over the fixed quadratic extension.
        for i in 0..self.characters.len() {
            for j in i..self.characters.len() {
                let mut sum = QuadNum::zero(self.quad_d);
                for (ci, class) in self.classes.iter().enumerate() {
                    let term = self.characters[i][ci].mul(&self.characters[j][ci].conj());
                    sum = sum.add(&term.scale(&rat(class.size as i64)));
                }
                let expected = if i == j { rat(self.order as i64) } else { Rat::zero() };
                if !sum.is_rational() || sum.a != expected {
                    return Err(Error::OrthogonalityFailure { i, j });
                }
            }
        }
        // Power-map totality and order consistency.
        for (ci, class) in self.classes.iter().enumerate() {
            for m in 0..class.order {
                let target = match m {
                    0 => self.identity,
                    1 => ci,
                    mm => *self.power.get(&(ci, mm)).ok_or_else(|| {
                        Error::PowerMapInconsistent(format!(
                            "missing image of {}^{mm}",
                            class.name
                        ))
                    })?,
                };
                let expected_order = class.order / gcd_u64(class.order, m);
                if self.classes[target].order != expected_order {
                    return Err(Error::PowerMapInconsistent(format!(
                        "{}^{m} lands in {} of order {}, expected order {}",
                        class.name, self.classes[target].name, self.classes[target].order,
                        expected_order
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Load and validate a group file.
pub fn load_group(path: &Path) -> Result<CharacterTable, Error> {
    CharacterTable::load(path)
}

/// Catalog symbols eligible for a conjugacy class of the given element order
/// (the bundled slice of the monster class list; only orders exercised by the
/// bundled fixtures ship).
pub fn monster_class_symbols(order: u64) -> Option<&'static [&'static str]> {
    match order {
        1 => Some(&["1"]),
        2 => Some(&["2+", "2", "4|2"]),
        3 => Some(&["3+", "3", "3|3"]),
        5 => Some(&["5+", "5"]),
        7 => Some(&["7+", "7"]),
        _ => None,
    }
}

/// Verify both assignment invariants: (i) each class gets a symbol eligible
/// for its element order, and (ii) powers commute with the assignment —
/// `symbol(c^m)` equals `symbol(c)^m` as groups, for every class and power.
pub fn validate_assignment(table: &CharacterTable, assignment: &Assignment) -> CheckReport {
    let params = json!({ "group": table.name });
    let mut failures: Vec<String> = Vec::new();
    let mut canonical: Vec<Option<GroupSymbol>> = Vec::new();
    for class in &table.classes {
        match assignment.get(&class.name) {
            None => {
                failures.push(format!("class {} has no assigned symbol", class.name));
                canonical.push(None);
            }
            Some(text) => match GroupSymbol::parse(text) {
                Err(e) => {
                    failures.push(format!("class {}: {e}", class.name));
                    canonical.push(None);
                }
                Ok(sym) => {
                    let spelled = sym.to_string();
                    let eligible = monster_class_symbols(class.order)
                        .map(|opts| opts.contains(&spelled.as_str()))
                        .unwrap_or(false);
                    if !eligible {
                        failures.push(format!(
                            "class {} (order {}): {spelled} is not an order-{} class symbol",
                            class.name, class.order, class.order
                        ));
                    }
                    canonical.push(Some(sym));
                }
            },
        }
    }
    for (ci, class) in table.classes.iter().enumerate() {
        let Some(sym) = &canonical[ci] else { continue };
        for m in 1..=class.order {
            let target = table.power_map(ci, m);
            let Some(target_sym) = &canonical[target] else { continue };
            let powered = sym.power_group(m);
            if &powered != target_sym {
                failures.push(format!(
                    "class {} power {m}: symbol {} powers to {}, but class {} carries {}",
                    class.name, sym, powered, table.classes[target].name, target_sym
                ));
            }
        }
    }
    if failures.is_empty() {
        CheckReport::new("assignment", params, 0, Verdict::Pass)
    } else {
        CheckReport::new("assignment", params, 0, Verdict::Fail).with_note(failures.join("; "))
    }
}

fn class_series(
    catalog: &Catalog,
    assignment: &Assignment,
    class: &ConjClass,
    high: i64,
) -> Result<LaurentSeries, Error> {
    let text = assignment
        .get(&class.name)
        .ok_or_else(|| Error::Malformed(format!("class {} has no assigned symbol", class.name)))?;
    let canonical = GroupSymbol::parse(text)?.to_string();
    if !catalog.contains(&canonical) {
        return Err(Error::MissingCatalogEntry(canonical));
    }
    Ok(catalog.hauptmodul(&canonical, high)?)
}

fn first_nonzero(series: &LaurentSeries) -> Option<i64> {
    (series.low()..series.high()).find(|&n| !series.coeff(n).unwrap().is_zero())
}

/// Combine per-class Hauptmoduln against one character row, weighted by class
/// size and conjugated character value.  The rational and irrational parts
/// accumulate separately; a surviving irrational part is an error, and the
/// rational part divided by `|G|` is returned.
pub fn multiplicity_series(
    table: &CharacterTable,
    assignment: &Assignment,
    chi_index: usize,
    catalog: &Catalog,
    high: i64,
) -> Result<LaurentSeries, Error> {
    let mut rational = LaurentSeries::zero(-1, high);
    let mut irrational = LaurentSeries::zero(-1, high);
    for (ci, class) in table.classes.iter().enumerate() {
        let t = class_series(catalog, assignment, class, high)?;
        let w = table.characters[chi_index][ci].conj().scale(&rat(class.size as i64));
        if !w.a.is_zero() {
            rational = rational.add(&t.scale(&w.a))?;
        }
        if !w.b.is_zero() {
            irrational = irrational.add(&t.scale(&w.b))?;
        }
    }
    if let Some(exponent) = first_nonzero(&irrational) {
        return Err(Error::IrrationalResidue {
            chi: table.char_names[chi_index].clone(),
            exponent,
        });
    }
    Ok(rational.scale(&(Rat::one() / rat(table.order as i64))))
}

/// Recombine the multiplicity series of one class:
/// `Σ_χ χ(c)·M_χ`, which Schur inversion says equals `𝒯_{assignment(c)}`.
/// Irrational parts must again cancel exactly.
pub fn trace_recombination(
    table: &CharacterTable,
    assignment: &Assignment,
    catalog: &Catalog,
    class_index: usize,
    high: i64,
) -> Result<LaurentSeries, Error> {
    let mut rational = LaurentSeries::zero(-1, high);
    let mut irrational = LaurentSeries::zero(-1, high);
    for chi_index in 0..table.characters.len() {
        let m = multiplicity_series(table, assignment, chi_index, catalog, high)?;
        let value = &table.characters[chi_index][class_index];
        if !value.a.is_zero() {
            rational = rational.add(&m.scale(&value.a))?;
        }
        if !value.b.is_zero() {
            irrational = irrational.add(&m.scale(&value.b))?;
        }
    }
    if let Some(exponent) = first_nonzero(&irrational) {
        return Err(Error::IrrationalResidue {
            chi: format!("recombination of class {}", table.classes[class_index].name),
            exponent,
        });
    }
    Ok(rational)
}

/// Everything `check_padic_moonshine` observed: the multiplicity series per
/// character plus verdict-carrying sub-reports.  Positivity is labeled
/// to-window only — full positivity rests on growth estimates outside this
/// crate's scope.
#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub assignment_check: CheckReport,
    pub multiplicities: Vec<(String, LaurentSeries)>,
    pub integrality: CheckReport,
    pub positivity: CheckReport,
    pub annihilation: Vec<CheckReport>,
    pub conclusion: String,
}

impl MultiplicityReport {
    pub fn all_passed(&self) -> bool {
        self.assignment_check.passed()
            && self.integrality.passed()
            && self.positivity.passed()
            && self.annihilation.iter().all(CheckReport::passed)
    }

    pub fn reports(&self) -> Vec<&CheckReport> {
        let mut out = vec![&self.assignment_check, &self.integrality, &self.positivity];
        out.extend(self.annihilation.iter());
        out
    }
}

/// The full p-adic moonshine check for one group: assignment validity,
/// integrality and (window-limited) nonnegativity of every multiplicity
/// series, and per-class valuation-sequence evidence that each assigned
/// Hauptmodul is p-adically annihilated.
pub fn check_padic_moonshine(
    table: &CharacterTable,
    assignment: &Assignment,
    catalog: &Catalog,
    p: u64,
    high: i64,
    n_max: u32,
) -> Result<MultiplicityReport, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let assignment_check = validate_assignment(table, assignment);

    let mut multiplicities = Vec::with_capacity(table.characters.len());
    for chi_index in 0..table.characters.len() {
        multiplicities.push((
            table.char_names[chi_index].clone(),
            multiplicity_series(table, assignment, chi_index, catalog, high)?,
        ));
    }

    let params = json!({ "group": table.name, "p": p });
    let mut integrality = CheckReport::new("integrality", params.clone(), high, Verdict::Pass);
    let mut positivity = CheckReport::new("positivity", params.clone(), high, Verdict::Pass)
        .with_note("nonnegativity verified to the window only");
    'outer: for (name, m) in &multiplicities {
        for n in m.low()..m.high() {
            let c = m.coeff(n).unwrap();
            if !c.is_integer() {
                integrality = CheckReport::new("integrality", params.clone(), high, Verdict::Fail)
                    .with_witness(n)
                    .with_note(format!("M_{name} has non-integer coefficient at q^{n}"));
                break 'outer;
            }
            if c.is_negative() {
                positivity = CheckReport::new("positivity", params.clone(), high, Verdict::Fail)
                    .with_witness(n)
                    .with_note(format!("M_{name} has negative coefficient at q^{n}"));
            }
        }
    }

    // Per-class annihilation evidence: 𝒯 itself has window valuation 0 (unit
    // leading coefficient), and U_p can only raise the window minimum, so an
    // annihilated series must show strict growth: v_p(𝒯|U_p^{n_max}) > 0 (or
    // the iterate vanished outright).  A sequence stuck at 0 is flagged
    // indeterminate — the window or n_max was too small to observe growth.
    let base_window = ((high / (p as i64).pow(n_max)).max(20)).min(high);
    let mut annihilation = Vec::new();
    let mut seen: BTreeMap<String, Verdict> = BTreeMap::new();
    for class in &table.classes {
        let symbol = match assignment.get(&class.name) {
            Some(s) => GroupSymbol::parse(s)?.to_string(),
            None => continue,
        };
        let class_params = json!({
            "group": table.name, "class": class.name, "symbol": symbol, "p": p,
        });
        if let Some(verdict) = seen.get(&symbol) {
            annihilation.push(
                CheckReport::new("class-annihilation", class_params, base_window, *verdict)
                    .with_note("shares a symbol already checked"),
            );
            continue;
        }
        let seq = crate::annihilation::valuation_sequence(catalog, &symbol, p, n_max, base_window)?;
        let values: Vec<Option<i64>> = seq.iter().map(|v| v.value).collect();
        let grew = values.last().map_or(false, |v| v.map_or(true, |v| v > 0));
        let report = if grew {
            CheckReport::new("class-annihilation", class_params, base_window, Verdict::Pass)
                .with_valuations(values)
        } else {
            CheckReport::new(
                "class-annihilation",
                class_params,
                base_window,
                Verdict::Indeterminate,
            )
            .with_valuations(values)
            .with_note(format!("no valuation growth observed within {n_max} steps"))
        };
        seen.insert(symbol, report.verdict);
        annihilation.push(report);
    }

    let mut report = MultiplicityReport {
        assignment_check,
        multiplicities,
        integrality,
        positivity,
        annihilation,
        conclusion: String::new(),
    };
    report.conclusion = if report.all_passed() {
        format!(
            "{} has {p}-adic moonshine (verified on {high} coefficients)",
            table.name
        )
    } else {
        format!("{} fails the {p}-adic moonshine checks", table.name)
    };
    Ok(report)
}

/// Find the least `n <= n_max` with `𝒯|U_p^n ≡ 0 (mod p)` on the available
/// window.  `window` is the input precision of `𝒯`; every application of
/// `U_p` divides it by `p`.  A hit passes with the witness `n`; no hit is
/// indeterminate (the existential is open-ended).
pub fn check_weak_annihilation(
    catalog: &Catalog,
    symbol: &str,
    p: u64,
    n_max: u32,
    window: i64,
) -> Result<CheckReport, Error> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let canonical = GroupSymbol::parse(symbol)?.to_string();
    let params = json!({ "symbol": canonical, "p": p, "n_max": n_max });
    let mut f = catalog.hauptmodul(&canonical, window)?;
    for n in 0..=n_max {
        if f.low() >= f.high() {
            return Ok(CheckReport::new("weak-annihilation", params, window, Verdict::Indeterminate)
                .with_note(format!("window exhausted after {n} applications of U_{p}")));
        }
        if f.reduce_mod(p, 1)?.is_zero() {
            return Ok(CheckReport::new("weak-annihilation", params, window, Verdict::Pass)
                .with_witness(n as i64)
                .with_note(format!("T|U_{p}^{n} vanishes mod {p} on the window")));
        }
        if n < n_max {
            f = f.u_p(p)?;
        }
    }
    Ok(CheckReport::new("weak-annihilation", params, window, Verdict::Indeterminate)
        .with_note(format!("no vanishing iterate found with n <= {n_max}")))
}

/// Window-minimum `v_q` over the coefficients of `J − 𝒯`.
pub fn exponent_divisibility(
    catalog: &Catalog,
    symbol: &str,
    q: u64,
    window: i64,
) -> Result<ValuationP, Error> {
    let canonical = GroupSymbol::parse(symbol)?.to_string();
    if !catalog.contains(&canonical) {
        return Err(Error::MissingCatalogEntry(canonical));
    }
    let j = catalog.hauptmodul("1", window)?;
    let t = catalog.hauptmodul(&canonical, window)?;
    Ok(j.sub(&t)?.valuation_p(q)?)
}

/// Decide whether `J + Σ a_i·𝒯_i ≡ 0 (mod q^r)` has a solution in the `a_i`
/// over `ℤ/q^r`, imposing the congruence at every exponent of the window.
/// Solutions are lifted one q-adic digit at a time: the residual candidate
/// set mod `q^i` is filtered against all window congruences before lifting to
/// `q^{i+1}`, which is exact and deterministic for the small candidate counts
/// used here.  Returns the lexicographically least witness when feasible.
pub fn order_bound_feasible(
    catalog: &Catalog,
    candidates: &[&str],
    q: u64,
    r: u32,
    window: i64,
) -> Result<(bool, Option<Vec<i64>>), Error> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let k = candidates.len();
    if r == 0 {
        return Ok((true, Some(vec![0; k])));
    }
    let mut series = Vec::with_capacity(k);
    for text in candidates {
        let canonical = GroupSymbol::parse(text)?.to_string();
        if !catalog.contains(&canonical) {
            return Err(Error::MissingCatalogEntry(canonical));
        }
        series.push(catalog.hauptmodul(&canonical, window)?);
    }
    let j = catalog.hauptmodul("1", window)?;

    // Residue matrix mod q^r: one congruence row per exponent.
    let modulus_big = crate::numutil::int_pow(q, r);
    let high = series
        .iter()
        .map(LaurentSeries::high)
        .chain(std::iter::once(j.high()))
        .min()
        .unwrap();
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    let as_res = |c: &Rat| -> Result<i64, Error> {
        residue_mod(c, &modulus_big)
            .and_then(|r| r.to_i64())
            .ok_or_else(|| Error::Malformed("coefficient is not q-integral".into()))
    };
    for n in -1..high {
        let coeffs = series
            .iter()
            .map(|t| as_res(&t.coeff(n).unwrap()))
            .collect::<Result<Vec<_>, _>>()?;
        let rhs = as_res(&j.coeff(n).unwrap())?;
        if coeffs.iter().all(|c| *c == 0) && rhs == 0 {
            continue;
        }
        rows.push((coeffs, rhs));
    }

    // Digit-by-digit lifting of the candidate set.
    let qi = q as i64;
    let satisfies = |a: &[i64], m: i128| -> bool {
        rows.iter().all(|(coeffs, rhs)| {
            let mut acc = *rhs as i128;
            for (ai, ci) in a.iter().zip(coeffs) {
                acc += (*ai as i128) * (*ci as i128);
            }
            acc % m == 0
        })
    };
    let mut sols: Vec<Vec<i64>> = vec![vec![0; k]];
    let mut modulus: i64 = 1;
    for _ in 0..r {
        let next_mod = modulus * qi;
        let mut next: Vec<Vec<i64>> = Vec::new();
        for base in &sols {
            let mut digits = vec![0i64; k];
            loop {
                let candidate: Vec<i64> = base
                    .iter()
                    .zip(&digits)
                    .map(|(b, d)| b + d * modulus)
                    .collect();
                if satisfies(&candidate, next_mod as i128) {
                    next.push(candidate);
                }
                // Advance the digit vector in base q.
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    digits[pos] += 1;
                    if digits[pos] < qi {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        if next.is_empty() {
            return Ok((false, None));
        }
        next.sort();
        next.dedup();
        sols = next;
        modulus = next_mod;
    }
    let witness = sols.into_iter().min().unwrap();
    Ok((true, Some(witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Catalog, BUNDLED_A5_JSON};
    use crate::numutil::rat_frac;

    fn a5() -> CharacterTable {
        CharacterTable::parse(BUNDLED_A5_JSON).unwrap()
    }

    fn catalog() -> Catalog {
        Catalog::bundled()
    }

    fn a5_assignment() -> Assignment {
        a5().assignment.expect("bundled assignment")
    }

    #[test]
    fn quadnum_arithmetic_and_conjugation() {
        let phi = QuadNum::new(rat_frac(1, 2), rat_frac(1, 2), 5);
        let psi = QuadNum::new(rat_frac(1, 2), rat_frac(-1, 2), 5);
        // phi * psi = (1 - 5)/4 = -1, phi + psi = 1.
        assert_eq!(phi.mul(&psi), QuadNum::from_rat(rat(-1), 5));
        assert_eq!(phi.add(&psi), QuadNum::from_rat(rat(1), 5));
        // Real quadratic: conj is the identity.
        assert_eq!(phi.conj(), phi);
        // Imaginary quadratic: conj negates the irrational part, twice is id.
        let z = QuadNum::new(rat(1), rat(3), -7);
        assert_eq!(z.conj().conj(), z);
        assert_eq!(z.conj().b, rat(-3));
        assert_eq!(z.mul(&z.conj()), QuadNum::from_rat(rat(1 + 9 * 7), -7));
    }

    #[test]
    fn a5_table_loads_and_validates() {
        let t = a5();
        assert_eq!(t.order, 60);
        assert_eq!(
            t.classes.iter().map(|c| c.size).collect::<Vec<_>>(),
            vec![1, 15, 20, 12, 12]
        );
        assert_eq!(t.power_map(t.class_index("5a").unwrap(), 2), t.class_index("5b").unwrap());
        assert_eq!(t.power_map(t.class_index("5a").unwrap(), 5), t.identity_class());
    }

    #[test]
    fn trivial_group_loads() {
        let t = CharacterTable::parse(
            r#"{"order": 1, "classes": [{"name": "1a", "size": 1, "order": 1}],
                "characters": [[[1, 0]]]}"#,
        )
        .unwrap();
        assert_eq!(t.order, 1);
        assert_eq!(t.char_names, vec!["chi0"]);
    }

    #[test]
    fn corrupted_character_fails_orthogonality() {
        let bad = BUNDLED_A5_JSON.replacen("[4, 0]", "[5, 0]", 1);
        assert!(matches!(
            CharacterTable::parse(&bad),
            Err(Error::OrthogonalityFailure { .. })
        ));
    }

    #[test]
    fn inconsistent_power_map_is_rejected() {
        let bad = BUNDLED_A5_JSON.replacen(r#""2": "5b""#, r#""2": "3a""#, 1);
        assert!(matches!(
            CharacterTable::parse(&bad),
            Err(Error::PowerMapInconsistent(_))
        ));
    }

    #[test]
    fn bundled_assignment_is_valid() {
        let rep = validate_assignment(&a5(), &a5_assignment());
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn fricke_mismatch_on_fifth_classes_is_caught() {
        let mut assignment = a5_assignment();
        assignment.insert("5b".into(), "5+".into());
        let rep = validate_assignment(&a5(), &assignment);
        assert_eq!(rep.verdict, Verdict::Fail);
        // Squaring 5a lands in 5b, whose symbol must then agree.
        assert!(rep.note.unwrap().contains("5a"));
    }

    #[test]
    fn trivial_assignment_is_valid() {
        let t = CharacterTable::parse(
            r#"{"order": 1, "classes": [{"name": "1a", "size": 1, "order": 1}],
                "characters": [[[1, 0]]]}"#,
        )
        .unwrap();
        let mut assignment = Assignment::new();
        assignment.insert("1a".into(), "1".into());
        assert!(validate_assignment(&t, &assignment).passed());
        let m = multiplicity_series(&t, &assignment, 0, &catalog(), 5).unwrap();
        let j = catalog().hauptmodul("1", 5).unwrap();
        assert!(m.eq_on_overlap(&j).unwrap());
    }

    #[test]
    fn multiplicity_series_for_the_trivial_character() {
        let m = multiplicity_series(&a5(), &a5_assignment(), 0, &catalog(), 5).unwrap();
        assert_eq!(m.coeff(-1), Some(rat(1)));
        assert_eq!(m.coeff(1), Some(rat(4378)));
        assert_eq!(m.coeff(2), Some(rat(382380)));
        assert_eq!(m.coeff(3), Some(rat(14714988)));
        assert_eq!(m.coeff(4), Some(rat(340105628)));
    }

    #[test]
    fn multiplicity_series_for_chi1() {
        let m = multiplicity_series(&a5(), &a5_assignment(), 1, &catalog(), 5).unwrap();
        assert_eq!(m.coeff(-1), Some(rat(0)));
        assert_eq!(m.coeff(1), Some(rat(13122)));
        assert_eq!(m.coeff(2), Some(rat(1432996)));
        assert_eq!(m.coeff(3), Some(rat(57620010)));
        assert_eq!(m.coeff(4), Some(rat(1349723748)));
    }

    #[test]
    fn galois_conjugate_characters_share_a_series() {
        let cat = catalog();
        let m3 = multiplicity_series(&a5(), &a5_assignment(), 3, &cat, 4).unwrap();
        let m4 = multiplicity_series(&a5(), &a5_assignment(), 4, &cat, 4).unwrap();
        assert!(m3.eq_on_overlap(&m4).unwrap());
        assert_eq!(m3.coeff(1), Some(rat(8753)));
    }

    #[test]
    fn schur_roundtrip_recovers_each_class_series() {
        let table = a5();
        let assignment = a5_assignment();
        let cat = catalog();
        for (ci, class) in table.classes.iter().enumerate() {
            let recombined = trace_recombination(&table, &assignment, &cat, ci, 8).unwrap();
            let direct = cat
                .hauptmodul(assignment.get(&class.name).unwrap(), 8)
                .unwrap();
            assert!(
                recombined.eq_on_overlap(&direct).unwrap(),
                "class {}",
                class.name
            );
        }
    }

    #[test]
    fn a5_has_five_adic_moonshine() {
        let rep =
            check_padic_moonshine(&a5(), &a5_assignment(), &catalog(), 5, 200, 2).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert!(rep.conclusion.contains("has 5-adic moonshine"), "{}", rep.conclusion);
    }

    #[test]
    fn broken_assignment_breaks_integrality() {
        // Handing the identity class a nontrivial Hauptmodul wrecks the
        // size-weighted averages (and the order-match validation).
        let mut assignment = a5_assignment();
        assignment.insert("1a".into(), "2+".into());
        let rep = check_padic_moonshine(&a5(), &assignment, &catalog(), 5, 50, 1).unwrap();
        assert_eq!(rep.assignment_check.verdict, Verdict::Fail);
        assert_eq!(rep.integrality.verdict, Verdict::Fail);
        assert!(rep.integrality.witness.is_some());
        assert!(!rep.all_passed());
    }

    #[test]
    fn weak_annihilation_witnesses() {
        let cat = catalog();
        let rep = check_weak_annihilation(&cat, "3", 2, 6, 2000).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep = check_weak_annihilation(&cat, "5", 2, 6, 2000).unwrap();
        assert!(rep.passed(), "{rep:?}");
        // Annihilation implies weak annihilation.
        let rep = check_weak_annihilation(&cat, "2+", 2, 6, 2000).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn j_is_not_weakly_annihilated_at_13() {
        let rep = check_weak_annihilation(&catalog(), "1", 13, 3, 3000).unwrap();
        assert_eq!(rep.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn exponent_divisibility_rows() {
        let cat = catalog();
        let v = exponent_divisibility(&cat, "2+", 2, 200).unwrap();
        assert!(v.value.unwrap() >= 12, "{v:?}");
        let v = exponent_divisibility(&cat, "2", 2, 200).unwrap();
        assert!(v.value.unwrap() >= 13, "{v:?}");
        let v = exponent_divisibility(&cat, "1", 2, 200).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn order_bound_single_candidate() {
        let cat = catalog();
        let r = exponent_divisibility(&cat, "2+", 2, 300).unwrap().value.unwrap() as u32;
        let (feasible, witness) = order_bound_feasible(&cat, &["2+"], 2, r, 300).unwrap();
        assert!(feasible);
        // Unique solution a ≡ -1 because 𝒯 has a unit coefficient.
        assert_eq!(witness.unwrap(), vec![(1i64 << r) - 1]);
    }

    #[test]
    fn order_bound_eleven_column() {
        let cat = catalog();
        let candidates = ["3|3", "11+"];
        let (feasible3, _) = order_bound_feasible(&cat, &candidates, 11, 3, 400).unwrap();
        assert!(!feasible3);
        let (feasible2, witness) = order_bound_feasible(&cat, &candidates, 11, 2, 400).unwrap();
        assert!(feasible2, "witness {witness:?}");
    }

    #[test]
    fn order_bound_empty_candidates() {
        let (feasible, _) = order_bound_feasible(&catalog(), &[], 3, 1, 50).unwrap();
        assert!(!feasible);
        let (feasible, witness) = order_bound_feasible(&catalog(), &[], 3, 0, 50).unwrap();
        assert!(feasible);
        assert_eq!(witness.unwrap(), Vec::<i64>::new());
    }
}
