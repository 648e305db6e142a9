//! Randomized and exhaustive structural properties: operator identities on
//! random series, eta-quotient multiplicativity, Eisenstein congruences,
//! power-map algebra on group symbols, and Schur inversion on the bundled
//! character table.  All randomness comes from fixed-seed ChaCha streams so
//! every run checks the identical case set.

use haupt_core::catalog::{Catalog, GroupSymbol, BUNDLED_A5_JSON};
use haupt_core::forms::{eisenstein, expand_eta_quotient, EtaQuotient};
use haupt_core::moonshine::{trace_recombination, CharacterTable};
use haupt_core::numutil::{rat, rat_frac};
use haupt_core::{LaurentSeries, Rat};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sparse_series(rng: &mut ChaCha8Rng) -> LaurentSeries {
    let low = rng.gen_range(-6..3);
    let len = rng.gen_range(1..40);
    let mut coeffs = Vec::with_capacity(len);
    for _ in 0..len {
        // Sparse: most coefficients vanish; the rest are small rationals.
        if rng.gen_bool(0.7) {
            coeffs.push(Rat::zero());
        } else if rng.gen_bool(0.8) {
            coeffs.push(rat(rng.gen_range(-50..=50)));
        } else {
            coeffs.push(rat_frac(rng.gen_range(-20..=20), rng.gen_range(1..=9)));
        }
    }
    LaurentSeries::new(low, coeffs)
}

#[test]
fn u_p_inverts_v_p_on_random_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let primes = [2u64, 3, 5, 7, 13];
    for case in 0..1000 {
        let f = random_sparse_series(&mut rng);
        let p = primes[rng.gen_range(0..primes.len())];
        let roundtrip = f.v_m(p).u_p(p).unwrap();
        assert_eq!(roundtrip.low(), f.low(), "case {case}");
        assert_eq!(roundtrip.high(), f.high(), "case {case}");
        assert_eq!(roundtrip.coeffs(), f.coeffs(), "case {case}, p = {p}");
    }
}

/// Draw a random eta quotient whose 24-offset is integral (required for a
/// plain q-power expansion).
fn random_eta_quotient(rng: &mut ChaCha8Rng) -> EtaQuotient {
    let scales = [1u64, 2, 3, 4, 6, 12];
    let mut terms: Vec<(u64, i64)> = Vec::new();
    let mut offset = 0i64;
    for &d in &scales[1..] {
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(-4..=4);
            if r != 0 {
                terms.push((d, r));
                offset += d as i64 * r;
            }
        }
    }
    // Adjust the scale-1 exponent so the total offset is a multiple of 24.
    let r1 = (-offset).rem_euclid(24);
    if r1 != 0 {
        terms.push((1, r1));
    }
    EtaQuotient::new(terms)
}

#[test]
fn eta_expansion_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let high = 50;
    for case in 0..100 {
        let a = random_eta_quotient(&mut rng);
        let b = random_eta_quotient(&mut rng);
        let lhs = expand_eta_quotient(&a.concat(&b), high).unwrap();
        let ea = expand_eta_quotient(&a, high).unwrap();
        let eb = expand_eta_quotient(&b, high).unwrap();
        let rhs = ea.mul(&eb).unwrap();
        assert!(
            lhs.eq_on_overlap(&rhs).unwrap(),
            "case {case}: {a} * {b} at first difference {:?}",
            lhs.first_difference(&rhs).unwrap()
        );
    }
}

#[test]
fn eisenstein_p_minus_one_is_one_mod_p() {
    for p in [5u64, 7, 11, 13] {
        let e = eisenstein(p - 1, 200).unwrap();
        let reduced = e.reduce_mod(p, 1).unwrap();
        let one = LaurentSeries::monomial(0, Rat::one(), 200);
        assert!(
            reduced.eq_on_overlap(&one).unwrap(),
            "E_{} mod {p}",
            p - 1
        );
    }
}

#[test]
fn power_group_composes() {
    let catalog = Catalog::bundled();
    for symbol in catalog.symbols() {
        let g = GroupSymbol::parse(symbol).unwrap();
        for a in 1..=12u64 {
            for b in 1..=12u64 {
                assert_eq!(
                    g.power_group(a).power_group(b),
                    g.power_group(a * b),
                    "({symbol}^{a})^{b}"
                );
            }
        }
    }
}

#[test]
fn power_map_edges_among_bundled_symbols() {
    // Every power-map edge between bundled symbols.
    let edges = [
        ("2+", 2, "1"),
        ("2", 2, "1"),
        ("3+", 3, "1"),
        ("3", 3, "1"),
        ("3|3", 3, "1"),
        ("5+", 5, "1"),
        ("5", 5, "1"),
        ("7+", 7, "1"),
        ("7", 7, "1"),
        ("9+", 3, "3"),
        ("9", 3, "3"),
        ("13+", 13, "1"),
        ("13", 13, "1"),
        ("25+", 5, "5"),
        ("25", 5, "5"),
        ("6+2", 2, "3"),
        ("6+2", 3, "2+"),
        ("11+", 11, "1"),
        ("6+3", 2, "3+"),
        ("6+3", 3, "2"),
        ("6|3", 2, "3|3"),
        ("6|3", 3, "2"),
        ("10+5", 2, "5+"),
        ("10+5", 5, "2"),
        ("22+11", 2, "11+"),
        ("22+11", 11, "2"),
    ];
    for (from, d, to) in edges {
        let g = GroupSymbol::parse(from).unwrap();
        assert_eq!(
            g.power_group(d).to_string(),
            to,
            "{from}^{d} should be {to}"
        );
    }
}

#[test]
fn schur_inversion_on_the_bundled_table() {
    let table = CharacterTable::parse(BUNDLED_A5_JSON).unwrap();
    let assignment = table.assignment.clone().unwrap();
    let catalog = Catalog::bundled();
    for ci in 0..table.classes.len() {
        let recombined = trace_recombination(&table, &assignment, &catalog, ci, 12).unwrap();
        let symbol = assignment.get(&table.classes[ci].name).unwrap();
        let direct = catalog.hauptmodul(symbol, 12).unwrap();
        assert!(recombined.eq_on_overlap(&direct).unwrap(), "class {ci}");
    }
}
