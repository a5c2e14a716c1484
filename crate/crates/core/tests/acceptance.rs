//! Acceptance suite. One test per criterion; each prints a single
//! `criterion NN <name>: PASS` line when it holds (run with `--nocapture` to
//! see the lines). Exit-code behavior of the CLI surface (criterion 10) is
//! exercised in the CLI crate's own acceptance test.

use std::collections::HashMap;
use std::time::Instant;

use asymset_core::baseline::{error_bound, RandomCode, SetList};
use asymset_core::bounds::{self, GenericPrior};
use asymset_core::gf::FieldSpec;
use asymset_core::multilevel::{self, Rational, SchemeParams};
use asymset_core::prior::{ItemSet, Prior};
use asymset_core::rs::{RsCodec, SparseSupport};
use asymset_core::SeedStream;

fn pass(line: &str) {
    println!("criterion {line}: PASS");
}

/// Every support of size <= k over [0, 15) for the given k, 576 in total
/// for k = 3.
fn supports_up_to(k: usize) -> Vec<SparseSupport> {
    (0u32..1 << 15)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| SparseSupport::from_iter((0..15).filter(move |&p| m >> p & 1 == 1)))
        .collect()
}

#[test]
fn criterion_01_rs_exhaustive_recovery() {
    let start = Instant::now();
    let spec = FieldSpec::canonical(4).unwrap();
    let mut total = 0usize;
    for k in 1..=3usize {
        let codec = RsCodec::new(spec, 15, k).unwrap();
        for support in supports_up_to(k) {
            let syndrome = codec.encode_support(&support).unwrap();
            let decoded = codec
                .decode(&syndrome)
                .unwrap_or_else(|e| panic!("decode failure for {support:?}: {e}"));
            assert_eq!(decoded, support);
            total += 1;
        }
    }
    assert_eq!(total, 16 + 121 + 576);
    assert!(
        start.elapsed().as_secs() < 60,
        "exhaustive recovery too slow"
    );
    pass("01 rs-exhaustive-recovery");
}

#[test]
fn criterion_02_rs_syndrome_uniqueness() {
    let start = Instant::now();
    let codec = RsCodec::new(FieldSpec::canonical(4).unwrap(), 15, 2).unwrap();
    let mut seen: HashMap<Vec<u64>, SparseSupport> = HashMap::new();
    for support in supports_up_to(2) {
        let syndrome = codec.encode_support(&support).unwrap();
        if let Some(other) = seen.insert(syndrome.values().to_vec(), support.clone()) {
            panic!("syndrome collision between {other:?} and {support:?}");
        }
    }
    assert_eq!(seen.len(), 121);
    assert!(start.elapsed().as_secs() < 60);
    pass("02 rs-syndrome-uniqueness");
}

struct Trial {
    exact: bool,
    clean: bool,
    events_hold: bool,
}

/// The shared Monte-Carlo run of criteria 3 and 4: N = 2^10, normalized
/// zipf(1024, 1.0), m* = 64, delta = 1/10, k = 4, 1000 Huffman-filtered
/// trials under deterministic seeds.
fn zipf_trials() -> Vec<Trial> {
    let mu = Prior::zipf(1024, 1.0).normalize_to_m().unwrap();
    let params = SchemeParams::derive(1024, 64, Rational::new(1, 10).unwrap()).unwrap();
    let budget = 64.0 + 1e-9;
    let mut trials = Vec::with_capacity(1000);
    for i in 0..1000u64 {
        let trial_seed = 1 + i;
        let mut sampler = SeedStream::new(trial_seed);
        let set = loop {
            let candidate = mu.sample_set(4, sampler.next_u64());
            if mu.huffman_weight(&candidate).unwrap() <= budget {
                break candidate;
            }
        };
        let msg = multilevel::encode(&params, trial_seed, &set).unwrap();
        let (decoded, diagnostics) = multilevel::decode(&params, trial_seed, &mu, &msg).unwrap();
        let events = multilevel::decoding_events(&params, trial_seed, &mu, &set).unwrap();
        trials.push(Trial {
            exact: decoded == set,
            clean: diagnostics.clean,
            events_hold: events.all_hold,
        });
    }
    trials
}

#[test]
fn criterion_03_multilevel_success_probability() {
    let trials = zipf_trials();
    let successes = trials.iter().filter(|t| t.exact && t.clean).count();
    let rate = successes as f64 / trials.len() as f64;
    assert!(
        rate >= 0.90 - 0.03,
        "success rate {rate} below 0.87 ({successes}/{})",
        trials.len()
    );
    pass(&format!(
        "03 multilevel-success-probability (rate {rate:.3})"
    ));
}

#[test]
fn criterion_04_deterministic_peeling_soundness() {
    let trials = zipf_trials();
    let qualifying = trials.iter().filter(|t| t.events_hold).count();
    let violations = trials.iter().filter(|t| t.events_hold && !t.exact).count();
    assert!(qualifying > 0, "no trial had all events hold");
    assert_eq!(
        violations, 0,
        "{violations} of {qualifying} event-holding trials decoded wrong"
    );
    pass(&format!(
        "04 deterministic-peeling-soundness ({qualifying}/{} qualified, 0 violations)",
        trials.len()
    ));
}

#[test]
fn criterion_05_linearity_and_obliviousness() {
    let params = SchemeParams::derive(256, 16, Rational::new(1, 8).unwrap()).unwrap();
    let mut stream = SeedStream::new(0xC5);
    for trial in 0..1000u64 {
        let a = ItemSet::from_iter((0..5).map(|_| stream.next_below(256) + 1));
        let b = ItemSet::from_iter((0..5).map(|_| stream.next_below(256) + 1));
        let seed = stream.next_u64();
        let ma = multilevel::encode(&params, seed, &a).unwrap();
        let mb = multilevel::encode(&params, seed, &b).unwrap();
        assert_eq!(
            ma.xor(&mb).unwrap(),
            multilevel::encode(&params, seed, &a.symmetric_difference(&b)).unwrap(),
            "linearity failed on trial {trial}"
        );

        let item = stream.next_below(256) + 1;
        let toggled = multilevel::update(&params, seed, &ma, item).unwrap();
        assert_eq!(
            multilevel::update(&params, seed, &toggled, item).unwrap(),
            ma
        );
    }

    // Obliviousness: the encoder takes no prior; re-encoding the same set in
    // the decoding contexts of two different priors is byte-identical.
    let zipf = Prior::zipf(256, 1.0).normalize_to_m().unwrap();
    let uniform = Prior::uniform(256).normalize_to_m().unwrap();
    for seed in 0..50u64 {
        let set = zipf.sample_set(4, seed);
        let for_zipf = multilevel::write_message_file(
            &params,
            seed,
            &multilevel::encode(&params, seed, &set).unwrap(),
        );
        let for_uniform = multilevel::write_message_file(
            &params,
            seed,
            &multilevel::encode(&params, seed, &set).unwrap(),
        );
        assert_eq!(for_zipf, for_uniform);
        // Both decoders consume the same bytes.
        let parsed = multilevel::read_message_file(&for_zipf).unwrap();
        multilevel::decode(&parsed.params, parsed.seed, &zipf, &parsed.message).unwrap();
        multilevel::decode(&parsed.params, parsed.seed, &uniform, &parsed.message).unwrap();
    }
    pass("05 linearity-and-obliviousness");
}

#[test]
fn criterion_06_message_length_accounting() {
    let params = SchemeParams::derive(16, 8, Rational::new(1, 4).unwrap()).unwrap();
    assert_eq!(params.level_count(), 3);
    assert_eq!(params.levels()[0].hash_domain, 288);
    assert_eq!(params.levels()[0].message_bits, 144);

    // Doubly-logarithmic growth: competitive ratio at N = 2^18 over the one
    // at N = 2^10 stays within a factor 2 for m* = 256, delta = 1/10.
    let delta = Rational::new(1, 10).unwrap();
    let lo = SchemeParams::derive(1 << 10, 256, delta).unwrap();
    let hi = SchemeParams::derive(1 << 18, 256, delta).unwrap();
    let ratio_lo = lo.total_bits() as f64 / 256.0;
    let ratio_hi = hi.total_bits() as f64 / 256.0;
    let growth = ratio_hi / ratio_lo;
    assert!(growth <= 2.0, "ratio growth {growth} exceeds 2");
    pass(&format!(
        "06 message-length-accounting (growth {growth:.3})"
    ));
}

#[test]
fn criterion_07_baseline_error_bound() {
    // 256 random distinct 4-subsets of [1, 64].
    let mut stream = SeedStream::new(2024);
    let mut sets = Vec::new();
    while sets.len() < 256 {
        let s = ItemSet::from_iter((0..4).map(|_| stream.next_below(64) + 1));
        if s.len() == 4 && !sets.contains(&s) {
            sets.push(s);
        }
    }
    let list = SetList::new(sets).unwrap();

    // Per-set failure over fresh random codes, cycling the target.
    let mut failures = 0u64;
    for i in 0..10_000u64 {
        let code = RandomCode::new(i, 16, 64).unwrap();
        let target = &list.sets()[(i % 256) as usize];
        let received = code.encode(target).unwrap();
        if code.ml_decode(&list, &received).unwrap() != Some(target) {
            failures += 1;
        }
    }
    let rate = failures as f64 / 10_000.0;
    let cap = 2.0 * error_bound(256, 16);
    assert!(rate <= cap, "per-set failure rate {rate} above {cap}");

    // Pairwise collision frequency for one fixed pair of distinct sets must
    // sit within 3 binomial sigmas of 2^-16.
    let s1 = ItemSet::from_iter([3, 17, 42, 60]);
    let s2 = ItemSet::from_iter([5, 17, 33, 64]);
    let trials = 10_000u64;
    let mut collisions = 0u64;
    for i in 0..trials {
        let code = RandomCode::new(i, 16, 64).unwrap();
        if code.encode(&s1).unwrap() == code.encode(&s2).unwrap() {
            collisions += 1;
        }
    }
    let p = (2.0f64).powi(-16);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let diff = (collisions as f64 / trials as f64 - p).abs();
    assert!(
        diff <= 3.0 * sigma,
        "pair collision rate off by {diff}, 3 sigma = {}",
        3.0 * sigma
    );
    pass(&format!(
        "07 baseline-error-bound (rate {rate:.4} <= {cap:.4})"
    ));
}

#[test]
fn criterion_08_lower_bound_witness() {
    // Every one of 100 random F2-linear encoders with N=6, k=2, m=3 must
    // yield a verified collision: 15 subsets > 8 codewords.
    for seed in 0..100u64 {
        let code = RandomCode::new(seed, 3, 6).unwrap();
        let word = |s: &ItemSet| {
            let bits = code.encode(s).expect("in-range items");
            (0..3).fold(0u64, |acc, j| acc << 1 | bits.bit(j) as u64)
        };
        let (s1, s2) = bounds::find_collision(word, 6, 2, 3)
            .unwrap()
            .unwrap_or_else(|| panic!("no collision found for seed {seed}"));
        assert_ne!(s1, s2);
        assert_eq!(word(&s1), word(&s2), "unverified collision for seed {seed}");

        // The witness prior: uniform over the union, padded to 2k items. Any
        // deterministic decoder answers the shared codeword with one set and
        // therefore misidentifies the other.
        let witness = bounds::uniform_union_prior(&s1, &s2, 6).unwrap();
        for s in [&s1, &s2] {
            for item in s.iter() {
                assert!(witness.prob(item).unwrap() > 0.0);
            }
        }
        let colliding_word = word(&s1);
        let all_pairs: Vec<ItemSet> = (1u64..=6)
            .flat_map(|a| (a + 1..=6).map(move |b| ItemSet::from_iter([a, b])))
            .collect();
        let decoder_answer = all_pairs
            .iter()
            .find(|s| word(s) == colliding_word)
            .expect("some set maps to the codeword");
        assert!(
            *decoder_answer != s1 || *decoder_answer != s2,
            "a single answer cannot equal two distinct sets"
        );
    }
    pass("08 lower-bound-witness");
}

#[test]
fn criterion_09_appendix_claims() {
    // list_mass <= e on 100 random priors with N <= 1000.
    let mut stream = SeedStream::new(9);
    for _ in 0..100 {
        let n = 2 + stream.next_below(999) as usize;
        let mut probs: Vec<f64> = (0..n).map(|_| stream.next_f64() + 1e-12).collect();
        let sum: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= sum;
        }
        let mu = Prior::new(probs).unwrap();
        let mass = bounds::list_mass(&mu);
        assert!(mass <= std::f64::consts::E + 1e-12, "list mass {mass} > e");
    }

    // check_cover_entropy on 10^3 random sigmas with support <= 16.
    let mut checked = 0;
    for _ in 0..1000 {
        let support = 1 + stream.next_below(16);
        let mut masses: Vec<f64> = (0..support).map(|_| stream.next_f64() + 1e-9).collect();
        let sum: f64 = masses.iter().sum();
        for m in &mut masses {
            *m /= sum;
        }
        let sigma = GenericPrior::new(
            masses
                .iter()
                .enumerate()
                .map(|(i, &m)| (i as u64 + 1, m))
                .collect(),
        )
        .unwrap();
        for delta in [0.1, 0.25, 0.5] {
            let report = bounds::check_cover_entropy(&sigma, delta).unwrap();
            assert!(
                report.pass,
                "cover size {} exceeds H/delta = {}",
                report.cover_bits, report.bound
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 3000);
    pass("09 appendix-claims");
}

#[test]
fn criterion_10_wire_format_stability() {
    let params = SchemeParams::derive(1024, 64, Rational::new(1, 10).unwrap()).unwrap();
    let set = ItemSet::from_iter([1, 5, 9, 1000]);

    // Byte stability across two independent runs.
    let run = || {
        let p = SchemeParams::derive(1024, 64, Rational::new(1, 10).unwrap()).unwrap();
        let msg = multilevel::encode(&p, 7, &set).unwrap();
        multilevel::write_message_file(&p, 7, &msg)
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);

    // Round trip through the file recovers the set under the prior.
    let mu = Prior::zipf(1024, 1.0).normalize_to_m().unwrap();
    let parsed = multilevel::read_message_file(&first).unwrap();
    assert_eq!(parsed.params, params);
    let (decoded, diagnostics) =
        multilevel::decode(&parsed.params, parsed.seed, &mu, &parsed.message).unwrap();
    assert_eq!(decoded, set);
    assert!(diagnostics.clean);

    // Truncations and header corruption must be rejected.
    for cut in [0, 4, 20, first.len() - 1] {
        assert!(multilevel::read_message_file(&first[..cut]).is_err());
    }
    let mut bad = first.clone();
    bad[0] ^= 0xFF;
    assert!(multilevel::read_message_file(&bad).is_err());
    let mut bad = first.clone();
    bad[13] ^= 0x01; // m* field: derived total_bits no longer matches
    assert!(multilevel::read_message_file(&bad).is_err());
    pass("10 wire-format-stability");
}
