use byzmac_core::codec::audit::{audit_codebook, AuditStatus};
use byzmac_core::codec::{compose_two_phase, derandomize, RandomizedCode};
use byzmac_core::codec::{
    decode_feasibility, generate_constant_composition_codebook, Codebook, Decision, Decoder, DecoderParams,
    PlainCode, TypicalityDecoder,
};
use byzmac_core::info::{mutual_information, JointDist};
use byzmac_core::mac::{builtin_channel, product_channel_prob, Mac};
use byzmac_core::seq::{all_sequences, sequence_at};
use byzmac_core::sim::{ExactEvaluator, TableDecoder};
use byzmac_core::{DistributionVector, DEFAULT_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Joint type as a histogram keyed by the symbol tuple.
fn histogram(cols: &[&[usize]]) -> Vec<(Vec<usize>, usize)> {
    let mut h: HashMap<Vec<usize>, usize> = HashMap::new();
    for t in 0..cols[0].len() {
        *h.entry(cols.iter().map(|c| c[t]).collect()).or_default() += 1;
    }
    let mut v: Vec<_> = h.into_iter().collect();
    v.sort();
    v
}

fn mi_of(hist: &[(Vec<usize>, usize)], sizes: &[usize], a: &[usize], b: &[usize]) -> f64 {
    let total: usize = hist.iter().map(|(_, c)| c).sum();
    let mut p = vec![0.0; sizes.iter().product()];
    for (sym, c) in hist {
        let idx = sym.iter().zip(sizes).fold(0, |acc, (s, q)| acc * q + s);
        p[idx] += *c as f64 / total as f64;
    }
    mutual_information(&JointDist::new(sizes.to_vec(), p).unwrap(), a, b, &[]).unwrap()
}

fn seeded_codebook() -> Codebook {
    let u = DistributionVector::uniform(2);
    generate_constant_composition_codebook(&u, &u, 6, 4, 4, 11).unwrap()
}

#[test]
fn audit_property_one_matches_counting_oracle() {
    let cb = seeded_codebook();
    let eps = 0.1;
    let records = audit_codebook(&cb, eps, DEFAULT_BUDGET).unwrap();
    let names: Vec<&str> = records.iter().map(|r| r.property.as_str()).collect();
    assert_eq!(names, ["1", "2b", "3b", "4", "5", "1q", "2bq", "3bq", "4q", "5q"]);
    let bound = (-6.0 * eps / 2.0f64).exp2();
    for (words, rec) in [(&cb.words1, &records[0]), (&cb.words2, &records[5])] {
        let (mut active, mut violations, mut max_any) = (0u64, 0u64, 0.0f64);
        for y in all_sequences(2, 6) {
            let mut groups: HashMap<Vec<(Vec<usize>, usize)>, usize> = HashMap::new();
            for x in words {
                *groups.entry(histogram(&[x, &y])).or_default() += 1;
            }
            for (h, c) in groups {
                let frac = c as f64 / words.len() as f64;
                max_any = max_any.max(frac);
                if mi_of(&h, &[2, 2], &[0], &[1]) > eps {
                    active += 1;
                    if frac > bound * (1.0 + 1e-12) {
                        violations += 1;
                    }
                }
            }
        }
        assert_eq!(rec.active_instances, active);
        assert_eq!(rec.violations, violations);
        assert!((rec.max_lhs_any - max_any).abs() < 1e-12);
        assert_eq!(rec.status == AuditStatus::Fail, violations > 0);
    }
}

#[test]
fn audit_property_3b_matches_counting_oracle() {
    let cb = seeded_codebook();
    let eps = 0.1;
    let rec = &audit_codebook(&cb, eps, DEFAULT_BUDGET).unwrap()[2];
    let r = (4.0f64).log2() / 6.0;
    let mut violations = 0u64;
    let mut instances = 0u64;
    let mut max_any = 0.0f64;
    for x in all_sequences(2, 6) {
        for y in all_sequences(2, 6) {
            let mut groups: HashMap<Vec<(Vec<usize>, usize)>, usize> = HashMap::new();
            for xt in &cb.words1 {
                for yt in &cb.words2 {
                    *groups.entry(histogram(&[&x, xt, yt, &y])).or_default() += 1;
                }
            }
            for (h, c) in groups {
                instances += 1;
                max_any = max_any.max(c as f64);
                let sizes = [2, 2, 2, 2];
                let e = (r - mi_of(&h, &sizes, &[1], &[2, 0, 3])).max(0.0) + (r - mi_of(&h, &sizes, &[2], &[0, 3])).max(0.0);
                if c as f64 > (6.0 * (e + eps)).exp2() * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
        }
    }
    assert_eq!(rec.active_instances, instances);
    assert_eq!(rec.violations, violations);
    assert_eq!(rec.max_lhs_any, max_any);
}

#[test]
fn feasibility_decoder_recovers_pairs_on_the_identity_channel() {
    let mac = builtin_channel("identity").unwrap();
    // every cross pair has an independent joint type
    let cb = Codebook::from_words(2, 2, vec![vec![0, 0, 1, 1], vec![1, 1, 0, 0]], vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0]])
        .unwrap();
    let params = DecoderParams::from_eta(0.5, 0.25).unwrap();
    for (i, x) in cb.words1.iter().enumerate() {
        for (j, y) in cb.words2.iter().enumerate() {
            let z: Vec<usize> = x.iter().zip(y).map(|(a, b)| 2 * a + b).collect();
            let out = decode_feasibility(&cb, &mac, &z, &params, DEFAULT_BUDGET).unwrap();
            assert_eq!(out.decision, Decision::Pair(i, j));
        }
    }
    let dec = TypicalityDecoder::new(cb.clone(), mac.clone(), params, DEFAULT_BUDGET).unwrap();
    let ev = ExactEvaluator::deterministic(&cb, &dec, &mac, DEFAULT_BUDGET).unwrap();
    assert_eq!(ev.honest_error(), 0.0);
}

fn random_table(rng: &mut ChaCha8Rng, nz: usize, n: usize, n1: usize, n2: usize) -> TableDecoder {
    let table = (0..nz.pow(n as u32))
        .map(|_| match rng.gen_range(0..5) {
            0 => Decision::Blame1,
            1 => Decision::Blame2,
            _ => Decision::Pair(rng.gen_range(0..n1), rng.gen_range(0..n2)),
        })
        .collect();
    TableDecoder { nz, n, table }
}

fn random_words(rng: &mut ChaCha8Rng, count: usize, q: usize, n: usize) -> Vec<Vec<usize>> {
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect()
}

/// Honest error of a randomized code summed directly over encoders, messages and outputs.
fn randomized_honest_oracle(code: &RandomizedCode<TableDecoder>, mac: &Mac) -> f64 {
    let zs = all_sequences(mac.nz, code.n);
    let mut total = 0.0;
    for l1 in 0..code.l1() {
        for l2 in 0..code.l2() {
            let w = code.weights1.probs()[l1] * code.weights2.probs()[l2];
            let dec = code.decoder(l1, l2);
            let (e1, e2) = (&code.encoders1[l1], &code.encoders2[l2]);
            for (m1, x) in e1.iter().enumerate() {
                for (m2, y) in e2.iter().enumerate() {
                    for z in &zs {
                        if dec.decode(z) != Decision::Pair(m1, m2) {
                            total += w * product_channel_prob(mac, x, y, z).unwrap() / (e1.len() * e2.len()) as f64;
                        }
                    }
                }
            }
        }
    }
    total
}

#[test]
fn derandomized_code_errors_match_oracle() {
    let mac = builtin_channel("erasure").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 2;
    let (l1, l2) = (3, 2);
    let decoders = (0..l1 * l2).map(|_| random_table(&mut rng, 3, n, 2, 2)).collect();
    let code = RandomizedCode::new(
        n,
        2,
        2,
        (0..l1).map(|_| random_words(&mut rng, 2, 2, n)).collect(),
        (0..l2).map(|_| random_words(&mut rng, 2, 2, n)).collect(),
        DistributionVector::new(vec![0.5, 0.3, 0.2]).unwrap(),
        DistributionVector::new(vec![0.9, 0.1]).unwrap(),
        decoders,
    )
    .unwrap();
    let rep = derandomize(&code, &mac, 4, DEFAULT_BUDGET).unwrap();
    assert!((rep.before.p_hon - randomized_honest_oracle(&code, &mac)).abs() < 1e-12);
    assert!((rep.after.p_hon - randomized_honest_oracle(&rep.reduced, &mac)).abs() < 1e-12);
    assert_eq!(rep.reduced.l1(), n * n);
    assert_eq!(rep.reduced.l2(), n * n);
    assert!(rep.sampled1.iter().all(|&i| i < l1));
    assert!(rep.sampled2.iter().all(|&i| i < l2));
    let again = derandomize(&code, &mac, 4, DEFAULT_BUDGET).unwrap();
    assert_eq!(again.sampled1, rep.sampled1);
    assert_eq!(again.sampled2, rep.sampled2);
}

#[test]
fn composite_with_exact_prefix_inherits_inner_malicious_error() {
    let mac = Mac::identity(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 2;
    let inner_n = 2;
    let decoders = (0..16).map(|_| random_table(&mut rng, 4, inner_n, 2, 2)).collect();
    let inner = RandomizedCode::new(
        inner_n,
        2,
        2,
        (0..4).map(|_| random_words(&mut rng, 2, 2, inner_n)).collect(),
        (0..4).map(|_| random_words(&mut rng, 2, 2, inner_n)).collect(),
        DistributionVector::uniform(4),
        DistributionVector::uniform(4),
        decoders,
    )
    .unwrap();
    let words: Vec<Vec<usize>> = (0..4).map(|m| sequence_at(m, 2, n)).collect();
    let short = PlainCode::new(2, 2, words.clone(), words).unwrap();
    let short_dec = byzmac_core::codec::FnDecoder(|z: &[usize]| {
        let x = z.iter().fold(0, |a, s| 2 * a + s / 2);
        let y = z.iter().fold(0, |a, s| 2 * a + s % 2);
        Decision::Pair(x, y)
    });
    let (code, dec) = compose_two_phase(&short, short_dec, &inner).unwrap();
    let composite = ExactEvaluator::deterministic(&code, &dec, &mac, DEFAULT_BUDGET)
        .unwrap()
        .report(&Default::default(), DEFAULT_BUDGET)
        .unwrap();
    let inner_rep = ExactEvaluator::randomized(&inner, &mac, DEFAULT_BUDGET)
        .unwrap()
        .report(&Default::default(), DEFAULT_BUDGET)
        .unwrap();
    assert!((composite.p_hon - inner_rep.p_hon).abs() < 1e-12);
    assert!((composite.p_mal1 - inner_rep.p_mal1).abs() < 1e-12);
    assert!((composite.p_mal2 - inner_rep.p_mal2).abs() < 1e-12);
}
