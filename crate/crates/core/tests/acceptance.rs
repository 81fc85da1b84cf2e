//! One check per acceptance criterion. Each prints a single PASS/FAIL line.

use byzmac_core::attack::{converse_bound_eval, max_gap, spoof_output_dists, Attack, SpoofCertificate};
use byzmac_core::classifier::{
    check_overwritable, check_spoofable, check_symmetrizable, spoof_from_overwrite, spoofable_1_problem,
    spoofable_2_problem, symmetrizable_problem, symmetrize_from_spoof, overwritable_problem,
};
use byzmac_core::codec::erasure_example::build_erasure_example_code;
use byzmac_core::codec::eta::eta_search;
use byzmac_core::codec::{
    generate_constant_composition_codebook, Decision, DecoderParams, FiveStepDecoder,
    PlainCode, StepOrder, TypicalityDecoder,
};
use byzmac_core::feasibility::{verify_certificate, Verdict};
use byzmac_core::info::{divergence, entropy, mutual_information, tv_distance, JointDist};
use byzmac_core::mac::{builtin_avmac, builtin_channel, Mac};
use byzmac_core::region::{
    attack_polytope_vertices, avmac_rate_region, erasure_inner_bound_exact, inner_bound_corner, CornerForm,
    SearchConfig,
};
use byzmac_core::seq::{sequence_at, Odometer};
use byzmac_core::sim::{
    exact_error_probabilities, monte_carlo_counts, AdversaryVectors, ExactEvaluator, McCounts, TableDecoder,
};
use byzmac_core::types::{compositions, type_class_size};
use byzmac_core::{DistributionVector, Kernel, User, DEFAULT_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn report(id: u32, name: &str, ok: bool, detail: String, elapsed: Duration) {
    println!("criterion {id} [{}] {name}: {detail} ({:.2?})", if ok { "PASS" } else { "FAIL" }, elapsed);
}

#[test]
fn criterion_1_classification_table() {
    let t = Instant::now();
    let tol = 1e-9;
    let mut problems = Vec::new();
    let erasure = builtin_channel("erasure").unwrap();
    for user in [User::One, User::Two] {
        let s = check_symmetrizable(&erasure, user, tol).unwrap();
        if s.verdict != Verdict::Feasible {
            problems.push(format!("erasure symmetrizable_{} {:?}", user.number(), s.verdict));
        }
        let id = verify_certificate(&symmetrizable_problem(&erasure, user), &[Kernel::identity(2)]).unwrap();
        if id > tol {
            problems.push(format!("erasure identity certificate residual {id:e}"));
        }
        for (what, o) in [
            ("spoofable", check_spoofable(&erasure, user, tol).unwrap()),
            ("overwritable", check_overwritable(&erasure, user, tol).unwrap()),
        ] {
            if o.verdict != Verdict::Infeasible {
                problems.push(format!("erasure {what}_{} {:?}", user.number(), o.verdict));
            }
        }
    }
    let xor = builtin_channel("xor").unwrap();
    for user in [User::One, User::Two] {
        let s = check_spoofable(&xor, user, tol).unwrap();
        if s.verdict != Verdict::Feasible {
            problems.push(format!("xor spoofable_{} {:?}", user.number(), s.verdict));
        }
        let problem = match user {
            User::One => spoofable_1_problem(&xor),
            User::Two => spoofable_2_problem(&xor),
        };
        let cert = SpoofCertificate::uniform(user, 2, 2);
        let r = verify_certificate(&problem, &cert.kernels).unwrap();
        if r > tol {
            problems.push(format!("xor uniform certificate residual {r:e}"));
        }
        let o = check_overwritable(&xor, user, tol).unwrap();
        if o.verdict != Verdict::Infeasible {
            problems.push(format!("xor overwritable_{} {:?}", user.number(), o.verdict));
        }
    }
    let ex3 = builtin_channel("parallel_ex3").unwrap();
    for user in [User::One, User::Two] {
        let s = check_symmetrizable(&ex3, user, tol).unwrap();
        if s.verdict != Verdict::Feasible {
            problems.push(format!("parallel_ex3 symmetrizable_{} {:?}", user.number(), s.verdict));
        }
        let o = check_overwritable(&ex3, user, tol).unwrap();
        if o.verdict != Verdict::Infeasible {
            problems.push(format!("parallel_ex3 overwritable_{} {:?}", user.number(), o.verdict));
        }
    }
    let elapsed = t.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(5);
    report(1, "classification table", ok, format!("{} mismatches {:?}", problems.len(), problems), elapsed);
    assert!(ok);
}

#[test]
fn criterion_2_spoofing_identity() {
    let t = Instant::now();
    let xor = builtin_channel("xor").unwrap();
    let n = 6;
    let code = PlainCode::new(2, 2, vec![sequence_at(5, 2, n), sequence_at(44, 2, n)], vec![sequence_at(17, 2, n), sequence_at(62, 2, n)])
        .unwrap();
    let mut worst_gap: f64 = 0.0;
    let mut worst_uniform: f64 = 0.0;
    for user in [User::One, User::Two] {
        let cert = SpoofCertificate::uniform(user, 2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let d = spoof_output_dists(&code, &xor, &cert, i, j, k, DEFAULT_BUDGET).unwrap();
                    worst_gap = worst_gap.max(max_gap(&d));
                    for v in &d {
                        for &p in v {
                            worst_uniform = worst_uniform.max((p - 1.0 / 64.0).abs());
                        }
                    }
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = worst_gap <= 1e-12 && worst_uniform <= 1e-12 && elapsed < Duration::from_secs(1);
    report(2, "spoofing identity", ok, format!("max gap {worst_gap:e}, max deviation from 2^-6 {worst_uniform:e}"), elapsed);
    assert!(ok);
}

#[test]
fn criterion_3_converse_bound() {
    let t = Instant::now();
    let xor = builtin_channel("xor").unwrap();
    let u = DistributionVector::uniform(2);
    let cb = generate_constant_composition_codebook(&u, &u, 4, 2, 2, 3).unwrap();
    let params = DecoderParams::from_eta(0.25, 0.5).unwrap();
    let dec = TypicalityDecoder::new(cb.clone(), xor.clone(), params, DEFAULT_BUDGET).unwrap();
    let table = TableDecoder::new(&dec, xor.nz, cb.n, DEFAULT_BUDGET).unwrap();
    let cert = SpoofCertificate::uniform(User::One, 2, 2);
    let r = converse_bound_eval(&cb, &table, &xor, &cert, DEFAULT_BUDGET).unwrap();
    let exact = exact_error_probabilities(&cb, &table, &xor, &AdversaryVectors::default(), DEFAULT_BUDGET).unwrap();
    let elapsed = t.elapsed();
    let ok = r.lhs >= 0.25 - 1e-9
        && (r.rhs - 0.25).abs() < 1e-15
        && (r.pe_lower - 1.0 / 12.0).abs() < 1e-15
        && exact.p_e >= 1.0 / 12.0 - 1e-9
        && elapsed < Duration::from_secs(30);
    report(
        3,
        "converse bound",
        ok,
        format!("lhs {:.12} >= rhs {:.12}; measured P_e {:.12} >= 1/12", r.lhs, r.rhs, exact.p_e),
        elapsed,
    );
    assert!(ok);
}

/// Independent rendering of the erasure-code decoding rules.
fn example_rule(z: &[usize]) -> Decision {
    let n = z.len();
    let s: usize = z.iter().sum();
    let has = |v: usize| z.contains(&v);
    match s {
        s if s >= n + 2 => Decision::Blame1,
        s if s + 2 <= n => Decision::Blame2,
        s if s == n + 1 => {
            if has(0) {
                Decision::Blame1
            } else {
                Decision::Blame2
            }
        }
        s if s + 1 == n => {
            if has(2) {
                Decision::Blame2
            } else {
                Decision::Blame1
            }
        }
        _ => match (z.iter().position(|&v| v == 2), z.iter().position(|&v| v == 0)) {
            (Some(i), Some(j)) => Decision::Pair(i, j),
            _ => Decision::Pair(0, 0),
        },
    }
}

#[test]
fn criterion_4_erasure_code() {
    let t = Instant::now();
    let n = 8;
    let erasure = builtin_channel("erasure").unwrap();
    let (code, dec) = build_erasure_example_code(n).unwrap();
    let mut attack = vec![0; n];
    attack[2] = 1;
    attack[5] = 1;
    // Event "no 0 in the output" when user 2 is honest and uniform.
    let mut no_zero = 0.0;
    for y in &code.words2 {
        let z: Vec<usize> = attack.iter().zip(y).map(|(a, b)| a + b).collect();
        if !z.contains(&0) {
            no_zero += 1.0 / n as f64;
        }
    }
    let ev = ExactEvaluator::deterministic(&code, &dec, &erasure, DEFAULT_BUDGET).unwrap();
    let p_attack = ev.malicious_error(User::One, &attack, 0).unwrap();
    // Oracle: all n^2 honest pairs through the noiseless sum channel.
    let mut wrong = 0usize;
    for i in 0..n {
        for j in 0..n {
            let z: Vec<usize> = (0..n).map(|t| usize::from(t == i) + usize::from(t != j)).collect();
            if example_rule(&z) != Decision::Pair(i, j) {
                wrong += 1;
            }
        }
    }
    let oracle = wrong as f64 / (n * n) as f64;
    let p_hon = ev.honest_error();
    let elapsed = t.elapsed();
    let ok = no_zero == 0.25
        && (p_attack - 0.25).abs() <= 1e-12
        && (p_hon - oracle).abs() <= 1e-12
        && p_hon <= 0.25
        && elapsed < Duration::from_secs(1);
    report(
        4,
        "erasure code reproduction",
        ok,
        format!("P(no 0) = {no_zero:.12}, P_mal1(weight-2) = {p_attack:.12}, P_hon = {p_hon:.12} (oracle {oracle:.12})"),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_5_inner_bound_corners() {
    let t = Instant::now();
    let deltas = [0.2, 0.1, 0.05, 0.02, 0.01];
    let limits = [(0.5, 1.0), (1.0, 0.5)];
    let mut monotone = true;
    let mut prev = [f64::INFINITY; 2];
    let mut last = [(0.0, 0.0); 2];
    for &d in &deltas {
        let c = erasure_inner_bound_exact(d).unwrap();
        for k in 0..2 {
            let dist = (c[k].r1 - limits[k].0).abs().max((c[k].r2 - limits[k].1).abs());
            if dist > prev[k] {
                monotone = false;
            }
            prev[k] = dist;
            last[k] = (c[k].r1, c[k].r2);
        }
    }
    let close = (0..2).all(|k| (last[k].0 - limits[k].0).abs() <= 0.02 && (last[k].1 - limits[k].1).abs() <= 0.02);
    let erasure = builtin_channel("erasure").unwrap();
    let p1 = DistributionVector::new(vec![0.45, 0.55]).unwrap();
    let p2 = DistributionVector::new(vec![0.55, 0.45]).unwrap();
    let exact = erasure_inner_bound_exact(0.05).unwrap();
    let mut heur_gap: f64 = 0.0;
    for (form, e) in [(CornerForm::R1Form, exact[0]), (CornerForm::R2Form, exact[1])] {
        let c = inner_bound_corner(&erasure, &p1, &p2, form, &SearchConfig::default()).unwrap();
        heur_gap = heur_gap.max((c.point.r1 - e.r1).abs()).max((c.point.r2 - e.r2).abs());
    }
    let elapsed = t.elapsed();
    let ok = monotone && close && heur_gap <= 1e-3 && elapsed < Duration::from_secs(60);
    report(
        5,
        "inner-bound corners",
        ok,
        format!("monotone {monotone}, delta=0.01 corners {last:?}, heuristic gap {heur_gap:e}"),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_6_outer_bound_polytope() {
    let t = Instant::now();
    let xor = builtin_channel("xor").unwrap();
    let v = attack_polytope_vertices(&xor, DEFAULT_BUDGET).unwrap();
    let id = Kernel::identity(2);
    let flip = Kernel::deterministic(vec![2], 2, |a| 1 - a[0]);
    let xor_ok = v.len() == 2
        && v.iter().all(|a| a.residual <= 1e-9)
        && v.iter().any(|a| a.qx == id && a.qy == id)
        && v.iter().any(|a| a.qx == flip && a.qy == flip);
    let mut counts_ok = true;
    for name in ["erasure", "xor", "not_xor", "identity"] {
        let mac = builtin_channel(name).unwrap();
        let d = mac.nx * mac.nx + mac.ny * mac.ny;
        let verts = attack_polytope_vertices(&mac, DEFAULT_BUDGET).unwrap();
        counts_ok &= verts.len() as u64 <= 1u64 << d && verts.iter().all(|a| a.residual <= 1e-9);
    }
    let av = builtin_avmac("xor_notxor").unwrap();
    let region = avmac_rate_region(&av, 10, 4).unwrap();
    let zero = region.cells.iter().all(|c| c.i1.abs() <= 1e-12 && c.i2.abs() <= 1e-12 && c.i12.abs() <= 1e-12);
    let elapsed = t.elapsed();
    let ok = xor_ok && counts_ok && zero && elapsed < Duration::from_secs(30);
    report(
        6,
        "outer-bound polytope",
        ok,
        format!("xor vertices {}, counts within bound {counts_ok}, Jahn grid all zero {zero} over {} cells", v.len(), region.cells.len()),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_7_decoder_uniqueness() {
    let t = Instant::now();
    let erasure = builtin_channel("erasure").unwrap();
    let comp1 = DistributionVector::new(vec![0.5, 0.5]).unwrap();
    let comp2 = DistributionVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
    let cb = generate_constant_composition_codebook(&comp1, &comp2, 6, 2, 2, 7).unwrap();
    let search = eta_search(&cb, &erasure, 0.3, 1e-4, DEFAULT_BUDGET).unwrap();
    let dec = TypicalityDecoder::new(cb.clone(), erasure.clone(), search.params, DEFAULT_BUDGET).unwrap();
    let five = [StepOrder::Step2First, StepOrder::Step3First]
        .map(|o| FiveStepDecoder::new(cb.clone(), erasure.clone(), search.params, o, DEFAULT_BUDGET).unwrap());
    let mut ambiguous = 0usize;
    let mut non_monotone = 0usize;
    let mut swept = 0usize;
    let mut od = Odometer::new(erasure.nz, 6);
    while od.advance() {
        let z = od.current();
        swept += 1;
        if dec.decode_full(z).is_ambiguous() {
            ambiguous += 1;
        }
        for f in &five {
            if !f.trace(z).is_monotone() {
                non_monotone += 1;
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = swept == 729 && ambiguous == 0 && non_monotone == 0 && elapsed < Duration::from_secs(600);
    report(
        7,
        "decoder uniqueness",
        ok,
        format!("eta {} over {swept} outputs: {ambiguous} ambiguous, {non_monotone} non-monotone traces", search.params.eta),
        elapsed,
    );
    assert!(ok);
}

fn mc_parallel(
    code: &PlainCode,
    dec: &TableDecoder,
    mac: &Mac,
    attacks: &[Attack],
    trials: u64,
    seed: u64,
    workers: u64,
) -> McCounts {
    let chunk = trials.div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(trials)..((w + 1) * chunk).min(trials);
                s.spawn(move || monte_carlo_counts(code, dec, mac, attacks, range, seed).unwrap())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).fold(McCounts::default(), McCounts::merge)
    })
}

#[test]
fn criterion_8_error_identities() {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    // Honest error bounded by the malicious errors on several codes.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut evaluated = 0;
    for trial in 0..12 {
        let name = ["erasure", "xor", "not_xor", "identity"][trial % 4];
        let mac = builtin_channel(name).unwrap();
        let n = 3;
        let words = |q: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
            (0..2).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect()
        };
        let code = PlainCode::new(mac.nx, mac.ny, words(mac.nx, &mut rng), words(mac.ny, &mut rng)).unwrap();
        let table: Vec<Decision> = (0..mac.nz.pow(n as u32))
            .map(|_| match rng.gen_range(0..4) {
                0 => Decision::Blame1,
                1 => Decision::Blame2,
                _ => Decision::Pair(rng.gen_range(0..2), rng.gen_range(0..2)),
            })
            .collect();
        let dec = TableDecoder { nz: mac.nz, n, table };
        let r = exact_error_probabilities(&code, &dec, &mac, &AdversaryVectors::default(), DEFAULT_BUDGET).unwrap();
        if r.p_hon > r.p_mal1 + r.p_mal2 + 1e-12 {
            ok = false;
            lines.push(format!("honest bound violated on {name}: {r:?}"));
        }
        evaluated += 1;
    }
    // Monte Carlo against exact on the erasure code at n = 4 with a noisy
    // attack for each user.
    let erasure = builtin_channel("erasure").unwrap();
    let (cb, special) = build_erasure_example_code(4).unwrap();
    let code = PlainCode::from(&cb);
    let dec = TableDecoder::new(&special, erasure.nz, 4, DEFAULT_BUDGET).unwrap();
    let attacks = vec![
        Attack::DeterministicVector { user: User::One, vector: vec![1, 1, 0, 0] },
        Attack::MemorylessKernel { user: User::Two, kernel: Kernel::new(vec![2], 2, vec![0.7, 0.3, 0.2, 0.8]).unwrap() },
    ];
    let ev = ExactEvaluator::deterministic(&code, &dec, &erasure, DEFAULT_BUDGET).unwrap();
    let exact = [
        ev.honest_error(),
        ev.error_under_distribution(User::One, &attacks[0].vector_distribution(&code, DEFAULT_BUDGET).unwrap(), 0).unwrap(),
        ev.error_under_distribution(User::Two, &attacks[1].vector_distribution(&code, DEFAULT_BUDGET).unwrap(), 0).unwrap(),
    ];
    let trials = 100_000;
    let one = mc_parallel(&code, &dec, &erasure, &attacks, trials, 2024, 1);
    let four = mc_parallel(&code, &dec, &erasure, &attacks, trials, 2024, 4);
    let seven = mc_parallel(&code, &dec, &erasure, &attacks, trials, 2024, 7);
    let (r1, r4, r7) = (one.report(2024), four.report(2024), seven.report(2024));
    let invariant = format!("{r1:?}") == format!("{r4:?}") && format!("{r1:?}") == format!("{r7:?}");
    let hw = r1.half_widths.unwrap();
    let est = [(r1.p_hon, hw.p_hon), (r1.p_mal1, hw.p_mal1), (r1.p_mal2, hw.p_mal2)];
    let agree = est.iter().zip(&exact).all(|((p, h), e)| (p - e).abs() <= 3.0 * h);
    ok &= invariant && agree;
    let elapsed = t.elapsed();
    report(
        8,
        "error-probability identities",
        ok,
        format!(
            "{evaluated} codes checked for P_hon <= P_mal1 + P_mal2; MC {est:?} vs exact {exact:?}; worker invariance {invariant} {}",
            lines.join("; ")
        ),
        elapsed,
    );
    assert!(ok);
}

fn random_dist(rng: &mut ChaCha8Rng, q: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..q).map(|_| rng.gen::<f64>() + if rng.gen_bool(0.2) { 0.0 } else { 0.05 }).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

#[test]
fn criterion_9_property_suites() {
    let t = Instant::now();
    let cases = 128;
    let mut violations = [0usize; 6];
    let names = ["pinsker", "chain rule", "nonnegativity", "type class bounds", "certificate round-trip", "hierarchy constructions"];
    for seed in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Pinsker: D(p||q) >= 2 log2(e) TV(p, q)^2.
        let q = rng.gen_range(2..6);
        let (p, r) = (random_dist(&mut rng, q), random_dist(&mut rng, q));
        let d = divergence(&p, &r).unwrap().finite().unwrap_or(f64::INFINITY);
        let tv = tv_distance(&p, &r).unwrap();
        if d < 2.0 * std::f64::consts::LOG2_E * tv * tv - 1e-12 {
            violations[0] += 1;
        }
        // Chain rule I(A;BC) = I(A;B) + I(A;C|B) and I >= 0.
        let sizes = vec![rng.gen_range(2..4), rng.gen_range(2..4), rng.gen_range(2..4)];
        let joint = JointDist::new(sizes.clone(), random_dist(&mut rng, sizes.iter().product())).unwrap();
        let lhs = mutual_information(&joint, &[0], &[1, 2], &[]).unwrap();
        let rhs = mutual_information(&joint, &[0], &[1], &[]).unwrap() + mutual_information(&joint, &[0], &[2], &[1]).unwrap();
        if (lhs - rhs).abs() > 1e-9 {
            violations[1] += 1;
        }
        let h_direct = entropy(&joint.p);
        let mi = [
            mutual_information(&joint, &[0], &[1], &[2]).unwrap(),
            mutual_information(&joint, &[1], &[2], &[]).unwrap(),
            h_direct,
        ];
        if mi.iter().any(|&v| v < -1e-12) {
            violations[2] += 1;
        }
        // Type-class cardinality bounds.
        let qx = rng.gen_range(2..4);
        let n = rng.gen_range(1..13);
        let comps = compositions(qx, n);
        let counts = &comps[rng.gen_range(0..comps.len())];
        let size = type_class_size(counts).unwrap() as f64;
        let h = entropy(&counts.iter().map(|&c| c as f64 / n as f64).collect::<Vec<_>>());
        let upper = (n as f64 * h).exp2();
        let lower = upper / ((n + 1) as f64).powi(qx as i32);
        if !(size <= upper * (1.0 + 1e-12) && size >= lower * (1.0 - 1e-12)) {
            violations[3] += 1;
        }
        // Certificate round-trip on a spoofable channel W(z|x,y) = V(z|x xor y).
        let v = [random_dist(&mut rng, 3), random_dist(&mut rng, 3)];
        let mac = Mac::from_fn("xor-like", 2, 2, 3, |x, y, z| v[x ^ y][z]).unwrap();
        let user = if seed % 2 == 0 { User::One } else { User::Two };
        let out = check_spoofable(&mac, user, 1e-9).unwrap();
        let problem = match user {
            User::One => spoofable_1_problem(&mac),
            User::Two => spoofable_2_problem(&mac),
        };
        let round_trip = out.verdict == Verdict::Feasible
            && out.certificate.as_ref().is_some_and(|c| verify_certificate(&problem, c).unwrap() <= 1e-9);
        if !round_trip {
            violations[4] += 1;
        }
        // Overwritable => spoofable => symmetrizable by construction, on a
        // channel whose output ignores y (overwritable by user 2) or x.
        let ow_user = if seed % 3 == 0 { User::One } else { User::Two };
        let (nx, ny, nz) = (rng.gen_range(2..4), rng.gen_range(2..4), rng.gen_range(2..4));
        let rows: Vec<Vec<f64>> = (0..nx.max(ny)).map(|_| random_dist(&mut rng, nz)).collect();
        let mac = match ow_user {
            User::Two => Mac::from_fn("x-only", nx, ny, nz, |x, _, z| rows[x][z]).unwrap(),
            User::One => Mac::from_fn("y-only", nx, ny, nz, |_, y, z| rows[y][z]).unwrap(),
        };
        let own = match ow_user {
            User::Two => ny,
            User::One => nx,
        };
        let overwrite = match ow_user {
            User::Two => Kernel::deterministic(vec![nx, ny], nx, |i| i[0]),
            User::One => Kernel::deterministic(vec![nx, ny], ny, |i| i[1]),
        };
        let ow_res = verify_certificate(&overwritable_problem(&mac, ow_user), std::slice::from_ref(&overwrite)).unwrap();
        let q = random_dist(&mut rng, own);
        let spoof = spoof_from_overwrite(&mac, ow_user, &overwrite, &q);
        let sp_problem = match ow_user {
            User::One => spoofable_1_problem(&mac),
            User::Two => spoofable_2_problem(&mac),
        };
        let sp_res = verify_certificate(&sp_problem, &spoof).unwrap();
        let anchor = rng.gen_range(0..if ow_user == User::One { ny } else { nx });
        let sym = symmetrize_from_spoof(&mac, ow_user, &spoof, anchor);
        let sym_res = verify_certificate(&symmetrizable_problem(&mac, ow_user), &[sym]).unwrap();
        if ow_res > 1e-9 || sp_res > 1e-9 || sym_res > 1e-9 {
            violations[5] += 1;
        }
    }
    let elapsed = t.elapsed();
    let ok = violations.iter().all(|&v| v == 0);
    let detail: Vec<String> = names.iter().zip(&violations).map(|(n, v)| format!("{n}: {v}/{cases}")).collect();
    report(9, "property suites", ok, format!("violations {}", detail.join(", ")), elapsed);
    assert!(ok);
}

