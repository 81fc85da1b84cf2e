//! Subcommand implementations. Each returns the JSON result payload and
//! the human-readable summary lines.

use crate::io::{fmt12, load_avmac, load_channel, load_code, parse_dist, LoadedCode};
use anyhow::{bail, Context, Result};
use byzmac_core::attack::{converse_bound_eval, max_gap, spoof_output_dists, Attack, ConverseReport, SpoofCertificate};
use byzmac_core::classifier::{check_spoofable, classify, ClassificationReport};
use byzmac_core::codec::audit::{audit_codebook, PropertyRecord};
use byzmac_core::codec::erasure_example::build_erasure_example_code;
use byzmac_core::codec::eta::{eta_search, EtaSearchReport};
use byzmac_core::codec::{
    decode_feasibility, decode_five_step, generate_constant_composition_codebook, Codebook, Decoder, DecoderParams,
    FiveStepDecoder, StepOrder, TypicalityDecoder,
};
use byzmac_core::feasibility::Verdict;
use byzmac_core::mac::{builtin_channel, User};
use byzmac_core::region::{
    attack_polytope_vertices, avmac_rate_region, erasure_inner_bound_exact, inner_bound_corner, AttackVertex,
    CornerForm, Provenance, RatePoint, RegionSample, SearchConfig,
};
use byzmac_core::sim::{ExactEvaluator, ErrorReport, McCounts, TableDecoder, monte_carlo_counts, AdversaryVectors};
use byzmac_core::{DistributionVector, Mac};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub struct Outcome {
    pub result: Value,
    pub summary: Vec<String>,
    /// Some feasibility verdict was INCONCLUSIVE.
    pub inconclusive: bool,
}

impl Outcome {
    fn new<T: Serialize>(result: &T, summary: Vec<String>) -> Result<Self> {
        Ok(Self { result: serde_json::to_value(result)?, summary, inconclusive: false })
    }
}

pub fn classify_cmd(channel: &str, tol: f64) -> Result<Outcome> {
    let mac = load_channel(channel)?;
    let rep: ClassificationReport = classify(&mac, tol)?;
    let mut summary = vec![format!("channel {} ({}x{} -> {})", mac.label, mac.nx, mac.ny, mac.nz)];
    for (name, o) in rep.outcomes() {
        summary.push(format!("{name}: {} (violation {}, margin {})", o.verdict.as_str(), fmt12(o.violation), fmt12(o.margin)));
    }
    summary.push(format!("hierarchy consistent: {}", rep.hierarchy_consistent));
    summary.extend(rep.notes.iter().cloned());
    let inconclusive = !rep.all_decisive();
    let mut out = Outcome::new(&rep, summary)?;
    out.inconclusive = inconclusive;
    Ok(out)
}

/// Uniform-composition code for commands that accept `--n` instead of `--code`.
fn default_code(mac: &Mac, n: usize, n1: usize, n2: usize, seed: u64) -> Result<Codebook> {
    let c1 = DistributionVector::uniform(mac.nx);
    let c2 = DistributionVector::uniform(mac.ny);
    generate_constant_composition_codebook(&c1, &c2, n, n1, n2, seed)
        .map_err(|e| anyhow::anyhow!("{e}; uniform composition needs n divisible by the alphabet sizes"))
}

fn resolve_code(code: Option<&str>, mac: &Mac, n: usize, seed: u64) -> Result<LoadedCode> {
    match code {
        Some(spec) => load_code(spec),
        None => Ok(LoadedCode { codebook: default_code(mac, n, 2, 2, seed)?, special: None }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpoofTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub max_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AttackDemoReport {
    pub spoofed: User,
    pub verdict: Verdict,
    pub certificate: Option<SpoofCertificate>,
    pub triples: Vec<SpoofTriple>,
    pub max_gap: Option<f64>,
    pub converse: Option<ConverseReport>,
    pub eta: f64,
}

pub struct AttackDemoArgs<'a> {
    pub channel: &'a str,
    pub code: Option<&'a str>,
    pub n: usize,
    pub user: Option<u8>,
    pub eta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub tol: f64,
    pub budget: u128,
}

pub fn attack_demo(a: &AttackDemoArgs) -> Result<Outcome> {
    let mac = load_channel(a.channel)?;
    let code = resolve_code(a.code, &mac, a.n, a.seed)?;
    let cb = &code.codebook;
    let users = match a.user {
        Some(u) => vec![User::from_number(u)?],
        None => vec![User::One, User::Two],
    };
    let mut inconclusive = false;
    let mut chosen = None;
    for &u in &users {
        let o = check_spoofable(&mac, u, a.tol)?;
        inconclusive |= o.verdict == Verdict::Inconclusive;
        if o.verdict == Verdict::Feasible || chosen.is_none() {
            let feasible = o.verdict == Verdict::Feasible;
            chosen = Some((u, o));
            if feasible {
                break;
            }
        }
    }
    let (user, outcome) = chosen.context("no user selected")?;
    let mut summary = vec![format!("spoofable_{}: {}", user.number(), outcome.verdict.as_str())];
    let mut report = AttackDemoReport {
        spoofed: user,
        verdict: outcome.verdict,
        certificate: None,
        triples: Vec::new(),
        max_gap: None,
        converse: None,
        eta: a.eta,
    };
    if let Some(kernels) = outcome.certificate {
        let [k0, k1]: [_; 2] = kernels.try_into().map_err(|_| anyhow::anyhow!("certificate has the wrong number of kernels"))?;
        let cert = SpoofCertificate::new(user, [k0, k1], mac.nx, mac.ny)?;
        let (ni, nk) = match user {
            User::One => (cb.words1.len(), cb.words2.len()),
            User::Two => (cb.words2.len(), cb.words1.len()),
        };
        let mut worst: f64 = 0.0;
        for i in 0..ni {
            for j in 0..ni {
                for k in 0..nk {
                    let g = max_gap(&spoof_output_dists(cb, &mac, &cert, i, j, k, a.budget)?);
                    worst = worst.max(g);
                    report.triples.push(SpoofTriple { i, j, k, max_gap: g });
                }
            }
        }
        summary.push(format!("max spoofing gap over {} triples: {}", report.triples.len(), fmt12(worst)));
        report.max_gap = Some(worst);
        let conv = match &code.special {
            Some(dec) => converse_bound_eval(cb, dec, &mac, &cert, a.budget)?,
            None => {
                let params = DecoderParams::from_eta(a.eta, a.alpha)?;
                let dec = TypicalityDecoder::new(cb.clone(), mac.clone(), params, a.budget)?;
                let table = TableDecoder::new(&dec, mac.nz, cb.n, a.budget)?;
                converse_bound_eval(cb, &table, &mac, &cert, a.budget)?
            }
        };
        summary.push(format!(
            "converse: {} + {} + {} = {} >= {} ({}), P_e >= {}",
            fmt12(conv.p_mal_other),
            fmt12(conv.p_mal_other_swapped),
            fmt12(conv.p_mal_spoofed),
            fmt12(conv.lhs),
            fmt12(conv.rhs),
            if conv.holds { "holds" } else { "VIOLATED" },
            fmt12(conv.pe_lower)
        ));
        report.certificate = Some(cert);
        report.converse = Some(conv);
    } else {
        summary.push("no spoofing certificate; nothing to demonstrate".into());
    }
    let mut out = Outcome::new(&report, summary)?;
    out.inconclusive = inconclusive;
    Ok(out)
}

pub struct DecodeArgs<'a> {
    pub channel: &'a str,
    pub code: &'a str,
    pub received: &'a [usize],
    pub eta: f64,
    pub alpha: f64,
    pub five_step: bool,
    pub order: StepOrder,
    pub budget: u128,
}

pub fn decode(a: &DecodeArgs) -> Result<Outcome> {
    let mac = load_channel(a.channel)?;
    let code = load_code(a.code)?;
    let params = DecoderParams::from_eta(a.eta, a.alpha)?;
    if a.five_step {
        let trace = decode_five_step(&code.codebook, &mac, a.received, &params, a.order, a.budget)?;
        let summary = vec![
            format!("A1 {:?} B1 {:?}", trace.a1, trace.b1),
            format!("A2 {:?} B2 {:?}", trace.a2, trace.b2),
            format!("A3 {:?} B3 {:?}", trace.a3, trace.b3),
            format!("decision {:?} (fallback {:?})", trace.output.decision, trace.output.fallback),
        ];
        return Outcome::new(&trace, summary);
    }
    let out = decode_feasibility(&code.codebook, &mac, a.received, &params, a.budget)?;
    let summary = vec![
        format!("D1 {:?} D2 {:?}", out.d1, out.d2),
        format!("decision {:?} (fallback {:?})", out.decision, out.fallback),
    ];
    Outcome::new(&out, summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DecoderKind {
    /// The code's own decoder when it has one, otherwise typicality.
    Auto,
    Typicality,
    FiveStep,
}

fn build_table(code: &LoadedCode, mac: &Mac, kind: DecoderKind, params: DecoderParams, order: StepOrder, budget: u128) -> Result<TableDecoder> {
    let cb = &code.codebook;
    let dec: Box<dyn Decoder> = match (kind, &code.special) {
        (DecoderKind::Auto, Some(d)) => Box::new(d.clone()),
        (DecoderKind::Auto | DecoderKind::Typicality, _) => Box::new(TypicalityDecoder::new(cb.clone(), mac.clone(), params, budget)?),
        (DecoderKind::FiveStep, _) => Box::new(FiveStepDecoder::new(cb.clone(), mac.clone(), params, order, budget)?),
    };
    Ok(TableDecoder::new(dec.as_ref(), mac.nz, cb.n, budget)?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AttackError {
    pub attack: Attack,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulationReport {
    pub report: ErrorReport,
    /// Exact error under each supplied attack.
    pub attacks: Vec<AttackError>,
    pub workers: usize,
}

pub struct SimulateArgs<'a> {
    pub channel: &'a str,
    pub code: &'a str,
    pub exact: bool,
    pub trials: Option<u64>,
    pub seed: u64,
    pub adversary: Option<&'a str>,
    pub decoder: DecoderKind,
    pub eta: f64,
    pub alpha: f64,
    pub order: StepOrder,
    pub workers: usize,
    pub budget: u128,
}

pub fn load_attacks(path: Option<&str>) -> Result<Vec<Attack>> {
    let Some(path) = path else { return Ok(Vec::new()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing adversary file {path}"))?;
    Ok(match value {
        Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    })
}

/// Splits `0..trials` into `workers` contiguous ranges run on threads.
pub fn parallel_counts<D: Decoder + ?Sized>(
    code: &Codebook,
    dec: &D,
    mac: &Mac,
    attacks: &[Attack],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<McCounts> {
    let workers = workers.max(1) as u64;
    let chunk = trials.div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(trials)..((w + 1) * chunk).min(trials);
                s.spawn(move || monte_carlo_counts(code, dec, mac, attacks, range, seed))
            })
            .collect();
        let mut total = McCounts::default();
        for h in handles {
            total = total.merge(h.join().map_err(|_| anyhow::anyhow!("worker panicked"))??);
        }
        Ok(total)
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let mac = load_channel(a.channel)?;
    let code = load_code(a.code)?;
    let params = DecoderParams::from_eta(a.eta, a.alpha)?;
    let table = build_table(&code, &mac, a.decoder, params, a.order, a.budget)?;
    let attacks = load_attacks(a.adversary)?;
    let cb = &code.codebook;
    let report = match (a.exact, a.trials) {
        (true, None) => ExactEvaluator::deterministic(cb, &table, &mac, a.budget)?.report(&AdversaryVectors::default(), a.budget)?,
        (false, Some(t)) => {
            if t == 0 {
                bail!("--trials must be at least 1");
            }
            parallel_counts(cb, &table, &mac, &attacks, t, a.seed, a.workers)?.report(a.seed)
        }
        _ => bail!("choose exactly one of --exact and --trials"),
    };
    let mut per_attack = Vec::new();
    if !attacks.is_empty() {
        let ev = ExactEvaluator::deterministic(cb, &table, &mac, a.budget)?;
        for at in &attacks {
            let dist = at.vector_distribution(cb, a.budget)?;
            per_attack.push(AttackError { attack: at.clone(), error: ev.error_under_distribution(at.user(), &dist, 0)? });
        }
    }
    let mut summary = vec![format!("mode {:?}", report.mode)];
    let hw = report.half_widths;
    for (name, p, h) in [
        ("P_hon", report.p_hon, hw.map(|h| h.p_hon)),
        ("P_mal1", report.p_mal1, hw.map(|h| h.p_mal1)),
        ("P_mal2", report.p_mal2, hw.map(|h| h.p_mal2)),
        ("P_e", report.p_e, None),
    ] {
        match h {
            Some(h) => summary.push(format!("{name} = {} +- {}", fmt12(p), fmt12(h))),
            None => summary.push(format!("{name} = {}", fmt12(p))),
        }
    }
    for ae in &per_attack {
        summary.push(format!("exact error under user-{} attack: {}", ae.attack.user().number(), fmt12(ae.error)));
    }
    Outcome::new(&SimulationReport { report, attacks: per_attack, workers: a.workers.max(1) }, summary)
}

pub fn codebook_gen(comp1: &str, comp2: &str, n: usize, n1: usize, n2: usize, seed: u64) -> Result<(Codebook, Outcome)> {
    let cb = generate_constant_composition_codebook(&parse_dist(comp1)?, &parse_dist(comp2)?, n, n1, n2, seed)?;
    let summary = vec![format!("generated {}x{} code at n = {n}", n1, n2)];
    let out = Outcome::new(&cb, summary)?;
    Ok((cb, out))
}

pub fn codebook_audit(code: &str, epsilon: f64, budget: u128) -> Result<Outcome> {
    let cb = load_code(code)?.codebook;
    let records: Vec<PropertyRecord> = audit_codebook(&cb, epsilon, budget)?;
    let summary = records
        .iter()
        .map(|r| {
            format!(
                "{:>4}: {:?} lhs {} bound {} ({} active, {} violations)",
                r.property,
                r.status,
                fmt12(r.lhs),
                fmt12(r.threshold),
                r.active_instances,
                r.violations
            )
        })
        .collect();
    Outcome::new(&records, summary)
}

pub fn codebook_eta_search(channel: &str, code: &str, alpha: f64, min_eta: f64, budget: u128) -> Result<Outcome> {
    let mac = load_channel(channel)?;
    let cb = load_code(code)?.codebook;
    let rep: EtaSearchReport = eta_search(&cb, &mac, alpha, min_eta, budget)?;
    let mut summary: Vec<String> =
        rep.history.iter().map(|(eta, s)| format!("eta {}: {} ambiguous of {} outputs", fmt12(*eta), s.ambiguous, s.outputs)).collect();
    summary.push(format!("chosen eta {}", fmt12(rep.params.eta)));
    Outcome::new(&rep, summary)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InnerReport {
    pub sample: RegionSample,
    pub flag: String,
    pub lower_bounds: Vec<[f64; 2]>,
}

pub fn region_inner(channel: &str, comp1: &str, comp2: &str, cfg: &SearchConfig) -> Result<Outcome> {
    let mac = load_channel(channel)?;
    let (p1, p2) = (parse_dist(comp1)?, parse_dist(comp2)?);
    let mut points = Vec::new();
    let mut lower = Vec::new();
    let mut flag = String::new();
    let mut summary = Vec::new();
    for form in [CornerForm::R1Form, CornerForm::R2Form] {
        let c = inner_bound_corner(&mac, &p1, &p2, form, cfg)?;
        summary.push(format!("{form:?}: ({}, {}) [{}]", fmt12(c.point.r1), fmt12(c.point.r2), c.flag));
        points.push(c.point);
        lower.push(c.lower_bounds);
        flag = c.flag.to_string();
    }
    let mut parameters: Vec<(String, f64)> = Vec::new();
    for (i, p) in p1.probs().iter().enumerate() {
        parameters.push((format!("p1_{i}"), *p));
    }
    for (i, p) in p2.probs().iter().enumerate() {
        parameters.push((format!("p2_{i}"), *p));
    }
    let sample = RegionSample { provenance: Provenance::InnerCorner1, parameters, points, cells: Vec::new() };
    Outcome::new(&InnerReport { sample, flag, lower_bounds: lower }, summary)
}

pub fn region_erasure_exact(deltas: &[f64]) -> Result<Outcome> {
    let mut samples = Vec::new();
    let mut summary = vec!["delta, corner1 (r1, r2), corner2 (r1, r2)".to_string()];
    for &d in deltas {
        let [c1, c2] = erasure_inner_bound_exact(d)?;
        summary.push(format!("{}, ({}, {}), ({}, {})", fmt12(d), fmt12(c1.r1), fmt12(c1.r2), fmt12(c2.r1), fmt12(c2.r2)));
        for (prov, c) in [(Provenance::InnerCorner1, c1), (Provenance::InnerCorner2, c2)] {
            samples.push(RegionSample { provenance: prov, parameters: vec![("delta".into(), d)], points: vec![c], cells: Vec::new() });
        }
    }
    Outcome::new(&samples, summary)
}

pub fn region_polytope(channel: &str, budget: u128) -> Result<Outcome> {
    let mac = load_channel(channel)?;
    let v: Vec<AttackVertex> = attack_polytope_vertices(&mac, budget)?;
    let d = mac.nx * mac.nx + mac.ny * mac.ny;
    let mut summary = vec![format!("{} vertices (bound 2^{d})", v.len())];
    for (i, a) in v.iter().enumerate() {
        summary.push(format!("vertex {i}: Qx {:?} Qy {:?} residual {}", a.qx.k, a.qy.k, fmt12(a.residual)));
    }
    Outcome::new(&v, summary)
}

pub fn region_jahn(channel: &str, input_res: usize, state_res: usize) -> Result<Outcome> {
    let av = load_avmac(channel)?;
    let sample = avmac_rate_region(&av, input_res, state_res)?;
    let best = sample.cells.iter().fold((0.0f64, 0.0f64, 0.0f64), |m, c| (m.0.max(c.i1), m.1.max(c.i2), m.2.max(c.i12)));
    let summary = vec![
        format!("{} grid cells", sample.cells.len()),
        format!("max I1 {}, max I2 {}, max I12 {}", fmt12(best.0), fmt12(best.1), fmt12(best.2)),
    ];
    Outcome::new(&sample, summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Example {
    #[value(name = "erasure-2n")]
    Erasure2n,
    SpoofUniform,
    InnerCorners,
    #[value(name = "converse-112")]
    Converse112,
}

pub fn reproduce(which: Example, n: Option<usize>, budget: u128) -> Result<Outcome> {
    match which {
        Example::Erasure2n => {
            let n = n.unwrap_or(8);
            let mac = builtin_channel("erasure")?;
            let (cb, dec) = build_erasure_example_code(n)?;
            let mut vector = vec![0; n];
            vector[0] = 1;
            vector[1 % n] = 1;
            let no_zero = cb
                .words2
                .iter()
                .filter(|y| !vector.iter().zip(y.iter()).any(|(a, b)| a + b == 0))
                .count() as f64
                / cb.words2.len() as f64;
            let ev = ExactEvaluator::deterministic(&cb, &dec, &mac, budget)?;
            let p_attack = ev.malicious_error(User::One, &vector, 0)?;
            let p_hon = ev.honest_error();
            let summary = vec![
                fmt12(no_zero),
                format!("P(no 0 in output | weight-2 attack) = {} (2/n = {})", fmt12(no_zero), fmt12(2.0 / n as f64)),
                format!("exact error under the attack = {}", fmt12(p_attack)),
                format!("honest error = {}", fmt12(p_hon)),
            ];
            Outcome::new(&json!({"n": n, "attack_vector": vector, "p_no_zero": no_zero, "p_attack": p_attack, "p_hon": p_hon}), summary)
        }
        Example::SpoofUniform => {
            let n = n.unwrap_or(6);
            let mac = builtin_channel("xor")?;
            let cb = default_code(&mac, n, 2, 2, 0)?;
            let mut worst: f64 = 0.0;
            let mut dev: f64 = 0.0;
            let uniform = 0.5f64.powi(n as i32);
            for user in [User::One, User::Two] {
                let cert = SpoofCertificate::uniform(user, 2, 2);
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            let d = spoof_output_dists(&cb, &mac, &cert, i, j, k, budget)?;
                            worst = worst.max(max_gap(&d));
                            dev = d.iter().flatten().fold(dev, |m, p| m.max((p - uniform).abs()));
                        }
                    }
                }
            }
            let summary = vec![
                format!("max gap {}", fmt12(worst)),
                format!("max deviation from 2^-{n}: {}", fmt12(dev)),
            ];
            Outcome::new(&json!({"n": n, "max_gap": worst, "max_uniform_deviation": dev}), summary)
        }
        Example::InnerCorners => {
            let mut rows = Vec::new();
            let mut summary = vec!["delta, corner1, corner2".to_string()];
            for d in [0.2, 0.1, 0.05, 0.02, 0.01] {
                let [c1, c2] = erasure_inner_bound_exact(d)?;
                summary.push(format!("{}, ({}, {}), ({}, {})", fmt12(d), fmt12(c1.r1), fmt12(c1.r2), fmt12(c2.r1), fmt12(c2.r2)));
                rows.push(json!({"delta": d, "corners": [c1, c2]}));
            }
            let mac = builtin_channel("erasure")?;
            let p1 = DistributionVector::new(vec![0.45, 0.55])?;
            let p2 = DistributionVector::new(vec![0.55, 0.45])?;
            let mut heuristic: Vec<RatePoint> = Vec::new();
            for form in [CornerForm::R1Form, CornerForm::R2Form] {
                heuristic.push(inner_bound_corner(&mac, &p1, &p2, form, &SearchConfig::default())?.point);
            }
            summary.push(format!(
                "heuristic at delta 0.05: ({}, {}), ({}, {})",
                fmt12(heuristic[0].r1),
                fmt12(heuristic[0].r2),
                fmt12(heuristic[1].r1),
                fmt12(heuristic[1].r2)
            ));
            Outcome::new(&json!({"exact": rows, "heuristic_delta_0_05": heuristic}), summary)
        }
        Example::Converse112 => {
            let n = n.unwrap_or(4);
            let mac = builtin_channel("xor")?;
            let cb = default_code(&mac, n, 2, 2, 3)?;
            let params = DecoderParams::from_eta(0.25, 0.5)?;
            let dec = TypicalityDecoder::new(cb.clone(), mac.clone(), params, budget)?;
            let table = TableDecoder::new(&dec, mac.nz, n, budget)?;
            let conv = converse_bound_eval(&cb, &table, &mac, &SpoofCertificate::uniform(User::One, 2, 2), budget)?;
            let full = ExactEvaluator::deterministic(&cb, &table, &mac, budget)?.report(&AdversaryVectors::default(), budget)?;
            let summary = vec![
                format!("chain {} >= {}: {}", fmt12(conv.lhs), fmt12(conv.rhs), conv.holds),
                format!("P_e >= {}", fmt12(conv.pe_lower)),
                format!("measured P_e = {}", fmt12(full.p_e)),
            ];
            Outcome::new(&json!({"converse": conv, "measured": full}), summary)
        }
    }
}
