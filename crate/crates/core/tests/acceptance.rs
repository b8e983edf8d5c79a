//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! straight to stderr (bypassing output capture) before asserting.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::RngCore;
use vote_sim::adversary::{AdversarySpec, Strategy};
use vote_sim::channels::{ChannelKind, PartyId, Role};
use vote_sim::harness::{run_experiment, verify_accounting, BallotSpec, ExperimentConfig};
use vote_sim::primitives::{
    distributed_bit_equality, equality_contribution, equality_results, reconstruct, share_bits, ShareVector,
    VoteEncryption,
};
use vote_sim::protocols::{ballots_from_choices, run_protocol, FailureCause, ProtocolKind};
use vote_sim::tally::{decode_count, decode_tolerance, DecoderTable};
use vote_sim::{BitString, ProtocolConfig, TransportKind};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let line = format!(
        "acceptance {id:>2} {:<4} {name}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t <= limit, format!("{:.2}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
}

/// Closed form, independent of the recurrence in the library.
fn closed_form(v: usize, n: usize) -> f64 {
    (1.0 - (1.0 - 2.0 / n as f64).powi(v as i32)) / 2.0
}

#[test]
fn criterion_01_recurrence_matches_closed_form() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut exact_ends = true;
    for n in 3..=200 {
        let table = DecoderTable::new(n).unwrap();
        let p = table.probs();
        assert_eq!(p.len(), n + 1);
        exact_ends &= p[0] == 0.0 && p[1] == 1.0 / n as f64;
        for (v, &pv) in p.iter().enumerate() {
            worst = worst.max((pv - closed_form(v, n)).abs());
        }
    }
    let (fast, time) = within(start, Duration::from_secs(1));
    let pass = worst <= 1e-12 && exact_ends && fast;
    report(1, "decoder recurrence", pass, format!("max error {worst:.2e}, p0/p1 exact {exact_ends}, {time}"));
    assert!(pass);
}

#[test]
fn criterion_02_gap_identity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for n in 3..=200 {
        let table = DecoderTable::new(n).unwrap();
        let p = table.probs();
        for v in 0..n {
            worst = worst.max(((p[v + 1] - p[v]) - (1.0 - 2.0 * p[v]) / n as f64).abs());
            monotone &= p[v + 1] > p[v];
        }
    }
    let (fast, time) = within(start, Duration::from_secs(1));
    let pass = worst <= 1e-12 && monotone && fast;
    report(2, "gap identity", pass, format!("max error {worst:.2e}, monotone {monotone}, {time}"));
    assert!(pass);
}

#[test]
fn criterion_03_window_overlap_at_four() {
    let n = 4;
    let tol = decode_tolerance(n);
    let table = DecoderTable::new(n).unwrap();
    let (p3, p4) = (closed_form(3, n), closed_form(4, n));
    let overlap = p4 - tol < p3 + tol;
    let diagnosed = table.overlapping_windows().contains(&(3, 4));
    let decodes = (0..=n).all(|v| decode_count(closed_form(v, n), n) == Some(v));
    let pass = overlap && diagnosed && decodes;
    report(
        3,
        "window overlap n=4",
        pass,
        format!("windows 3/4 overlap {overlap}, reported {diagnosed}, centers decode {decodes}"),
    );
    assert!(pass);
}

fn honest_grid(protocol: ProtocolKind, authorities: usize) -> ExperimentConfig {
    ExperimentConfig::new(protocol, ProtocolConfig::new(4, 2, authorities, 500), BallotSpec::Uniform)
        .with_trials(100)
        .with_seed(40_000)
}

#[test]
fn criterion_04_protocol1_honest_correctness() {
    let start = Instant::now();
    let (summary, records) = run_experiment(&honest_grid(ProtocolKind::Basic, 1)).unwrap();
    let mixed = records
        .iter()
        .filter(|r| r.ballots.iter().collect::<BTreeSet<_>>().len() > 1)
        .count();
    let (fast, time) = within(start, Duration::from_secs(60));
    let pass = summary.exact >= 99 && summary.wrong_unfailed == 0 && fast;
    report(
        4,
        "protocol 1 honest",
        pass,
        format!(
            "exact {}/100, wrong-unfailed {}, mixed ballots in {mixed} trials, {time}",
            summary.exact, summary.wrong_unfailed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_protocol2_equivalence() {
    let start = Instant::now();
    let (_, basic) = run_experiment(&honest_grid(ProtocolKind::Basic, 1)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in 1..=3 {
        let (summary, records) = run_experiment(&honest_grid(ProtocolKind::Authority, r)).unwrap();
        let disagreements = summary.failure_causes.get("disagreement").copied().unwrap_or(0);
        // Same seeds give the same vote matrices, hence the same public parities.
        let same_tallies = records.iter().zip(&basic).all(|(a, b)| a.run.tally == b.run.tally);
        pass &= summary.exact >= 99 && summary.wrong_unfailed == 0 && disagreements == 0 && same_tallies;
        parts.push(format!(
            "r={r}: exact {}/100, disagreements {disagreements}, tallies equal to protocol 1 {same_tallies}",
            summary.exact
        ));
    }
    let (fast, time) = within(start, Duration::from_secs(60));
    pass &= fast;
    report(5, "protocol 2 equivalence", pass, format!("{}; {time}", parts.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_06_robustness_failures() {
    let voter = PartyId::voter(1);
    let noise = honest_grid(ProtocolKind::Basic, 1)
        .with_adversary(AdversarySpec::new(voter, Strategy::Noise { rate: 0.5 }).unwrap());
    let (noise, _) = run_experiment(&noise).unwrap();

    let double = honest_grid(ProtocolKind::Basic, 1)
        .with_seed(60_000)
        .with_adversary(AdversarySpec::new(voter, Strategy::DoubleVoter).unwrap());
    let (_, records) = run_experiment(&double).unwrap();
    let decoded: Vec<_> = records
        .iter()
        .filter(|r| r.run.failure_cause != Some(FailureCause::NoDecode))
        .collect();
    let mismatched = decoded
        .iter()
        .filter(|r| r.run.failure_cause == Some(FailureCause::SumMismatch))
        .count();
    let enough = decoded.len() >= 50;
    let pass = noise.failures >= 99 && enough && mismatched * 100 >= 99 * decoded.len();
    report(
        6,
        "robustness",
        pass,
        format!(
            "noise(0.5) failures {}/100; double-voter sum-mismatch {mismatched}/{} decoded trials",
            noise.failures,
            decoded.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_cut_and_choose() {
    let start = Instant::now();
    let cheat = PartyId::voter(1);
    let spec = AdversarySpec::new(cheat, Strategy::UnequalCopier).unwrap();
    let base = ExperimentConfig::new(ProtocolKind::Verified, ProtocolConfig::new(3, 2, 2, 2), BallotSpec::Uniform)
        .with_adversary(spec.clone());

    let trials = 100_000;
    let (summary, _) = run_experiment(&base.clone().with_trials(trials).with_seed(70_000)).unwrap();
    let escape = 1.0 - summary.revocation_rate(cheat);
    let p = 1.0 / 6.0;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    let z = (escape - p) / se;

    let mut strict = base.with_trials(100).with_seed(71_000);
    strict.params.security = 8;
    let (strict, _) = run_experiment(&strict).unwrap();
    let caught = strict.revocations.get(&cheat).copied().unwrap_or(0);

    let (fast, time) = within(start, Duration::from_secs(300));
    let pass = z.abs() <= 3.0 && caught == 100 && fast;
    report(
        7,
        "cut-and-choose",
        pass,
        format!("s=2 escape {escape:.4} (z = {z:+.2} vs 1/6), s=8 revoked {caught}/100, {time}"),
    );
    assert!(pass);
}

/// Replays a fixed sequence of words.
struct Tape(Vec<u64>, usize);

impl RngCore for Tape {
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }
    fn next_u64(&mut self) -> u64 {
        let w = self.0[self.1];
        self.1 += 1;
        w
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let w = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// Distribution of the shares with indices in `seen` when a single bit is
/// split `r` ways, over every random tape.
fn seen_distribution(value: bool, r: usize, seen: &[usize]) -> BTreeMap<Vec<bool>, usize> {
    let mut hist = BTreeMap::new();
    for tape in 0..1u64 << (r - 1) {
        let words = (0..r - 1).map(|i| (tape >> i) & 1).collect();
        let shares = share_bits(&BitString::from_bits([value]), r, &mut Tape(words, 0)).unwrap();
        let key = seen.iter().map(|&i| shares[i].get(0)).collect();
        *hist.entry(key).or_insert(0) += 1;
    }
    hist
}

#[test]
fn criterion_08_share_privacy() {
    let start = Instant::now();
    // Any 2 of 3 shares: every pattern exactly once, for both values.
    let mut pairs_uniform = true;
    for seen in [[0, 1], [0, 2], [1, 2]] {
        for value in [false, true] {
            let hist = seen_distribution(value, 3, &seen);
            pairs_uniform &= hist.len() == 4 && hist.values().all(|&c| c == 1);
        }
    }

    // Protocol 1, n = 3, m = 2, s = 1, voter 1 honest, voters 2 and 3 observing.
    // The coalition's view of the casting phase is (a) the message metadata
    // and (b) two of voter 1's three shares. Sharing acts on each of the 18
    // coordinates with its own random bits, so the joint distribution of (b)
    // is the product of the per-coordinate distributions checked above,
    // uniform for every vote matrix and thus for both ballots. The
    // coordinate-wise structure and the metadata are checked against the
    // real implementation here.
    let cfg = ProtocolConfig::new(3, 2, 1, 1);
    let len = cfg.vote_bits();
    let mut coordinatewise = true;
    let mut rng = rand::thread_rng();
    for _ in 0..500 {
        let vote = BitString::random(len, &mut rng);
        let words: Vec<u64> = (0..2).map(|_| rng.next_u64()).collect();
        let whole = share_bits(&vote, 3, &mut Tape(words.clone(), 0)).unwrap();
        for j in 0..len {
            let bit_tape = words.iter().map(|w| (w >> j) & 1).collect();
            let single = share_bits(&BitString::from_bits([vote.get(j)]), 3, &mut Tape(bit_tape, 0)).unwrap();
            coordinatewise &= (0..3).all(|k| whole[k].get(j) == single[k].get(0));
        }
    }

    let coalition = [PartyId::voter(2), PartyId::voter(3)];
    let mut metadata_equal = true;
    let mut share_views_match = true;
    for seed in 0..50 {
        let views: Vec<_> = [1, 2]
            .iter()
            .map(|&choice| {
                let out =
                    run_protocol(ProtocolKind::Basic, &cfg, &ballots_from_choices(&[choice, 2, 1]), &[], seed).unwrap();
                let cast = out.transcript.events().iter().take_while(|e| e.phase == "cast").count();
                out.transcript.view_prefix(&coalition, cast)
            })
            .collect();
        let meta = |v: &Vec<vote_sim::channels::ViewEvent>| {
            v.iter()
                .map(|e| (e.phase.clone(), e.kind, e.sender, e.receivers.clone(), e.bits, e.payload.is_some()))
                .collect::<Vec<_>>()
        };
        metadata_equal &= meta(&views[0]) == meta(&views[1]);
        // What voters 2 and 3 send depends only on their own ballots and randomness.
        let own = |v: &Vec<vote_sim::channels::ViewEvent>| {
            v.iter()
                .filter(|e| e.sender != Some(PartyId::voter(1)))
                .map(|e| e.payload.clone())
                .collect::<Vec<_>>()
        };
        share_views_match &= own(&views[0]) == own(&views[1]);
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    let pass = pairs_uniform && coordinatewise && metadata_equal && share_views_match && fast;
    report(
        8,
        "share privacy",
        pass,
        format!(
            "2-of-3 uniform {pairs_uniform}, coordinate-wise sharing {coordinatewise}, \
             cast metadata equal {metadata_equal}, coalition inputs unchanged {share_views_match}, {time}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_equality_oracle() {
    let mut matches = true;
    let mut xor_only = true;
    let mut checked = 0usize;
    for r in 1..=4 {
        let bits = |x: u32| -> Vec<bool> { (0..r).map(|i| (x >> i) & 1 == 1).collect() };
        // Transcript histogram keyed by the two reconstructed values.
        let mut by_values: BTreeMap<(bool, bool), BTreeMap<Vec<bool>, usize>> = BTreeMap::new();
        for x in 0..1u32 << r {
            for y in 0..1u32 << r {
                let (a, b) = (ShareVector::new(bits(x)), ShareVector::new(bits(y)));
                let out = distributed_bit_equality(&a, &b, |c| c.into_iter().map(Some).collect()).unwrap();
                let (va, vb) = (reconstruct(&a).unwrap(), reconstruct(&b).unwrap());
                matches &= out.equal == (va == vb);

                let sa: Vec<BitString> = a.shares().iter().map(|&s| BitString::from_bits([s])).collect();
                let sb: Vec<BitString> = b.shares().iter().map(|&s| BitString::from_bits([s])).collect();
                let published: Vec<BitString> =
                    sa.iter().zip(&sb).map(|(p, q)| equality_contribution(p, q)).collect();
                matches &= equality_results(&published).unwrap().get(0) == (va == vb);

                *by_values.entry((va, vb)).or_default().entry(out.revealed).or_insert(0) += 1;
                checked += 1;
            }
        }
        xor_only &= by_values[&(false, false)] == by_values[&(true, true)];
        xor_only &= by_values[&(false, true)] == by_values[&(true, false)];
    }
    let pass = matches && xor_only;
    report(
        9,
        "equality oracle",
        pass,
        format!("{checked} assignments, matches reconstruction {matches}, transcript depends on a^b only {xor_only}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_transport_equivalence() {
    let ballots = ballots_from_choices(&[1, 2, 2, 1]);
    let mut same = 0;
    let mut total = 0;
    for kind in ProtocolKind::ALL {
        for seed in 0..20 {
            let base = ProtocolConfig::new(4, 2, 2, 120);
            let run = |t: TransportKind| run_protocol(kind, &base.with_transport(t), &ballots, &[], seed).unwrap();
            let (a, b) = (run(TransportKind::Memory), run(TransportKind::CommitReveal));
            total += 1;
            if a.result == b.result && a.revoked == b.revoked && a.failure_cause == b.failure_cause {
                same += 1;
            }
        }
    }
    let pass = same == total;
    report(10, "transport equivalence", pass, format!("{same}/{total} runs identical"));
    assert!(pass);
}

#[test]
fn criterion_11_accounting_grid() {
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut formulas = true;
    for n in 3..=6 {
        for m in 2..=3 {
            for r in 1..=3 {
                for s in 1..=4 {
                    let cfg = ProtocolConfig::new(n, m, r, s);
                    let choices: Vec<usize> = (0..n).map(|i| i % m + 1).collect();
                    let ballots = ballots_from_choices(&choices);
                    let vote = m * n * n * s;
                    for kind in ProtocolKind::ALL {
                        let out = run_protocol(kind, &cfg, &ballots, &[], (n * 1000 + m * 100 + r * 10 + s) as u64)
                            .unwrap();
                        runs += 1;
                        if !verify_accounting(&out.to_record()).pass {
                            failures.push(format!("{kind} n={n} m={m} r={r} s={s}"));
                        }
                        // Per-pair sizes recomputed straight from the transcript.
                        for e in out.transcript.events() {
                            let from_voter = e.sender.map(|p| p.role == Role::Voter);
                            match (kind, e.phase.as_str(), e.kind) {
                                (ProtocolKind::Authority, "cast", ChannelKind::Private) => formulas &= e.bits == vote,
                                (ProtocolKind::Verified, "distribute", ChannelKind::Private) => {
                                    formulas &= from_voter == Some(true) && e.bits == 2 * s * vote
                                }
                                (ProtocolKind::Verified, "equality", ChannelKind::SimultaneousBroadcast) => {
                                    formulas &= e.bits == n * (s - 1) * vote
                                }
                                (ProtocolKind::Verified, "reveal-perm", ChannelKind::Broadcast) => {
                                    formulas &= e.bits == s * VoteEncryption::encoded_bits(m, n * n * s)
                                }
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
    let pass = failures.is_empty() && formulas;
    report(
        11,
        "accounting grid",
        pass,
        format!("{}/{runs} runs pass, per-pair formulas hold {formulas}", runs - failures.len()),
    );
    assert!(pass, "accounting failed for {failures:?}");
}

#[test]
fn criterion_12_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ExperimentConfig::new(ProtocolKind::Basic, ProtocolConfig::new(4, 2, 1, 40), BallotSpec::Uniform)
            .with_adversary(AdversarySpec::new(PartyId::voter(2), Strategy::Noise { rate: 0.3 }).unwrap()),
        ExperimentConfig::new(
            ProtocolKind::Verified,
            ProtocolConfig::new(3, 2, 2, 3).with_transport(TransportKind::CommitReveal),
            BallotSpec::Uniform,
        )
        .with_adversary(AdversarySpec::new(PartyId::voter(1), Strategy::UnequalCopier).unwrap()),
    ];
    let mut identical = true;
    let mut bytes = 0;
    for (c, cfg) in configs.iter().enumerate() {
        let mut outputs = Vec::new();
        for workers in [1, 2, 8] {
            let path = dir.path().join(format!("c{c}-w{workers}.jsonl"));
            let mut cfg = cfg.clone().with_trials(60).with_seed(12_000).with_workers(workers);
            cfg.out = Some(path.clone());
            run_experiment(&cfg).unwrap();
            outputs.push(std::fs::read(&path).unwrap());
        }
        bytes += outputs[0].len();
        identical &= !outputs[0].is_empty() && outputs.windows(2).all(|w| w[0] == w[1]);
    }
    let pass = identical;
    report(12, "determinism", pass, format!("worker counts 1/2/8 byte-identical {identical} ({bytes} bytes)"));
    assert!(pass);
}
