//! Deterministic scenario driver: the full protocol life cycle over a
//! simulated clock and a lossy delivery channel, emitting a JSON report.
//!
//! All randomness flows from the configured seed through one ChaCha stream,
//! and the report carries no wall-clock data, so identical seeds produce
//! byte-identical reports.

use crate::config::ScenarioConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use ringveil::entities::{
    BroadcastMsg, HsmBoundary, Lea, Obu, RejectReason, RingGenError, Rsu, Trc, Verdict,
};
use ringveil::pairing_core::{pairing_op_count, Suite};
use ringveil::{Bls12381, Bn254, SuiteId};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

const T0: u64 = 1_700_000_000;

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub registration: Registration,
    pub ring_distribution: RingDistribution,
    pub broadcast: Broadcast,
    pub verification: Verification,
    pub tracing: Tracing,
    pub revocation: Revocation,
    /// SHA-256 over the ordered event transcript; equal digests mean equal
    /// protocol runs.
    pub transcript_digest: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Registration {
    pub vehicles: u64,
    pub rsus: u64,
}

#[derive(Debug, Default, Serialize)]
pub struct RingDistribution {
    pub requests_sent: u64,
    pub requests_dropped: u64,
    pub grants_issued: u64,
    pub grants_dropped: u64,
    pub grants_installed: u64,
    pub rejections: BTreeMap<String, u64>,
}

#[derive(Debug, Default, Serialize)]
pub struct Broadcast {
    pub sent: u64,
    pub dropped: u64,
    pub delivered: u64,
}

#[derive(Debug, Default, Serialize)]
pub struct Verification {
    pub processed: u64,
    pub accepted: u64,
    pub rejected_stale: u64,
    pub rejected_duplicate: u64,
    pub rejected_bad_signature: u64,
    pub batch_calls: u64,
    pub pairing_evals: u64,
}

#[derive(Debug, Default, Serialize)]
pub struct Tracing {
    pub attempted: u64,
    pub correct: u64,
    pub success_rate: f64,
}

#[derive(Debug, Default, Serialize)]
pub struct Revocation {
    pub revoked: u64,
    pub pre_refresh_grants: u64,
    pub post_refresh_rejections: u64,
    pub non_revoked_still_granted: u64,
}

/// Whole-frame lossy channel; drops with the configured probability.
struct Channel<'a> {
    loss: f64,
    rng: &'a mut ChaCha20Rng,
}

impl Channel<'_> {
    fn delivers(&mut self) -> bool {
        !self.rng.gen_bool(self.loss)
    }
}

struct Transcript {
    hasher: Sha256,
}

impl Transcript {
    fn new() -> Self {
        Transcript {
            hasher: Sha256::new(),
        }
    }

    fn log(&mut self, event: &str) {
        self.hasher.update(event.as_bytes());
        self.hasher.update([b'\n']);
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

pub fn run(config: &ScenarioConfig) -> ScenarioReport {
    match config.suite.0 {
        SuiteId::Bls12_381 => run_typed::<Bls12381>(config),
        SuiteId::Bn254 => run_typed::<Bn254>(config),
    }
}

fn run_typed<S: Suite>(config: &ScenarioConfig) -> ScenarioReport {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut transcript = Transcript::new();
    let mut report = ScenarioReport {
        config: config.clone(),
        registration: Registration::default(),
        ring_distribution: RingDistribution::default(),
        broadcast: Broadcast::default(),
        verification: Verification::default(),
        tracing: Tracing::default(),
        revocation: Revocation::default(),
        transcript_digest: String::new(),
    };

    // --- setup and registration ---
    let lea = Lea::<S>::keygen(&mut rng);
    let (mut trc, params) =
        Trc::<S>::setup(config.tree_height, lea.tracing_pubkey(), &mut rng)
            .expect("config validated the height");
    transcript.log(&format!("setup suite={} h={}", S::ID.name(), config.tree_height));

    let mut obus = Vec::with_capacity(config.vehicles);
    for i in 0..config.vehicles {
        let cred = trc
            .register_vehicle(format!("vid-{i:06}").as_bytes())
            .expect("tree capacity validated");
        obus.push(Obu::new(params.clone(), HsmBoundary::provisioned(cred)));
        report.registration.vehicles += 1;
    }
    let mut rsus = Vec::with_capacity(config.rsus);
    for r in 0..config.rsus {
        let cred = trc.register_rsu(format!("region-{r:03}").as_bytes());
        let mut rsu = Rsu::new(cred, config.ring_list_size);
        rsu.refresh(&trc, T0);
        rsus.push(rsu);
        report.registration.rsus += 1;
    }
    transcript.log(&format!(
        "registered vehicles={} rsus={}",
        config.vehicles, config.rsus
    ));

    // --- ring-list distribution over the lossy channel ---
    for i in 0..config.vehicles {
        let rsu_idx = i % config.rsus;
        let region_key = *rsus[rsu_idx].region_key();
        let request = obus[i]
            .request_ring(&region_key, &mut rng)
            .expect("obus are provisioned");
        report.ring_distribution.requests_sent += 1;
        if !(Channel { loss: config.loss, rng: &mut rng }).delivers() {
            report.ring_distribution.requests_dropped += 1;
            transcript.log(&format!("request vehicle={i} dropped"));
            continue;
        }
        match rsus[rsu_idx].ring_gen(&request, T0, &mut rng) {
            Ok(grant) => {
                report.ring_distribution.grants_issued += 1;
                if !(Channel { loss: config.loss, rng: &mut rng }).delivers() {
                    report.ring_distribution.grants_dropped += 1;
                    transcript.log(&format!("grant vehicle={i} dropped"));
                    continue;
                }
                obus[i]
                    .install_grant(&region_key, &grant)
                    .expect("honest grant installs");
                report.ring_distribution.grants_installed += 1;
                transcript.log(&format!("grant vehicle={i} installed"));
            }
            Err(e) => {
                *report
                    .ring_distribution
                    .rejections
                    .entry(reject_label(&e).to_string())
                    .or_default() += 1;
                transcript.log(&format!("request vehicle={i} rejected {e:?}"));
            }
        }
    }

    // --- broadcasts, collected into one observer's queue ---
    let mut delivered: Vec<BroadcastMsg<S>> = Vec::new();
    let mut senders: Vec<usize> = Vec::new();
    for round in 0..config.messages_per_vehicle {
        let t = T0 + 10 + round as u64 * 5;
        let ring_size = config.ring_sizes[round % config.ring_sizes.len()];
        for i in 0..config.vehicles {
            if obus[i].grant().is_none() {
                continue;
            }
            let available = obus[i].grant().map(|g| g.members.len()).unwrap_or(0);
            let n = ring_size.min(available);
            let msg = obus[i]
                .broadcast(format!("traffic r{round} v{i}").as_bytes(), t, n, &mut rng)
                .expect("grant present and unexpired");
            report.broadcast.sent += 1;
            if !(Channel { loss: config.loss, rng: &mut rng }).delivers() {
                report.broadcast.dropped += 1;
                continue;
            }
            report.broadcast.delivered += 1;
            delivered.push(msg);
            senders.push(i);
        }
    }
    transcript.log(&format!(
        "broadcast sent={} delivered={}",
        report.broadcast.sent, report.broadcast.delivered
    ));

    // --- batch verification by a dedicated observer ---
    let mut observer = Obu::new(params.clone(), HsmBoundary::unprovisioned());
    let now = T0 + 10 + config.messages_per_vehicle as u64 * 5;
    let pairings_before = pairing_op_count();
    let mut verdicts: Vec<Verdict> = Vec::with_capacity(delivered.len());
    let mut offset = 0;
    let mut chunk_idx = 0;
    while offset < delivered.len() {
        let eta = config.batch_sizes[chunk_idx % config.batch_sizes.len()];
        let end = (offset + eta).min(delivered.len());
        verdicts.extend(observer.batch_process(&delivered[offset..end], now, &mut rng));
        report.verification.batch_calls += 1;
        offset = end;
        chunk_idx += 1;
    }
    report.verification.pairing_evals = pairing_op_count() - pairings_before;
    for v in &verdicts {
        report.verification.processed += 1;
        match v {
            Verdict::Accept => report.verification.accepted += 1,
            Verdict::Reject(RejectReason::Stale) => report.verification.rejected_stale += 1,
            Verdict::Reject(RejectReason::Duplicate) => {
                report.verification.rejected_duplicate += 1
            }
            Verdict::Reject(RejectReason::BadSignature) => {
                report.verification.rejected_bad_signature += 1
            }
        }
    }
    transcript.log(&format!(
        "verified processed={} accepted={}",
        report.verification.processed, report.verification.accepted
    ));

    // --- tracing a sample of the delivered traffic ---
    for (idx, msg) in delivered.iter().enumerate().step_by(3).take(32) {
        report.tracing.attempted += 1;
        let expected = obus[senders[idx]].pseudonym().expect("sender is provisioned");
        match lea.trace(msg, &trc) {
            Ok(pid) if pid == expected => report.tracing.correct += 1,
            other => transcript.log(&format!("trace mismatch idx={idx} got={other:?}")),
        }
    }
    report.tracing.success_rate = if report.tracing.attempted == 0 {
        1.0
    } else {
        report.tracing.correct as f64 / report.tracing.attempted as f64
    };
    transcript.log(&format!(
        "traced attempted={} correct={}",
        report.tracing.attempted, report.tracing.correct
    ));

    // --- revocation: pre-refresh window, then enforcement ---
    let t_revoke = now + 1;
    for i in 0..config.revoke_count {
        trc.revoke_vid(format!("vid-{i:06}").as_bytes(), t_revoke)
            .expect("registered above");
        report.revocation.revoked += 1;
    }
    for i in 0..config.revoke_count {
        // the RSUs have not refreshed: requests still succeed in the window
        let rsu_idx = i % config.rsus;
        let region_key = *rsus[rsu_idx].region_key();
        let request = obus[i].request_ring(&region_key, &mut rng).unwrap();
        if rsus[rsu_idx].ring_gen(&request, t_revoke, &mut rng).is_ok() {
            report.revocation.pre_refresh_grants += 1;
        }
    }
    for rsu in &mut rsus {
        rsu.refresh(&trc, t_revoke);
    }
    for i in 0..config.revoke_count {
        let rsu_idx = i % config.rsus;
        let region_key = *rsus[rsu_idx].region_key();
        let request = obus[i].request_ring(&region_key, &mut rng).unwrap();
        if matches!(
            rsus[rsu_idx].ring_gen(&request, t_revoke, &mut rng),
            Err(RingGenError::RevokedVehicle)
        ) {
            report.revocation.post_refresh_rejections += 1;
        }
    }
    // one non-revoked control sample
    let control = config.revoke_count; // first non-revoked index
    let region_key = *rsus[control % config.rsus].region_key();
    let request = obus[control].request_ring(&region_key, &mut rng).unwrap();
    if rsus[control % config.rsus]
        .ring_gen(&request, t_revoke, &mut rng)
        .is_ok()
    {
        report.revocation.non_revoked_still_granted += 1;
    }
    transcript.log(&format!(
        "revoked={} pre_window={} post_rejected={}",
        report.revocation.revoked,
        report.revocation.pre_refresh_grants,
        report.revocation.post_refresh_rejections
    ));

    report.transcript_digest = transcript.digest();
    report
}

fn reject_label(e: &RingGenError) -> &'static str {
    match e {
        RingGenError::StaleKeyUpdate => "stale_key_update",
        RingGenError::UnknownPid => "unknown_pid",
        RingGenError::RevokedVehicle => "revoked_vehicle",
        RingGenError::MalformedRequest => "malformed_request",
    }
}
