//! Operation benchmarks with CSV emission.
//!
//! Every record carries wall and CPU time (mean and median over the
//! repetitions), the pairing-evaluation count of one repetition, and the
//! serialized size of the object involved. Measurement loops are
//! single-threaded; anything else would put scheduler noise into the
//! numbers being compared.

use crate::stats::{mean, median};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use ringveil::entities::{trace_tag, SystemParams};
use ringveil::ibc_keys::{issue_rsu, issue_vehicle, MasterSecret};
use ringveil::pairing_core::{
    gt_exp, hash_to_g1, hash_to_g2, hash_to_scalar, pair, pairing_op_count, G1Elem, G2Elem,
    GtElem, HashUsage, Scalar, Suite,
};
use ringveil::revocation::RevocationTree;
use ringveil::ring_sig::{
    batch_verify, random_scaling_batch_verify, ring_sign, ring_verify, RingSignature,
    SignedPayload, SubRing,
};
use ringveil::{wire, Bls12381, Bn254, SuiteId};
use std::time::Instant;

pub const CSV_HEADER: &str = "operation,suite,ring_size,batch_size,tree_height,revoked,reps,\
wall_mean_ns,wall_median_ns,wall_min_ns,cpu_mean_ns,cpu_median_ns,cpu_min_ns,pairings,bytes";

/// One benchmark measurement, one CSV row.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub operation: String,
    pub suite: SuiteId,
    pub ring_size: Option<usize>,
    pub batch_size: Option<usize>,
    pub tree_height: Option<u32>,
    pub revoked: Option<usize>,
    pub reps: usize,
    pub wall_mean_ns: u64,
    pub wall_median_ns: u64,
    /// Fastest repetition; the noise-floor statistic for trend analysis on
    /// shared hosts.
    pub wall_min_ns: u64,
    pub cpu_mean_ns: u64,
    pub cpu_median_ns: u64,
    pub cpu_min_ns: u64,
    pub pairings: u64,
    pub bytes: u64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.operation,
            self.suite.name(),
            opt(&self.ring_size),
            opt(&self.batch_size),
            opt(&self.tree_height),
            opt(&self.revoked),
            self.reps,
            self.wall_mean_ns,
            self.wall_median_ns,
            self.wall_min_ns,
            self.cpu_mean_ns,
            self.cpu_median_ns,
            self.cpu_min_ns,
            self.pairings,
            self.bytes
        )
    }
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn cpu_time_ns() -> u64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // CPU time of the whole process; the measurement loops are
    // single-threaded so this tracks the benched work
    unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    ts.tv_sec as u64 * 1_000_000_000 + ts.tv_nsec as u64
}

struct Timed {
    wall_ns: Vec<u64>,
    cpu_ns: Vec<u64>,
    pairings: u64,
}

fn time_reps<F: FnMut()>(reps: usize, mut op: F) -> Timed {
    assert!(reps >= 30, "records need at least 30 repetitions");
    let pairings_before = pairing_op_count();
    op(); // warm-up; also supplies the per-op pairing count
    let pairings = pairing_op_count() - pairings_before;
    let mut wall_ns = Vec::with_capacity(reps);
    let mut cpu_ns = Vec::with_capacity(reps);
    for _ in 0..reps {
        let cpu0 = cpu_time_ns();
        let wall0 = Instant::now();
        op();
        wall_ns.push(wall0.elapsed().as_nanos() as u64);
        cpu_ns.push(cpu_time_ns() - cpu0);
    }
    Timed {
        wall_ns,
        cpu_ns,
        pairings,
    }
}

fn record(
    operation: &str,
    suite: SuiteId,
    reps: usize,
    timed: Timed,
    bytes: u64,
) -> BenchRecord {
    BenchRecord {
        operation: operation.to_string(),
        suite,
        ring_size: None,
        batch_size: None,
        tree_height: None,
        revoked: None,
        reps,
        wall_mean_ns: mean(&timed.wall_ns) as u64,
        wall_median_ns: median(&timed.wall_ns),
        wall_min_ns: timed.wall_ns.iter().copied().min().unwrap_or(0),
        cpu_mean_ns: mean(&timed.cpu_ns) as u64,
        cpu_median_ns: median(&timed.cpu_ns),
        cpu_min_ns: timed.cpu_ns.iter().copied().min().unwrap_or(0),
        pairings: timed.pairings,
        bytes,
    }
}

/// Ring world shared by the signing/verification benches: one master
/// secret, pre-issued member keys.
struct BenchWorld<S: Suite> {
    pk2: G2Elem<S>,
    pids: Vec<G1Elem<S>>,
    psks: Vec<G1Elem<S>>,
}

impl<S: Suite> BenchWorld<S> {
    fn new(members: usize, rng: &mut ChaCha20Rng) -> Self {
        let master = Scalar::<S>::random_nonzero(rng);
        let pids: Vec<G1Elem<S>> = (0..members)
            .map(|i| hash_to_g1::<S>(HashUsage::Pseudonym, format!("bench-{i}").as_bytes()))
            .collect();
        let psks = pids.iter().map(|p| *p * master).collect();
        BenchWorld {
            pk2: G2Elem::generator() * master,
            pids,
            psks,
        }
    }

    fn instance(
        &self,
        n: usize,
        label: u64,
        rng: &mut ChaCha20Rng,
    ) -> (SignedPayload<S>, SubRing<S>, RingSignature<S>, usize) {
        let ring = SubRing::new(self.pids[..n].to_vec()).unwrap();
        let k = rng.gen_range(0..n);
        let payload = SignedPayload {
            message: format!("bench payload {label}").into_bytes(),
            tag: GtElem::random(rng),
            timestamp: 1_700_000_000 + label,
        };
        let sig = ring_sign(&self.pk2, &self.psks[k], k, &payload, &ring, rng).unwrap();
        (payload, ring, sig, k)
    }
}

/// Interleaved sweep engine: one warm-up pass per context (which also
/// samples the pairing count), then repetitions taken round-robin in a
/// freshly shuffled context order each pass. Clock drift, quota throttling,
/// and cache state then land uniformly on every context instead of biasing
/// whichever one was measured during a bad window.
fn time_matrix<F: FnMut(usize)>(
    count: usize,
    reps: usize,
    mut op: F,
    order_rng: &mut ChaCha20Rng,
) -> Vec<Timed> {
    assert!(reps >= 30, "records need at least 30 repetitions");
    let mut pairings = Vec::with_capacity(count);
    for i in 0..count {
        let before = pairing_op_count();
        op(i);
        pairings.push(pairing_op_count() - before);
    }
    let mut wall = vec![Vec::with_capacity(reps); count];
    let mut cpu = vec![Vec::with_capacity(reps); count];
    let mut order: Vec<usize> = (0..count).collect();
    for _ in 0..reps {
        order.shuffle(order_rng);
        for &i in &order {
            let cpu0 = cpu_time_ns();
            let wall0 = Instant::now();
            op(i);
            wall[i].push(wall0.elapsed().as_nanos() as u64);
            cpu[i].push(cpu_time_ns() - cpu0);
        }
    }
    wall.into_iter()
        .zip(cpu)
        .zip(pairings)
        .map(|((wall_ns, cpu_ns), pairings)| Timed {
            wall_ns,
            cpu_ns,
            pairings,
        })
        .collect()
}

/// Sign benchmark over a sweep of ring sizes.
pub fn bench_sign<S: Suite>(ring_sizes: &[usize], reps: usize, seed: u64) -> Vec<BenchRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order_rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0bad_5eed);
    let world = BenchWorld::<S>::new(*ring_sizes.iter().max().unwrap(), &mut rng);
    let contexts: Vec<(SubRing<S>, SignedPayload<S>)> = ring_sizes
        .iter()
        .map(|&n| {
            let ring = SubRing::new(world.pids[..n].to_vec()).unwrap();
            let payload = SignedPayload {
                message: b"bench sign".to_vec(),
                tag: GtElem::random(&mut rng),
                timestamp: 1_700_000_000,
            };
            (ring, payload)
        })
        .collect();
    let mut sig_bytes = vec![0u64; ring_sizes.len()];
    let timings = time_matrix(
        contexts.len(),
        reps,
        |i| {
            let (ring, payload) = &contexts[i];
            let sig = ring_sign(&world.pk2, &world.psks[0], 0, payload, ring, &mut rng).unwrap();
            sig_bytes[i] = wire::encode_ring_signature(&sig).len() as u64;
        },
        &mut order_rng,
    );
    timings
        .into_iter()
        .enumerate()
        .map(|(i, timed)| {
            let mut rec = record("sign", S::ID, reps, timed, sig_bytes[i]);
            rec.ring_size = Some(ring_sizes[i]);
            rec
        })
        .collect()
}

/// Single-verification benchmark over a sweep of ring sizes.
pub fn bench_verify<S: Suite>(ring_sizes: &[usize], reps: usize, seed: u64) -> Vec<BenchRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order_rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0bad_5eed);
    let world = BenchWorld::<S>::new(*ring_sizes.iter().max().unwrap(), &mut rng);
    let contexts: Vec<(SignedPayload<S>, SubRing<S>, RingSignature<S>)> = ring_sizes
        .iter()
        .map(|&n| {
            let (p, r, sig, _) = world.instance(n, n as u64, &mut rng);
            (p, r, sig)
        })
        .collect();
    let timings = time_matrix(
        contexts.len(),
        reps,
        |i| {
            let (payload, ring, sig) = &contexts[i];
            assert!(ring_verify(&world.pk2, payload, ring, sig).unwrap());
        },
        &mut order_rng,
    );
    timings
        .into_iter()
        .enumerate()
        .map(|(i, timed)| {
            let (_, _, sig) = &contexts[i];
            let mut rec = record(
                "verify",
                S::ID,
                reps,
                timed,
                wire::encode_ring_signature(sig).len() as u64,
            );
            rec.ring_size = Some(ring_sizes[i]);
            rec
        })
        .collect()
}

/// Batch verification (hardened, and plain aggregation for comparison) over
/// ring-size × batch-size sweeps.
pub fn bench_batch_verify<S: Suite>(
    ring_sizes: &[usize],
    batch_sizes: &[usize],
    reps: usize,
    seed: u64,
    plain: bool,
) -> Vec<BenchRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order_rng = ChaCha20Rng::seed_from_u64(seed ^ 0x0bad_5eed);
    let world = BenchWorld::<S>::new(*ring_sizes.iter().max().unwrap(), &mut rng);

    struct BatchCtx<S: Suite> {
        n: usize,
        eta: usize,
        payloads: Vec<SignedPayload<S>>,
        rings: Vec<SubRing<S>>,
        sigs: Vec<RingSignature<S>>,
        bytes: u64,
    }
    let mut contexts: Vec<BatchCtx<S>> = Vec::new();
    for &n in ring_sizes {
        for &eta in batch_sizes {
            let mut payloads = Vec::with_capacity(eta);
            let mut rings = Vec::with_capacity(eta);
            let mut sigs = Vec::with_capacity(eta);
            for j in 0..eta {
                let (p, r, s, _) = world.instance(n, (n * 1000 + j) as u64, &mut rng);
                payloads.push(p);
                rings.push(r);
                sigs.push(s);
            }
            let bytes = sigs
                .iter()
                .map(|s| wire::encode_ring_signature(s).len() as u64)
                .sum();
            contexts.push(BatchCtx {
                n,
                eta,
                payloads,
                rings,
                sigs,
                bytes,
            });
        }
    }

    let name = if plain { "batch_verify_plain" } else { "batch_verify" };
    let timings = time_matrix(
        contexts.len(),
        reps,
        |i| {
            let c = &contexts[i];
            let ok = if plain {
                batch_verify(&world.pk2, &c.payloads, &c.rings, &c.sigs).unwrap()
            } else {
                random_scaling_batch_verify(&world.pk2, &c.payloads, &c.rings, &c.sigs, &mut rng)
                    .unwrap()
            };
            assert!(ok);
        },
        &mut order_rng,
    );
    timings
        .into_iter()
        .enumerate()
        .map(|(i, timed)| {
            let mut rec = record(name, S::ID, reps, timed, contexts[i].bytes);
            rec.ring_size = Some(contexts[i].n);
            rec.batch_size = Some(contexts[i].eta);
            rec
        })
        .collect()
}

/// Individual pairing-stack operations, the per-suite cost table.
pub fn bench_primitives<S: Suite>(reps: usize, seed: u64) -> Vec<BenchRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g1 = G1Elem::<S>::random(&mut rng);
    let g2 = G2Elem::<S>::random(&mut rng);
    let gt = GtElem::<S>::random(&mut rng);
    let s = Scalar::<S>::random_nonzero(&mut rng);
    let mut records = Vec::new();

    let timed = time_reps(reps, || {
        std::hint::black_box(g1 * s);
    });
    records.push(record("g1_mul", S::ID, reps, timed, G1Elem::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        std::hint::black_box(g2 * s);
    });
    records.push(record("g2_mul", S::ID, reps, timed, G2Elem::<S>::encoded_len() as u64));

    let mut i = 0u64;
    let timed = time_reps(reps, || {
        i += 1;
        std::hint::black_box(hash_to_g1::<S>(HashUsage::Pseudonym, &i.to_be_bytes()));
    });
    records.push(record("hash_to_g1", S::ID, reps, timed, G1Elem::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        i += 1;
        std::hint::black_box(hash_to_g2::<S>(HashUsage::RegionKey, &i.to_be_bytes()));
    });
    records.push(record("hash_to_g2", S::ID, reps, timed, G2Elem::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        i += 1;
        std::hint::black_box(hash_to_scalar::<S>(HashUsage::RingChallenge, &i.to_be_bytes()));
    });
    records.push(record("hash_to_scalar", S::ID, reps, timed, Scalar::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        std::hint::black_box(pair(&g1, &g2));
    });
    records.push(record("pair", S::ID, reps, timed, GtElem::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        std::hint::black_box(gt_exp(&gt, &s));
    });
    records.push(record("gt_exp", S::ID, reps, timed, GtElem::<S>::encoded_len() as u64));

    let timed = time_reps(reps, || {
        i += 1;
        std::hint::black_box(trace_tag::<S>(b"bench-vid", i, &g2));
    });
    records.push(record("trace_tag", S::ID, reps, timed, GtElem::<S>::encoded_len() as u64));

    records
}

/// Vehicle registration cost against tree height (issuance plus the
/// leaf-path bookkeeping).
pub fn bench_keygen<S: Suite>(heights: &[u32], reps: usize, seed: u64) -> Vec<BenchRecord> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let master = MasterSecret::<S>::generate(&mut rng);
    heights
        .iter()
        .map(|&h| {
            let mut tree = RevocationTree::new(h).unwrap();
            let mut i = 0u64;
            let timed = time_reps(reps, || {
                i += 1;
                // fresh identity per repetition; recreate the tree when full
                if tree.leaf_of(format!("kg-{i}").as_bytes()).is_none()
                    && tree.assigned().count() as u64 >= tree.leaf_count()
                {
                    tree = RevocationTree::new(h).unwrap();
                }
                std::hint::black_box(
                    issue_vehicle::<S>(&master, format!("kg-{i}").as_bytes(), &mut tree).unwrap(),
                );
            });
            let mut rec = record("vehicle_keygen", S::ID, reps, timed, 0);
            rec.tree_height = Some(h);
            rec
        })
        .collect()
}

/// V2I round: request construction plus RSU-side grant generation.
pub fn bench_v2i<S: Suite>(reps: usize, seed: u64) -> Vec<BenchRecord> {
    use ringveil::entities::{HsmBoundary, Lea, Obu, Rsu, Trc};
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let lea = Lea::<S>::keygen(&mut rng);
    let (mut trc, params) = Trc::<S>::setup(10, lea.tracing_pubkey(), &mut rng).unwrap();
    for i in 0..32 {
        trc.register_vehicle(format!("v2i-{i}").as_bytes()).unwrap();
    }
    let cred = trc.register_vehicle(b"v2i-bench").unwrap();
    let rsu_cred = trc.register_rsu(b"v2i-region");
    let mut rsu = Rsu::new(rsu_cred, 20);
    rsu.refresh(&trc, 1_700_000_000);
    let mut obu = Obu::new(params, HsmBoundary::provisioned(cred));
    let region_key = *rsu.region_key();

    let mut request_bytes = 0u64;
    let timed = time_reps(reps, || {
        let req = obu.request_ring(&region_key, &mut rng).unwrap();
        request_bytes = wire::encode_ring_request(&req).len() as u64;
    });
    let req_record = record("ring_request", S::ID, reps, timed, request_bytes);

    let request = obu.request_ring(&region_key, &mut rng).unwrap();
    let mut grant_bytes = 0u64;
    let timed = time_reps(reps, || {
        let grant = rsu.ring_gen(&request, 1_700_000_000, &mut rng).unwrap();
        grant_bytes = wire::encode_ring_grant(&grant).len() as u64;
    });
    let gen_record = record("ring_gen", S::ID, reps, timed, grant_bytes);

    // shared-key agreement on its own
    let rsu_cred2 = issue_rsu::<S>(&MasterSecret::generate(&mut rng), b"r");
    let timed = time_reps(reps, || {
        std::hint::black_box(obu.hsm.channel_key(&rsu_cred2.rid).unwrap());
    });
    let key_record = record("shared_key", S::ID, reps, timed, GtElem::<S>::encoded_len() as u64);

    vec![req_record, gen_record, key_record]
}

/// Dispatches a benchmark call on the suite chosen at runtime.
pub fn dispatch<F, G, T>(suite: SuiteId, bls: F, bn: G) -> T
where
    F: FnOnce() -> T,
    G: FnOnce() -> T,
{
    match suite {
        SuiteId::Bls12_381 => bls(),
        SuiteId::Bn254 => bn(),
    }
}

/// Size of one encoded broadcast for a given ring size; used by the size
/// accounting CSV.
pub fn broadcast_size<S: Suite>(ring_size: usize, seed: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let world = BenchWorld::<S>::new(ring_size, &mut rng);
    let (payload, ring, sig, _) = world.instance(ring_size, 0, &mut rng);
    let msg = ringveil::entities::BroadcastMsg {
        message: payload.message,
        signature: sig,
        ring,
        timestamp: payload.timestamp,
        tag: payload.tag,
    };
    wire::encode_broadcast(&msg).len() as u64
}

/// System parameters for size reporting.
pub fn params_size<S: Suite>(seed: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let master = Scalar::<S>::random_nonzero(&mut rng);
    let params = SystemParams::<S> {
        pk1: G1Elem::generator() * master,
        pk2: G2Elem::generator() * master,
        pk_trac: G2Elem::generator() * Scalar::random_nonzero(&mut rng),
        hash_profile: S::hash_profile(),
    };
    wire::encode_system_params(&params).len() as u64
}

/// All benches for one suite; the `all` op of the CLI.
pub fn bench_all(suite: SuiteId, ring_sizes: &[usize], batch_sizes: &[usize], reps: usize, seed: u64) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    match suite {
        SuiteId::Bls12_381 => {
            records.extend(bench_primitives::<Bls12381>(reps, seed));
            records.extend(bench_sign::<Bls12381>(ring_sizes, reps, seed));
            records.extend(bench_verify::<Bls12381>(ring_sizes, reps, seed));
            records.extend(bench_batch_verify::<Bls12381>(ring_sizes, batch_sizes, reps, seed, false));
            records.extend(bench_batch_verify::<Bls12381>(ring_sizes, batch_sizes, reps, seed, true));
            records.extend(bench_keygen::<Bls12381>(&[4, 10, 16, 20], reps, seed));
            records.extend(bench_v2i::<Bls12381>(reps, seed));
        }
        SuiteId::Bn254 => {
            records.extend(bench_primitives::<Bn254>(reps, seed));
            records.extend(bench_sign::<Bn254>(ring_sizes, reps, seed));
            records.extend(bench_verify::<Bn254>(ring_sizes, reps, seed));
            records.extend(bench_batch_verify::<Bn254>(ring_sizes, batch_sizes, reps, seed, false));
            records.extend(bench_batch_verify::<Bn254>(ring_sizes, batch_sizes, reps, seed, true));
            records.extend(bench_keygen::<Bn254>(&[4, 10, 16, 20], reps, seed));
            records.extend(bench_v2i::<Bn254>(reps, seed));
        }
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_match_header_arity() {
        let recs = bench_primitives::<Bn254>(30, 5);
        let header_cols = CSV_HEADER.split(',').count();
        for r in &recs {
            assert_eq!(r.csv_row().split(',').count(), header_cols);
        }
        assert!(recs.iter().any(|r| r.operation == "pair" && r.pairings == 1));
    }

    #[test]
    fn verify_records_report_two_pairings() {
        let recs = bench_verify::<Bn254>(&[2, 4], 30, 6);
        for r in &recs {
            assert_eq!(r.pairings, 2, "verification is two pairings at any size");
            assert!(r.wall_median_ns > 0);
        }
    }

    #[test]
    fn signature_bytes_grow_affinely() {
        let recs = bench_sign::<Bn254>(&[2, 3, 10], 30, 7);
        let point = G1Elem::<Bn254>::encoded_len() as u64;
        assert_eq!(recs[1].bytes - recs[0].bytes, point);
        assert_eq!(recs[2].bytes - recs[1].bytes, 7 * point);
    }
}
