//! Golden-file pinning of the wire format: one deterministic message per
//! frame type per suite, byte-exact against committed fixtures.
//!
//! Regenerate after an intentional format change with
//! `RINGVEIL_REGEN_GOLDEN=1 cargo test -p ringveil --test wire_golden`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringveil::entities::{HsmBoundary, Lea, Obu, Rsu, Trc};
use ringveil::pairing_core::{Bls12381, Bn254, Suite};
use ringveil::wire;
use std::path::PathBuf;

const GOLDEN_SEED: u64 = 0x5eed_901d;
const T0: u64 = 1_700_000_000;

/// Every frame type once, from one deterministic protocol run.
fn pinned_messages<S: Suite>() -> Vec<(&'static str, Vec<u8>)> {
    let mut rng = ChaCha20Rng::seed_from_u64(GOLDEN_SEED);
    let lea = Lea::<S>::keygen(&mut rng);
    let (mut trc, params) = Trc::setup(4, lea.tracing_pubkey(), &mut rng).unwrap();
    let mut creds = Vec::new();
    for i in 0..3u32 {
        creds.push(trc.register_vehicle(format!("golden-vid-{i}").as_bytes()).unwrap());
    }
    let rsu_cred = trc.register_rsu(b"golden-region");
    let mut rsu = Rsu::new(rsu_cred, 16);
    rsu.refresh(&trc, T0);
    let region_key = *rsu.region_key();

    let mut obu = Obu::new(params.clone(), HsmBoundary::provisioned(creds[0].clone()));
    let request = obu.request_ring(&region_key, &mut rng).unwrap();
    let grant = rsu.ring_gen(&request, T0, &mut rng).unwrap();
    obu.install_grant(&region_key, &grant).unwrap();
    let broadcast = obu.broadcast(b"golden broadcast", T0 + 5, 3, &mut rng).unwrap();

    trc.revoke_vid(b"golden-vid-2", T0 + 10).unwrap();
    let key_update = trc.key_update(T0 / 3600);
    let record = trc.directory().records[0].clone();

    vec![
        ("system_params", wire::encode_system_params(&params)),
        ("ring_request", wire::encode_ring_request(&request)),
        ("ring_grant", wire::encode_ring_grant(&grant)),
        ("broadcast", wire::encode_broadcast(&broadcast)),
        ("key_update", wire::encode_key_update(&key_update)),
        ("revocation_list", wire::encode_revocation_list(trc.revocation_list())),
        ("vehicle_record", wire::encode_vehicle_record(&record)),
    ]
}

fn golden_dir(suite: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(suite)
}

fn check_suite<S: Suite>() {
    let dir = golden_dir(S::ID.name());
    let regen = std::env::var_os("RINGVEIL_REGEN_GOLDEN").is_some();
    if regen {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, bytes) in pinned_messages::<S>() {
        let path = dir.join(format!("{name}.hex"));
        let encoded = hex::encode(&bytes);
        if regen {
            std::fs::write(&path, format!("{encoded}\n")).unwrap();
            continue;
        }
        let stored = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing fixture {path:?}: {e}"));
        assert_eq!(
            stored.trim(),
            encoded,
            "wire bytes changed for {name} on {}",
            S::ID.name()
        );
    }
}

#[test]
fn bls12_381_frames_are_pinned() {
    check_suite::<Bls12381>();
}

#[test]
fn bn254_frames_are_pinned() {
    check_suite::<Bn254>();
}

#[test]
fn pinned_frames_decode_and_reencode_identically() {
    fn per_suite<S: Suite>() {
        for (name, bytes) in pinned_messages::<S>() {
            let again = match name {
                "system_params" => {
                    wire::encode_system_params(&wire::decode_system_params::<S>(&bytes).unwrap())
                }
                "ring_request" => {
                    wire::encode_ring_request(&wire::decode_ring_request::<S>(&bytes).unwrap())
                }
                "ring_grant" => wire::encode_ring_grant(&wire::decode_ring_grant(&bytes).unwrap()),
                "broadcast" => wire::encode_broadcast(&wire::decode_broadcast::<S>(&bytes).unwrap()),
                "key_update" => wire::encode_key_update(&wire::decode_key_update(&bytes).unwrap()),
                "revocation_list" => {
                    wire::encode_revocation_list(&wire::decode_revocation_list(&bytes).unwrap())
                }
                "vehicle_record" => {
                    wire::encode_vehicle_record(&wire::decode_vehicle_record::<S>(&bytes).unwrap())
                }
                other => unreachable!("unknown fixture {other}"),
            };
            assert_eq!(again, bytes, "round-trip changed bytes for {name}");
        }
    }
    per_suite::<Bls12381>();
    per_suite::<Bn254>();
}
