use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use ringveil_cli::config::{parse_sizes, ConfigOverlay, ScenarioConfig};
use ringveil_cli::{bench, keyupdate, scenario};
use ringveil::entities::{HsmBoundary, Lea, Obu, Rsu, Trc};
use ringveil::pairing_core::Suite;
use ringveil::{wire, Bls12381, Bn254, SuiteId};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ringveil",
    about = "Anonymous-yet-auditable vehicle broadcasts: simulation and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate system parameters and write the encoded frame
    Setup {
        #[arg(long, default_value = "bn254", env = "RINGVEIL_SUITE")]
        suite: String,
        /// Registration tree height (capacity 2^height vehicles)
        #[arg(long, default_value_t = 10, env = "RINGVEIL_TREE_HEIGHT")]
        height: u32,
        #[arg(long, default_value_t = 7, env = "RINGVEIL_SEED")]
        seed: u64,
        /// Output file; hex to stdout when omitted
        #[arg(long, env = "RINGVEIL_OUT")]
        out: Option<PathBuf>,
    },
    /// Run a full protocol scenario over a simulated clock
    Scenario {
        /// Key-value config file (`key = value` lines)
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "RINGVEIL_SUITE")]
        suite: Option<String>,
        #[arg(long, env = "RINGVEIL_TREE_HEIGHT")]
        height: Option<u32>,
        #[arg(long, env = "RINGVEIL_VEHICLES")]
        vehicles: Option<usize>,
        #[arg(long, env = "RINGVEIL_RSUS")]
        rsus: Option<usize>,
        /// Comma list or inclusive range, e.g. `5,10,20` or `2..30`
        #[arg(long, env = "RINGVEIL_RING_SIZES")]
        ring_sizes: Option<String>,
        #[arg(long, env = "RINGVEIL_BATCH_SIZES")]
        batch_sizes: Option<String>,
        /// Frame-drop probability in [0, 1)
        #[arg(long, env = "RINGVEIL_LOSS")]
        loss: Option<f64>,
        #[arg(long, env = "RINGVEIL_FRESHNESS_WINDOW")]
        freshness_window: Option<u64>,
        #[arg(long, env = "RINGVEIL_SEED")]
        seed: Option<u64>,
        #[arg(long, env = "RINGVEIL_MESSAGES_PER_VEHICLE")]
        messages_per_vehicle: Option<usize>,
        #[arg(long, env = "RINGVEIL_REVOKE_COUNT")]
        revoke_count: Option<usize>,
        #[arg(long, env = "RINGVEIL_RING_LIST_SIZE")]
        ring_list_size: Option<usize>,
        /// Report file; stdout when omitted
        #[arg(long, env = "RINGVEIL_OUT")]
        out: Option<PathBuf>,
    },
    /// Operation benchmarks, CSV output
    Bench {
        #[arg(long, default_value = "bn254", env = "RINGVEIL_SUITE")]
        suite: String,
        /// One of: sign, verify, batch-verify, batch-verify-plain,
        /// primitives, keygen, v2i, all
        #[arg(long, default_value = "all")]
        op: String,
        #[arg(long, default_value = "2..30")]
        ring_sizes: String,
        #[arg(long, default_value = "10,20")]
        batch_sizes: String,
        /// Repetitions per measurement (min 30)
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 7, env = "RINGVEIL_SEED")]
        seed: u64,
        /// Output file; stdout when omitted
        #[arg(long, env = "RINGVEIL_OUT")]
        out: Option<PathBuf>,
    },
    /// Key-update cover sizes vs the linear baseline, CSV output
    KeyupdateSize {
        /// Tree capacity; must be a power of two
        #[arg(long, default_value_t = 1024)]
        leaves: u64,
        /// Revocation counts; defaults to 0,1,2,4,...,N/2,N
        #[arg(long)]
        revoked: Option<String>,
        #[arg(long, default_value_t = 7, env = "RINGVEIL_SEED")]
        seed: u64,
        #[arg(long, env = "RINGVEIL_OUT")]
        out: Option<PathBuf>,
    },
    /// End-to-end trace of one anonymous broadcast, JSON output
    TraceDemo {
        #[arg(long, default_value = "bn254", env = "RINGVEIL_SUITE")]
        suite: String,
        #[arg(long, default_value_t = 7, env = "RINGVEIL_SEED")]
        seed: u64,
        #[arg(long, env = "RINGVEIL_OUT")]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn parse_suite(name: &str) -> Result<SuiteId, String> {
    SuiteId::parse(name).ok_or_else(|| format!("unknown suite `{name}` (bls12-381 or bn254)"))
}

fn emit(out: Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(&path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Setup {
            suite,
            height,
            seed,
            out,
        } => {
            let suite = parse_suite(&suite)?;
            let frame = match suite {
                SuiteId::Bls12_381 => setup_frame::<Bls12381>(height, seed)?,
                SuiteId::Bn254 => setup_frame::<Bn254>(height, seed)?,
            };
            match out {
                Some(path) => std::fs::write(&path, &frame)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => println!("{}", hex::encode(&frame)),
            }
            eprintln!(
                "wrote system parameters: suite={} height={} bytes={}",
                suite.name(),
                height,
                frame.len()
            );
            Ok(())
        }
        Command::Scenario {
            config,
            suite,
            height,
            vehicles,
            rsus,
            ring_sizes,
            batch_sizes,
            loss,
            freshness_window,
            seed,
            messages_per_vehicle,
            revoke_count,
            ring_list_size,
            out,
        } => {
            let mut overlays = Vec::new();
            if let Some(path) = config {
                overlays.push(ConfigOverlay::from_file(&path).map_err(|e| e.to_string())?);
            }
            // flags (clap already folded RINGVEIL_* env vars into them)
            let mut flags = ConfigOverlay::default();
            let mut set = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    flags.set(k, v);
                }
            };
            set("suite", suite);
            set("tree_height", height.map(|v| v.to_string()));
            set("vehicles", vehicles.map(|v| v.to_string()));
            set("rsus", rsus.map(|v| v.to_string()));
            set("ring_sizes", ring_sizes);
            set("batch_sizes", batch_sizes);
            set("loss", loss.map(|v| v.to_string()));
            set("freshness_window", freshness_window.map(|v| v.to_string()));
            set("seed", seed.map(|v| v.to_string()));
            set("messages_per_vehicle", messages_per_vehicle.map(|v| v.to_string()));
            set("revoke_count", revoke_count.map(|v| v.to_string()));
            set("ring_list_size", ring_list_size.map(|v| v.to_string()));
            overlays.push(flags);

            let cfg = ScenarioConfig::resolve(&overlays).map_err(|e| e.to_string())?;
            let report = scenario::run(&cfg);
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| format!("report serialization failed: {e}"))?;
            emit(out, &format!("{json}\n"))
        }
        Command::Bench {
            suite,
            op,
            ring_sizes,
            batch_sizes,
            reps,
            seed,
            out,
        } => {
            let suite = parse_suite(&suite)?;
            if reps < 30 {
                return Err("reps must be at least 30".into());
            }
            let rings = parse_sizes(&ring_sizes)?;
            let batches = parse_sizes(&batch_sizes)?;
            if rings.is_empty() || rings.contains(&0) {
                return Err("ring sizes must be positive".into());
            }
            let records = match op.as_str() {
                "sign" => bench::dispatch(
                    suite,
                    || bench::bench_sign::<Bls12381>(&rings, reps, seed),
                    || bench::bench_sign::<Bn254>(&rings, reps, seed),
                ),
                "verify" => bench::dispatch(
                    suite,
                    || bench::bench_verify::<Bls12381>(&rings, reps, seed),
                    || bench::bench_verify::<Bn254>(&rings, reps, seed),
                ),
                "batch-verify" => bench::dispatch(
                    suite,
                    || bench::bench_batch_verify::<Bls12381>(&rings, &batches, reps, seed, false),
                    || bench::bench_batch_verify::<Bn254>(&rings, &batches, reps, seed, false),
                ),
                "batch-verify-plain" => bench::dispatch(
                    suite,
                    || bench::bench_batch_verify::<Bls12381>(&rings, &batches, reps, seed, true),
                    || bench::bench_batch_verify::<Bn254>(&rings, &batches, reps, seed, true),
                ),
                "primitives" => bench::dispatch(
                    suite,
                    || bench::bench_primitives::<Bls12381>(reps, seed),
                    || bench::bench_primitives::<Bn254>(reps, seed),
                ),
                "keygen" => bench::dispatch(
                    suite,
                    || bench::bench_keygen::<Bls12381>(&[4, 10, 16, 20], reps, seed),
                    || bench::bench_keygen::<Bn254>(&[4, 10, 16, 20], reps, seed),
                ),
                "v2i" => bench::dispatch(
                    suite,
                    || bench::bench_v2i::<Bls12381>(reps, seed),
                    || bench::bench_v2i::<Bn254>(reps, seed),
                ),
                "all" => bench::bench_all(suite, &rings, &batches, reps, seed),
                other => return Err(format!("unknown bench op `{other}`")),
            };
            emit(out, &bench::to_csv(&records))
        }
        Command::KeyupdateSize {
            leaves,
            revoked,
            seed,
            out,
        } => {
            let counts = match revoked {
                Some(spec) => parse_sizes(&spec)?.into_iter().map(|v| v as u64).collect(),
                None => keyupdate::default_sweep(leaves),
            };
            let rows = keyupdate::cover_sweep(leaves, &counts, seed).map_err(|e| e.to_string())?;
            emit(out, &keyupdate::to_csv(&rows))
        }
        Command::TraceDemo { suite, seed, out } => {
            let suite = parse_suite(&suite)?;
            let json = match suite {
                SuiteId::Bls12_381 => trace_demo::<Bls12381>(seed)?,
                SuiteId::Bn254 => trace_demo::<Bn254>(seed)?,
            };
            emit(out, &format!("{json}\n"))
        }
    }
}

fn setup_frame<S: Suite>(height: u32, seed: u64) -> Result<Vec<u8>, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let lea = Lea::<S>::keygen(&mut rng);
    let (_, params) = Trc::<S>::setup(height, lea.tracing_pubkey(), &mut rng)
        .map_err(|e| e.to_string())?;
    Ok(wire::encode_system_params(&params))
}

fn trace_demo<S: Suite>(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let lea = Lea::<S>::keygen(&mut rng);
    let (mut trc, params) =
        Trc::<S>::setup(5, lea.tracing_pubkey(), &mut rng).map_err(|e| e.to_string())?;
    let mut obus = Vec::new();
    for i in 0..12 {
        let cred = trc
            .register_vehicle(format!("demo-vid-{i:02}").as_bytes())
            .map_err(|e| e.to_string())?;
        obus.push(Obu::new(params.clone(), HsmBoundary::provisioned(cred)));
    }
    let mut rsu = Rsu::new(trc.register_rsu(b"demo-region"), 12);
    let now = 1_700_000_000;
    rsu.refresh(&trc, now);
    let region_key = *rsu.region_key();

    let signer = 4usize;
    let request = obus[signer]
        .request_ring(&region_key, &mut rng)
        .map_err(|e| e.to_string())?;
    let grant = rsu
        .ring_gen(&request, now, &mut rng)
        .map_err(|e| e.to_string())?;
    obus[signer]
        .install_grant(&region_key, &grant)
        .map_err(|e| e.to_string())?;
    let msg = obus[signer]
        .broadcast(b"demo: road closed", now + 1, 8, &mut rng)
        .map_err(|e| e.to_string())?;

    let verdict = obus[0].receive(&msg, now + 2);
    let traced = lea.trace(&msg, &trc).map_err(|e| e.to_string())?;
    let signer_pid = obus[signer].pseudonym().map_err(|e| e.to_string())?;
    let resolved = trc
        .resolve_vid(&traced)
        .map(|v| String::from_utf8_lossy(v).into_owned())
        .unwrap_or_default();

    serde_json::to_string_pretty(&serde_json::json!({
        "suite": S::ID.name(),
        "ring_size": msg.ring.len(),
        "receiver_verdict": format!("{verdict:?}"),
        "signer_pseudonym": hex::encode(signer_pid.to_bytes()),
        "traced_pseudonym": hex::encode(traced.to_bytes()),
        "traced_matches_signer": traced == signer_pid,
        "resolved_identity": resolved,
    }))
    .map_err(|e| e.to_string())
}
