//! `fhipe` command line: key lifecycle, encryption, decryption, discrete-log
//! table management, the benchmark harness, and the two demo applications.
//!
//! Exit codes: 0 success (a decryption result of BOT is a protocol
//! outcome, not an error), 1 usage, 2 I/O or format, 3 violated
//! cryptographic contract.

mod bench;
mod mem;
mod svg;

use std::path::{Path, PathBuf};
use std::process::exit;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use fhipe::apps::classify::{ClassLabel, ClassifierModel};
use fhipe::apps::localize::{
    encrypt_query, keygen_database, nearest_neighbors, quantize_rssi, FingerprintDatabase,
    QuantizationConfig,
};
use fhipe::dlog::{build_table_power_tree, DlogTable, LookupMode};
use fhipe::multipairing::MultiPairingStrategy;
use fhipe::pairing::{g2_generator, gt_generator, pairing};
use fhipe::scheme::{
    decrypt_with, encrypt, keygen, setup, DecryptOptions, PlainVector, PublicParams,
};
use fhipe::wire::{
    read_ciphertext, read_function_key, read_msk, read_vector_csv_path, write_ciphertext,
    write_function_key, write_msk, FileHeader,
};
use fhipe::Error as FhipeError;

#[global_allocator]
static ALLOC: mem::TrackingAllocator = mem::TrackingAllocator;

#[derive(Parser)]
#[command(name = "fhipe", version, about = "Function-hiding inner product encryption over BLS12-381")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct DecryptTuning {
    /// Multi-pairing strategy: naive, shared-fe or shared-ml-fe.
    #[arg(long = "mp-strategy", default_value = "shared-ml-fe")]
    mp_strategy: String,
    /// Use the non-constant-time sorted table lookup (benchmarking only;
    /// leaks the match position through timing).
    #[arg(long = "fast-lookup")]
    fast_lookup: bool,
}

impl DecryptTuning {
    fn options(&self) -> Result<DecryptOptions> {
        Ok(DecryptOptions {
            strategy: self.mp_strategy.parse::<MultiPairingStrategy>()?,
            lookup: if self.fast_lookup {
                LookupMode::SortedFast
            } else {
                LookupMode::ConstantTime
            },
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a master secret key.
    Setup {
        /// Vector dimension.
        #[arg(long)]
        n: u32,
        /// Bound-set size: decryption searches [0, s) (or [-(s-1), s-1]
        /// with --signed).
        #[arg(long)]
        s: u64,
        /// Signed-range decryption.
        #[arg(long)]
        signed: bool,
        /// Deterministic test-only randomness; omit for OS entropy.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive a function key for a vector (CSV, one integer per line).
    Keygen {
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Store points uncompressed (compressed is the default on disk).
        #[arg(long)]
        uncompressed: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a vector (CSV, one integer per line).
    Encrypt {
        #[arg(long)]
        msk: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        uncompressed: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt: prints the inner product, or BOT when it lies outside the
    /// bound set.
    Decrypt {
        /// Master key file; used only for its public parameters.
        #[arg(long, conflicts_with = "pp")]
        msk: Option<PathBuf>,
        /// Any .fhip file whose header carries the public parameters.
        #[arg(long)]
        pp: Option<PathBuf>,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        /// Precomputed table (.fhdt); rebuilt on the fly if it does not
        /// match this key/ciphertext pair.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        tuning: DecryptTuning,
    },
    /// Build and persist a baby-step table (.fhdt).
    Table {
        #[arg(long)]
        out: PathBuf,
        /// Table size; defaults to what the key/msk parameters require.
        #[arg(long)]
        alpha: Option<u64>,
        #[arg(long)]
        msk: Option<PathBuf>,
        #[arg(long)]
        key: Option<PathBuf>,
        /// Build for the exact base of this key/ciphertext pair.
        #[arg(long, conflicts_with = "ct_free_base")]
        ct: Option<PathBuf>,
        /// Build from e(k1, G2), i.e. without a ciphertext. Such a table
        /// only matches decryptions whose ciphertext anchor is the plain
        /// generator; otherwise decrypt falls back to a fresh build.
        #[arg(long = "ct-free-base")]
        ct_free_base: bool,
    },
    /// Measure scaling behaviour; writes CSV and optionally SVG.
    Bench {
        /// One of: encrypt, decrypt, multipairing, g2mul, dlog-table.
        #[arg(long)]
        suite: String,
        /// Comma-separated vector dimensions.
        #[arg(long = "n-list", default_value = "25,50,100")]
        n_list: String,
        /// Comma-separated table sizes.
        #[arg(long = "alpha-list", default_value = "1024")]
        alpha_list: String,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Iterations per record (minimum 30).
        #[arg(long, default_value_t = 30)]
        iters: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        tuning: DecryptTuning,
    },
    /// Encrypted linear classification demo.
    DemoClassify {
        #[arg(long)]
        msk: PathBuf,
        /// Weight vector CSV.
        #[arg(long)]
        model: PathBuf,
        /// JSON sidecar: {"threshold": .., "quant_bits": .., "signed": ..}.
        #[arg(long)]
        meta: PathBuf,
        /// Quantized sample CSV.
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also print the decrypted score.
        #[arg(long = "show-score")]
        show_score: bool,
        #[command(flatten)]
        tuning: DecryptTuning,
    },
    /// Privacy-preserving indoor localization demo.
    DemoLocalize {
        #[arg(long)]
        msk: PathBuf,
        /// Database CSV: index,rssi_1,...,rssi_N (raw dBm).
        #[arg(long)]
        db: PathBuf,
        /// Query fingerprint CSV: one raw dBm value per line.
        #[arg(long)]
        query: PathBuf,
        /// Neighbors to return.
        #[arg(short, default_value_t = 3)]
        k: usize,
        /// Include distances in the JSON output (they are visible to the
        /// decryptor either way; this only controls the CLI output).
        #[arg(long = "reveal-distances")]
        reveal_distances: bool,
        #[arg(long = "min-dbm", default_value_t = -100)]
        min_dbm: i32,
        #[arg(long = "max-dbm", default_value_t = -37)]
        max_dbm: i32,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tuning: DecryptTuning,
    },
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read_header(path: &Path) -> Result<FileHeader> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FileHeader::decode(&bytes)?)
}

fn load_vector(path: &Path) -> Result<PlainVector> {
    Ok(PlainVector::from_values(read_vector_csv_path(path)?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Setup { n, s, signed, seed, out } => {
            let mut rng = make_rng(seed);
            let (pp, msk) = setup(n, s, signed, &mut rng)?;
            std::fs::write(&out, write_msk(&msk))?;
            eprintln!(
                "wrote msk: n={} s={} signed={} table_alpha={} -> {}",
                pp.n,
                pp.s,
                pp.signed_mode,
                pp.dlog_params()?.table_alpha(),
                out.display()
            );
        }
        Cmd::Keygen { msk, vec, seed, uncompressed, out } => {
            let msk = read_msk(&std::fs::read(&msk)?)?;
            let x = load_vector(&vec)?;
            let mut rng = make_rng(seed);
            let key = keygen(&msk, &x, &mut rng)?;
            std::fs::write(&out, write_function_key(&key, &msk.pp, !uncompressed))?;
            eprintln!("wrote function key (n={}) -> {}", msk.pp.n, out.display());
        }
        Cmd::Encrypt { msk, vec, seed, uncompressed, out } => {
            let msk = read_msk(&std::fs::read(&msk)?)?;
            let y = load_vector(&vec)?;
            let mut rng = make_rng(seed);
            let ct = encrypt(&msk, &y, &mut rng)?;
            std::fs::write(&out, write_ciphertext(&ct, &msk.pp, !uncompressed))?;
            eprintln!("wrote ciphertext (n={}) -> {}", msk.pp.n, out.display());
        }
        Cmd::Decrypt { msk, pp, key, ct, table, tuning } => {
            let (key_pp, sk) = read_function_key(&std::fs::read(&key)?)?;
            let (ct_pp, ciphertext) = read_ciphertext(&std::fs::read(&ct)?)?;
            if key_pp != ct_pp {
                bail!(FhipeError::BadHeader(
                    "function key and ciphertext carry different public parameters".into()
                ));
            }
            let pp: PublicParams = if let Some(p) = msk {
                read_msk(&std::fs::read(&p)?)?.pp
            } else if let Some(p) = pp {
                read_header(&p)?.public_params()
            } else {
                ct_pp
            };
            if pp != ct_pp {
                bail!(FhipeError::BadHeader(
                    "provided public parameters do not match the ciphertext".into()
                ));
            }
            let loaded_table = match table {
                Some(p) => Some(DlogTable::from_bytes(&std::fs::read(&p)?)?),
                None => None,
            };
            let outcome = decrypt_with(&pp, &sk, &ciphertext, loaded_table.as_ref(), &tuning.options()?)?;
            println!("{outcome}");
        }
        Cmd::Table { out, alpha, msk, key, ct, ct_free_base } => {
            let key_material = match &key {
                Some(p) => Some(read_function_key(&std::fs::read(p)?)?),
                None => None,
            };
            let base = match (&key_material, &ct, ct_free_base) {
                (Some((_, sk)), Some(ct_path), false) => {
                    let (_, ciphertext) = read_ciphertext(&std::fs::read(ct_path)?)?;
                    pairing(&sk.k1, &ciphertext.c1)?
                }
                (Some((_, sk)), None, true) => pairing(&sk.k1, &g2_generator())?,
                (Some(_), None, false) => {
                    bail!("--key requires either --ct or --ct-free-base")
                }
                (Some(_), Some(_), true) => unreachable!("clap conflicts_with"),
                (None, _, _) => gt_generator(),
            };
            let pp_alpha = if let Some(p) = &msk {
                Some(read_msk(&std::fs::read(p)?)?.pp.dlog_params()?.table_alpha())
            } else {
                key_material
                    .as_ref()
                    .map(|(pp, _)| pp.dlog_params().map(|d| d.table_alpha()))
                    .transpose()?
            };
            let alpha = alpha
                .or(pp_alpha)
                .context("no table size: pass --alpha, --msk or --key")?;
            let table = build_table_power_tree(&base, alpha)?;
            std::fs::write(&out, table.to_bytes())?;
            eprintln!(
                "wrote table: alpha={} entries={}B ops={}mul+{}sqr -> {}",
                table.alpha(),
                table.memory_bytes(),
                table.build_stats().multiplications,
                table.build_stats().squarings,
                out.display()
            );
        }
        Cmd::Bench { suite, n_list, alpha_list, csv, svg, iters, seed, tuning } => {
            let cfg = bench::BenchConfig {
                suite,
                n_list: bench::parse_u32_list(&n_list)?,
                alpha_list: bench::parse_u64_list(&alpha_list)?,
                iterations: iters,
                seed,
                strategy: tuning.mp_strategy.parse()?,
                fast_lookup: tuning.fast_lookup,
            };
            let out = bench::run(&cfg)?;
            std::fs::write(&csv, &out.csv)?;
            for line in &out.report {
                println!("{line}");
            }
            if let Some(svg_path) = svg {
                match &out.svg {
                    Some(body) => std::fs::write(&svg_path, body)?,
                    None => bail!("too few points for an SVG; widen --n-list or --alpha-list"),
                }
            }
            eprintln!("wrote bench CSV -> {}", csv.display());
        }
        Cmd::DemoClassify { msk, model, meta, sample, table, seed, show_score, tuning } => {
            let msk = read_msk(&std::fs::read(&msk)?)?;
            let model = ClassifierModel::from_files(
                &std::fs::read_to_string(&model)?,
                &std::fs::read_to_string(&meta)?,
            )?;
            let sample_values = read_vector_csv_path(&sample)?;
            let sample_bound = sample_values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
            let sample = PlainVector::new(sample_values, sample_bound, false)?;
            model.validate_against(&msk.pp, sample_bound)?;

            let mut rng = make_rng(seed);
            let sk_w = keygen(&msk, &model.weights, &mut rng)?;
            let ct_s = encrypt(&msk, &sample, &mut rng)?;
            let loaded_table = match table {
                Some(p) => Some(DlogTable::from_bytes(&std::fs::read(&p)?)?),
                None => None,
            };
            let outcome = decrypt_with(
                &msk.pp,
                &sk_w,
                &ct_s,
                loaded_table.as_ref(),
                &tuning.options()?,
            )?;
            match outcome.value() {
                Some(z) => {
                    let label = if z <= model.threshold { ClassLabel::C0 } else { ClassLabel::C1 };
                    println!("{label}");
                    if show_score {
                        println!("z={z} threshold={}", model.threshold);
                    }
                }
                None => println!("BOT"),
            }
        }
        Cmd::DemoLocalize {
            msk, db, query, k, reveal_distances, min_dbm, max_dbm, seed, tuning,
        } => {
            let msk = read_msk(&std::fs::read(&msk)?)?;
            let cfg = QuantizationConfig { min_dbm, max_dbm, ..Default::default() };
            let db = FingerprintDatabase::from_csv(&std::fs::read_to_string(&db)?, &cfg)?;
            let raw_query = read_vector_csv_path(&query)?;
            if raw_query.len() != db.n_aps {
                bail!(FhipeError::DimensionMismatch { expected: db.n_aps, got: raw_query.len() });
            }
            let quantized: Vec<u8> =
                raw_query.iter().map(|&v| quantize_rssi(v as i32, &cfg)).collect();
            let bound = db
                .value_bound()
                .max(quantized.iter().map(|&v| v as u64).max().unwrap_or(0));

            let mut rng = make_rng(seed);
            let keys = keygen_database(&msk, &db, bound, &mut rng)?;
            let ct = encrypt_query(&msk, &quantized, bound, &mut rng)?;
            let nn = nearest_neighbors(&ct, &keys, k, &msk.pp, None, &tuning.options()?)?;
            if nn.failed > 0 {
                eprintln!("warning: {} entries decrypted out of range and were skipped", nn.failed);
            }
            let indices: Vec<u32> = nn.ranked.iter().map(|r| r.index).collect();
            let json = if reveal_distances {
                let distances: Vec<u64> = nn.ranked.iter().map(|r| r.distance).collect();
                serde_json::json!({ "indices": indices, "distances": distances })
            } else {
                serde_json::json!({ "indices": indices })
            };
            println!("{json}");
        }
    }
    Ok(())
}

/// 1 usage, 2 I/O or format, 3 violated crypto contract.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<FhipeError>() {
            return match e {
                FhipeError::Io(_)
                | FhipeError::Csv { .. }
                | FhipeError::BadHeader(_)
                | FhipeError::MalformedLength { .. }
                | FhipeError::BadEncoding
                | FhipeError::NotOnCurve
                | FhipeError::WrongSubgroup
                | FhipeError::NonCanonicalScalar => 2,
                FhipeError::InvalidParameter(_) => 1,
                _ => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    2
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                exit(0);
            }
            let _ = e.print();
            exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            exit(exit_code_for(&e));
        }
    }
}
