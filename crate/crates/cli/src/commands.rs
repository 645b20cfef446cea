//! Offline commands: provisioning, in-process exchange, bench, calculator.

use std::fs;

use ironwood::handshake::run_exchange;
use ironwood::perf::run_sweep;
use ironwood::protocol::security_level as compute_security;
use ironwood::wire::{self, RecordType};
use ironwood::{ConjugateConfig, FieldSpec, HandshakeError, SessionConfig, SystemParams, Ttp};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Classify, CliResult, Failure};
use crate::keyfiles::{load_device, load_hd, load_params, load_ttp, load_verifier, write_record};
use crate::{BenchArgs, ExportHdArgs, InitArgs, ProvisionArgs, RunArgs, SecurityArgs, SessionArgs};

pub fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

pub fn session_config(a: &SessionArgs) -> CliResult<SessionConfig> {
    if a.beta_factors == 0 {
        return Err(Failure::usage("--beta-factors must be positive"));
    }
    if a.pure_insertions == 0 {
        return Err(Failure::usage(
            "--pure-insertions must be positive: β' = β is insecure",
        ));
    }
    Ok(SessionConfig {
        beta_factors: a.beta_factors,
        pure_insertions: a.pure_insertions,
    })
}

fn parse_field(name: &str) -> CliResult<FieldSpec> {
    FieldSpec::from_name(name).map_err(Failure::usage)
}

pub fn ttp_init(a: &InitArgs, seed: Option<u64>) -> CliResult<()> {
    let spec = parse_field(&a.field)?;
    let mut rng = rng_for(seed);
    let params = SystemParams::generate(a.n, spec, &mut rng).map_err(Failure::usage)?;
    let cfg = ConjugateConfig {
        r: a.conjugates,
        z_length: a.z_length,
        word_length: a.word_length,
        pure_fraction: a.pure_fraction,
    };
    let ttp = Ttp::setup(params, &cfg, a.signer_id.as_bytes(), &mut rng).map_err(Failure::usage)?;
    let params_path = a.out.join("params.irwk");
    let ttp_path = a.out.join("ttp.irwk");
    write_record(
        &params_path,
        RecordType::SystemParams,
        wire::encode_params(&ttp.params),
    )?;
    write_record(
        &ttp_path,
        RecordType::TtpSecret,
        wire::encode_ttp_secret(&ttp),
    )?;
    println!(
        "params: N={} field={} fingerprint={}",
        ttp.params.n(),
        spec.name(),
        hex::encode(ttp.params.fingerprint())
    );
    println!(
        "conjugates: {} per set, {} pure",
        ttp.alpha.len(),
        ttp.alpha.pure_indices().len()
    );
    println!("wrote {} and {}", params_path.display(), ttp_path.display());
    Ok(())
}

pub fn ttp_provision(a: &ProvisionArgs, seed: Option<u64>) -> CliResult<()> {
    let params = load_params(&a.params)?;
    let ttp = load_ttp(&params, &a.ttp)?;
    if a.beta_factors == 0 {
        return Err(Failure::usage("--beta-factors must be positive"));
    }
    let mut rng = rng_for(seed);
    let key = ttp
        .issue_device(a.id.as_bytes(), a.beta_factors, &mut rng)
        .invalid_ctx("issuing device key")?;
    write_record(
        &a.out,
        RecordType::DeviceKey,
        wire::encode_device_key(&params, &key),
    )?;
    println!("device {}: wrote {}", a.id, a.out.display());
    if let Some(path) = &a.cert_out {
        write_record(path, RecordType::Certificate, wire::encode_cert(&key.cert))?;
        println!("certificate: wrote {}", path.display());
    }
    Ok(())
}

pub fn ttp_export_hd(a: &ExportHdArgs) -> CliResult<()> {
    let params = load_params(&a.params)?;
    let ttp = load_ttp(&params, &a.ttp)?;
    write_record(
        &a.out,
        RecordType::HdSecret,
        wire::encode_hd_secret(&params, &ttp.hd_secret()),
    )?;
    println!("home device secret: wrote {}", a.out.display());
    if let Some(path) = &a.verifier_out {
        write_record(
            path,
            RecordType::Verifier,
            wire::encode_verifier(&params, &ttp.signer),
        )?;
        println!("verifier: wrote {}", path.display());
    }
    Ok(())
}

pub fn exchange_run(a: &RunArgs, seed: Option<u64>) -> CliResult<()> {
    if a.runs == 0 {
        return Err(Failure::usage("--runs must be positive"));
    }
    let params = load_params(&a.params)?;
    let hd = load_hd(&params, &a.hd_key)?;
    let device = load_device(&params, &a.device_key)?;
    let verifier = load_verifier(&params, &a.verifier)?;
    let cfg = session_config(&a.session)?;
    let mut rng = rng_for(seed);
    let (mut agreed, mut confirmed) = (0, 0);
    for _ in 0..a.runs {
        match run_exchange(&params, &hd, &verifier, &device, cfg, &mut rng, |_| {}) {
            Ok(out) => {
                confirmed += 1;
                if out.agreed() {
                    agreed += 1;
                }
            }
            Err(HandshakeError::ConfirmationFailed) => {}
            Err(HandshakeError::Rejected(r)) => {
                return Err(Failure::validation(format!(
                    "device public key rejected: {r}"
                )));
            }
            Err(e) => return Err(Failure::validation(e)),
        }
    }
    if agreed == a.runs && confirmed == a.runs {
        println!("{}/{} agreed, confirmed", agreed, a.runs);
        Ok(())
    } else {
        println!(
            "{}/{} agreed, {}/{} confirmed",
            agreed, a.runs, confirmed, a.runs
        );
        Err(Failure::validation("not every exchange confirmed"))
    }
}

pub fn bench(a: &BenchArgs, seed: Option<u64>) -> CliResult<()> {
    let spec = parse_field(&a.field)?;
    if a.runs < 2 || a.min_len == 0 || a.max_len <= a.min_len {
        return Err(Failure::usage(
            "need --runs >= 2 and 0 < --min-len < --max-len",
        ));
    }
    let mut rng = rng_for(seed);
    let params = SystemParams::generate(a.n, spec, &mut rng).map_err(Failure::usage)?;
    let ttp = Ttp::setup(params, &ConjugateConfig::default(), b"bench", &mut rng)
        .map_err(Failure::usage)?;
    let report = run_sweep(
        &ttp.params,
        &ttp.hd_secret(),
        a.min_len,
        a.max_len,
        a.runs,
        &mut rng,
    )
    .invalid_ctx("running sweep")?;
    println!(
        "{:>8} {:>8} {:>8} {:>12} {:>12}",
        "|β|", "|β'|", "total", "field ops", "wall µs"
    );
    for r in &report.records {
        println!(
            "{:>8} {:>8} {:>8} {:>12} {:>12.1}",
            r.artin_length_beta,
            r.artin_length_beta_prime,
            r.total_length(),
            r.field_op_count,
            r.wall_time_ns as f64 / 1000.0
        );
    }
    println!(
        "op-count fit: {:.3} ops/letter + {:.1}, max relative residual {:.3}%",
        report.ops.slope,
        report.ops.intercept,
        100.0 * report.ops.max_relative_residual
    );
    println!(
        "per-letter cost: max {} (bound 3N+2 = {})",
        report.max_ops_per_letter(),
        report.per_letter_bound()
    );
    println!(
        "wall-time slope: {:.2} ns/letter (informational)",
        report.wall.slope
    );
    if let Some(path) = &a.csv {
        fs::write(path, report.to_csv()).io_ctx(format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if report.ops.max_relative_residual >= 0.05 {
        return Err(Failure::validation(
            "op counts are not linear in Artin length",
        ));
    }
    if report.max_ops_per_letter() > report.per_letter_bound() {
        return Err(Failure::validation("per-letter cost exceeds 3N+2"));
    }
    Ok(())
}

pub fn security_level(a: &SecurityArgs) -> CliResult<()> {
    let r = compute_security(a.q, a.n, a.l).map_err(Failure::usage)?;
    match r.l {
        Some(l) => println!("q = {}, N = {}, L = {}", r.q, r.n, l),
        None => println!("q = {}, N = {}", r.q, r.n),
    }
    println!("matrix secret (q^N):          {:.3} bits", r.matrix_bits);
    println!("T-values ((q-2)^N):           {:.3} bits", r.tvalue_bits);
    if let Some(b) = r.braid_bits {
        println!("braids ((L/2)^(N-1)):         {:.3} bits", b);
    }
    println!(
        "exchanged key (q^N):          {:.3} bits",
        r.exchanged_key_bits
    );
    println!("overall:                      {:.3} bits", r.overall_bits);
    println!("L bound 2(q-2)^(1-1/N):       {:.3}", r.l_bound);
    println!("minimal L:                    {}", r.min_l);
    println!("minimal L with braids >= T:   {}", r.min_l_matching);
    Ok(())
}
