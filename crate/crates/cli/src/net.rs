//! TCP transport: one frame per message, 10 s per-socket timeout.

use std::io::{self, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use ironwood::wire::{Frame, WireError};
use ironwood::{
    DeviceHandshake, DeviceKeyMaterial, HandshakeError, HdHandshake, HomeDeviceSecret,
    KeyedHashSigner, SessionConfig, SystemParams, ValidationPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::commands::{rng_for, session_config};
use crate::error::{Classify, CliResult, ExitKind, Failure};
use crate::keyfiles::{load_device, load_hd, load_params, load_verifier};
use crate::{ConnectArgs, ServeArgs};

const TIMEOUT: Duration = Duration::from_secs(10);

/// Short public tag for logging a session key.
pub fn key_fingerprint(key: &[u8; 32]) -> String {
    let mut h = Sha256::new();
    h.update(b"ironwood-v1-keyfp");
    h.update(key);
    hex::encode(&h.finalize()[..8])
}

fn read_frame(stream: &mut TcpStream) -> Result<Vec<u8>, HandshakeError> {
    Ok(Frame::read_from(stream)?.encode()?)
}

fn send(stream: &mut TcpStream, frame: &[u8]) -> Result<(), HandshakeError> {
    stream.write_all(frame).map_err(WireError::from)?;
    stream.flush().map_err(WireError::from)?;
    Ok(())
}

fn classify(e: HandshakeError) -> Failure {
    match e {
        HandshakeError::Wire(WireError::Io(io)) => Failure::new(ExitKind::Network, io),
        other => Failure::new(ExitKind::Validation, other),
    }
}

struct Server {
    params: SystemParams,
    hd: HomeDeviceSecret,
    verifier: KeyedHashSigner,
    config: SessionConfig,
}

fn serve_one(
    server: &Server,
    mut stream: TcpStream,
    seed: u64,
) -> Result<(String, [u8; 32]), HandshakeError> {
    stream
        .set_read_timeout(Some(TIMEOUT))
        .map_err(WireError::from)?;
    stream
        .set_write_timeout(Some(TIMEOUT))
        .map_err(WireError::from)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hd = HdHandshake::new(
        &server.params,
        &server.hd,
        &server.verifier,
        ValidationPolicy::default(),
        server.config,
    );
    let cert = read_frame(&mut stream)?;
    let response = hd.on_cert(&cert, &mut rng)?;
    send(&mut stream, &response)?;
    let confirm = read_frame(&mut stream)?;
    let reply = hd.on_confirm(&confirm)?;
    send(&mut stream, &reply)?;
    let id = String::from_utf8_lossy(hd.device_id().unwrap_or_default()).into_owned();
    Ok((id, hd.session_key().expect("set after on_cert")))
}

pub fn serve(a: &ServeArgs, seed: Option<u64>) -> CliResult<()> {
    let params = load_params(&a.params)?;
    let hd = load_hd(&params, &a.hd_key)?;
    let verifier = load_verifier(&params, &a.verifier)?;
    let config = session_config(&a.session)?;
    if a.max_sessions == Some(0) {
        return Err(Failure::usage("--max-sessions must be positive"));
    }
    let listener = TcpListener::bind(&a.listen).net_ctx(format!("binding {}", a.listen))?;
    let local = listener.local_addr().net_ctx("reading local address")?;
    println!("listening on {local}");
    io::stdout().flush().io_ctx("flushing stdout")?;

    let server = Arc::new(Server {
        params,
        hd,
        verifier,
        config,
    });
    let mut seeds = rng_for(seed);
    let mut handles = Vec::new();
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let peer = stream
            .peer_addr()
            .map(|p| p.to_string())
            .unwrap_or_else(|_| "?".into());
        let server = Arc::clone(&server);
        let session_seed: u64 = seeds.gen();
        handles.push(thread::spawn(move || {
            match serve_one(&server, stream, session_seed) {
                Ok((id, key)) => {
                    println!(
                        "session {peer}: device {id} confirmed, key {}",
                        key_fingerprint(&key)
                    );
                    true
                }
                Err(e) => {
                    println!("session {peer}: failed: {e}");
                    false
                }
            }
        }));
        if a.max_sessions.is_some_and(|m| handles.len() >= m) {
            break;
        }
    }
    let total = handles.len();
    let ok = handles
        .into_iter()
        .map(|h| h.join().unwrap_or(false))
        .filter(|&b| b)
        .count();
    println!("{ok}/{total} sessions confirmed");
    if ok == total {
        Ok(())
    } else {
        Err(Failure::validation(format!(
            "{} of {total} sessions failed",
            total - ok
        )))
    }
}

pub fn connect(a: &ConnectArgs) -> CliResult<()> {
    let params = load_params(&a.params)?;
    let key: DeviceKeyMaterial = load_device(&params, &a.device_key)?;
    let addr = a
        .connect
        .to_socket_addrs()
        .net_ctx(format!("resolving {}", a.connect))?
        .next()
        .ok_or_else(|| {
            Failure::new(
                ExitKind::Network,
                anyhow::anyhow!("{} resolves to nothing", a.connect),
            )
        })?;
    let mut stream =
        TcpStream::connect_timeout(&addr, TIMEOUT).net_ctx(format!("connecting to {addr}"))?;
    stream
        .set_read_timeout(Some(TIMEOUT))
        .net_ctx("setting timeout")?;
    stream
        .set_write_timeout(Some(TIMEOUT))
        .net_ctx("setting timeout")?;

    let mut dev = DeviceHandshake::new(&params, &key);
    let cert = dev.start().map_err(classify)?;
    send(&mut stream, &cert).map_err(classify)?;
    let response = read_frame(&mut stream).map_err(classify)?;
    let confirm = dev.on_response(&response).map_err(classify)?;
    send(&mut stream, &confirm).map_err(classify)?;
    let reply = match read_frame(&mut stream) {
        Ok(f) => f,
        // The HD hangs up instead of answering a bad tag.
        Err(HandshakeError::Wire(WireError::Io(e))) if e.kind() == io::ErrorKind::UnexpectedEof => {
            return Err(Failure::validation(
                "home device did not confirm the session",
            ));
        }
        Err(e) => return Err(classify(e)),
    };
    dev.on_hd_confirm(&reply).map_err(classify)?;
    let id = String::from_utf8_lossy(&key.cert.device_id).into_owned();
    println!(
        "device {id} confirmed, key {}",
        key_fingerprint(&dev.session_key().expect("set after response"))
    );
    Ok(())
}
