//! Human-readable and JSON views of key records and frames.

use std::fs;

use ironwood::wire::{self, Frame, MessageType, Record, RecordType, FRAME_MAGIC, RECORD_MAGIC};
use ironwood::{BraidWord, Certificate, ConjugateSet, Fe, Matrix, SystemParams};
use serde_json::{json, Value};

use crate::error::{Classify, CliResult, Failure};
use crate::keyfiles::load_params;
use crate::InspectArgs;

fn fe_hex(es: &[Fe]) -> String {
    let bytes: Vec<u8> = es.iter().flat_map(|e| e.value().to_be_bytes()).collect();
    hex::encode(bytes)
}

fn matrix_json(m: &Matrix) -> Value {
    json!({ "n": m.n(), "rows": (0..m.n()).map(|r| fe_hex(m.row(r))).collect::<Vec<_>>() })
}

fn word_json(w: &BraidWord) -> Value {
    json!({ "length": w.len(), "word": w.to_string() })
}

fn set_json(s: &ConjugateSet) -> Value {
    json!(s
        .conjugates
        .iter()
        .zip(&s.pure_flags)
        .map(|(w, p)| json!({ "pure": p, "conjugate": word_json(w) }))
        .collect::<Vec<_>>())
}

fn cert_json(c: &Certificate) -> Value {
    json!({
        "algorithm": c.algorithm,
        "field": c.field.name(),
        "n": c.n(),
        "params_fingerprint": hex::encode(c.params_fingerprint),
        "device_id": String::from_utf8_lossy(&c.device_id),
        "signer_id": String::from_utf8_lossy(&c.signer_id),
        "public_key": {
            "matrix": matrix_json(&c.public_key.matrix),
            "perm": c.public_key.perm.images(),
        },
        "signature": hex::encode(&c.signature),
    })
}

fn need_params<'a>(params: &'a Option<SystemParams>, what: &str) -> CliResult<&'a SystemParams> {
    params
        .as_ref()
        .ok_or_else(|| Failure::usage(format!("--params is required to decode a {what}")))
}

fn record_json(rec: &Record, params: &Option<SystemParams>) -> CliResult<Value> {
    let p = &rec.payload;
    Ok(match rec.kind {
        RecordType::SystemParams => {
            let sp = wire::decode_params(p).invalid_ctx("decoding parameters")?;
            json!({
                "record": "system-params",
                "n": sp.n(),
                "field": sp.field().spec().name(),
                "fingerprint": hex::encode(sp.fingerprint()),
                "m0": matrix_json(sp.m0()),
            })
        }
        RecordType::Certificate => {
            let c = wire::decode_cert(p).invalid_ctx("decoding certificate")?;
            json!({ "record": "certificate", "certificate": cert_json(&c) })
        }
        RecordType::HdSecret => {
            let sp = need_params(params, "home-device secret")?;
            let hd = wire::decode_hd_secret(sp, p).invalid_ctx("decoding home-device secret")?;
            json!({
                "record": "hd-secret",
                "tvalues": fe_hex(hd.tvals.values()),
                "alpha": set_json(&hd.alpha_set),
            })
        }
        RecordType::DeviceKey => {
            let sp = need_params(params, "device key")?;
            let k = wire::decode_device_key(sp, p).invalid_ctx("decoding device key")?;
            json!({
                "record": "device-key",
                "coefficients": fe_hex(&k.coeffs),
                "c": matrix_json(&k.c_matrix),
                "c_inverse": matrix_json(&k.c_inverse),
                "certificate": cert_json(&k.cert),
            })
        }
        RecordType::TtpSecret => {
            let sp = need_params(params, "TTP secret")?;
            let t = wire::decode_ttp_secret(sp, p).invalid_ctx("decoding TTP secret")?;
            json!({
                "record": "ttp-secret",
                "tvalues": fe_hex(t.tvals.values()),
                "alpha": set_json(&t.alpha),
                "gamma": set_json(&t.gamma),
                "signer_id": String::from_utf8_lossy(ironwood::CertSigner::signer_id(&t.signer)),
                "signing_key": hex::encode(t.signer.key()),
            })
        }
        RecordType::Verifier => {
            let sp = need_params(params, "verifier")?;
            let v = wire::decode_verifier(sp, p).invalid_ctx("decoding verifier")?;
            json!({
                "record": "verifier",
                "signer_id": String::from_utf8_lossy(ironwood::CertVerifier::signer_id(&v)),
                "key": hex::encode(v.key()),
            })
        }
    })
}

fn frame_json(frame: &Frame, params: &Option<SystemParams>) -> CliResult<Value> {
    let p = &frame.payload;
    Ok(match frame.msg_type {
        MessageType::Cert => {
            let c = wire::decode_cert(p).invalid_ctx("decoding certificate")?;
            json!({ "frame": "cert", "certificate": cert_json(&c) })
        }
        MessageType::Response => {
            let sp = need_params(params, "response")?;
            let body = wire::response_len(sp.field().spec(), sp.n());
            if p.len() < body {
                return Err(Failure::validation("response frame is truncated"));
            }
            let r = wire::decode_response(sp.field(), sp.n(), &p[..body])
                .invalid_ctx("decoding response")?;
            json!({
                "frame": "response",
                "mix": matrix_json(&r.mix),
                "s": fe_hex(&r.s),
                "nonce": hex::encode(&p[body..]),
            })
        }
        MessageType::Confirm => {
            let c = wire::decode_confirm(p).invalid_ctx("decoding confirmation")?;
            json!({ "frame": "confirm", "nonce": hex::encode(c.nonce), "tag": hex::encode(c.tag) })
        }
        MessageType::Params => {
            let sp = wire::decode_params(p).invalid_ctx("decoding parameters")?;
            json!({
                "frame": "params",
                "n": sp.n(),
                "field": sp.field().spec().name(),
                "fingerprint": hex::encode(sp.fingerprint()),
            })
        }
    })
}

fn summary(v: &Value) -> String {
    let kind = v
        .get("record")
        .or_else(|| v.get("frame"))
        .and_then(Value::as_str)
        .unwrap_or("?");
    let mut out = kind.to_string();
    let cert = v.get("certificate");
    for (label, val) in [
        ("N", v.get("n").or_else(|| cert.and_then(|c| c.get("n")))),
        (
            "field",
            v.get("field").or_else(|| cert.and_then(|c| c.get("field"))),
        ),
        (
            "fingerprint",
            v.get("fingerprint")
                .or_else(|| cert.and_then(|c| c.get("params_fingerprint"))),
        ),
        ("device", cert.and_then(|c| c.get("device_id"))),
        (
            "signer",
            v.get("signer_id")
                .or_else(|| cert.and_then(|c| c.get("signer_id"))),
        ),
    ] {
        if let Some(val) = val {
            let text = val
                .as_str()
                .map(str::to_string)
                .unwrap_or_else(|| val.to_string());
            out.push_str(&format!("\n  {label}: {text}"));
        }
    }
    for set in ["alpha", "gamma"] {
        if let Some(Value::Array(entries)) = v.get(set) {
            let pure = entries.iter().filter(|e| e["pure"] == json!(true)).count();
            out.push_str(&format!(
                "\n  {set}: {} conjugates, {pure} pure",
                entries.len()
            ));
        }
    }
    out
}

pub fn inspect(a: &InspectArgs) -> CliResult<()> {
    let bytes = fs::read(&a.file).io_ctx(format!("reading {}", a.file.display()))?;
    let params = a.params.as_deref().map(load_params).transpose()?;
    let value = if bytes.starts_with(&RECORD_MAGIC) {
        let rec = Record::decode(&bytes).invalid_ctx("decoding record")?;
        record_json(&rec, &params)?
    } else if bytes.starts_with(&FRAME_MAGIC) {
        let frame = Frame::decode(&bytes).invalid_ctx("decoding frame")?;
        frame_json(&frame, &params)?
    } else {
        return Err(Failure::validation(format!(
            "{} is neither a key record nor a frame",
            a.file.display()
        )));
    };
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("JSON values serialize")
        );
    } else {
        println!("{}", summary(&value));
    }
    Ok(())
}
