//! Reading and writing `IRWK` key records.

use std::fs;
use std::path::Path;

use ironwood::wire::{self, Record, RecordType};
use ironwood::{DeviceKeyMaterial, HomeDeviceSecret, KeyedHashSigner, SystemParams, Ttp};

use crate::error::{Classify, CliResult, Failure};

pub fn read_record(path: &Path) -> CliResult<Record> {
    let bytes = fs::read(path).io_ctx(format!("reading {}", path.display()))?;
    Record::decode(&bytes).invalid_ctx(format!("decoding {}", path.display()))
}

pub fn read_payload(path: &Path, kind: RecordType) -> CliResult<Vec<u8>> {
    read_record(path)?
        .expect(kind)
        .invalid_ctx(format!("{} is not a {kind:?} record", path.display()))
}

pub fn write_record(path: &Path, kind: RecordType, payload: Vec<u8>) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).io_ctx(format!("creating {}", dir.display()))?;
    }
    let bytes = Record { kind, payload }.encode();
    fs::write(path, bytes).io_ctx(format!("writing {}", path.display()))
}

pub fn load_params(path: &Path) -> CliResult<SystemParams> {
    let payload = read_payload(path, RecordType::SystemParams)?;
    wire::decode_params(&payload).invalid_ctx(format!("decoding parameters in {}", path.display()))
}

pub fn load_ttp(params: &SystemParams, path: &Path) -> CliResult<Ttp> {
    let payload = read_payload(path, RecordType::TtpSecret)?;
    wire::decode_ttp_secret(params, &payload).invalid_ctx(format!("decoding {}", path.display()))
}

pub fn load_hd(params: &SystemParams, path: &Path) -> CliResult<HomeDeviceSecret> {
    let payload = read_payload(path, RecordType::HdSecret)?;
    wire::decode_hd_secret(params, &payload).invalid_ctx(format!("decoding {}", path.display()))
}

pub fn load_device(params: &SystemParams, path: &Path) -> CliResult<DeviceKeyMaterial> {
    let payload = read_payload(path, RecordType::DeviceKey)?;
    wire::decode_device_key(params, &payload).invalid_ctx(format!("decoding {}", path.display()))
}

/// Accepts a verifier record or the TTP secret itself.
pub fn load_verifier(params: &SystemParams, path: &Path) -> CliResult<KeyedHashSigner> {
    let record = read_record(path)?;
    match record.kind {
        RecordType::Verifier => wire::decode_verifier(params, &record.payload)
            .invalid_ctx(format!("decoding {}", path.display())),
        RecordType::TtpSecret => Ok(load_ttp(params, path)?.signer),
        other => Err(Failure::validation(format!(
            "{} holds a {other:?} record, expected a verifier",
            path.display()
        ))),
    }
}
