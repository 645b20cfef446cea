//! Canonical byte encodings.
//!
//! Integers are big-endian. Field elements take `ceil(bitlen(q-1)/8)` bytes.
//! Permutations are stored 0-based at `ceil(log2 N)` bits per entry,
//! MSB-first, zero-padded to a byte boundary. Messages travel in frames
//! (`"IRWD" || version || type || u32 length || payload`); stored keys use
//! records (`"IRWK" || version || type || payload`).

use std::io::{Read, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::braid::{BraidWord, Letter, Permutation};
use crate::emult::TValues;
use crate::field::{Fe, Field, FieldSpec};
use crate::keygen::{
    Certificate, ConjugateSet, DeviceKeyMaterial, HomeDeviceSecret, KeygenError, PublicKey,
    SystemParams, Ttp,
};
use crate::matrix::Matrix;
use crate::protocol::{ConfirmationTag, HdResponse};
use crate::signer::KeyedHashSigner;

pub const FRAME_MAGIC: [u8; 4] = *b"IRWD";
pub const RECORD_MAGIC: [u8; 4] = *b"IRWK";
pub const VERSION: u8 = 0x01;
pub const MAX_PAYLOAD: usize = 1 << 20;
pub const NONCE_LEN: usize = 16;
pub const TAG_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("truncated input: needed {needed} bytes, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0:#04x}")]
    Version(u8),
    #[error("unknown message type {0:#04x}")]
    UnknownMessageType(u8),
    #[error("unknown record type {0:#04x}")]
    UnknownRecordType(u8),
    #[error("expected {expected:?}, found {found:?}")]
    UnexpectedType { expected: String, found: String },
    #[error("payload of {0} bytes exceeds the frame limit")]
    TooLarge(usize),
    #[error("element {0} out of range for the field")]
    ElementOutOfRange(u32),
    #[error("permutation is not a bijection")]
    NotBijective,
    #[error("nonzero padding bits")]
    BadPadding,
    #[error("strand count {0} not supported")]
    BadStrandCount(usize),
    #[error("malformed {0}")]
    Malformed(&'static str),
    #[error("parameter fingerprint mismatch")]
    FingerprintMismatch,
    #[error("invalid system parameters: {0}")]
    Params(#[from] KeygenError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Frame message types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageType {
    Cert = 0x01,
    Response = 0x02,
    Confirm = 0x03,
    Params = 0x04,
}

impl MessageType {
    pub fn from_byte(b: u8) -> Result<Self, WireError> {
        Ok(match b {
            0x01 => MessageType::Cert,
            0x02 => MessageType::Response,
            0x03 => MessageType::Confirm,
            0x04 => MessageType::Params,
            other => return Err(WireError::UnknownMessageType(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MessageType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(msg_type: MessageType, payload: Vec<u8>) -> Self {
        Frame { msg_type, payload }
    }

    pub fn encode(&self) -> Result<Vec<u8>, WireError> {
        if self.payload.len() > MAX_PAYLOAD {
            return Err(WireError::TooLarge(self.payload.len()));
        }
        let mut out = Vec::with_capacity(10 + self.payload.len());
        out.extend_from_slice(&FRAME_MAGIC);
        out.push(VERSION);
        out.push(self.msg_type as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        Ok(out)
    }

    /// Decodes exactly one frame occupying all of `bytes`.
    pub fn decode(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::new(bytes);
        let (msg_type, len) = parse_frame_header(r.take(10)?)?;
        let payload = r.take(len)?.to_vec();
        r.finish()?;
        Ok(Frame { msg_type, payload })
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self, WireError> {
        let mut header = [0u8; 10];
        reader.read_exact(&mut header)?;
        let (msg_type, len) = parse_frame_header(&header)?;
        let mut payload = vec![0u8; len];
        reader.read_exact(&mut payload)?;
        Ok(Frame { msg_type, payload })
    }

    pub fn write_to<W: Write>(&self, writer: &mut W) -> Result<(), WireError> {
        writer.write_all(&self.encode()?)?;
        writer.flush()?;
        Ok(())
    }

    pub fn expect(self, msg_type: MessageType) -> Result<Vec<u8>, WireError> {
        if self.msg_type != msg_type {
            return Err(WireError::UnexpectedType {
                expected: format!("{msg_type:?}"),
                found: format!("{:?}", self.msg_type),
            });
        }
        Ok(self.payload)
    }
}

fn parse_frame_header(h: &[u8]) -> Result<(MessageType, usize), WireError> {
    let magic: [u8; 4] = h[0..4].try_into().expect("4 bytes");
    if magic != FRAME_MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    if h[4] != VERSION {
        return Err(WireError::Version(h[4]));
    }
    let msg_type = MessageType::from_byte(h[5])?;
    let len = u32::from_be_bytes(h[6..10].try_into().expect("4 bytes")) as usize;
    if len > MAX_PAYLOAD {
        return Err(WireError::TooLarge(len));
    }
    Ok((msg_type, len))
}

/// Bounds-checked cursor.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let available = self.buf.len() - self.pos;
        if n > available {
            return Err(WireError::Truncated {
                needed: n,
                available,
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn array<const K: usize>(&mut self) -> Result<[u8; K], WireError> {
        Ok(self.take(K)?.try_into().expect("K bytes"))
    }

    fn short_bytes(&mut self) -> Result<Vec<u8>, WireError> {
        let len = self.u16()? as usize;
        Ok(self.take(len)?.to_vec())
    }

    fn elem(&mut self, field: &Field) -> Result<Fe, WireError> {
        let w = field.spec().element_bytes();
        let v = self
            .take(w)?
            .iter()
            .fold(0u32, |acc, &b| (acc << 8) | b as u32);
        field.elem(v).map_err(|_| WireError::ElementOutOfRange(v))
    }

    fn elems(&mut self, field: &Field, count: usize) -> Result<Vec<Fe>, WireError> {
        (0..count).map(|_| self.elem(field)).collect()
    }

    fn matrix(&mut self, field: &Field, n: usize) -> Result<Matrix, WireError> {
        Ok(Matrix::from_rows(n, self.elems(field, n * n)?).expect("n² entries"))
    }

    fn strands(&mut self) -> Result<usize, WireError> {
        let n = self.u8()? as usize;
        if n < 2 {
            return Err(WireError::BadStrandCount(n));
        }
        Ok(n)
    }

    fn finish(self) -> Result<(), WireError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(WireError::TrailingBytes(extra)),
        }
    }
}

fn put_elem(out: &mut Vec<u8>, spec: FieldSpec, e: Fe) {
    let w = spec.element_bytes();
    let v = e.value() as u32;
    for k in (0..w).rev() {
        out.push((v >> (8 * k)) as u8);
    }
}

fn put_elems(out: &mut Vec<u8>, spec: FieldSpec, es: &[Fe]) {
    for &e in es {
        put_elem(out, spec, e);
    }
}

fn put_short_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    let len = u16::try_from(bytes.len()).expect("identifier fits in u16");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(bytes);
}

/// Bits per permutation entry: `ceil(log2 N)`.
pub fn perm_bits(n: usize) -> usize {
    (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize
}

pub fn encode_permutation(p: &Permutation) -> Vec<u8> {
    let bits = perm_bits(p.len());
    let mut out = vec![0u8; (p.len() * bits).div_ceil(8)];
    for (k, &v) in p.zero_based().iter().enumerate() {
        for b in 0..bits {
            if (v >> (bits - 1 - b)) & 1 == 1 {
                let pos = k * bits + b;
                out[pos / 8] |= 0x80 >> (pos % 8);
            }
        }
    }
    out
}

pub fn decode_permutation(n: usize, bytes: &[u8]) -> Result<Permutation, WireError> {
    let bits = perm_bits(n);
    let total = n * bits;
    if bytes.len() != total.div_ceil(8) {
        return Err(WireError::Truncated {
            needed: total.div_ceil(8),
            available: bytes.len(),
        });
    }
    let bit = |pos: usize| (bytes[pos / 8] >> (7 - pos % 8)) & 1;
    if (total..bytes.len() * 8).any(|pos| bit(pos) == 1) {
        return Err(WireError::BadPadding);
    }
    let images: Vec<usize> = (0..n)
        .map(|k| (0..bits).fold(0usize, |acc, b| (acc << 1) | bit(k * bits + b) as usize))
        .collect();
    Permutation::from_zero_based(&images).map_err(|_| WireError::NotBijective)
}

/// `N²·w + ceil(N·ceil(log2 N)/8)` bytes.
pub fn public_key_len(spec: FieldSpec, n: usize) -> usize {
    n * n * spec.element_bytes() + (n * perm_bits(n)).div_ceil(8)
}

/// `(N² + N)·w` bytes.
pub fn response_len(spec: FieldSpec, n: usize) -> usize {
    (n * n + n) * spec.element_bytes()
}

pub fn encode_public_key(spec: FieldSpec, pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::with_capacity(public_key_len(spec, pk.matrix.n()));
    put_elems(&mut out, spec, pk.matrix.entries());
    out.extend_from_slice(&encode_permutation(&pk.perm));
    out
}

pub fn decode_public_key(field: &Field, n: usize, bytes: &[u8]) -> Result<PublicKey, WireError> {
    let mut r = Reader::new(bytes);
    let pk = read_public_key(&mut r, field, n)?;
    r.finish()?;
    Ok(pk)
}

fn read_public_key(r: &mut Reader<'_>, field: &Field, n: usize) -> Result<PublicKey, WireError> {
    let matrix = r.matrix(field, n)?;
    let perm = decode_permutation(n, r.take((n * perm_bits(n)).div_ceil(8))?)?;
    Ok(PublicKey { matrix, perm })
}

pub fn encode_response(spec: FieldSpec, resp: &HdResponse) -> Vec<u8> {
    let mut out = Vec::with_capacity(response_len(spec, resp.mix.n()));
    put_elems(&mut out, spec, resp.mix.entries());
    put_elems(&mut out, spec, &resp.s);
    out
}

pub fn decode_response(field: &Field, n: usize, bytes: &[u8]) -> Result<HdResponse, WireError> {
    let mut r = Reader::new(bytes);
    let mix = r.matrix(field, n)?;
    let s = r.elems(field, n)?;
    r.finish()?;
    Ok(HdResponse { mix, s })
}

/// Everything the signature covers: the certificate minus its signature.
pub fn cert_tbs(cert: &Certificate) -> Vec<u8> {
    let n = cert.n();
    let mut out = Vec::new();
    out.push(cert.algorithm);
    out.extend_from_slice(&cert.field.to_bytes());
    out.push(u8::try_from(n).expect("N fits in a byte"));
    out.extend_from_slice(&cert.params_fingerprint);
    put_short_bytes(&mut out, &cert.device_id);
    put_short_bytes(&mut out, &cert.signer_id);
    out.extend_from_slice(&encode_public_key(cert.field, &cert.public_key));
    out
}

pub fn encode_cert(cert: &Certificate) -> Vec<u8> {
    let mut out = cert_tbs(cert);
    put_short_bytes(&mut out, &cert.signature);
    out
}

pub fn decode_cert(bytes: &[u8]) -> Result<Certificate, WireError> {
    let mut r = Reader::new(bytes);
    let cert = read_cert(&mut r)?;
    r.finish()?;
    Ok(cert)
}

fn read_cert(r: &mut Reader<'_>) -> Result<Certificate, WireError> {
    let algorithm = r.u8()?;
    let spec = FieldSpec::from_bytes(r.array()?).map_err(|_| WireError::Malformed("field spec"))?;
    let field = Field::new(spec).map_err(|_| WireError::Malformed("field spec"))?;
    let n = r.strands()?;
    let params_fingerprint = r.array()?;
    let device_id = r.short_bytes()?;
    let signer_id = r.short_bytes()?;
    let public_key = read_public_key(r, &field, n)?;
    let signature = r.short_bytes()?;
    Ok(Certificate {
        algorithm,
        field: spec,
        params_fingerprint,
        device_id,
        signer_id,
        public_key,
        signature,
    })
}

pub fn encode_confirm(tag: &ConfirmationTag) -> Vec<u8> {
    let mut out = Vec::with_capacity(NONCE_LEN + TAG_LEN);
    out.extend_from_slice(&tag.nonce);
    out.extend_from_slice(&tag.tag);
    out
}

pub fn decode_confirm(bytes: &[u8]) -> Result<ConfirmationTag, WireError> {
    let mut r = Reader::new(bytes);
    let nonce = r.array()?;
    let tag = r.array()?;
    r.finish()?;
    Ok(ConfirmationTag { nonce, tag })
}

/// `spec || N || m0`.
pub fn encode_params(params: &SystemParams) -> Vec<u8> {
    let spec = params.field().spec();
    let mut out = Vec::new();
    out.extend_from_slice(&spec.to_bytes());
    out.push(params.n() as u8);
    put_elems(&mut out, spec, params.m0().entries());
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<SystemParams, WireError> {
    let mut r = Reader::new(bytes);
    let spec = FieldSpec::from_bytes(r.array()?).map_err(|_| WireError::Malformed("field spec"))?;
    let field = Field::new(spec).map_err(|_| WireError::Malformed("field spec"))?;
    let n = r.strands()?;
    let m0 = r.matrix(&field, n)?;
    r.finish()?;
    Ok(SystemParams::from_m0(field, m0)?)
}

pub fn params_fingerprint(params: &SystemParams) -> [u8; 32] {
    Sha256::digest(encode_params(params)).into()
}

fn put_tvals(out: &mut Vec<u8>, spec: FieldSpec, t: &TValues) {
    put_elems(out, spec, t.values());
}

fn read_tvals(r: &mut Reader<'_>, field: &Field, n: usize) -> Result<TValues, WireError> {
    TValues::new(r.elems(field, n)?).map_err(|_| WireError::Malformed("T-values"))
}

/// `u16 r`, then per entry `flag || u32 length || letters as i8`.
pub fn encode_conjugate_set(set: &ConjugateSet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(
        &u16::try_from(set.len())
            .expect("set size fits in u16")
            .to_be_bytes(),
    );
    for (w, &pure) in set.conjugates.iter().zip(&set.pure_flags) {
        out.push(pure as u8);
        out.extend_from_slice(&(w.len() as u32).to_be_bytes());
        out.extend(w.letters().iter().map(|l| l.to_i8() as u8));
    }
    out
}

fn read_conjugate_set(r: &mut Reader<'_>, n: usize) -> Result<ConjugateSet, WireError> {
    let count = r.u16()? as usize;
    let mut conjugates = Vec::with_capacity(count);
    let mut pure_flags = Vec::with_capacity(count);
    for _ in 0..count {
        let pure = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(WireError::Malformed("pure flag")),
        };
        let len = r.u32()? as usize;
        let letters = r
            .take(len)?
            .iter()
            .map(|&b| Letter::from_i8(b as i8).ok_or(WireError::Malformed("braid letter")))
            .collect::<Result<Vec<_>, _>>()?;
        let w = BraidWord::new(n, letters).map_err(|_| WireError::Malformed("braid letter"))?;
        if pure && !w.permutation().is_identity() {
            return Err(WireError::Malformed("pure flag on non-pure word"));
        }
        conjugates.push(w);
        pure_flags.push(pure);
    }
    Ok(ConjugateSet {
        conjugates,
        pure_flags,
    })
}

/// Stored key record types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordType {
    SystemParams = 0x01,
    HdSecret = 0x02,
    DeviceKey = 0x03,
    Certificate = 0x04,
    TtpSecret = 0x05,
    Verifier = 0x06,
}

impl RecordType {
    pub fn from_byte(b: u8) -> Result<Self, WireError> {
        Ok(match b {
            0x01 => RecordType::SystemParams,
            0x02 => RecordType::HdSecret,
            0x03 => RecordType::DeviceKey,
            0x04 => RecordType::Certificate,
            0x05 => RecordType::TtpSecret,
            0x06 => RecordType::Verifier,
            other => return Err(WireError::UnknownRecordType(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: RecordType,
    pub payload: Vec<u8>,
}

impl Record {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + self.payload.len());
        out.extend_from_slice(&RECORD_MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::new(bytes);
        let magic = r.array()?;
        if magic != RECORD_MAGIC {
            return Err(WireError::BadMagic(magic));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(WireError::Version(version));
        }
        let kind = RecordType::from_byte(r.u8()?)?;
        Ok(Record {
            kind,
            payload: bytes[6..].to_vec(),
        })
    }

    pub fn expect(self, kind: RecordType) -> Result<Vec<u8>, WireError> {
        if self.kind != kind {
            return Err(WireError::UnexpectedType {
                expected: format!("{kind:?}"),
                found: format!("{:?}", self.kind),
            });
        }
        Ok(self.payload)
    }
}

fn check_fingerprint(r: &mut Reader<'_>, params: &SystemParams) -> Result<(), WireError> {
    let fp: [u8; 32] = r.array()?;
    if fp != params.fingerprint() {
        return Err(WireError::FingerprintMismatch);
    }
    let n = r.strands()?;
    if n != params.n() {
        return Err(WireError::FingerprintMismatch);
    }
    Ok(())
}

fn put_fingerprint(out: &mut Vec<u8>, params: &SystemParams) {
    out.extend_from_slice(&params.fingerprint());
    out.push(params.n() as u8);
}

pub fn encode_hd_secret(params: &SystemParams, hd: &HomeDeviceSecret) -> Vec<u8> {
    let mut out = Vec::new();
    put_fingerprint(&mut out, params);
    put_tvals(&mut out, params.field().spec(), &hd.tvals);
    out.extend_from_slice(&encode_conjugate_set(&hd.alpha_set));
    out
}

pub fn decode_hd_secret(
    params: &SystemParams,
    bytes: &[u8],
) -> Result<HomeDeviceSecret, WireError> {
    let mut r = Reader::new(bytes);
    check_fingerprint(&mut r, params)?;
    let tvals = read_tvals(&mut r, params.field(), params.n())?;
    let alpha_set = read_conjugate_set(&mut r, params.n())?;
    r.finish()?;
    Ok(HomeDeviceSecret { alpha_set, tvals })
}

pub fn encode_device_key(params: &SystemParams, key: &DeviceKeyMaterial) -> Vec<u8> {
    let spec = params.field().spec();
    let mut out = Vec::new();
    put_fingerprint(&mut out, params);
    put_elems(&mut out, spec, &key.coeffs);
    put_elems(&mut out, spec, key.c_matrix.entries());
    put_elems(&mut out, spec, key.c_inverse.entries());
    let cert = encode_cert(&key.cert);
    out.extend_from_slice(&(cert.len() as u32).to_be_bytes());
    out.extend_from_slice(&cert);
    out
}

pub fn decode_device_key(
    params: &SystemParams,
    bytes: &[u8],
) -> Result<DeviceKeyMaterial, WireError> {
    let f = params.field();
    let n = params.n();
    let mut r = Reader::new(bytes);
    check_fingerprint(&mut r, params)?;
    let coeffs = r.elems(f, n)?;
    let c_matrix = r.matrix(f, n)?;
    let c_inverse = r.matrix(f, n)?;
    let cert_len = r.u32()? as usize;
    let cert = decode_cert(r.take(cert_len)?)?;
    r.finish()?;
    if params.polynomial_matrix(&coeffs) != c_matrix {
        return Err(WireError::Malformed(
            "device key: C does not match its coefficients",
        ));
    }
    if !c_matrix
        .mul(f, &c_inverse)
        .map(|m| m.is_identity())
        .unwrap_or(false)
    {
        return Err(WireError::Malformed("device key: stored inverse is wrong"));
    }
    if cert.params_fingerprint != params.fingerprint() || cert.n() != n {
        return Err(WireError::FingerprintMismatch);
    }
    Ok(DeviceKeyMaterial {
        coeffs,
        c_matrix,
        c_inverse,
        cert,
    })
}

/// TTP state: T-values, both conjugate sets and the signing key.
pub fn encode_ttp_secret(ttp: &Ttp) -> Vec<u8> {
    let mut out = Vec::new();
    put_fingerprint(&mut out, &ttp.params);
    put_tvals(&mut out, ttp.params.field().spec(), &ttp.tvals);
    out.extend_from_slice(&encode_conjugate_set(&ttp.alpha));
    out.extend_from_slice(&encode_conjugate_set(&ttp.gamma));
    out.extend_from_slice(ttp.signer.key());
    put_short_bytes(&mut out, crate::signer::CertSigner::signer_id(&ttp.signer));
    out
}

pub fn decode_ttp_secret(params: &SystemParams, bytes: &[u8]) -> Result<Ttp, WireError> {
    let mut r = Reader::new(bytes);
    check_fingerprint(&mut r, params)?;
    let tvals = read_tvals(&mut r, params.field(), params.n())?;
    let alpha = read_conjugate_set(&mut r, params.n())?;
    let gamma = read_conjugate_set(&mut r, params.n())?;
    let key: [u8; 32] = r.array()?;
    let id = r.short_bytes()?;
    r.finish()?;
    Ok(Ttp {
        params: params.clone(),
        alpha,
        gamma,
        tvals,
        signer: KeyedHashSigner::new(key, id),
    })
}

/// Certificate verification key handed to the HD: `alg || key || signer id`.
pub fn encode_verifier(params: &SystemParams, verifier: &KeyedHashSigner) -> Vec<u8> {
    let mut out = Vec::new();
    put_fingerprint(&mut out, params);
    out.push(crate::signer::ALG_KEYED_HASH);
    out.extend_from_slice(verifier.key());
    put_short_bytes(&mut out, crate::signer::CertSigner::signer_id(verifier));
    out
}

pub fn decode_verifier(params: &SystemParams, bytes: &[u8]) -> Result<KeyedHashSigner, WireError> {
    let mut r = Reader::new(bytes);
    check_fingerprint(&mut r, params)?;
    if r.u8()? != crate::signer::ALG_KEYED_HASH {
        return Err(WireError::Malformed("unknown signature algorithm"));
    }
    let key: [u8; 32] = r.array()?;
    let id = r.short_bytes()?;
    r.finish()?;
    Ok(KeyedHashSigner::new(key, id))
}
