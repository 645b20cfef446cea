//! The key agreement itself.
//!
//! The HD draws ephemeral `C, C'` and braids `β, β'` with equal permutation,
//! answers a device certificate with `(C'M'(CM)⁻¹, s)`, and keeps
//! `s' = column N/2 of Y'`. The device recovers the same `s'` with three
//! matrix-vector products. Both sides then hash `s'` into a session key and
//! confirm it with HMAC tags.

use hmac::{Hmac, Mac};
use num_bigint::BigUint;
use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::braid::{BraidWord, Permutation};
use crate::emult::{emult, EMultState, EmultError, TValues};
use crate::field::{Fe, Field, FieldSpec};
use crate::keygen::{
    sample_m0_polynomial, verify_cert, Certificate, DeviceKeyMaterial, HomeDeviceSecret,
    KeygenError, PublicKey, SystemParams,
};
use crate::matrix::{Matrix, MatrixError};
use crate::signer::CertVerifier;

type HmacSha256 = Hmac<Sha256>;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("session already used")]
    SessionConsumed,
    #[error("conjugate set has no pure entries to interleave")]
    NoPureConjugates,
    #[error("β and β' induce different permutations")]
    PermutationMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error(transparent)]
    Emult(#[from] EmultError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Keygen(#[from] KeygenError),
}

/// Why a public key was refused.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("certificate is malformed")]
    MalformedCert,
    #[error("certificate signature does not verify")]
    BadSignature,
    #[error("certificate was issued for different system parameters")]
    ParamsMismatch,
    #[error("public key matrix is singular")]
    Singular,
    #[error("public key has {zeros} zero entries out of {total}")]
    TooManyZeros { zeros: usize, total: usize },
    #[error("public key row {0} is all zero")]
    ZeroRow(usize),
    #[error("public key column {0} is all zero")]
    ZeroColumn(usize),
    #[error("public key permutation has the wrong size")]
    BadPermutation,
}

/// Invalid-public-key policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationPolicy {
    pub max_zero_fraction: f64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        ValidationPolicy {
            max_zero_fraction: 0.25,
        }
    }
}

impl ValidationPolicy {
    /// Checks that need no certificate: shape, zero pattern, invertibility.
    pub fn check_structure(&self, field: &Field, pk: &PublicKey) -> Result<(), Rejection> {
        let n = pk.matrix.n();
        if pk.perm.len() != n {
            return Err(Rejection::BadPermutation);
        }
        for r in 0..n {
            if pk.matrix.row(r).iter().all(|e| e.is_zero()) {
                return Err(Rejection::ZeroRow(r));
            }
        }
        for c in 0..n {
            if (0..n).all(|r| pk.matrix.get(r, c).is_zero()) {
                return Err(Rejection::ZeroColumn(c));
            }
        }
        let zeros = pk.matrix.zero_count();
        let total = n * n;
        if zeros as f64 > self.max_zero_fraction * total as f64 {
            return Err(Rejection::TooManyZeros { zeros, total });
        }
        if !pk.matrix.is_invertible(field) {
            return Err(Rejection::Singular);
        }
        Ok(())
    }
}

/// Full check of a received certificate. Reports the first failed test.
pub fn check_public_key(
    params: &SystemParams,
    cert: &Certificate,
    verifier: &dyn CertVerifier,
    policy: &ValidationPolicy,
) -> Result<(), Rejection> {
    match verify_cert(cert, verifier) {
        Err(_) => return Err(Rejection::MalformedCert),
        Ok(false) => return Err(Rejection::BadSignature),
        Ok(true) => {}
    }
    if cert.params_fingerprint != params.fingerprint()
        || cert.field != params.field().spec()
        || cert.n() != params.n()
    {
        return Err(Rejection::ParamsMismatch);
    }
    policy.check_structure(params.field(), &cert.public_key)
}

pub fn validate_public_key(
    params: &SystemParams,
    cert: &Certificate,
    verifier: &dyn CertVerifier,
    policy: &ValidationPolicy,
) -> bool {
    check_public_key(params, cert, verifier, policy).is_ok()
}

/// Ephemeral braid shape, counted in conjugate factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionConfig {
    pub beta_factors: usize,
    /// Extra pure factors woven into β'.
    pub pure_insertions: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            beta_factors: 43,
            pure_insertions: 26,
        }
    }
}

impl SessionConfig {
    pub fn toy() -> Self {
        SessionConfig {
            beta_factors: 6,
            pure_insertions: 3,
        }
    }
}

/// `(C'M'(CM)⁻¹, s)` as sent to the device.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdResponse {
    pub mix: Matrix,
    pub s: Vec<Fe>,
}

/// The agreed column vector `s'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SharedSecret(pub Vec<Fe>);

impl SharedSecret {
    pub fn to_bytes(&self, spec: FieldSpec) -> Vec<u8> {
        let w = spec.element_bytes();
        self.0
            .iter()
            .flat_map(|e| {
                let v = e.value() as u32;
                (0..w).rev().map(move |k| (v >> (8 * k)) as u8)
            })
            .collect()
    }
}

/// HD-side ephemeral state for one exchange.
#[derive(Debug, Clone)]
pub struct HdSession {
    c: Matrix,
    c_prime: Matrix,
    beta: BraidWord,
    beta_prime: BraidWord,
    sigma: Permutation,
    cm: Matrix,
    cpmp: Matrix,
    consumed: bool,
}

impl HdSession {
    /// Session from explicit ephemerals. Used for fixtures and for the
    /// degenerate `β' = β` case; honest callers use [`hd_new_session`].
    pub fn from_parts(
        field: &Field,
        tvals: &TValues,
        c: Matrix,
        c_prime: Matrix,
        beta: BraidWord,
        beta_prime: BraidWord,
    ) -> Result<Self, ProtocolError> {
        let sigma = beta.permutation();
        if beta_prime.permutation() != sigma {
            return Err(ProtocolError::PermutationMismatch);
        }
        let cm = emult(field, &EMultState::from_matrix(c.clone()), &beta, tvals)?;
        let cpmp = emult(
            field,
            &EMultState::from_matrix(c_prime.clone()),
            &beta_prime,
            tvals,
        )?;
        Ok(HdSession {
            c,
            c_prime,
            beta,
            beta_prime,
            sigma,
            cm: cm.matrix,
            cpmp: cpmp.matrix,
            consumed: false,
        })
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn c_prime(&self) -> &Matrix {
        &self.c_prime
    }

    pub fn beta(&self) -> &BraidWord {
        &self.beta
    }

    pub fn beta_prime(&self) -> &BraidWord {
        &self.beta_prime
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn cm(&self) -> &Matrix {
        &self.cm
    }

    pub fn cpmp(&self) -> &Matrix {
        &self.cpmp
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Computes `Y, Y'` against the device key, returns the response and
    /// `s'`. A session answers at most once.
    pub fn compute_response(
        &mut self,
        field: &Field,
        pk: &PublicKey,
        tvals: &TValues,
    ) -> Result<(HdResponse, SharedSecret), ProtocolError> {
        if self.consumed {
            return Err(ProtocolError::SessionConsumed);
        }
        let n = self.c.n();
        if pk.matrix.n() != n {
            return Err(ProtocolError::DimensionMismatch {
                expected: n,
                got: pk.matrix.n(),
            });
        }
        self.consumed = true;
        let start = |c: &Matrix| -> Result<EMultState, ProtocolError> {
            Ok(EMultState::new(c.mul(field, &pk.matrix)?, pk.perm.clone())?)
        };
        let y = emult(field, &start(&self.c)?, &self.beta, tvals)?;
        let y_prime = emult(field, &start(&self.c_prime)?, &self.beta_prime, tvals)?;
        let col = secret_column(n);
        let mix = self.cpmp.mul(field, &self.cm.inverse(field)?)?;
        Ok((
            HdResponse {
                mix,
                s: y.matrix.column(col),
            },
            SharedSecret(y_prime.matrix.column(col)),
        ))
    }
}

/// 0-based index of the `(N/2)`-th column.
pub fn secret_column(n: usize) -> usize {
    n / 2 - 1
}

/// Draws `C, C'` and `β, β'`. `β` is a product of `𝒞_α` entries (inverses
/// allowed); `β'` is the same factor sequence with pure entries inserted at
/// random positions, so both induce the same permutation.
pub fn hd_new_session<R: Rng + ?Sized>(
    hd: &HomeDeviceSecret,
    params: &SystemParams,
    cfg: &SessionConfig,
    rng: &mut R,
) -> Result<HdSession, ProtocolError> {
    if cfg.beta_factors == 0 {
        return Err(ProtocolError::Domain("beta_factors must be positive"));
    }
    // β' = β leaks s' to anyone holding the response.
    if cfg.pure_insertions == 0 {
        return Err(ProtocolError::Domain("pure_insertions must be positive"));
    }
    let set = &hd.alpha_set;
    if set.is_empty() {
        return Err(ProtocolError::Domain("empty conjugate set"));
    }
    let pure = set.pure_indices();
    if pure.is_empty() {
        return Err(ProtocolError::NoPureConjugates);
    }
    let (_, c) = sample_m0_polynomial(params, rng);
    let (_, c_prime) = sample_m0_polynomial(params, rng);
    let factors: Vec<(usize, bool)> = (0..cfg.beta_factors)
        .map(|_| (rng.gen_range(0..set.len()), rng.gen_bool(0.5)))
        .collect();
    let n = params.n();
    let beta = set.product(n, &factors);
    // Insertions can cancel under free reduction; redraw until β' differs.
    let beta_prime = loop {
        let mut factors_prime = factors.clone();
        for _ in 0..cfg.pure_insertions {
            let at = rng.gen_range(0..=factors_prime.len());
            factors_prime.insert(at, (pure[rng.gen_range(0..pure.len())], rng.gen_bool(0.5)));
        }
        let candidate = set.product(n, &factors_prime);
        if candidate != beta {
            break candidate;
        }
    };
    HdSession::from_parts(params.field(), &hd.tvals, c, c_prime, beta, beta_prime)
}

/// `s' = C_i · mix · C_i⁻¹ · s`, evaluated right to left.
pub fn device_compute_secret(
    field: &Field,
    key: &DeviceKeyMaterial,
    resp: &HdResponse,
) -> Result<SharedSecret, ProtocolError> {
    let n = key.c_matrix.n();
    if resp.mix.n() != n || resp.s.len() != n {
        return Err(ProtocolError::DimensionMismatch {
            expected: n,
            got: resp.s.len(),
        });
    }
    let v = key.c_inverse.mul_vec(field, &resp.s)?;
    let v = resp.mix.mul_vec(field, &v)?;
    Ok(SharedSecret(key.c_matrix.mul_vec(field, &v)?))
}

/// The eavesdropper's guess `mix · s`, correct exactly when `C_i` commutes
/// with `mix`.
pub fn weak_key_estimate(field: &Field, resp: &HdResponse) -> Result<SharedSecret, ProtocolError> {
    Ok(SharedSecret(resp.mix.mul_vec(field, &resp.s)?))
}

/// SHA-256 over the framed CERT and RESPONSE messages.
pub fn transcript_hash(cert_frame: &[u8], response_frame: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(cert_frame);
    h.update(response_frame);
    h.finalize().into()
}

pub fn derive_session_key(
    spec: FieldSpec,
    secret: &SharedSecret,
    transcript: &[u8; 32],
) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"ironwood-v1-kdf");
    h.update(transcript);
    h.update(secret.to_bytes(spec));
    h.finalize().into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Hd,
    Device,
}

impl Role {
    fn label(self) -> &'static [u8] {
        match self {
            Role::Hd => b"hd-confirm",
            Role::Device => b"dev-confirm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfirmationTag {
    pub nonce: [u8; 16],
    pub tag: [u8; 32],
}

fn confirm_mac(role: Role, key: &[u8; 32], nonce: &[u8; 16]) -> HmacSha256 {
    let mut mac = HmacSha256::new_from_slice(key).expect("any key length");
    mac.update(nonce);
    mac.update(role.label());
    mac
}

pub fn confirm_exchange(role: Role, key: &[u8; 32], nonce: &[u8; 16]) -> ConfirmationTag {
    ConfirmationTag {
        nonce: *nonce,
        tag: confirm_mac(role, key, nonce).finalize().into_bytes().into(),
    }
}

/// True iff `tag` answers `expected_nonce` under `key` for `role`.
pub fn check_confirmation(
    role: Role,
    key: &[u8; 32],
    expected_nonce: &[u8; 16],
    tag: &ConfirmationTag,
) -> bool {
    if &tag.nonce != expected_nonce {
        return false;
    }
    confirm_mac(role, key, expected_nonce)
        .verify_slice(&tag.tag)
        .is_ok()
}

/// Brute-force levels, all as log₂ rounded to 3 decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub q: u64,
    pub n: u32,
    pub l: Option<u64>,
    /// `q^N`.
    pub matrix_bits: f64,
    /// `(q-2)^N`.
    pub tvalue_bits: f64,
    /// `(L/2)^{N-1}`.
    pub braid_bits: Option<f64>,
    /// `q^N`.
    pub exchanged_key_bits: f64,
    /// `min((q-2)^N, (L/2)^{N-1})`, or the T-value level without L.
    pub overall_bits: f64,
    /// `2(q-2)^{1-1/N}`.
    pub l_bound: f64,
    /// Smallest integer L with `L >= 2(q-2)^{1-1/N}`.
    pub min_l: u64,
    /// Smallest integer L with `(L/2)^{N-1} >= (q-2)^N`, the length at
    /// which the braid level actually reaches the T-value level.
    pub min_l_matching: u64,
}

/// `L^N >= 2^N (q-2)^{N-1}`.
fn minimal_l(q: u64, n: u32) -> u64 {
    least_l(q, n, n - 1)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Smallest integer L with `L^a >= 2^a (q-2)^b`, checked exactly.
fn least_l(q: u64, a: u32, b: u32) -> u64 {
    let rhs = BigUint::from(2u32).pow(a) * BigUint::from(q - 2).pow(b);
    let ok = |l: u64| BigUint::from(l).pow(a) >= rhs;
    let guess = (2.0 * ((q - 2) as f64).powf(b as f64 / a as f64)).ceil() as u64;
    let mut l = guess.max(1);
    while l > 1 && ok(l - 1) {
        l -= 1;
    }
    while !ok(l) {
        l += 1;
    }
    l
}

pub fn security_level(q: u64, n: u32, l: Option<u64>) -> Result<SecurityReport, ProtocolError> {
    if q < 4 {
        return Err(ProtocolError::Domain("q must be at least 4"));
    }
    if n < 2 {
        return Err(ProtocolError::Domain("N must be at least 2"));
    }
    if matches!(l, Some(v) if v < 2) {
        return Err(ProtocolError::Domain("L must be at least 2"));
    }
    let nf = n as f64;
    let log_q = (q as f64).log2();
    let tvalue = nf * ((q - 2) as f64).log2();
    let braid = l.map(|l| (nf - 1.0) * (l as f64 / 2.0).log2());
    let overall = braid.map_or(tvalue, |b| tvalue.min(b));
    Ok(SecurityReport {
        q,
        n,
        l,
        matrix_bits: round3(nf * log_q),
        tvalue_bits: round3(tvalue),
        braid_bits: braid.map(round3),
        exchanged_key_bits: round3(nf * log_q),
        overall_bits: round3(overall),
        l_bound: round3(2.0 * ((q - 2) as f64).powf(1.0 - 1.0 / nf)),
        min_l: minimal_l(q, n),
        min_l_matching: least_l(q, n - 1, n),
    })
}
