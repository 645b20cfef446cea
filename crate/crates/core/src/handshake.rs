//! Message-level state machines for both ends of an exchange.
//!
//! Flow: device sends CERT; HD answers RESPONSE (response bytes followed by
//! a 16-byte nonce); device answers CONFIRM; the HD may optionally send its
//! own CONFIRM back. Frames are passed as encoded bytes so the transcript
//! hash covers exactly what crossed the wire.

use rand::Rng;
use thiserror::Error;

use crate::keygen::{DeviceKeyMaterial, HomeDeviceSecret, SystemParams};
use crate::protocol::{
    check_confirmation, check_public_key, confirm_exchange, derive_session_key,
    device_compute_secret, hd_new_session, transcript_hash, ProtocolError, Rejection, Role,
    SessionConfig, SharedSecret, ValidationPolicy,
};
use crate::signer::CertVerifier;
use crate::wire::{self, Frame, MessageType, WireError, NONCE_LEN};

#[derive(Debug, Error)]
pub enum HandshakeError {
    #[error("public key rejected: {0}")]
    Rejected(#[from] Rejection),
    #[error("key confirmation failed")]
    ConfirmationFailed,
    #[error("message out of order: {0}")]
    OutOfOrder(&'static str),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Device side. Holds only `C_i`, `C_i⁻¹` and the certificate.
#[derive(Debug)]
pub struct DeviceHandshake<'a> {
    params: &'a SystemParams,
    key: &'a DeviceKeyMaterial,
    cert_frame: Option<Vec<u8>>,
    nonce: Option<[u8; 16]>,
    secret: Option<SharedSecret>,
    session_key: Option<[u8; 32]>,
}

impl<'a> DeviceHandshake<'a> {
    pub fn new(params: &'a SystemParams, key: &'a DeviceKeyMaterial) -> Self {
        DeviceHandshake {
            params,
            key,
            cert_frame: None,
            nonce: None,
            secret: None,
            session_key: None,
        }
    }

    /// The CERT frame.
    pub fn start(&mut self) -> Result<Vec<u8>, HandshakeError> {
        if self.cert_frame.is_some() {
            return Err(HandshakeError::OutOfOrder("certificate already sent"));
        }
        let frame = Frame::new(MessageType::Cert, wire::encode_cert(&self.key.cert)).encode()?;
        self.cert_frame = Some(frame.clone());
        Ok(frame)
    }

    /// Consumes RESPONSE and returns the device CONFIRM frame.
    pub fn on_response(&mut self, response_frame: &[u8]) -> Result<Vec<u8>, HandshakeError> {
        let cert_frame = self
            .cert_frame
            .as_ref()
            .ok_or(HandshakeError::OutOfOrder("response before certificate"))?;
        if self.session_key.is_some() {
            return Err(HandshakeError::OutOfOrder("response already processed"));
        }
        let payload = Frame::decode(response_frame)?.expect(MessageType::Response)?;
        let f = self.params.field();
        let n = self.params.n();
        let body_len = wire::response_len(f.spec(), n);
        if payload.len() != body_len + NONCE_LEN {
            return Err(WireError::Truncated {
                needed: body_len + NONCE_LEN,
                available: payload.len(),
            }
            .into());
        }
        let resp = wire::decode_response(f, n, &payload[..body_len])?;
        let nonce: [u8; 16] = payload[body_len..].try_into().expect("16 bytes");
        let secret = device_compute_secret(f, self.key, &resp)?;
        let key = derive_session_key(
            f.spec(),
            &secret,
            &transcript_hash(cert_frame, response_frame),
        );
        let tag = confirm_exchange(Role::Device, &key, &nonce);
        self.nonce = Some(nonce);
        self.secret = Some(secret);
        self.session_key = Some(key);
        Ok(Frame::new(MessageType::Confirm, wire::encode_confirm(&tag)).encode()?)
    }

    /// Checks the HD's optional CONFIRM.
    pub fn on_hd_confirm(&self, confirm_frame: &[u8]) -> Result<(), HandshakeError> {
        let (key, nonce) = match (&self.session_key, &self.nonce) {
            (Some(k), Some(n)) => (k, n),
            _ => return Err(HandshakeError::OutOfOrder("confirmation before response")),
        };
        let tag =
            wire::decode_confirm(&Frame::decode(confirm_frame)?.expect(MessageType::Confirm)?)?;
        if !check_confirmation(Role::Hd, key, nonce, &tag) {
            return Err(HandshakeError::ConfirmationFailed);
        }
        Ok(())
    }

    pub fn shared_secret(&self) -> Option<&SharedSecret> {
        self.secret.as_ref()
    }

    pub fn session_key(&self) -> Option<[u8; 32]> {
        self.session_key
    }
}

/// HD side.
pub struct HdHandshake<'a> {
    params: &'a SystemParams,
    secret: &'a HomeDeviceSecret,
    verifier: &'a dyn CertVerifier,
    policy: ValidationPolicy,
    config: SessionConfig,
    nonce: Option<[u8; 16]>,
    shared: Option<SharedSecret>,
    session_key: Option<[u8; 32]>,
    device_id: Option<Vec<u8>>,
    confirmed: bool,
}

impl<'a> HdHandshake<'a> {
    pub fn new(
        params: &'a SystemParams,
        secret: &'a HomeDeviceSecret,
        verifier: &'a dyn CertVerifier,
        policy: ValidationPolicy,
        config: SessionConfig,
    ) -> Self {
        HdHandshake {
            params,
            secret,
            verifier,
            policy,
            config,
            nonce: None,
            shared: None,
            session_key: None,
            device_id: None,
            confirmed: false,
        }
    }

    /// Validates CERT, runs a fresh session, returns the RESPONSE frame.
    pub fn on_cert<R: Rng + ?Sized>(
        &mut self,
        cert_frame: &[u8],
        rng: &mut R,
    ) -> Result<Vec<u8>, HandshakeError> {
        if self.session_key.is_some() {
            return Err(HandshakeError::OutOfOrder("certificate already processed"));
        }
        let cert = wire::decode_cert(&Frame::decode(cert_frame)?.expect(MessageType::Cert)?)?;
        check_public_key(self.params, &cert, self.verifier, &self.policy)?;
        let f = self.params.field();
        let mut session = hd_new_session(self.secret, self.params, &self.config, rng)?;
        let (resp, shared) = session.compute_response(f, &cert.public_key, &self.secret.tvals)?;
        let mut nonce = [0u8; 16];
        rng.fill(&mut nonce);
        let mut payload = wire::encode_response(f.spec(), &resp);
        payload.extend_from_slice(&nonce);
        let frame = Frame::new(MessageType::Response, payload).encode()?;
        self.session_key = Some(derive_session_key(
            f.spec(),
            &shared,
            &transcript_hash(cert_frame, &frame),
        ));
        self.nonce = Some(nonce);
        self.shared = Some(shared);
        self.device_id = Some(cert.device_id);
        Ok(frame)
    }

    /// Checks the device CONFIRM. On success returns the HD's own CONFIRM
    /// frame, which the caller may send or drop.
    pub fn on_confirm(&mut self, confirm_frame: &[u8]) -> Result<Vec<u8>, HandshakeError> {
        let (key, nonce) = match (&self.session_key, &self.nonce) {
            (Some(k), Some(n)) => (*k, *n),
            _ => {
                return Err(HandshakeError::OutOfOrder(
                    "confirmation before certificate",
                ))
            }
        };
        if self.confirmed {
            return Err(HandshakeError::OutOfOrder("already confirmed"));
        }
        let tag =
            wire::decode_confirm(&Frame::decode(confirm_frame)?.expect(MessageType::Confirm)?)?;
        if !check_confirmation(Role::Device, &key, &nonce, &tag) {
            return Err(HandshakeError::ConfirmationFailed);
        }
        self.confirmed = true;
        let reply = confirm_exchange(Role::Hd, &key, &nonce);
        Ok(Frame::new(MessageType::Confirm, wire::encode_confirm(&reply)).encode()?)
    }

    pub fn is_confirmed(&self) -> bool {
        self.confirmed
    }

    pub fn shared_secret(&self) -> Option<&SharedSecret> {
        self.shared.as_ref()
    }

    pub fn session_key(&self) -> Option<[u8; 32]> {
        self.session_key
    }

    pub fn device_id(&self) -> Option<&[u8]> {
        self.device_id.as_deref()
    }
}

/// Result of an in-process exchange.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeOutcome {
    pub hd_secret: SharedSecret,
    pub device_secret: SharedSecret,
    pub hd_key: [u8; 32],
    pub device_key: [u8; 32],
}

impl ExchangeOutcome {
    pub fn agreed(&self) -> bool {
        self.hd_secret == self.device_secret && self.hd_key == self.device_key
    }
}

/// Runs all four messages in memory. `tamper` sees the RESPONSE frame bytes
/// before the device does.
pub fn run_exchange<R: Rng + ?Sized>(
    params: &SystemParams,
    hd_secret: &HomeDeviceSecret,
    verifier: &dyn CertVerifier,
    device_key: &DeviceKeyMaterial,
    config: SessionConfig,
    rng: &mut R,
    tamper: impl FnOnce(&mut Vec<u8>),
) -> Result<ExchangeOutcome, HandshakeError> {
    let mut dev = DeviceHandshake::new(params, device_key);
    let mut hd = HdHandshake::new(
        params,
        hd_secret,
        verifier,
        ValidationPolicy::default(),
        config,
    );
    let cert = dev.start()?;
    let mut response = hd.on_cert(&cert, rng)?;
    tamper(&mut response);
    let confirm = dev.on_response(&response)?;
    let hd_confirm = hd.on_confirm(&confirm)?;
    dev.on_hd_confirm(&hd_confirm)?;
    Ok(ExchangeOutcome {
        hd_secret: hd.shared_secret().cloned().expect("set by on_cert"),
        device_secret: dev.shared_secret().cloned().expect("set by on_response"),
        hd_key: hd.session_key().expect("set by on_cert"),
        device_key: dev.session_key().expect("set by on_response"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::keygen::{ConjugateConfig, Ttp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture() -> (Ttp, DeviceKeyMaterial, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let params = SystemParams::generate(4, FieldSpec::prime(5), &mut rng).unwrap();
        let ttp = Ttp::setup(params, &ConjugateConfig::toy(), b"ttp", &mut rng).unwrap();
        let dev = ttp.issue_device(b"dev", 4, &mut rng).unwrap();
        (ttp, dev, rng)
    }

    #[test]
    fn full_exchange_agrees() {
        let (ttp, dev, mut rng) = fixture();
        let hd = ttp.hd_secret();
        for _ in 0..20 {
            let out = run_exchange(
                &ttp.params,
                &hd,
                ttp.verifier(),
                &dev,
                SessionConfig::toy(),
                &mut rng,
                |_| {},
            )
            .unwrap();
            assert!(out.agreed());
        }
    }

    #[test]
    fn tampered_response_fails_confirmation() {
        let (ttp, dev, mut rng) = fixture();
        let hd = ttp.hd_secret();
        let r = run_exchange(
            &ttp.params,
            &hd,
            ttp.verifier(),
            &dev,
            SessionConfig::toy(),
            &mut rng,
            |f| {
                let last = f.len() - 1;
                f[last] ^= 0x01;
            },
        );
        assert!(matches!(r, Err(HandshakeError::ConfirmationFailed)));
    }

    #[test]
    fn out_of_order_messages() {
        let (ttp, dev, mut rng) = fixture();
        let hd_secret = ttp.hd_secret();
        let mut d = DeviceHandshake::new(&ttp.params, &dev);
        assert!(matches!(
            d.on_response(&[]),
            Err(HandshakeError::OutOfOrder(_))
        ));
        let cert = d.start().unwrap();
        assert!(d.start().is_err());
        let mut hd = HdHandshake::new(
            &ttp.params,
            &hd_secret,
            ttp.verifier(),
            ValidationPolicy::default(),
            SessionConfig::toy(),
        );
        assert!(matches!(
            hd.on_confirm(&[]),
            Err(HandshakeError::OutOfOrder(_))
        ));
        let resp = hd.on_cert(&cert, &mut rng).unwrap();
        assert!(matches!(
            hd.on_cert(&cert, &mut rng),
            Err(HandshakeError::OutOfOrder(_))
        ));
        // A CERT frame where a RESPONSE is expected.
        assert!(matches!(
            d.on_response(&cert),
            Err(HandshakeError::Wire(WireError::UnexpectedType { .. }))
        ));
        let conf = d.on_response(&resp).unwrap();
        let back = hd.on_confirm(&conf).unwrap();
        assert!(hd.is_confirmed());
        assert_eq!(hd.device_id(), Some(&b"dev"[..]));
        d.on_hd_confirm(&back).unwrap();
        assert!(matches!(
            d.on_hd_confirm(&conf),
            Err(HandshakeError::ConfirmationFailed)
        ));
    }

    #[test]
    fn forged_certificate_is_rejected() {
        let (ttp, mut dev, mut rng) = fixture();
        let hd = ttp.hd_secret();
        dev.cert.signature[5] ^= 0x80;
        let r = run_exchange(
            &ttp.params,
            &hd,
            ttp.verifier(),
            &dev,
            SessionConfig::toy(),
            &mut rng,
            |_| {},
        );
        assert!(matches!(
            r,
            Err(HandshakeError::Rejected(Rejection::BadSignature))
        ));
    }
}
