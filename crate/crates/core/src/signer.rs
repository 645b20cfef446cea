//! Certificate signature providers.
//!
//! The TTP signs device public keys through the [`CertSigner`] trait; HDs
//! check them through [`CertVerifier`]. The bundled [`KeyedHashSigner`] is an
//! HMAC-SHA-256 stand-in whose verification key equals its signing key. It is
//! NOT suitable for production: anyone able to verify can also forge.

use hmac::{Hmac, Mac};
use sha2::Sha256;

type HmacSha256 = Hmac<Sha256>;

/// Algorithm byte for [`KeyedHashSigner`].
pub const ALG_KEYED_HASH: u8 = 0x01;

pub trait CertSigner {
    fn algorithm(&self) -> u8;
    fn signer_id(&self) -> &[u8];
    fn sign(&self, message: &[u8]) -> Vec<u8>;
}

pub trait CertVerifier {
    fn algorithm(&self) -> u8;
    fn signer_id(&self) -> &[u8];
    /// Exact signature length this verifier accepts.
    fn signature_len(&self) -> usize;
    fn verify(&self, message: &[u8], signature: &[u8]) -> bool;
}

/// HMAC-SHA-256 "signature". NOT-FOR-PRODUCTION.
#[derive(Clone)]
pub struct KeyedHashSigner {
    key: [u8; 32],
    id: Vec<u8>,
}

impl KeyedHashSigner {
    pub fn new(key: [u8; 32], id: impl Into<Vec<u8>>) -> Self {
        KeyedHashSigner { key, id: id.into() }
    }

    pub fn key(&self) -> &[u8; 32] {
        &self.key
    }

    fn mac(&self) -> HmacSha256 {
        let mut mac = HmacSha256::new_from_slice(&self.key).expect("any key length");
        mac.update(b"ironwood-v1-cert");
        mac
    }
}

impl std::fmt::Debug for KeyedHashSigner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyedHashSigner")
            .field("id", &String::from_utf8_lossy(&self.id))
            .finish_non_exhaustive()
    }
}

impl CertSigner for KeyedHashSigner {
    fn algorithm(&self) -> u8 {
        ALG_KEYED_HASH
    }

    fn signer_id(&self) -> &[u8] {
        &self.id
    }

    fn sign(&self, message: &[u8]) -> Vec<u8> {
        let mut mac = self.mac();
        mac.update(message);
        mac.finalize().into_bytes().to_vec()
    }
}

impl CertVerifier for KeyedHashSigner {
    fn algorithm(&self) -> u8 {
        ALG_KEYED_HASH
    }

    fn signer_id(&self) -> &[u8] {
        &self.id
    }

    fn signature_len(&self) -> usize {
        32
    }

    fn verify(&self, message: &[u8], signature: &[u8]) -> bool {
        let mut mac = self.mac();
        mac.update(message);
        mac.verify_slice(signature).is_ok()
    }
}
