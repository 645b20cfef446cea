//! Ironwood: braid-group key agreement over colored Burau matrices.
//!
//! The core pieces are finite-field arithmetic ([`field`]), braid words and
//! permutations ([`braid`]), the symbolic colored Burau representation
//! ([`cburau`]) and its fast evaluated form, E-multiplication ([`emult`]).
//! [`keygen`] provisions keys, [`protocol`] and [`handshake`] run the
//! exchange, and [`wire`] fixes the byte formats.

pub mod braid;
pub mod cburau;
pub mod emult;
pub mod field;
pub mod handshake;
pub mod keygen;
pub mod matrix;
pub mod perf;
pub mod poly;
pub mod protocol;
pub mod signer;
pub mod wire;

pub use braid::{BraidError, BraidWord, Letter, Permutation};
pub use emult::{emult, EMultState, EmultError, OpCount, TValues};
pub use field::{Fe, Field, FieldError, FieldKind, FieldSpec};
pub use handshake::{DeviceHandshake, HandshakeError, HdHandshake};
pub use keygen::{
    Certificate, ConjugateConfig, ConjugateSet, DeviceKeyMaterial, HomeDeviceSecret, KeygenError,
    PublicKey, SystemParams, Ttp,
};
pub use matrix::{Matrix, MatrixError};
pub use protocol::{
    ConfirmationTag, HdResponse, HdSession, ProtocolError, Rejection, SecurityReport,
    SessionConfig, SharedSecret, ValidationPolicy,
};
pub use signer::{CertSigner, CertVerifier, KeyedHashSigner};
pub use wire::{Frame, MessageType, Record, RecordType, WireError};
