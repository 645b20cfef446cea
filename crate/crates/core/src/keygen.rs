//! Trusted-third-party provisioning.
//!
//! The TTP fixes the public system parameters (N, F_q, m0), draws two sets of
//! mutually commuting conjugates, a set of T-values, and then issues each
//! device a private m0-polynomial matrix `C_i` together with a signed public
//! key `Pub_i = (C_i, id) ⋆ β_i`. The HD receives the first conjugate set and
//! the T-values; devices receive only their own `C_i` and certificate.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::braid::{conjugate, make_pure_word, random_word, BraidError, BraidWord, Permutation};
use crate::emult::{emult, EMultState, EmultError, TValues};
use crate::field::{Fe, Field, FieldError, FieldSpec};
use crate::matrix::{rank, Matrix, MatrixError};
use crate::poly::Poly;
use crate::protocol::ValidationPolicy;
use crate::signer::{CertSigner, CertVerifier, KeyedHashSigner};
use crate::wire;

#[derive(Debug, Error)]
pub enum KeygenError {
    #[error("strand count {0} must be even and within 4..=32")]
    BadStrandCount(usize),
    #[error("m0 does not generate a degree-N algebra (powers have rank {0})")]
    DegenerateM0(usize),
    #[error("need at least 2 conjugates per set, got {0}")]
    TooFewConjugates(usize),
    #[error("degenerate length parameter: {0}")]
    DegenerateLength(&'static str),
    #[error("pure fraction {0} outside [0, 1]")]
    BadPureFraction(f64),
    #[error("malformed certificate: {0}")]
    MalformedCert(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Emult(#[from] EmultError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Public system parameters: B_N, F_q and the matrix m0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams {
    n: usize,
    field: Field,
    m0: Matrix,
    m0_powers: Vec<Matrix>,
}

impl SystemParams {
    /// Draws m0 as the companion matrix of a random irreducible polynomial of
    /// degree N, so `F_q[m0]` is the field `F_{q^N}` and every nonzero
    /// m0-polynomial is invertible.
    pub fn generate<R: Rng + ?Sized>(
        n: usize,
        spec: FieldSpec,
        rng: &mut R,
    ) -> Result<Self, KeygenError> {
        check_strands(n)?;
        let field = Field::new(spec)?;
        let m0 = Poly::random_irreducible(&field, n, rng).companion(&field);
        Self::from_m0(field, m0)
    }

    /// Validates externally supplied parameters.
    pub fn from_m0(field: Field, m0: Matrix) -> Result<Self, KeygenError> {
        let n = m0.n();
        check_strands(n)?;
        let mut m0_powers = Vec::with_capacity(n);
        let mut p = Matrix::identity(n);
        for _ in 0..n {
            let next = p.mul(&field, &m0)?;
            m0_powers.push(p);
            p = next;
        }
        let flat: Vec<Vec<Fe>> = m0_powers.iter().map(|m| m.entries().to_vec()).collect();
        let r = rank(&field, &flat);
        if r != n || !m0.is_invertible(&field) {
            return Err(KeygenError::DegenerateM0(r));
        }
        Ok(SystemParams {
            n,
            field,
            m0,
            m0_powers,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m0(&self) -> &Matrix {
        &self.m0
    }

    pub fn m0_powers(&self) -> &[Matrix] {
        &self.m0_powers
    }

    /// `Σ c_k m0^k`.
    pub fn polynomial_matrix(&self, coeffs: &[Fe]) -> Matrix {
        let f = &self.field;
        let mut out = Matrix::zero(self.n);
        for (c, p) in coeffs.iter().zip(&self.m0_powers) {
            if !c.is_zero() {
                out = out.add(f, &p.scale(f, *c)).expect("same size");
            }
        }
        out
    }

    /// SHA-256 of the canonical parameter encoding.
    pub fn fingerprint(&self) -> [u8; 32] {
        wire::params_fingerprint(self)
    }
}

fn check_strands(n: usize) -> Result<(), KeygenError> {
    if !n.is_multiple_of(2) || !(4..=32).contains(&n) {
        return Err(KeygenError::BadStrandCount(n));
    }
    Ok(())
}

/// A list of conjugates `z·w·z⁻¹`, some flagged as pure braids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateSet {
    pub conjugates: Vec<BraidWord>,
    pub pure_flags: Vec<bool>,
}

impl ConjugateSet {
    pub fn len(&self) -> usize {
        self.conjugates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjugates.is_empty()
    }

    pub fn pure_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.pure_flags[k]).collect()
    }

    /// Free reduction of a product of the indexed entries, each optionally
    /// inverted.
    pub fn product(&self, n: usize, factors: &[(usize, bool)]) -> BraidWord {
        let letters = factors
            .iter()
            .flat_map(|&(k, inv)| {
                let w = &self.conjugates[k];
                if inv {
                    w.inverse().letters().to_vec()
                } else {
                    w.letters().to_vec()
                }
            })
            .collect();
        BraidWord::new(n, letters)
            .expect("entries share N")
            .free_reduce()
    }
}

/// Shape of the TTP's conjugate sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateConfig {
    /// Entries per set.
    pub r: usize,
    /// Letters drawn for the common conjugator z.
    pub z_length: usize,
    /// Letters drawn for each α_i / γ_i before reduction.
    pub word_length: usize,
    pub pure_fraction: f64,
}

impl Default for ConjugateConfig {
    fn default() -> Self {
        ConjugateConfig {
            r: 32,
            z_length: 64,
            word_length: 64,
            pure_fraction: 0.5,
        }
    }
}

impl ConjugateConfig {
    /// Small sets for N=4 test fixtures.
    pub fn toy() -> Self {
        ConjugateConfig {
            r: 8,
            z_length: 8,
            word_length: 8,
            pure_fraction: 0.5,
        }
    }
}

/// Draws `(𝒞_α, 𝒞_γ)`: α_i live on generators `1..N/2-1`, γ_i on
/// `N/2+1..N-1`, so every α_i commutes with every γ_j, and conjugating both
/// by the same z preserves that.
pub fn gen_conjugate_sets<R: Rng + ?Sized>(
    params: &SystemParams,
    cfg: &ConjugateConfig,
    rng: &mut R,
) -> Result<(ConjugateSet, ConjugateSet), KeygenError> {
    let n = params.n;
    if cfg.r < 2 {
        return Err(KeygenError::TooFewConjugates(cfg.r));
    }
    if cfg.z_length == 0 {
        return Err(KeygenError::DegenerateLength("z_length"));
    }
    if cfg.word_length < 2 {
        return Err(KeygenError::DegenerateLength("word_length"));
    }
    if !(0.0..=1.0).contains(&cfg.pure_fraction) {
        return Err(KeygenError::BadPureFraction(cfg.pure_fraction));
    }
    let z = random_word(n, cfg.z_length, 1..=n - 1, rng)?;
    let lower = 1..=n / 2 - 1;
    let upper = n / 2 + 1..=n - 1;

    let mut pure_count = (cfg.r as f64 * cfg.pure_fraction).round() as usize;
    if cfg.pure_fraction > 0.0 {
        pure_count = pure_count.max(1);
    }
    let mut alpha_flags: Vec<bool> = (0..cfg.r).map(|k| k < pure_count).collect();
    alpha_flags.shuffle(rng);

    let mut alpha = Vec::with_capacity(cfg.r);
    for &pure in &alpha_flags {
        let w = nonempty(|| {
            if pure {
                make_pure_word(n, cfg.word_length, lower.clone(), rng)
            } else {
                random_word(n, cfg.word_length, lower.clone(), rng)
            }
        })?;
        alpha.push(conjugate(&z, &w)?);
    }
    let mut gamma = Vec::with_capacity(cfg.r);
    for _ in 0..cfg.r {
        let w = nonempty(|| random_word(n, cfg.word_length, upper.clone(), rng))?;
        gamma.push(conjugate(&z, &w)?);
    }
    Ok((
        ConjugateSet {
            conjugates: alpha,
            pure_flags: alpha_flags,
        },
        ConjugateSet {
            conjugates: gamma,
            pure_flags: vec![false; cfg.r],
        },
    ))
}

fn nonempty(
    mut draw: impl FnMut() -> Result<BraidWord, BraidError>,
) -> Result<BraidWord, BraidError> {
    loop {
        let w = draw()?;
        if !w.is_empty() {
            return Ok(w);
        }
    }
}

pub fn gen_tvalues<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<TValues, KeygenError> {
    Ok(TValues::random(&params.field, params.n, rng)?)
}

/// Uniform nonzero coefficients `c_0..c_{N-1}` and `Σ c_k m0^k`.
pub fn sample_m0_polynomial<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> (Vec<Fe>, Matrix) {
    loop {
        let coeffs: Vec<Fe> = (0..params.n).map(|_| params.field.random(rng)).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let m = params.polynomial_matrix(&coeffs);
        return (coeffs, m);
    }
}

/// A device public key `(C_i M_i, σ_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    pub matrix: Matrix,
    pub perm: Permutation,
}

/// TTP-signed binding of a device identity to its public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub algorithm: u8,
    pub field: FieldSpec,
    pub params_fingerprint: [u8; 32],
    pub device_id: Vec<u8>,
    pub signer_id: Vec<u8>,
    pub public_key: PublicKey,
    pub signature: Vec<u8>,
}

impl Certificate {
    pub fn n(&self) -> usize {
        self.public_key.matrix.n()
    }
}

/// What a device stores: `C_i`, its inverse, and its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceKeyMaterial {
    pub coeffs: Vec<Fe>,
    pub c_matrix: Matrix,
    pub c_inverse: Matrix,
    pub cert: Certificate,
}

/// What the HD stores: `𝒞_α` and the T-values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomeDeviceSecret {
    pub alpha_set: ConjugateSet,
    pub tvals: TValues,
}

/// Signature check. A bad signature is `Ok(false)`; only a structurally
/// unusable certificate is an error.
pub fn verify_cert(cert: &Certificate, verifier: &dyn CertVerifier) -> Result<bool, KeygenError> {
    if cert.signature.len() != verifier.signature_len() {
        return Err(KeygenError::MalformedCert("signature length"));
    }
    if cert.algorithm != verifier.algorithm() || cert.signer_id != verifier.signer_id() {
        return Ok(false);
    }
    let tbs = wire::cert_tbs(cert);
    Ok(verifier.verify(&tbs, &cert.signature))
}

/// Issues key material for one device.
///
/// `β_i` is a product of `beta_factors` entries of `𝒞_γ` (with replacement,
/// each inverted with probability 1/2). Draws whose public key would fail the
/// default [`ValidationPolicy`] structure checks are discarded and redrawn, so
/// honest keys always validate; this matters only for toy fields.
pub fn gen_device_key<R: Rng + ?Sized>(
    params: &SystemParams,
    gamma: &ConjugateSet,
    tvals: &TValues,
    device_id: &[u8],
    beta_factors: usize,
    signer: &dyn CertSigner,
    rng: &mut R,
) -> Result<DeviceKeyMaterial, KeygenError> {
    if beta_factors == 0 {
        return Err(KeygenError::DegenerateLength("beta_factors"));
    }
    if gamma.len() < 2 {
        return Err(KeygenError::TooFewConjugates(gamma.len()));
    }
    let f = &params.field;
    let policy = ValidationPolicy::default();
    loop {
        let factors: Vec<(usize, bool)> = (0..beta_factors)
            .map(|_| (rng.gen_range(0..gamma.len()), rng.gen_bool(0.5)))
            .collect();
        let beta_i = gamma.product(params.n, &factors);
        let (coeffs, c) = sample_m0_polynomial(params, rng);
        let state = emult(f, &EMultState::from_matrix(c.clone()), &beta_i, tvals)?;
        let public_key = PublicKey {
            matrix: state.matrix,
            perm: state.perm,
        };
        if policy.check_structure(f, &public_key).is_err() {
            continue;
        }
        let c_inverse = c.inverse(f)?;
        let mut cert = Certificate {
            algorithm: signer.algorithm(),
            field: f.spec(),
            params_fingerprint: params.fingerprint(),
            device_id: device_id.to_vec(),
            signer_id: signer.signer_id().to_vec(),
            public_key,
            signature: Vec::new(),
        };
        cert.signature = signer.sign(&wire::cert_tbs(&cert));
        return Ok(DeviceKeyMaterial {
            coeffs,
            c_matrix: c,
            c_inverse,
            cert,
        });
    }
}

/// Everything the TTP keeps between issuances.
#[derive(Debug, Clone)]
pub struct Ttp {
    pub params: SystemParams,
    pub alpha: ConjugateSet,
    pub gamma: ConjugateSet,
    pub tvals: TValues,
    pub signer: KeyedHashSigner,
}

impl Ttp {
    pub fn setup<R: Rng + ?Sized>(
        params: SystemParams,
        cfg: &ConjugateConfig,
        signer_id: &[u8],
        rng: &mut R,
    ) -> Result<Self, KeygenError> {
        let (alpha, gamma) = gen_conjugate_sets(&params, cfg, rng)?;
        let tvals = gen_tvalues(&params, rng)?;
        let mut key = [0u8; 32];
        rng.fill(&mut key);
        Ok(Ttp {
            params,
            alpha,
            gamma,
            tvals,
            signer: KeyedHashSigner::new(key, signer_id),
        })
    }

    pub fn hd_secret(&self) -> HomeDeviceSecret {
        HomeDeviceSecret {
            alpha_set: self.alpha.clone(),
            tvals: self.tvals.clone(),
        }
    }

    pub fn issue_device<R: Rng + ?Sized>(
        &self,
        device_id: &[u8],
        beta_factors: usize,
        rng: &mut R,
    ) -> Result<DeviceKeyMaterial, KeygenError> {
        gen_device_key(
            &self.params,
            &self.gamma,
            &self.tvals,
            device_id,
            beta_factors,
            &self.signer,
            rng,
        )
    }

    pub fn verifier(&self) -> &KeyedHashSigner {
        &self.signer
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emult::probably_equal_braids;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_params(seed: u64) -> SystemParams {
        SystemParams::generate(4, FieldSpec::prime(5), &mut ChaCha8Rng::seed_from_u64(seed))
            .unwrap()
    }

    #[test]
    fn params_have_independent_powers() {
        let p = SystemParams::generate(16, FieldSpec::GF256, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        assert_eq!(p.m0_powers().len(), 16);
        assert!(p.m0_powers()[0].is_identity());
        assert_eq!(p.m0_powers()[1], *p.m0());
        let flat: Vec<Vec<Fe>> = p.m0_powers().iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(rank(p.field(), &flat), 16);
        assert_eq!(toy_params(3), toy_params(3));
    }

    #[test]
    fn params_reject_bad_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            SystemParams::generate(5, FieldSpec::prime(5), &mut rng),
            Err(KeygenError::BadStrandCount(5))
        ));
        assert!(SystemParams::generate(2, FieldSpec::prime(5), &mut rng).is_err());
        assert!(SystemParams::generate(34, FieldSpec::GF256, &mut rng).is_err());
        assert!(SystemParams::generate(4, FieldSpec::binary(0x100), &mut rng).is_err());
        // Identity generates only scalars.
        assert!(matches!(
            SystemParams::from_m0(Field::gf256(), Matrix::identity(4)),
            Err(KeygenError::DegenerateM0(1))
        ));
    }

    #[test]
    fn m0_polynomials() {
        let p = toy_params(2);
        let mut e0 = vec![Fe::ZERO; 4];
        e0[0] = Fe::ONE;
        assert!(p.polynomial_matrix(&e0).is_identity());
        let mut e1 = vec![Fe::ZERO; 4];
        e1[1] = Fe::ONE;
        assert_eq!(p.polynomial_matrix(&e1), *p.m0());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (_, a) = sample_m0_polynomial(&p, &mut rng);
            let (_, b) = sample_m0_polynomial(&p, &mut rng);
            assert_eq!(a.mul(p.field(), &b).unwrap(), b.mul(p.field(), &a).unwrap());
            assert!(a.is_invertible(p.field()));
        }
    }

    #[test]
    fn every_nonzero_m0_polynomial_is_invertible_at_toy_size() {
        // F_5[m0] ≅ F_625: exhaust all 624 nonzero coefficient vectors.
        let p = toy_params(4);
        for idx in 1..625u32 {
            let coeffs: Vec<Fe> = (0..4)
                .map(|k| Fe::new((idx / 5u32.pow(k) % 5) as u16))
                .collect();
            assert!(
                p.polynomial_matrix(&coeffs).is_invertible(p.field()),
                "{coeffs:?}"
            );
        }
    }

    #[test]
    fn conjugate_sets_commute_and_flag_pure_entries() {
        let p =
            SystemParams::generate(8, FieldSpec::GF256, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = ConjugateConfig {
            r: 6,
            z_length: 12,
            word_length: 10,
            pure_fraction: 0.5,
        };
        let (alpha, gamma) = gen_conjugate_sets(&p, &cfg, &mut rng).unwrap();
        assert_eq!(alpha.len(), 6);
        assert_eq!(alpha.pure_indices().len(), 3);
        for k in alpha.pure_indices() {
            assert!(alpha.conjugates[k].permutation().is_identity());
        }
        for a in &alpha.conjugates {
            for g in &gamma.conjugates {
                let ag = a.concat(g).unwrap();
                let ga = g.concat(a).unwrap();
                assert!(probably_equal_braids(p.field(), &ag, &ga, 20, &mut rng).unwrap());
            }
        }
    }

    #[test]
    fn conjugate_config_errors() {
        let p = toy_params(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let base = ConjugateConfig::toy();
        for cfg in [
            ConjugateConfig { r: 1, ..base },
            ConjugateConfig {
                z_length: 0,
                ..base
            },
            ConjugateConfig {
                word_length: 1,
                ..base
            },
            ConjugateConfig {
                pure_fraction: 1.5,
                ..base
            },
        ] {
            assert!(gen_conjugate_sets(&p, &cfg, &mut rng).is_err());
        }
    }

    #[test]
    fn tvalues_avoid_zero_and_one() {
        let p = toy_params(1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            for t in gen_tvalues(&p, &mut rng).unwrap().values() {
                seen.insert(t.value());
            }
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![2, 3, 4]);
    }

    #[test]
    fn brute_force_tvalue_count() {
        // Enumerate all 4-tuples over F_5 and count the admissible ones.
        let q = 5u32;
        let n = 4u32;
        let admissible = (0..q.pow(n))
            .filter(|idx| {
                let vals: Vec<u16> = (0..n).map(|k| (idx / q.pow(k) % q) as u16).collect();
                TValues::from_u16(&vals).is_ok()
            })
            .count();
        assert_eq!(admissible as u32, (q - 2).pow(n));
    }

    #[test]
    fn device_issuance() {
        let p = toy_params(7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ttp = Ttp::setup(p.clone(), &ConjugateConfig::toy(), b"ttp", &mut rng).unwrap();
        let dev = ttp.issue_device(b"dev1", 4, &mut rng).unwrap();
        let f = p.field();
        assert!(dev.c_matrix.mul(f, &dev.c_inverse).unwrap().is_identity());
        assert_eq!(p.polynomial_matrix(&dev.coeffs), dev.c_matrix);
        assert!(verify_cert(&dev.cert, ttp.verifier()).unwrap());

        let mut tampered = dev.cert.clone();
        let v = tampered.public_key.matrix.get(0, 0);
        tampered.public_key.matrix.set(0, 0, f.add(v, Fe::ONE));
        assert!(!verify_cert(&tampered, ttp.verifier()).unwrap());

        let mut truncated = dev.cert.clone();
        truncated.signature.pop();
        assert!(matches!(
            verify_cert(&truncated, ttp.verifier()),
            Err(KeygenError::MalformedCert(_))
        ));

        let other = KeyedHashSigner::new([0; 32], "ttp");
        assert!(!verify_cert(&dev.cert, &other).unwrap());
    }

    #[test]
    fn public_key_is_c_times_m() {
        let p = toy_params(10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (alpha, gamma) = gen_conjugate_sets(&p, &ConjugateConfig::toy(), &mut rng).unwrap();
        let _ = alpha;
        let tvals = gen_tvalues(&p, &mut rng).unwrap();
        let signer = KeyedHashSigner::new([1; 32], "ttp");
        // Re-run with a cloned rng to recover β_i: the first draw is the
        // factor list, then the coefficients.
        let mut probe = rng.clone();
        let dev = gen_device_key(&p, &gamma, &tvals, b"d", 3, &signer, &mut rng).unwrap();
        let factors: Vec<(usize, bool)> = (0..3)
            .map(|_| (probe.gen_range(0..gamma.len()), probe.gen_bool(0.5)))
            .collect();
        let beta_i = gamma.product(4, &factors);
        let (coeffs, c) = sample_m0_polynomial(&p, &mut probe);
        if coeffs == dev.coeffs {
            let m_i = emult(p.field(), &EMultState::identity(4), &beta_i, &tvals).unwrap();
            assert_eq!(
                dev.cert.public_key.matrix,
                c.mul(p.field(), &m_i.matrix).unwrap()
            );
            assert_eq!(dev.cert.public_key.perm, m_i.perm);
        }
    }

    #[test]
    fn distinct_devices_get_distinct_keys() {
        let p = SystemParams::generate(16, FieldSpec::GF256, &mut ChaCha8Rng::seed_from_u64(12))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = ConjugateConfig {
            r: 8,
            z_length: 16,
            word_length: 16,
            pure_fraction: 0.5,
        };
        let ttp = Ttp::setup(p, &cfg, b"ttp", &mut rng).unwrap();
        let mut seen = std::collections::HashSet::new();
        for k in 0..100 {
            let dev = ttp
                .issue_device(format!("dev{k}").as_bytes(), 4, &mut rng)
                .unwrap();
            assert!(seen.insert(dev.c_matrix));
        }
    }
}
