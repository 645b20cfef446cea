//! Arithmetic in small finite fields F_q.
//!
//! Two shapes are supported: binary extension fields GF(2^m) for
//! `2 <= m <= 16` (the default deployment field is GF(2^8) reduced by
//! `x^8 + x^4 + x^3 + x + 1`), and prime fields F_p for `3 <= p < 2^16`,
//! which exist mostly as toy-sized cross-checks.
//!
//! Elements are plain [`Fe`] values; every operation goes through an explicit
//! [`Field`] context. Nothing here is constant time.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("binary field degree {0} outside supported range 2..=16")]
    DegreeOutOfRange(u32),
    #[error("modulus {0:#x} is not an irreducible polynomial of degree {1}")]
    ReducibleModulus(u32, u32),
    #[error("{0} is not a prime in 3..65536")]
    NotPrime(u32),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("value {0} is not an element of a field with {1} elements")]
    OutOfRange(u32, u32),
    #[error("malformed field spec encoding")]
    MalformedSpec,
    #[error("unrecognized field name {0:?} (expected gf<2^m> or f<p>)")]
    UnknownName(String),
}

/// A field element. Its meaning depends on the [`Field`] it is used with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// Wraps a raw value without range checking; use [`Field::elem`] for
    /// checked construction.
    pub const fn new(value: u16) -> Self {
        Fe(value)
    }

    pub const fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Binary,
    Prime,
}

/// Defining data of a field: its kind, cardinality and modulus.
///
/// For binary fields `modulus` is the full reduction polynomial as a bitmask,
/// including the leading `x^m` term (e.g. `0x11B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub q: u32,
    pub modulus: u32,
}

impl FieldSpec {
    /// GF(2^8) reduced by `x^8 + x^4 + x^3 + x + 1`.
    pub const GF256: FieldSpec = FieldSpec {
        kind: FieldKind::Binary,
        q: 256,
        modulus: 0x11B,
    };

    pub fn binary(modulus: u32) -> Self {
        let m = 31 - modulus.max(1).leading_zeros();
        FieldSpec {
            kind: FieldKind::Binary,
            q: 1u32.checked_shl(m).unwrap_or(0),
            modulus,
        }
    }

    pub fn prime(p: u32) -> Self {
        FieldSpec {
            kind: FieldKind::Prime,
            q: p,
            modulus: p,
        }
    }

    /// Extension degree m for binary fields, 0 for prime fields.
    pub fn degree(&self) -> u32 {
        match self.kind {
            FieldKind::Binary => self.q.trailing_zeros(),
            FieldKind::Prime => 0,
        }
    }

    /// Bytes used per element on the wire: `ceil(ceil(log2 q) / 8)`.
    pub fn element_bytes(&self) -> usize {
        let bits = 32 - (self.q - 1).leading_zeros();
        bits.div_ceil(8) as usize
    }

    /// 4-byte form: `kind || m-or-0 || modulus (16-bit BE)`.
    ///
    /// Binary moduli are stored without their leading `x^m` term so that
    /// degree-16 polynomials fit.
    pub fn to_bytes(&self) -> [u8; 4] {
        let (kind, m, low) = match self.kind {
            FieldKind::Binary => (0x01, self.degree() as u8, self.modulus & (self.q - 1)),
            FieldKind::Prime => (0x02, 0, self.modulus),
        };
        let low = (low as u16).to_be_bytes();
        [kind, m, low[0], low[1]]
    }

    pub fn from_bytes(bytes: [u8; 4]) -> Result<Self, FieldError> {
        let low = u16::from_be_bytes([bytes[2], bytes[3]]) as u32;
        match (bytes[0], bytes[1]) {
            (0x01, m) if (2..=16).contains(&m) => Ok(FieldSpec {
                kind: FieldKind::Binary,
                q: 1 << m,
                modulus: (1 << m) | low,
            }),
            (0x02, 0) => Ok(FieldSpec::prime(low)),
            _ => Err(FieldError::MalformedSpec),
        }
    }

    /// Binary field of order `2^m` under a fixed low-weight irreducible
    /// modulus.
    pub fn binary_default(m: u32) -> Result<Self, FieldError> {
        const MODULI: [u32; 15] = [
            0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
            0x8003, 0x1100B,
        ];
        match m {
            2..=16 => Ok(FieldSpec::binary(MODULI[m as usize - 2])),
            _ => Err(FieldError::DegreeOutOfRange(m)),
        }
    }

    /// Inverse of [`FieldSpec::name`] for default moduli.
    pub fn from_name(name: &str) -> Result<Self, FieldError> {
        let unknown = || FieldError::UnknownName(name.to_string());
        let lower = name.to_ascii_lowercase();
        if let Some(q) = lower.strip_prefix("gf") {
            let q: u32 = q.parse().map_err(|_| unknown())?;
            if !q.is_power_of_two() {
                return Err(unknown());
            }
            FieldSpec::binary_default(q.trailing_zeros())
        } else if let Some(p) = lower.strip_prefix('f') {
            Ok(FieldSpec::prime(p.parse().map_err(|_| unknown())?))
        } else {
            Err(unknown())
        }
    }

    /// Short name for CLI output: `gf256`, `gf16`, `f5`, ...
    pub fn name(&self) -> String {
        match self.kind {
            FieldKind::Binary => format!("gf{}", self.q),
            FieldKind::Prime => format!("f{}", self.q),
        }
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            FieldKind::Binary => write!(f, "GF(2^{}) mod {:#x}", self.degree(), self.modulus),
            FieldKind::Prime => write!(f, "F_{}", self.q),
        }
    }
}

/// Carry-less multiply of two GF(2)[x] polynomials followed by reduction.
pub fn clmul_reduce(a: u32, b: u32, modulus: u32) -> u32 {
    let m = 31 - modulus.leading_zeros();
    let mut a = a;
    let mut b = b;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

/// Remainder of GF(2)[x] polynomial division.
fn gf2_poly_rem(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 && 31 - a.leading_zeros() >= db {
        let shift = (31 - a.leading_zeros()) - db;
        a ^= b << shift;
    }
    a
}

/// Exhaustive trial division by every polynomial of degree 1..=m/2.
fn gf2_is_irreducible(poly: u32) -> bool {
    let m = 31 - poly.leading_zeros();
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        for low in 0..(1u32 << d) {
            if gf2_poly_rem(poly, (1 << d) | low) == 0 {
                return false;
            }
        }
    }
    true
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone)]
struct LogTables {
    // exp has 2(q-1) entries so that exp[log a + log b] never wraps.
    exp: Vec<u16>,
    log: Vec<u16>,
}

/// A validated field context.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    tables: Option<LogTables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        match spec.kind {
            FieldKind::Binary => {
                let m = spec.degree();
                if spec.q.count_ones() != 1 || !(2..=16).contains(&m) {
                    return Err(FieldError::DegreeOutOfRange(m));
                }
                if spec.modulus >> m != 1 || !gf2_is_irreducible(spec.modulus) {
                    return Err(FieldError::ReducibleModulus(spec.modulus, m));
                }
                let tables = build_log_tables(spec);
                Ok(Field {
                    spec,
                    tables: Some(tables),
                })
            }
            FieldKind::Prime => {
                if spec.q != spec.modulus || !(3..65536).contains(&spec.q) || !is_prime(spec.q) {
                    return Err(FieldError::NotPrime(spec.modulus));
                }
                Ok(Field { spec, tables: None })
            }
        }
    }

    /// The default GF(2^8) field.
    pub fn gf256() -> Self {
        Field::new(FieldSpec::GF256).expect("0x11B is irreducible")
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn q(&self) -> u32 {
        self.spec.q
    }

    pub fn characteristic(&self) -> u32 {
        match self.spec.kind {
            FieldKind::Binary => 2,
            FieldKind::Prime => self.spec.q,
        }
    }

    pub fn elem(&self, value: u32) -> Result<Fe, FieldError> {
        if value < self.spec.q {
            Ok(Fe(value as u16))
        } else {
            Err(FieldError::OutOfRange(value, self.spec.q))
        }
    }

    /// Image of an integer under the canonical map Z -> F_q.
    pub fn from_int(&self, n: i64) -> Fe {
        let c = self.characteristic() as i64;
        let r = n.rem_euclid(c) as u16;
        // r is 0 or 1 in characteristic 2.
        Fe(r)
    }

    #[inline]
    fn check(&self, a: Fe) {
        debug_assert!(
            (a.0 as u32) < self.spec.q,
            "element {} not in {}",
            a.0,
            self.spec
        );
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.check(a);
        self.check(b);
        match self.spec.kind {
            FieldKind::Binary => Fe(a.0 ^ b.0),
            FieldKind::Prime => {
                let s = a.0 as u32 + b.0 as u32;
                let p = self.spec.q;
                Fe(if s >= p { s - p } else { s } as u16)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.check(a);
        match self.spec.kind {
            FieldKind::Binary => a,
            FieldKind::Prime => {
                if a.0 == 0 {
                    a
                } else {
                    Fe((self.spec.q - a.0 as u32) as u16)
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.check(a);
        self.check(b);
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    Fe(0)
                } else {
                    Fe(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
                }
            }
            None => Fe(((a.0 as u32 * b.0 as u32) % self.spec.q) as u16),
        }
    }

    /// Multiplication by carry-less shift-and-reduce (binary) or plain modular
    /// reduction (prime), bypassing the log tables.
    pub fn mul_reference(&self, a: Fe, b: Fe) -> Fe {
        match self.spec.kind {
            FieldKind::Binary => Fe(clmul_reduce(a.0 as u32, b.0 as u32, self.spec.modulus) as u16),
            FieldKind::Prime => Fe(((a.0 as u32 * b.0 as u32) % self.spec.q) as u16),
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        self.check(a);
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match &self.tables {
            Some(t) => {
                let order = self.spec.q as usize - 1;
                Fe(t.exp[order - t.log[a.0 as usize] as usize])
            }
            None => self.pow(a, self.spec.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.spec.q) as u16)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.spec.q) as u16)
    }

    /// All field elements in increasing raw-value order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.spec.q).map(|v| Fe(v as u16))
    }
}

fn build_log_tables(spec: FieldSpec) -> LogTables {
    let q = spec.q;
    let order = q - 1;
    let factors = prime_factors(order);
    let slow_pow = |g: u32, mut e: u32| {
        let mut base = g;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = clmul_reduce(acc, base, spec.modulus);
            }
            base = clmul_reduce(base, base, spec.modulus);
            e >>= 1;
        }
        acc
    };
    // The multiplicative group of a field is cyclic, so a generator exists.
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&p| slow_pow(g, order / p) != 1))
        .expect("cyclic group has a generator");

    let mut exp = vec![0u16; 2 * order as usize];
    let mut log = vec![0u16; q as usize];
    let mut x = 1u32;
    for i in 0..order {
        exp[i as usize] = x as u16;
        exp[(i + order) as usize] = x as u16;
        log[x as usize] = i as u16;
        x = clmul_reduce(x, generator, spec.modulus);
    }
    let tables = LogTables { exp, log };
    validate_tables(spec, &tables);
    tables
}

/// Cross-checks the table path against shift-and-reduce: exhaustively for
/// q <= 256, on a fixed pseudo-random sample otherwise.
fn validate_tables(spec: FieldSpec, t: &LogTables) {
    let table_mul = |a: u32, b: u32| -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize] as u32
        }
    };
    let q = spec.q;
    if q <= 256 {
        for a in 0..q {
            for b in 0..q {
                assert_eq!(
                    table_mul(a, b),
                    clmul_reduce(a, b, spec.modulus),
                    "log table mismatch in {spec}"
                );
            }
        }
    } else {
        let mut s = 0x9E37_79B9u32;
        for _ in 0..(1 << 14) {
            s ^= s << 13;
            s ^= s >> 17;
            s ^= s << 5;
            let (a, b) = (s % q, (s >> 16) % q);
            assert_eq!(
                table_mul(a, b),
                clmul_reduce(a, b, spec.modulus),
                "log table mismatch in {spec}"
            );
        }
    }
}
