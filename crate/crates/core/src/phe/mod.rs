//! Paillier cryptosystem with the additive homomorphisms needed to compute
//! encrypted coordinate differences.
//!
//! The generator is fixed at `g = n + 1`, which turns `g^m mod n²` into
//! `1 + m·n` and removes one exponentiation from every encryption.
//! Signed plaintexts live in `Z_n` with the usual split at `n/2`; see
//! [`decode_signed`].

pub mod prime;

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{CodecError, Reader, Writer};

/// Smallest modulus size accepted by [`keygen`].
pub const MIN_KEY_BITS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PheError {
    #[error("invalid key size {0}: must be even and at least 64 bits")]
    InvalidKeySize(u64),
    #[error("invalid primes: {0}")]
    InvalidPrimes(&'static str),
    #[error("plaintext out of range [0, n)")]
    PlaintextOutOfRange,
    #[error("scalar out of range [0, n)")]
    ScalarOutOfRange,
    #[error("ciphertext was produced under a different public key")]
    KeyMismatch,
    #[error("value is not an element of Z*_(n^2)")]
    InvalidCiphertext,
    #[error("ciphertext has no inverse modulo n^2")]
    NotInvertible,
}

/// Short fingerprint of a public modulus, carried by every ciphertext.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeyTag([u8; 8]);

impl KeyTag {
    fn of(n: &BigUint) -> Self {
        let digest = Sha256::digest(n.to_bytes_be());
        KeyTag(digest[..8].try_into().unwrap())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PaillierPublicKey {
    n: BigUint,
    g: BigUint,
    n_squared: BigUint,
    tag: KeyTag,
}

impl fmt::Debug for PaillierPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PaillierPublicKey")
            .field("bits", &self.n.bits())
            .field("tag", &self.tag)
            .finish()
    }
}

impl PaillierPublicKey {
    /// Builds a public key from its modulus. Only basic shape checks are
    /// possible without the factorization.
    pub fn from_modulus(n: BigUint) -> Result<Self, PheError> {
        if n.bits() < 4 || n.is_even() {
            return Err(PheError::InvalidPrimes("modulus must be odd and non-trivial"));
        }
        let g = &n + 1u8;
        let n_squared = &n * &n;
        let tag = KeyTag::of(&n);
        Ok(Self { n, g, n_squared, tag })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n_squared
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    pub fn tag(&self) -> KeyTag {
        self.tag
    }

    /// Encrypts `m` with fresh randomness `r ∈ Z*_n`.
    pub fn encrypt<R: RngCore + ?Sized>(
        &self,
        m: &BigUint,
        rng: &mut R,
    ) -> Result<PaillierCiphertext, PheError> {
        if m >= &self.n {
            return Err(PheError::PlaintextOutOfRange);
        }
        let r = loop {
            let r = rng.gen_biguint_range(&BigUint::one(), &self.n);
            if r.gcd(&self.n).is_one() {
                break r;
            }
        };
        Ok(self.encrypt_with_nonce(m, &r))
    }

    /// Deterministic encryption with caller-supplied `r`. `r` must be a unit
    /// mod n; exposed for known-answer tests.
    pub fn encrypt_with_nonce(&self, m: &BigUint, r: &BigUint) -> PaillierCiphertext {
        // g^m = (1 + n)^m = 1 + m·n (mod n²)
        let gm = (BigUint::one() + m * &self.n) % &self.n_squared;
        let rn = r.modpow(&self.n, &self.n_squared);
        PaillierCiphertext {
            value: (gm * rn) % &self.n_squared,
            tag: self.tag,
        }
    }

    /// Validates a raw group element received off the wire and binds it to
    /// this key.
    pub fn bind(&self, value: BigUint) -> Result<PaillierCiphertext, PheError> {
        if value.is_zero() || value >= self.n_squared || !value.gcd(&self.n).is_one() {
            return Err(PheError::InvalidCiphertext);
        }
        Ok(PaillierCiphertext { value, tag: self.tag })
    }

    fn check(&self, c: &PaillierCiphertext) -> Result<(), PheError> {
        if c.tag != self.tag {
            Err(PheError::KeyMismatch)
        } else {
            Ok(())
        }
    }

    /// `Enc(m1) · Enc(m2) = Enc(m1 + m2)`.
    pub fn add(
        &self,
        c1: &PaillierCiphertext,
        c2: &PaillierCiphertext,
    ) -> Result<PaillierCiphertext, PheError> {
        self.check(c1)?;
        self.check(c2)?;
        Ok(PaillierCiphertext {
            value: (&c1.value * &c2.value) % &self.n_squared,
            tag: self.tag,
        })
    }

    /// `Enc(m1) · Enc(m2)^-1 = Enc(m1 - m2 mod n)`.
    pub fn sub(
        &self,
        c1: &PaillierCiphertext,
        c2: &PaillierCiphertext,
    ) -> Result<PaillierCiphertext, PheError> {
        self.check(c1)?;
        self.check(c2)?;
        let inv = c2
            .value
            .modinv(&self.n_squared)
            .ok_or(PheError::NotInvertible)?;
        Ok(PaillierCiphertext {
            value: (&c1.value * inv) % &self.n_squared,
            tag: self.tag,
        })
    }

    /// `Enc(m)^k = Enc(m · k mod n)`.
    pub fn scalar_mul(
        &self,
        c: &PaillierCiphertext,
        k: &BigUint,
    ) -> Result<PaillierCiphertext, PheError> {
        self.check(c)?;
        if k >= &self.n {
            return Err(PheError::ScalarOutOfRange);
        }
        Ok(PaillierCiphertext {
            value: c.value.modpow(k, &self.n_squared),
            tag: self.tag,
        })
    }

    /// Wire form: the modulus as a length-prefixed big-endian integer.
    pub fn encode(&self, w: &mut Writer) {
        w.biguint(&self.n);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let n = r.biguint("paillier.n")?;
        Self::from_modulus(n).map_err(|e| CodecError::Malformed {
            field: "paillier.n",
            reason: e.to_string(),
        })
    }
}

/// Decryption material. Holds the factorization so decryption can run mod p²
/// and q² separately; `lambda`/`mu` are kept for the textbook formula.
#[derive(Clone)]
pub struct PaillierPrivateKey {
    public: PaillierPublicKey,
    lambda: BigUint,
    mu: BigUint,
    p: BigUint,
    q: BigUint,
    p_squared: BigUint,
    q_squared: BigUint,
    hp: BigUint,
    hq: BigUint,
    q_inv_p: BigUint,
}

impl fmt::Debug for PaillierPrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PaillierPrivateKey")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

/// `L(x) = (x - 1) / d`.
fn l_function(x: &BigUint, d: &BigUint) -> BigUint {
    (x - 1u8) / d
}

impl PaillierPrivateKey {
    /// Builds a key pair from two distinct primes. Used by [`keygen`] and,
    /// directly, for toy moduli below the keygen minimum.
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self, PheError> {
        if p == q {
            return Err(PheError::InvalidPrimes("p and q must be distinct"));
        }
        if p.is_even() || q.is_even() || p < BigUint::from(3u8) || q < BigUint::from(3u8) {
            return Err(PheError::InvalidPrimes("p and q must be odd primes"));
        }
        let n = &p * &q;
        let p1 = &p - 1u8;
        let q1 = &q - 1u8;
        if !n.gcd(&(&p1 * &q1)).is_one() {
            return Err(PheError::InvalidPrimes("gcd(n, (p-1)(q-1)) != 1"));
        }
        let public = PaillierPublicKey::from_modulus(n)?;
        let lambda = p1.lcm(&q1);
        let mu = lambda
            .modinv(&public.n)
            .ok_or(PheError::InvalidPrimes("lambda not invertible mod n"))?;

        let p_squared = &p * &p;
        let q_squared = &q * &q;
        let hp = Self::h_factor(&public.g, &p, &p_squared)?;
        let hq = Self::h_factor(&public.g, &q, &q_squared)?;
        let q_inv_p = q
            .modinv(&p)
            .ok_or(PheError::InvalidPrimes("q not invertible mod p"))?;

        Ok(Self {
            public,
            lambda,
            mu,
            p,
            q,
            p_squared,
            q_squared,
            hp,
            hq,
            q_inv_p,
        })
    }

    fn h_factor(g: &BigUint, p: &BigUint, p_squared: &BigUint) -> Result<BigUint, PheError> {
        let x = g.modpow(&(p - 1u8), p_squared);
        l_function(&x, p)
            .modinv(p)
            .ok_or(PheError::InvalidPrimes("h factor not invertible"))
    }

    pub fn public_key(&self) -> &PaillierPublicKey {
        &self.public
    }

    pub fn lambda(&self) -> &BigUint {
        &self.lambda
    }

    pub fn mu(&self) -> &BigUint {
        &self.mu
    }

    /// Byte strings that must never leave the key owner; used by privacy scans.
    pub fn secret_material(&self) -> Vec<Vec<u8>> {
        vec![
            self.p.to_bytes_be(),
            self.q.to_bytes_be(),
            self.lambda.to_bytes_be(),
            self.mu.to_bytes_be(),
        ]
    }

    fn check(&self, c: &PaillierCiphertext) -> Result<(), PheError> {
        if c.tag != self.public.tag {
            return Err(PheError::KeyMismatch);
        }
        if c.value.is_zero()
            || c.value >= self.public.n_squared
            || !c.value.gcd(&self.public.n).is_one()
        {
            return Err(PheError::InvalidCiphertext);
        }
        Ok(())
    }

    /// Decrypts via the CRT split over p² and q².
    pub fn decrypt(&self, c: &PaillierCiphertext) -> Result<BigUint, PheError> {
        self.check(c)?;
        let mp = (l_function(&c.value.modpow(&(&self.p - 1u8), &self.p_squared), &self.p)
            * &self.hp)
            % &self.p;
        let mq = (l_function(&c.value.modpow(&(&self.q - 1u8), &self.q_squared), &self.q)
            * &self.hq)
            % &self.q;
        // Garner: m = mq + q·((mp - mq)·q⁻¹ mod p)
        let diff = (&mp + &self.p - (&mq % &self.p)) % &self.p;
        let h = (diff * &self.q_inv_p) % &self.p;
        Ok(mq + h * &self.q)
    }

    /// Textbook decryption `L(c^λ mod n²)·μ mod n`.
    pub fn decrypt_textbook(&self, c: &PaillierCiphertext) -> Result<BigUint, PheError> {
        self.check(c)?;
        let n = &self.public.n;
        let x = c.value.modpow(&self.lambda, &self.public.n_squared);
        Ok((l_function(&x, n) * &self.mu) % n)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PaillierCiphertext {
    value: BigUint,
    tag: KeyTag,
}

impl fmt::Debug for PaillierCiphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PaillierCiphertext")
            .field("bits", &self.value.bits())
            .field("tag", &self.tag)
            .finish()
    }
}

impl PaillierCiphertext {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn tag(&self) -> KeyTag {
        self.tag
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }
}

/// Generates a key pair whose modulus has exactly `bits` bits.
pub fn keygen<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Result<PaillierPrivateKey, PheError> {
    if bits < MIN_KEY_BITS || bits % 2 != 0 {
        return Err(PheError::InvalidKeySize(bits));
    }
    loop {
        let p = prime::random_prime(bits / 2, rng);
        let q = prime::random_prime(bits / 2, rng);
        if p == q {
            continue;
        }
        match PaillierPrivateKey::from_primes(p, q) {
            Ok(sk) => {
                debug_assert_eq!(sk.public.bits(), bits);
                return Ok(sk);
            }
            Err(PheError::InvalidPrimes(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Maps a residue in `[0, n)` to a signed integer, treating values above
/// `n/2` as negative.
pub fn decode_signed(m: &BigUint, n: &BigUint) -> BigInt {
    let half = n >> 1u32;
    if m <= &half {
        BigInt::from_biguint(Sign::Plus, m.clone())
    } else {
        BigInt::from_biguint(Sign::Plus, m.clone()) - BigInt::from_biguint(Sign::Plus, n.clone())
    }
}

/// Inverse of [`decode_signed`] for `|v| < n/2`.
pub fn encode_signed(v: &BigInt, n: &BigUint) -> BigUint {
    let n_int = BigInt::from_biguint(Sign::Plus, n.clone());
    let r = v.mod_floor(&n_int);
    debug_assert!(!r.is_negative());
    r.to_biguint().unwrap()
}
