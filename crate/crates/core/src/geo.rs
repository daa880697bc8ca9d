//! Coordinate normalization, coordinate encryption, homomorphic coordinate
//! differences, and the two distance estimates compared by the protocol:
//! location-based (equirectangular) and time-of-flight.
//!
//! The real-valued functions are generic over [`num_traits::Float`];
//! `f64` is what the protocol uses.

use num_bigint::{BigUint, ToBigInt};
use num_traits::{Float, ToPrimitive};
use rand::RngCore;
use thiserror::Error;

use crate::phe::{self, PaillierCiphertext, PaillierPrivateKey, PaillierPublicKey, PheError};
use crate::time::{SimDuration, SimTime, SPEED_OF_LIGHT_M_PER_S};

/// Meters per degree of latitude (and of longitude at the equator).
pub const METERS_PER_DEGREE: f64 = 111_320.0;

/// Micro-degree resolution, roughly 0.11 m.
pub const DEFAULT_NORMALIZE_FACTOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
    #[error("longitude {0} outside [-180, 180]")]
    LongitudeOutOfRange(f64),
    #[error("normalize factor must be positive")]
    ZeroFactor,
    #[error("decoded difference {0} exceeds the half-range bound")]
    DifferenceOutOfRange(String),
    #[error(transparent)]
    Phe(#[from] PheError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RangingError {
    #[error("reply received before the request was sent")]
    ReplyBeforeRequest,
    #[error("processing delay exceeds the measured round trip")]
    NegativeFlightTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Latitude,
    Longitude,
}

impl Axis {
    fn offset(self) -> f64 {
        match self {
            Axis::Latitude => 90.0,
            Axis::Longitude => 180.0,
        }
    }
}

/// A validated (latitude, longitude) pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoCoordinate<F> {
    lat: F,
    lng: F,
}

impl<F: Float> GeoCoordinate<F> {
    pub fn new(lat: F, lng: F) -> Result<Self, GeoError> {
        let lat_f = lat.to_f64().unwrap_or(f64::NAN);
        let lng_f = lng.to_f64().unwrap_or(f64::NAN);
        if !(-90.0..=90.0).contains(&lat_f) {
            return Err(GeoError::LatitudeOutOfRange(lat_f));
        }
        if !(-180.0..=180.0).contains(&lng_f) {
            return Err(GeoError::LongitudeOutOfRange(lng_f));
        }
        Ok(Self { lat, lng })
    }

    pub fn lat(&self) -> F {
        self.lat
    }

    pub fn lng(&self) -> F {
        self.lng
    }

    /// Point displaced `east_m`/`north_m` meters on the local equirectangular
    /// plane tangent at `self`.
    pub fn offset_by(&self, east_m: F, north_m: F) -> Result<Self, GeoError> {
        let m_deg = F::from(METERS_PER_DEGREE).unwrap();
        let lat = self.lat + north_m / m_deg;
        let lng = self.lng + east_m / (m_deg * self.lat.to_radians().cos());
        Self::new(lat, lng)
    }

    pub fn normalize(&self, factor: u64) -> Result<NormalizedCoordinate, GeoError> {
        Ok(NormalizedCoordinate {
            lat_units: normalize_deg(self.lat, Axis::Latitude, factor)?,
            lng_units: normalize_deg(self.lng, Axis::Longitude, factor)?,
            factor,
        })
    }
}

/// Non-negative integer coordinate units, ready for encryption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormalizedCoordinate {
    pub lat_units: u64,
    pub lng_units: u64,
    pub factor: u64,
}

impl NormalizedCoordinate {
    /// Canonical 16-byte form: both unit counts as big-endian u64.
    pub fn to_bytes(&self) -> [u8; 16] {
        let mut out = [0u8; 16];
        out[..8].copy_from_slice(&self.lat_units.to_be_bytes());
        out[8..].copy_from_slice(&self.lng_units.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: [u8; 16], factor: u64) -> Self {
        Self {
            lat_units: u64::from_be_bytes(bytes[..8].try_into().unwrap()),
            lng_units: u64::from_be_bytes(bytes[8..].try_into().unwrap()),
            factor,
        }
    }

    /// Back to degrees; exact up to the rounding applied at normalization.
    pub fn to_degrees<F: Float>(&self) -> (F, F) {
        let f = F::from(self.factor).unwrap();
        (
            F::from(self.lat_units).unwrap() / f - F::from(90.0).unwrap(),
            F::from(self.lng_units).unwrap() / f - F::from(180.0).unwrap(),
        )
    }
}

/// `round((deg + offset) · factor)`, offset 90 for latitude and 180 for
/// longitude.
pub fn normalize_deg<F: Float>(deg: F, axis: Axis, factor: u64) -> Result<u64, GeoError> {
    if factor == 0 {
        return Err(GeoError::ZeroFactor);
    }
    let d = deg.to_f64().unwrap_or(f64::NAN);
    match axis {
        Axis::Latitude if !(-90.0..=90.0).contains(&d) => {
            return Err(GeoError::LatitudeOutOfRange(d))
        }
        Axis::Longitude if !(-180.0..=180.0).contains(&d) => {
            return Err(GeoError::LongitudeOutOfRange(d))
        }
        _ => {}
    }
    let shifted = deg + F::from(axis.offset()).unwrap();
    let scaled = (shifted * F::from(factor).unwrap()).round();
    Ok(scaled.to_u64().expect("non-negative and bounded"))
}

/// Signed unit difference back to a degree difference.
pub fn denormalize_diff<F: Float>(units: i64, factor: u64) -> F {
    F::from(units).unwrap() / F::from(factor).unwrap()
}

/// Equirectangular distance in meters between two points whose normalized
/// coordinates differ by the given units, using `ref_lat` for the longitude
/// scale.
pub fn euclid_distance_m<F: Float>(dlat_units: i64, dlng_units: i64, ref_lat: F, factor: u64) -> F {
    let m_deg = F::from(METERS_PER_DEGREE).unwrap();
    let dy = denormalize_diff::<F>(dlat_units, factor) * m_deg;
    let dx = denormalize_diff::<F>(dlng_units, factor) * m_deg * ref_lat.to_radians().cos();
    dx.hypot(dy)
}

/// Time-of-flight distance `c·δ/2` with `δ = (t2 - t1) - delta_proc`.
pub fn d_tof<F: Float>(
    t1: SimTime,
    t2: SimTime,
    delta_proc: SimDuration,
) -> Result<F, RangingError> {
    if t2 < t1 {
        return Err(RangingError::ReplyBeforeRequest);
    }
    let rtt = t2 - t1;
    if delta_proc > rtt {
        return Err(RangingError::NegativeFlightTime);
    }
    let delta = SimDuration(rtt.0 - delta_proc.0);
    let c = F::from(SPEED_OF_LIGHT_M_PER_S).unwrap();
    Ok(c * F::from(delta.as_secs_f64()).unwrap() / F::from(2.0).unwrap())
}

/// Encrypted normalized latitude (`x`) and longitude (`y`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedCoordinate {
    pub x: PaillierCiphertext,
    pub y: PaillierCiphertext,
}

/// Normalizes and encrypts both axes under `ppk`.
pub fn enc_coord<F: Float, R: RngCore + ?Sized>(
    ppk: &PaillierPublicKey,
    coord: &GeoCoordinate<F>,
    factor: u64,
    rng: &mut R,
) -> Result<EncryptedCoordinate, GeoError> {
    let norm = coord.normalize(factor)?;
    Ok(EncryptedCoordinate {
        x: ppk.encrypt(&BigUint::from(norm.lat_units), rng)?,
        y: ppk.encrypt(&BigUint::from(norm.lng_units), rng)?,
    })
}

/// Homomorphic `input - mine` on both axes.
pub fn hec_diff(
    ppk: &PaillierPublicKey,
    input: &EncryptedCoordinate,
    mine: &EncryptedCoordinate,
) -> Result<(PaillierCiphertext, PaillierCiphertext), GeoError> {
    Ok((ppk.sub(&input.x, &mine.x)?, ppk.sub(&input.y, &mine.y)?))
}

/// Decrypts one difference ciphertext into signed units, rejecting anything
/// beyond the widest legal coordinate difference.
pub fn decrypt_diff_units(
    sk: &PaillierPrivateKey,
    c: &PaillierCiphertext,
    bound_units: u64,
) -> Result<i64, GeoError> {
    let m = sk.decrypt(c)?;
    let signed = phe::decode_signed(&m, sk.public_key().n());
    let bound = bound_units.to_bigint().unwrap();
    if signed > bound || signed < -bound {
        return Err(GeoError::DifferenceOutOfRange(signed.to_string()));
    }
    Ok(signed.to_i64().expect("bounded by u64 range"))
}
