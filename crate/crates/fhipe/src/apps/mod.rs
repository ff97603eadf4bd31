//! End-to-end privacy-preserving applications built on the scheme:
//! encrypted linear classification of quantized sensor data, and
//! fingerprint-based indoor localization over encrypted RSSI vectors.

pub mod classify;
pub mod localize;
