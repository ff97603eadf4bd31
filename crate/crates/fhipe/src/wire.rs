//! Bit-exact file formats.
//!
//! Every key-material file starts with a fixed 20-byte header:
//!
//! | offset | bytes | field                                            |
//! |--------|-------|--------------------------------------------------|
//! | 0      | 4     | magic `"FHIP"`                                   |
//! | 4      | 1     | version (0x01)                                   |
//! | 5      | 1     | kind (0x01 msk, 0x02 key, 0x03 ctxt, 0x04 table) |
//! | 6      | 1     | curve id (0x01 = BLS12-381)                      |
//! | 7      | 1     | flags: bit0 compressed points, bit1 signed mode  |
//! | 8      | 4     | n, little-endian                                 |
//! | 12     | 8     | s, little-endian                                 |
//!
//! Payloads: the msk stores `B`, `B*` (row-major) and `det(B)` as 32-byte
//! little-endian scalars and re-verifies `B · (B*)^T = det(B) · I` on
//! load; function keys store `n+1` G1 points; ciphertexts store `n+1` G2
//! points (`4(n+1)` F_p elements uncompressed). Discrete-log tables use
//! their own `"FHDT"` layout (see [`crate::dlog`]); kind 0x04 is reserved
//! for them here.
//!
//! Points written compressed halve the payload; the header flag records
//! which encoding was used.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DualMatrixPair, MatrixZq};
use crate::pairing::{
    g1_generator, g2_generator, G1Point, G2Point, G1_COMPRESSED_BYTES, G1_UNCOMPRESSED_BYTES,
    G2_COMPRESSED_BYTES, G2_UNCOMPRESSED_BYTES,
};
use crate::scalar::{ZqScalar, SCALAR_BYTES};
use crate::scheme::{Ciphertext, CurveId, FunctionKey, MasterSecretKey, PublicParams};

pub const MAGIC: [u8; 4] = *b"FHIP";
pub const FORMAT_VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 20;

pub const FLAG_COMPRESSED: u8 = 0b0000_0001;
pub const FLAG_SIGNED: u8 = 0b0000_0010;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    MasterSecretKey = 0x01,
    FunctionKey = 0x02,
    Ciphertext = 0x03,
    /// Reserved; tables are serialized in their own "FHDT" format.
    DlogTable = 0x04,
}

impl FileKind {
    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(FileKind::MasterSecretKey),
            0x02 => Ok(FileKind::FunctionKey),
            0x03 => Ok(FileKind::Ciphertext),
            0x04 => Ok(FileKind::DlogTable),
            other => Err(Error::BadHeader(format!("unknown file kind {other:#04x}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FileHeader {
    pub kind: FileKind,
    pub curve: CurveId,
    pub compressed: bool,
    pub signed_mode: bool,
    pub n: u32,
    pub s: u64,
}

impl FileHeader {
    pub fn new(kind: FileKind, pp: &PublicParams, compressed: bool) -> Self {
        FileHeader {
            kind,
            curve: pp.curve,
            compressed,
            signed_mode: pp.signed_mode,
            n: pp.n,
            s: pp.s,
        }
    }

    pub fn public_params(&self) -> PublicParams {
        PublicParams {
            curve: self.curve,
            n: self.n,
            s: self.s,
            signed_mode: self.signed_mode,
        }
    }

    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = FORMAT_VERSION;
        out[5] = self.kind as u8;
        out[6] = self.curve.to_byte();
        out[7] = (self.compressed as u8) * FLAG_COMPRESSED | (self.signed_mode as u8) * FLAG_SIGNED;
        out[8..12].copy_from_slice(&self.n.to_le_bytes());
        out[12..20].copy_from_slice(&self.s.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::BadHeader("file shorter than header".into()));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::BadHeader("bad magic".into()));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::BadHeader(format!("unsupported version {}", bytes[4])));
        }
        let kind = FileKind::from_byte(bytes[5])?;
        let curve = CurveId::from_byte(bytes[6])?;
        let flags = bytes[7];
        if flags & !(FLAG_COMPRESSED | FLAG_SIGNED) != 0 {
            return Err(Error::BadHeader(format!("unknown flag bits {flags:#04x}")));
        }
        let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let s = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
        if n == 0 {
            return Err(Error::BadHeader("n must be >= 1".into()));
        }
        Ok(FileHeader {
            kind,
            curve,
            compressed: flags & FLAG_COMPRESSED != 0,
            signed_mode: flags & FLAG_SIGNED != 0,
            n,
            s,
        })
    }
}

fn expect_kind(header: &FileHeader, kind: FileKind) -> Result<()> {
    if header.kind != kind {
        return Err(Error::BadHeader(format!(
            "expected {kind:?} file, found {:?}",
            header.kind
        )));
    }
    Ok(())
}

/// Exact file size of a serialized ciphertext: header plus `(n+1)` G2
/// points.
pub fn ciphertext_file_bytes(n: u32, compressed: bool) -> usize {
    let point = if compressed { G2_COMPRESSED_BYTES } else { G2_UNCOMPRESSED_BYTES };
    HEADER_LEN + (n as usize + 1) * point
}

/// Exact file size of a serialized function key: header plus `(n+1)` G1
/// points.
pub fn function_key_file_bytes(n: u32, compressed: bool) -> usize {
    let point = if compressed { G1_COMPRESSED_BYTES } else { G1_UNCOMPRESSED_BYTES };
    HEADER_LEN + (n as usize + 1) * point
}

/// Exact file size of a serialized master secret key: header plus
/// `2n^2 + 1` scalars.
pub fn msk_file_bytes(n: u32) -> usize {
    HEADER_LEN + (2 * (n as usize) * (n as usize) + 1) * SCALAR_BYTES
}

pub fn write_msk(msk: &MasterSecretKey) -> Vec<u8> {
    let n = msk.pp.n;
    let header = FileHeader::new(FileKind::MasterSecretKey, &msk.pp, false);
    let mut out = Vec::with_capacity(msk_file_bytes(n));
    out.extend_from_slice(&header.encode());
    for m in [&msk.dual.b, &msk.dual.b_star] {
        for e in m.entries() {
            out.extend_from_slice(&e.to_le_bytes());
        }
    }
    out.extend_from_slice(&msk.dual.det_b.to_le_bytes());
    out
}

/// Parses and integrity-checks a master key file. A flipped scalar bit is
/// caught by re-verifying the dual identity.
pub fn read_msk(bytes: &[u8]) -> Result<MasterSecretKey> {
    let header = FileHeader::decode(bytes)?;
    expect_kind(&header, FileKind::MasterSecretKey)?;
    let n = header.n as usize;
    let expected = msk_file_bytes(header.n);
    if bytes.len() != expected {
        return Err(Error::MalformedLength { expected, got: bytes.len() });
    }
    let mut off = HEADER_LEN;
    let read_scalar = |off: &mut usize| -> Result<ZqScalar> {
        let s = ZqScalar::from_le_bytes(&bytes[*off..*off + SCALAR_BYTES])?;
        *off += SCALAR_BYTES;
        Ok(s)
    };
    let mut b_entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        b_entries.push(read_scalar(&mut off)?);
    }
    let mut bs_entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        bs_entries.push(read_scalar(&mut off)?);
    }
    let det = read_scalar(&mut off)?;
    let dual = DualMatrixPair {
        b: MatrixZq::new(n, b_entries)?,
        b_star: MatrixZq::new(n, bs_entries)?,
        det_b: det,
    };
    dual.verify()?;
    Ok(MasterSecretKey {
        pp: header.public_params(),
        dual,
        g1: g1_generator(),
        g2: g2_generator(),
    })
}

pub fn write_function_key(key: &FunctionKey, pp: &PublicParams, compressed: bool) -> Vec<u8> {
    let header = FileHeader::new(FileKind::FunctionKey, pp, compressed);
    let mut out = Vec::with_capacity(function_key_file_bytes(pp.n, compressed));
    out.extend_from_slice(&header.encode());
    out.extend_from_slice(&key.k1.serialize(compressed));
    for p in &key.k2 {
        out.extend_from_slice(&p.serialize(compressed));
    }
    out
}

pub fn read_function_key(bytes: &[u8]) -> Result<(PublicParams, FunctionKey)> {
    let header = FileHeader::decode(bytes)?;
    expect_kind(&header, FileKind::FunctionKey)?;
    let expected = function_key_file_bytes(header.n, header.compressed);
    if bytes.len() != expected {
        return Err(Error::MalformedLength { expected, got: bytes.len() });
    }
    let point = if header.compressed { G1_COMPRESSED_BYTES } else { G1_UNCOMPRESSED_BYTES };
    let mut points = bytes[HEADER_LEN..]
        .chunks_exact(point)
        .map(G1Point::deserialize)
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let k1 = points.next().expect("length checked");
    if k1.is_identity() {
        return Err(Error::IntegrityCheckFailed("function key anchor k1 is the identity".into()));
    }
    Ok((header.public_params(), FunctionKey { k1, k2: points.collect() }))
}

pub fn write_ciphertext(ct: &Ciphertext, pp: &PublicParams, compressed: bool) -> Vec<u8> {
    let header = FileHeader::new(FileKind::Ciphertext, pp, compressed);
    let mut out = Vec::with_capacity(ciphertext_file_bytes(pp.n, compressed));
    out.extend_from_slice(&header.encode());
    out.extend_from_slice(&ct.c1.serialize(compressed));
    for p in &ct.c2 {
        out.extend_from_slice(&p.serialize(compressed));
    }
    out
}

/// Parses a ciphertext file; every point is subgroup-checked during
/// deserialization.
pub fn read_ciphertext(bytes: &[u8]) -> Result<(PublicParams, Ciphertext)> {
    let header = FileHeader::decode(bytes)?;
    expect_kind(&header, FileKind::Ciphertext)?;
    let expected = ciphertext_file_bytes(header.n, header.compressed);
    if bytes.len() != expected {
        return Err(Error::MalformedLength { expected, got: bytes.len() });
    }
    let point = if header.compressed { G2_COMPRESSED_BYTES } else { G2_UNCOMPRESSED_BYTES };
    let mut points = bytes[HEADER_LEN..]
        .chunks_exact(point)
        .map(G2Point::deserialize)
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let c1 = points.next().expect("length checked");
    if c1.is_identity() {
        return Err(Error::IntegrityCheckFailed("ciphertext anchor c1 is the identity".into()));
    }
    Ok((header.public_params(), Ciphertext { c1, c2: points.collect() }))
}

/// Parses a plaintext vector: one decimal integer per line; blank lines
/// ignored; errors carry 1-based line numbers.
pub fn read_vector_csv(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line.parse().map_err(|e| Error::Csv {
            line: idx + 1,
            msg: format!("bad integer {line:?}: {e}"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Csv { line: 1, msg: "vector file is empty".into() });
    }
    Ok(out)
}

pub fn read_vector_csv_path(path: &Path) -> Result<Vec<i64>> {
    read_vector_csv(&std::fs::read_to_string(path)?)
}

/// One measured benchmark data point.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub op: String,
    pub n: u32,
    pub alpha: u64,
    pub strategy: String,
    pub median_ns: u64,
    pub p10_ns: u64,
    pub p90_ns: u64,
    pub peak_mem_bytes: u64,
    pub iterations: u32,
    pub mem_method: String,
}

pub const BENCH_CSV_HEADER: &str =
    "op,n,alpha,strategy,median_ns,p10_ns,p90_ns,peak_mem_bytes,iterations,mem_method";

/// Renders records in the fixed column order. Reported records must carry
/// at least 30 iterations and a median inside [p10, p90].
pub fn write_bench_csv(records: &[BenchRecord]) -> Result<String> {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in records {
        if r.iterations < 30 {
            return Err(Error::InvalidParameter(format!(
                "bench record {:?} has {} iterations; at least 30 required",
                r.op, r.iterations
            )));
        }
        if !(r.p10_ns <= r.median_ns && r.median_ns <= r.p90_ns) {
            return Err(Error::InvalidParameter(format!(
                "bench record {:?} has median outside [p10, p90]",
                r.op
            )));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.op,
            r.n,
            r.alpha,
            r.strategy,
            r.median_ns,
            r.p10_ns,
            r.p90_ns,
            r.peak_mem_bytes,
            r.iterations,
            r.mem_method
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{encrypt, keygen, setup, PlainVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn fixture(n: u32, seed: u64) -> (PublicParams, MasterSecretKey, FunctionKey, Ciphertext) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (pp, msk) = setup(n, 4096, false, &mut rng).unwrap();
        let x = PlainVector::from_values((0..n as i64).map(|i| i % 7).collect());
        let y = PlainVector::from_values((0..n as i64).map(|i| (i + 1) % 5).collect());
        let sk = keygen(&msk, &x, &mut rng).unwrap();
        let ct = encrypt(&msk, &y, &mut rng).unwrap();
        (pp, msk, sk, ct)
    }

    #[test]
    fn header_round_trip() {
        let pp = PublicParams {
            curve: CurveId::Bls12_381,
            n: 100,
            s: 1 << 20,
            signed_mode: true,
        };
        let h = FileHeader::new(FileKind::Ciphertext, &pp, true);
        let enc = h.encode();
        assert_eq!(enc.len(), HEADER_LEN);
        assert_eq!(&enc[0..4], b"FHIP");
        let dec = FileHeader::decode(&enc).unwrap();
        assert_eq!(dec, h);
        assert_eq!(dec.public_params(), pp);

        let mut bad = enc;
        bad[0] = b'X';
        assert!(matches!(FileHeader::decode(&bad), Err(Error::BadHeader(_))));
    }

    #[test]
    fn ciphertext_payload_sizes_match_the_affine_formula() {
        // n = 100 uncompressed: 101 * 192 = 19392 payload bytes
        assert_eq!(ciphertext_file_bytes(100, false) - HEADER_LEN, 19392);
        assert_eq!(ciphertext_file_bytes(100, true) - HEADER_LEN, 9696);
        assert_eq!(ciphertext_file_bytes(1, false) - HEADER_LEN, 384);
        assert_eq!(function_key_file_bytes(100, false) - HEADER_LEN, 9696);
        // msk n=4: 2*16*32 + 32 = 1056 payload bytes
        assert_eq!(msk_file_bytes(4) - HEADER_LEN, 1056);

        let (pp, _, sk, ct) = fixture(3, 50);
        assert_eq!(write_ciphertext(&ct, &pp, false).len(), ciphertext_file_bytes(3, false));
        assert_eq!(write_ciphertext(&ct, &pp, true).len(), ciphertext_file_bytes(3, true));
        assert_eq!(write_function_key(&sk, &pp, false).len(), function_key_file_bytes(3, false));
    }

    #[test]
    fn msk_round_trip_and_tamper_detection() {
        let (_, msk, _, _) = fixture(4, 51);
        let bytes = write_msk(&msk);
        assert_eq!(bytes.len(), msk_file_bytes(4));
        let loaded = read_msk(&bytes).unwrap();
        assert_eq!(write_msk(&loaded), bytes);
        assert_eq!(loaded.pp, msk.pp);

        // flip a low-order bit of one matrix entry: stays canonical but
        // breaks the dual identity
        let mut tampered = bytes.clone();
        tampered[HEADER_LEN] ^= 0x01;
        assert!(matches!(
            read_msk(&tampered),
            Err(Error::IntegrityCheckFailed(_)) | Err(Error::NonCanonicalScalar)
        ));

        assert!(read_msk(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn key_and_ciphertext_round_trips() {
        let (pp, _, sk, ct) = fixture(5, 52);
        for compressed in [false, true] {
            let kb = write_function_key(&sk, &pp, compressed);
            let (pp2, sk2) = read_function_key(&kb).unwrap();
            assert_eq!(pp2, pp);
            assert_eq!(sk2, sk);
            assert_eq!(write_function_key(&sk2, &pp2, compressed), kb);

            let cb = write_ciphertext(&ct, &pp, compressed);
            let (pp3, ct2) = read_ciphertext(&cb).unwrap();
            assert_eq!(pp3, pp);
            assert_eq!(ct2, ct);
            assert_eq!(write_ciphertext(&ct2, &pp3, compressed), cb);
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let (pp, msk, sk, _) = fixture(2, 53);
        let kb = write_function_key(&sk, &pp, true);
        assert!(matches!(read_ciphertext(&kb), Err(Error::BadHeader(_))));
        let mb = write_msk(&msk);
        assert!(matches!(read_function_key(&mb), Err(Error::BadHeader(_))));
    }

    #[test]
    fn corrupted_point_is_rejected() {
        let (pp, _, _, ct) = fixture(2, 54);
        let mut cb = write_ciphertext(&ct, &pp, false);
        // zero out the first point entirely: (0,0) is not on the twist
        for b in &mut cb[HEADER_LEN..HEADER_LEN + 192] {
            *b = 0;
        }
        assert!(matches!(read_ciphertext(&cb), Err(Error::NotOnCurve)));
    }

    #[test]
    fn vector_csv_parsing() {
        assert_eq!(read_vector_csv("4\n5\n6\n").unwrap(), vec![4, 5, 6]);
        assert_eq!(read_vector_csv("-70\n-55\n").unwrap(), vec![-70, -55]);
        assert_eq!(read_vector_csv("1\n\n2\n").unwrap(), vec![1, 2]);
        match read_vector_csv("abc\n") {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected csv error, got {other:?}"),
        }
        match read_vector_csv("1\nxyz\n") {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected csv error, got {other:?}"),
        }
        assert!(read_vector_csv("").is_err());
    }

    #[test]
    fn bench_csv_format() {
        let rec = BenchRecord {
            op: "encrypt".into(),
            n: 25,
            alpha: 0,
            strategy: "-".into(),
            median_ns: 1000,
            p10_ns: 900,
            p90_ns: 1100,
            peak_mem_bytes: 4096,
            iterations: 30,
            mem_method: "alloc-peak".into(),
        };
        let csv = write_bench_csv(std::slice::from_ref(&rec)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), BENCH_CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "encrypt,25,0,-,1000,900,1100,4096,30,alloc-peak");

        let mut few = rec.clone();
        few.iterations = 10;
        assert!(write_bench_csv(&[few]).is_err());
        let mut skewed = rec;
        skewed.median_ns = 2000;
        assert!(write_bench_csv(&[skewed]).is_err());
    }
}
