//! The `EVS1` share file.
//!
//! ```text
//! "EVS1" | version 0x01 | ell (1 byte) | layout | t (varint) | generation (varint)
//! then P1..P5, each: tag 0x01..0x05 | payload length (varint) | payload
//! ```
//!
//! The layout is `0x00` for the paper layout, or `0x01`, a varint count and
//! that many varint sizes for a toy layout. Varints are unsigned LEB128 in
//! their shortest form. Payloads:
//!
//! * P1: width byte, generation (varint), value in `⌈w/8⌉` bytes;
//! * P2, P4: `g − 1` base-field elements of `⌈ℓ/8⌉` bytes each;
//! * P3: curve index (varint), then the ℓm-bit value in `⌈ℓm/8⌉` bytes;
//! * P5: one base-field element.
//!
//! Multi-byte values are little-endian. Field elements are flat coefficient
//! strings, coefficient `k` of `y^k` occupying bits `kℓ..(k+1)ℓ`. Unused high
//! bits must be zero. Only bundles of the revised scheme with the default
//! inter-generation scheme are representable.

use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::evolving::{PolyInfShare, ShareBundle};
use crate::generations::GenerationLayout;
use crate::gf_base::{BaseElem, MAX_ELL};
use crate::gf_ext::ExtField;
use crate::static3::CurveShare;

pub const MAGIC: &[u8; 4] = b"EVS1";
pub const VERSION: u8 = 0x01;

const LAYOUT_PAPER: u8 = 0x00;
const LAYOUT_TOY: u8 = 0x01;

/// A parsed share file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareFile {
    pub bundle: ShareBundle,
}

impl ShareFile {
    pub fn new(bundle: ShareBundle) -> Self {
        ShareFile { bundle }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        encode_bundle(&self.bundle)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        decode_bundle(bytes).map(ShareFile::new)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn encode_varint(x: &BigUint, out: &mut Vec<u8>) {
    if x.is_zero() {
        out.push(0);
        return;
    }
    let bytes = x.to_radix_le(128);
    let last = bytes.len() - 1;
    for (k, b) in bytes.into_iter().enumerate() {
        out.push(if k == last { b } else { b | 0x80 });
    }
}

fn encode_varint_u64(x: u64, out: &mut Vec<u8>) {
    encode_varint(&BigUint::from(x), out)
}

fn byte_len(bits: u64) -> usize {
    bits.div_ceil(8) as usize
}

fn push_le(value: u64, bytes: usize, out: &mut Vec<u8>) {
    out.extend_from_slice(&value.to_le_bytes()[..bytes]);
}

pub fn encode_bundle(b: &ShareBundle) -> Result<Vec<u8>> {
    b.validate()?;
    let ell = b.ell;
    let mut out = Vec::with_capacity(64);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(ell as u8);
    match &b.layout {
        GenerationLayout::Paper => out.push(LAYOUT_PAPER),
        GenerationLayout::Toy(sizes) => {
            out.push(LAYOUT_TOY);
            encode_varint_u64(sizes.len() as u64, &mut out);
            for &s in sizes {
                encode_varint_u64(s, &mut out);
            }
        }
    }
    encode_varint(b.t(), &mut out);
    encode_varint_u64(u64::from(b.generation()), &mut out);

    let elem_bytes = byte_len(u64::from(ell));
    let piece = |tag: u8, payload: Vec<u8>, out: &mut Vec<u8>| {
        out.push(tag);
        encode_varint_u64(payload.len() as u64, out);
        out.extend_from_slice(&payload);
    };

    let mut p1 = vec![b.p1.width() as u8];
    encode_varint_u64(u64::from(b.p1.generation), &mut p1);
    push_le(u64::from(b.p1.value.bits()), byte_len(u64::from(b.p1.width())), &mut p1);
    piece(0x01, p1, &mut out);

    let list = |xs: &[BaseElem]| {
        let mut v = Vec::with_capacity(xs.len() * elem_bytes);
        for x in xs {
            push_le(u64::from(x.bits()), elem_bytes, &mut v);
        }
        v
    };
    piece(0x02, list(&b.p2), &mut out);

    let mut p3 = Vec::new();
    encode_varint(&b.p3.curve_index, &mut p3);
    let value_bits = u64::from(ell) * b.p3.value.m() as u64;
    let mut flat = b.p3.value.to_index().to_bytes_le();
    flat.resize(byte_len(value_bits), 0);
    p3.extend_from_slice(&flat);
    piece(0x03, p3, &mut out);

    piece(0x04, list(&b.p4), &mut out);
    piece(0x05, list(&[b.p5]), &mut out);
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::parse(format!("truncated while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn varint(&mut self, what: &str) -> Result<BigUint> {
        let mut digits = Vec::new();
        loop {
            let b = self.byte(what)?;
            digits.push(b & 0x7f);
            if b & 0x80 == 0 {
                break;
            }
            if digits.len() > 1 << 16 {
                return Err(Error::parse(format!("{what}: varint too long")));
            }
        }
        if digits.len() > 1 && digits.last() == Some(&0) {
            return Err(Error::parse(format!("{what}: varint is not in shortest form")));
        }
        Ok(BigUint::from_radix_le(&digits, 128).expect("digits are below 128"))
    }

    fn varint_u64(&mut self, what: &str) -> Result<u64> {
        u64::try_from(self.varint(what)?).map_err(|_| Error::parse(format!("{what} out of range")))
    }

    fn is_empty(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

fn read_le(bytes: &[u8], bits: u32, what: &str) -> Result<u64> {
    let mut buf = [0u8; 8];
    buf[..bytes.len()].copy_from_slice(bytes);
    let v = u64::from_le_bytes(buf);
    if bits < 64 && v >> bits != 0 {
        return Err(Error::parse(format!("{what}: padding bits are not zero")));
    }
    Ok(v)
}

fn read_piece<'a>(r: &mut Reader<'a>, tag: u8) -> Result<Reader<'a>> {
    let got = r.byte("piece tag")?;
    if got != tag {
        return Err(Error::parse(format!("expected piece tag {tag:#04x}, found {got:#04x}")));
    }
    let len = r.varint_u64("piece length")?;
    let len = usize::try_from(len).map_err(|_| Error::parse("piece length out of range"))?;
    Ok(Reader {
        bytes: r.take(len, "piece payload")?,
        pos: 0,
    })
}

fn read_list(r: Reader<'_>, ell: u32, expect: usize, what: &str) -> Result<Vec<BaseElem>> {
    let size = byte_len(u64::from(ell));
    let payload = &r.bytes[r.pos..];
    if payload.len() != size * expect {
        return Err(Error::parse(format!(
            "{what}: {} bytes, expected {expect} entries of {size} bytes",
            payload.len()
        )));
    }
    payload
        .chunks(size)
        .map(|c| {
            let v = read_le(c, ell, what)?;
            BaseElem::new(ell, v as u32)
        })
        .collect()
}

fn finish(r: &Reader<'_>, what: &str) -> Result<()> {
    if r.is_empty() {
        Ok(())
    } else {
        Err(Error::parse(format!("{what}: trailing bytes")))
    }
}

pub fn decode_bundle(bytes: &[u8]) -> Result<ShareBundle> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::parse("not an EVS1 share file"));
    }
    let version = r.byte("version")?;
    if version != VERSION {
        return Err(Error::parse(format!("unsupported version {version}")));
    }
    let ell = u32::from(r.byte("ell")?);
    if ell == 0 || ell > MAX_ELL {
        return Err(Error::parse(format!("ell {ell} out of range")));
    }
    let layout = match r.byte("layout tag")? {
        LAYOUT_PAPER => GenerationLayout::Paper,
        LAYOUT_TOY => {
            let count = r.varint_u64("toy layout length")?;
            if count == 0 || count > 1 << 20 {
                return Err(Error::parse("toy layout length out of range"));
            }
            let sizes = (0..count)
                .map(|_| r.varint_u64("toy layout size"))
                .collect::<Result<Vec<_>>>()?;
            GenerationLayout::toy(sizes).map_err(|e| Error::parse(e.to_string()))?
        }
        other => return Err(Error::parse(format!("unknown layout tag {other:#04x}"))),
    };
    let t = r.varint("t")?;
    let generation = r.varint_u64("generation")?;
    let locus = layout
        .index_in_gen(&t)
        .map_err(|e| Error::parse(format!("participant {t}: {e}")))?;
    if u64::from(locus.generation) != generation {
        return Err(Error::parse(format!(
            "participant {t} belongs to generation {}, file says {generation}",
            locus.generation
        )));
    }
    let g = locus.generation;
    let m = layout.inner_degree(g, ell).map_err(|e| Error::parse(e.to_string()))?;

    let mut p = read_piece(&mut r, 0x01)?;
    let width = u32::from(p.byte("P1 width")?);
    if width < ell || width > MAX_ELL {
        return Err(Error::parse(format!("P1 width {width} out of range")));
    }
    let p1_gen = p.varint_u64("P1 generation")?;
    if p1_gen != u64::from(g) {
        return Err(Error::parse("P1 belongs to a different generation"));
    }
    let v = read_le(p.take(byte_len(u64::from(width)), "P1 value")?, width, "P1 value")?;
    finish(&p, "P1")?;
    let p1 = PolyInfShare {
        generation: g,
        value: BaseElem::new(width, v as u32)?,
    };

    let p2 = read_list(read_piece(&mut r, 0x02)?, ell, g as usize - 1, "P2")?;

    let mut p = read_piece(&mut r, 0x03)?;
    let curve_index = p.varint("P3 curve index")?;
    let field = ExtField::new(ell, m)?;
    let value_bytes = p.take(byte_len(field.bit_len()), "P3 value")?;
    finish(&p, "P3")?;
    let flat = BigUint::from_bytes_le(value_bytes);
    if flat.bits() > field.bit_len() {
        return Err(Error::parse("P3 value: padding bits are not zero"));
    }
    let p3 = CurveShare {
        curve_index,
        value: field.index_to_point(&flat)?,
    };

    let p4 = read_list(read_piece(&mut r, 0x04)?, ell, g as usize - 1, "P4")?;
    let p5 = read_list(read_piece(&mut r, 0x05)?, ell, 1, "P5")?[0];
    if !r.is_empty() {
        if let Ok(tag) = r.byte("tag") {
            return Err(Error::parse(format!("unknown piece tag {tag:#04x} after P5")));
        }
    }

    let bundle = ShareBundle {
        locus,
        ell,
        layout,
        p1,
        p2,
        p3,
        p4,
        p5,
    };
    bundle.validate().map_err(|e| Error::parse(e.to_string()))?;
    Ok(bundle)
}
