use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use normwalk::bits::{BitOrigin, BitSource};
use normwalk::continuous::RationalPolytope;
use normwalk::io::{read_polytope, RationalPolytopeJson};
use normwalk::{Error, LatticePolytope};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{BitArgs, Cli};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Falsified = 1,
}

/// The size limit imposed by `NORMWALK_MAX_POINTS`, if any.
#[derive(Debug)]
pub struct CapHit {
    pub what: String,
    pub size: u128,
    pub cap: u128,
}

impl std::fmt::Display for CapHit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} needs {} points, NORMWALK_MAX_POINTS is {}", self.what, self.size, self.cap)
    }
}

impl std::error::Error for CapHit {}

/// Input errors are usage errors; caps map to 3.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CapHit>().is_some() {
        return 3;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. }) => 3,
        _ => 2,
    }
}

pub fn max_points() -> Result<Option<u128>> {
    match std::env::var("NORMWALK_MAX_POINTS") {
        Ok(v) => Ok(Some(
            v.trim()
                .parse()
                .map_err(|_| anyhow!("NORMWALK_MAX_POINTS must be a nonnegative integer, got {v:?}"))?,
        )),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Fails with exit status 3 when `size` exceeds `NORMWALK_MAX_POINTS`.
pub fn guard(what: impl Into<String>, size: u128) -> Result<()> {
    if let Some(cap) = max_points()? {
        if size > cap {
            return Err(CapHit {
                what: what.into(),
                size,
                cap,
            }
            .into());
        }
    }
    Ok(())
}

pub fn read_lattice(path: &Path) -> Result<LatticePolytope> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_polytope(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_rational(path: &Path) -> Result<RationalPolytope> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: RationalPolytopeJson = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(e.to_string()))
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(RationalPolytope::from_json(&j)?)
}

pub fn open_source(args: &BitArgs) -> Result<Option<BitSource>> {
    if let Some(path) = &args.bits {
        return Ok(Some(BitSource::from_file(path)?));
    }
    if let Some(n) = args.os_entropy {
        return Ok(Some(BitSource::os_entropy(n, args.dump.as_deref())?));
    }
    if let Some(url) = &args.fetch {
        return fetch(url, &args.cache).map(Some);
    }
    Ok(None)
}

#[cfg(feature = "fetch")]
fn fetch(url: &str, cache: &Path) -> Result<BitSource> {
    Ok(BitSource::fetch_http(url, cache)?)
}

#[cfg(not(feature = "fetch"))]
fn fetch(_url: &str, _cache: &Path) -> Result<BitSource> {
    bail!("this build has no HTTP support; rebuild with the `fetch` feature")
}

pub fn require_source(args: &BitArgs) -> Result<BitSource> {
    open_source(args)?.ok_or_else(|| Error::InvalidArgument("a bit source is required: --bits, --os-entropy or --fetch".into()).into())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Where the bits came from and a digest of all of them.
pub fn provenance(src: &BitSource) -> Value {
    let origin = match src.origin() {
        BitOrigin::File(p) => json!({"kind": "file", "path": p.display().to_string()}),
        BitOrigin::Bytes => json!({"kind": "bytes"}),
        BitOrigin::OsEntropy { dump } => json!({
            "kind": "os_entropy",
            "dump": dump.as_ref().map(|p| p.display().to_string()),
        }),
        BitOrigin::Http { url, cache } => json!({
            "kind": "http",
            "url": url,
            "cache": cache.display().to_string(),
        }),
    };
    json!({
        "origin": origin,
        "sha256": sha256_hex(src.bytes()),
        "bits_available": src.len_bits(),
        "start_cursor": src.cursor(),
    })
}

pub fn writer(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.output {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn json_line(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn require_json(cli: &Cli, what: &str) -> Result<()> {
    if cli.format != crate::Format::Json {
        bail!(Error::InvalidArgument(format!("{what} only supports --format json")));
    }
    Ok(())
}
