//! Roadmap files.
//!
//! Layout: one header line of JSON, `\n`, then the JSON body. The header
//! carries the format tag, `format_version`, the body byte length, and the
//! SHA-256 of the body bytes. See `docs/roadmap-format.md`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Edge, Roadmap, RoadmapParams};
use crate::error::{Error, Result};
use crate::kinematics::Config;

pub const ROADMAP_FORMAT_VERSION: i64 = 1;
const FORMAT_TAG: &str = "privplan-roadmap";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    format_version: i64,
    body_len: usize,
    body_sha256: String,
}

#[derive(Serialize, Deserialize)]
struct ParamsBody {
    samples: usize,
    connection_radius: f64,
    resolution: f64,
    privacy_resolution: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct Body {
    params: ParamsBody,
    dof: usize,
    nodes: Vec<Vec<f64>>,
    /// `[i, j, base_length, violating_length]`
    edges: Vec<(usize, usize, f64, f64)>,
}

pub fn write_roadmap<W: Write>(roadmap: &Roadmap, mut out: W) -> std::io::Result<()> {
    let p = roadmap.params();
    let body = Body {
        params: ParamsBody {
            samples: p.samples,
            connection_radius: p.connection_radius,
            resolution: p.resolution,
            privacy_resolution: p.privacy_resolution,
            seed: p.seed,
        },
        dof: roadmap.dof(),
        nodes: roadmap.nodes().iter().map(|q| q.0.clone()).collect(),
        edges: roadmap
            .edges()
            .iter()
            .map(|e| (e.i, e.j, e.base_length, e.violating_length))
            .collect(),
    };
    let body = serde_json::to_vec(&body).expect("roadmap body serializes");
    let header = Header {
        format: FORMAT_TAG.into(),
        format_version: ROADMAP_FORMAT_VERSION,
        body_len: body.len(),
        body_sha256: hex::encode(Sha256::digest(&body)),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    out.write_all(&body)?;
    out.flush()
}

pub fn read_roadmap<R: Read>(mut input: R, origin: &Path) -> Result<Roadmap> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| Error::io(origin, e))?;
    // A missing header terminator means the file was cut inside the header.
    let split = bytes.iter().position(|&b| b == b'\n').ok_or(Error::Checksum)?;
    let (head, body) = (&bytes[..split], &bytes[split + 1..]);
    let header: Header = serde_json::from_slice(head).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("roadmap header: {e}"),
    })?;
    if header.format != FORMAT_TAG {
        return Err(Error::validation(
            "format",
            format!("expected \"{FORMAT_TAG}\", got \"{}\"", header.format),
        ));
    }
    if header.format_version != ROADMAP_FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: header.format_version,
            supported: ROADMAP_FORMAT_VERSION,
        });
    }
    if body.len() != header.body_len || hex::encode(Sha256::digest(body)) != header.body_sha256 {
        return Err(Error::Checksum);
    }
    let body: Body = serde_json::from_slice(body).map_err(|e| Error::Parse {
        line: e.line() + 1,
        column: e.column(),
        message: format!("roadmap body: {e}"),
    })?;
    let params = RoadmapParams {
        samples: body.params.samples,
        connection_radius: body.params.connection_radius,
        resolution: body.params.resolution,
        privacy_resolution: body.params.privacy_resolution,
        seed: body.params.seed,
    };
    let nodes = body.nodes.into_iter().map(Config).collect();
    let edges = body
        .edges
        .into_iter()
        .map(|(i, j, base, violating)| Edge::new(i, j, base, violating))
        .collect();
    Roadmap::from_parts(params, body.dof, nodes, edges)
}

pub fn save_roadmap(roadmap: &Roadmap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_roadmap(roadmap, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_roadmap(path: impl AsRef<Path>) -> Result<Roadmap> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_roadmap(std::io::BufReader::new(file), path)
}
