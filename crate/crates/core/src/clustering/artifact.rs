//! Binary model files.
//!
//! Layout: `EMTC`, a u32 version, a u64 header length, a JSON header holding
//! only integers and names, then little-endian arrays in a fixed order
//! (centroids, trace, gmm weights/covariances, assignments). Floats never pass
//! through text, so a write/read round trip is bit-exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Assignments, ClusterKind, ClusterModel, GmmParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAGIC: &[u8; 4] = b"EMTC";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    kind: ClusterKind,
    k: usize,
    dim: usize,
    n: usize,
    seed: u64,
    iterations_run: usize,
    trace_len: usize,
    medoids: Option<Vec<usize>>,
    gmm: bool,
    soft: bool,
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<model stream>", e)
}

fn put_f64s(w: &mut impl Write, xs: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(xs.len() * 8);
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

fn get_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf).map_err(io_err)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn write_model(model: &ClusterModel, w: &mut impl Write) -> Result<()> {
    let (n, soft) = match &model.assignments {
        Assignments::Hard(l) => (l.len(), false),
        Assignments::Soft(r) => (r.rows(), true),
    };
    let header = Header {
        kind: model.kind,
        k: model.k,
        dim: model.dim(),
        n,
        seed: model.seed,
        iterations_run: model.iterations_run,
        trace_len: model.trace.len(),
        medoids: model.medoids.clone(),
        gmm: model.gmm.is_some(),
        soft,
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(json.len() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&json).map_err(io_err)?;
    put_f64s(w, model.centroids.as_slice())?;
    put_f64s(w, &model.trace)?;
    if let Some(g) = &model.gmm {
        put_f64s(w, &[g.reg])?;
        put_f64s(w, &g.mixture_weights)?;
        put_f64s(w, g.means.as_slice())?;
        for c in &g.covariances {
            put_f64s(w, c.as_slice())?;
        }
    }
    match &model.assignments {
        Assignments::Hard(l) => {
            let buf: Vec<u8> = l.iter().flat_map(|&x| (x as u64).to_le_bytes()).collect();
            w.write_all(&buf).map_err(io_err)?;
        }
        Assignments::Soft(r) => put_f64s(w, r.as_slice())?,
    }
    Ok(())
}

pub fn read_model(r: &mut impl Read) -> Result<ClusterModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::format("model header", "bad magic bytes"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word).map_err(io_err)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::format("model header", format!("unsupported version {version}")));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len).map_err(io_err)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 30 {
        return Err(Error::format("model header", "header length out of range"));
    }
    let mut json = vec![0u8; len];
    r.read_exact(&mut json).map_err(io_err)?;
    let h: Header = serde_json::from_slice(&json)?;

    let centroids = Matrix::from_vec(h.k, h.dim, get_f64s(r, h.k * h.dim)?);
    let trace = get_f64s(r, h.trace_len)?;
    let gmm = if h.gmm {
        let reg = get_f64s(r, 1)?[0];
        let mixture_weights = get_f64s(r, h.k)?;
        let means = Matrix::from_vec(h.k, h.dim, get_f64s(r, h.k * h.dim)?);
        let covariances = (0..h.k)
            .map(|_| Ok(Matrix::from_vec(h.dim, h.dim, get_f64s(r, h.dim * h.dim)?)))
            .collect::<Result<Vec<_>>>()?;
        Some(GmmParams {
            means,
            covariances,
            mixture_weights,
            reg,
        })
    } else {
        None
    };
    let assignments = if h.soft {
        Assignments::Soft(Matrix::from_vec(h.n, h.k, get_f64s(r, h.n * h.k)?))
    } else {
        let mut buf = vec![0u8; h.n * 8];
        r.read_exact(&mut buf).map_err(io_err)?;
        let labels: Vec<usize> = buf
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
            .collect();
        if labels.iter().any(|&l| l >= h.k) {
            return Err(Error::format("model assignments", "label out of range"));
        }
        Assignments::Hard(labels)
    };
    Ok(ClusterModel {
        kind: h.kind,
        k: h.k,
        centroids,
        medoids: h.medoids,
        gmm,
        assignments,
        trace,
        seed: h.seed,
        iterations_run: h.iterations_run,
    })
}
