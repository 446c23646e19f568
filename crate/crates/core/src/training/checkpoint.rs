//! Self-describing checkpoint container.
//!
//! Layout: an 8-byte magic, a little-endian u64 header length, a JSON header
//! (config echo, scaler, counters, RNG position, array names and shapes),
//! the concatenated parameter values as little-endian f64, and a SHA-256
//! digest of everything before it. Loading verifies the digest before any
//! state is reconstructed, so a truncated or corrupted file never yields
//! partial state.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::ScalerParams;
use crate::error::{Error, Result};
use crate::nets::NetworkBundle;
use crate::numkit::{Rng, Tensor};
use crate::training::config::TrainConfig;

const MAGIC: &[u8; 8] = b"SFCKPT01";

#[derive(Serialize, Deserialize)]
struct ArrayMeta {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: TrainConfig,
    scaler: ScalerParams,
    phase: u8,
    epoch: usize,
    feature_dim: usize,
    rng_seed: u64,
    rng_word_pos_lo: u64,
    rng_word_pos_hi: u64,
    arrays: Vec<ArrayMeta>,
}

/// A complete training state snapshot: every network parameter as a named
/// array, plus the config echo, scaler, counters, and RNG position.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub config: TrainConfig,
    pub scaler: ScalerParams,
    pub phase: u8,
    pub epoch: usize,
    pub feature_dim: usize,
    pub rng_seed: u64,
    pub rng_word_pos: u128,
    pub arrays: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let header = Header {
            config: self.config.clone(),
            scaler: self.scaler.clone(),
            phase: self.phase,
            epoch: self.epoch,
            feature_dim: self.feature_dim,
            rng_seed: self.rng_seed,
            rng_word_pos_lo: self.rng_word_pos as u64,
            rng_word_pos_hi: (self.rng_word_pos >> 64) as u64,
            arrays: self
                .arrays
                .iter()
                .map(|(name, t)| ArrayMeta {
                    name: name.clone(),
                    shape: t.shape().to_vec(),
                })
                .collect(),
        };
        let header_bytes = serde_json::to_vec(&header)?;

        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(header_bytes.len() as u64).to_le_bytes());
        buf.extend_from_slice(&header_bytes);
        for (_, t) in &self.arrays {
            for v in t.data() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&buf);
        buf.extend_from_slice(&digest);

        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < MAGIC.len() + 8 + 32 {
            return Err(Error::Corrupt("checkpoint file is truncated".into()));
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::Corrupt("bad checkpoint magic".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        let expected = Sha256::digest(body);
        if digest != expected.as_slice() {
            return Err(Error::Corrupt("checkpoint digest mismatch".into()));
        }

        let header_len =
            u64::from_le_bytes(body[8..16].try_into().expect("length prefix")) as usize;
        if body.len() < 16 + header_len {
            return Err(Error::Corrupt("checkpoint header is truncated".into()));
        }
        let header: Header = serde_json::from_slice(&body[16..16 + header_len])
            .map_err(|e| Error::Corrupt(format!("unreadable checkpoint header: {e}")))?;

        let mut offset = 16 + header_len;
        let mut arrays = Vec::with_capacity(header.arrays.len());
        for meta in &header.arrays {
            let len: usize = meta.shape.iter().product();
            let end = offset + len * 8;
            if body.len() < end {
                return Err(Error::Corrupt(format!(
                    "checkpoint payload is truncated in array {}",
                    meta.name
                )));
            }
            let data: Vec<f64> = body[offset..end]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunked by 8")))
                .collect();
            arrays.push((meta.name.clone(), Tensor::new(meta.shape.clone(), data)?));
            offset = end;
        }
        if offset != body.len() {
            return Err(Error::Corrupt(
                "checkpoint payload has trailing bytes".into(),
            ));
        }

        Ok(Self {
            config: header.config,
            scaler: header.scaler,
            phase: header.phase,
            epoch: header.epoch,
            feature_dim: header.feature_dim,
            rng_seed: header.rng_seed,
            rng_word_pos: (header.rng_word_pos_hi as u128) << 64
                | header.rng_word_pos_lo as u128,
            arrays,
        })
    }

    /// Rebuilds the network bundle from the named arrays.
    pub fn restore_bundle(&self) -> Result<NetworkBundle> {
        let dims = self.config.dims_for(self.feature_dim);
        let mut scratch = Rng::from_seed(0);
        let mut bundle = NetworkBundle::init(&dims, &mut scratch)?;

        let mut by_name: std::collections::HashMap<&str, &Tensor> = self
            .arrays
            .iter()
            .map(|(n, t)| (n.as_str(), t))
            .collect();
        for role in NetworkBundle::roles() {
            let names = bundle.net(role).param_names();
            let net = bundle.net_mut(role);
            for (name, param) in names.iter().zip(net.params_mut()) {
                let stored = by_name.remove(name.as_str()).ok_or_else(|| {
                    Error::Corrupt(format!("checkpoint is missing array {name}"))
                })?;
                if stored.shape() != param.shape() {
                    return Err(Error::Corrupt(format!(
                        "checkpoint array {name} has shape {:?}, expected {:?}",
                        stored.shape(),
                        param.shape()
                    )));
                }
                *param = stored.clone();
            }
        }
        if !by_name.is_empty() {
            let mut extra: Vec<&str> = by_name.into_keys().collect();
            extra.sort_unstable();
            return Err(Error::Corrupt(format!(
                "checkpoint has unexpected arrays: {extra:?}"
            )));
        }
        Ok(bundle)
    }
}
