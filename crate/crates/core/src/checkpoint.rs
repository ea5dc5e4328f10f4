//! Binary checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        8 bytes  "MDSACKPT"
//! version      u32      (currently 1)
//! algo         u8       0 = dsac, 1 = minimax-dsac
//! env_steps    u64
//! log_alpha    f64
//! sigma_min    f64
//! net_count    u32
//! per net:
//!   name_len   u16, name bytes (utf-8)
//!   input      u32
//!   hidden_n   u32, hidden widths u32 * hidden_n
//!   output     u32
//!   activation u8       0 = gelu, 1 = identity
//!   scale_n    u32, action scale f64 * scale_n   (0 for critics)
//!   param_n    u64, parameters f64 * param_n
//! ```

use std::path::Path;

use crate::config::Algo;
use crate::critic::Critic;
use crate::error::{Error, Result};
use crate::nn::{Activation, Architecture, NetParams};
use crate::policy::Policy;

const MAGIC: &[u8; 8] = b"MDSACKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedNet {
    pub name: String,
    pub params: NetParams,
    pub scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub algo: Algo,
    pub env_steps: u64,
    pub log_alpha: f64,
    pub sigma_min: f64,
    pub nets: Vec<NamedNet>,
}

impl Checkpoint {
    pub fn net(&self, name: &str) -> Option<&NamedNet> {
        self.nets.iter().find(|n| n.name == name)
    }

    fn require(&self, name: &str) -> Result<&NamedNet> {
        self.net(name)
            .ok_or_else(|| Error::Checkpoint(format!("missing network `{name}`")))
    }

    pub fn protagonist(&self) -> Result<Policy> {
        let n = self.require("protagonist")?;
        Policy::new(n.params.clone(), n.scale.clone())
    }

    pub fn critic(&self) -> Result<Critic> {
        Critic::new(self.require("critic")?.params.clone(), self.sigma_min)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(match self.algo {
            Algo::Dsac => 0,
            Algo::MinimaxDsac => 1,
        });
        out.extend_from_slice(&self.env_steps.to_le_bytes());
        out.extend_from_slice(&self.log_alpha.to_le_bytes());
        out.extend_from_slice(&self.sigma_min.to_le_bytes());
        out.extend_from_slice(&(self.nets.len() as u32).to_le_bytes());
        for net in &self.nets {
            let arch = net.params.arch();
            out.extend_from_slice(&(net.name.len() as u16).to_le_bytes());
            out.extend_from_slice(net.name.as_bytes());
            out.extend_from_slice(&(arch.input as u32).to_le_bytes());
            out.extend_from_slice(&(arch.hidden.len() as u32).to_le_bytes());
            for &h in &arch.hidden {
                out.extend_from_slice(&(h as u32).to_le_bytes());
            }
            out.extend_from_slice(&(arch.output as u32).to_le_bytes());
            out.push(match arch.activation {
                Activation::Gelu => 0,
                Activation::Identity => 1,
            });
            out.extend_from_slice(&(net.scale.len() as u32).to_le_bytes());
            for s in &net.scale {
                out.extend_from_slice(&s.to_le_bytes());
            }
            out.extend_from_slice(&(net.params.len() as u64).to_le_bytes());
            for v in net.params.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let algo = match r.u8()? {
            0 => Algo::Dsac,
            1 => Algo::MinimaxDsac,
            other => return Err(Error::Checkpoint(format!("unknown algo tag {other}"))),
        };
        let env_steps = r.u64()?;
        let log_alpha = r.f64()?;
        let sigma_min = r.f64()?;
        let count = r.u32()?;
        let mut nets = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let name_len = r.u16()? as usize;
            let name = String::from_utf8(r.take(name_len)?.to_vec())
                .map_err(|_| Error::Checkpoint("network name is not utf-8".into()))?;
            let input = r.u32()? as usize;
            let hidden_n = r.u32()? as usize;
            let hidden = (0..hidden_n).map(|_| r.u32().map(|h| h as usize)).collect::<Result<Vec<_>>>()?;
            let output = r.u32()? as usize;
            let activation = match r.u8()? {
                0 => Activation::Gelu,
                1 => Activation::Identity,
                other => return Err(Error::Checkpoint(format!("unknown activation tag {other}"))),
            };
            let scale_n = r.u32()? as usize;
            let scale = (0..scale_n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            let param_n = r.u64()? as usize;
            let arch = Architecture::new(input, hidden, output, activation);
            if arch.param_count() != param_n {
                return Err(Error::Checkpoint(format!(
                    "network `{name}` stores {param_n} parameters, architecture needs {}",
                    arch.param_count()
                )));
            }
            let values = (0..param_n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
            nets.push(NamedNet {
                name,
                params: NetParams::from_vec(arch, values)?,
                scale,
            });
        }
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Self {
            algo,
            env_steps,
            log_alpha,
            sigma_min,
            nets,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Checkpoint("truncated".into())),
        }
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample() -> Checkpoint {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let critic = NetParams::init_uniform(Architecture::new(9, vec![4, 3], 2, Activation::Gelu), &mut rng);
        let actor = NetParams::init_uniform(Architecture::new(6, vec![5], 2, Activation::Gelu), &mut rng);
        Checkpoint {
            algo: Algo::MinimaxDsac,
            env_steps: 1234,
            log_alpha: -4.6,
            sigma_min: 1e-3,
            nets: vec![
                NamedNet {
                    name: "critic".into(),
                    params: critic,
                    scale: vec![],
                },
                NamedNet {
                    name: "protagonist".into(),
                    params: actor,
                    scale: vec![3.0],
                },
            ],
        }
    }

    #[test]
    fn byte_exact_round_trip() {
        let ck = sample();
        let bytes = ck.to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(&bytes[..8], b"MDSACKPT");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), VERSION);
    }

    #[test]
    fn truncation_and_corruption_are_detected() {
        let bytes = sample().to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
    }

    #[test]
    fn typed_accessors() {
        let ck = sample();
        assert_eq!(ck.protagonist().unwrap().action_dim(), 1);
        assert_eq!(ck.critic().unwrap().sigma_min, 1e-3);
        assert!(ck.net("adversary").is_none());
    }
}
