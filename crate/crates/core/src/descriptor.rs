//! Text descriptors for channels and states, e.g. `unitary:theta=0.3` or `flagpole:d=3,p=0.6`.
//!
//! Channels: `unitary:theta=θ`, `identity:d=D`, `dephasing:d=D`, `pauli-z`,
//! `file:path=P` (channel JSON), `constant:path=P,din=D` (state JSON),
//! `cq:paths=P1;P2;…`. Several channels joined by `&` form a tensor product.
//!
//! States: `cosdit:d=D`, `basis:d=D,i=I`, `flagpole:d=D,p=P`,
//! `pure:probs=p0;p1;…`, `diag:probs=p0;p1;…`, `mixed:d=D`, `file:path=P`.

use std::fs;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PureState};
use crate::resources::FlagpoleSpec;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelDescriptor {
    Unitary { theta: f64 },
    Identity { d: usize },
    Dephasing { d: usize },
    PauliZ,
    File { path: String },
    Constant { path: String, din: usize },
    Cq { paths: Vec<String> },
    Tensor { parts: Vec<ChannelDescriptor> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateDescriptor {
    Cosdit { d: usize },
    Basis { d: usize, i: usize },
    Flagpole { d: usize, p: f64 },
    Pure { probs: Vec<f64> },
    Diag { probs: Vec<f64> },
    Mixed { d: usize },
    File { path: String },
}

/// `key=value` pairs with the offset of each value in the original text.
struct Fields<'a> {
    items: Vec<(&'a str, &'a str, usize)>,
    kind_end: usize,
    offset: usize,
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Descriptor { position, message: message.into() }
}

impl<'a> Fields<'a> {
    fn parse(text: &'a str, offset: usize) -> Result<(&'a str, Self)> {
        let (kind, rest, rest_at) = match text.find(':') {
            Some(i) => (&text[..i], &text[i + 1..], i + 1),
            None => (text, "", text.len()),
        };
        if kind.is_empty() {
            return Err(err(offset, "missing descriptor kind"));
        }
        let mut items = Vec::new();
        let mut at = rest_at;
        if !rest.is_empty() {
            for part in rest.split(',') {
                let Some(eq) = part.find('=') else {
                    return Err(err(offset + at, format!("expected key=value, found '{part}'")));
                };
                let (k, v) = (&part[..eq], &part[eq + 1..]);
                if k.is_empty() {
                    return Err(err(offset + at, "empty key"));
                }
                items.push((k, v, offset + at + eq + 1));
                at += part.len() + 1;
            }
        }
        Ok((kind, Self { items, kind_end: offset + kind.len(), offset }))
    }

    fn raw(&self, key: &str) -> Result<(&'a str, usize)> {
        self.items
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|&(_, v, at)| (v, at))
            .ok_or_else(|| err(self.kind_end, format!("missing parameter '{key}'")))
    }

    fn get<V: FromStr>(&self, key: &str) -> Result<V> {
        let (v, at) = self.raw(key)?;
        v.parse().map_err(|_| err(at, format!("cannot parse '{v}' for '{key}'")))
    }

    fn list<V: FromStr>(&self, key: &str) -> Result<Vec<V>> {
        let (v, at) = self.raw(key)?;
        let mut out = Vec::new();
        let mut pos = at;
        for item in v.split(';') {
            out.push(item.parse().map_err(|_| err(pos, format!("cannot parse '{item}' in '{key}'")))?);
            pos += item.len() + 1;
        }
        Ok(out)
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        for &(k, _, at) in &self.items {
            if !allowed.contains(&k) {
                return Err(err(at - k.len() - 1, format!("unknown parameter '{k}'")));
            }
        }
        Ok(())
    }

    fn unknown_kind(&self, kind: &str) -> Error {
        err(self.offset, format!("unknown descriptor kind '{kind}'"))
    }
}

fn positive(v: usize, at: usize, what: &str) -> Result<usize> {
    if v == 0 {
        return Err(err(at, format!("{what} must be positive")));
    }
    Ok(v)
}

impl ChannelDescriptor {
    fn parse_single(text: &str, offset: usize) -> Result<Self> {
        let (kind, f) = Fields::parse(text, offset)?;
        let d = match kind {
            "unitary" => {
                f.only(&["theta"])?;
                Self::Unitary { theta: f.get("theta")? }
            }
            "identity" | "dephasing" => {
                f.only(&["d"])?;
                let d = positive(f.get("d")?, f.kind_end, "d")?;
                if kind == "identity" { Self::Identity { d } } else { Self::Dephasing { d } }
            }
            "pauli-z" => {
                f.only(&[])?;
                Self::PauliZ
            }
            "file" => {
                f.only(&["path"])?;
                Self::File { path: f.get("path")? }
            }
            "constant" => {
                f.only(&["path", "din"])?;
                Self::Constant { path: f.get("path")?, din: positive(f.get("din")?, f.kind_end, "din")? }
            }
            "cq" => {
                f.only(&["paths"])?;
                Self::Cq { paths: f.list("paths")? }
            }
            other => return Err(f.unknown_kind(other)),
        };
        Ok(d)
    }

    pub fn build<T: Real>(&self) -> Result<Channel<T>> {
        Ok(match self {
            Self::Unitary { theta } => Channel::qubit_rotation(T::lit(*theta)),
            Self::Identity { d } => Channel::identity(*d),
            Self::Dephasing { d } => Channel::dephasing(*d),
            Self::PauliZ => Channel::pauli_z(),
            Self::File { path } => Channel::from_json(&fs::read_to_string(path)?)?,
            Self::Constant { path, din } => Channel::constant(*din, &read_state(path)?)?,
            Self::Cq { paths } => {
                let outs = paths.iter().map(|p| read_state(p)).collect::<Result<Vec<_>>>()?;
                Channel::cq(&outs)?
            }
            Self::Tensor { parts } => {
                let mut it = parts.iter();
                let first = it.next().ok_or_else(|| err(0, "empty tensor product"))?.build()?;
                it.try_fold(first, |acc, d| Ok::<_, Error>(acc.tensor(&d.build()?)))?
            }
        })
    }
}

impl FromStr for ChannelDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        let mut at = 0;
        for piece in s.split('&') {
            parts.push(Self::parse_single(piece, at)?);
            at += piece.len() + 1;
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Self::Tensor { parts } })
    }
}

fn read_state<T: Real>(path: &str) -> Result<HermitianOperator<T>> {
    let h: HermitianOperator<T> = serde_json::from_str(&fs::read_to_string(path)?)?;
    h.check_density(T::tol_floor(1e-8))?;
    Ok(h)
}

impl StateDescriptor {
    /// Pure state, when the descriptor names one.
    pub fn pure<T: Real>(&self) -> Result<Option<PureState<T>>> {
        Ok(match self {
            Self::Cosdit { d } => Some(PureState::cosdit(*d)),
            Self::Basis { d, i } => Some(PureState::basis(*d, *i)),
            Self::Flagpole { d, p } => Some(FlagpoleSpec::new(*d, T::lit(*p))?.state()),
            Self::Pure { probs } => Some(PureState::from_probabilities(&lits(probs))?),
            _ => None,
        })
    }

    pub fn build<T: Real>(&self) -> Result<HermitianOperator<T>> {
        if let Some(psi) = self.pure()? {
            return Ok(psi.projector());
        }
        let h = match self {
            Self::Diag { probs } => HermitianOperator::from_real_diag(&lits(probs)),
            Self::Mixed { d } => HermitianOperator::maximally_mixed(*d),
            Self::File { path } => return read_state(path),
            _ => unreachable!("pure descriptors handled above"),
        };
        h.check_density(T::tol_floor(1e-8))?;
        Ok(h)
    }
}

fn lits<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

impl FromStr for StateDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, f) = Fields::parse(s, 0)?;
        let d = match kind {
            "cosdit" | "mixed" => {
                f.only(&["d"])?;
                let d = positive(f.get("d")?, f.kind_end, "d")?;
                if kind == "cosdit" { Self::Cosdit { d } } else { Self::Mixed { d } }
            }
            "basis" => {
                f.only(&["d", "i"])?;
                let (d, i): (usize, usize) = (positive(f.get("d")?, f.kind_end, "d")?, f.get("i")?);
                if i >= d {
                    return Err(err(f.raw("i")?.1, format!("index {i} out of range for d={d}")));
                }
                Self::Basis { d, i }
            }
            "flagpole" => {
                f.only(&["d", "p"])?;
                Self::Flagpole { d: f.get("d")?, p: f.get("p")? }
            }
            "pure" | "diag" => {
                f.only(&["probs"])?;
                let probs = f.list("probs")?;
                if kind == "pure" { Self::Pure { probs } } else { Self::Diag { probs } }
            }
            "file" => {
                f.only(&["path"])?;
                Self::File { path: f.get("path")? }
            }
            other => return Err(f.unknown_kind(other)),
        };
        Ok(d)
    }
}
