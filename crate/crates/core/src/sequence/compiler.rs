use std::collections::HashMap;

use super::{Block, ErrorAssignment, Pulse, PulseSequence, Segment};
use crate::error::{Error, Result};
use crate::unitary::{evolve, CMatrix, Unitary};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

type MemoKey = ([u8; 32], Vec<u64>);

/// Turns a sequence plus error assignment into `U = U_k ⋯ U_1`.
///
/// Nested blocks are memoized on (structural digest, resolved errors of the
/// block's labels). The cache only stores results: a block is computed the
/// same way whether or not it is cached, so both modes agree bitwise. One
/// compiler per worker thread.
#[derive(Debug, Default)]
pub struct Compiler {
    cache: Option<HashMap<MemoKey, CMatrix>>,
    stats: CacheStats,
}

impl Compiler {
    pub fn new() -> Self {
        Self {
            cache: Some(HashMap::new()),
            stats: CacheStats::default(),
        }
    }

    pub fn without_cache() -> Self {
        Self {
            cache: None,
            stats: CacheStats::default(),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.cache.as_ref().map_or(0, HashMap::len),
            ..self.stats
        }
    }

    pub fn clear(&mut self) {
        if let Some(c) = self.cache.as_mut() {
            c.clear();
        }
        self.stats = CacheStats::default();
    }

    pub fn compile(&mut self, seq: &PulseSequence, errs: &ErrorAssignment) -> Result<Unitary> {
        let missing: Vec<String> = seq
            .labels()
            .iter()
            .filter(|l| !errs.contains(l))
            .map(|l| l.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::UnassignedLabels(missing));
        }
        for (a, b) in seq.correlated_pairs() {
            if !errs.same_group(a, b) {
                return Err(Error::UngroupedLabels(a.to_string(), b.to_string()));
            }
        }
        Ok(Unitary::from_matrix_unchecked(self.sequence(seq, errs)?))
    }

    fn sequence(&mut self, seq: &PulseSequence, errs: &ErrorAssignment) -> Result<CMatrix> {
        let dim = 1usize << seq.n_qubits();
        let mut u = CMatrix::identity(dim, dim);
        for seg in seq.segments() {
            let step = match seg {
                Segment::Pulse(p) => pulse_unitary(p, errs)?,
                Segment::Block(b) => self.block(b, errs)?,
            };
            u = step * u;
        }
        Ok(u)
    }

    fn block(&mut self, b: &Block, errs: &ErrorAssignment) -> Result<CMatrix> {
        let forward = match self.cache.is_some() {
            false => self.sequence(&b.sequence, errs)?,
            true => {
                let key = memo_key(&b.sequence, errs);
                if let Some(m) = self.cache.as_ref().and_then(|c| c.get(&key)) {
                    self.stats.hits += 1;
                    m.clone()
                } else {
                    self.stats.misses += 1;
                    let m = self.sequence(&b.sequence, errs)?;
                    self.cache
                        .as_mut()
                        .expect("cache enabled")
                        .insert(key, m.clone());
                    m
                }
            }
        };
        Ok(if b.inverse {
            forward.adjoint()
        } else {
            forward
        })
    }
}

fn memo_key(seq: &PulseSequence, errs: &ErrorAssignment) -> MemoKey {
    let eps = seq
        .labels()
        .iter()
        .map(|l| errs.resolve(l).expect("checked at entry").to_bits())
        .collect();
    (*seq.digest(), eps)
}

fn pulse_unitary(p: &Pulse, errs: &ErrorAssignment) -> Result<CMatrix> {
    let terms: Vec<(f64, f64, &crate::pauli::Hamiltonian)> = p
        .terms()
        .iter()
        .map(|t| {
            let eps = errs
                .resolve(&t.label)
                .ok_or_else(|| Error::UnassignedLabels(vec![t.label.to_string()]))?;
            Ok((t.theta, eps, &*t.h))
        })
        .collect::<Result<_>>()?;
    Ok(evolve(&terms)?.into_matrix())
}
