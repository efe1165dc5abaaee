use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::{CollageSystem, NtId, Rule};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("expansion has length {length}, above the limit of {limit}")]
    LimitExceeded { length: BigUint, limit: usize },
    #[error("X{0} truncates outside its referent")]
    BadTruncation(NtId),
}

enum Frame {
    /// Emit `⟦id⟧[lo..hi)`, 0-based.
    Emit(NtId, BigUint, BigUint),
    /// Everything emitted since `offset` is the full expansion of `id`.
    Record(NtId, usize),
}

/// Returns `⟦x⟧` if its length is at most `limit`.
///
/// Truncations are resolved by walking into the truncated rule, so `⟦Y⟧`
/// itself is never built when only a slice of it is needed.
pub fn expand(g: &CollageSystem, x: NtId, limit: usize) -> Result<String, ExpandError> {
    let lens = g.lengths();
    let length = &lens[x - 1];
    if length.to_usize().is_none_or(|l| l > limit) {
        return Err(ExpandError::LimitExceeded { length: length.clone(), limit });
    }

    let mut cache: Vec<Option<String>> = vec![None; g.size()];
    let mut out = String::new();
    let mut stack = vec![Frame::Emit(x, BigUint::zero(), length.clone())];

    while let Some(frame) = stack.pop() {
        let (id, lo, hi) = match frame {
            Frame::Record(id, offset) => {
                cache[id - 1] = Some(out[offset..].to_string());
                continue;
            }
            Frame::Emit(id, lo, hi) => (id, lo, hi),
        };
        if lo >= hi {
            continue;
        }
        let full = lo.is_zero() && hi == lens[id - 1];
        if full {
            if let Some(s) = &cache[id - 1] {
                out.push_str(s);
                continue;
            }
            stack.push(Frame::Record(id, out.len()));
        }
        match g.rule(id) {
            Rule::Atomic(c) => out.push(*c),
            Rule::Concat(y, z) => {
                let ly = &lens[y - 1];
                if hi > *ly {
                    let from = if lo > *ly { &lo - ly } else { BigUint::zero() };
                    stack.push(Frame::Emit(*z, from, &hi - ly));
                }
                if lo < *ly {
                    let to = if hi < *ly { hi.clone() } else { ly.clone() };
                    stack.push(Frame::Emit(*y, lo, to));
                }
            }
            Rule::Repeat(y, _) => {
                let ly = &lens[y - 1];
                let first = lo.div_floor(ly);
                let mut copy = (&hi - 1u32).div_floor(ly);
                loop {
                    let base = &copy * ly;
                    let from = if lo > base { &lo - &base } else { BigUint::zero() };
                    let end = &base + ly;
                    let to = if hi < end { &hi - &base } else { ly.clone() };
                    stack.push(Frame::Emit(*y, from, to));
                    if copy == first {
                        break;
                    }
                    copy -= BigUint::one();
                }
            }
            Rule::Truncate(y, b, e) => {
                if b.is_zero() || e <= b || *e > &lens[y - 1] + 1u32 {
                    return Err(ExpandError::BadTruncation(id));
                }
                let shift = b - 1u32;
                stack.push(Frame::Emit(*y, lo + &shift, hi + &shift));
            }
        }
    }
    Ok(out)
}
