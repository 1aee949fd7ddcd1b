//! Möbius and zeta transforms on the lattice of edge subsets.
//!
//! Values are indexed by edge bitmask. The Möbius transform turns cumulative
//! subset probabilities `F(H) = Pr[X ⊆ H]` into point probabilities
//! `f(G) = Σ_{H ⊆ G} (-1)^{|G∖H|} F(H)`, one pass per edge coordinate.
//! Alternating signs cancel heavily when two laws are close, so the passes
//! run in double-double arithmetic and round once at the end.

use crate::error::{invalid, Result};
use crate::exec;
use crate::numeric::TwoFloat;

/// Blocks at most this long are processed whole by one worker.
const GRAIN: usize = 1 << 14;

fn check_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(invalid!("lattice vector length {len} is not a power of two"));
    }
    Ok(len.trailing_zeros() as usize)
}

#[inline]
fn mobius_block(chunk: &mut [TwoFloat], half: usize) {
    for pair in chunk.chunks_exact_mut(half * 2) {
        let (lo, hi) = pair.split_at_mut(half);
        for (h, l) in hi.iter_mut().zip(lo.iter()) {
            *h = h.sub(*l);
        }
    }
}

fn mobius_pass(xs: &mut [TwoFloat], bit: usize) {
    let half = 1usize << bit;
    let block = half * 2;
    if block <= GRAIN {
        exec::for_each_chunk_mut(xs, GRAIN.max(block), |_, chunk| mobius_block(chunk, half));
    } else {
        for pair in xs.chunks_exact_mut(block) {
            let (lo, hi) = pair.split_at_mut(half);
            exec::zip_apply(hi, lo, |h, l| *h = h.sub(*l));
        }
    }
}

fn to_two_float(values: &[f64]) -> Vec<TwoFloat> {
    values.iter().map(|&v| TwoFloat::from_f64(v)).collect()
}

fn write_back(values: &mut [f64], xs: &[TwoFloat]) {
    exec::for_each_chunk_mut(values, GRAIN, |c, chunk| {
        let base = c * GRAIN;
        for (i, v) in chunk.iter_mut().enumerate() {
            *v = xs[base + i].value();
        }
    });
}

/// In-place Möbius transform over `log2(len)` edge coordinates.
pub fn mobius_edge_lattice(values: &mut [f64]) -> Result<()> {
    let bits = check_len(values.len())?;
    let mut xs = to_two_float(values);
    for bit in 0..bits {
        mobius_pass(&mut xs, bit);
    }
    write_back(values, &xs);
    Ok(())
}

/// In-place Möbius transform on double-double values.
pub fn mobius_edge_lattice_two(xs: &mut [TwoFloat]) -> Result<()> {
    let bits = check_len(xs.len())?;
    for bit in 0..bits {
        mobius_pass(xs, bit);
    }
    Ok(())
}

/// Single-threaded reference path with identical arithmetic; kept for
/// benchmarking against [`mobius_edge_lattice`].
pub fn mobius_edge_lattice_seq(values: &mut [f64]) -> Result<()> {
    let bits = check_len(values.len())?;
    let mut xs = to_two_float(values);
    for bit in 0..bits {
        mobius_block(&mut xs, 1 << bit);
    }
    for (v, x) in values.iter_mut().zip(&xs) {
        *v = x.value();
    }
    Ok(())
}

/// In-place zeta (subset-sum) transform, the inverse of [`mobius_edge_lattice`].
pub fn zeta_edge_lattice(values: &mut [f64]) -> Result<()> {
    let bits = check_len(values.len())?;
    for bit in 0..bits {
        let half = 1usize << bit;
        for pair in values.chunks_exact_mut(half * 2) {
            let (lo, hi) = pair.split_at_mut(half);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += *l;
            }
        }
    }
    Ok(())
}
