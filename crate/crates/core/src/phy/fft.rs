//! Transform contract: the forward transform is unscaled, the inverse carries
//! the 1/N factor, so `ifft(fft(x)) == x` and a unit tone of amplitude N in
//! bin 0 becomes an all-ones block.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, PlanCache)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let (planner, cache) = &mut *p;
        cache
            .entry((len, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

/// In-place forward DFT of any length.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), false).process(buf);
}

/// In-place inverse DFT of any length, scaled by 1/N.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), true).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

pub fn fft(block: &[Complex64]) -> Vec<Complex64> {
    let mut v = block.to_vec();
    fft_in_place(&mut v);
    v
}

pub fn ifft(block: &[Complex64]) -> Vec<Complex64> {
    let mut v = block.to_vec();
    ifft_in_place(&mut v);
    v
}

fn check(block: &[Complex64], n: usize) -> Result<()> {
    if block.len() != n {
        return Err(Error::BlockLength { expected: n, actual: block.len() });
    }
    Ok(())
}

pub fn fft64(block: &[Complex64]) -> Result<Vec<Complex64>> {
    check(block, 64)?;
    Ok(fft(block))
}

pub fn ifft64(block: &[Complex64]) -> Result<Vec<Complex64>> {
    check(block, 64)?;
    Ok(ifft(block))
}

/// Forward transform of an oversampled block of `64 * g` samples.
pub fn fft_ng(block: &[Complex64], g: usize) -> Result<Vec<Complex64>> {
    check(block, 64 * g)?;
    Ok(fft(block))
}

pub fn ifft_ng(block: &[Complex64], g: usize) -> Result<Vec<Complex64>> {
    check(block, 64 * g)?;
    Ok(ifft(block))
}
