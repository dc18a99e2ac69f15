//! Rate-1/2, constraint-length-7 convolutional code (generators 133/171 octal)
//! with a hard-decision Viterbi decoder.
//!
//! The encoder starts in the all-zero state and is not terminated, so the coded
//! stream is exactly twice the input length. The decoder traces back from the
//! best final state.

use crate::error::{Error, Result};

const G0: u32 = 0o133;
const G1: u32 = 0o171;
const STATES: usize = 64;

#[inline]
fn outputs(reg: u32) -> (u8, u8) {
    (((reg & G0).count_ones() & 1) as u8, ((reg & G1).count_ones() & 1) as u8)
}

pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut state = 0u32;
    let mut out = Vec::with_capacity(bits.len() * 2);
    for &b in bits {
        let reg = ((b as u32 & 1) << 6) | state;
        let (a, c) = outputs(reg);
        out.push(a);
        out.push(c);
        state = reg >> 1;
    }
    out
}

pub fn viterbi_decode(coded: &[u8]) -> Result<Vec<u8>> {
    if !coded.len().is_multiple_of(2) {
        return Err(Error::OddCodedLength(coded.len()));
    }
    let steps = coded.len() / 2;
    // Branch outputs for every (state, input) pair.
    let mut branch = [[(0u8, 0u8); 2]; STATES];
    for (s, row) in branch.iter_mut().enumerate() {
        for input in 0..2u32 {
            row[input as usize] = outputs((input << 6) | s as u32);
        }
    }

    const INF: u32 = u32::MAX / 2;
    let mut metric = [INF; STATES];
    metric[0] = 0;
    // decisions[t] bit s set => survivor into state s came from the odd predecessor.
    let mut decisions: Vec<u64> = Vec::with_capacity(steps);
    for t in 0..steps {
        let (r0, r1) = (coded[2 * t] & 1, coded[2 * t + 1] & 1);
        let mut next = [INF; STATES];
        let mut dec = 0u64;
        for (ns, slot) in next.iter_mut().enumerate() {
            let input = ns >> 5;
            let base = (ns << 1) & 0x3f;
            // Predecessors differ only in the bit shifted out.
            let mut best = INF;
            let mut from_odd = false;
            for lsb in 0..2 {
                let ps = base | lsb;
                if metric[ps] >= INF {
                    continue;
                }
                let (a, c) = branch[ps][input];
                let m = metric[ps] + u32::from(a != r0) + u32::from(c != r1);
                if m < best {
                    best = m;
                    from_odd = lsb == 1;
                }
            }
            *slot = best;
            if from_odd {
                dec |= 1 << ns;
            }
        }
        metric = next;
        decisions.push(dec);
    }

    let mut state = (0..STATES).min_by_key(|&s| (metric[s], s)).unwrap_or(0);
    let mut out = vec![0u8; steps];
    for t in (0..steps).rev() {
        out[t] = (state >> 5) as u8;
        let lsb = ((decisions[t] >> state) & 1) as usize;
        state = ((state << 1) & 0x3f) | lsb;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn hamming(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn zero_in_zero_out() {
        assert!(conv_encode(&[0; 32]).iter().all(|&b| b == 0));
    }

    #[test]
    fn first_pair_for_single_one() {
        assert_eq!(&conv_encode(&[1])[..2], &[1, 1]);
        // Impulse response is the interleaved generator taps.
        let imp = conv_encode(&[1, 0, 0, 0, 0, 0, 0]);
        let g0: Vec<u8> = imp.iter().step_by(2).copied().collect();
        let g1: Vec<u8> = imp.iter().skip(1).step_by(2).copied().collect();
        assert_eq!(g0, vec![1, 0, 1, 1, 0, 1, 1]);
        assert_eq!(g1, vec![1, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn odd_length_rejected() {
        assert!(matches!(viterbi_decode(&[1, 0, 1]), Err(Error::OddCodedLength(3))));
    }

    #[test]
    fn exhaustive_round_trip_up_to_16_bits() {
        for len in 1..=16usize {
            for m in 0u32..(1 << len) {
                let bits: Vec<u8> = (0..len).map(|i| ((m >> i) & 1) as u8).collect();
                assert_eq!(viterbi_decode(&conv_encode(&bits)).unwrap(), bits);
            }
        }
    }

    #[test]
    fn decoder_is_maximum_likelihood_on_short_messages() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let codebook: Vec<(Vec<u8>, Vec<u8>)> = (0u32..256)
            .map(|m| {
                let bits: Vec<u8> = (0..8).map(|i| ((m >> i) & 1) as u8).collect();
                let c = conv_encode(&bits);
                (bits, c)
            })
            .collect();
        for _ in 0..500 {
            let received: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
            let best = codebook.iter().map(|(_, c)| hamming(c, &received)).min().unwrap();
            let decoded = viterbi_decode(&received).unwrap();
            assert_eq!(hamming(&conv_encode(&decoded), &received), best);
        }
    }

    #[test]
    fn corrects_single_interior_error() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let bits: Vec<u8> = (0..24).map(|_| rng.random_range(0..2)).collect();
            let mut coded = conv_encode(&bits);
            let pos = rng.random_range(0..36);
            coded[pos] ^= 1;
            assert_eq!(viterbi_decode(&coded).unwrap(), bits);
        }
    }
}
