//! Run-length codec for binary masks.
//!
//! Runs follow a row-major scan and alternate values starting with the
//! 0-run, which may have length zero when the mask starts with foreground.
//! This matches the convention used by common segmentation-dataset tooling,
//! so masks stored in manifests stay interoperable.

use serde::{Deserialize, Serialize};

use super::{BinaryMask, MaskError};

/// Serialized form of a mask inside JSON manifests:
/// `{"width": W, "height": H, "rle": [r0, r1, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    pub rle: Vec<u64>,
}

impl RleMask {
    pub fn decode(&self) -> Result<BinaryMask, MaskError> {
        rle_decode(&self.rle, self.width, self.height)
    }
}

impl From<&BinaryMask> for RleMask {
    fn from(mask: &BinaryMask) -> Self {
        RleMask {
            width: mask.width(),
            height: mask.height(),
            rle: rle_encode(mask),
        }
    }
}

/// Encodes a mask as alternating run lengths starting with the 0-run.
pub fn rle_encode(mask: &BinaryMask) -> Vec<u64> {
    let mut runs = Vec::new();
    let mut current = 0u8;
    let mut len = 0u64;
    for &bit in mask.bits() {
        if bit == current {
            len += 1;
        } else {
            runs.push(len);
            current = bit;
            len = 1;
        }
    }
    runs.push(len);
    runs
}

/// Rebuilds a mask from alternating run lengths.
///
/// Rejects run sums that do not cover `width * height` exactly.
pub fn rle_decode(runs: &[u64], width: u32, height: u32) -> Result<BinaryMask, MaskError> {
    let expected = u64::from(width) * u64::from(height);
    let found: u64 = runs.iter().sum();
    if found != expected {
        return Err(MaskError::BadRunSum { expected, found });
    }
    let mut bits = Vec::with_capacity(expected as usize);
    let mut value = 0u8;
    for &run in runs {
        for _ in 0..run {
            bits.push(value);
        }
        value ^= 1;
    }
    BinaryMask::new(width, height, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_zeros_is_single_run() {
        let mask = BinaryMask::zeros(4, 4).unwrap();
        assert_eq!(rle_encode(&mask), vec![16]);
    }

    #[test]
    fn all_ones_has_leading_empty_zero_run() {
        let mask = BinaryMask::from_fn(4, 4, |_, _| true).unwrap();
        assert_eq!(rle_encode(&mask), vec![0, 16]);
    }

    #[test]
    fn decode_rejects_bad_run_sum() {
        assert!(matches!(
            rle_decode(&[3, 4], 4, 4),
            Err(MaskError::BadRunSum {
                expected: 16,
                found: 7
            })
        ));
    }

    #[test]
    fn decode_zero_length_runs_are_tolerated() {
        let mask = rle_decode(&[0, 2, 0, 2], 2, 2).unwrap();
        assert_eq!(mask.area(), 4);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            width in 1u32..40,
            height in 1u32..40,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mask = BinaryMask::from_fn(width, height, |_, _| rng.gen_bool(0.5)).unwrap();
            let runs = rle_encode(&mask);
            let back = rle_decode(&runs, width, height).unwrap();
            prop_assert_eq!(back, mask);
        }

        #[test]
        fn runs_alternate_and_cover(width in 1u32..24, height in 1u32..24, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mask = BinaryMask::from_fn(width, height, |_, _| rng.gen_bool(0.3)).unwrap();
            let runs = rle_encode(&mask);
            prop_assert_eq!(runs.iter().sum::<u64>(), u64::from(width) * u64::from(height));
            // only the leading 0-run may be empty
            prop_assert!(runs.iter().skip(1).all(|&r| r > 0));
        }
    }
}
