//! Numeric constants of the reduction lemmas.
//!
//! Everything is phrased over the squared minima `A..J`, so the critical
//! determinants are stored squared, as exact dyadic rationals. The two
//! decimal constants are kept as literals and widened one ulp when they
//! become intervals.

use woods10_core::{Expr, Scalar};

/// Upper bound on `A`: the squared Hermite constant bound, `A <= gamma_10 < 2.2636302`.
pub const GAMMA10_UPPER_LIT: &str = "2.2636302";

/// Lemma 4 chain coefficient: `X_{i+4} >= 0.46873 X_i`.
pub const LEMMA4_SKIP4_LIT: &str = "0.46873";

/// Chain coefficients by index distance 1..=4 in the reduced basis:
/// 3/4, 2/3, 1/2 from Lemma 3 (composed), 0.46873 from Lemma 4.
pub fn chain_coefficient(distance: usize) -> Scalar {
    match distance {
        1 => Scalar::ratio(3, 4),
        2 => Scalar::ratio(2, 3),
        3 => Scalar::ratio(1, 2),
        4 => Scalar::decimal(LEMMA4_SKIP4_LIT),
        _ => panic!("no chain coefficient for distance {distance}"),
    }
}

/// Squared critical determinants of the unit sphere, `k -> delta(S_k)^2`,
/// known for k = 3..=8. Stored exactly: the k = 6 value sqrt(3)/8 squares
/// to 3/64, and 1/(2 sqrt 2) squares to 1/8.
pub fn crit_det_sq(k: u32) -> Option<Scalar> {
    Some(match k {
        3 => Scalar::ratio(1, 2),
        4 => Scalar::ratio(1, 4),
        5 => Scalar::ratio(1, 8),
        6 => Scalar::ratio(3, 64),
        7 => Scalar::ratio(1, 64),
        8 => Scalar::ratio(1, 256),
        _ => return None,
    })
}

pub fn gamma10_upper_expr() -> Expr {
    Expr::decimal(GAMMA10_UPPER_LIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crit_det_squares() {
        let expected = [
            (3, 1.0 / 2.0),
            (4, 1.0 / 4.0),
            (5, 1.0 / 8.0),
            (6, 3.0 / 64.0),
            (7, 1.0 / 64.0),
            (8, 1.0 / 256.0),
        ];
        for (k, v) in expected {
            assert_eq!(crit_det_sq(k).unwrap().to_f64(), v);
        }
        assert!(crit_det_sq(9).is_none());
        // against the unsquared list: 1/sqrt2, 1/2, 1/(2 sqrt2), sqrt3/8, 1/8, 1/16
        let unsquared: [f64; 6] = [
            1.0 / 2f64.sqrt(),
            0.5,
            1.0 / (2.0 * 2f64.sqrt()),
            3f64.sqrt() / 8.0,
            1.0 / 8.0,
            1.0 / 16.0,
        ];
        for (i, d) in unsquared.iter().enumerate() {
            let sq = crit_det_sq(i as u32 + 3).unwrap().to_f64();
            assert!((d * d - sq).abs() < 1e-15);
        }
    }
}
