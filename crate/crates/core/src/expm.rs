//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (Higham 2005 degree selection).

use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::operator::{C64, Operator};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

pub fn expm(a: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.one_norm();
    let (u, v, squarings) = if norm < THETA_3 {
        let (u, v) = pade(a, &PADE3);
        (u, v, 0)
    } else if norm < THETA_5 {
        let (u, v) = pade(a, &PADE5);
        (u, v, 0)
    } else if norm < THETA_7 {
        let (u, v) = pade(a, &PADE7);
        (u, v, 0)
    } else if norm < THETA_9 {
        let (u, v) = pade(a, &PADE9);
        (u, v, 0)
    } else {
        let squarings = ((norm / THETA_13).log2().ceil() as i32).max(0);
        let scaled = a.scale(C64::new(2f64.powi(-squarings), 0.0));
        let (u, v) = pade13(&scaled);
        (u, v, squarings)
    };

    // Pade approximant is (V + U) / (V - U).
    let numer = v.add(&u);
    let denom = v.sub(&u);
    let mut result = lu_solve(&denom, &numer)?;
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    Ok(result)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const PADE9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Odd/even split for degrees 3..9: U = A * (odd part), V = even part.
fn pade(a: &Operator, b: &[f64]) -> (Operator, Operator) {
    let n = a.rows();
    let id = Operator::identity(n);
    let a2 = a.mul(a);
    let mut powers = vec![id.clone(), a2.clone()];
    let half = b.len() / 2;
    while powers.len() < half {
        let next = powers.last().unwrap().mul(&a2);
        powers.push(next);
    }
    let mut odd = Operator::zeros(n, n);
    let mut even = Operator::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        odd = odd.add(&p.scale(C64::new(b[2 * k + 1], 0.0)));
        even = even.add(&p.scale(C64::new(b[2 * k], 0.0)));
    }
    (a.mul(&odd), even)
}

fn pade13(a: &Operator) -> (Operator, Operator) {
    let b = &PADE13;
    let n = a.rows();
    let id = Operator::identity(n);
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);

    let u_inner = a6
        .scale(C64::new(b[13], 0.0))
        .add(&a4.scale(C64::new(b[11], 0.0)))
        .add(&a2.scale(C64::new(b[9], 0.0)));
    let u = a.mul(
        &a6.mul(&u_inner)
            .add(&a6.scale(C64::new(b[7], 0.0)))
            .add(&a4.scale(C64::new(b[5], 0.0)))
            .add(&a2.scale(C64::new(b[3], 0.0)))
            .add(&id.scale(C64::new(b[1], 0.0))),
    );
    let v_inner = a6
        .scale(C64::new(b[12], 0.0))
        .add(&a4.scale(C64::new(b[10], 0.0)))
        .add(&a2.scale(C64::new(b[8], 0.0)));
    let v = a6
        .mul(&v_inner)
        .add(&a6.scale(C64::new(b[6], 0.0)))
        .add(&a4.scale(C64::new(b[4], 0.0)))
        .add(&a2.scale(C64::new(b[2], 0.0)))
        .add(&id.scale(C64::new(b[0], 0.0)));
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{I, ONE, ZERO};
    use std::f64::consts::PI;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Operator::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert!(e.sub(&Operator::identity(3)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = Operator::diagonal(&[I * PI, ZERO]);
        let e = expm(&a).unwrap();
        let expect = Operator::diagonal(&[-ONE, ONE]);
        assert!(e.sub(&expect).frobenius_norm() < 1e-13);
    }

    #[test]
    fn matches_truncated_series_for_small_norm() {
        let a = Operator::from_entries(
            3,
            3,
            vec![
                C64::new(0.2, 0.1),
                C64::new(-0.3, 0.0),
                C64::new(0.0, 0.15),
                C64::new(0.05, -0.2),
                C64::new(0.1, 0.0),
                C64::new(0.25, 0.25),
                C64::new(0.0, -0.1),
                C64::new(0.3, 0.1),
                C64::new(-0.15, 0.0),
            ],
        )
        .unwrap();
        // Truncated-series oracle, accurate far below 1e-12 for this norm.
        let mut series = Operator::identity(3);
        let mut term = Operator::identity(3);
        for k in 1..=25 {
            term = term.mul(&a).scale(C64::new(1.0 / k as f64, 0.0));
            series = series.add(&term);
        }
        let e = expm(&a).unwrap();
        assert!(e.sub(&series).frobenius_norm() < 1e-12);
    }

    #[test]
    fn exp_inverse_pairs_to_identity() {
        // Norm around 8, forcing the squaring branch.
        let a = Operator::from_entries(
            2,
            2,
            vec![C64::new(3.0, 2.0), C64::new(-4.0, 1.0), C64::new(1.0, -2.0), C64::new(-3.0, 5.0)],
        )
        .unwrap();
        let e = expm(&a).unwrap();
        let einv = expm(&a.scale(-ONE)).unwrap();
        let defect = e.mul(&einv).sub(&Operator::identity(2)).frobenius_norm();
        assert!(defect < 1e-12, "defect {}", defect);
    }

    #[test]
    fn exp_of_skew_hermitian_is_unitary() {
        let h = Operator::from_entries(
            2,
            2,
            vec![C64::new(0.9, 0.0), C64::new(0.2, 0.6), C64::new(0.2, -0.6), C64::new(-1.4, 0.0)],
        )
        .unwrap();
        let e = expm(&h.scale(I)).unwrap();
        let defect = e.adjoint().mul(&e).sub(&Operator::identity(2)).frobenius_norm();
        assert!(defect < 1e-12);
    }
}
