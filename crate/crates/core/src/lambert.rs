//! Complex Lambert W on arbitrary integer branches.
//!
//! `W_k(z)` solves `w e^w = z`. Branch cuts follow the usual convention:
//! `(-inf, -1/e]` for `k = 0`, `(-inf, 0]` otherwise, with values on a cut
//! taken from above (counter-clockwise continuity). Each evaluation runs
//! Halley's iteration from a branch-specific starting point and then checks
//! that the converged value lies in the region of the requested branch.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
const TOL: f64 = 1e-13;

/// `W_k(z)` for any integer branch `k`.
pub fn lambert_w(z: Complex64, k: i32) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::LambertW {
            branch: k,
            z: z.to_string(),
        });
    }
    if z == Complex64::new(0.0, 0.0) {
        return if k == 0 {
            Ok(z)
        } else {
            Err(Error::LambertW {
                branch: k,
                z: z.to_string(),
            })
        };
    }
    for guess in candidate_guesses(z, k) {
        if let Some(w) = halley(z, guess) {
            if branch_of(w, z.im >= 0.0) == k {
                return Ok(w);
            }
        }
    }
    Err(Error::LambertW {
        branch: k,
        z: z.to_string(),
    })
}

fn halley(z: Complex64, mut w: Complex64) -> Option<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + one;
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        if denom.norm() == 0.0 || !denom.re.is_finite() {
            return None;
        }
        let step = f / denom;
        w -= step;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
        if step.norm() <= TOL * w.norm().max(1.0) {
            return Some(w);
        }
    }
    None
}

fn candidate_guesses(z: Complex64, k: i32) -> Vec<Complex64> {
    let two_pi_k = Complex64::new(0.0, 2.0 * PI * k as f64);
    let asymptotic = {
        let l1 = z.ln() + two_pi_k;
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    let p = (2.0 * (E * z + 1.0)).sqrt();
    let bp_upper = -1.0 + p - p * p / 3.0;
    let bp_lower = -1.0 - p - p * p / 3.0;
    let near_bp = (z + 1.0 / E).norm() < 0.3;

    let mut out = Vec::with_capacity(4);
    match k {
        0 => {
            if near_bp {
                out.push(bp_upper);
            }
            if z.norm() < 0.25 {
                out.push(z - z * z + 1.5 * z * z * z);
            }
            out.push(asymptotic);
            out.push((1.0 + z).ln());
            out.push(Complex64::new(
                -0.318_13,
                1.337_24_f64.copysign(if z.im < 0.0 { -1.0 } else { 1.0 }),
            ));
        }
        -1 | 1 => {
            let on_side = if k == -1 { z.im >= 0.0 } else { z.im < 0.0 };
            if near_bp && on_side {
                out.push(bp_lower);
            }
            out.push(asymptotic);
            if on_side {
                out.push(bp_lower);
            }
            // start from the branch's own strip when the asymptotic form misleads
            out.push(Complex64::new(-2.0, -(k as f64) * 1.5));
        }
        _ => out.push(asymptotic),
    }
    out
}

/// Index of the branch whose range contains `w`.
///
/// The ranges are separated by the curves `ξ = -η cot η` (images of the
/// negative real axis) and by the ray `w < -1` on the real line. Points on a
/// boundary are assigned as if `z` sat just above the cut.
pub fn branch_index(w: Complex64) -> i32 {
    branch_of(w, true)
}

/// Like [`branch_index`], but a point within rounding of a boundary is
/// resolved by the side of the cut `z` lies on.
fn branch_of(w: Complex64, from_above: bool) -> i32 {
    let (xi, eta) = (w.re, w.im);
    if eta.abs() <= 1e-12 && xi < -1.0 {
        return if from_above { -1 } else { 1 };
    }
    if eta == 0.0 {
        return 0;
    }
    if eta > 0.0 {
        // right of a curve maps to Im z > 0
        upper_branch(xi, eta, from_above)
    } else {
        // mirror image; right of a curve maps to Im z < 0
        -upper_branch(xi, -eta, !from_above)
    }
}

fn upper_branch(xi: f64, eta: f64, tie_to_right: bool) -> i32 {
    let strip = (eta / PI).floor() as i64;
    if strip % 2 == 1 {
        return ((strip + 1) / 2) as i32;
    }
    let m = (strip / 2) as i32;
    let boundary = -eta / eta.tan();
    let slack = 1e-9 * boundary.abs().max(1.0);
    let right = if (xi - boundary).abs() <= slack {
        tie_to_right
    } else {
        xi > boundary
    };
    if right {
        m
    } else {
        m + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent reference values (SciPy, cross-checked against mpmath to 1e-15).
    const REFERENCE: &[(f64, f64, i32, f64, f64)] = &[
        (1.0, 0.0, 0, 0.567_143_290_409_783_8, 0.0),
        (-0.2, 0.0, 0, -0.259_171_101_819_073_7, 0.0),
        (-0.2, 0.0, -1, -2.542_641_357_773_526_5, 0.0),
        (
            -0.5,
            0.1,
            0,
            -0.560_112_571_030_066_9,
            0.695_208_909_609_955_2,
        ),
        (
            -0.5,
            0.1,
            -1,
            -1.002_601_039_331_793,
            -0.962_271_156_611_758_7,
        ),
        (
            -0.5,
            -0.1,
            1,
            -1.002_601_039_331_793,
            0.962_271_156_611_758_7,
        ),
        (
            -0.5,
            -0.1,
            0,
            -0.560_112_571_030_066_9,
            -0.695_208_909_609_955_2,
        ),
        (
            -std::f64::consts::FRAC_PI_2,
            0.0,
            0,
            0.0,
            std::f64::consts::FRAC_PI_2,
        ),
        (
            -std::f64::consts::FRAC_PI_2,
            0.0,
            -1,
            0.0,
            -std::f64::consts::FRAC_PI_2,
        ),
        (
            -0.3,
            0.8,
            0,
            0.207_602_229_139_202_8,
            0.662_458_429_381_789_7,
        ),
        (-0.3, 0.8, 1, -2.052_398_678_717_168, 6.328_340_482_879_011),
        (
            -0.3,
            0.8,
            -1,
            -1.108_919_153_316_053_8,
            -2.340_328_189_661_849,
        ),
        (-0.3, 0.8, 3, -3.117_436_070_777_722, 19.046_086_661_018_823),
        (
            -0.3,
            0.8,
            -8,
            -4.004_327_357_698_935,
            -46.679_545_288_522_03,
        ),
        (
            -2.0,
            0.001,
            0,
            0.173_016_447_554_504,
            1.673_326_887_228_091_5,
        ),
        (
            -2.0,
            -0.001,
            0,
            0.173_016_447_554_504,
            -1.673_326_887_228_091_5,
        ),
        (
            -0.0005,
            0.0001,
            0,
            -0.000_500_240_165_127_032_4,
            0.000_100_100_111_128_15,
        ),
        (
            -0.0005,
            0.0001,
            2,
            -10.406_698_047_146_705,
            13.274_901_439_733_219,
        ),
        (
            -0.0005,
            0.0001,
            -2,
            -10.093_886_513_960_77,
            -7.093_126_740_691_941,
        ),
        (3.0, 4.0, 0, 1.281_561_806_123_776, 0.533_095_222_020_971),
        (3.0, 4.0, 8, -2.295_133_753_191_319_4, 49.575_718_859_461_82),
        (-0.36, 0.0, 0, -0.806_084_315_970_817_4, 0.0),
        (-0.36, 0.0, -1, -1.222_770_133_978_506_6, 0.0),
        (
            -0.37,
            0.001,
            0,
            -0.971_625_992_842_832_9,
            0.108_194_159_215_853_15,
        ),
        (
            -0.37,
            0.001,
            -1,
            -1.020_704_738_170_442,
            -0.111_798_675_418_185_6,
        ),
        (
            -0.37,
            -0.001,
            1,
            -1.020_704_738_170_442,
            0.111_798_675_418_185_6,
        ),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, y, k, wr, wi) in REFERENCE {
            let w = lambert_w(Complex64::new(x, y), k).unwrap();
            let err = (w - Complex64::new(wr, wi)).norm();
            assert!(
                err < 1e-12,
                "W_{k}({x}+{y}i) = {w}, want {wr}+{wi}i (err {err:e})"
            );
        }
    }

    #[test]
    fn defining_equation_holds_on_many_branches() {
        let zs = [
            Complex64::new(-0.05, 0.3),
            Complex64::new(-1.4, 0.2),
            Complex64::new(-0.9, -1e-12),
            Complex64::new(-1e-6, 1e-7),
            Complex64::new(0.5, -2.0),
        ];
        for z in zs {
            for k in -8..=8 {
                let w = lambert_w(z, k).unwrap();
                let r = (w * w.exp() - z).norm();
                assert!(
                    r < 1e-12 * z.norm().max(1.0),
                    "k={k}, z={z}, residual {r:e}"
                );
                assert_eq!(branch_of(w, z.im >= 0.0), k);
            }
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(
            lambert_w(Complex64::new(0.0, 0.0), 0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(lambert_w(Complex64::new(0.0, 0.0), 1).is_err());
        assert!(lambert_w(Complex64::new(f64::NAN, 0.0), 0).is_err());
    }

    #[test]
    fn branch_regions() {
        assert_eq!(branch_index(Complex64::new(0.5, 0.0)), 0);
        assert_eq!(branch_index(Complex64::new(-2.0, 0.0)), -1);
        assert_eq!(branch_index(Complex64::new(-2.0, 1e-9)), 1);
        assert_eq!(branch_index(Complex64::new(0.0, 4.0)), 1);
        assert_eq!(branch_index(Complex64::new(0.0, -4.0)), -1);
        assert_eq!(branch_index(Complex64::new(0.0, 7.0)), 1);
        assert_eq!(branch_index(Complex64::new(-5.0, 7.0)), 1);
        assert_eq!(branch_index(Complex64::new(-9.0, 7.0)), 2);
    }
}
