//! Complex error function and imaginary error function.
//!
//! In the strip `|Re z| < 2` (out to `|z| = 26`) the Maclaurin series is
//! used (its terms do not cancel badly there). Elsewhere the Laplace continued
//! fraction for `erfc` is evaluated with the modified Lentz algorithm in the
//! right half-plane and mirrored by odd symmetry.

use std::f64::consts::PI;

use num_complex::Complex64;

fn series(z: Complex64) -> Complex64 {
    let z2 = -(z * z);
    let mut term = z;
    let mut sum = z;
    let min_terms = z.norm_sqr().ceil() as usize + 4;
    for n in 1..4000 {
        term *= z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if n > min_terms && add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}

/// `erfc(z)` for `Re z > 0` via
/// `sqrt(pi) e^{z^2} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`.
fn erfc_continued_fraction(z: Complex64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..5000 {
        let a = n as f64 * 0.5;
        d = z + d * a;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = z + a / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-(z * z)).exp() / (f * PI.sqrt())
}

/// Complex error function with relative accuracy near 1e-13 where the value
/// is representable.
pub fn erf(z: Complex64) -> Complex64 {
    let r = z.norm();
    if z.re.abs() < 2.0 && r < 26.0 {
        series(z)
    } else if z.re >= 0.0 {
        1.0 - erfc_continued_fraction(z)
    } else {
        erfc_continued_fraction(-z) - 1.0
    }
}

/// Imaginary error function, `erfi(z) = -j erf(jz)`.
pub fn erfi(z: Complex64) -> Complex64 {
    let j = Complex64::new(0.0, 1.0);
    -j * erf(j * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from mpmath.erf at 40 significant digits.
    #[allow(clippy::excessive_precision, clippy::type_complexity)]
    const REFERENCE: &[((f64, f64), (f64, f64))] = &[
        (
            (0.5, 0.25),
            (0.54868936055376218415, 0.22199095428837334808),
        ),
        (
            (-1.2, 0.7),
            (-1.0663700129803380527, 0.12024336401600993436),
        ),
        ((2.0, -2.0), (1.151310866398069024, -0.12729162946314079101)),
        (
            (2.9, 0.1),
            (0.99996602048586133367, 0.000023811811058063842874),
        ),
        ((0.1, 2.5), (55.866362638415062352, 116.15561049876710714)),
        (
            (3.5, 3.5),
            (0.88712927123958427221, 0.015026380322129921374),
        ),
        (
            (10.0, -10.0),
            (0.96164937427247485984, 0.01098768460819398838),
        ),
        (
            (40.0, 40.0),
            (1.008763726512563151, 0.0047611894420286385162),
        ),
        (
            (-7.0, 7.0),
            (-1.010195303819281206, -0.056068649971793057978),
        ),
        ((0.3, 5.0), (1534630510.7828828318, -7411249484.5579629565)),
        (
            (1.5, 8.0),
            (-4.4454610295781163425e25, 1.1345057738181380109e25),
        ),
        (
            (4.0, 0.5),
            (1.0000000110175494548, -1.6289880119455547667e-8),
        ),
        ((2.5, 2.6), (0.90595523492572413899, 0.24233151153712936568)),
        ((25.0, -3.0), (1.0, 8.7796907787756433408e-46)),
        (
            (1e-8, 1e-9),
            (1.128379167095512561e-8, 1.1283791670955125317e-9),
        ),
        (
            (200.0, -200.0),
            (1.0019782735787628663, 0.00025555278141515298025),
        ),
        ((6.0, 0.0), (0.99999999999999997848, 0.0)),
        ((0.0, 4.0), (0.0, 1296959.7307176392315)),
    ];

    #[test]
    fn matches_reference() {
        for &((zr, zi), (vr, vi)) in REFERENCE {
            let got = erf(Complex64::new(zr, zi));
            let want = Complex64::new(vr, vi);
            let rel = (got - want).norm() / want.norm();
            assert!(
                rel < 1e-11,
                "erf({zr}+{zi}j) = {got}, want {want}, rel {rel:e}"
            );
        }
    }

    #[test]
    fn agrees_with_real_erf() {
        for i in -60..=60 {
            let x = i as f64 * 0.1;
            let got = erf(Complex64::new(x, 0.0));
            assert!((got.re - libm::erf(x)).abs() < 1e-14, "{x}");
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn erfi_basics() {
        assert_eq!(erfi(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        // erfi(1) = 1.6504257587975428760...
        let v = erfi(Complex64::new(1.0, 0.0));
        assert!((v.re - 1.650_425_758_797_542_9).abs() < 1e-14 && v.im.abs() < 1e-15);
        for &(zr, zi) in &[(0.3, 0.2), (4.0, 4.1), (-30.0, 29.0), (1.0, -7.0)] {
            let z = Complex64::new(zr, zi);
            let a = erfi(-z);
            let b = -erfi(z);
            assert!((a - b).norm() <= 1e-14 * b.norm());
        }
    }
}
