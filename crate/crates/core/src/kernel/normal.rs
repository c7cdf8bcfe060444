//! Standard normal distribution: density, CDF, quantile, and accurate
//! interval probabilities.
//!
//! The CDF is built on the complementary error function, so both tails keep
//! full relative precision down to the subnormal range.

use std::f64::consts::FRAC_1_SQRT_2;

/// 1/sqrt(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density φ(x).
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF Φ(x). Total on the extended reals; NaN propagates.
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), without cancellation for large `x`.
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Inverse of [`cdf`] (Wichura's AS241 rational approximations).
///
/// Returns ∓∞ at 0 and 1 and NaN outside `[0, 1]`.
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&CENTRAL_NUM, r) / poly(&CENTRAL_DEN, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&NEAR_NUM, r) / poly(&NEAR_DEN, r)
    } else {
        r -= 5.0;
        poly(&FAR_NUM, r) / poly(&FAR_DEN, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Φ(b) − Φ(a), accurate in relative terms even when `a` and `b` are close
/// or both deep in a tail. Negative when `b < a`.
pub fn prob_between(a: f64, b: f64) -> f64 {
    if a > b {
        return -prob_between(b, a);
    }
    prob_span(a, b - a)
}

/// Φ(a + w) − Φ(a) for `w ≥ 0` given exactly, so the width carries no
/// rounding from forming `a + w`.
pub fn prob_span(a: f64, w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let b = a + w;
    // log φ changes by roughly w·|x| across the interval; quadrature is exact
    // to double precision while that stays small.
    let spread = w * (1.0 + a.abs().max(b.abs()));
    if spread <= 1e-8 {
        w * pdf(a + 0.5 * w)
    } else if spread <= 2e-2 {
        gauss_legendre(a, w, &GL3_NODES, &GL3_WEIGHTS)
    } else if w <= 1.0 && spread <= 2.0 {
        gauss_legendre(a, w, &GL8_NODES, &GL8_WEIGHTS)
    } else if a >= 0.0 {
        sf(a) - sf(b)
    } else {
        cdf(b) - cdf(a)
    }
}

fn gauss_legendre(a: f64, w: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = 0.5 * w;
    let mid = a + half;
    let mut sum = 0.0;
    for (x, wt) in nodes.iter().zip(weights) {
        if *x == 0.0 {
            sum += wt * pdf(mid);
        } else {
            sum += wt * (pdf(mid - half * x) + pdf(mid + half * x));
        }
    }
    half * sum
}

#[inline]
fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const GL3_NODES: [f64; 2] = [0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 2] = [8.0 / 9.0, 5.0 / 9.0];

const GL8_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

#[allow(clippy::excessive_precision)]
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
#[allow(clippy::excessive_precision)]
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_854_561,
];
#[allow(clippy::excessive_precision)]
const NEAR_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
#[allow(clippy::excessive_precision)]
const NEAR_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const FAR_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const FAR_DEN: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];
