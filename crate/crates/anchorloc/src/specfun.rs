//! Modified Bessel functions of the first kind and the variance of the
//! distance to a Gaussian-perturbed point (a Rice-distributed quantity).
//!
//! The Bessel evaluation follows the classic Cephes scheme: a Chebyshev
//! expansion of the exponentially scaled function on `|x| <= 8` and a second
//! expansion in `32/|x| - 2` beyond that. The scaled variants
//! [`bessel_i0_scaled`] / [`bessel_i1_scaled`] never overflow and are what
//! [`laguerre_half`] is built on, so the weighting math stays finite even for
//! arguments like `z = -650` where `exp(-z/2)` alone would be astronomically
//! large.

use std::fmt;

/// Error type for the special-function surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecFunError {
    /// The unscaled Bessel value exceeds the double-precision range.
    Overflow { x: f64 },
    /// Argument outside the function's domain.
    Domain { arg: f64, expected: &'static str },
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Overflow { x } => {
                write!(f, "bessel argument {x} overflows the unscaled value")
            }
            SpecFunError::Domain { arg, expected } => {
                write!(f, "argument {arg} outside domain ({expected})")
            }
        }
    }
}

impl std::error::Error for SpecFunError {}

/// Largest `|x|` for which `exp(|x|)` (and hence I0, I1) stays finite.
const MAX_UNSCALED_ARG: f64 = 709.78;

#[allow(clippy::excessive_precision)]
const I0_SMALL: [f64; 30] = [
    -4.415_341_646_479_339_5E-18,
    3.330_794_518_822_238_4E-17,
    -2.431_279_846_547_955E-16,
    1.715_391_285_555_133E-15,
    -1.168_533_287_799_345_1E-14,
    7.676_185_498_604_936E-14,
    -4.856_446_783_111_929E-13,
    2.955_052_663_129_64E-12,
    -1.726_826_291_441_556E-11,
    9.675_809_035_373_237E-11,
    -5.189_795_601_635_263E-10,
    2.659_823_724_682_386_6E-9,
    -1.300_025_009_986_248E-8,
    6.046_995_022_541_919E-8,
    -2.670_793_853_940_612E-7,
    1.117_387_539_120_103_7E-6,
    -4.416_738_358_458_750_5E-6,
    1.644_844_807_072_889_6E-5,
    -5.754_195_010_082_104E-5,
    1.885_028_850_958_416_5E-4,
    -5.763_755_745_385_824E-4,
    1.639_475_616_941_335_7E-3,
    -4.324_309_995_050_576E-3,
    1.054_646_039_459_499_8E-2,
    -2.373_741_480_589_947E-2,
    4.930_528_423_967_071E-2,
    -9.490_109_704_804_764E-2,
    1.716_209_015_222_087_7E-1,
    -3.046_826_723_431_984E-1,
    6.767_952_744_094_761E-1,
];

#[allow(clippy::excessive_precision)]
const I0_LARGE: [f64; 25] = [
    -7.233_180_487_874_754E-18,
    -4.830_504_485_944_182E-18,
    4.465_621_420_296_76E-17,
    3.461_222_867_697_461E-17,
    -2.827_623_980_516_583_6E-16,
    -3.425_485_619_677_219E-16,
    1.772_560_133_056_526_3E-15,
    3.811_680_669_352_622_4E-15,
    -9.554_846_698_828_307E-15,
    -4.150_569_347_287_222E-14,
    1.540_086_217_521_41E-14,
    3.852_778_382_742_142_6E-13,
    7.180_124_451_383_666E-13,
    -1.794_178_531_506_806_2E-12,
    -1.321_581_184_044_771_3E-11,
    -3.149_916_527_963_241_6E-11,
    1.188_914_710_784_643_9E-11,
    4.940_602_388_224_97E-10,
    3.396_232_025_708_386_5E-9,
    2.266_668_990_498_178E-8,
    2.048_918_589_469_063_8E-7,
    2.891_370_520_834_756_7E-6,
    6.889_758_346_916_825E-5,
    3.369_116_478_255_694_3E-3,
    8.044_904_110_141_088E-1,
];

#[allow(clippy::excessive_precision)]
const I1_SMALL: [f64; 29] = [
    2.777_914_112_761_046_4E-18,
    -2.111_421_214_358_166E-17,
    1.553_631_957_736_200_5E-16,
    -1.105_596_947_735_386_2E-15,
    7.600_684_294_735_408E-15,
    -5.042_185_504_727_912E-14,
    3.223_793_365_945_575E-13,
    -1.983_974_397_764_943_6E-12,
    1.173_618_629_889_090_1E-11,
    -6.663_489_723_502_027E-11,
    3.625_590_281_552_117E-10,
    -1.887_249_751_722_829_4E-9,
    9.381_537_386_495_773E-9,
    -4.445_059_128_796_328E-8,
    2.003_294_753_552_135_3E-7,
    -8.568_720_264_695_455E-7,
    3.470_251_308_137_678_5E-6,
    -1.327_316_365_603_943_6E-5,
    4.781_565_107_550_054E-5,
    -1.617_608_158_258_967_4E-4,
    5.122_859_561_685_758E-4,
    -1.513_572_450_631_253_2E-3,
    4.156_422_944_312_888E-3,
    -1.056_408_489_462_619_7E-2,
    2.472_644_903_062_651_6E-2,
    -5.294_598_120_809_499E-2,
    1.026_436_586_898_471E-1,
    -1.764_165_183_578_340_6E-1,
    2.525_871_864_436_336_5E-1,
];

#[allow(clippy::excessive_precision)]
const I1_LARGE: [f64; 25] = [
    7.51729631084210481353E-18,
    4.41434832307170791151E-18,
    -4.65030536848935832153E-17,
    -3.20952592199342395980E-17,
    2.96262899764595013876E-16,
    3.30820231092092828324E-16,
    -1.88035477551078244854E-15,
    -3.81440307243700780478E-15,
    1.04202769841288027642E-14,
    4.27244001671195135429E-14,
    -2.10154184277266431302E-14,
    -4.08355111109219731823E-13,
    -7.19855177624590851209E-13,
    2.03562854414708950722E-12,
    1.41258074366137813316E-11,
    3.25260358301548823856E-11,
    -1.89749581235054123450E-11,
    -5.58974346219658380687E-10,
    -3.83538038596423702205E-9,
    -2.63146884688951950684E-8,
    -2.51223623787020892529E-7,
    -3.88256480887769039346E-6,
    -1.10588938762623716291E-4,
    -9.76109749136146840777E-3,
    7.78576235018280120474E-1,
];

/// Chebyshev series evaluation via the Clenshaw recurrence.
fn chbevl(x: f64, coeffs: &[f64]) -> f64 {
    let mut b0 = coeffs[0];
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in coeffs.iter().skip(1) {
        b2 = b1;
        b1 = b0;
        b0 = x * b1 - b2 + c;
    }
    0.5 * (b0 - b2)
}

/// Exponentially scaled modified Bessel function `exp(-|x|) * I0(x)`.
///
/// Finite for every finite `x`; even in `x`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 1.0;
    }
    if ax <= 8.0 {
        chbevl(0.5 * ax - 2.0, &I0_SMALL)
    } else {
        chbevl(32.0 / ax - 2.0, &I0_LARGE) / ax.sqrt()
    }
}

/// Exponentially scaled modified Bessel function `exp(-|x|) * I1(x)`.
///
/// Finite for every finite `x`; odd in `x`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    let res = if ax <= 8.0 {
        chbevl(0.5 * ax - 2.0, &I1_SMALL) * ax
    } else {
        chbevl(32.0 / ax - 2.0, &I1_LARGE) / ax.sqrt()
    };
    if x < 0.0 {
        -res
    } else {
        res
    }
}

/// Modified Bessel function of the first kind, order zero.
///
/// Even in `x` and `>= 1` everywhere. Arguments beyond `|x| ~ 709.78` make
/// the unscaled value overflow and are reported as [`SpecFunError::Overflow`];
/// use [`bessel_i0_scaled`] there instead.
pub fn bessel_i0(x: f64) -> Result<f64, SpecFunError> {
    if x.is_nan() {
        return Err(SpecFunError::Domain {
            arg: x,
            expected: "finite argument",
        });
    }
    if x.abs() > MAX_UNSCALED_ARG {
        return Err(SpecFunError::Overflow { x });
    }
    Ok(x.abs().exp() * bessel_i0_scaled(x))
}

/// Modified Bessel function of the first kind, order one. Odd in `x`.
pub fn bessel_i1(x: f64) -> Result<f64, SpecFunError> {
    if x.is_nan() {
        return Err(SpecFunError::Domain {
            arg: x,
            expected: "finite argument",
        });
    }
    if x.abs() > MAX_UNSCALED_ARG {
        return Err(SpecFunError::Overflow { x });
    }
    Ok(x.abs().exp() * bessel_i1_scaled(x))
}

/// The Laguerre function of order one half,
/// `L(z) = exp(z/2) * [(1 - z) I0(-z/2) - z I1(-z/2)]`, for `z <= 0`.
///
/// Written in terms of the scaled Bessel functions so the product never
/// overflows: with `u = -z/2 >= 0`,
/// `L(z) = (1 + 2u) * i0_scaled(u) + 2u * i1_scaled(u)`.
pub fn laguerre_half(z: f64) -> Result<f64, SpecFunError> {
    if z > 0.0 || z.is_nan() {
        return Err(SpecFunError::Domain {
            arg: z,
            expected: "z <= 0",
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let u = -0.5 * z;
    Ok((1.0 + 2.0 * u) * bessel_i0_scaled(u) + 2.0 * u * bessel_i1_scaled(u))
}

/// Ratio of `delta` to `sigma` beyond which the distance variance is `sigma^2`
/// to better than 1e-10 relative; the direct formula loses that much to
/// cancellation there.
const RICE_ASYMPTOTIC_RATIO: f64 = 400.0;

/// Variance of the Euclidean distance to a point displaced by `delta` when
/// both coordinates carry independent `N(0, sigma_a)` noise.
///
/// This is the variance of a Rice-distributed length:
/// `delta^2 + 2 sigma_a^2 - (pi sigma_a^2 / 2) * L(-delta^2 / (2 sigma_a^2))^2`.
/// Returns 0 when `sigma_a = 0` and tends to `sigma_a^2` as
/// `delta / sigma_a` grows.
pub fn rice_variance(delta: f64, sigma_a: f64) -> f64 {
    let delta = delta.abs();
    let sigma_a = sigma_a.abs();
    if sigma_a == 0.0 {
        return 0.0;
    }
    let ratio = delta / sigma_a;
    if ratio >= RICE_ASYMPTOTIC_RATIO {
        return sigma_a * sigma_a;
    }
    let var_a = sigma_a * sigma_a;
    let lag = laguerre_half(-0.5 * ratio * ratio).expect("non-positive argument by construction");
    let var = delta * delta + 2.0 * var_a - std::f64::consts::FRAC_PI_2 * var_a * lag * lag;
    var.max(0.0)
}
