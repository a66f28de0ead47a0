//! Numeric backend for shares, accuracies and ratios.
//!
//! Reports are generic over [`Scalar`] so the same code runs in exact rational
//! arithmetic (the default for rendering) or plain floats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// `num / den`; `den` must be non-zero.
    fn from_counts(num: u64, den: u64) -> Self;

    /// Nearest value to a decimal literal such as `0.9798`.
    fn from_decimal(value: f64) -> Self;

    fn as_f64(&self) -> f64;

    /// Decimal rendering rounded half away from zero.
    fn render(&self, decimals: u32) -> String;

    /// Decimal rendering truncated toward zero.
    fn render_truncated(&self, decimals: u32) -> String;

    fn ratio(num: Self, den: Self) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(num / den)
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_counts(num: u64, den: u64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn from_decimal(value: f64) -> Self {
                value as $t
            }

            fn as_f64(&self) -> f64 {
                f64::from(*self)
            }

            fn render(&self, decimals: u32) -> String {
                let scale = 10f64.powi(decimals as i32);
                let v = (f64::from(*self) * scale).round() / scale;
                format!("{:.*}", decimals as usize, v)
            }

            fn render_truncated(&self, decimals: u32) -> String {
                let scale = 10f64.powi(decimals as i32);
                let v = (f64::from(*self) * scale).trunc() / scale;
                format!("{:.*}", decimals as usize, v)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl<T> Scalar for Ratio<T>
where
    T: Integer + Signed + Clone + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static + std::fmt::Display,
    Ratio<T>: ToPrimitive,
{
    fn from_counts(num: u64, den: u64) -> Self {
        let n = T::from_u64(num).expect("count fits the integer type");
        let d = T::from_u64(den).expect("count fits the integer type");
        Ratio::new(n, d)
    }

    /// Parses the shortest decimal representation of `value`, so `0.9798`
    /// becomes exactly 9798/10000.
    fn from_decimal(value: f64) -> Self {
        let text = format!("{value}");
        let (neg, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        let ten = T::from_u8(10).expect("10 fits");
        let mut num = T::zero();
        for c in int_part.chars().chain(frac_part.chars()) {
            let d = T::from_u32(c.to_digit(10).expect("finite decimal")).expect("digit fits");
            num = num * ten.clone() + d;
        }
        let mut den = T::one();
        for _ in 0..frac_part.len() {
            den = den * ten.clone();
        }
        let r = Ratio::new(num, den);
        if neg {
            -r
        } else {
            r
        }
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn render(&self, decimals: u32) -> String {
        render_ratio(self, decimals, true)
    }

    fn render_truncated(&self, decimals: u32) -> String {
        render_ratio(self, decimals, false)
    }
}

fn render_ratio<T>(value: &Ratio<T>, decimals: u32, round: bool) -> String
where
    T: Integer + Signed + Clone + FromPrimitive + std::fmt::Display,
{
    let ten = T::from_u8(10).expect("10 fits");
    let mut scale = T::one();
    for _ in 0..decimals {
        scale = scale * ten.clone();
    }
    let neg = value.is_negative();
    let abs = value.abs();
    let scaled = abs * Ratio::from_integer(scale.clone());
    let units = if round {
        let half = Ratio::new(T::one(), T::one() + T::one());
        (scaled + half).floor().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let (whole, frac) = units.div_rem(&scale);
    let sign = if neg && !units.is_zero() { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{whole}")
    } else {
        let frac = frac.to_string();
        let pad = "0".repeat(decimals as usize - frac.len());
        format!("{sign}{whole}.{pad}{frac}")
    }
}

/// Exact rational used by default throughout reports.
pub type ExactRatio = Ratio<i64>;

/// Arbitrary-precision rational for very large corpora.
pub type BigRatio = Ratio<BigInt>;
