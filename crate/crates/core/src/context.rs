use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::point::Scalar;

/// Golden ratio, the growth rate of the Fibonacci exponents.
pub const BETA: f64 = 1.618_033_988_749_895;

/// Largest index whose Fibonacci number fits a `u32` exponent.
pub const FIB_MAX_INDEX: usize = 46;

/// Fibonacci numbers with `F_0 = F_1 = 1`, indices `0..=FIB_MAX_INDEX`.
pub fn fibonacci_table() -> Vec<u32> {
    let mut t = vec![1u32, 1];
    while t.len() <= FIB_MAX_INDEX {
        let n = t.len();
        t.push(t[n - 1] + t[n - 2]);
    }
    t
}

/// `F_n` for `n >= -2`, where `F_{-1} = 0` and `F_{-2} = 1`.
pub fn fib(n: i64) -> Option<u32> {
    match n {
        -2 => Some(1),
        -1 => Some(0),
        n if n >= 0 && (n as usize) <= FIB_MAX_INDEX => {
            let (mut a, mut b) = (1u32, 1u32);
            for _ in 0..n {
                let next = a.checked_add(b)?;
                a = b;
                b = next;
            }
            Some(a)
        }
        _ => None,
    }
}

/// The parameter of the map together with a few constants derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamContext {
    pub c: Complex64,
    pub is_real: bool,
    pub beta: f64,
    fib: Vec<u32>,
}

impl ParamContext {
    pub fn new(c: Complex64) -> Self {
        ParamContext {
            c,
            is_real: c.im == 0.0,
            beta: BETA,
            fib: fibonacci_table(),
        }
    }

    pub fn real(c: f64) -> Self {
        Self::new(Complex64::new(c, 0.0))
    }

    /// The parameter in the scalar field `T`.
    pub fn param<T: Scalar>(&self) -> Result<T> {
        T::from_complex(self.c).ok_or(Error::NonRealParameter {
            re: self.c.re,
            im: self.c.im,
        })
    }

    /// The parameter as a real number.
    pub fn real_c(&self) -> Result<f64> {
        self.param::<f64>()
    }

    pub fn fibonacci(&self) -> &[u32] {
        &self.fib
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_is_the_golden_ratio() {
        let b = BETA;
        assert!((b * b - (b + 1.0)).abs() <= 4.0 * f64::EPSILON * b * b);
        assert_eq!(b, (1.0 + 5f64.sqrt()) / 2.0);
    }

    #[test]
    fn fibonacci_recurrence_and_cap() {
        let t = fibonacci_table();
        assert_eq!(t.len(), FIB_MAX_INDEX + 1);
        assert_eq!(&t[..8], &[1, 1, 2, 3, 5, 8, 13, 21]);
        for n in 2..t.len() {
            assert_eq!(t[n], t[n - 1] + t[n - 2]);
        }
        assert_eq!(t[FIB_MAX_INDEX], 2_971_215_073);
        assert!((t[FIB_MAX_INDEX] as u64 + t[FIB_MAX_INDEX - 1] as u64) > u32::MAX as u64);
        assert_eq!(fib(-1), Some(0));
        assert_eq!(fib(-2), Some(1));
        assert_eq!(fib(10), Some(89));
        assert_eq!(fib(47), None);
    }

    #[test]
    fn real_context_rejects_complex_parameter() {
        let ctx = ParamContext::new(Complex64::new(0.1, 0.2));
        assert!(!ctx.is_real);
        assert!(matches!(ctx.real_c(), Err(Error::NonRealParameter { .. })));
        assert_eq!(ParamContext::real(0.2).real_c(), Ok(0.2));
    }
}
