use crate::error::{Error, Result};

/// Largest modulus we allow, so that sums of two residues and the `u128`
/// product path never overflow.
const MAX_MODULUS: u64 = 1 << 62;

/// The working ring `W[[t]] / (p^N, t^(M+1))` with `W = Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    p: u64,
    precision: u32,
    truncation: usize,
    modulus: u64,
}

impl PrecisionContext {
    pub const DEFAULT_P: u64 = 3;
    pub const DEFAULT_PRECISION: u32 = 8;
    pub const DEFAULT_TRUNCATION: usize = 32;

    /// Builds a user-facing context: `p` an odd prime, `N >= 2`.
    pub fn new(p: u64, precision: u32, truncation: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} is not an odd prime")));
        }
        if precision < 2 {
            return Err(Error::InvalidContext(format!(
                "precision N = {precision} must be at least 2"
            )));
        }
        Self::build(p, precision, truncation)
    }

    fn build(p: u64, precision: u32, truncation: usize) -> Result<Self> {
        let mut modulus: u64 = 1;
        for _ in 0..precision {
            modulus = modulus
                .checked_mul(p)
                .filter(|m| *m <= MAX_MODULUS)
                .ok_or_else(|| {
                    Error::InvalidContext(format!("p^N = {p}^{precision} does not fit in 62 bits"))
                })?;
        }
        Ok(Self {
            p,
            precision,
            truncation,
            modulus,
        })
    }

    /// Same prime and truncation at a different p-adic precision. Reduced
    /// precisions produced by integration or division may drop to 1.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::PrecisionExhausted {
                needed: 1,
                available: 0,
            });
        }
        Self::build(self.p, precision, self.truncation)
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        Self { truncation, ..*self }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `N`: values are residues modulo `p^N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `M`: series are truncated above `t^M`.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^k mod p^N`.
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.precision {
            0
        } else {
            self.p.pow(k)
        }
    }

    /// Number of series coefficients, `M + 1`.
    pub fn len(&self) -> usize {
        self.truncation + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// p-adic valuation of a positive integer.
    pub fn vp(&self, mut n: u64) -> u32 {
        debug_assert!(n > 0);
        let mut v = 0;
        while n.is_multiple_of(self.p) {
            n /= self.p;
            v += 1;
        }
        v
    }

    /// Largest degree `d` with `d * p <= M`; below it `phi^*` is injective mod p.
    pub fn frobenius_window(&self) -> usize {
        self.truncation / self.p as usize
    }

    /// Reduces an arbitrary integer to its canonical representative.
    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    /// Balanced lift of a residue into `(-p^N/2, p^N/2]`.
    pub fn balanced(&self, x: u64) -> i128 {
        if x > self.modulus / 2 {
            x as i128 - self.modulus as i128
        } else {
            x as i128
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(
            Self::DEFAULT_P,
            Self::DEFAULT_PRECISION,
            Self::DEFAULT_TRUNCATION,
        )
        .expect("default context is valid")
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
