//! Toeplitz and Hankel application to long vectors with certified output tails.

use crate::error::Result;
use crate::fft;
use crate::symbol::{CoeffVector, Side, Symbol};
use crate::C64;

/// Products below this many multiply-adds run directly.
const DIRECT_WORK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Toeplitz,
    Hankel,
}

#[derive(Debug, Clone)]
enum Plan {
    Direct(Vec<C64>),
    Fft { size: usize, kernel_hat: Vec<C64> },
}

/// `T_f` or `H_f` from degrees `0..in_len` to degrees `0..out_len`, prepared once and
/// applied to many vectors (the coefficient kernel depends only on the two lengths).
#[derive(Debug, Clone)]
pub struct LongOperator {
    kind: Kind,
    in_len: usize,
    out_len: usize,
    plan: Plan,
    sup: f64,
    approx: f64,
    /// `tail_weight[k]`: ℓ² norm of column `k` below row `out_len`.
    tail_weight: Vec<f64>,
}

impl LongOperator {
    pub fn new(kind: Kind, f: &Symbol, in_len: usize, out_len: usize) -> Result<Self> {
        f.require_certifiable()?;
        assert!(in_len >= 1 && out_len >= 1);
        if kind == Kind::Toeplitz {
            assert!(out_len >= in_len, "Toeplitz output window must cover the input window");
        }
        let klen = out_len + in_len - 1;
        // Toeplitz: kernel[i] = ĉ(i - (in_len - 1)); Hankel: kernel[i] = ĉ(-i - 1) against reversed input.
        let kernel = match kind {
            Kind::Toeplitz => f.coeff_range(-(in_len as i64 - 1), klen),
            Kind::Hankel => {
                let mut k = f.coeff_range(-(klen as i64), klen);
                k.reverse();
                k
            }
        };
        let plan = if in_len.saturating_mul(out_len) <= DIRECT_WORK {
            Plan::Direct(kernel)
        } else {
            let size = klen.next_power_of_two();
            let mut kernel_hat = vec![C64::new(0.0, 0.0); size];
            kernel_hat[..klen].copy_from_slice(&kernel);
            fft::plans(size).0.process(&mut kernel_hat);
            Plan::Fft { size, kernel_hat }
        };
        let tail_weight = (0..in_len)
            .map(|k| {
                match kind {
                    Kind::Toeplitz => f.l2_tail_sq(Side::Pos, (out_len - k) as u64),
                    Kind::Hankel => f.l2_tail_sq(Side::Neg, (out_len + k + 1) as u64),
                }
                .sqrt()
            })
            .collect();
        Ok(Self { kind, in_len, out_len, plan, sup: f.sup_norm_bound(), approx: f.approx_error(), tail_weight })
    }

    pub fn toeplitz(f: &Symbol, in_len: usize, out_len: usize) -> Result<Self> {
        Self::new(Kind::Toeplitz, f, in_len, out_len)
    }

    pub fn hankel(f: &Symbol, in_len: usize, out_len: usize) -> Result<Self> {
        Self::new(Kind::Hankel, f, in_len, out_len)
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    /// Applies the operator. Entries of `v` beyond `in_len` are moved into its tail first.
    ///
    /// Output tail: `‖f‖∞·tail(v) + approx_error·‖v‖ + Σ_k |v_k|·tail_weight[k]`.
    pub fn apply(&self, v: &CoeffVector) -> CoeffVector {
        let v = if v.len() > self.in_len { v.window(self.in_len) } else { v.clone() };
        let l = self.in_len;
        let mut input = v.entries.clone();
        input.resize(l, C64::new(0.0, 0.0));
        if self.kind == Kind::Hankel {
            input.reverse();
        }
        let out = match &self.plan {
            Plan::Direct(kernel) => fft::sliding_product(kernel, &input, self.out_len),
            Plan::Fft { size, kernel_hat } => {
                let (fwd, inv) = fft::plans(*size);
                let mut buf = vec![C64::new(0.0, 0.0); *size];
                buf[..l].copy_from_slice(&input);
                fwd.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(kernel_hat) {
                    *b *= k;
                }
                inv.process(&mut buf);
                let scale = 1.0 / *size as f64;
                buf[l - 1..l - 1 + self.out_len].iter().map(|x| x * scale).collect()
            }
        };
        let spill: f64 = v.entries.iter().zip(&self.tail_weight).map(|(x, w)| x.norm() * w).sum();
        let tail = self.sup * v.tail_bound + self.approx * v.norm() + spill;
        CoeffVector::new(out, tail)
    }
}

/// One-shot `T_f v` with `out_len` output degrees.
pub fn toeplitz_apply(f: &Symbol, v: &CoeffVector, out_len: usize) -> Result<CoeffVector> {
    Ok(LongOperator::toeplitz(f, v.len().max(1), out_len.max(v.len()))?.apply(v))
}

/// One-shot `H_f v` with `out_len` output degrees.
pub fn hankel_apply(f: &Symbol, v: &CoeffVector, out_len: usize) -> Result<CoeffVector> {
    Ok(LongOperator::hankel(f, v.len().max(1), out_len)?.apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{kernel_vector, DiskPoint, Laurent};

    #[test]
    fn hankel_of_zbar_on_kernel() {
        let k = kernel_vector(DiskPoint::new(C64::new(0.8, 0.0)).unwrap(), 1e-14);
        let out = hankel_apply(&Symbol::zbar(), &k, 40).unwrap();
        assert!((out.entries[0] - C64::new(0.6, 0.0)).norm() < 1e-15);
        assert!(out.entries[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn direct_and_fft_plans_agree() {
        let f = Symbol::arc(0.4, 2.0).unwrap().add(&Symbol::polynomial(Laurent::new(-2, vec![C64::new(1.0, 1.0); 5])));
        let v =
            CoeffVector::exact((0..300).map(|i| C64::new((i as f64 * 0.37).sin(), 1.0 / (1.0 + i as f64))).collect());
        for kind in [Kind::Toeplitz, Kind::Hankel] {
            let big = LongOperator::new(kind, &f, 300, 600).unwrap().apply(&v);
            // Dense oracle straight from coefficients.
            for m in [0usize, 7, 299, 599] {
                let direct: C64 = (0..300)
                    .map(|k| {
                        let n = match kind {
                            Kind::Toeplitz => m as i64 - k as i64,
                            Kind::Hankel => -(m as i64) - k as i64 - 1,
                        };
                        f.coeff(n) * v.entries[k]
                    })
                    .sum();
                assert!((direct - big.entries[m]).norm() < 1e-12, "{kind:?} m={m}");
            }
        }
    }

    #[test]
    fn tail_bound_covers_discarded_rows() {
        let f = Symbol::arc(-0.5, 0.5).unwrap();
        let k = kernel_vector(DiskPoint::polar(0.9, 0.5).unwrap(), 1e-12);
        let short = hankel_apply(&f, &k, k.len()).unwrap();
        let long = hankel_apply(&f, &k, 40 * k.len()).unwrap();
        let missing = long.entries[k.len()..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(missing <= short.tail_bound);
    }
}
