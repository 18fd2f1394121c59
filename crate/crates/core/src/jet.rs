//! Truncated Taylor series ("jets") in one real variable with complex
//! coefficients.
//!
//! Every closed-form function in the crate is evaluated node by node as a jet
//! in `x`, which yields its derivatives up to the jet order to rounding
//! precision. Coefficients are stored in Taylor form, `c[j] = f^(j)(x0) / j!`.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<C64>,
}

impl Jet {
    pub fn constant(value: C64, order: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The independent variable expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Jet::constant(C64::new(x0, 0.0), order);
        if order >= 1 {
            j.c[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_taylor(c: Vec<C64>) -> Self {
        assert!(!c.is_empty(), "jet needs at least one coefficient");
        Jet { c }
    }

    /// Builds a jet from a value followed by its successive derivatives.
    pub fn from_derivatives(d: &[C64]) -> Self {
        let mut fact = 1.0;
        let c = d
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if j > 0 {
                    fact *= j as f64;
                }
                v / fact
            })
            .collect();
        Jet::from_taylor(c)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn taylor(&self) -> &[C64] {
        &self.c
    }

    /// `[f, f', f'', ...]` up to the jet order.
    pub fn derivatives(&self) -> Vec<C64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if j > 0 {
                    fact *= j as f64;
                }
                v * fact
            })
            .collect()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { c: self.c[..=order.min(self.order())].to_vec() }
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_scalar(&self, s: C64) -> Jet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    /// d/dx, one order lower.
    pub fn derivative(&self) -> Jet {
        if self.order() == 0 {
            return Jet::constant(C64::new(0.0, 0.0), 0);
        }
        Jet {
            c: (1..self.c.len()).map(|j| self.c[j] * j as f64).collect(),
        }
    }

    /// Antiderivative with value `c0` at the expansion point, one order higher.
    pub fn integral(&self, c0: C64) -> Jet {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(c0);
        c.extend(self.c.iter().enumerate().map(|(j, v)| v / (j + 1) as f64));
        Jet { c }
    }

    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let inv0 = 1.0 / self.c[0];
        let mut q = vec![C64::new(0.0, 0.0); n];
        q[0] = inv0;
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * q[k - j];
            }
            q[k] = -s * inv0;
        }
        Jet { c: q }
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut g = vec![C64::new(0.0, 0.0); n];
        g[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * g[k - j] * j as f64;
            }
            g[k] = s / k as f64;
        }
        Jet { c: g }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let f0 = self.c[0];
        let mut g = vec![C64::new(0.0, 0.0); n];
        g[0] = f0.ln();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for (j, gj) in g.iter().enumerate().take(k).skip(1) {
                s += gj * self.c[k - j] * j as f64;
            }
            g[k] = (self.c[k] - s / k as f64) / f0;
        }
        Jet { c: g }
    }

    /// `self^w` through the principal logarithm.
    pub fn powc(&self, w: C64) -> Jet {
        self.ln().scale(w).exp()
    }

    pub fn cosh(&self) -> Jet {
        let ep = self.exp();
        let em = (-self).exp();
        (&ep + &em).scale(C64::new(0.5, 0.0))
    }

    pub fn sinh(&self) -> Jet {
        let ep = self.exp();
        let em = (-self).exp();
        (&ep - &em).scale(C64::new(0.5, 0.0))
    }

    pub fn sech(&self) -> Jet {
        self.cosh().recip()
    }

    pub fn tanh(&self) -> Jet {
        let ep = self.exp();
        let em = (-self).exp();
        &(&ep - &em) * &(&ep + &em).recip()
    }

    /// Gudermannian of the jet, using gd' = sech.
    pub fn gd(&self) -> Jet {
        let v = gd_complex(self.c[0]);
        if self.order() == 0 {
            return Jet::constant(v, 0);
        }
        let inner = self.truncate(self.order() - 1);
        let rate = &inner.sech() * &self.derivative();
        rate.integral(v)
    }
}

fn gd_complex(z: C64) -> C64 {
    (z * 0.5).tanh().atan() * 2.0
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|v| -v).collect() }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet { c: (0..n).map(|j| self.c[j] + rhs.c[j]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        Jet { c: (0..n).map(|j| self.c[j] - rhs.c[j]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Jet { c }
    }
}
