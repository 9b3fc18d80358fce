//! Double-double arithmetic for the two summation paths whose cancellation
//! exceeds f64: the terminating Gauss sum at argument 2 (term magnitudes run
//! ~1e19 above the result near degree 40) and the confluent-series state
//! construction, which convolves two such series. Everything here is built
//! from error-free transforms (TwoSum, Dekker's product) so it does not rely
//! on FMA hardware. Inputs and outputs are plain f64 pairs.

use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires |a| >= |b|.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

fn split(a: f64) -> (f64, f64) {
    let c = SPLITTER * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = (r.hi + r.lo) / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = (r.hi + r.lo) / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::new(q3))
    }

    pub fn scale(self, f: f64) -> Dd {
        self.mul(Dd::new(f))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::default();
        }
        let x = self.hi.sqrt();
        let (p1, p2) = two_prod(x, x);
        let err = self.sub(Dd { hi: p1, lo: p2 });
        let corr = err.to_f64() / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Dd { hi, lo }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub fn new(re: f64, im: f64) -> Self {
        Cdd {
            re: Dd::new(re),
            im: Dd::new(im),
        }
    }

    pub fn from_c64(z: C64) -> Self {
        Cdd::new(z.re, z.im)
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn zero() -> Self {
        Cdd::default()
    }

    pub fn one() -> Self {
        Cdd::new(1.0, 0.0)
    }

    pub fn neg(self) -> Self {
        Cdd {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(self) -> Self {
        Cdd {
            re: self.re,
            im: self.im.neg(),
        }
    }

    /// Multiplication by the imaginary unit, exact.
    pub fn mul_i(self) -> Self {
        Cdd {
            re: self.im.neg(),
            im: self.re,
        }
    }

    pub fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.re.lo == 0.0 && self.im.hi == 0.0 && self.im.lo == 0.0
    }

    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: Cdd) -> Cdd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: Cdd) -> Cdd {
        let den = o.norm_sqr();
        let num = self.mul(o.conj());
        Cdd {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }

    pub fn scale_dd(self, d: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(d),
            im: self.im.mul(d),
        }
    }

    pub fn scale(self, f: f64) -> Cdd {
        Cdd {
            re: self.re.scale(f),
            im: self.im.scale(f),
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    /// Principal square root, branch-compatible with `Complex64::sqrt`.
    pub fn sqrt(self) -> Cdd {
        let re_val = self.re.to_f64();
        let im_val = self.im.to_f64();
        if re_val == 0.0 && im_val == 0.0 && self.re.hi == 0.0 && self.im.hi == 0.0 {
            return Cdd::zero();
        }
        let m = self.norm_sqr().sqrt();
        let im_negative = if im_val != 0.0 {
            im_val < 0.0
        } else {
            self.im.hi.is_sign_negative()
        };
        if re_val >= 0.0 {
            let t = m.add(self.re).scale(0.5).sqrt();
            Cdd {
                re: t,
                im: self.im.div(t.scale(2.0)),
            }
        } else {
            let t = m.sub(self.re).scale(0.5).sqrt();
            let v = if im_negative { t.neg() } else { t };
            Cdd {
                re: self.im.div(v.scale(2.0)),
                im: v,
            }
        }
    }
}
