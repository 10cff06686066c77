//! Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1 (0x11B).

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

const POLY: u16 = 0x11B;
/// 0x03 generates the multiplicative group for this modulus (0x02 does not).
const GENERATOR: u8 = 0x03;

const fn mul_slow(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= (POLY & 0xFF) as u8;
        }
        b >>= 1;
    }
    acc
}

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x = 1u8;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        log[x as usize] = i as u8;
        x = mul_slow(x, GENERATOR);
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
const EXP: [u8; 512] = TABLES.0;
const LOG: [u8; 256] = TABLES.1;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    pub fn inv(self) -> Option<Gf256> {
        if self.0 == 0 {
            return None;
        }
        Some(Gf256(EXP[255 - LOG[self.0 as usize] as usize]))
    }

    pub fn pow(self, e: usize) -> Gf256 {
        if e == 0 {
            return Gf256::ONE;
        }
        if self.0 == 0 {
            return Gf256::ZERO;
        }
        let l = LOG[self.0 as usize] as usize * (e % 255);
        Gf256(EXP[l % 255])
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        Gf256(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inv().expect("division by zero in GF(256)")
    }
}

/// `dst[i] += c * src[i]` bytewise.
pub fn mul_add_slice(dst: &mut [u8], src: &[u8], c: Gf256) {
    match c.0 {
        0 => {}
        1 => {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d ^= s;
            }
        }
        _ if src.len() < 256 => {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d ^= (Gf256(s) * c).0;
            }
        }
        _ => {
            let row = mul_row(c);
            for (d, &s) in dst.iter_mut().zip(src) {
                *d ^= row[s as usize];
            }
        }
    }
}

/// `[c * x for x in 0..256]`.
fn mul_row(c: Gf256) -> [u8; 256] {
    let mut row = [0u8; 256];
    let lc = LOG[c.0 as usize] as usize;
    for (x, out) in row.iter_mut().enumerate().skip(1) {
        *out = EXP[lc + LOG[x] as usize];
    }
    row
}
