//! Truncated trivariate polynomials over pluggable coefficient rings.
//!
//! The three formal variables track, for a set of auxiliary edges: its total
//! weight (`weight`), its size (`edges`), and how many of its members project
//! to base edges (`cover`). Degrees above the caps are discarded by every
//! operation; the driver only ever reads coefficients at degrees that cannot
//! receive contributions from discarded terms, so truncation is loss-free
//! there.
//!
//! Rings: [`Mod2Pow`] (residues mod `2^M`, `M <= 64`, one machine word),
//! [`Mod2PowWide`] (residues mod `2^M` for any `M`, `ceil(M/64)` words), and
//! [`ExactInt`] (exact signed integers, used by the test oracles).

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("degree caps differ: {0:?} vs {1:?}")]
    CapMismatch(Degrees, Degrees),
    #[error("coefficient rings differ")]
    RingMismatch,
    #[error("coefficient index ({0}, {1}, {2}) is beyond the caps")]
    OutOfCaps(usize, usize, usize),
}

/// A coefficient ring. Elements are plain data; all arithmetic goes through
/// the ring value so that the modulus (when there is one) lives in one place.
pub trait CoefficientRing: Clone + PartialEq + std::fmt::Debug {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)] // the ring value carries the modulus
    fn from_i64(&self, x: i64) -> Self::Elem;
    /// `2^k` as a ring element.
    fn pow2(&self, k: u32) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem);
    fn sub_assign(&self, acc: &mut Self::Elem, x: &Self::Elem);
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    /// `acc += x * y`; the innermost operation of every polynomial routine.
    fn add_mul_assign(&self, acc: &mut Self::Elem, x: &Self::Elem, y: &Self::Elem);
    fn format(&self, x: &Self::Elem) -> String;
}

/// Residues mod `2^bits` stored canonically in `[0, 2^bits)` in one word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Pow {
    bits: u32,
    mask: u64,
}

impl Mod2Pow {
    pub fn new(bits: u32) -> Self {
        assert!((1..=64).contains(&bits), "Mod2Pow supports 1..=64 bits");
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        Mod2Pow { bits, mask }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

impl CoefficientRing for Mod2Pow {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 & self.mask
    }
    fn from_i64(&self, x: i64) -> u64 {
        (x as u64) & self.mask
    }
    fn pow2(&self, k: u32) -> u64 {
        if k >= self.bits {
            0
        } else {
            (1u64 << k) & self.mask
        }
    }
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn add_assign(&self, acc: &mut u64, x: &u64) {
        *acc = acc.wrapping_add(*x) & self.mask;
    }
    fn sub_assign(&self, acc: &mut u64, x: &u64) {
        *acc = acc.wrapping_sub(*x) & self.mask;
    }
    fn neg(&self, x: &u64) -> u64 {
        x.wrapping_neg() & self.mask
    }
    fn mul(&self, x: &u64, y: &u64) -> u64 {
        x.wrapping_mul(*y) & self.mask
    }
    fn add_mul_assign(&self, acc: &mut u64, x: &u64, y: &u64) {
        *acc = acc.wrapping_add(x.wrapping_mul(*y)) & self.mask;
    }
    fn format(&self, x: &u64) -> String {
        x.to_string()
    }
}

/// Residues mod `2^bits` in exactly `ceil(bits/64)` words, little-endian,
/// stored canonically (top word masked). Subtraction wraps in two's
/// complement. Only needed when the modulus exceeds one word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2PowWide {
    bits: u32,
    words: usize,
    top_mask: u64,
}

impl Mod2PowWide {
    pub fn new(bits: u32) -> Self {
        assert!(bits >= 1);
        let words = (bits as usize).div_ceil(64);
        let rem = bits % 64;
        let top_mask = if rem == 0 { u64::MAX } else { (1u64 << rem) - 1 };
        Mod2PowWide { bits, words, top_mask }
    }

    fn mask_top(&self, x: &mut [u64]) {
        if let Some(last) = x.last_mut() {
            *last &= self.top_mask;
        }
    }
}

impl CoefficientRing for Mod2PowWide {
    type Elem = Box<[u64]>;

    fn zero(&self) -> Box<[u64]> {
        vec![0; self.words].into_boxed_slice()
    }
    fn one(&self) -> Box<[u64]> {
        let mut e = self.zero();
        e[0] = 1;
        self.mask_top(&mut e);
        e
    }
    fn from_i64(&self, x: i64) -> Box<[u64]> {
        // Two's complement sign extension gives the right residue mod 2^bits.
        let fill = if x < 0 { u64::MAX } else { 0 };
        let mut e = vec![fill; self.words].into_boxed_slice();
        e[0] = x as u64;
        self.mask_top(&mut e);
        e
    }
    fn pow2(&self, k: u32) -> Box<[u64]> {
        let mut e = self.zero();
        if k < self.bits {
            e[k as usize / 64] = 1u64 << (k % 64);
        }
        e
    }
    fn is_zero(&self, x: &Box<[u64]>) -> bool {
        x.iter().all(|&w| w == 0)
    }
    fn add_assign(&self, acc: &mut Box<[u64]>, x: &Box<[u64]>) {
        let mut carry = false;
        for (a, &b) in acc.iter_mut().zip(x.iter()) {
            let (s, c1) = a.overflowing_add(b);
            let (s, c2) = s.overflowing_add(carry as u64);
            *a = s;
            carry = c1 || c2;
        }
        self.mask_top(acc);
    }
    fn sub_assign(&self, acc: &mut Box<[u64]>, x: &Box<[u64]>) {
        let mut borrow = false;
        for (a, &b) in acc.iter_mut().zip(x.iter()) {
            let (s, c1) = a.overflowing_sub(b);
            let (s, c2) = s.overflowing_sub(borrow as u64);
            *a = s;
            borrow = c1 || c2;
        }
        self.mask_top(acc);
    }
    fn neg(&self, x: &Box<[u64]>) -> Box<[u64]> {
        let mut out = self.zero();
        let mut borrow = false;
        for (o, &b) in out.iter_mut().zip(x.iter()) {
            let (s, c1) = 0u64.overflowing_sub(b);
            let (s, c2) = s.overflowing_sub(borrow as u64);
            *o = s;
            borrow = c1 || c2;
        }
        self.mask_top(&mut out);
        out
    }
    fn mul(&self, x: &Box<[u64]>, y: &Box<[u64]>) -> Box<[u64]> {
        let mut out = self.zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..(self.words - i) {
                let t = (xi as u128) * (y[j] as u128) + (out[i + j] as u128) + carry;
                out[i + j] = t as u64;
                carry = t >> 64;
            }
        }
        self.mask_top(&mut out);
        out
    }
    fn add_mul_assign(&self, acc: &mut Box<[u64]>, x: &Box<[u64]>, y: &Box<[u64]>) {
        let p = self.mul(x, y);
        self.add_assign(acc, &p);
    }
    fn format(&self, x: &Box<[u64]>) -> String {
        // Repeated division by 10^18, little-endian words.
        let mut words: Vec<u64> = x.to_vec();
        let mut chunks: Vec<u64> = Vec::new();
        const BASE: u128 = 1_000_000_000_000_000_000;
        loop {
            let mut rem: u128 = 0;
            let mut any = false;
            for w in words.iter_mut().rev() {
                let cur = (rem << 64) | (*w as u128);
                *w = (cur / BASE) as u64;
                rem = cur % BASE;
                any |= *w != 0;
            }
            chunks.push(rem as u64);
            if !any {
                break;
            }
        }
        let mut out = chunks.pop().unwrap().to_string();
        for chunk in chunks.iter().rev() {
            let _ = write!(out, "{chunk:018}");
        }
        out
    }
}

/// Exact signed integers. Arithmetic is checked: desk-scale inputs stay far
/// inside `i128`, and anything bigger should fail loudly rather than wrap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactInt;

impl CoefficientRing for ExactInt {
    type Elem = i128;

    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn from_i64(&self, x: i64) -> i128 {
        x as i128
    }
    fn pow2(&self, k: u32) -> i128 {
        1i128.checked_shl(k).expect("2^k overflows the exact coefficient ring")
    }
    fn is_zero(&self, x: &i128) -> bool {
        *x == 0
    }
    fn add_assign(&self, acc: &mut i128, x: &i128) {
        *acc = acc.checked_add(*x).expect("overflow in the exact coefficient ring");
    }
    fn sub_assign(&self, acc: &mut i128, x: &i128) {
        *acc = acc.checked_sub(*x).expect("overflow in the exact coefficient ring");
    }
    fn neg(&self, x: &i128) -> i128 {
        x.checked_neg().expect("overflow in the exact coefficient ring")
    }
    fn mul(&self, x: &i128, y: &i128) -> i128 {
        x.checked_mul(*y).expect("overflow in the exact coefficient ring")
    }
    fn add_mul_assign(&self, acc: &mut i128, x: &i128, y: &i128) {
        let p = self.mul(x, y);
        self.add_assign(acc, &p);
    }
    fn format(&self, x: &i128) -> String {
        x.to_string()
    }
}

/// Maximum retained degrees per variable (inclusive).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub weight: usize,
    pub edges: usize,
    pub cover: usize,
}

impl Degrees {
    pub fn new(weight: usize, edges: usize, cover: usize) -> Self {
        Degrees { weight, edges, cover }
    }

    fn max(self, o: Degrees) -> Degrees {
        Degrees::new(
            self.weight.max(o.weight),
            self.edges.max(o.edges),
            self.cover.max(o.cover),
        )
    }

    fn min(self, o: Degrees) -> Degrees {
        Degrees::new(
            self.weight.min(o.weight),
            self.edges.min(o.edges),
            self.cover.min(o.cover),
        )
    }

    fn fits_in(self, caps: Degrees) -> bool {
        self.weight <= caps.weight && self.edges <= caps.edges && self.cover <= caps.cover
    }
}

/// Dense truncated polynomial in three variables.
///
/// Storage is plane-major: for each `(edges, cover)` pair a contiguous run of
/// `weight` coefficients, which keeps the inner loops of all products
/// branch-free. `deg` is a tracked upper bound on the nonzero support and
/// `plane_len[p]` bounds the nonzero prefix of each plane (weight degrees
/// pile up with the cover degree, so most planes are far shorter than the
/// overall box); data beyond these bounds is always zero.
#[derive(Clone, Debug)]
pub struct TruncatedPoly3<R: CoefficientRing> {
    ring: R,
    caps: Degrees,
    deg: Degrees,
    plane_len: Vec<u32>,
    data: Vec<R::Elem>,
}

impl<R: CoefficientRing> PartialEq for TruncatedPoly3<R> {
    fn eq(&self, other: &Self) -> bool {
        // `deg` may overestimate support, so compare values only.
        self.ring == other.ring && self.caps == other.caps && self.data == other.data
    }
}

impl<R: CoefficientRing> TruncatedPoly3<R> {
    pub fn zero(ring: R, caps: Degrees) -> Self {
        let planes = (caps.edges + 1) * (caps.cover + 1);
        let data = vec![ring.zero(); (caps.weight + 1) * planes];
        TruncatedPoly3 {
            ring,
            caps,
            deg: Degrees::new(0, 0, 0),
            plane_len: vec![0; planes],
            data,
        }
    }

    pub fn one(ring: R, caps: Degrees) -> Self {
        let one = ring.one();
        Self::monomial(ring, caps, 0, 0, 0, one)
    }

    /// `coeff * weight^a edges^b cover^c`, or the zero polynomial when the
    /// monomial exceeds the caps.
    pub fn monomial(ring: R, caps: Degrees, a: usize, b: usize, c: usize, coeff: R::Elem) -> Self {
        let mut p = Self::zero(ring, caps);
        if Degrees::new(a, b, c).fits_in(caps) && !p.ring.is_zero(&coeff) {
            let idx = p.index(a, b, c);
            p.data[idx] = coeff;
            p.deg = Degrees::new(a, b, c);
            p.plane_len[b * (caps.cover + 1) + c] = a as u32 + 1;
        }
        p
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn caps(&self) -> Degrees {
        self.caps
    }

    /// Tracked upper bound on the nonzero support.
    pub fn tracked_degrees(&self) -> Degrees {
        self.deg
    }

    fn stride(&self) -> usize {
        self.caps.weight + 1
    }

    fn plane(&self, b: usize, c: usize) -> usize {
        b * (self.caps.cover + 1) + c
    }

    fn index(&self, a: usize, b: usize, c: usize) -> usize {
        self.plane(b, c) * self.stride() + a
    }

    fn plane_range(&self, b: usize, c: usize) -> std::ops::Range<usize> {
        let start = self.index(0, b, c);
        start..start + self.stride()
    }

    /// The coefficient at `(a, b, c)`; an error beyond the caps.
    pub fn coeff(&self, a: usize, b: usize, c: usize) -> Result<R::Elem, PolyError> {
        if !Degrees::new(a, b, c).fits_in(self.caps) {
            return Err(PolyError::OutOfCaps(a, b, c));
        }
        Ok(self.data[self.index(a, b, c)].clone())
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch);
        }
        if self.caps != other.caps {
            return Err(PolyError::CapMismatch(self.caps, other.caps));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        let one = self.ring.one();
        out.add_assign_scaled(other, &one);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        let minus_one = self.ring.from_i64(-1);
        out.add_assign_scaled(other, &minus_one);
        Ok(out)
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        let mut out = self.clone();
        out.scale_in_place(s);
        out
    }

    /// Ring convolution with truncation at the caps.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.caps);
        let caps = self.caps;
        for b1 in 0..=self.deg.edges {
            for c1 in 0..=self.deg.cover {
                let l1 = self.plane_len[self.plane(b1, c1)] as usize;
                if l1 == 0 {
                    continue;
                }
                let src1 = &self.data[self.plane_range(b1, c1)];
                let b2_max = other.deg.edges.min(caps.edges - b1);
                let c2_max = other.deg.cover.min(caps.cover - c1);
                for b2 in 0..=b2_max {
                    for c2 in 0..=c2_max {
                        let l2 = other.plane_len[other.plane(b2, c2)] as usize;
                        if l2 == 0 {
                            continue;
                        }
                        let r2 = other.plane_range(b2, c2);
                        let dst_plane = out.plane(b1 + b2, c1 + c2);
                        let dst_start = out.plane_range(b1 + b2, c1 + c2).start;
                        let dst_len = (l1 + l2 - 1).min(caps.weight + 1);
                        out.plane_len[dst_plane] = out.plane_len[dst_plane].max(dst_len as u32);
                        for a1 in 0..l1 {
                            if self.ring.is_zero(&src1[a1]) {
                                continue;
                            }
                            let x = src1[a1].clone();
                            let a2_max = (l2 - 1).min(caps.weight - a1);
                            for a2 in 0..=a2_max {
                                let y = &other.data[r2.start + a2];
                                if self.ring.is_zero(y) {
                                    continue;
                                }
                                let idx = dst_start + a1 + a2;
                                self.ring.add_mul_assign(&mut out.data[idx], &x, y);
                            }
                        }
                    }
                }
            }
        }
        out.deg = Degrees::new(
            self.deg.weight + other.deg.weight,
            self.deg.edges + other.deg.edges,
            self.deg.cover + other.deg.cover,
        )
        .min(caps);
        Ok(out)
    }

    /// Projection onto (possibly smaller) caps; a ring homomorphism onto the
    /// quotient.
    pub fn truncated(&self, caps: Degrees) -> Self {
        let mut out = Self::zero(self.ring.clone(), caps);
        let lim = self.deg.min(caps);
        for b in 0..=lim.edges {
            for c in 0..=lim.cover {
                let l = (self.plane_len[self.plane(b, c)] as usize).min(caps.weight + 1);
                if l == 0 {
                    continue;
                }
                let src = self.plane_range(b, c);
                let dst = out.plane_range(b, c);
                let dst_plane = out.plane(b, c);
                out.data[dst.start..dst.start + l]
                    .clone_from_slice(&self.data[src.start..src.start + l]);
                out.plane_len[dst_plane] = l as u32;
            }
        }
        out.deg = lim;
        out
    }

    /// `self += s * other`; caps and ring must match (checked in debug).
    pub(crate) fn add_assign_scaled(&mut self, other: &Self, s: &R::Elem) {
        debug_assert!(self.check_compatible(other).is_ok());
        for b in 0..=other.deg.edges {
            for c in 0..=other.deg.cover {
                let p = other.plane(b, c);
                let l = other.plane_len[p] as usize;
                if l == 0 {
                    continue;
                }
                self.plane_len[p] = self.plane_len[p].max(l as u32);
                let src = other.plane_range(b, c);
                let dst = self.plane_range(b, c);
                for a in 0..l {
                    let x = &other.data[src.start + a];
                    self.ring.add_mul_assign(&mut self.data[dst.start + a], x, s);
                }
            }
        }
        self.deg = self.deg.max(other.deg);
    }

    pub(crate) fn scale_in_place(&mut self, s: &R::Elem) {
        for b in 0..=self.deg.edges {
            for c in 0..=self.deg.cover {
                let l = self.plane_len[self.plane(b, c)] as usize;
                let r = self.plane_range(b, c);
                for a in 0..l {
                    let v = self.ring.mul(&self.data[r.start + a], s);
                    self.data[r.start + a] = v;
                }
            }
        }
    }

    /// In-place multiply by `1 + coeff * weight^da edges^db cover^dc`.
    /// The shift must not be (0, 0, 0).
    pub(crate) fn mul_one_plus_monomial(&mut self, da: usize, db: usize, dc: usize, coeff: &R::Elem) {
        debug_assert!(da + db + dc > 0);
        let caps = self.caps;
        if db > caps.edges || dc > caps.cover || da > caps.weight {
            return; // shifted copy is fully truncated; 1 * self remains
        }
        let b_max = self.deg.edges.min(caps.edges - db);
        let c_max = self.deg.cover.min(caps.cover - dc);
        if db == 0 && dc == 0 {
            // Shift along the weight axis within each plane, descending.
            for b in 0..=self.deg.edges {
                for c in 0..=self.deg.cover {
                    let pl = self.plane(b, c);
                    let l = self.plane_len[pl] as usize;
                    if l == 0 {
                        continue;
                    }
                    let a_max = (l - 1).min(caps.weight - da);
                    self.plane_len[pl] = ((l + da).min(caps.weight + 1)) as u32;
                    let r = self.plane_range(b, c);
                    let plane = &mut self.data[r];
                    for a in (0..=a_max).rev() {
                        let x = plane[a].clone();
                        self.ring.add_mul_assign(&mut plane[a + da], &x, coeff);
                    }
                }
            }
        } else {
            // Descending plane order: a target plane is never read afterwards.
            for b in (0..=b_max).rev() {
                for c in (0..=c_max).rev() {
                    let src_pl = self.plane(b, c);
                    let l = self.plane_len[src_pl] as usize;
                    if l == 0 {
                        continue;
                    }
                    let a_max = (l - 1).min(caps.weight - da);
                    let dst_pl = self.plane(b + db, c + dc);
                    self.plane_len[dst_pl] =
                        self.plane_len[dst_pl].max(((l + da).min(caps.weight + 1)) as u32);
                    let src = self.plane_range(b, c);
                    let dst = self.plane_range(b + db, c + dc);
                    debug_assert!(src.end <= dst.start);
                    let (head, tail) = self.data.split_at_mut(dst.start);
                    let src_plane = &head[src.start..src.end];
                    for a in 0..=a_max {
                        if self.ring.is_zero(&src_plane[a]) {
                            continue;
                        }
                        self.ring.add_mul_assign(&mut tail[a + da], &src_plane[a], coeff);
                    }
                }
            }
        }
        self.deg = Degrees::new(
            self.deg.weight + da,
            self.deg.edges + db,
            self.deg.cover + dc,
        )
        .min(caps);
    }

    /// Overwrites this polynomial with the contents of `other` (same ring and
    /// caps), touching only the union of the tracked regions.
    pub(crate) fn clone_contents_from(&mut self, other: &Self) {
        debug_assert!(self.check_compatible(other).is_ok());
        self.clear();
        for b in 0..=other.deg.edges {
            for c in 0..=other.deg.cover {
                let p = other.plane(b, c);
                let l = other.plane_len[p] as usize;
                if l == 0 {
                    continue;
                }
                let src = other.plane_range(b, c);
                let dst = self.plane_range(b, c);
                self.data[dst.start..dst.start + l]
                    .clone_from_slice(&other.data[src.start..src.start + l]);
                self.plane_len[p] = l as u32;
            }
        }
        self.deg = other.deg;
    }

    /// Resets to the zero polynomial, clearing only the tracked region.
    pub(crate) fn clear(&mut self) {
        let zero = self.ring.zero();
        for b in 0..=self.deg.edges {
            for c in 0..=self.deg.cover {
                let p = self.plane(b, c);
                let l = self.plane_len[p] as usize;
                if l == 0 {
                    continue;
                }
                let r = self.plane_range(b, c);
                for a in 0..l {
                    self.data[r.start + a] = zero.clone();
                }
                self.plane_len[p] = 0;
            }
        }
        self.deg = Degrees::new(0, 0, 0);
    }

    /// Sets the constant term to 1 on a cleared polynomial.
    pub(crate) fn set_one(&mut self) {
        debug_assert!(self.deg == Degrees::new(0, 0, 0));
        self.data[0] = self.ring.one();
        self.plane_len[0] = 1;
    }

    /// Debug serialization: one `a b c coeff` line per nonzero coefficient,
    /// sorted lexicographically by `(a, b, c)`.
    pub fn debug_lines(&self) -> String {
        let mut out = String::new();
        for a in 0..=self.deg.weight {
            for b in 0..=self.deg.edges {
                for c in 0..=self.deg.cover {
                    let v = &self.data[self.index(a, b, c)];
                    if !self.ring.is_zero(v) {
                        let _ = writeln!(out, "{a} {b} {c} {}", self.ring.format(v));
                    }
                }
            }
        }
        out
    }

    /// True iff every stored coefficient is zero.
    pub fn is_zero_poly(&self) -> bool {
        self.data.iter().all(|v| self.ring.is_zero(v))
    }
}
