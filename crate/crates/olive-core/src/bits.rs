// SPDX-License-Identifier: Apache-2.0

//! Fixed-length bit vectors over GF(2) with word-level range XOR.

use std::fmt;

#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Clone for Bits {
    fn clone(&self) -> Self {
        Bits { len: self.len, words: self.words.clone() }
    }

    fn clone_from(&mut self, src: &Self) {
        self.len = src.len;
        self.words.clone_from(&src.words);
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HexError {
    #[error("hex string has {got} characters, expected {expected} for {len} bits")]
    Length { got: usize, expected: usize, len: usize },
    #[error("invalid hex: {0}")]
    Invalid(#[from] hex::FromHexError),
    #[error("bits set beyond length {0}")]
    Overflow(usize),
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::zeros(len);
        for i in ones {
            b.toggle(i);
        }
        b
    }

    /// Uniformly random bits, drawn a word at a time.
    pub fn random(len: usize, rng: &mut dyn rand::RngCore) -> Self {
        let mut b = Bits::zeros(len);
        b.words.iter_mut().for_each(|w| *w = rng.next_u64());
        if !len.is_multiple_of(64) {
            if let Some(last) = b.words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Ones<'_> {
        Ones { bits: self, word: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Reads up to 64 bits starting at `pos`; bits at or past `len` read as 0.
    #[inline]
    fn read_chunk(&self, pos: usize, n: usize) -> u64 {
        debug_assert!(n <= 64 && pos + n <= self.len);
        if n == 0 {
            return 0;
        }
        let w = pos / 64;
        let s = pos % 64;
        let mut v = self.words[w] >> s;
        if s != 0 && w + 1 < self.words.len() {
            v |= self.words[w + 1] << (64 - s);
        }
        if n < 64 {
            v &= (1u64 << n) - 1;
        }
        v
    }

    #[inline]
    fn xor_chunk(&mut self, pos: usize, v: u64, n: usize) {
        debug_assert!(n <= 64 && pos + n <= self.len);
        if v == 0 {
            return;
        }
        let w = pos / 64;
        let s = pos % 64;
        self.words[w] ^= v << s;
        if s != 0 && s + n > 64 {
            self.words[w + 1] ^= v >> (64 - s);
        }
    }

    /// XORs `src[lo..hi]` into `self[dst..dst + (hi - lo)]`.
    pub fn xor_range_from(&mut self, dst: usize, src: &Bits, lo: usize, hi: usize) {
        assert!(lo <= hi && hi <= src.len, "source range out of bounds");
        assert!(dst + (hi - lo) <= self.len, "destination range out of bounds");
        let mut p = lo;
        let mut q = dst;
        while p < hi {
            let n = (hi - p).min(64);
            let v = src.read_chunk(p, n);
            self.xor_chunk(q, v, n);
            p += n;
            q += n;
        }
    }

    /// Little-endian hex: bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let bytes: Vec<u8> = (0..nbytes).map(|i| (self.words[i / 8] >> ((i % 8) * 8)) as u8).collect();
        hex::encode(bytes)
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Self, HexError> {
        let expected = len.div_ceil(8) * 2;
        if s.len() != expected {
            return Err(HexError::Length { got: s.len(), expected, len });
        }
        let bytes = hex::decode(s)?;
        let mut b = Bits::zeros(len);
        for (i, byte) in bytes.iter().enumerate() {
            b.words[i / 8] |= (*byte as u64) << ((i % 8) * 8);
        }
        if !len.is_multiple_of(64) {
            let last = b.words.len() - 1;
            if b.words[last] >> (len % 64) != 0 {
                return Err(HexError::Overflow(len));
            }
        }
        Ok(b)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]{{", self.len)?;
        for (n, i) in self.ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub struct Ones<'a> {
    bits: &'a Bits,
    word: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word * 64 + t);
            }
            self.word += 1;
            if self.word >= self.bits.words.len() {
                return None;
            }
            self.cur = self.bits.words[self.word];
        }
    }
}
