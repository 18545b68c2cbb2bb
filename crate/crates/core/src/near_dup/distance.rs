//! Levenshtein distance over Unicode scalar values.
//!
//! Three routes to the same number:
//! * [`levenshtein`]: two-row dynamic programming, no bound.
//! * [`bounded_levenshtein`]: Ukkonen band of width `2·bound + 1` with a
//!   row-minimum cutoff.
//! * [`MyersPattern`]: bit-parallel (Myers/Hyyrö, 64-bit blocks), used by the
//!   bulk scanners where one key is compared against many.

use std::collections::HashMap;

/// Result of a bounded distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Within(usize),
    ExceedsBound,
}

impl Distance {
    pub fn value(self) -> Option<usize> {
        match self {
            Distance::Within(d) => Some(d),
            Distance::ExceedsBound => None,
        }
    }

    pub fn is_within(self) -> bool {
        matches!(self, Distance::Within(_))
    }
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = trim_affixes(a, b);
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = (diag + usize::from(ca != cb)).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Exact distance when it is at most `bound`, [`Distance::ExceedsBound`] otherwise.
pub fn bounded_levenshtein(a: &str, b: &str, bound: usize) -> Distance {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    bounded_levenshtein_chars(&a, &b, bound)
}

pub fn bounded_levenshtein_chars(a: &[char], b: &[char], bound: usize) -> Distance {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if b.len() - a.len() > bound {
        return Distance::ExceedsBound;
    }
    let (a, b) = trim_affixes(a, b);
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return if m <= bound { Distance::Within(m) } else { Distance::ExceedsBound };
    }

    let cap = bound + 1;
    let mut prev: Vec<usize> = (0..=m).map(|j| j.min(cap)).collect();
    let mut cur = vec![cap; m + 1];
    for i in 1..=n {
        let lo = i.saturating_sub(bound).max(1);
        let hi = (i + bound).min(m);
        cur[lo - 1] = if lo == 1 { i.min(cap) } else { cap };
        let mut row_min = cur[lo - 1];
        let ca = a[i - 1];
        for j in lo..=hi {
            let v = (prev[j - 1] + usize::from(ca != b[j - 1]))
                .min(prev[j] + 1)
                .min(cur[j - 1] + 1)
                .min(cap);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if hi < m {
            cur[hi + 1] = cap;
        }
        if row_min > bound {
            return Distance::ExceedsBound;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    match prev[m] {
        d if d <= bound => Distance::Within(d),
        _ => Distance::ExceedsBound,
    }
}

fn trim_affixes<'a>(a: &'a [char], b: &'a [char]) -> (&'a [char], &'a [char]) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (&a[..a.len() - suffix], &b[..b.len() - suffix])
}

/// Precomputed match masks of one key for bit-parallel distance computation.
#[derive(Debug, Clone)]
pub struct MyersPattern {
    len: usize,
    blocks: usize,
    /// `ascii[c * blocks + w]`: bits of block `w` where the pattern has `c`.
    ascii: Vec<u64>,
    other: HashMap<char, Vec<u64>>,
}

impl MyersPattern {
    pub fn new(pattern: &[char]) -> Self {
        let len = pattern.len();
        let blocks = len.div_ceil(64).max(1);
        let mut ascii = vec![0u64; 128 * blocks];
        let mut other: HashMap<char, Vec<u64>> = HashMap::new();
        for (i, &c) in pattern.iter().enumerate() {
            let (w, bit) = (i / 64, 1u64 << (i % 64));
            if (c as u32) < 128 {
                ascii[c as usize * blocks + w] |= bit;
            } else {
                other.entry(c).or_insert_with(|| vec![0; blocks])[w] |= bit;
            }
        }
        MyersPattern {
            len,
            blocks,
            ascii,
            other,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn mask(&self, c: char, w: usize) -> u64 {
        if (c as u32) < 128 {
            self.ascii[c as usize * self.blocks + w]
        } else {
            self.other.get(&c).map_or(0, |m| m[w])
        }
    }

    /// Full Levenshtein distance between the pattern and `text`.
    pub fn distance(&self, text: &[char]) -> usize {
        if self.len == 0 {
            return text.len();
        }
        if self.blocks == 1 {
            self.distance_single(text)
        } else {
            self.distance_blocks(text)
        }
    }

    pub fn bounded(&self, text: &[char], bound: usize) -> Distance {
        if self.len.abs_diff(text.len()) > bound {
            return Distance::ExceedsBound;
        }
        match self.distance(text) {
            d if d <= bound => Distance::Within(d),
            _ => Distance::ExceedsBound,
        }
    }

    fn distance_single(&self, text: &[char]) -> usize {
        let last = 1u64 << (self.len - 1);
        let mut vp = !0u64;
        let mut vn = 0u64;
        let mut score = self.len;
        for &c in text {
            let eq = self.mask(c, 0);
            let x = eq | vn;
            let d0 = ((x & vp).wrapping_add(vp) ^ vp) | x;
            let hp = vn | !(d0 | vp);
            let hn = d0 & vp;
            if hp & last != 0 {
                score += 1;
            } else if hn & last != 0 {
                score -= 1;
            }
            let hp = (hp << 1) | 1;
            let hn = hn << 1;
            vp = hn | !(d0 | hp);
            vn = hp & d0;
        }
        score
    }

    fn distance_blocks(&self, text: &[char]) -> usize {
        let words = self.blocks;
        let last = 1u64 << ((self.len - 1) % 64);
        let mut vp = vec![!0u64; words];
        let mut vn = vec![0u64; words];
        let mut score = self.len;
        for &c in text {
            let mut hp_carry = 1u64;
            let mut hn_carry = 0u64;
            for w in 0..words {
                let eq = self.mask(c, w);
                let (p, n) = (vp[w], vn[w]);
                let x = eq | hn_carry;
                let d0 = ((x & p).wrapping_add(p) ^ p) | x | n;
                let hp = n | !(d0 | p);
                let hn = d0 & p;
                if w == words - 1 {
                    if hp & last != 0 {
                        score += 1;
                    } else if hn & last != 0 {
                        score -= 1;
                    }
                }
                let hp_shifted = (hp << 1) | hp_carry;
                let hn_shifted = (hn << 1) | hn_carry;
                hp_carry = hp >> 63;
                hn_carry = hn >> 63;
                vp[w] = hn_shifted | !(d0 | hp_shifted);
                vn[w] = hp_shifted & d0;
            }
        }
        score
    }
}
