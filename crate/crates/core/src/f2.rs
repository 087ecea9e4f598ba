//! Dense bit-packed linear algebra over F₂.

/// A row vector over F₂ packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

pub(crate) fn word_count(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; word_count(len)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Concatenate two rows, `self` occupying the low positions.
    pub fn concat(&self, other: &BitRow) -> BitRow {
        let mut out = BitRow::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitRow {
        let mut out = BitRow::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }
}

/// Rank of a set of rows.
pub fn rank(rows: &[BitRow]) -> usize {
    let mut work = rows.to_vec();
    echelon(&mut work, None)
}

/// In-place Gaussian elimination. Returns the rank; the first `rank` rows hold a
/// reduced echelon basis. `width` restricts pivoting to the first `width` columns.
pub fn echelon(rows: &mut [BitRow], width: Option<usize>) -> usize {
    let cols = width.unwrap_or_else(|| rows.first().map_or(0, BitRow::len));
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Basis of the left kernel `{a : Σ aᵢ rowsᵢ = 0}`, each element a row of length `rows.len()`.
pub fn left_kernel(rows: &[BitRow]) -> Vec<BitRow> {
    let m = rows.len();
    let width = rows.first().map_or(0, BitRow::len);
    let mut aug: Vec<BitRow> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut tag = BitRow::zeros(m);
            tag.set(i, true);
            row.concat(&tag)
        })
        .collect();
    let r = echelon(&mut aug, Some(width));
    aug[r..].iter().map(|row| row.slice(width, width + m)).collect()
}

/// Solve `Σ aᵢ rowsᵢ = target`, returning one solution if any.
pub fn solve_combination(rows: &[BitRow], target: &BitRow) -> Option<BitRow> {
    let m = rows.len();
    let width = target.len();
    let mut aug: Vec<BitRow> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut tag = BitRow::zeros(m);
            tag.set(i, true);
            row.concat(&tag)
        })
        .collect();
    let r = echelon(&mut aug, Some(width));
    let mut residual = target.concat(&BitRow::zeros(m));
    for row in &aug[..r] {
        let pivot = (0..width).find(|&c| row.get(c)).expect("echelon row has a pivot");
        if residual.get(pivot) {
            residual.xor_assign(row);
        }
    }
    if residual.slice(0, width).is_zero() {
        Some(residual.slice(width, width + m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &[u8]) -> BitRow {
        let mut r = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            r.set(i, b == 1);
        }
        r
    }

    #[test]
    fn rank_and_kernel() {
        let rows = vec![row(&[1, 0, 1]), row(&[0, 1, 1]), row(&[1, 1, 0])];
        assert_eq!(rank(&rows), 2);
        let ker = left_kernel(&rows);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], row(&[1, 1, 1]));
    }

    #[test]
    fn solve_finds_combination() {
        let rows = vec![row(&[1, 0, 0, 1]), row(&[0, 1, 0, 1]), row(&[0, 0, 1, 1])];
        let sol = solve_combination(&rows, &row(&[1, 1, 0, 0])).unwrap();
        assert_eq!(sol, row(&[1, 1, 0]));
        assert!(solve_combination(&rows, &row(&[0, 0, 0, 1])).is_none());
    }

    #[test]
    fn words_span_boundaries() {
        let mut r = BitRow::zeros(130);
        r.set(0, true);
        r.set(64, true);
        r.set(129, true);
        assert_eq!(r.count_ones(), 3);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        r.flip(64);
        assert!(!r.get(64));
    }
}
