use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Streams the coalesced multiset `{ key + shift }` over every base entry and
/// every shift, in ascending key order, with multiplicities summed.
///
/// Each shifted copy of the base is already sorted, so a heap over the copy
/// heads yields a k-way merge using `O(|shifts|)` memory.
pub(crate) struct ShiftMerge<'a> {
    keys: &'a [i64],
    counts: Option<&'a [u64]>,
    shifts: Vec<i64>,
    pos: Vec<usize>,
    heap: BinaryHeap<Reverse<(i64, usize)>>,
}

impl<'a> ShiftMerge<'a> {
    /// `counts == None` means every base key has multiplicity one.
    ///
    /// Fails if some shifted key leaves `i64` or the total mass leaves `u64`.
    pub(crate) fn new(keys: &'a [i64], counts: Option<&'a [u64]>, shifts: Vec<i64>) -> Result<Self> {
        if let (Some(&lo), Some(&hi)) = (keys.first(), keys.last()) {
            let smin = shifts.iter().copied().min().unwrap_or(0) as i128;
            let smax = shifts.iter().copied().max().unwrap_or(0) as i128;
            if lo as i128 + smin < i64::MIN as i128 || hi as i128 + smax > i64::MAX as i128 {
                return Err(Error::Overflow("shifted key"));
            }
        }
        let base_mass: u128 = match counts {
            Some(c) => c.iter().map(|&c| c as u128).sum(),
            None => keys.len() as u128,
        };
        if base_mass * shifts.len() as u128 > u64::MAX as u128 {
            return Err(Error::Overflow("multiplicity"));
        }
        let mut heap = BinaryHeap::with_capacity(shifts.len());
        if !keys.is_empty() {
            for (j, &s) in shifts.iter().enumerate() {
                heap.push(Reverse((keys[0] + s, j)));
            }
        }
        let pos = vec![0; shifts.len()];
        Ok(Self { keys, counts, shifts, pos, heap })
    }

    #[inline]
    fn pop(&mut self) -> Option<(i64, u64)> {
        let Reverse((key, j)) = self.heap.pop()?;
        let p = self.pos[j];
        let c = self.counts.map_or(1, |c| c[p]);
        let next = p + 1;
        self.pos[j] = next;
        if next < self.keys.len() {
            self.heap.push(Reverse((self.keys[next] + self.shifts[j], j)));
        }
        Some((key, c))
    }
}

impl Iterator for ShiftMerge<'_> {
    type Item = (i64, u64);

    fn next(&mut self) -> Option<(i64, u64)> {
        let (key, mut total) = self.pop()?;
        while let Some(Reverse((k, _))) = self.heap.peek() {
            if *k != key {
                break;
            }
            let (_, c) = self.pop().expect("peeked");
            total += c;
        }
        Some((key, total))
    }
}
