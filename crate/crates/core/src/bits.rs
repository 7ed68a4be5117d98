//! Index subsets as 16-bit masks (bit `i-1` stands for index `i`, 1-based).
//! Signs are parities of inversion counts, computed with popcounts on
//! masked prefixes.

/// Sorted 1-based indices of the set bits.
pub fn mask_to_indices(mask: u16) -> Vec<usize> {
    (1..=16).filter(|i| mask >> (i - 1) & 1 == 1).collect()
}

/// Mask from strictly increasing 1-based indices; `None` when the list is
/// not strictly increasing or an index falls outside `1..=n`.
pub fn indices_to_mask(indices: &[usize], n: usize) -> Option<u16> {
    let mut mask = 0u16;
    let mut prev = 0usize;
    for &i in indices {
        if i <= prev || i > n {
            return None;
        }
        mask |= 1 << (i - 1);
        prev = i;
    }
    Some(mask)
}

/// Number of inversions between disjoint subsets `a` and `b`:
/// `#{(s,t) in a x b : s > t}`.
pub fn inversions(a: u16, b: u16) -> u32 {
    let mut count = 0u32;
    let mut t = b;
    while t != 0 {
        let bit = t.trailing_zeros();
        count += (a >> (bit + 1)).count_ones();
        t &= t - 1;
    }
    count
}

/// Sign of `e_a ^ e_b` relative to `e_{a|b}`; `None` when the subsets meet.
pub fn wedge_sign(a: u16, b: u16) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    Some(inversions(a, b) % 2 == 1)
}

/// 0-based position of index `i` within the sorted subset `mask`.
pub fn position_in(mask: u16, i: usize) -> u32 {
    (mask & ((1u16 << (i - 1)) - 1)).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = indices_to_mask(&[1, 3, 7], 9).unwrap();
        assert_eq!(mask_to_indices(m), vec![1, 3, 7]);
        assert_eq!(indices_to_mask(&[3, 3], 9), None);
        assert_eq!(indices_to_mask(&[2, 1], 9), None);
        assert_eq!(indices_to_mask(&[10], 9), None);
    }

    #[test]
    fn signs() {
        // e2 ^ e1 = -e12: one inversion
        let a = indices_to_mask(&[2], 9).unwrap();
        let b = indices_to_mask(&[1], 9).unwrap();
        assert_eq!(wedge_sign(a, b), Some(true));
        assert_eq!(wedge_sign(b, a), Some(false));
        assert_eq!(wedge_sign(a, a), None);
        // position of 2 in {1,2,3} is 1 (0-based)
        let m = indices_to_mask(&[1, 2, 3], 9).unwrap();
        assert_eq!(position_in(m, 2), 1);
    }
}
