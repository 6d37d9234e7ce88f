/// Whole-sample symmetric extension: maps any index onto `0..n` by
/// mirroring about the first and last samples (`x[-1] = x[1]`,
/// `x[n] = x[n-2]`). Index parity is preserved for even `n`.
#[inline]
pub fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut j = i.rem_euclid(period);
    if j >= n as isize {
        j = period - j;
    }
    j as usize
}

#[cfg(test)]
mod tests {
    use super::reflect;

    #[test]
    fn mirrors_about_end_samples() {
        let got: Vec<usize> = (-5..10).map(|i| reflect(i, 5)).collect();
        assert_eq!(got, vec![3, 4, 3, 2, 1, 0, 1, 2, 3, 4, 3, 2, 1, 0, 1]);
        assert_eq!(reflect(7, 1), 0);
    }
}
