//! Division-free symbolic determinants over [`UExpr`].

use alloc::vec::Vec;

use crate::ualgebra::UExpr;

/// For an `n×n` matrix, returns `minor_i` for every column `i`: the
/// determinant of rows `0..n-1` with column `i` removed. The empty
/// determinant (`n == 1`) is 1.
///
/// Laplace expansion along successive rows, memoized over column subsets, so
/// the cost is `O(n·2^n)` products rather than `O(n!)`.
pub(crate) fn last_row_minors(m: &[Vec<UExpr>]) -> Vec<UExpr> {
    let n = m.len();
    // dets[mask] = det(rows 0..popcount(mask), columns in mask)
    let mut dets: Vec<Option<UExpr>> = alloc::vec![None; 1 << n];
    dets[0] = Some(UExpr::constant(1.0));
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        if k >= n {
            continue;
        }
        let row = k - 1;
        let mut terms = Vec::new();
        for (pos, col) in (0..n).filter(|c| mask & (1 << c) != 0).enumerate() {
            let rest = dets[mask & !(1 << col)].as_ref().expect("smaller subsets first");
            let prod = m[row][col].mul(rest);
            let sign = if (row + pos).is_multiple_of(2) { 1.0 } else { -1.0 };
            terms.extend(prod.terms().iter().map(|t| t.with_coeff(sign * t.coeff())));
        }
        dets[mask] = Some(UExpr::from_terms(terms));
    }
    let full = (1usize << n) - 1;
    (0..n)
        .map(|i| dets[full & !(1 << i)].clone().expect("every (n-1)-subset is filled"))
        .collect()
}

/// Coefficient mass of the full Laplace expansion: the permanent of the
/// matrix of `Σ|c|` per entry. Rounding noise in any coefficient of the
/// determinant is a small multiple of `f64::EPSILON` times this.
pub(crate) fn expansion_mass(m: &[Vec<UExpr>]) -> f64 {
    let n = m.len();
    let mass: Vec<Vec<f64>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.terms().iter().map(|t| t.coeff().abs()).sum())
                .collect()
        })
        .collect();
    let mut perm = alloc::vec![0.0f64; 1 << n];
    perm[0] = 1.0;
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        perm[mask] = (0..n)
            .filter(|c| mask & (1 << c) != 0)
            .map(|c| mass[row][c] * perm[mask & !(1 << c)])
            .sum();
    }
    perm[(1 << n) - 1]
}

/// Cofactor sign of entry `(n-1, i)`.
pub(crate) fn last_row_sign(n: usize, i: usize) -> f64 {
    if (n - 1 + i).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Full determinant, expanded along the last row.
#[cfg(test)]
pub(crate) fn determinant(m: &[Vec<UExpr>]) -> UExpr {
    let n = m.len();
    let minors = last_row_minors(m);
    let mut terms = Vec::new();
    for (i, minor) in minors.iter().enumerate() {
        let prod = m[n - 1][i].mul(minor);
        let s = last_row_sign(n, i);
        terms.extend(prod.terms().iter().map(|t| t.with_coeff(s * t.coeff())));
    }
    UExpr::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualgebra::UTerm;

    fn c(x: f64) -> UExpr {
        UExpr::constant(x)
    }

    #[test]
    fn numeric_determinants() {
        let m = alloc::vec![
            alloc::vec![c(2.0), c(0.0), c(1.0)],
            alloc::vec![c(1.0), c(3.0), c(2.0)],
            alloc::vec![c(1.0), c(1.0), c(1.0)],
        ];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert!(determinant(&m).is_zero());
        let m = alloc::vec![alloc::vec![c(4.0), c(7.0)], alloc::vec![c(2.0), c(6.0)],];
        assert_eq!(determinant(&m), c(10.0));
        assert_eq!(determinant(&[alloc::vec![c(-3.5)]]), c(-3.5));
    }

    #[test]
    fn mass_is_permanent_of_abs() {
        let m = alloc::vec![alloc::vec![c(4.0), c(-7.0)], alloc::vec![c(2.0), c(6.0)],];
        assert_eq!(expansion_mass(&m), 38.0);
    }

    #[test]
    fn symbolic_two_by_two() {
        let e = |k, a| UExpr::from(UTerm::exp(k, a));
        let m = alloc::vec![
            alloc::vec![e(1.0, -3.0), e(1.0, -1.0)],
            alloc::vec![e(-3.0, -3.0), e(-1.0, -1.0)],
        ];
        assert_eq!(determinant(&m), e(2.0, -4.0));
    }
}
