//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the library's DP, enumeration or algebra code.

#![allow(dead_code)]

use proptest::prelude::*;
use warpath::TimeSeries;

/// Every warping path of the m x n lattice, built by plain recursion over
/// the three step types and sorted lexicographically.
pub fn oracle_paths(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    fn grow(m: usize, n: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (i, j) = *cur.last().unwrap();
        if (i, j) == (m, n) {
            out.push(cur.clone());
            return;
        }
        for (di, dj) in [(0, 1), (1, 0), (1, 1)] {
            if i + di <= m && j + dj <= n {
                cur.push((i + di, j + dj));
                grow(m, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(m, n, &mut vec![(1, 1)], &mut out);
    out.sort();
    out
}

/// Sum of squared Euclidean distances along `path`.
pub fn oracle_cost(x: &TimeSeries, y: &TimeSeries, path: &[(usize, usize)]) -> f64 {
    path.iter()
        .map(|&(i, j)| {
            x.get(i - 1)
                .iter()
                .zip(y.get(j - 1))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum()
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, t| acc * (n - t) / (t + 1))
}

/// Closed form for the number of warping paths on the m x n lattice:
/// sum over i of 2^i C(m-1, i) C(n-1, i).
pub fn delannoy_closed(m: usize, n: usize) -> u128 {
    let (a, b) = ((m - 1) as u128, (n - 1) as u128);
    (0..=a.min(b))
        .map(|i| (1u128 << i) * binomial(a, i) * binomial(b, i))
        .sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn uni(v: &[f64]) -> TimeSeries {
    TimeSeries::univariate(v).unwrap()
}

/// Series with `len` in `lens` and `dim` components drawn from [-3, 3].
pub fn series(
    lens: std::ops::RangeInclusive<usize>,
    dim: usize,
) -> impl Strategy<Value = TimeSeries> {
    lens.prop_flat_map(move |len| {
        proptest::collection::vec(-3.0f64..3.0, len * dim)
            .prop_map(move |v| TimeSeries::from_flat(len, dim, v).unwrap())
    })
}

/// Integer-valued univariate series with entries in `0..levels`.
pub fn int_series(
    lens: std::ops::RangeInclusive<usize>,
    levels: i32,
) -> impl Strategy<Value = TimeSeries> {
    lens.prop_flat_map(move |len| {
        proptest::collection::vec(0..levels, len)
            .prop_map(|v| uni(&v.into_iter().map(f64::from).collect::<Vec<_>>()))
    })
}
