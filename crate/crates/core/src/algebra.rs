//! Matrix representation of warping.
//!
//! A path `p = ((i_1, j_1), ..., (i_L, j_L))` induces 0/1 embedding matrices
//! `Phi` (`L x m`, row `l` is `e^{i_l}`) and `Psi` (`L x n`, row `l` is
//! `e^{j_l}`), which stretch `x` and `y` to the common length `L`. The
//! alignment cost is then `|Phi x - Psi y|^2`, and with the aggregated
//! embedding `Theta = (Phi, -Psi)` it becomes the quadratic form
//! `z^T Theta^T Theta z` in `z = (x, y)`.
//!
//! Everything here is integer-valued and dense.

use ndarray::{concatenate, s, Array1, Array2, ArrayView1, Axis};
use serde::Serialize;

use crate::{Error, Result, TimeSeries, WarpingPath};

/// Embedding matrices `Phi` (`L x m`) and `Psi` (`L x n`) of one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingPair {
    pub phi: Array2<i64>,
    pub psi: Array2<i64>,
}

pub fn embeddings(p: &WarpingPath) -> EmbeddingPair {
    let (m, n) = p.lattice();
    let len = p.len();
    let mut phi = Array2::zeros((len, m));
    let mut psi = Array2::zeros((len, n));
    for (l, &(i, j)) in p.points().iter().enumerate() {
        phi[[l, i - 1]] = 1;
        psi[[l, j - 1]] = 1;
    }
    EmbeddingPair { phi, psi }
}

/// Matrices derived from the embeddings of one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAlgebra {
    /// `V = Phi^T Phi` (`m x m`, diagonal).
    pub valence: Array2<i64>,
    /// `W = Phi^T Psi` (`m x n`).
    pub warping: Array2<i64>,
    /// `V̄ = Psi^T Psi` (`n x n`, diagonal).
    pub co_valence: Array2<i64>,
    /// `W̄ = Psi^T Phi = W^T` (`n x m`).
    pub co_warping: Array2<i64>,
    /// `Theta = (Phi, -Psi)` (`L x (m + n)`).
    pub theta: Array2<i64>,
    /// `Theta^T Theta` (`(m + n) x (m + n)`).
    pub gram: Array2<i64>,
}

pub fn path_algebra(p: &WarpingPath) -> PathAlgebra {
    let EmbeddingPair { phi, psi } = embeddings(p);
    let theta = concatenate![Axis(1), phi, -&psi];
    PathAlgebra {
        valence: phi.t().dot(&phi),
        warping: phi.t().dot(&psi),
        co_valence: psi.t().dot(&psi),
        co_warping: psi.t().dot(&phi),
        gram: theta.t().dot(&theta),
        theta,
    }
}

impl PathAlgebra {
    /// The block matrix `[[V, -W], [-W̄, V̄]]`, assembled from the blocks
    /// rather than from `Theta`.
    pub fn block_gram(&self) -> Array2<i64> {
        let top = concatenate![Axis(1), self.valence, -&self.warping];
        let bottom = concatenate![Axis(1), -&self.co_warping, self.co_valence];
        concatenate![Axis(0), top, bottom]
    }

    pub fn serializable(&self) -> PathAlgebraRows {
        PathAlgebraRows {
            valence: to_rows(&self.valence),
            warping: to_rows(&self.warping),
            co_valence: to_rows(&self.co_valence),
            co_warping: to_rows(&self.co_warping),
            theta: to_rows(&self.theta),
            gram: to_rows(&self.gram),
        }
    }
}

/// Nested-row form of [`PathAlgebra`] for JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathAlgebraRows {
    pub valence: Vec<Vec<i64>>,
    pub warping: Vec<Vec<i64>>,
    pub co_valence: Vec<Vec<i64>>,
    pub co_warping: Vec<Vec<i64>>,
    pub theta: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
}

pub fn to_rows(a: &Array2<i64>) -> Vec<Vec<i64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// `|Phi_d(x) - Psi_d(y)|^2`, applying `Phi` and `Psi` to each of the `d`
/// component series and summing.
pub fn cost_via_embedding(x: &TimeSeries, y: &TimeSeries, p: &WarpingPath) -> Result<f64> {
    x.check_same_dim(y)?;
    p.check_lattice(x.len(), y.len())?;
    let EmbeddingPair { phi, psi } = embeddings(p);
    let phi = phi.mapv(|v| v as f64);
    let psi = psi.mapv(|v| v as f64);
    let total = (0..x.dim())
        .map(|k| {
            let xk = Array1::from(x.component(k));
            let yk = Array1::from(y.component(k));
            let diff = phi.dot(&xk) - psi.dot(&yk);
            diff.dot(&diff)
        })
        .sum();
    Ok(total)
}

/// `z^T (Theta^T Theta) z` for the concatenation `z = (x, y)` of two
/// univariate series on the path's lattice.
pub fn cost_via_quadform(z: &[f64], p: &WarpingPath) -> Result<f64> {
    let (m, n) = p.lattice();
    if z.len() != m + n {
        return Err(Error::LengthMismatch {
            expected: m + n,
            found: z.len(),
        });
    }
    Ok(quad_form(&path_algebra(p).gram, ArrayView1::from(z)))
}

/// `A^(ij) = Theta_i^T Theta_i - Theta_j^T Theta_j` for two paths on the
/// same lattice; `z^T A z = C_i(z) - C_j(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadFormMatrix {
    pub a: Array2<i64>,
}

impl QuadFormMatrix {
    pub fn evaluate(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.a.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.a.nrows(),
                found: z.len(),
            });
        }
        Ok(quad_form(&self.a, ArrayView1::from(z)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.a.t()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0)
    }

    /// The `V_i - V_j` block.
    pub fn valence_block(&self, m: usize) -> Array2<i64> {
        self.a.slice(s![..m, ..m]).to_owned()
    }
}

pub fn quad_form_matrix(p_i: &WarpingPath, p_j: &WarpingPath) -> Result<QuadFormMatrix> {
    let (m, n) = p_i.lattice();
    p_j.check_lattice(m, n)?;
    let a = path_algebra(p_i).gram - path_algebra(p_j).gram;
    Ok(QuadFormMatrix { a })
}

fn quad_form(a: &Array2<i64>, z: ArrayView1<'_, f64>) -> f64 {
    a.outer_iter()
        .zip(z.iter())
        .map(|(row, &zr)| {
            zr * row
                .iter()
                .zip(z.iter())
                .map(|(&v, &zc)| v as f64 * zc)
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;
    use crate::dtw::path_cost;

    fn path(m: usize, n: usize, pts: &[(usize, usize)]) -> WarpingPath {
        WarpingPath::new(m, n, pts.to_vec()).unwrap()
    }

    #[test]
    fn diagonal_embeddings_are_identity() {
        let e = embeddings(&WarpingPath::diagonal(2).unwrap());
        assert_eq!(e.phi, Array2::eye(2));
        assert_eq!(e.psi, Array2::eye(2));
        let alg = path_algebra(&WarpingPath::diagonal(3).unwrap());
        assert_eq!(alg.valence, Array2::eye(3));
        assert_eq!(alg.co_valence, Array2::eye(3));
        assert_eq!(alg.warping, Array2::eye(3));
    }

    #[test]
    fn repeated_element_embedding() {
        let p = path(1, 2, &[(1, 1), (1, 2)]);
        let e = embeddings(&p);
        assert_eq!(e.phi, array![[1], [1]]);
        assert_eq!(e.psi, Array2::eye(2));
        let alg = path_algebra(&p);
        assert_eq!(alg.valence, array![[2]]);
        assert_eq!(alg.co_valence, Array2::eye(2));
        assert_eq!(alg.warping, array![[1, 1]]);
        assert_eq!(alg.co_warping, array![[1], [1]]);
        assert_eq!(alg.gram, array![[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]);
    }

    #[test]
    fn counting_identities() {
        let p = path(4, 3, &[(1, 1), (2, 1), (3, 2), (3, 3), (4, 3)]);
        let e = embeddings(&p);
        let alg = path_algebra(&p);
        let phi_col_sums = e.phi.sum_axis(Axis(0));
        assert_eq!(phi_col_sums, alg.valence.diag());
        assert_eq!(alg.warping.sum_axis(Axis(1)), alg.valence.diag());
        assert_eq!(alg.warping.sum_axis(Axis(0)), alg.co_valence.diag());
        assert_eq!(alg.co_warping, alg.warping.t());
        assert_eq!(alg.valence.diag().sum(), 5);
        assert_eq!(alg.co_valence.diag().sum(), 5);
        assert_eq!(alg.gram, alg.block_gram());
    }

    #[test]
    fn embedding_cost_example() {
        let x = TimeSeries::univariate(&[1.0, 2.0]).unwrap();
        let y = TimeSeries::univariate(&[3.0, 5.0]).unwrap();
        let diag = WarpingPath::diagonal(2).unwrap();
        assert_eq!(cost_via_embedding(&x, &y, &diag).unwrap(), 13.0);
        assert_eq!(
            cost_via_quadform(&[1.0, 2.0, 3.0, 5.0], &diag).unwrap(),
            13.0
        );
    }

    #[test]
    fn quadform_origin_and_aligned_halves() {
        let p = path(3, 3, &[(1, 1), (2, 2), (3, 3)]);
        assert_eq!(cost_via_quadform(&[0.0; 6], &p).unwrap(), 0.0);
        assert_eq!(
            cost_via_quadform(&[1.5, -2.0, 7.0, 1.5, -2.0, 7.0], &p).unwrap(),
            0.0
        );
        assert!(matches!(
            cost_via_quadform(&[0.0; 5], &p),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn quad_form_matrix_identities() {
        let p = path(2, 2, &[(1, 1), (1, 2), (2, 2)]);
        let q = path(2, 2, &[(1, 1), (2, 2)]);
        assert!(quad_form_matrix(&p, &p).unwrap().is_zero());
        let a = quad_form_matrix(&p, &q).unwrap();
        assert!(a.is_symmetric());
        assert!(!a.is_zero());
        let z = [0.3, -1.2, 2.0, 0.7];
        let x = TimeSeries::univariate(&z[..2]).unwrap();
        let y = TimeSeries::univariate(&z[2..]).unwrap();
        let expected = path_cost(&x, &y, &p).unwrap() - path_cost(&x, &y, &q).unwrap();
        assert!((a.evaluate(&z).unwrap() - expected).abs() < 1e-12);
        assert_eq!(a.valence_block(2), array![[1, 0], [0, 0]]);
        let r = path(2, 3, &[(1, 1), (2, 2), (2, 3)]);
        assert!(quad_form_matrix(&p, &r).is_err());
    }

    #[test]
    fn multivariate_embedding_cost() {
        let x = TimeSeries::new(vec![vec![0.0, 1.0], vec![2.0, 0.5]]).unwrap();
        let y = TimeSeries::new(vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![3.0, 0.0]]).unwrap();
        let p = path(2, 3, &[(1, 1), (2, 2), (2, 3)]);
        let direct = path_cost(&x, &y, &p).unwrap();
        assert!((cost_via_embedding(&x, &y, &p).unwrap() - direct).abs() < 1e-12);
    }
}
