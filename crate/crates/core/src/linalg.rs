//! Small dense linear algebra helpers shared by the moduli and holonomy code.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_CUTOFF: f64 = 1e-7;

/// Numerical rank with singular values below `rel * s_max` treated as zero.
pub fn rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.amax();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = m.ncols();
    // pad to at least square so the SVD returns a full right basis
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.amax();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= rel * smax)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Moore-Penrose pseudo-inverse with the same relative cutoff convention.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.amax();
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > rel * smax && s > 0.0 {
            out += vt.row(i).transpose() * u.column(i).transpose() / s;
        }
    }
    out
}

/// Inverse of a matrix preserving the diagonal form `q`: `q m^T q`.
pub fn form_inverse(m: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
    let q = DMatrix::from_diagonal(&DVector::from_column_slice(signs));
    &q * m.transpose() * &q
}

/// `max |m^T q m - q|`.
pub fn form_defect(m: &DMatrix<f64>, signs: &[f64]) -> f64 {
    let q = DMatrix::from_diagonal(&DVector::from_column_slice(signs));
    (m.transpose() * &q * m - &q).amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 4, &[1., 0., 1., 0., 0., 1., 0., 1.]);
        let k = null_space(&m, RANK_CUTOFF);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).amax() < 1e-12);
        assert_eq!(rank(&m, RANK_CUTOFF), 2);
    }

    #[test]
    fn pinv_solves_consistent_system() {
        let m = DMatrix::from_row_slice(1, 3, &[1., 2., 2.]);
        let p = pseudo_inverse(&m, RANK_CUTOFF);
        let x = &p * DVector::from_vec(vec![9.0]);
        assert!((x - DVector::from_vec(vec![1., 2., 2.])).amax() < 1e-12);
    }
}
