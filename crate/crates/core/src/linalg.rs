//! Thin LAPACK bindings (divide-and-conquer Hermitian eigensolvers) and a
//! seeded Lanczos iteration for extremal eigenpairs of large Hermitian
//! operators given only their action.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative Frobenius asymmetry ‖M − M†‖ / ‖M‖ (0 for exactly Hermitian).
pub fn hermiticity_error(m: &ArrayView2<C64>) -> f64 {
    let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let mut asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = m[[i, j]] - m[[j, i]].conj();
            asym += d.norm_sqr();
        }
    }
    asym.sqrt() / norm
}

/// (M + M†)/2, scrubbing round-off asymmetry.
pub fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    let n = m.nrows();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..=i {
            let v = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
            out[[i, j]] = v;
            out[[j, i]] = v.conj();
        }
    }
    out
}

fn zheevd(h: &ArrayView2<C64>, vectors: bool) -> Result<(Array1<f64>, Option<Array2<C64>>)> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "eigh needs a square matrix");
    if n == 0 {
        return Err(Error::Argument("eigh on empty matrix".into()));
    }
    // Row-major Hermitian H read as column-major is conj(H); its eigenvectors
    // are the conjugates of H's, eigenvalues identical.
    let mut a: Vec<C64> = h.iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let n_i = n as i32;
    let jobz = if vectors { b'V' } else { b'N' } as std::os::raw::c_char;
    let uplo = b'L' as std::os::raw::c_char;
    let mut info = 0i32;

    let mut work_q = [C64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &n_i,
            a.as_mut_ptr().cast(),
            &n_i,
            w.as_mut_ptr(),
            work_q.as_mut_ptr().cast(),
            &(-1i32),
            rwork_q.as_mut_ptr(),
            &(-1i32),
            iwork_q.as_mut_ptr(),
            &(-1i32),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { driver: "zheevd(query)", info });
    }
    let lwork = work_q[0].re as i32;
    let lrwork = rwork_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &n_i,
            a.as_mut_ptr().cast(),
            &n_i,
            w.as_mut_ptr(),
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { driver: "zheevd", info });
    }
    let vals = Array1::from_vec(w);
    if !vectors {
        return Ok((vals, None));
    }
    // Column-major output read as row-major has eigenvectors of conj(H) in its
    // rows; conjugate and transpose to get H's eigenvectors in columns.
    let m = Array2::from_shape_vec((n, n), a).expect("zheevd output shape");
    let v = m.mapv(|z| z.conj()).reversed_axes().as_standard_layout().to_owned();
    Ok((vals, Some(v)))
}

fn dsyevd(h: &ArrayView2<f64>, vectors: bool) -> Result<(Array1<f64>, Option<Array2<f64>>)> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "eigh needs a square matrix");
    if n == 0 {
        return Err(Error::Argument("eigh on empty matrix".into()));
    }
    let mut a: Vec<f64> = h.iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let n_i = n as i32;
    let jobz = if vectors { b'V' } else { b'N' } as std::os::raw::c_char;
    let uplo = b'L' as std::os::raw::c_char;
    let mut info = 0i32;

    let mut work_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &n_i,
            a.as_mut_ptr(),
            &n_i,
            w.as_mut_ptr(),
            work_q.as_mut_ptr(),
            &(-1i32),
            iwork_q.as_mut_ptr(),
            &(-1i32),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { driver: "dsyevd(query)", info });
    }
    let lwork = work_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &n_i,
            a.as_mut_ptr(),
            &n_i,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { driver: "dsyevd", info });
    }
    let vals = Array1::from_vec(w);
    if !vectors {
        return Ok((vals, None));
    }
    // Symmetric: column-major buffer read row-major is V^T.
    let m = Array2::from_shape_vec((n, n), a).expect("dsyevd output shape");
    let v = m.reversed_axes().as_standard_layout().to_owned();
    Ok((vals, Some(v)))
}

/// Full Hermitian eigendecomposition; eigenvalues ascending, eigenvectors in
/// columns.
pub fn eigh_complex(h: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (w, v) = zheevd(h, true)?;
    Ok((w, v.expect("vectors requested")))
}

/// Eigenvalues only (ascending) of a Hermitian matrix.
pub fn eigh_complex_values(h: &ArrayView2<C64>) -> Result<Array1<f64>> {
    Ok(zheevd(h, false)?.0)
}

/// Full real-symmetric eigendecomposition; eigenvalues ascending, eigenvectors
/// in columns.
pub fn eigh_real(h: &ArrayView2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (w, v) = dsyevd(h, true)?;
    Ok((w, v.expect("vectors requested")))
}

/// Eigenvalues only (ascending) of a real symmetric matrix.
pub fn eigh_real_values(h: &ArrayView2<f64>) -> Result<Array1<f64>> {
    Ok(dsyevd(h, false)?.0)
}

fn tridiag_smallest(alpha: &[f64], beta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = alpha.len();
    let mut t = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        t[[i, i]] = alpha[i];
        if i + 1 < k {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (w, v) = eigh_real(&t.view())?;
    Ok((w[0], v.column(0).to_vec()))
}

/// Outcome of a [`lanczos_smallest`] run.
pub struct LanczosResult {
    pub value: f64,
    pub vector: Array1<C64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Smallest eigenpair of a Hermitian operator given by its action, via Lanczos
/// with full reorthogonalization. Deterministic for a fixed start vector.
///
/// `tol` is a relative residual target (‖Hx − θx‖ ≤ tol·scale).
pub fn lanczos_smallest<F>(apply: F, v0: &Array1<C64>, max_iter: usize, tol: f64) -> Result<LanczosResult>
where
    F: Fn(&Array1<C64>) -> Array1<C64>,
{
    let n = v0.len();
    let norm0 = v0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return Err(Error::Argument("lanczos: zero start vector".into()));
    }
    let max_iter = max_iter.min(n);
    let mut basis: Vec<Array1<C64>> = Vec::with_capacity(max_iter);
    basis.push(v0.mapv(|z| z / norm0));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    let mut best: Option<(f64, Vec<f64>)> = None;

    for k in 0..max_iter {
        let vk = &basis[k];
        let mut w = apply(vk);
        if k > 0 {
            let b = beta[k - 1];
            w.zip_mut_with(&basis[k - 1], |wi, vi| *wi -= b * vi);
        }
        let a: f64 = vk.iter().zip(w.iter()).map(|(v, w)| (v.conj() * w).re).sum();
        alpha.push(a);
        w.zip_mut_with(vk, |wi, vi| *wi -= a * vi);
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for v in &basis {
                let ov: C64 = v.iter().zip(w.iter()).map(|(vi, wi)| vi.conj() * wi).sum();
                w.zip_mut_with(v, |wi, vi| *wi -= ov * vi);
            }
        }
        let b: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        scale = scale.max(a.abs() + b);
        let last = k + 1 == max_iter || b < 1e-14 * scale.max(1e-300);
        let check = last || k < 16 || (k % 4 == 0);
        if check {
            let (theta, s) = tridiag_smallest(&alpha, &beta)?;
            let resid = b * s[k].abs();
            best = Some((theta, s));
            if resid <= tol * scale.max(theta.abs()) || last {
                let (theta, s) = best.unwrap();
                let mut x = Array1::<C64>::zeros(n);
                for (ci, v) in s.iter().zip(basis.iter()) {
                    x.zip_mut_with(v, |xi, vi| *xi += C64::new(*ci, 0.0) * vi);
                }
                let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                x.mapv_inplace(|z| z / nx);
                return Ok(LanczosResult {
                    value: theta,
                    vector: x,
                    iterations: k + 1,
                    converged: resid <= tol * scale.max(theta.abs()),
                });
            }
        }
        beta.push(b);
        basis.push(w.mapv(|z| z / b));
    }
    // max_iter = 0 or pathological exit.
    let (theta, s) = best.ok_or_else(|| Error::Argument("lanczos: no iterations".into()))?;
    let mut x = Array1::<C64>::zeros(n);
    for (ci, v) in s.iter().zip(basis.iter()) {
        x.zip_mut_with(v, |xi, vi| *xi += C64::new(*ci, 0.0) * vi);
    }
    Ok(LanczosResult { value: theta, vector: x, iterations: alpha.len(), converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let m = Array2::from_shape_fn((n, n), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        hermitize(&m)
    }

    #[test]
    fn eigh_complex_reconstructs() {
        let h = random_hermitian(24, 7);
        let (w, v) = eigh_complex(&h.view()).unwrap();
        // H V = V diag(w)
        let hv = h.dot(&v);
        for j in 0..24 {
            for i in 0..24 {
                let d = hv[[i, j]] - v[[i, j]] * w[j];
                assert!(d.norm() < 1e-10, "residual {}", d.norm());
            }
        }
        for j in 1..24 {
            assert!(w[j] >= w[j - 1]);
        }
    }

    #[test]
    fn eigh_real_matches_complex() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let m = Array2::from_shape_fn((17, 17), |_| rng.gen_range(-1.0..1.0));
        let s = (&m + &m.t()) * 0.5;
        let (wr, vr) = eigh_real(&s.view()).unwrap();
        let sc = s.mapv(|x| C64::new(x, 0.0));
        let wc = eigh_complex_values(&sc.view()).unwrap();
        for i in 0..17 {
            assert!((wr[i] - wc[i]).abs() < 1e-10);
        }
        let sv = s.dot(&vr);
        for j in 0..17 {
            for i in 0..17 {
                assert!((sv[[i, j]] - vr[[i, j]] * wr[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let h = random_hermitian(60, 3);
        let w = eigh_complex_values(&h.view()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let v0 = Array1::from_shape_fn(60, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let res = lanczos_smallest(|x| h.dot(x), &v0, 60, 1e-12).unwrap();
        assert!(res.converged);
        assert!((res.value - w[0]).abs() < 1e-9 * w[0].abs().max(1.0));
        // Residual check on the returned vector.
        let hx = h.dot(&res.vector);
        let r: f64 = hx
            .iter()
            .zip(res.vector.iter())
            .map(|(a, b)| (a - b * res.value).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(r < 1e-8, "residual {}", r);
    }

    #[test]
    fn hermitize_is_projection() {
        let h = random_hermitian(9, 2);
        assert!(hermiticity_error(&h.view()) < 1e-15);
        let h2 = hermitize(&h);
        assert_eq!(h, h2);
    }
}
