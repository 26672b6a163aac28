//! Exercise the C ABI from Rust: handle lifecycle, status codes, and the
//! numerical round trip through the boundary.

use std::ffi::{c_char, CStr, CString};

use skelkit_ffi::*;

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(sk_last_error_message())
            .to_string_lossy()
            .into_owned()
    }
}

/// Dense rank-3 test matrix, row-major.
fn dense_rank3(m: usize, n: usize) -> Vec<f64> {
    let mut data = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            let x = (i + 1) as f64;
            let y = (j + 1) as f64;
            data[i * n + j] = 3.0 * x * y
                + 2.0 * (x * 0.5).sin() * (y * 0.3).cos()
                + ((i % 4) as f64) * ((j % 3) as f64);
        }
    }
    data
}

#[test]
fn full_pipeline_through_the_abi() {
    unsafe {
        let (m, n, k) = (30usize, 24usize, 3usize);
        let data = dense_rank3(m, n);

        let mut mat: *mut SkMatrix = std::ptr::null_mut();
        let st = sk_matrix_from_dense(m, n, data.as_ptr(), data.len(), &mut mat);
        assert_eq!(st, SkStatus::Ok, "{}", last_error());
        assert_eq!(sk_matrix_rows(mat), m);
        assert_eq!(sk_matrix_cols(mat), n);
        assert_eq!(sk_matrix_nnz(mat), m * n);

        let mut skel: *mut SkSkeleton = std::ptr::null_mut();
        let st = sk_select(mat, SkAlgorithm::RandLupp, k, 42, &mut skel);
        assert_eq!(st, SkStatus::Ok, "{}", last_error());
        assert_eq!(sk_skeleton_rank(skel), k);

        let mut cols = vec![usize::MAX; k];
        assert_eq!(
            sk_skeleton_col_indices(skel, cols.as_mut_ptr(), k),
            SkStatus::Ok
        );
        assert!(cols.iter().all(|&j| j < n));
        let mut rows = vec![usize::MAX; k];
        assert_eq!(
            sk_skeleton_row_indices(skel, rows.as_mut_ptr(), k),
            SkStatus::Ok
        );
        assert!(rows.iter().all(|&i| i < m));

        let mut eta = 0.0f64;
        assert_eq!(sk_skeleton_eta_col(skel, &mut eta), SkStatus::Ok);
        assert!(eta >= 1.0);

        let mut name = [0 as c_char; 32];
        assert_eq!(
            sk_skeleton_algorithm(skel, name.as_mut_ptr(), name.len()),
            SkStatus::Ok
        );
        let name = CStr::from_ptr(name.as_ptr()).to_str().unwrap();
        assert_eq!(name, "rand-lupp");

        let mut fac: *mut SkFactors = std::ptr::null_mut();
        let st = sk_build_cur(mat, skel, &mut fac);
        assert_eq!(st, SkStatus::Ok, "{}", last_error());
        assert_eq!(sk_factors_rank(fac), k);
        assert_eq!((sk_factors_rows(fac), sk_factors_cols(fac)), (m, n));

        // the input has exact rank <= 3, so the CUR must reproduce it
        let mut recon = vec![0.0f64; m * n];
        assert_eq!(
            sk_factors_reconstruct(fac, recon.as_mut_ptr(), recon.len()),
            SkStatus::Ok
        );
        let err2: f64 = data
            .iter()
            .zip(&recon)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let norm2: f64 = data.iter().map(|a| a * a).sum();
        assert!(err2.sqrt() <= 1e-8 * norm2.sqrt());

        // apply agrees with the densified reconstruction
        let x: Vec<f64> = (0..n).map(|j| ((j * 7) % 5) as f64 - 2.0).collect();
        let mut y = vec![0.0f64; m];
        assert_eq!(
            sk_factors_apply(fac, x.as_ptr(), n, y.as_mut_ptr(), m),
            SkStatus::Ok
        );
        for i in 0..m {
            let direct: f64 = (0..n).map(|j| recon[i * n + j] * x[j]).sum();
            assert!((y[i] - direct).abs() <= 1e-9 * norm2.sqrt());
        }

        let mut err = 0.0;
        let mut opt = 0.0;
        let mut ratio = 0.0;
        assert_eq!(
            sk_factors_error(
                mat,
                fac,
                k,
                SkNorm::Frobenius,
                &mut err,
                &mut opt,
                &mut ratio
            ),
            SkStatus::Ok
        );
        assert!(ratio >= 1.0 - 1e-9);

        sk_factors_free(fac);
        sk_skeleton_free(skel);
        sk_matrix_free(mat);
    }
}

#[test]
fn error_paths_set_codes_and_messages() {
    unsafe {
        // null pointers
        let mut out: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_from_dense(2, 2, std::ptr::null(), 4, &mut out),
            SkStatus::NullPointer
        );

        // shape mismatch
        let data = [1.0, 2.0];
        assert_eq!(
            sk_matrix_from_dense(2, 2, data.as_ptr(), 2, &mut out),
            SkStatus::DimensionMismatch
        );
        assert!(last_error().contains("rows * cols"));

        // invalid selection rank
        let data = dense_rank3(8, 8);
        let mut mat: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_from_dense(8, 8, data.as_ptr(), 64, &mut mat),
            SkStatus::Ok
        );
        let mut skel: *mut SkSkeleton = std::ptr::null_mut();
        assert_eq!(
            sk_select(mat, SkAlgorithm::RandLupp, 0, 1, &mut skel),
            SkStatus::InvalidArgument
        );
        // rank 6 > numerical rank 3: the sketch cannot have full row rank
        assert_eq!(
            sk_select(mat, SkAlgorithm::RandLupp, 6, 1, &mut skel),
            SkStatus::RankDeficient
        );
        assert!(!last_error().is_empty());
        sk_matrix_free(mat);

        // missing file
        let path = CString::new("/nonexistent/skelkit.mtx").unwrap();
        assert_eq!(
            sk_matrix_from_matrix_market(path.as_ptr(), &mut out),
            SkStatus::IoError
        );

        // buffer too small
        let data = dense_rank3(10, 10);
        let mut mat: *mut SkMatrix = std::ptr::null_mut();
        sk_matrix_from_dense(10, 10, data.as_ptr(), 100, &mut mat);
        let mut skel: *mut SkSkeleton = std::ptr::null_mut();
        assert_eq!(
            sk_select(mat, SkAlgorithm::RandCpqr, 3, 9, &mut skel),
            SkStatus::Ok
        );
        let mut tiny = [0usize; 1];
        assert_eq!(
            sk_skeleton_col_indices(skel, tiny.as_mut_ptr(), 1),
            SkStatus::BufferTooSmall
        );
        sk_skeleton_free(skel);
        sk_matrix_free(mat);

        // frees tolerate null
        sk_matrix_free(std::ptr::null_mut());
        sk_skeleton_free(std::ptr::null_mut());
        sk_factors_free(std::ptr::null_mut());
    }
}

#[test]
fn snn_and_triplets_and_market_round_trip() {
    unsafe {
        let weights = [2.0f64, 1.0, 0.5];
        let mut mat: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_snn(20, 18, weights.as_ptr(), 3, 0.2, 9, &mut mat),
            SkStatus::Ok
        );
        assert!(sk_matrix_nnz(mat) > 0);

        let dir = std::env::temp_dir().join(format!("skelkit-ffi-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = CString::new(dir.join("snn.mtx").display().to_string()).unwrap();
        assert_eq!(
            sk_matrix_write_matrix_market(mat, path.as_ptr()),
            SkStatus::Ok
        );
        let mut back: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_from_matrix_market(path.as_ptr(), &mut back),
            SkStatus::Ok
        );
        assert_eq!(sk_matrix_nnz(back), sk_matrix_nnz(mat));
        sk_matrix_free(back);
        sk_matrix_free(mat);

        let rows = [0usize, 1, 2];
        let cols = [0usize, 1, 0];
        let vals = [1.0f64, 2.0, 3.0];
        let mut sp: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_from_triplets(
                3,
                2,
                rows.as_ptr(),
                cols.as_ptr(),
                vals.as_ptr(),
                3,
                &mut sp
            ),
            SkStatus::Ok
        );
        assert_eq!(sk_matrix_nnz(sp), 3);
        sk_matrix_free(sp);
        std::fs::remove_dir_all(&dir).ok();
    }
}

#[test]
fn streaming_selection_counts_one_pass() {
    unsafe {
        let data = dense_rank3(40, 30);
        let mut mat: *mut SkMatrix = std::ptr::null_mut();
        assert_eq!(
            sk_matrix_from_dense(40, 30, data.as_ptr(), 1200, &mut mat),
            SkStatus::Ok
        );
        assert_eq!(sk_matrix_passes(mat), 0);
        let mut skel: *mut SkSkeleton = std::ptr::null_mut();
        assert_eq!(
            sk_select(mat, SkAlgorithm::StreamingLupp, 3, 5, &mut skel),
            SkStatus::Ok
        );
        assert_eq!(sk_matrix_passes(mat), 1);
        let mut doc = vec![0 as c_char; 4096];
        let mut written = 0usize;
        assert_eq!(
            sk_skeleton_document(skel, doc.as_mut_ptr(), doc.len(), &mut written),
            SkStatus::Ok
        );
        assert!(written > 0);
        sk_skeleton_free(skel);
        sk_matrix_free(mat);
    }
}
