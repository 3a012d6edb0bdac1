macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {:e})", $tol);
    }};
}

macro_rules! assert_cclose {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (num_complex::Complex64, num_complex::Complex64) = ($a, $b);
        assert!((a - b).norm() <= $tol, "{a} vs {b} (tol {:e})", $tol);
    }};
}
