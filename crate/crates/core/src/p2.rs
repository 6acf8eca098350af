//! Quadratic Lagrange shape functions on the reference interval [0, 1]
//! with nodes at 0, 1/2, 1.

#[inline]
pub fn shape(s: f64) -> [f64; 3] {
    [
        2.0 * (s - 0.5) * (s - 1.0),
        -4.0 * s * (s - 1.0),
        2.0 * s * (s - 0.5),
    ]
}

/// Derivatives with respect to the reference coordinate.
#[inline]
pub fn shape_deriv(s: f64) -> [f64; 3] {
    [4.0 * s - 3.0, -8.0 * s + 4.0, 4.0 * s - 1.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity_and_nodal() {
        for &s in &[0.0, 0.13, 0.5, 0.77, 1.0] {
            let n = shape(s);
            let d = shape_deriv(s);
            assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(d.iter().sum::<f64>().abs() < 1e-14);
        }
        assert_eq!(shape(0.0), [1.0, 0.0, 0.0]);
        assert_eq!(shape(0.5), [0.0, 1.0, 0.0]);
        assert_eq!(shape(1.0), [0.0, 0.0, 1.0]);
    }
}
