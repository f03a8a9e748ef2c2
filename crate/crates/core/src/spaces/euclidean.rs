//! Euclidean ℝ^d with the L2 metric and straight-line geodesics.

use nalgebra::DVector;

pub fn distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm()
}

pub fn interpolate(a: &DVector<f64>, b: &DVector<f64>, t: f64) -> DVector<f64> {
    a + (b - a) * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagoras() {
        let a = DVector::from_row_slice(&[0.0, 0.0]);
        let b = DVector::from_row_slice(&[3.0, 4.0]);
        assert_eq!(distance(&a, &b), 5.0);
        assert_eq!(distance(&a, &a), 0.0);
    }

    #[test]
    fn straight_line_midpoint() {
        let a = DVector::from_row_slice(&[0.0, 0.0]);
        let b = DVector::from_row_slice(&[2.0, 0.0]);
        let m = interpolate(&a, &b, 0.5);
        assert_eq!(m[0], 1.0);
        assert_eq!(m[1], 0.0);
    }
}
