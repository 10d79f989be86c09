use num_traits::{Signed, Zero};

use crate::rational::{to_f64, Rational};

use super::MeasureError;

fn check_lengths(a: usize, b: usize) -> Result<(), MeasureError> {
    if a != b {
        return Err(MeasureError::LengthMismatch(a, b));
    }
    if a < 2 {
        return Err(MeasureError::TooFewPoints);
    }
    Ok(())
}

/// Pearson correlation of two exact sequences. Sums of squares are exact;
/// only the final square root is taken in floating point.
pub fn pearson(xs: &[Rational], ys: &[Rational]) -> Result<f64, MeasureError> {
    check_lengths(xs.len(), ys.len())?;
    let n = Rational::from_integer(xs.len().into());
    let mx: Rational = xs.iter().sum::<Rational>() / &n;
    let my: Rational = ys.iter().sum::<Rational>() / &n;
    let (mut sxy, mut sxx, mut syy) = (Rational::zero(), Rational::zero(), Rational::zero());
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - &mx;
        let dy = y - &my;
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    if sxx.is_zero() || syy.is_zero() {
        return Err(MeasureError::ZeroVariance);
    }
    let r2 = to_f64(&(&sxy * &sxy / (sxx * syy)));
    let r = r2.sqrt().min(1.0);
    Ok(if sxy.is_negative() { -r } else { r })
}

/// Pearson correlation of two floating-point sequences (two-pass).
pub fn pearson_f64(xs: &[f64], ys: &[f64]) -> Result<f64, MeasureError> {
    check_lengths(xs.len(), ys.len())?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MeasureError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_u64, ratio};

    #[test]
    fn perfect_correlations() {
        let xs = vec![from_u64(0), ratio(1, 2), from_u64(1)];
        assert_eq!(pearson(&xs, &xs).unwrap(), 1.0);
        assert_eq!(pearson(&[from_u64(0), from_u64(1)], &[from_u64(1), from_u64(0)]).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_inputs() {
        let c = vec![from_u64(1), from_u64(1)];
        assert_eq!(pearson(&c, &[from_u64(0), from_u64(1)]), Err(MeasureError::ZeroVariance));
        assert_eq!(pearson(&c, &c[..1]), Err(MeasureError::LengthMismatch(2, 1)));
        assert_eq!(pearson(&c[..1], &c[..1]), Err(MeasureError::TooFewPoints));
    }

    #[test]
    fn exact_and_float_agree() {
        let xs: Vec<u64> = vec![3, 1, 4, 1, 5, 9, 2, 6];
        let ys: Vec<u64> = vec![2, 7, 1, 8, 2, 8, 1, 8];
        let exact = pearson(
            &xs.iter().map(|&v| from_u64(v)).collect::<Vec<_>>(),
            &ys.iter().map(|&v| from_u64(v)).collect::<Vec<_>>(),
        )
        .unwrap();
        let float = pearson_f64(
            &xs.iter().map(|&v| v as f64).collect::<Vec<_>>(),
            &ys.iter().map(|&v| v as f64).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((exact - float).abs() < 1e-12);
    }
}
