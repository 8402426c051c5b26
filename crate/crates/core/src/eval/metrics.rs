use crate::error::{Error, Result};

fn check_lengths(predictions: &[u8], labels: &[u8]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    Ok(())
}

/// Number of mismatched labels.
pub fn zero_one_total(predictions: &[u8], labels: &[u8]) -> Result<usize> {
    check_lengths(predictions, labels)?;
    Ok(predictions.iter().zip(labels).filter(|(p, y)| p != y).count())
}

/// Misclassification rate in percent. Empty input is an error.
pub fn error_percent(predictions: &[u8], labels: &[u8]) -> Result<f64> {
    let wrong = zero_one_total(predictions, labels)?;
    if labels.is_empty() {
        return Err(Error::Data("error rate of an empty set".into()));
    }
    Ok(100.0 * wrong as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(zero_one_total(&[1, 0, 1], &[1, 0, 1]).unwrap(), 0);
        assert_eq!(zero_one_total(&[1; 7], &[0; 7]).unwrap(), 7);
        assert_eq!(error_percent(&[1, 0, 0, 0], &[0, 0, 0, 0]).unwrap(), 25.0);
        assert_eq!(error_percent(&[1, 1], &[1, 1]).unwrap(), 0.0);
        assert!(zero_one_total(&[1], &[1, 0]).is_err());
        assert!(error_percent(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn percent_is_scaled_count(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200)) {
            let (p, y): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let total = zero_one_total(&p, &y).unwrap();
            let pct = error_percent(&p, &y).unwrap();
            prop_assert!((pct * y.len() as f64 / 100.0 - total as f64).abs() < 1e-9);
        }
    }
}
