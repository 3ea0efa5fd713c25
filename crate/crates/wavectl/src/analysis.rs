//! Small statistics over recorded time series: oscillation frequency from
//! zero crossings and response amplitudes.

use crate::error::{Error, Result};

/// Estimates the angular frequency of an oscillating signal from its zero
/// crossings (linearly interpolated). Needs at least two crossings.
pub fn estimate_frequency(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Analysis(
            "frequency fit needs matching, non-trivial series".into(),
        ));
    }
    let mut crossings = Vec::new();
    for i in 1..values.len() {
        let (v0, v1) = (values[i - 1], values[i]);
        if v0 == 0.0 {
            crossings.push(times[i - 1]);
        } else if v0 * v1 < 0.0 {
            let frac = v0 / (v0 - v1);
            crossings.push(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    if crossings.len() < 2 {
        return Err(Error::Analysis(format!(
            "frequency fit needs >= 2 zero crossings, found {}",
            crossings.len()
        )));
    }
    // Consecutive crossings are half a period apart.
    let half_periods = crossings.len() - 1;
    let mean_half = (crossings[crossings.len() - 1] - crossings[0]) / half_periods as f64;
    Ok(std::f64::consts::PI / mean_half)
}

/// Largest absolute value of the signal; the response amplitude of a driven
/// run over its recorded window.
pub fn peak_amplitude(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Largest pointwise absolute difference between two equally sampled series.
pub fn max_abs_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Analysis(format!(
            "series lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_a_cosine_frequency() {
        let times: Vec<f64> = (0..2000).map(|i| i as f64 * 0.01).collect();
        let values: Vec<f64> = times.iter().map(|t| (1.7 * t).cos()).collect();
        let f = estimate_frequency(&times, &values).unwrap();
        assert_abs_diff_eq!(f, 1.7, epsilon = 1e-3);
    }

    #[test]
    fn refuses_monotone_series() {
        let times = [0.0, 1.0, 2.0];
        let values = [1.0, 2.0, 3.0];
        assert!(estimate_frequency(&times, &values).is_err());
    }

    #[test]
    fn amplitude_is_the_absolute_peak() {
        assert_eq!(peak_amplitude(&[0.1, -2.5, 1.0]), 2.5);
    }
}
