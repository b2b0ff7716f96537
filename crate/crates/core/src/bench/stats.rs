use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided Wilcoxon signed-rank p-value for paired samples.
///
/// Zero differences are dropped; ties get midranks and the variance is
/// corrected for them; the normal approximation uses a 0.5 continuity
/// correction. Identical samples give 1.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<f64> {
    let mut d: Vec<f64> = pairs
        .iter()
        .map(|(a, b)| a - b)
        .filter(|x| *x != 0.0)
        .collect();
    if d.is_empty() && !pairs.is_empty() {
        return Ok(1.0);
    }
    if d.len() < 6 {
        return Err(Error::Precondition(format!(
            "{} non-tied pairs; at least 6 needed",
            d.len()
        )));
    }
    d.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = d.len();
    let (mut r_plus, mut r_minus, mut tie_term) = (0.0, 0.0, 0.0);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[j + 1].abs() == d[i].abs() {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * (t * t - 1.0);
        for x in &d[i..=j] {
            if *x > 0.0 {
                r_plus += rank;
            } else {
                r_minus += rank;
            }
        }
        i = j + 1;
    }
    let nf = n as f64;
    let stat: f64 = f64::min(r_plus, r_minus);
    let mean = nf * (nf + 1.0) / 4.0;
    let var = (nf * (nf + 1.0) * (2.0 * nf + 1.0) - 0.5 * tie_term) / 24.0;
    if var <= 0.0 {
        return Ok(1.0);
    }
    let diff = stat - mean;
    let z = (diff - 0.5 * diff.signum()) / var.sqrt();
    let normal = Normal::standard();
    Ok((2.0 * normal.sf(z.abs())).min(1.0))
}
