use crate::error::{Error, Result};

/// Least-squares slope of `log error` against `log h`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub order: f64,
    /// Levels actually used in the fit.
    pub used: usize,
    /// Indices of levels dropped because their error was not positive.
    pub skipped: Vec<usize>,
}

pub fn estimate_order(errors: &[f64], hs: &[f64]) -> Result<OrderEstimate> {
    if errors.len() != hs.len() {
        return Err(Error::Profile(format!(
            "{} errors for {} step sizes",
            errors.len(),
            hs.len()
        )));
    }
    let mut skipped = Vec::new();
    let mut pts = Vec::new();
    for (i, (e, h)) in errors.iter().zip(hs).enumerate() {
        if *e > 0.0 && e.is_finite() && *h > 0.0 {
            pts.push((h.ln(), e.ln()));
        } else {
            skipped.push(i);
        }
    }
    if pts.len() < 2 {
        return Err(Error::Profile(format!(
            "need at least two positive errors, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Profile("step sizes must not all be equal".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(OrderEstimate {
        order: sxy / sxx,
        used: pts.len(),
        skipped,
    })
}
