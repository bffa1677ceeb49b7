//! The interpretable linear model both explainers fit, plus feature
//! selection: forward selection for datasets with fewer than 6 features,
//! highest absolute coefficients otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{DlimeError, Result};

/// Ridge damping applied to the normal equations for rank safety.
pub const RIDGE_LAMBDA: f64 = 1e-6;

/// Feature count below which forward selection is used.
pub const FORWARD_SELECTION_LIMIT: usize = 6;

/// Fitted linear model y = intercept + coefficients . x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearSurrogate {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub training_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Forward,
    HighestWeights,
}

/// Which features made it into the explanation, in report order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub mode: SelectionMode,
    pub k: usize,
    pub selected: Vec<usize>,
    /// Set when the requested K exceeded the feature count.
    pub clamped: bool,
}

/// Minimize sum_i w_i (y_i - a - b.x_i)^2 via the damped normal equations
/// (X'WX + lambda I) beta = X'Wy, solved with Gaussian elimination under
/// partial pivoting. Deterministic.
pub fn fit_weighted_least_squares(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
) -> Result<LinearSurrogate> {
    let s = x.len();
    if s == 0 || y.len() != s || w.len() != s {
        return Err(DlimeError::Data(format!(
            "inconsistent system: {} rows, {} responses, {} weights",
            s,
            y.len(),
            w.len()
        )));
    }
    if w.iter().any(|&wi| wi < 0.0) {
        return Err(DlimeError::Data("negative sample weight".into()));
    }
    if !w.iter().any(|&wi| wi > 0.0) {
        return Err(DlimeError::Data("all sample weights are zero".into()));
    }
    let m = x[0].len();
    if x.iter().any(|r| r.len() != m) {
        return Err(DlimeError::Data("ragged design matrix".into()));
    }

    // Augmented system over [intercept, coefficients].
    let p = m + 1;
    let mut ata = vec![vec![0.0f64; p]; p];
    let mut atb = vec![0.0f64; p];
    for i in 0..s {
        let wi = w[i];
        if wi == 0.0 {
            continue;
        }
        let mut xi = Vec::with_capacity(p);
        xi.push(1.0);
        xi.extend_from_slice(&x[i]);
        for a in 0..p {
            let wxa = wi * xi[a];
            for (b, &xib) in xi.iter().enumerate() {
                ata[a][b] += wxa * xib;
            }
            atb[a] += wxa * y[i];
        }
    }
    let mut damped = ata.clone();
    for (a, row) in damped.iter_mut().enumerate() {
        row[a] += RIDGE_LAMBDA;
    }

    // Solve the damped system, then refine against the undamped normal
    // equations. The RHS lies in the range of X'WX, so refinement stays
    // bounded even for rank-deficient designs while removing the
    // lambda-sized bias on well-conditioned ones.
    let solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let mut a = damped.clone();
        let mut b = rhs.to_vec();
        solve_linear_system(&mut a, &mut b)
    };
    let mut beta = solve(&atb)?;
    for _ in 0..3 {
        let residual: Vec<f64> = (0..p)
            .map(|i| atb[i] - ata[i].iter().zip(&beta).map(|(a, x)| a * x).sum::<f64>())
            .collect();
        let delta = solve(&residual)?;
        for (b, d) in beta.iter_mut().zip(&delta) {
            *b += d;
        }
    }

    // Weighted R^2 against the weighted mean.
    let wsum: f64 = w.iter().sum();
    let ybar = y.iter().zip(w).map(|(yi, wi)| yi * wi).sum::<f64>() / wsum;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for i in 0..s {
        let pred = beta[0] + x[i].iter().zip(&beta[1..]).map(|(xi, b)| xi * b).sum::<f64>();
        rss += w[i] * (y[i] - pred).powi(2);
        tss += w[i] * (y[i] - ybar).powi(2);
    }
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    Ok(LinearSurrogate {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        r_squared: r_squared.min(1.0),
        training_size: s,
    })
}

/// In-place Gaussian elimination with partial pivoting.
fn solve_linear_system(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return Err(DlimeError::Internal("singular normal equations".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

fn columns(x: &[Vec<f64>], which: &[usize]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| which.iter().map(|&j| row[j]).collect())
        .collect()
}

fn weighted_rss(x: &[Vec<f64>], y: &[f64], w: &[f64], fit: &LinearSurrogate) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((xi, yi), wi)| {
            let pred = fit.intercept
                + xi.iter().zip(&fit.coefficients).map(|(a, b)| a * b).sum::<f64>();
            wi * (yi - pred).powi(2)
        })
        .sum()
}

/// Pick the K explanation features. Fewer than 6 features: greedy forward
/// selection minimizing weighted RSS, ties to the lower index, reported in
/// selection order. Otherwise: fit on everything and take the K largest
/// |coefficient|, ties to the lower index, reported by descending magnitude.
pub fn select_features(x: &[Vec<f64>], y: &[f64], w: &[f64], k: usize) -> Result<FeatureSelection> {
    if k == 0 {
        return Err(DlimeError::Usage("K must be at least 1".into()));
    }
    let m = x
        .first()
        .map(|r| r.len())
        .ok_or_else(|| DlimeError::Data("empty sample set".into()))?;
    let clamped = k > m;
    let k = k.min(m);

    if m < FORWARD_SELECTION_LIMIT {
        let mut selected: Vec<usize> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..m {
                if selected.contains(&j) {
                    continue;
                }
                let mut trial = selected.clone();
                trial.push(j);
                let fit = fit_weighted_least_squares(&columns(x, &trial), y, w)?;
                let rss = weighted_rss(&columns(x, &trial), y, w, &fit);
                // Strict < keeps the lowest index on ties.
                if best.map(|(b, _)| rss < b).unwrap_or(true) {
                    best = Some((rss, j));
                }
            }
            selected.push(best.unwrap().1);
        }
        Ok(FeatureSelection {
            mode: SelectionMode::Forward,
            k,
            selected,
            clamped,
        })
    } else {
        let fit = fit_weighted_least_squares(x, y, w)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            fit.coefficients[b]
                .abs()
                .partial_cmp(&fit.coefficients[a].abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        order.truncate(k);
        Ok(FeatureSelection {
            mode: SelectionMode::HighestWeights,
            k,
            selected: order,
            clamped,
        })
    }
}

/// Refit the surrogate on the selected columns only and pair each selected
/// feature name with its refit coefficient. The refit model is what the bar
/// chart shows, so its coefficients are what gets reported.
pub fn explanation_entries(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    sel: &FeatureSelection,
    feature_names: &[String],
) -> Result<(Vec<(String, f64)>, LinearSurrogate)> {
    let refit = fit_weighted_least_squares(&columns(x, &sel.selected), y, w)?;
    let entries = sel
        .selected
        .iter()
        .zip(&refit.coefficients)
        .map(|(&j, &c)| (feature_names[j].clone(), c))
        .collect();
    Ok((entries, refit))
}
