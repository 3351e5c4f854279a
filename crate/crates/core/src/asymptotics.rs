//! Leading term of the slice formula, remainders, predicted remainder
//! bounds, and empirical rate fits over `ε`-scans.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{self, CountOptions, CountResult};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::scalar::{rational, Rational, Scalar};
use crate::splitter::SplitData;

/// `δ` used for the algebraic-product regime.
pub const DELTA: f64 = 0.1;
/// Default exponent slack for verdicts.
pub const DEFAULT_SLACK: f64 = 0.15;
/// Rows with `|R| < 0.5` somewhere in their interval are not fitted.
pub const MIN_FIT_REMAINDER: f64 = 0.5;
pub const MIN_FIT_ROWS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LeadingTerm {
    pub value: f64,
    /// Standard error from quasi-Monte Carlo slice volumes (0 if analytic).
    pub stderr: f64,
    /// `Σ vol_{n−r}(P_{γ*} ∩ S)`.
    pub slice_sum: f64,
    pub slices: usize,
}

/// Sum of slice volumes `Σ_{γ*} vol_{n−r}(P_{γ*} ∩ S)`.
pub fn slice_sum(sd: &SplitData, domain: &Domain) -> Result<(f64, f64, usize)> {
    let window = counting::slice_window(sd, domain)?;
    let pts = counting::window_points(&window, crate::lattice::point_budget())?;
    let vols: Vec<Result<(f64, f64)>> = pts
        .par_iter()
        .map(|a| domain.slice_volume(&sd.slice_point(a), &sd.v_perp_frame))
        .collect();
    let mut terms = Vec::with_capacity(vols.len());
    let mut var = 0.0;
    for v in vols {
        let (x, se) = v?;
        terms.push(x);
        var += se * se;
    }
    terms.sort_by(f64::total_cmp);
    Ok((terms.iter().sum(), var.sqrt(), pts.len()))
}

/// `ε^{−q}/vol(V^⊥/Γ^⊥) · Σ_{γ*} vol_{n−r}(P_{γ*} ∩ S)`.
pub fn leading_term(sd: &SplitData, domain: &Domain, eps: f64) -> Result<LeadingTerm> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveParameter("epsilon".into()));
    }
    let (sum, se, slices) = slice_sum(sd, domain)?;
    let k = eps.powi(-(sd.q as i32)) / sd.perp_covolume.value;
    Ok(LeadingTerm { value: k * sum, stderr: k * se, slice_sum: sum, slices })
}

/// `[certain − LT, certain + boundary_hits − LT]`.
pub fn remainder(leading: f64, count: &CountResult) -> (f64, f64) {
    let (lo, hi) = count.interval();
    (lo as f64 - leading, hi as f64 - leading)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegimeClass {
    SmoothSlices { n: usize, p: usize, q: usize, r: usize },
    FiberStrictlyConvex { n: usize, p: usize, q: usize, r: usize },
    SliceStrictlyConvex { n: usize, p: usize, q: usize, r: usize },
    BoxAdmissible { n: usize, p: usize, q: usize, r: usize },
    AlgebraicProduct { n: usize, p: usize, q: usize, r: usize, ell: usize, s: usize, t: usize },
}

impl fmt::Display for RegimeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `R_ε = O(ε^{power} |log ε|^{log_degree})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictedBound {
    pub power: f64,
    pub log_degree: f64,
}

impl PredictedBound {
    /// Growth exponent in `1/ε`.
    pub fn growth(&self) -> f64 {
        -self.power
    }
}

impl RegimeClass {
    pub fn tag(&self) -> &'static str {
        match self {
            RegimeClass::SmoothSlices { .. } => "smooth_slices",
            RegimeClass::FiberStrictlyConvex { .. } => "fiber_strictly_convex",
            RegimeClass::SliceStrictlyConvex { .. } => "slice_strictly_convex",
            RegimeClass::BoxAdmissible { .. } => "box_admissible",
            RegimeClass::AlgebraicProduct { .. } => "algebraic_product",
        }
    }

    /// Builds the regime named `tag` with dimensions taken from `sd`.
    /// `ell` and `(s, t)` are only used by `algebraic_product`.
    pub fn from_tag(tag: &str, sd: &SplitData, ell: Option<usize>, st: Option<(usize, usize)>) -> Result<Self> {
        let (n, p, q, r) = (sd.n, sd.p, sd.q, sd.r);
        let regime = match tag {
            "smooth_slices" => RegimeClass::SmoothSlices { n, p, q, r },
            "fiber_strictly_convex" => RegimeClass::FiberStrictlyConvex { n, p, q, r },
            "slice_strictly_convex" => RegimeClass::SliceStrictlyConvex { n, p, q, r },
            "box_admissible" => RegimeClass::BoxAdmissible { n, p, q, r },
            "algebraic_product" => {
                let ell = ell.ok_or_else(|| Error::InconsistentParameters("algebraic_product needs ell".into()))?;
                let (s, t) = st.ok_or_else(|| {
                    Error::InconsistentParameters("algebraic_product needs a number-field lattice".into())
                })?;
                RegimeClass::AlgebraicProduct { n, p, q, r, ell, s, t }
            }
            other => return Err(Error::InconsistentParameters(format!("unknown regime `{other}`"))),
        };
        regime.validate()?;
        Ok(regime)
    }

    fn dims(&self) -> (usize, usize, usize, usize) {
        match *self {
            RegimeClass::SmoothSlices { n, p, q, r }
            | RegimeClass::FiberStrictlyConvex { n, p, q, r }
            | RegimeClass::SliceStrictlyConvex { n, p, q, r }
            | RegimeClass::BoxAdmissible { n, p, q, r }
            | RegimeClass::AlgebraicProduct { n, p, q, r, .. } => (n, p, q, r),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, p, q, r) = self.dims();
        let bad = |m: String| Err(Error::InconsistentParameters(m));
        if p + q != n {
            return bad(format!("p + q = {} but n = {n}", p + q));
        }
        if r > p {
            return bad(format!("r = {r} exceeds p = {p}"));
        }
        if q == 0 {
            return bad("q must be positive".into());
        }
        if let RegimeClass::AlgebraicProduct { ell, s, t, .. } = *self {
            if ell == 0 || ell > n - r {
                return bad(format!("ell = {ell} must lie in 1..={}", n - r));
            }
            if s + 2 * t != n {
                return bad(format!("s + 2t = {} but n = {n}", s + 2 * t));
            }
        }
        Ok(())
    }

    pub fn predicted(&self) -> Result<PredictedBound> {
        self.validate()?;
        let (n, p, q, r) = self.dims();
        let (nf, pf, qf, rf) = (n as f64, p as f64, q as f64, r as f64);
        Ok(match *self {
            RegimeClass::SmoothSlices { .. } => PredictedBound { power: 1.0 / (pf - rf + 1.0) - qf, log_degree: 0.0 },
            RegimeClass::FiberStrictlyConvex { .. } => {
                PredictedBound { power: 2.0 * qf / (qf + 1.0 + 2.0 * (pf - rf)) - qf, log_degree: 0.0 }
            }
            RegimeClass::SliceStrictlyConvex { .. } => {
                PredictedBound { power: 2.0 * qf / (nf - rf + 1.0) - qf, log_degree: 0.0 }
            }
            RegimeClass::BoxAdmissible { .. } => PredictedBound { power: 0.0, log_degree: nf - rf - 1.0 },
            RegimeClass::AlgebraicProduct { ell, s, t, .. } => {
                let k = nf - rf - ell as f64;
                PredictedBound { power: -qf * k / (k + 2.0), log_degree: (s + t) as f64 + DELTA }
            }
        })
    }

    pub fn is_log_regime(&self) -> bool {
        matches!(self, RegimeClass::BoxAdmissible { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub eps: String,
    pub eps_f64: f64,
    pub count_lo: u64,
    pub count_hi: u64,
    pub leading: f64,
    pub rem_lo: f64,
    pub rem_hi: f64,
    pub wall_time_ms: f64,
}

impl ScanRow {
    pub fn new(eps: &Rational, count: &CountResult, leading: f64) -> Self {
        let (lo, hi) = count.interval();
        let (rem_lo, rem_hi) = remainder(leading, count);
        Self {
            eps: rational::format_rational(eps),
            eps_f64: rational::to_f64(eps),
            count_lo: lo,
            count_hi: hi,
            leading,
            rem_lo,
            rem_hi,
            wall_time_ms: count.wall_time_ms,
        }
    }

    fn usable(&self) -> bool {
        // The interval must stay away from (−0.5, 0.5).
        self.rem_lo >= MIN_FIT_REMAINDER || self.rem_hi <= -MIN_FIT_REMAINDER
    }

    fn abs_remainder(&self) -> f64 {
        self.rem_lo.abs().min(self.rem_hi.abs())
    }

    /// Same as `abs_remainder`, but the largest magnitude in the interval.
    fn abs_remainder_max(&self) -> f64 {
        self.rem_lo.abs().max(self.rem_hi.abs())
    }
}

pub const SCAN_CSV_HEADER: &str = "epsilon,count_lo,count_hi,leading,rem_lo,rem_hi";

impl ScanRow {
    /// CSV line without timing, so reruns are byte-identical.
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{:e}",
            self.eps, self.count_lo, self.count_hi, self.leading, self.rem_lo, self.rem_hi
        )
    }
}

/// Least-squares line `y = a + b x`, with `R²`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    // Constant data (up to rounding) is fitted exactly.
    let flat = syy <= 1e-24 * (1.0 + my * my) * n;
    let r2 = if !flat && sxx > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    /// `|R| ≈ C ε^β`.
    pub beta: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub r2: f64,
    pub usable_rows: usize,
    /// For log regimes: degree fitted against `1 + |log₂ ε|` and the
    /// constant `max |R| / (1 + |log₂ ε|)^d` at the predicted degree `d`.
    pub log_degree: Option<f64>,
    pub log_constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub fitted_growth: f64,
    pub predicted_growth: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderScan {
    pub rows: Vec<ScanRow>,
    pub fit: Fit,
    pub regime: RegimeClass,
    pub predicted: PredictedBound,
    pub verdict: Verdict,
    pub delta: f64,
}

fn log_term(eps: f64) -> f64 {
    1.0 + eps.log2().abs()
}

/// Fits the usable rows and compares the fitted growth with the regime's
/// bound: measured growth in `1/ε` may not exceed the predicted growth plus
/// `slack`. For log regimes the predicted power growth is 0.
pub fn fit_rows(rows: &[ScanRow], regime: &RegimeClass, slack: f64) -> Result<(Fit, Verdict)> {
    let predicted = regime.predicted()?;
    let usable: Vec<&ScanRow> = rows.iter().filter(|r| r.usable()).collect();
    if usable.len() < MIN_FIT_ROWS {
        return Err(Error::TooFewUsableRows { usable: usable.len(), required: MIN_FIT_ROWS });
    }
    let mut pts: Vec<(f64, f64, f64)> = usable
        .iter()
        .map(|r| (-r.eps_f64.ln(), r.abs_remainder().ln(), log_term(r.eps_f64)))
        .collect();
    // Order-independent sums.
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (a, b, r2) = linear_fit(&xs, &ys);
    let (log_degree, log_constant) = if regime.is_log_regime() {
        let lx: Vec<f64> = pts.iter().map(|p| p.2.ln()).collect();
        let (_, d, _) = linear_fit(&lx, &ys);
        let c = rows
            .iter()
            .map(|r| r.abs_remainder_max() / log_term(r.eps_f64).powf(predicted.log_degree))
            .fold(0.0, f64::max);
        (Some(d), Some(c))
    } else {
        (None, None)
    };
    let fit = Fit { beta: -b, c: a.exp(), r2, usable_rows: usable.len(), log_degree, log_constant };
    let verdict = Verdict {
        pass: b <= predicted.growth() + slack,
        fitted_growth: b,
        predicted_growth: predicted.growth(),
        slack,
    };
    Ok((fit, verdict))
}

/// Counts and leading terms for every `ε`, in decreasing `ε` order.
pub fn scan(sd: &SplitData, domain: &Domain, eps_list: &[Rational], opts: &CountOptions) -> Result<Vec<ScanRow>> {
    let mut eps: Vec<Rational> = eps_list.to_vec();
    eps.sort_by(|a, b| b.cmp(a));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InconsistentParameters("epsilon values must be distinct".into()));
    }
    let zero = Rational::from_integer(0.into());
    if eps.iter().any(|e| *e <= zero) {
        return Err(Error::NonPositiveParameter("epsilon".into()));
    }
    let (sum, _, _) = slice_sum(sd, domain)?;
    let vz = vec![Scalar::zero(); sd.n];
    let rows: Vec<Result<ScanRow>> = eps
        .par_iter()
        .map(|e| {
            let c = counting::count(sd, domain, e, &vz, opts)?;
            let lt = rational::to_f64(e).powi(-(sd.q as i32)) / sd.perp_covolume.value * sum;
            Ok(ScanRow::new(e, &c, lt))
        })
        .collect();
    rows.into_iter().collect()
}

pub fn scan_and_fit(
    sd: &SplitData,
    domain: &Domain,
    eps_list: &[Rational],
    regime: &RegimeClass,
    opts: &CountOptions,
    slack: f64,
) -> Result<RemainderScan> {
    let predicted = regime.predicted()?;
    let rows = scan(sd, domain, eps_list, opts)?;
    let (fit, verdict) = fit_rows(&rows, regime, slack)?;
    Ok(RemainderScan { rows, fit, regime: regime.clone(), predicted, verdict, delta: DELTA })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::scalar::rat;
    use crate::splitter::split;
    use crate::subspace::Subspace;

    fn s(p: i64, q: i64) -> Scalar {
        Scalar::Rat(rat(p, q))
    }

    #[test]
    fn strip_leading_term() {
        let sd = split(&Lattice::integer(2), &Subspace::axes(2, &[0]).unwrap()).unwrap();
        let strip = Domain::axis_box(vec![s(1, 2), s(1, 2)], vec![s(1, 1), s(1, 2)]).unwrap();
        let lt = leading_term(&sd, &strip, 0.1).unwrap();
        assert!((lt.value - 20.0).abs() < 1e-12);
        let c = counting::count_sliced(&sd, &strip, &rat(1, 10), &CountOptions::default()).unwrap();
        let (lo, hi) = remainder(lt.value, &c);
        assert!((lo + 2.0).abs() < 1e-12 && (hi + 2.0).abs() < 1e-12);
    }

    #[test]
    fn slope_two_chord_sum() {
        let sd = split(&Lattice::integer(2), &Subspace::from_ints(&[vec![1, 2]], 2).unwrap()).unwrap();
        let lt = leading_term(&sd, &Domain::unit_ball(2), 1.0).unwrap();
        let oracle: f64 = (-2i32..=2).map(|m| 2.0 * (1.0 - f64::from(m * m) / 5.0).sqrt()).sum::<f64>() / 5f64.sqrt();
        assert!((lt.value - oracle).abs() < 1e-12);
        assert!((oracle - 3.29443).abs() < 1e-5);
    }

    #[test]
    fn predicted_exponents() {
        let r = RegimeClass::SliceStrictlyConvex { n: 2, p: 1, q: 1, r: 0 };
        assert!((r.predicted().unwrap().power + 1.0 / 3.0).abs() < 1e-15);
        let b = RegimeClass::BoxAdmissible { n: 2, p: 1, q: 1, r: 0 };
        assert_eq!(b.predicted().unwrap().log_degree, 1.0);
        let a = RegimeClass::AlgebraicProduct { n: 3, p: 1, q: 2, r: 1, ell: 1, s: 1, t: 1 };
        // r = p: −q(q−ℓ)/(q−ℓ+2)
        assert!((a.predicted().unwrap().power + 2.0 / 3.0).abs() < 1e-15);
        let bad = RegimeClass::SmoothSlices { n: 2, p: 1, q: 1, r: 2 };
        assert!(matches!(bad.predicted(), Err(Error::InconsistentParameters(_))));
    }

    #[test]
    fn fit_recovers_power_law() {
        let rows: Vec<ScanRow> = (1..8)
            .map(|k| {
                let e = 2f64.powi(-k);
                let r = 3.0 * e.powf(-0.4);
                ScanRow {
                    eps: format!("1/{}", 1 << k),
                    eps_f64: e,
                    count_lo: 0,
                    count_hi: 0,
                    leading: 0.0,
                    rem_lo: r,
                    rem_hi: r,
                    wall_time_ms: 0.0,
                }
            })
            .collect();
        let reg = RegimeClass::SliceStrictlyConvex { n: 2, p: 1, q: 1, r: 0 };
        let (fit, verdict) = fit_rows(&rows, &reg, 0.15).unwrap();
        assert!((fit.beta + 0.4).abs() < 1e-12 && (fit.c - 3.0).abs() < 1e-9);
        assert!(verdict.pass);
        let mut rev = rows.clone();
        rev.reverse();
        assert_eq!(fit_rows(&rev, &reg, 0.15).unwrap().0, fit);
        assert!(matches!(fit_rows(&rows[..3], &reg, 0.15), Err(Error::TooFewUsableRows { usable: 3, .. })));
    }
}
