//! Region profiles `|x3| <= f(r)` and the comparison-chain probabilities they generate.
//!
//! A profile with floor `L` yields, for every level `m >= L + 1`, the up-probability
//!
//! ```text
//! p_m = 1/2 + f(e^{m+1})^2 / (4 e^{2m-2})
//! ```
//!
//! which is admissible when the excess over 1/2 stays below 1/2. Everything is evaluated
//! through `ln f` at a log-radius, since `f(e^{m+1})` overflows for `m` beyond ~700.

use std::cmp::Ordering;
use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `e^4`, the constant that shows up in every closed-form `p_m`.
pub const E4: f64 = E * E * E * E;

/// Radius on which `|ln(x + 1/2) - ln(1/2)| <= 3|x|` is used.
pub const TAYLOR_RADIUS: f64 = 1.0 / 6.0;

/// Lowest floor on which `f1` and `f2` are finite and non-decreasing.
pub const CLOSED_FORM_MIN_FLOOR: i64 = 2;

/// Number of leading levels checked directly before the monotone tail takes over.
const DIRECT_CHECK_SPAN: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `c r / sqrt(log r * log log r)`
    F1,
    /// `c r / (sqrt(log r) * log log r)`
    F2,
    Custom,
}

/// Monotone table of `(ln r, f)` nodes, linearly interpolated in `ln r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTable {
    nodes: Vec<(f64, f64)>,
}

impl LogTable {
    /// Builds a table from `(r, f(r))` pairs.
    pub fn from_radii(points: &[(f64, f64)]) -> Result<Self> {
        let mut nodes = Vec::with_capacity(points.len());
        for &(r, f) in points {
            if !(r > 0.0) {
                return Err(Error::validation(format!("table radius {r} must be positive")));
            }
            nodes.push((r.ln(), f));
        }
        Self::from_log_radii(nodes)
    }

    /// Builds a table from `(ln r, f)` pairs.
    pub fn from_log_radii(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::validation("custom profile needs at least two nodes"));
        }
        for w in nodes.windows(2) {
            let ((u0, f0), (u1, f1)) = (w[0], w[1]);
            if !(u1 > u0) {
                return Err(Error::validation("custom profile radii must be strictly increasing"));
            }
            if f1 < f0 {
                return Err(Error::validation(format!(
                    "custom profile must be non-decreasing (f drops from {f0} to {f1})"
                )));
            }
        }
        if let Some(&(_, f)) = nodes.iter().find(|(_, f)| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::validation(format!(
                "custom profile value {f} must be finite and non-negative"
            )));
        }
        Ok(LogTable { nodes })
    }

    /// The log-radius interval covered by the table.
    pub fn log_range(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    fn eval(&self, u: f64) -> Option<f64> {
        let (lo, hi) = self.log_range();
        if !(u >= lo && u <= hi) {
            return None;
        }
        let idx = self.nodes.partition_point(|&(x, _)| x <= u);
        if idx == 0 {
            return Some(self.nodes[0].1);
        }
        if idx == self.nodes.len() {
            return Some(self.nodes[idx - 1].1);
        }
        let (u0, f0) = self.nodes[idx - 1];
        let (u1, f1) = self.nodes[idx];
        let w = (u - u0) / (u1 - u0);
        Some(f0 + w * (f1 - f0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    F1,
    F2,
    Custom(LogTable),
}

impl Profile {
    pub fn kind(&self) -> ProfileKind {
        match self {
            Profile::F1 => ProfileKind::F1,
            Profile::F2 => ProfileKind::F2,
            Profile::Custom(_) => ProfileKind::Custom,
        }
    }
}

/// A region profile together with its scale `c` and floor `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    profile: Profile,
    c: f64,
    floor: i64,
}

impl Envelope {
    pub fn f1(c: f64, floor: i64) -> Result<Self> {
        Self::closed_form(Profile::F1, c, floor)
    }

    pub fn f2(c: f64, floor: i64) -> Result<Self> {
        Self::closed_form(Profile::F2, c, floor)
    }

    /// Closed-form profile by kind; `Custom` is rejected here.
    pub fn from_kind(kind: ProfileKind, c: f64, floor: i64) -> Result<Self> {
        match kind {
            ProfileKind::F1 => Self::f1(c, floor),
            ProfileKind::F2 => Self::f2(c, floor),
            ProfileKind::Custom => Err(Error::validation("custom envelopes need a table")),
        }
    }

    fn closed_form(profile: Profile, c: f64, floor: i64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::validation(format!("scale c = {c} must be positive")));
        }
        // d ln f / d ln r > 0 on [e^L, inf) iff L >= 2 for both profiles.
        if floor < CLOSED_FORM_MIN_FLOOR {
            return Err(Error::domain(format!(
                "floor L = {floor}: the profile is only finite and non-decreasing on [e^L, inf) for L >= {CLOSED_FORM_MIN_FLOOR}"
            )));
        }
        Ok(Envelope { profile, c, floor })
    }

    /// Tabulated profile scaled by `c`. The table must cover `ln r = L`.
    pub fn custom(table: LogTable, c: f64, floor: i64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::validation(format!("scale c = {c} must be non-negative")));
        }
        if floor < 0 {
            return Err(Error::domain("floor must be non-negative"));
        }
        let (lo, hi) = table.log_range();
        if lo > floor as f64 || hi < floor as f64 {
            return Err(Error::domain(format!(
                "custom profile covers ln r in [{lo}, {hi}], which does not contain the floor {floor}"
            )));
        }
        Ok(Envelope {
            profile: Profile::Custom(table),
            c,
            floor,
        })
    }

    /// The same profile and scale on a different floor.
    pub fn with_floor(&self, floor: i64) -> Result<Self> {
        match &self.profile {
            Profile::Custom(t) => Self::custom(t.clone(), self.c, floor),
            p => Self::closed_form(p.clone(), self.c, floor),
        }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn kind(&self) -> ProfileKind {
        self.profile.kind()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    /// `ln f(e^u)`; `-inf` where the profile vanishes.
    pub fn ln_f_at_log_radius(&self, u: f64) -> Result<f64> {
        match &self.profile {
            Profile::F1 | Profile::F2 => {
                if !(u > 1.0) {
                    return Err(Error::domain(format!(
                        "profile undefined at ln r = {u}: needs log log r > 0"
                    )));
                }
                let lnu = u.ln();
                let lnlnu = lnu.ln();
                let core = match self.profile {
                    Profile::F1 => u - 0.5 * (lnu + lnlnu),
                    _ => u - 0.5 * lnu - lnlnu,
                };
                Ok(self.c.ln() + core)
            }
            Profile::Custom(t) => {
                let f = t.eval(u).ok_or_else(|| {
                    let (lo, hi) = t.log_range();
                    Error::domain(format!("ln r = {u} outside custom table [{lo}, {hi}]"))
                })?;
                Ok((self.c * f).ln())
            }
        }
    }

    /// `f(r)`.
    pub fn eval_f(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("radius {r} must be positive")));
        }
        Ok(self.ln_f_at_log_radius(r.ln())?.exp())
    }

    /// `f(e^{m+1})^2 / (4 e^{2m-2})`, the excess of `p_m` over 1/2, by the generic formula.
    pub fn excess(&self, m: i64) -> Result<f64> {
        let ln_f = self.ln_f_at_log_radius((m + 1) as f64)?;
        Ok((2.0 * ln_f - 4f64.ln() - (2 * m - 2) as f64).exp())
    }

    /// Highest level whose `e^{m+1}` is still inside the profile's domain.
    pub fn max_level(&self) -> Option<i64> {
        match &self.profile {
            Profile::Custom(t) => Some(t.log_range().1.floor() as i64 - 1),
            _ => None,
        }
    }

    /// Whether the excess stays below 1/2 for every level `m >= L + 1`.
    ///
    /// For `f1`/`f2` the excess is `c^2 e^4 / (4 g(m))` with `g(m) = (m+1) log(m+1)` resp.
    /// `(m+1) log^2(m+1)`, and `g` is increasing for `m >= 1`; the leading levels are checked
    /// with the generic formula and the tail follows from the monotone denominator.
    pub fn condition_holds(&self) -> bool {
        let first = self.floor + 1;
        let last = match self.max_level() {
            Some(max) => max,
            None => first + DIRECT_CHECK_SPAN,
        };
        (first..=last).all(|m| matches!(self.excess(m), Ok(x) if x < 0.5))
    }

    /// Comparison-chain up-probability `p_m`.
    pub fn pm(&self, m: i64) -> Result<f64> {
        if m < self.floor + 1 {
            return Err(Error::domain(format!("level {m} below L + 1 = {}", self.floor + 1)));
        }
        if !self.condition_holds() {
            return Err(Error::Precondition(format!(
                "envelope {:?} with c = {} is not admissible on floor {}",
                self.kind(),
                self.c,
                self.floor
            )));
        }
        Ok(0.5 + self.excess(m)?)
    }
}

/// `p_m` from the simplified closed forms of the `f1` and `f2` chains.
pub fn pm_closed_form(kind: ProfileKind, c: f64, m: i64) -> Result<f64> {
    closed_form_excess(kind, c, m).map(|x| 0.5 + x)
}

/// `c^2 e^4 / (4 (m+1) log(m+1))` for `f1`, with `log^2` for `f2`.
pub fn closed_form_excess(kind: ProfileKind, c: f64, m: i64) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain(format!("closed form needs m >= 1, got {m}")));
    }
    let n = (m + 1) as f64;
    let l = n.ln();
    let denom = match kind {
        ProfileKind::F1 => n * l,
        ProfileKind::F2 => n * l * l,
        ProfileKind::Custom => return Err(Error::validation("no closed form for custom profiles")),
    };
    Ok(c * c * E4 / 4.0 / denom)
}

/// Smallest floor `L <= search_bound` on which the closed-form profile is admissible.
pub fn min_valid_floor(kind: ProfileKind, c: f64, search_bound: i64) -> Result<i64> {
    for floor in CLOSED_FORM_MIN_FLOOR..=search_bound {
        if Envelope::from_kind(kind, c, floor)?.condition_holds() {
            return Ok(floor);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no admissible floor for {kind:?} with c = {c} up to {search_bound}"
    )))
}

/// Ordering of `p_m(f1, c)` against the borderline `(m+1)/(2m+1)`.
pub fn borderline_compare(c: f64, m: u128) -> Result<Ordering> {
    borderline_compare_profile(ProfileKind::F1, c, m)
}

/// Ordering of `p_m` against `(m+1)/(2m+1)` for either closed-form profile.
///
/// Uses the equivalent inequality `(4/(c^2 e^4)) g(m) >= 4m + 2` in log form, where
/// `ln(4m+2) = ln(m+1) + ln(4 - 2/(m+1))` keeps the comparison exact for huge `m`.
pub fn borderline_compare_profile(kind: ProfileKind, c: f64, m: u128) -> Result<Ordering> {
    if m < 2 {
        return Err(Error::domain(format!("borderline comparison needs m >= 2, got {m}")));
    }
    if c == 0.0 {
        return Ok(Ordering::Less);
    }
    let n = (m + 1) as f64;
    let lnln = n.ln().ln();
    let lhs = (4.0 / (c * c * E4)).ln()
        + match kind {
            ProfileKind::F1 => lnln,
            ProfileKind::F2 => 2.0 * lnln,
            ProfileKind::Custom => return Err(Error::validation("no closed form for custom profiles")),
        };
    let rhs = (4.0 - 2.0 / n).ln();
    // lhs >= rhs  <=>  p_m <= (m+1)/(2m+1)
    Ok(match lhs.partial_cmp(&rhs) {
        Some(Ordering::Greater) => Ordering::Less,
        Some(Ordering::Equal) => Ordering::Equal,
        _ => Ordering::Greater,
    })
}

/// First `m >= 2` from which `p_m <= (m+1)/(2m+1)` holds for good.
///
/// The log-form margin `lhs - rhs` is strictly increasing in `m` (its derivative is
/// `1/((m+1) ln(m+1))` times 1 or 2, minus `2/((m+1)(4m+2))`), so once the ordering
/// holds it holds forever and bisection finds the first index. `None` when the
/// crossover lies beyond `2^127`.
pub fn borderline_crossover(kind: ProfileKind, c: f64) -> Result<Option<u128>> {
    let holds = |m: u128| -> Result<bool> { Ok(borderline_compare_profile(kind, c, m)? != Ordering::Greater) };
    let mut lo: u128 = 2;
    if holds(lo)? {
        return Ok(Some(lo));
    }
    let mut hi: u128 = 4;
    while !holds(hi)? {
        if hi >= 1u128 << 126 {
            return Ok(None);
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Result of summing `log(p_m/q_m)` for an `f2` chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRatioSum {
    pub sum: f64,
    /// Every term inside the Taylor radius satisfies the series bound.
    pub bound_ok: bool,
    /// Number of terms inside the Taylor radius (the ones checked).
    pub checked_terms: u64,
    /// First level inside the Taylor radius, if any.
    pub first_checked: Option<i64>,
    /// The constant `3 c^2 e^4 / 2`.
    pub c_tilde: f64,
}

/// `sum_{m=m_lo}^{m_hi} log(p_m/q_m)` for the `f2` chain with scale `c`, checking
/// `log(p_m/q_m) <= c_tilde / ((m+1) log^2(m+1))` wherever the excess is within the
/// Taylor radius.
pub fn log_ratio_sum_bound(c: f64, m_lo: i64, m_hi: i64) -> Result<LogRatioSum> {
    if m_lo < 2 {
        return Err(Error::domain(format!("m_lo = {m_lo} must be >= 2")));
    }
    let c_tilde = 1.5 * c * c * E4;
    let mut out = LogRatioSum {
        sum: 0.0,
        bound_ok: true,
        checked_terms: 0,
        first_checked: None,
        c_tilde,
    };
    let mut comp = 0.0;
    for m in m_lo..=m_hi {
        let x = closed_form_excess(ProfileKind::F2, c, m)?;
        if x >= 0.5 {
            return Err(Error::Precondition(format!(
                "p_{m} >= 1: level below the admissible range"
            )));
        }
        let term = log_odds_from_excess(x);
        // Neumaier summation; the tail terms are ~1e-8 against a running sum of ~10.
        let t = out.sum + term;
        if out.sum.abs() >= term.abs() {
            comp += (out.sum - t) + term;
        } else {
            comp += (term - t) + out.sum;
        }
        out.sum = t;
        if x <= TAYLOR_RADIUS {
            out.checked_terms += 1;
            out.first_checked.get_or_insert(m);
            let n = (m + 1) as f64;
            let l = n.ln();
            if term > c_tilde / (n * l * l) {
                out.bound_ok = false;
            }
        }
    }
    out.sum += comp;
    Ok(out)
}

/// `ln((1/2 + x)/(1/2 - x)) = 2 atanh(2x)`, accurate for tiny `x`.
pub fn log_odds_from_excess(x: f64) -> f64 {
    2.0 * (2.0 * x).atanh()
}

/// `|ln(x + 1/2) - ln(1/2)| <= 3|x|`.
pub fn taylor_estimate_holds(x: f64) -> bool {
    (2.0 * x).ln_1p().abs() <= 3.0 * x.abs()
}

/// Ceiling on the expected occupation time of `{r <= e^k}`:
///
/// ```text
/// e^{2(k+1)} - e^{2(L+1)} + P(theta_{k+1} < theta_L) [e^{2(k+1)} - e^{2k}] E[U_k | theta_{k+1} < theta_L]
/// ```
pub fn occupation_bound(floor: i64, k: i64, hit_prob: f64, exp_upcrossings: f64) -> Result<f64> {
    if k <= floor + 1 {
        return Err(Error::domain(format!("k = {k} must exceed L + 1 = {}", floor + 1)));
    }
    if !(0.0..=1.0).contains(&hit_prob) {
        return Err(Error::validation(format!("hit probability {hit_prob} outside [0, 1]")));
    }
    if !(exp_upcrossings >= 0.0) {
        return Err(Error::validation("expected upcrossings must be non-negative"));
    }
    let e2 = |j: i64| (2.0 * j as f64).exp();
    Ok(e2(k + 1) - e2(floor + 1) + hit_prob * (e2(k + 1) - e2(k)) * exp_upcrossings)
}
