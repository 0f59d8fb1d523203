//! Power aggregation: from per-goal attainment values to per-human power
//! levels and the robot's inequality-averse intrinsic reward.
//!
//! For a human with goal family G and attainment values V(g) ∈ [0, 1]:
//!
//!   X = Σ_{g∈G} V(g)^ζ           (aggregate goal-achievement capacity)
//!   W = log₂ X                   (power in bits)
//!
//! and across humans the robot's intrinsic reward is the risk- and
//! inequality-averse aggregate
//!
//!   U_r = −( Σ_h (X_h + ε_X)^{−ξ} )^η.
//!
//! Everything here is generic over the float type; `f64` is used everywhere
//! else in the crate.

use num_traits::Float;
use serde::Serialize;

/// Parameters of the power objective and robot policy smoothing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerParams {
    /// Risk-aversion exponent over goal attainment values, ζ.
    pub zeta: f64,
    /// Inequality-aversion exponent over humans, ξ.
    pub xi: f64,
    /// Outer exponent trading off total vs. worst-off emphasis, η.
    pub eta: f64,
    /// Robot softness: π_r(a) ∝ (−Q_r(a))^{−β_r}; ∞ = argmax.
    pub beta_r: f64,
    /// Power regularizer added to X before the −ξ power (0 = exact).
    pub eps_x: f64,
    /// Value regularizer subtracted from Q_r before the −β_r power.
    pub eps_q: f64,
    /// Permit ζ ∈ (0,1], ξ ∈ (0,1), η ∈ (0,1] (outside the inequality- and
    /// risk-averse regime) for ablations.
    pub permissive: bool,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            zeta: 2.0,
            xi: 1.0,
            eta: 1.1,
            beta_r: 5.0,
            eps_x: 0.0,
            eps_q: 0.0,
            permissive: false,
        }
    }
}

/// Preset with ε_X = 1 and ξ large enough (≥ log 3 / ln 2 ≈ 1.585, rounded
/// up to 1.71) that adding one attainable goal to a one-goal human always
/// outweighs doubling a ten-goal human's capacity.
pub fn eps_one_preset() -> PowerParams {
    PowerParams { eps_x: 1.0, xi: 1.71, ..PowerParams::default() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    Zeta(f64),
    Xi(f64),
    Eta(f64),
    BetaR(f64),
    Eps(f64),
}

impl std::fmt::Display for ParamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamError::Zeta(v) => write!(f, "zeta = {v} requires zeta > 1 (or > 0 in permissive mode)"),
            ParamError::Xi(v) => write!(f, "xi = {v} requires xi >= 1 (or > 0 in permissive mode)"),
            ParamError::Eta(v) => write!(f, "eta = {v} requires eta > 1 (or > 0 in permissive mode)"),
            ParamError::BetaR(v) => write!(f, "beta_r = {v} must be >= 0"),
            ParamError::Eps(v) => write!(f, "regularizer {v} must be >= 0 and finite"),
        }
    }
}

impl std::error::Error for ParamError {}

impl PowerParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let lo = if self.permissive { 0.0 } else { 1.0 };
        if !(self.zeta > lo) && !(self.permissive && self.zeta > 0.0) {
            return Err(ParamError::Zeta(self.zeta));
        }
        if self.permissive {
            if !(self.xi > 0.0) {
                return Err(ParamError::Xi(self.xi));
            }
            if !(self.eta > 0.0) {
                return Err(ParamError::Eta(self.eta));
            }
        } else {
            if !(self.xi >= 1.0) {
                return Err(ParamError::Xi(self.xi));
            }
            if !(self.eta > 1.0) {
                return Err(ParamError::Eta(self.eta));
            }
        }
        if self.beta_r.is_nan() || self.beta_r < 0.0 {
            return Err(ParamError::BetaR(self.beta_r));
        }
        for e in [self.eps_x, self.eps_q] {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(ParamError::Eps(e));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AggregateError {
    EmptyGoalFamily,
    AllValuesZero,
    ValueOutOfRange(f64),
}

impl std::fmt::Display for AggregateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AggregateError::EmptyGoalFamily => write!(f, "goal family is empty"),
            AggregateError::AllValuesZero => {
                write!(f, "all goal attainment values are zero: power is -infinite")
            }
            AggregateError::ValueOutOfRange(v) => {
                write!(f, "goal attainment value {v} outside [0, 1]")
            }
        }
    }
}

impl std::error::Error for AggregateError {}

/// X = Σ_g V(g)^ζ for attainment values V(g) ∈ [0, 1].
pub fn goal_aggregate<F: Float>(values: &[F], zeta: F) -> Result<F, AggregateError> {
    if values.is_empty() {
        return Err(AggregateError::EmptyGoalFamily);
    }
    let mut x = F::zero();
    for &v in values {
        if !(v >= F::zero()) || v > F::one() + F::epsilon().sqrt() {
            return Err(AggregateError::ValueOutOfRange(v.to_f64().unwrap_or(f64::NAN)));
        }
        if v > F::zero() {
            x = x + v.powf(zeta);
        }
    }
    if x == F::zero() {
        return Err(AggregateError::AllValuesZero);
    }
    Ok(x)
}

/// W = log₂ X, in bits.
pub fn power_bits<F: Float>(x: F) -> F {
    x.log2()
}

/// U_r = −(Σ_h (X_h + ε_X)^{−ξ})^η, computed in log space so that it is
/// finite and monotone even when powers W_h lie far outside ±50 bits.
pub fn intrinsic_reward<F: Float>(xs: &[F], xi: F, eta: F, eps_x: F) -> F {
    debug_assert!(!xs.is_empty());
    // log Σ exp(−ξ · log(X_h + ε)) via max-subtraction.
    let logs: Vec<F> = xs.iter().map(|&x| -xi * (x + eps_x).ln()).collect();
    let m = logs.iter().cloned().fold(F::neg_infinity(), F::max);
    if m == F::neg_infinity() {
        return F::zero(); // all X infinite: no disempowerment pressure
    }
    let mut sum = F::zero();
    for &l in &logs {
        sum = sum + (l - m).exp();
    }
    let log_inner = m + sum.ln();
    -(eta * log_inner).exp()
}

/// Same aggregate but taking powers in bits: X_h = 2^{W_h}. Stable for
/// |W| far beyond 50 bits.
pub fn intrinsic_reward_from_bits<F: Float>(ws: &[F], xi: F, eta: F) -> F {
    let ln2 = F::from(std::f64::consts::LN_2).unwrap();
    let logs: Vec<F> = ws.iter().map(|&w| -xi * w * ln2).collect();
    let m = logs.iter().cloned().fold(F::neg_infinity(), F::max);
    if m == F::neg_infinity() {
        return F::zero();
    }
    let mut sum = F::zero();
    for &l in &logs {
        sum = sum + (l - m).exp();
    }
    -(eta * (m + sum.ln())).exp()
}

/// log₂(−U_r): the magnitude of the intrinsic reward in bits, finite for
/// extreme powers.
pub fn intrinsic_reward_log2_magnitude<F: Float>(ws: &[F], xi: F, eta: F) -> F {
    let ln2 = F::from(std::f64::consts::LN_2).unwrap();
    let logs: Vec<F> = ws.iter().map(|&w| -xi * w * ln2).collect();
    let m = logs.iter().cloned().fold(F::neg_infinity(), F::max);
    let mut sum = F::zero();
    for &l in &logs {
        sum = sum + (l - m).exp();
    }
    eta * (m + sum.ln()) / ln2
}

/// Robot action weights π(a) ∝ (−Q(a) + ε_Q)^{−β}; requires Q(a) < 0 when
/// ε_Q = 0. β = 0 gives uniform, β = ∞ the argmax (ties uniform).
pub fn power_law_policy<F: Float>(q: &[F], beta: F, eps_q: F) -> Vec<F> {
    let n = q.len();
    debug_assert!(n > 0);
    if beta == F::zero() {
        return vec![F::one() / F::from(n).unwrap(); n];
    }
    if beta == F::infinity() {
        return argmax_uniform(q);
    }
    // exp(−β ln(−q + ε)), max-subtracted.
    let logs: Vec<F> = q.iter().map(|&v| -beta * (eps_q - v).ln()).collect();
    let m = logs.iter().cloned().fold(F::neg_infinity(), F::max);
    let mut w: Vec<F> = logs.iter().map(|&l| (l - m).exp()).collect();
    let z = w.iter().cloned().fold(F::zero(), |a, b| a + b);
    for v in &mut w {
        *v = *v / z;
    }
    w
}

/// Boltzmann weights π(a) ∝ exp(β v(a)), max-subtracted; β = ∞ is the
/// argmax with uniform tie-breaking, β = 0 uniform.
pub fn softmax_policy<F: Float>(v: &[F], beta: F) -> Vec<F> {
    let n = v.len();
    debug_assert!(n > 0);
    if beta == F::zero() {
        return vec![F::one() / F::from(n).unwrap(); n];
    }
    if beta == F::infinity() {
        return argmax_uniform(v);
    }
    let m = v.iter().cloned().fold(F::neg_infinity(), F::max);
    let mut w: Vec<F> = v.iter().map(|&x| (beta * (x - m)).exp()).collect();
    let z = w.iter().cloned().fold(F::zero(), |a, b| a + b);
    for x in &mut w {
        *x = *x / z;
    }
    w
}

/// Uniform distribution over the maximizers of `v` (exact ties).
pub fn argmax_uniform<F: Float>(v: &[F]) -> Vec<F> {
    let m = v.iter().cloned().fold(F::neg_infinity(), F::max);
    let k = v.iter().filter(|&&x| x == m).count();
    let p = F::one() / F::from(k).unwrap();
    v.iter().map(|&x| if x == m { p } else { F::zero() }).collect()
}

/// Normalized-softmax robot policy: π(a) ∝ exp(β Q(a) / (max Q − min Q)),
/// scale-free in Q. Degenerates to uniform when all Q are equal.
pub fn normalized_softmax_policy<F: Float>(q: &[F], beta: F) -> Vec<F> {
    let hi = q.iter().cloned().fold(F::neg_infinity(), F::max);
    let lo = q.iter().cloned().fold(F::infinity(), F::min);
    let range = hi - lo;
    if range == F::zero() || beta == F::zero() {
        return vec![F::one() / F::from(q.len()).unwrap(); q.len()];
    }
    if beta == F::infinity() {
        return argmax_uniform(q);
    }
    let scaled: Vec<F> = q.iter().map(|&v| v / range).collect();
    softmax_policy(&scaled, beta)
}

/// Per-state power report rows for one game solution.
#[derive(Debug, Clone, Serialize)]
pub struct PowerReportRow {
    pub state: String,
    /// X_h per human.
    pub x: Vec<f64>,
    /// W_h = log₂ X_h per human (−∞ shown as null in JSON).
    pub w_bits: Vec<f64>,
    pub u_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub game: String,
    pub humans: Vec<String>,
    pub rows: Vec<PowerReportRow>,
}

impl PowerReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("state");
        for h in &self.humans {
            out.push_str(&format!(",x_{h},w_bits_{h}"));
        }
        out.push_str(",u_r\n");
        for row in &self.rows {
            out.push_str(&row.state);
            for i in 0..self.humans.len() {
                out.push_str(&format!(",{},{}", row.x[i], row.w_bits[i]));
            }
            out.push_str(&format!(",{}\n", row.u_r));
        }
        out
    }
}

/// Result of checking invariance of the robot's preference ordering under a
/// common rescaling of all goal-attainment capacities.
#[derive(Debug, Clone)]
pub struct ScaleInvarianceCheck {
    /// Scale factor applied to every X_h.
    pub scale: f64,
    /// Pairs of state indices whose U_r ordering flipped under the scaling.
    pub order_flips: Vec<(usize, usize)>,
    /// States exempted from the check because some X_h < threshold (the
    /// ε_X = 1 regularizer intentionally discounts sub-threshold capacities).
    pub exempt_states: Vec<usize>,
}

impl ScaleInvarianceCheck {
    pub fn holds(&self) -> bool {
        self.order_flips.is_empty()
    }
}

/// Recompute U_r with every X_h multiplied by `scale` and compare the
/// induced ordering over states. With ε_X = 0 the ordering is exactly
/// invariant (U_r scales by scale^{−ξη}); with ε_X > 0 states where any
/// X_h < `exempt_below` are skipped.
pub fn scale_invariance_check(
    xs_per_state: &[Vec<f64>],
    params: &PowerParams,
    scale: f64,
    exempt_below: f64,
) -> ScaleInvarianceCheck {
    let u = |xs: &[f64], k: f64| {
        let scaled: Vec<f64> = xs.iter().map(|&x| x * k).collect();
        intrinsic_reward(&scaled, params.xi, params.eta, params.eps_x)
    };
    let mut exempt = Vec::new();
    let mut active = Vec::new();
    for (i, xs) in xs_per_state.iter().enumerate() {
        if params.eps_x > 0.0 && xs.iter().any(|&x| x < exempt_below) {
            exempt.push(i);
        } else {
            active.push(i);
        }
    }
    let base: Vec<f64> = active.iter().map(|&i| u(&xs_per_state[i], 1.0)).collect();
    let scaled: Vec<f64> = active.iter().map(|&i| u(&xs_per_state[i], scale)).collect();
    let mut flips = Vec::new();
    let tol = 1e-12;
    for a in 0..active.len() {
        for b in (a + 1)..active.len() {
            let d0 = base[a] - base[b];
            let d1 = scaled[a] - scaled[b];
            if (d0 > tol && d1 < -tol) || (d0 < -tol && d1 > tol) {
                flips.push((active[a], active[b]));
            }
        }
    }
    ScaleInvarianceCheck { scale, order_flips: flips, exempt_states: exempt }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn aggregate_counts_certain_goals() {
        let x = goal_aggregate(&[1.0f64, 1.0, 1.0], 2.0).unwrap();
        assert_relative_eq!(x, 3.0);
        assert_relative_eq!(power_bits(x), 3f64.log2());
    }

    #[test]
    fn aggregate_rejects_degenerate_input() {
        assert_eq!(goal_aggregate::<f64>(&[], 2.0), Err(AggregateError::EmptyGoalFamily));
        assert_eq!(goal_aggregate(&[0.0f64, 0.0], 2.0), Err(AggregateError::AllValuesZero));
        assert!(matches!(
            goal_aggregate(&[1.5f64], 2.0),
            Err(AggregateError::ValueOutOfRange(_))
        ));
    }

    #[test]
    fn risk_aversion_prefers_sure_goal() {
        // One certain goal beats two coin-flip goals when ζ = 2.
        let sure = goal_aggregate(&[1.0f64, 0.0], 2.0).unwrap();
        let split = goal_aggregate(&[0.5f64, 0.5], 2.0).unwrap();
        assert!(sure > split);
    }

    #[test]
    fn intrinsic_reward_matches_direct_formula() {
        let xs = [2.0f64, 3.0];
        let direct = -(2.0f64.powf(-1.0) + 3.0f64.powf(-1.0)).powf(1.1);
        assert_relative_eq!(intrinsic_reward(&xs, 1.0, 1.1, 0.0), direct, epsilon = 1e-14);
    }

    #[test]
    fn intrinsic_reward_stable_for_extreme_powers() {
        // W = ±400 bits would overflow a direct 2^W with ξη products.
        let m = intrinsic_reward_log2_magnitude(&[-400.0f64, 400.0], 1.0, 1.1);
        assert_relative_eq!(m, 1.1 * 400.0, epsilon = 1e-9);
        let m2 = intrinsic_reward_log2_magnitude(&[400.0f64, 500.0], 1.0, 1.0);
        assert_relative_eq!(m2, -400.0, epsilon = 1e-9);
        assert!(intrinsic_reward_from_bits(&[400.0f64, 500.0], 1.0, 1.0) < 0.0);
    }

    #[test]
    fn last_bit_dominates_many_first_bits() {
        // {W=1, W=1} → U_r = −1; {W=0, W=w} → −(1 + 2^{−w}) < −1 for any w.
        let even = intrinsic_reward_from_bits(&[1.0f64, 1.0], 1.0, 1.0);
        assert_relative_eq!(even, -1.0, epsilon = 1e-14);
        for w in [1.0f64, 5.0, 50.0, 500.0] {
            let skew = intrinsic_reward_from_bits(&[0.0f64, w], 1.0, 1.0);
            assert_relative_eq!(skew, -(1.0 + 2.0f64.powf(-w)), epsilon = 1e-12);
            assert!(skew <= even);
            if w <= 50.0 {
                // Beyond ~52 bits the 2^{−w} penalty is below f64 resolution.
                assert!(skew < even);
            }
        }
    }

    #[test]
    fn pigou_dalton_transfer_helps() {
        // Moving capacity from the richer to the poorer human (keeping the
        // total fixed) increases U_r.
        let before = intrinsic_reward(&[1.0f64, 5.0], 1.5, 1.1, 0.0);
        let after = intrinsic_reward(&[2.0f64, 4.0], 1.5, 1.1, 0.0);
        assert!(after > before);
    }

    #[test]
    fn param_validation_modes() {
        let mut p = PowerParams::default();
        assert!(p.validate().is_ok());
        p.zeta = 0.5;
        assert!(p.validate().is_err());
        p.permissive = true;
        assert!(p.validate().is_ok());
        p.eta = 0.9;
        assert!(p.validate().is_ok());
        p.permissive = false;
        assert!(p.validate().is_err());
    }

    #[test]
    fn power_law_limits() {
        let q = [-1.0f64, -2.0, -4.0];
        let uni = power_law_policy(&q, 0.0, 0.0);
        assert_relative_eq!(uni[0], 1.0 / 3.0);
        let hard = power_law_policy(&q, f64::INFINITY, 0.0);
        assert_eq!(hard, vec![1.0, 0.0, 0.0]);
        // β = 1: weights ∝ 1/(−Q).
        let soft = power_law_policy(&q, 1.0, 0.0);
        let z = 1.0 + 0.5 + 0.25;
        assert_relative_eq!(soft[0], 1.0 / z, epsilon = 1e-14);
        assert_relative_eq!(soft[2], 0.25 / z, epsilon = 1e-14);
    }

    #[test]
    fn softmax_tie_breaking_uniform() {
        let v = [1.0f64, 1.0, 0.0];
        let p = softmax_policy(&v, f64::INFINITY);
        assert_eq!(p, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn scale_invariance_exact_without_regularizer() {
        let xs = vec![vec![1.0, 2.0], vec![3.0, 0.5], vec![2.0, 2.0], vec![0.1, 9.0]];
        let p = PowerParams::default();
        let chk = scale_invariance_check(&xs, &p, 7.3, 0.0);
        assert!(chk.holds());
        assert!(chk.exempt_states.is_empty());
    }

    #[test]
    fn scale_invariance_exempts_small_capacities_with_eps_one() {
        let xs = vec![vec![20.0, 30.0], vec![0.5, 100.0], vec![15.0, 40.0]];
        let p = eps_one_preset();
        let chk = scale_invariance_check(&xs, &p, 3.0, 10.0);
        assert_eq!(chk.exempt_states, vec![1]);
        assert!(chk.holds());
    }

    #[test]
    fn works_in_f32_too() {
        let x = goal_aggregate(&[0.5f32, 0.5], 2.0).unwrap();
        assert!((x - 0.5).abs() < 1e-6);
        let u = intrinsic_reward(&[1.0f32, 1.0], 1.0, 1.0, 0.0);
        assert!((u + 2.0).abs() < 1e-6);
    }
}
