//! Nonlinearities of the cell equation and the structural hypotheses on
//! them.
//!
//! Three diffusion families are shipped: the porous-medium law
//! `D(s) = m s^(m-1)` (degenerate at zero), a constant coefficient for
//! the classical nondegenerate comparison case, and a sampled table with
//! shape-preserving cubic interpolation. Sensitivities and sources are
//! closed-form families chosen so their sup over a density range is
//! exact.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("argument {0} is negative; nonlinearities are defined on [0, inf)")]
    NegativeArgument(f64),
    #[error("invalid model: {0}")]
    InvalidSpec(String),
    #[error("hypothesis sampling needs at least 100 points, got {0}")]
    TooFewSamples(usize),
    #[error("range endpoint must be positive, got {0}")]
    NonPositiveRange(f64),
}

/// Diffusion coefficient family.
#[derive(Debug, Clone, PartialEq)]
pub enum Diffusion {
    /// `D(s) = m s^(m-1)`, degenerate at zero for m > 1.
    PorousMedium { m: f64 },
    /// Constant coefficient `D(s) = d`; the classical nondegenerate case.
    Linear { d: f64 },
    /// Sampled `(s, D(s))` pairs with monotone piecewise-cubic
    /// interpolation, clamped to the last value beyond the table.
    Custom(MonotoneTable),
}

/// Chemotactic sensitivity family; both have their sup on [0, M] at s = 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Sensitivity {
    Constant {
        chi: f64,
    },
    /// `S(s) = chi / (1 + kappa s)`, nonincreasing in s.
    Saturating {
        chi: f64,
        kappa: f64,
    },
}

/// Source term family.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Zero,
    /// `f(u, v) = r u (1 - u/k)`, truncated at zero so the source stays
    /// nonnegative for u > k.
    Logistic {
        r: f64,
        k: f64,
    },
}

/// Right-hand side of the signal equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalMode {
    /// `v_t = lap v - u v`
    Consumption,
    /// `v_t = lap v - v + u`
    KellerSegel,
}

/// The triple (D, S, f) with the structural parameters of the
/// degeneracy conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub diffusion: Diffusion,
    pub sensitivity: Sensitivity,
    pub source: Source,
    pub signal_mode: SignalMode,
    /// Range endpoint on which the degeneracy conditions are checked.
    pub s0: f64,
    /// Degeneracy exponent: the validator tests `C_D s^(p-1) <= D(s)`.
    pub p: f64,
}

impl ModelSpec {
    pub fn new(
        diffusion: Diffusion,
        sensitivity: Sensitivity,
        source: Source,
        signal_mode: SignalMode,
        s0: f64,
        p: f64,
    ) -> Result<Self, ModelError> {
        match &diffusion {
            Diffusion::PorousMedium { m } => {
                if !(m.is_finite() && *m > 1.0) {
                    return Err(ModelError::InvalidSpec(format!(
                        "porous-medium exponent must be > 1, got {m}"
                    )));
                }
            }
            Diffusion::Linear { d } => {
                if !(d.is_finite() && *d > 0.0) {
                    return Err(ModelError::InvalidSpec(format!(
                        "linear diffusion coefficient must be > 0, got {d}"
                    )));
                }
            }
            Diffusion::Custom(_) => {}
        }
        match &sensitivity {
            Sensitivity::Constant { chi } => {
                if !(chi.is_finite() && *chi >= 0.0) {
                    return Err(ModelError::InvalidSpec(format!(
                        "sensitivity chi must be >= 0, got {chi}"
                    )));
                }
            }
            Sensitivity::Saturating { chi, kappa } => {
                if !(chi.is_finite() && *chi >= 0.0 && kappa.is_finite() && *kappa >= 0.0) {
                    return Err(ModelError::InvalidSpec(format!(
                        "saturating sensitivity needs chi, kappa >= 0, got ({chi}, {kappa})"
                    )));
                }
            }
        }
        if let Source::Logistic { r, k } = &source {
            if !(r.is_finite() && *r >= 0.0 && k.is_finite() && *k >= 0.0) {
                return Err(ModelError::InvalidSpec(format!(
                    "logistic source needs r, K >= 0, got ({r}, {k})"
                )));
            }
        }
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(ModelError::InvalidSpec(format!("s0 must be > 0, got {s0}")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(ModelError::InvalidSpec(format!("p must be > 1, got {p}")));
        }
        Ok(ModelSpec {
            diffusion,
            sensitivity,
            source,
            signal_mode,
            s0,
            p,
        })
    }

    /// Diffusion coefficient D(s).
    pub fn eval_d(&self, s: f64) -> Result<f64, ModelError> {
        nonneg(s)?;
        Ok(match &self.diffusion {
            Diffusion::PorousMedium { m } => m * s.powf(m - 1.0),
            Diffusion::Linear { d } => *d,
            Diffusion::Custom(table) => table.eval(s),
        })
    }

    /// Kirchhoff transform `Phi(s) = integral of D over [0, s]`.
    ///
    /// Closed form for the porous-medium (`s^m`) and linear (`d s`)
    /// families; refined composite Simpson quadrature on the interpolant
    /// for tables, iterated until successive estimates agree to 1e-12
    /// relative.
    pub fn eval_phi(&self, s: f64) -> Result<f64, ModelError> {
        nonneg(s)?;
        Ok(match &self.diffusion {
            Diffusion::PorousMedium { m } => s.powf(*m),
            Diffusion::Linear { d } => d * s,
            Diffusion::Custom(table) => table.integral(s),
        })
    }

    /// Sensitivity S(s).
    pub fn eval_s(&self, s: f64) -> Result<f64, ModelError> {
        nonneg(s)?;
        Ok(match &self.sensitivity {
            Sensitivity::Constant { chi } => *chi,
            Sensitivity::Saturating { chi, kappa } => chi / (1.0 + kappa * s),
        })
    }

    /// Source term f(u, v), clipped at zero.
    pub fn eval_f(&self, u: f64, v: f64) -> Result<f64, ModelError> {
        nonneg(u)?;
        nonneg(v)?;
        Ok(match &self.source {
            Source::Zero => 0.0,
            Source::Logistic { r, k } => {
                if *k > 0.0 {
                    (r * u * (1.0 - u / k)).max(0.0)
                } else {
                    0.0
                }
            }
        })
    }

    /// Supremum of S over [0, M]. Both shipped families are
    /// nonincreasing, so the sup sits at s = 0 and equals chi exactly.
    pub fn compute_cs(&self, m_big: f64) -> Result<f64, ModelError> {
        if !(m_big.is_finite() && m_big > 0.0) {
            return Err(ModelError::NonPositiveRange(m_big));
        }
        Ok(match &self.sensitivity {
            Sensitivity::Constant { chi } => *chi,
            Sensitivity::Saturating { chi, .. } => *chi,
        })
    }

    /// `s D'(s)` in closed form where available. Evaluating the product
    /// directly keeps `s D'` finite at the origin for porous-medium
    /// exponents below 2, where D' alone diverges.
    fn s_dprime(&self, s: f64) -> f64 {
        match &self.diffusion {
            Diffusion::PorousMedium { m } => m * (m - 1.0) * s.powf(m - 1.0),
            Diffusion::Linear { .. } => 0.0,
            Diffusion::Custom(table) => {
                // centered difference with h = s * 1e-6
                let h = s * 1e-6;
                if h == 0.0 {
                    return 0.0;
                }
                s * (table.eval(s + h) - table.eval((s - h).max(0.0))) / (2.0 * h)
            }
        }
    }

    /// Sample both degeneracy inequalities on a geometric grid of
    /// (0, s0] concentrated near the origin (where they are binding)
    /// plus the endpoint s0 itself.
    pub fn validate_hypotheses(&self, samples: usize) -> Result<HypothesisReport, ModelError> {
        if samples < 100 {
            return Err(ModelError::TooFewSamples(samples));
        }
        let mut violations = Vec::new();

        // D(0) = 0 for the degenerate families; the constant-coefficient
        // family is the classical nondegenerate case and is exempt.
        if !matches!(self.diffusion, Diffusion::Linear { .. }) {
            let d0 = self.eval_d(0.0)?;
            if d0 != 0.0 {
                violations.push(Violation {
                    s: 0.0,
                    condition: Condition::DegenerateAtZero,
                });
            }
        }

        let mut cd_min = f64::NEG_INFINITY;
        let mut cd_max = f64::INFINITY;
        let mut any_valid = false;
        for k in 0..samples {
            let s = geometric_sample(self.s0, k, samples);
            let d = self.eval_d(s)?;
            if !(d > 0.0) {
                violations.push(Violation {
                    s,
                    condition: Condition::PositiveAwayFromZero,
                });
                continue;
            }
            let sdp = self.s_dprime(s);
            if sdp < -1e-9 * d {
                violations.push(Violation {
                    s,
                    condition: Condition::Nondecreasing,
                });
            }
            cd_min = cd_min.max(sdp / d);
            cd_max = cd_max.min(d / s.powf(self.p - 1.0));
            any_valid = true;
        }
        if !any_valid {
            cd_min = f64::INFINITY;
            cd_max = 0.0;
        }
        cd_min = cd_min.max(0.0);

        let admissible = violations.is_empty() && cd_max > 0.0 && cd_min <= cd_max;
        Ok(HypothesisReport {
            cd_min,
            cd_max,
            admissible,
            violations,
        })
    }
}

fn nonneg(s: f64) -> Result<(), ModelError> {
    if s < 0.0 || s.is_nan() {
        Err(ModelError::NegativeArgument(s))
    } else {
        Ok(())
    }
}

/// Ratio between the smallest and largest geometric sample, relative to
/// s0.
pub const SAMPLE_FLOOR_RATIO: f64 = 1e-12;

/// k-th of `n` geometric sample points of (0, s0]; k = n-1 lands on s0
/// exactly.
pub fn geometric_sample(s0: f64, k: usize, n: usize) -> f64 {
    if k + 1 == n {
        s0
    } else {
        s0 * SAMPLE_FLOOR_RATIO.powf((n - 1 - k) as f64 / (n - 1) as f64)
    }
}

/// Which structural condition a sample point violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// D(0) = 0
    DegenerateAtZero,
    /// D(s) > 0 for s > 0
    PositiveAwayFromZero,
    /// D'(s) >= 0
    Nondecreasing,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::DegenerateAtZero => write!(f, "D(0)=0"),
            Condition::PositiveAwayFromZero => write!(f, "D>0 on (0,inf)"),
            Condition::Nondecreasing => write!(f, "D'>=0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub s: f64,
    pub condition: Condition,
}

/// Outcome of sampling the degeneracy conditions.
///
/// `cd_min` is the smallest constant validating `s D'(s) <= C D(s)` on
/// the sample (the sup of the ratio), `cd_max` the largest validating
/// `C s^(p-1) <= D(s)` (the inf). A single admissible constant exists
/// iff the interval `[cd_min, cd_max]` is nonempty and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub cd_min: f64,
    pub cd_max: f64,
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

/// Sampled `(s, value)` table interpolated with the Fritsch-Carlson
/// shape-preserving cubic: the interpolant never overshoots between
/// knots, so a nondecreasing table yields a nondecreasing interpolant
/// and a dip in the data survives as a genuine dip.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    s: Vec<f64>,
    val: Vec<f64>,
    tangent: Vec<f64>,
    /// Cumulative integral of the interpolant up to each knot.
    cum: Vec<f64>,
}

impl MonotoneTable {
    /// The table must start at (0, 0), have strictly increasing
    /// abscissae and nonnegative values. Monotonicity of the values is
    /// deliberately not required here: the hypothesis validator exists
    /// to detect its absence.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self, ModelError> {
        if pairs.len() < 2 {
            return Err(ModelError::InvalidSpec(
                "diffusion table needs at least 2 points".into(),
            ));
        }
        if pairs[0] != (0.0, 0.0) {
            return Err(ModelError::InvalidSpec(
                "diffusion table must start at (0, 0)".into(),
            ));
        }
        for w in pairs.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(ModelError::InvalidSpec(
                    "diffusion table abscissae must be strictly increasing".into(),
                ));
            }
        }
        if pairs
            .iter()
            .any(|&(s, v)| !s.is_finite() || !v.is_finite() || v < 0.0)
        {
            return Err(ModelError::InvalidSpec(
                "diffusion table values must be finite and nonnegative".into(),
            ));
        }

        let s: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let val: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let tangent = fritsch_carlson_tangents(&s, &val);

        let mut table = MonotoneTable {
            s,
            val,
            tangent,
            cum: Vec::new(),
        };
        let mut cum = vec![0.0];
        for k in 1..table.s.len() {
            let piece = refined_simpson(|x| table.eval(x), table.s[k - 1], table.s[k]);
            cum.push(cum[k - 1] + piece);
        }
        table.cum = cum;
        Ok(table)
    }

    /// The underlying (s, value) knots.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.s
            .iter()
            .copied()
            .zip(self.val.iter().copied())
            .collect()
    }

    /// Interpolated value; clamped to the last table value beyond the
    /// table so D' >= 0 survives the extension.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x >= self.s[n - 1] {
            return self.val[n - 1];
        }
        // first interval with s[k] <= x < s[k+1]
        let k = match self.s.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => k - 1,
        };
        let h = self.s[k + 1] - self.s[k];
        let t = (x - self.s[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.val[k]
            + h10 * h * self.tangent[k]
            + h01 * self.val[k + 1]
            + h11 * h * self.tangent[k + 1]
    }

    /// Integral of the interpolant over [0, x], built from cached
    /// per-knot quadrature plus a partial piece.
    pub fn integral(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x == 0.0 {
            return 0.0;
        }
        if x >= self.s[n - 1] {
            // constant extension beyond the table
            return self.cum[n - 1] + (x - self.s[n - 1]) * self.val[n - 1];
        }
        let k = match self.s.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(k) => return self.cum[k],
            Err(k) => k - 1,
        };
        self.cum[k] + refined_simpson(|y| self.eval(y), self.s[k], x)
    }
}

fn fritsch_carlson_tangents(s: &[f64], val: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut delta = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        delta.push((val[k + 1] - val[k]) / (s[k + 1] - s[k]));
    }
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 {
            0.0
        } else {
            0.5 * (delta[k - 1] + delta[k])
        };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let alpha = m[k] / delta[k];
        let beta = m[k + 1] / delta[k];
        let norm2 = alpha * alpha + beta * beta;
        if norm2 > 9.0 {
            let tau = 3.0 / norm2.sqrt();
            m[k] = tau * alpha * delta[k];
            m[k + 1] = tau * beta * delta[k];
        }
    }
    m
}

/// Composite Simpson over [a, b] with panel doubling until two
/// successive estimates agree to 1e-12 relative.
fn refined_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let simpson = |panels: usize| {
        let h = (b - a) / panels as f64;
        let mut sum = f(a) + f(b);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + i as f64 * h);
        }
        sum * h / 3.0
    };
    let mut panels = 8;
    let mut prev = simpson(panels);
    loop {
        panels *= 2;
        let cur = simpson(panels);
        if (cur - prev).abs() <= 1e-12 * cur.abs().max(f64::MIN_POSITIVE) || panels >= 1 << 20 {
            return cur;
        }
        prev = cur;
    }
}
