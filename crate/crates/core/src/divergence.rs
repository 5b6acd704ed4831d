//! f-divergences, max divergence and δ-approximate max divergence.
//!
//! Values are plain `f64` in `[0, +∞]`. `+∞` signals an absolute-continuity
//! failure (or a vanishing ratio denominator for the max divergence). The
//! approximate max divergence may also return `-∞` when no event is
//! admissible; reports call that case "vacuous".
//!
//! All logarithms are natural.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::prob::{ensure_same, FiniteDistribution, PointRelation, StochasticKernel};
use crate::tolerance::{TAU_NUM, TAU_ZERO};

/// Largest support the exhaustive event oracle accepts.
pub const EXHAUSTIVE_SUPPORT_LIMIT: usize = 20;

type Generator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied convex generator with `f(1) = 0`.
#[derive(Clone)]
pub struct CustomGenerator {
    name: String,
    f: Generator,
}

impl CustomGenerator {
    /// Spot-checks `f(1) = 0` and midpoint convexity on `{2^k : k = -10..=10}`.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let name = name.into();
        let at_one = f(1.0);
        if !at_one.is_finite() || at_one.abs() > TAU_NUM {
            return Err(Error::InvalidGenerator(format!("{name}: f(1) = {at_one}")));
        }
        let grid: Vec<f64> = (-10..=10).map(|k| 2f64.powi(k)).collect();
        for (i, &a) in grid.iter().enumerate() {
            for &b in &grid[i + 1..] {
                let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
                let chord = 0.5 * (fa + fb);
                if fm.is_nan() || fm > chord + TAU_NUM * (1.0 + chord.abs()) {
                    return Err(Error::InvalidGenerator(format!(
                        "{name}: midpoint convexity fails between {a} and {b}"
                    )));
                }
            }
        }
        Ok(CustomGenerator { name, f: Arc::new(f) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGenerator").field("name", &self.name).finish()
    }
}

/// The f-divergence instances used throughout, plus user generators.
#[derive(Debug, Clone)]
pub enum FDivergence {
    /// `f(t) = t ln t`
    Kl,
    /// `f(t) = -ln t`, so that `D(μ‖μ') = KL(μ'‖μ)`.
    ReverseKl,
    /// `f(t) = |t - 1| / 2`
    TotalVariation,
    /// `f(t) = (t - 1)^2`
    ChiSquared,
    /// `f(t) = (√t - 1)^2 / 2`
    Hellinger,
    Custom(CustomGenerator),
}

impl FDivergence {
    /// The five built-in kinds.
    pub const TABLE: [FDivergence; 5] = [
        FDivergence::Kl,
        FDivergence::ReverseKl,
        FDivergence::TotalVariation,
        FDivergence::ChiSquared,
        FDivergence::Hellinger,
    ];

    /// Evaluates the generator. `t = 0` uses the right limit.
    pub fn generator(&self, t: f64) -> f64 {
        match self {
            FDivergence::Kl => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            FDivergence::ReverseKl => -t.ln(),
            FDivergence::TotalVariation => 0.5 * (t - 1.0).abs(),
            FDivergence::ChiSquared => (t - 1.0) * (t - 1.0),
            FDivergence::Hellinger => 0.5 * (t.sqrt() - 1.0).powi(2),
            FDivergence::Custom(g) => (g.f)(t),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            FDivergence::Kl => "kl",
            FDivergence::ReverseKl => "rkl",
            FDivergence::TotalVariation => "tv",
            FDivergence::ChiSquared => "chi2",
            FDivergence::Hellinger => "hellinger",
            FDivergence::Custom(g) => g.name(),
        }
    }

    /// `Df(μ‖μ') = Σ_{y ∈ supp(μ')} μ'[y] f(μ[y]/μ'[y])`, or `+∞` when
    /// `μ[y] > 0` for some `y` outside `supp(μ')`.
    pub fn divergence(&self, mu: &FiniteDistribution, nu: &FiniteDistribution) -> Result<f64> {
        ensure_same(mu.ground(), nu.ground(), "divergence arguments")?;
        let mut total = 0.0;
        for (&p, &q) in mu.probs().iter().zip(nu.probs()) {
            if q > TAU_ZERO {
                total += q * self.generator(p / q);
            } else if p > TAU_ZERO {
                return Ok(f64::INFINITY);
            }
        }
        Ok(if total.is_nan() { f64::INFINITY } else { total.max(0.0) })
    }
}

impl fmt::Display for FDivergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn f_divergence(kind: &FDivergence, mu: &FiniteDistribution, nu: &FiniteDistribution) -> Result<f64> {
    kind.divergence(mu, nu)
}

/// Any divergence an audit can be run against.
#[derive(Debug, Clone)]
pub enum Divergence {
    F(FDivergence),
    /// δ-approximate max divergence; `delta = 0` is the max divergence.
    Max { delta: f64 },
    /// As `Max`, but evaluated by enumerating every event.
    MaxExhaustive { delta: f64 },
}

impl Divergence {
    pub const MAX: Divergence = Divergence::Max { delta: 0.0 };

    pub fn evaluate(&self, mu: &FiniteDistribution, nu: &FiniteDistribution) -> Result<f64> {
        match self {
            Divergence::F(k) => k.divergence(mu, nu),
            Divergence::Max { delta } if *delta == 0.0 => max_divergence(mu, nu),
            Divergence::Max { delta } => approx_max_divergence(mu, nu, *delta),
            Divergence::MaxExhaustive { delta } => approx_max_divergence_exhaustive(mu, nu, *delta),
        }
    }

    /// The same divergence, evaluated with the exhaustive event oracle
    /// where that applies.
    pub fn exhaustive(self) -> Divergence {
        match self {
            Divergence::Max { delta } | Divergence::MaxExhaustive { delta } => Divergence::MaxExhaustive { delta },
            other => other,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Divergence::F(k) => k.name().to_owned(),
            Divergence::Max { delta } | Divergence::MaxExhaustive { delta } if *delta == 0.0 => "max".to_owned(),
            Divergence::Max { delta } | Divergence::MaxExhaustive { delta } => format!("max-delta({delta})"),
        }
    }
}

impl From<FDivergence> for Divergence {
    fn from(k: FDivergence) -> Self {
        Divergence::F(k)
    }
}

impl FromStr for Divergence {
    type Err = Error;

    /// Parses the CLI names. `max-delta` yields `delta = 0`; callers set
    /// the actual δ afterwards.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kl" => FDivergence::Kl.into(),
            "rkl" => FDivergence::ReverseKl.into(),
            "tv" => FDivergence::TotalVariation.into(),
            "chi2" => FDivergence::ChiSquared.into(),
            "hellinger" => FDivergence::Hellinger.into(),
            "max" | "max-delta" => Divergence::MAX,
            other => return Err(Error::Parse(format!("unknown divergence `{other}`"))),
        })
    }
}

/// `max_{y ∈ supp(μ)} ln(μ[y]/μ'[y])`.
pub fn max_divergence(mu: &FiniteDistribution, nu: &FiniteDistribution) -> Result<f64> {
    ensure_same(mu.ground(), nu.ground(), "max divergence arguments")?;
    let mut best = f64::NEG_INFINITY;
    for (&p, &q) in mu.probs().iter().zip(nu.probs()) {
        if p <= TAU_ZERO {
            continue;
        }
        if q <= TAU_ZERO {
            return Ok(f64::INFINITY);
        }
        best = best.max((p / q).ln());
    }
    Ok(best.max(0.0))
}

fn ratio(p: f64, q: f64) -> f64 {
    if q <= TAU_ZERO {
        f64::INFINITY
    } else {
        p / q
    }
}

fn event_value(mass: f64, other: f64, delta: f64) -> Option<f64> {
    if mass < delta || mass - delta <= 0.0 {
        return None;
    }
    Some(if other <= TAU_ZERO { f64::INFINITY } else { ((mass - delta) / other).ln() })
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta {delta} outside [0,1]")))
    }
}

/// `max_{R ⊆ supp(μ), μ[R] ≥ δ} ln((μ[R] - δ)/μ'[R])`, evaluated over the
/// prefixes of `supp(μ)` sorted by likelihood ratio, largest first.
/// Returns `-∞` when no event is admissible.
pub fn approx_max_divergence(mu: &FiniteDistribution, nu: &FiniteDistribution, delta: f64) -> Result<f64> {
    ensure_same(mu.ground(), nu.ground(), "approximate max divergence arguments")?;
    check_delta(delta)?;
    let mut order = mu.support();
    // stable: ties keep ground order
    order.sort_by(|&a, &b| ratio(mu.get(b), nu.get(b)).total_cmp(&ratio(mu.get(a), nu.get(a))));
    let (mut mass, mut other) = (0.0, 0.0);
    let mut best = f64::NEG_INFINITY;
    for i in order {
        mass += mu.get(i);
        other += nu.get(i);
        if let Some(v) = event_value(mass, other, delta) {
            best = best.max(v);
        }
    }
    Ok(best)
}

/// The same maximum by enumerating all `2^|supp(μ)|` events.
pub fn approx_max_divergence_exhaustive(mu: &FiniteDistribution, nu: &FiniteDistribution, delta: f64) -> Result<f64> {
    ensure_same(mu.ground(), nu.ground(), "approximate max divergence arguments")?;
    check_delta(delta)?;
    let support = mu.support();
    if support.len() > EXHAUSTIVE_SUPPORT_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "exhaustive search needs |supp| <= {EXHAUSTIVE_SUPPORT_LIMIT}, got {}",
            support.len()
        )));
    }
    let mut best = f64::NEG_INFINITY;
    for bits in 1u32..(1u32 << support.len()) {
        let (mut mass, mut other) = (0.0, 0.0);
        for (k, &i) in support.iter().enumerate() {
            if bits & (1 << k) != 0 {
                mass += mu.get(i);
                other += nu.get(i);
            }
        }
        if let Some(v) = event_value(mass, other, delta) {
            best = best.max(v);
        }
    }
    Ok(best)
}

/// The least δ such that `A(x)[R] <= e^ε A(x')[R] + δ` for every event `R`
/// and every pair of `Φ`, in both directions.
pub fn delta_required(kernel: &StochasticKernel, phi: &PointRelation, epsilon: f64) -> Result<f64> {
    if phi.is_empty() {
        return Err(Error::EmptyRelation);
    }
    ensure_same(kernel.inputs(), phi.ground(), "relation and kernel inputs")?;
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let scale = epsilon.exp();
    let one_way = |a: &FiniteDistribution, b: &FiniteDistribution| -> f64 {
        a.probs()
            .iter()
            .zip(b.probs())
            .map(|(&p, &q)| {
                let bound = if q == 0.0 { 0.0 } else { scale * q };
                (p - bound).max(0.0)
            })
            .sum()
    };
    Ok(phi
        .pairs()
        .iter()
        .map(|&(x, x2)| {
            let (a, b) = (kernel.row(x), kernel.row(x2));
            one_way(a, b).max(one_way(b, a))
        })
        .fold(0.0, f64::max))
}
