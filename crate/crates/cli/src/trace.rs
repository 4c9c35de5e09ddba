//! Sampled curves written as CSV.

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use taulab::elliptic::periodic::PeriodicLinearSystem;
use taulab::elliptic::theta::{theta1, Nome, ThetaMethod};
use taulab::{isomonodromy, linsys, orthopoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    /// Hankel determinant D_n of the semicircle law on [a, x].
    TauSemicircle,
    /// Gramian tau of the one-soliton system, τ(2x) = 1 + e^{-2x}.
    TauSoliton,
    /// Lamé tau function of the periodic system with real nome q.
    TauLame,
    /// Potential q(x) = -2 d²/dx² log τ of a scalar exponential symbol.
    PotentialQ,
    /// Jacobi θ₁(x) from the product or the series.
    Theta1,
}

impl TraceKind {
    fn allowed(self) -> &'static [&'static str] {
        match self {
            TraceKind::TauSemicircle => &["a", "n"],
            TraceKind::TauSoliton => &[],
            TraceKind::TauLame => &["q", "order"],
            TraceKind::PotentialQ => &["kappa1", "coeffs", "sigma"],
            TraceKind::Theta1 => &["q", "order", "method"],
        }
    }

    fn is_complex(self) -> bool {
        matches!(self, TraceKind::TauLame | TraceKind::Theta1)
    }
}

/// `lo:hi:n`, `n` equally spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl std::str::FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            bail!("grid must look like lo:hi:n, got {s:?}");
        };
        let lo: f64 = lo.trim().parse().with_context(|| format!("grid start {lo:?}"))?;
        let hi: f64 = hi.trim().parse().with_context(|| format!("grid end {hi:?}"))?;
        let n: usize = n.trim().parse().with_context(|| format!("grid count {n:?}"))?;
        if !lo.is_finite() || !hi.is_finite() {
            bail!("grid bounds must be finite");
        }
        Ok(Grid { lo, hi, n })
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.n {
            0 => vec![],
            1 => vec![self.lo],
            n => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// `k=v,k=v` pairs; keys must belong to the trace kind.
pub fn parse_params(kind: TraceKind, s: Option<&str>) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for pair in s.unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair.split_once('=').ok_or_else(|| anyhow!("parameter {pair:?} is not key=value"))?;
        let k = k.trim();
        if !kind.allowed().contains(&k) {
            bail!("unknown parameter {k:?} for {kind:?}; allowed: {:?}", kind.allowed());
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get<T: std::str::FromStr>(p: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| anyhow!("parameter {key}={v}: {e}")),
    }
}

type Sampler = Box<dyn Fn(f64) -> taulab::Result<Complex64>>;

fn real(v: taulab::Result<f64>) -> taulab::Result<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

fn sampler(kind: TraceKind, p: &BTreeMap<String, String>) -> Result<Sampler> {
    Ok(match kind {
        TraceKind::TauSemicircle => {
            let a: f64 = get(p, "a", -1.0)?;
            let n: usize = get(p, "n", 4)?;
            Box::new(move |x| {
                real(isomonodromy::semicircle_recurrence(a, x, n + 1).and_then(|(_, rec)| orthopoly::hankel_d(&rec, n)))
            })
        }
        TraceKind::TauSoliton => {
            let sys = linsys::soliton_system();
            Box::new(move |x| real(linsys::tau_from_gramians(&sys, x)))
        }
        TraceKind::TauLame => {
            let sys = PeriodicLinearSystem::lame(&Nome::real(get(p, "q", 0.3)?, get(p, "order", 40)?)?);
            Box::new(move |x| Ok(sys.tau(x)))
        }
        TraceKind::PotentialQ => {
            let sys = match p.get("coeffs") {
                None if !p.contains_key("kappa1") && !p.contains_key("sigma") => linsys::soliton_system(),
                _ => {
                    let coeffs: Vec<f64> = p
                        .get("coeffs")
                        .map(String::as_str)
                        .unwrap_or("1")
                        .split(';')
                        .map(|c| c.trim().parse::<f64>().map_err(|e| anyhow!("coefficient {c:?}: {e}")))
                        .collect::<Result<_>>()?;
                    let sigma: f64 = get(p, "sigma", 1.0)?;
                    let sym = linsys::ExpSymbol::scalar(get(p, "kappa1", 0.0)?, &coeffs)?;
                    linsys::realize(&sym, DMatrix::from_element(1, 1, sigma))?
                }
            };
            Box::new(move |x| real(linsys::potential_q(&sys, x)))
        }
        TraceKind::Theta1 => {
            let nome = Nome::real(get(p, "q", 0.3)?, get(p, "order", 40)?)?;
            let method = match get(p, "method", "product".to_string())?.as_str() {
                "product" => ThetaMethod::Product,
                "series" => ThetaMethod::Series,
                m => bail!("method must be product or series, got {m:?}"),
            };
            Box::new(move |x| Ok(theta1(Complex64::new(x, 0.0), &nome, method)))
        }
    })
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// CSV text for the trace; points where evaluation fails become `nan`.
pub fn render(kind: TraceKind, params: &BTreeMap<String, String>, grid: &Grid) -> Result<String> {
    let f = sampler(kind, params)?;
    let mut out = String::from(if kind.is_complex() { "x,re,im\n" } else { "x,value\n" });
    for x in grid.points() {
        let v = f(x).unwrap_or_else(|e| {
            log::warn!("{kind:?} at x = {x}: {e}");
            Complex64::new(f64::NAN, f64::NAN)
        });
        if kind.is_complex() {
            let _ = writeln!(out, "{},{},{}", num(x), num(v.re), num(v.im));
        } else {
            let _ = writeln!(out, "{},{}", num(x), num(v.re));
        }
    }
    Ok(out)
}
