//! Finite-dimensional normed spaces with the geometric data used by the
//! rate certificates: norm, duality selection map `j`, semi-inner product
//! `⟨y,x⟩_s = ⟨y, j(x)⟩`, modulus of uniform convexity `η`, and a modulus
//! of uniform continuity `ω` for the semi-inner product in its right
//! argument.
//!
//! Only smooth norms are instantiated (euclidean and ℓ_p with 1 < p < ∞),
//! so the duality map is single-valued and `⟨·,·⟩_s` collapses to the
//! pairing against `j`.

use crate::error::{Error, Result};
use crate::vector::Vector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

/// Internal seed for the empirical ω calibration; fixed so that instances
/// are reproducible across runs.
const OMEGA_CALIBRATION_SEED: u64 = 0x5EED_0711;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Euclidean,
    /// ℓ_p with 1 < p < ∞.
    Lp {
        p: f64,
    },
}

/// A concrete normed space instance.
///
/// Instances are immutable and freely shareable across threads; the
/// empirical ω table for ℓ_p (p ≠ 2) is computed once on first use.
#[derive(Debug)]
pub struct SpaceInstance {
    dim: usize,
    kind: NormKind,
    omega_table: OnceLock<OmegaTable>,
}

impl SpaceInstance {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be >= 1".into()));
        }
        Ok(Self {
            dim,
            kind: NormKind::Euclidean,
            omega_table: OnceLock::new(),
        })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be >= 1".into()));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::OutOfRange(format!(
                "lp norm requires 1 < p < inf, got {p}"
            )));
        }
        Ok(Self {
            dim,
            kind: NormKind::Lp { p },
            omega_table: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    /// True when the semi-inner continuity modulus is the sampled
    /// (non-certified) one; reports carry this flag.
    pub fn omega_is_empirical(&self) -> bool {
        match self.kind {
            NormKind::Euclidean => false,
            NormKind::Lp { p } => p != 2.0,
        }
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            NormKind::Euclidean => format!("euclidean(d={})", self.dim),
            NormKind::Lp { p } => format!("lp(p={p},d={})", self.dim),
        }
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(self.norm_unchecked(x))
    }

    fn norm_unchecked(&self, x: &Vector) -> f64 {
        match self.kind {
            NormKind::Euclidean => x.norm2(),
            NormKind::Lp { p } => lp_norm(x.coords(), p),
        }
    }

    /// The duality selection map `j` with `⟨x, j(x)⟩ = ‖x‖²` and
    /// `|⟨y, j(x)⟩| ≤ ‖x‖ ‖y‖`; `j(0) = 0`.
    pub fn duality_map(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(self.duality_map_unchecked(x))
    }

    fn duality_map_unchecked(&self, x: &Vector) -> Vector {
        match self.kind {
            NormKind::Euclidean => x.clone(),
            NormKind::Lp { p } => {
                let n = lp_norm(x.coords(), p);
                if n == 0.0 {
                    return Vector::zeros(self.dim);
                }
                let scale = n.powf(2.0 - p);
                let coords = x
                    .coords()
                    .iter()
                    .map(|&c| scale * c.abs().powf(p - 1.0) * c.signum())
                    .collect();
                Vector::new(coords).expect("duality map of finite vector is finite")
            }
        }
    }

    /// `⟨y, x⟩_s`; equals `⟨y, j(x)⟩` since these instances are smooth.
    pub fn semi_inner(&self, y: &Vector, x: &Vector) -> Result<f64> {
        y.check_dim(self.dim)?;
        x.check_dim(self.dim)?;
        Ok(y.dot(&self.duality_map_unchecked(x)))
    }

    /// Modulus of uniform convexity η: (0,2] → (0,1].
    ///
    /// euclidean: `1 − √(1 − (ε/2)²)`; ℓ_p, p ≥ 2: `1 − (1 − (ε/2)^p)^{1/p}`;
    /// ℓ_p, 1 < p < 2: the lower bound `(p−1)ε²/16`.
    pub fn ucx_modulus(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::OutOfRange(format!(
                "ucx modulus argument must lie in (0,2], got {eps}"
            )));
        }
        Ok(match self.kind {
            NormKind::Euclidean => 1.0 - (1.0 - (eps / 2.0).powi(2)).max(0.0).sqrt(),
            NormKind::Lp { p } if p >= 2.0 => {
                1.0 - (1.0 - (eps / 2.0).powf(p)).max(0.0).powf(1.0 / p)
            }
            NormKind::Lp { p } => (p - 1.0) * eps * eps / 16.0,
        })
    }

    /// η(min{ε, 2}) — the clamped form every rate formula uses.
    pub fn ucx_clamped(&self, eps: f64) -> Result<f64> {
        if eps <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "ucx modulus argument must be positive, got {eps}"
            )));
        }
        self.ucx_modulus(eps.min(2.0))
    }

    /// Generalized angle `α(a,b) = ‖a/‖a‖ − b/‖b‖‖ ∈ [0,2]`.
    pub fn clarkson_angle(&self, a: &Vector, b: &Vector) -> Result<f64> {
        a.check_dim(self.dim)?;
        b.check_dim(self.dim)?;
        let na = self.norm_unchecked(a);
        let nb = self.norm_unchecked(b);
        if na == 0.0 || nb == 0.0 {
            return Err(Error::OutOfRange(
                "clarkson angle requires nonzero vectors".into(),
            ));
        }
        Ok(self.norm_unchecked(&a.scale(1.0 / na).sub(&b.scale(1.0 / nb))))
    }

    /// ω(b,ε): whenever ‖x‖,‖z‖ ≤ b and ‖x−y‖ ≤ ω(b,ε), then
    /// ⟨z,y⟩_s ≤ ⟨z,x⟩_s + ε.
    ///
    /// Euclidean (and p = 2): exactly ε/b. Other ℓ_p: calibrated by dense
    /// sampling of `sup ‖j(x+δw) − j(x)‖_q` over the unit ball, reduced to
    /// unit scale through the 1-homogeneity of `j`, with a safety factor
    /// of 1/2 on the returned δ.
    pub fn semi_inner_modulus(&self, b: f64, eps: f64) -> Result<f64> {
        if b <= 0.0 || eps <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "semi-inner modulus requires positive arguments, got b={b}, eps={eps}"
            )));
        }
        match self.kind {
            NormKind::Euclidean | NormKind::Lp { p: 2.0 } => Ok(eps / b),
            NormKind::Lp { .. } => {
                let table = self
                    .omega_table
                    .get_or_init(|| OmegaTable::calibrate(self.dim, self.kind));
                // ω(b,ε) = b·ω₁(ε/b²) by homogeneity of j.
                Ok(b * table.invert(eps / (b * b)) / 2.0)
            }
        }
    }

    /// Uniform sample from the unit sphere of this space's norm.
    pub fn sample_unit(&self, rng: &mut impl Rng) -> Vector {
        loop {
            let coords: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let v = Vector::new(coords).expect("finite sample");
            let n = self.norm_unchecked(&v);
            if n > 1e-3 {
                return v.scale(1.0 / n);
            }
        }
    }

    /// Uniform-ish sample from the ball of radius `r`.
    pub fn sample_ball(&self, r: f64, rng: &mut impl Rng) -> Vector {
        let u = self.sample_unit(rng);
        let t: f64 = rng.gen_range(0.0..=1.0);
        u.scale(r * t)
    }
}

fn lp_norm(coords: &[f64], p: f64) -> f64 {
    // Scale out the max to avoid overflow for large entries / exponents.
    let m = coords.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = coords.iter().map(|c| (c.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Sampled estimate of δ ↦ sup{‖j(x+δw) − j(x)‖_q : ‖x‖ ≤ 1, ‖w‖ = 1}
/// on a geometric δ-grid, with monotone enforcement and log-log
/// interpolation for the inverse.
#[derive(Debug)]
struct OmegaTable {
    deltas: Vec<f64>,
    gaps: Vec<f64>,
}

impl OmegaTable {
    const GRID: usize = 48;
    const SAMPLES: usize = 256;
    const DELTA_MIN: f64 = 1e-6;
    const DELTA_MAX: f64 = 2.0;

    fn calibrate(dim: usize, kind: NormKind) -> Self {
        let p = match kind {
            NormKind::Lp { p } => p,
            NormKind::Euclidean => unreachable!("euclidean omega is exact"),
        };
        let q = p / (p - 1.0);
        let space = SpaceInstance {
            dim,
            kind,
            omega_table: OnceLock::new(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(OMEGA_CALIBRATION_SEED);
        let ratio = (Self::DELTA_MAX / Self::DELTA_MIN).powf(1.0 / (Self::GRID as f64 - 1.0));
        let mut deltas = Vec::with_capacity(Self::GRID);
        let mut gaps = Vec::with_capacity(Self::GRID);
        let mut running_max = 0.0_f64;
        for i in 0..Self::GRID {
            let delta = Self::DELTA_MIN * ratio.powi(i as i32);
            let mut worst = 0.0_f64;
            for _ in 0..Self::SAMPLES {
                let x = space.sample_ball(1.0, &mut rng);
                let w = space.sample_unit(&mut rng);
                let y = x.axpy(delta, &w);
                let gap = lp_norm(
                    space
                        .duality_map_unchecked(&y)
                        .sub(&space.duality_map_unchecked(&x))
                        .coords(),
                    q,
                );
                worst = worst.max(gap);
            }
            running_max = running_max.max(worst);
            deltas.push(delta);
            gaps.push(running_max);
        }
        OmegaTable { deltas, gaps }
    }

    /// Largest δ in the table with gap(δ) ≤ eps (log-log interpolated).
    fn invert(&self, eps: f64) -> f64 {
        let first = self.gaps[0];
        let last = *self.gaps.last().unwrap();
        if eps >= last {
            return *self.deltas.last().unwrap();
        }
        if eps <= first {
            // Extrapolate below the grid with the local log-log slope.
            let slope = (self.gaps[1].ln() - self.gaps[0].ln())
                / (self.deltas[1].ln() - self.deltas[0].ln());
            let slope = slope.max(0.1);
            let ln_delta = self.deltas[0].ln() + (eps.ln() - first.ln()) / slope;
            return ln_delta.exp().max(f64::MIN_POSITIVE);
        }
        let idx = self.gaps.partition_point(|&g| g <= eps);
        // gaps[idx-1] <= eps < gaps[idx]
        let (d0, g0) = (self.deltas[idx - 1], self.gaps[idx - 1]);
        let (d1, g1) = (self.deltas[idx], self.gaps[idx]);
        if g1 <= g0 {
            return d0;
        }
        let frac = (eps.ln() - g0.ln()) / (g1.ln() - g0.ln());
        (d0.ln() + frac * (d1.ln() - d0.ln())).exp()
    }
}
