//! Accretive operator instances: single-valued realizations of the graph,
//! resolvents J_λ = (Id + λA)^{-1}, Yosida approximates A_λ = (Id − J_λ)/λ,
//! the minimal-section surrogate |A·| with its continuity modulus, and
//! quantitative range data for the large-time asymptotics.

use crate::error::{Error, Result};
use crate::scalar_root;
use crate::space::SpaceInstance;
use crate::vector::Vector;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Analytic witness constructor for a scalar range infimum: accuracy ε
/// to a pair (y, f(y)) with |f(y)| ≤ d + ε.
type ScalarWitness = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Default relative tolerance for resolvent solves. The error compounds
/// over long resolvent compositions, so it is kept well below the
/// verification slack.
pub const DEFAULT_RESOLVENT_TOL: f64 = 1e-12;

/// Iteration budget for the per-coordinate Newton solver.
pub const NEWTON_BUDGET: usize = 200;

/// Scalar coordinate functions for the diagonal operator kind.
///
/// The accretivity contract is that each function is nondecreasing;
/// `Linear` with a negative slope is accepted so that verification
/// negative controls can construct a non-accretive instance on purpose.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    /// y ↦ sgn(y)|y|^exp, exp ≥ 1.
    Power { exp: f64 },
    /// y ↦ slope·y.
    Linear { slope: f64 },
    /// y ↦ e^y.
    Exp,
}

impl ScalarFn {
    pub fn power(exp: f64) -> Result<Self> {
        if !(exp.is_finite() && exp >= 1.0) {
            return Err(Error::OutOfRange(format!(
                "power exponent must be >= 1, got {exp}"
            )));
        }
        Ok(ScalarFn::Power { exp })
    }

    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            ScalarFn::Power { exp } => y.signum() * y.abs().powf(exp),
            ScalarFn::Linear { slope } => slope * y,
            ScalarFn::Exp => y.exp(),
        }
    }

    pub fn deriv(&self, y: f64) -> f64 {
        match *self {
            ScalarFn::Power { exp } => exp * y.abs().powf(exp - 1.0),
            ScalarFn::Linear { slope } => slope,
            ScalarFn::Exp => y.exp(),
        }
    }

    /// sup |f'| on [−b, b].
    pub fn deriv_sup(&self, b: f64) -> f64 {
        match *self {
            ScalarFn::Power { exp } => exp * b.powf(exp - 1.0),
            ScalarFn::Linear { slope } => slope.abs(),
            ScalarFn::Exp => b.exp(),
        }
    }

    /// flow(t, x) − x in a cancellation-free form, so that increments of
    /// order t keep full relative accuracy even for t near 1e-300.
    pub fn flow_increment(&self, t: f64, x: f64) -> f64 {
        match *self {
            ScalarFn::Linear { slope } => x * (-slope * t).exp_m1(),
            ScalarFn::Power { exp } => {
                if exp == 1.0 {
                    return x * (-t).exp_m1();
                }
                if x == 0.0 {
                    return 0.0;
                }
                let k = exp;
                let w = (k - 1.0) * t * x.abs().powf(k - 1.0);
                // (1+w)^{-1/(k-1)} − 1
                x * (-(w.ln_1p()) / (k - 1.0)).exp_m1()
            }
            ScalarFn::Exp => -(t * x.exp()).ln_1p(),
        }
    }

    /// Solution at time t of y' = −f(y), y(0) = x.
    pub fn flow(&self, t: f64, x: f64) -> f64 {
        match *self {
            ScalarFn::Linear { slope } => x * (-slope * t).exp(),
            ScalarFn::Power { exp } => {
                if exp == 1.0 {
                    return x * (-t).exp();
                }
                if x == 0.0 {
                    return 0.0;
                }
                let k = exp;
                x.signum() * (x.abs().powf(1.0 - k) + (k - 1.0) * t).powf(-1.0 / (k - 1.0))
            }
            // u = e^{-y} satisfies u' = 1, so y(t) = x − ln(1 + t e^x).
            ScalarFn::Exp => x - (t * x.exp()).ln_1p(),
        }
    }

    /// Distance of 0 to the closure of the range, with an analytic witness
    /// at accuracy ε: a pair (y, f(y)) with |f(y)| ≤ d + ε.
    fn range_infimum(&self) -> (f64, ScalarWitness) {
        match *self {
            // 0 is attained at y = 0 for powers and all linear maps.
            ScalarFn::Power { .. } => (0.0, Arc::new(|_| (0.0, 0.0))),
            ScalarFn::Linear { .. } => (0.0, Arc::new(|_| (0.0, 0.0))),
            // range (0, ∞): y = ln ε gives f(y) = ε. Accuracy capped at
            // 1/2 so that the witness-norm bound stays antitone.
            ScalarFn::Exp => (
                0.0,
                Arc::new(|eps: f64| {
                    let e = eps.min(0.5);
                    (e.ln(), e)
                }),
            ),
        }
    }
}

#[derive(Debug)]
enum OperatorKind {
    LinearPsd {
        m: DMatrix<f64>,
        q: Vector,
        // cached symmetric eigendecomposition (columns of vecs are
        // orthonormal eigenvectors)
        eigvals: DVector<f64>,
        eigvecs: DMatrix<f64>,
    },
    Diagonal {
        fns: Vec<ScalarFn>,
    },
    Constant {
        q: Vector,
    },
}

/// A concrete accretive operator on ℝ^d.
///
/// Shipped kinds are m-accretive (resolvents exist for every λ > 0), so
/// `lambda0` is unbounded (`None`) by default. Instances are immutable
/// after construction and all operations are re-entrant.
#[derive(Debug)]
pub struct OperatorInstance {
    kind: OperatorKind,
    dim: usize,
    lambda0: Option<f64>,
}

impl OperatorInstance {
    /// A(x) = Mx + q for symmetric positive semidefinite M.
    pub fn linear_psd(m: DMatrix<f64>, q: Vector) -> Result<Self> {
        let dim = q.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.nrows().max(m.ncols()),
            });
        }
        let scale = m.amax().max(1.0);
        for i in 0..dim {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::Config("linear_psd matrix must be symmetric".into()));
                }
            }
        }
        let eig = m.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10 * scale) {
            return Err(Error::Config(
                "linear_psd matrix must be positive semidefinite".into(),
            ));
        }
        Ok(Self {
            kind: OperatorKind::LinearPsd {
                m,
                q,
                eigvals: eig.eigenvalues,
                eigvecs: eig.eigenvectors,
            },
            dim,
            lambda0: None,
        })
    }

    /// A(x)_i = f_i(x_i) for nondecreasing scalar functions f_i.
    pub fn diagonal(fns: Vec<ScalarFn>) -> Result<Self> {
        if fns.is_empty() {
            return Err(Error::OutOfRange("dimension must be >= 1".into()));
        }
        let dim = fns.len();
        Ok(Self {
            kind: OperatorKind::Diagonal { fns },
            dim,
            lambda0: None,
        })
    }

    /// A(x) = q.
    pub fn constant(q: Vector) -> Self {
        let dim = q.dim();
        Self {
            kind: OperatorKind::Constant { q },
            dim,
            lambda0: None,
        }
    }

    /// Restrict the range-condition bound (testing hook; shipped kinds
    /// are m-accretive and default to unbounded).
    pub fn with_lambda0(mut self, lambda0: f64) -> Result<Self> {
        if !(lambda0 > 0.0) {
            return Err(Error::OutOfRange("lambda0 must be positive".into()));
        }
        self.lambda0 = Some(lambda0);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The range-condition bound; `None` means unbounded.
    pub fn lambda0(&self) -> Option<f64> {
        self.lambda0
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            OperatorKind::LinearPsd { .. } => format!("linear_psd(d={})", self.dim),
            OperatorKind::Diagonal { fns } => {
                let parts: Vec<String> = fns
                    .iter()
                    .map(|f| match f {
                        ScalarFn::Power { exp } => format!("power({exp})"),
                        ScalarFn::Linear { slope } => format!("linear({slope})"),
                        ScalarFn::Exp => "exp".to_string(),
                    })
                    .collect();
                format!("diagonal[{}]", parts.join(","))
            }
            OperatorKind::Constant { .. } => format!("constant(d={})", self.dim),
        }
    }

    /// The single-valued action u = A(x).
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim)?;
        match &self.kind {
            OperatorKind::LinearPsd { m, q, .. } => {
                let xv = DVector::from_column_slice(x.coords());
                let u = m * xv;
                Vector::new(u.iter().zip(q.coords()).map(|(a, b)| a + b).collect())
            }
            OperatorKind::Diagonal { fns } => Vector::new(
                fns.iter()
                    .zip(x.coords())
                    .map(|(f, &c)| f.eval(c))
                    .collect(),
            ),
            OperatorKind::Constant { q } => Ok(q.clone()),
        }
    }

    /// J_λ x: the unique y with y + λA(y) = x, to residual
    /// ‖y + λA(y) − x‖ ≤ tol·max{1, ‖x‖}. J_0 = Id exactly.
    pub fn resolvent(&self, lambda: f64, x: &Vector, tol: f64) -> Result<Vector> {
        x.check_dim(self.dim)?;
        if !(lambda >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "resolvent step must be >= 0, got {lambda}"
            )));
        }
        if let Some(l0) = self.lambda0 {
            if lambda >= l0 {
                return Err(Error::StepExceedsRange {
                    lambda,
                    lambda0: l0,
                });
            }
        }
        if lambda == 0.0 {
            return Ok(x.clone());
        }
        match &self.kind {
            OperatorKind::Constant { q } => Ok(x.axpy(-lambda, q)),
            OperatorKind::LinearPsd { m, q, .. } => {
                let mut a = m * lambda;
                for i in 0..self.dim {
                    a[(i, i)] += 1.0;
                }
                let rhs = DVector::from_iterator(
                    self.dim,
                    x.coords()
                        .iter()
                        .zip(q.coords())
                        .map(|(xi, qi)| xi - lambda * qi),
                );
                let lu = a.clone().lu();
                let mut y = lu.solve(&rhs).ok_or(Error::SolverFailure {
                    coord: 0,
                    residual: f64::INFINITY,
                    tol,
                    budget: 1,
                })?;
                // One round of iterative refinement keeps the residual at
                // the requested level even for ill-conditioned steps.
                let target = tol * x.norm2().max(1.0);
                for _ in 0..4 {
                    let r = &rhs - &a * &y;
                    if r.norm() <= target {
                        break;
                    }
                    if let Some(dy) = lu.solve(&r) {
                        y += dy;
                    } else {
                        break;
                    }
                }
                Vector::new(y.iter().copied().collect())
            }
            OperatorKind::Diagonal { fns } => {
                let coord_tol = tol * x.norm2().max(1.0) / self.dim as f64;
                let mut out = Vec::with_capacity(self.dim);
                for (i, (f, &c)) in fns.iter().zip(x.coords()).enumerate() {
                    out.push(solve_coordinate(f, lambda, c, coord_tol, i)?);
                }
                Vector::new(out)
            }
        }
    }

    /// J_λ x − x with full relative accuracy for small λ.
    ///
    /// The defining equation gives J_λ x − x = −λ A(J_λ x); solving for
    /// the increment w = y − x directly (w + λA(x+w) = 0) keeps every
    /// term of order λ, so quantities like ‖x − J_λ x‖/λ do not lose
    /// precision to cancellation when λ is far below the norm of x.
    pub fn resolvent_increment(&self, lambda: f64, x: &Vector, tol: f64) -> Result<Vector> {
        x.check_dim(self.dim)?;
        if !(lambda >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "resolvent step must be >= 0, got {lambda}"
            )));
        }
        if let Some(l0) = self.lambda0 {
            if lambda >= l0 {
                return Err(Error::StepExceedsRange {
                    lambda,
                    lambda0: l0,
                });
            }
        }
        if lambda == 0.0 {
            return Ok(Vector::zeros(self.dim));
        }
        match &self.kind {
            OperatorKind::Constant { q } => Ok(q.scale(-lambda)),
            OperatorKind::LinearPsd { m, .. } => {
                // (I + λM) w = −λ(Mx + q): every term is O(λ).
                let mut a = m * lambda;
                for i in 0..self.dim {
                    a[(i, i)] += 1.0;
                }
                let ax = self.apply(x)?;
                let rhs =
                    DVector::from_iterator(self.dim, ax.coords().iter().map(|&c| -lambda * c));
                let w = a.lu().solve(&rhs).ok_or(Error::SolverFailure {
                    coord: 0,
                    residual: f64::INFINITY,
                    tol,
                    budget: 1,
                })?;
                Vector::new(w.iter().copied().collect())
            }
            OperatorKind::Diagonal { fns } => {
                if lambda <= 1e-3 {
                    let mut out = Vec::with_capacity(self.dim);
                    for (i, (f, &c)) in fns.iter().zip(x.coords()).enumerate() {
                        out.push(solve_increment(f, lambda, c, i)?);
                    }
                    Vector::new(out)
                } else {
                    // At moderate steps the direct difference keeps
                    // plenty of relative accuracy.
                    Ok(self.resolvent(lambda, x, tol)?.sub(x))
                }
            }
        }
    }

    /// exact_flow(t, x) − x in cancellation-free form (see
    /// [`ScalarFn::flow_increment`]).
    pub fn flow_increment(&self, t: f64, x: &Vector) -> Result<Option<Vector>> {
        x.check_dim(self.dim)?;
        if t < 0.0 {
            return Err(Error::OutOfRange("flow time must be >= 0".into()));
        }
        match &self.kind {
            OperatorKind::Constant { q } => Ok(Some(q.scale(-t))),
            OperatorKind::Diagonal { fns } => {
                let coords: Vec<f64> = fns
                    .iter()
                    .zip(x.coords())
                    .map(|(f, &c)| f.flow_increment(t, c))
                    .collect();
                Ok(Some(Vector::new(coords)?))
            }
            OperatorKind::LinearPsd {
                q,
                eigvals,
                eigvecs,
                ..
            } => {
                let xt = eigvecs.transpose() * DVector::from_column_slice(x.coords());
                let qt = eigvecs.transpose() * DVector::from_column_slice(q.coords());
                let mut wt = DVector::zeros(self.dim);
                for i in 0..self.dim {
                    let l = eigvals[i].max(0.0);
                    let em1 = (-l * t).exp_m1();
                    let integ = if l > 0.0 { -em1 / l } else { t };
                    wt[i] = em1 * xt[i] - integ * qt[i];
                }
                let w = eigvecs * wt;
                Ok(Some(Vector::new(w.iter().copied().collect())?))
            }
        }
    }

    /// Yosida approximate A_λ x = (x − J_λ x)/λ.
    pub fn yosida(&self, lambda: f64, x: &Vector, tol: f64) -> Result<Vector> {
        if !(lambda > 0.0) {
            return Err(Error::OutOfRange(format!(
                "yosida step must be > 0, got {lambda}"
            )));
        }
        let j = self.resolvent(lambda, x, tol)?;
        Ok(x.sub(&j).scale(1.0 / lambda))
    }

    /// |Ax| = lim_{t→0+} ‖x − J_t x‖/t; equals ‖A(x)‖ for the shipped
    /// single-valued continuous kinds.
    pub fn bracket_norm(&self, space: &SpaceInstance, x: &Vector) -> Result<f64> {
        space.norm(&self.apply(x)?)
    }

    /// Local Lipschitz bound of the action on the ball of radius b,
    /// valid for every ℓ_p norm (row/column-sum bound for matrices,
    /// coordinatewise derivative sup for diagonal kinds).
    pub fn lipschitz_bound(&self, b: f64) -> f64 {
        match &self.kind {
            OperatorKind::LinearPsd { m, .. } => {
                let mut worst = 0.0_f64;
                for i in 0..m.nrows() {
                    let row_sum: f64 = m.row(i).iter().map(|c| c.abs()).sum();
                    worst = worst.max(row_sum);
                }
                worst
            }
            OperatorKind::Diagonal { fns } => {
                fns.iter().fold(0.0_f64, |acc, f| acc.max(f.deriv_sup(b)))
            }
            OperatorKind::Constant { .. } => 0.0,
        }
    }

    /// φ(ε,b) = ε/max{1, L(b)}: a modulus of uniform continuity for |A·|
    /// over graph points with norms ≤ b.
    pub fn bracket_modulus(&self, eps: f64, b: f64) -> Result<f64> {
        if eps <= 0.0 || b <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "bracket modulus requires positive arguments, got eps={eps}, b={b}"
            )));
        }
        Ok(eps / self.lipschitz_bound(b).max(1.0))
    }

    /// Membership test for the graph: ‖A(x) − u‖ ≤ tol in the space norm.
    pub fn graph_contains(
        &self,
        space: &SpaceInstance,
        x: &Vector,
        u: &Vector,
        tol: f64,
    ) -> Result<bool> {
        Ok(space.norm(&self.apply(x)?.sub(u))? <= tol)
    }

    /// A fixed domain witness (c, d_c) with d_c = A(c); c = 0 for all
    /// shipped kinds.
    pub fn domain_witness(&self) -> Result<(Vector, Vector)> {
        let c = Vector::zeros(self.dim);
        let d = self.apply(&c)?;
        Ok((c, d))
    }

    /// Analytic majorant A*(r) ≥ sup{‖A(x)‖ : ‖x‖ ≤ r} in the space norm.
    pub fn sup_norm_on_ball(&self, space: &SpaceInstance, r: f64) -> Result<f64> {
        match &self.kind {
            OperatorKind::Constant { q } => space.norm(q),
            OperatorKind::LinearPsd { q, .. } => Ok(self.lipschitz_bound(r) * r + space.norm(q)?),
            OperatorKind::Diagonal { fns } => {
                let sups: Vec<f64> = fns
                    .iter()
                    .map(|f| f.eval(-r).abs().max(f.eval(r).abs()))
                    .collect();
                space.norm(&Vector::new(sups)?)
            }
        }
    }

    /// Quantitative range data: d(0, ran A), an antitone witness-norm
    /// bound f, the integer bound E ≥ d, and (when analytic) a positive
    /// lower bound D ≤ d.
    pub fn range_data(&self, space: &SpaceInstance) -> Result<RangeData> {
        match &self.kind {
            OperatorKind::Constant { q } => {
                let d = space.norm(q)?;
                let fq = d;
                let witness_q = q.clone();
                let dim = self.dim;
                Ok(RangeData {
                    d_inf: d,
                    e_bound: (d.ceil() as u32) + 1,
                    d_lower: if d > 0.0 { Some(d) } else { None },
                    f_desc: format!("const({fq})"),
                    f: Arc::new(move |_| fq),
                    witness: Arc::new(move |_| (Vector::zeros(dim), witness_q.clone())),
                })
            }
            OperatorKind::LinearPsd { m, q, .. } => {
                // Least-norm range element via least squares.
                let qv = DVector::from_column_slice(q.coords());
                let svd = m.clone().svd(true, true);
                let xstar = svd
                    .solve(&(-&qv), 1e-12)
                    .map_err(|e| Error::Unsupported(format!("least squares failed: {e}")))?;
                let zstar = m * &xstar + &qv;
                let resid2 = zstar.norm();
                let xs = Vector::new(xstar.iter().copied().collect())?;
                let zs = Vector::new(zstar.iter().copied().collect())?;
                let d = match space.kind() {
                    crate::space::NormKind::Euclidean => resid2,
                    _ => {
                        if resid2 <= 1e-10 * (1.0 + qv.norm()) {
                            space.norm(&zs)?
                        } else {
                            return Err(Error::Unsupported(
                                "range infimum of a singular linear_psd operator is only \
                                 analytic in the euclidean norm"
                                    .into(),
                            ));
                        }
                    }
                };
                let bound = space.norm(&xs)?.max(space.norm(&zs)?);
                let (xs2, zs2) = (xs, zs);
                Ok(RangeData {
                    d_inf: d,
                    e_bound: (d.ceil() as u32) + 1,
                    d_lower: if d > 0.0 { Some(d) } else { None },
                    f_desc: format!("const({bound})"),
                    f: Arc::new(move |_| bound),
                    witness: Arc::new(move |_| (xs2.clone(), zs2.clone())),
                })
            }
            OperatorKind::Diagonal { fns } => {
                let parts: Vec<(f64, ScalarWitness)> =
                    fns.iter().map(|f| f.range_infimum()).collect();
                let d_vec = Vector::new(parts.iter().map(|(d, _)| *d).collect())?;
                let d = space.norm(&d_vec)?;
                let dim = self.dim as f64;
                let witnesses: Vec<ScalarWitness> =
                    parts.iter().map(|(_, w)| Arc::clone(w)).collect();
                let make_pair = move |eps: f64| {
                    let per = eps / dim;
                    let mut ys = Vec::with_capacity(witnesses.len());
                    let mut zs = Vec::with_capacity(witnesses.len());
                    for w in &witnesses {
                        let (y, z) = w(per);
                        ys.push(y);
                        zs.push(z);
                    }
                    (
                        Vector::new(ys).expect("finite witness"),
                        Vector::new(zs).expect("finite witness"),
                    )
                };
                let pair_for_f = make_pair.clone();
                let space_kind = space.kind();
                let space_dim = space.dim();
                let f = move |eps: f64| {
                    let s = SpaceInstance::from_kind(space_kind, space_dim);
                    let (y, z) = pair_for_f(eps);
                    s.norm(&y)
                        .unwrap_or(f64::INFINITY)
                        .max(s.norm(&z).unwrap_or(f64::INFINITY))
                };
                Ok(RangeData {
                    d_inf: d,
                    e_bound: (d.ceil() as u32) + 1,
                    d_lower: if d > 0.0 { Some(d) } else { None },
                    f_desc: "diagonal-witness".into(),
                    f: Arc::new(f),
                    witness: Arc::new(make_pair),
                })
            }
        }
    }

    /// Closed-form solution of u' = −A(u), u(0) = x, when available.
    /// All shipped kinds have one.
    pub fn exact_flow(&self, t: f64, x: &Vector) -> Result<Option<Vector>> {
        x.check_dim(self.dim)?;
        if t < 0.0 {
            return Err(Error::OutOfRange("flow time must be >= 0".into()));
        }
        match &self.kind {
            OperatorKind::Constant { q } => Ok(Some(x.axpy(-t, q))),
            OperatorKind::Diagonal { fns } => {
                let coords: Vec<f64> = fns
                    .iter()
                    .zip(x.coords())
                    .map(|(f, &c)| f.flow(t, c))
                    .collect();
                Ok(Some(Vector::new(coords)?))
            }
            OperatorKind::LinearPsd {
                q,
                eigvals,
                eigvecs,
                ..
            } => {
                let xt = eigvecs.transpose() * DVector::from_column_slice(x.coords());
                let qt = eigvecs.transpose() * DVector::from_column_slice(q.coords());
                let mut ut = DVector::zeros(self.dim);
                for i in 0..self.dim {
                    let l = eigvals[i].max(0.0);
                    let decay = (-l * t).exp();
                    // ∫₀ᵗ e^{−ls} ds, series-stable near l·t = 0
                    let integ = if l * t < 1e-8 {
                        t * (1.0 - 0.5 * l * t)
                    } else {
                        (1.0 - decay) / l
                    };
                    ut[i] = decay * xt[i] - integ * qt[i];
                }
                let u = eigvecs * ut;
                Ok(Some(Vector::new(u.iter().copied().collect())?))
            }
        }
    }
}

/// Newton on the increment equation w + λ f(c + w) = 0; the start point
/// −λf(c)/(1+λf'(c)) is already in the quadratic basin for λ ≤ 1e-3 and
/// locally Lipschitz f.
fn solve_increment(f: &ScalarFn, lambda: f64, c: f64, coord: usize) -> Result<f64> {
    let mut w = -lambda * f.eval(c) / (1.0 + lambda * f.deriv(c));
    for _ in 0..60 {
        let h = w + lambda * f.eval(c + w);
        let dh = 1.0 + lambda * f.deriv(c + w);
        let step = h / dh;
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        w = next;
        if step.abs() <= 1e-16 * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let resid = w + lambda * f.eval(c + w);
    let scale = lambda * (1.0 + f.eval(c).abs()) + w.abs();
    if resid.abs() > 1e-9 * scale {
        return Err(Error::SolverFailure {
            coord,
            residual: resid.abs(),
            tol: 1e-9 * scale,
            budget: 60,
        });
    }
    Ok(w)
}

fn solve_coordinate(f: &ScalarFn, lambda: f64, c: f64, tol: f64, coord: usize) -> Result<f64> {
    let g = |y: f64| y + lambda * f.eval(y) - c;
    let dg = |y: f64| 1.0 + lambda * f.deriv(y);
    // The analytic bracket [c − λ f(c)^+, c + λ f(c)^-] is valid for
    // nondecreasing f; fall back to doubling when it overflows or the
    // instance is deliberately non-monotone.
    let fc = f.eval(c);
    let (lo, hi) = if fc >= 0.0 {
        (c - lambda * fc, c)
    } else {
        (c, c - lambda * fc)
    };
    let bracket = if lo.is_finite() && hi.is_finite() && g(lo) <= 0.0 && g(hi) >= 0.0 {
        scalar_root::Bracket { lo, hi }
    } else {
        scalar_root::bracket_increasing(g, c, coord)?
    };
    scalar_root::solve_increasing(g, dg, bracket, c, tol, NEWTON_BUDGET, coord)
}

/// Quantitative witness data for d = d(0, ran A).
///
/// `f` is antitone (f(ε) ≥ f(δ) for ε ≤ δ) and for every ε the witness
/// constructor returns a graph pair (y, z) with ‖y‖,‖z‖ ≤ f(ε) and
/// ‖z‖ − d ≤ ε.
pub struct RangeData {
    pub d_inf: f64,
    pub e_bound: u32,
    pub d_lower: Option<f64>,
    f_desc: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    witness: Arc<dyn Fn(f64) -> (Vector, Vector) + Send + Sync>,
}

impl std::fmt::Debug for RangeData {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("RangeData")
            .field("d_inf", &self.d_inf)
            .field("e_bound", &self.e_bound)
            .field("d_lower", &self.d_lower)
            .field("f", &self.f_desc)
            .finish()
    }
}

impl RangeData {
    pub fn f(&self, eps: f64) -> f64 {
        (self.f)(eps)
    }

    pub fn f_desc(&self) -> &str {
        &self.f_desc
    }

    pub fn f_fn(&self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        Arc::clone(&self.f)
    }

    pub fn witness(&self, eps: f64) -> (Vector, Vector) {
        (self.witness)(eps)
    }
}

impl SpaceInstance {
    /// Rebuild a space of the same kind (used by closures that cannot
    /// borrow the original instance).
    pub(crate) fn from_kind(kind: crate::space::NormKind, dim: usize) -> SpaceInstance {
        match kind {
            crate::space::NormKind::Euclidean => {
                SpaceInstance::euclidean(dim).expect("dim validated")
            }
            crate::space::NormKind::Lp { p } => SpaceInstance::lp(dim, p).expect("p validated"),
        }
    }
}
