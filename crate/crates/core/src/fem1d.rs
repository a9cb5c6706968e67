//! Piecewise-linear Galerkin discretization of `A v = (a v')' + conv v' + c v`
//! on a uniform mesh of an interval with homogeneous Dirichlet conditions.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::Tridiagonal;
use crate::error::{domain, Error, Result};

/// Uniform partition of `[left, right]` into `cells` elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceMesh1D {
    left: f64,
    right: f64,
    cells: usize,
}

impl SpaceMesh1D {
    pub fn new(left: f64, right: f64, cells: usize) -> Result<Self> {
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            return domain(format!("mesh needs left < right, got [{left}, {right}]"));
        }
        if cells < 2 {
            return domain(format!("mesh needs at least two cells, got {cells}"));
        }
        Ok(Self { left, right, cells })
    }

    /// The unit interval with `cells` elements.
    pub fn unit(cells: usize) -> Result<Self> {
        Self::new(0.0, 1.0, cells)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        (self.right - self.left) / self.cells as f64
    }

    /// Number of unknowns (interior nodes).
    pub fn dofs(&self) -> usize {
        self.cells - 1
    }

    /// Coordinate of mesh node `i`, `0 ≤ i ≤ cells`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells {
            self.right
        } else {
            self.left + i as f64 * (self.right - self.left) / self.cells as f64
        }
    }

    /// Coordinates of the interior nodes, in unknown order.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.cells).map(|i| self.node(i)).collect()
    }
}

/// A real function of one variable, either constant or general.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant(c) if *c == 0.0)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

/// Coefficients of `(a v')' + conv v' + c v`.
#[derive(Debug, Clone)]
pub struct OperatorCoefficients {
    pub diffusion: Coefficient,
    pub convection: Coefficient,
    pub reaction: Coefficient,
}

impl OperatorCoefficients {
    pub fn new(
        diffusion: impl Into<Coefficient>,
        convection: impl Into<Coefficient>,
        reaction: impl Into<Coefficient>,
    ) -> Self {
        Self {
            diffusion: diffusion.into(),
            convection: convection.into(),
            reaction: reaction.into(),
        }
    }

    /// `A = Δ`.
    pub fn laplacian() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }
}

/// Mass matrix, operator matrix and its transpose on the interior unknowns.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    mesh: SpaceMesh1D,
    mass: Tridiagonal,
    operator: Tridiagonal,
    adjoint: Tridiagonal,
}

const GAUSS3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Assemble mass and operator matrices.
pub fn assemble(mesh: &SpaceMesh1D, coeffs: &OperatorCoefficients) -> Result<AssembledSystem> {
    let n = mesh.dofs();
    let h = mesh.h();
    let mass = Tridiagonal::new(
        vec![h / 6.0; n - 1],
        vec![2.0 * h / 3.0; n],
        vec![h / 6.0; n - 1],
    );

    let mut op = Tridiagonal::zeros(n);
    for e in 0..mesh.cells() {
        let (x0, x1) = (mesh.node(e), mesh.node(e + 1));
        // local[r][s] = ⟨A φ_s, φ_r⟩ restricted to the element, r,s ∈ {left, right}
        let mut local = [[0.0f64; 2]; 2];
        for (xi, wq) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
            let x = 0.5 * (x0 + x1) + 0.5 * h * xi;
            let w = 0.5 * h * wq;
            let a = coeffs.diffusion.eval(x);
            if !(a > 0.0) {
                return Err(Error::Coefficient(format!(
                    "diffusion coefficient must be positive, a({x}) = {a}"
                )));
            }
            let b = coeffs.convection.eval(x);
            let c = coeffs.reaction.eval(x);
            let phi = [(x1 - x) / h, (x - x0) / h];
            let dphi = [-1.0 / h, 1.0 / h];
            for r in 0..2 {
                for s in 0..2 {
                    local[r][s] +=
                        w * (-a * dphi[s] * dphi[r] + b * dphi[s] * phi[r] + c * phi[s] * phi[r]);
                }
            }
        }
        // element nodes e and e+1 map to unknowns e-1 and e when interior
        let global = [
            e.checked_sub(1),
            if e + 1 < mesh.cells() { Some(e) } else { None },
        ];
        for r in 0..2 {
            for s in 0..2 {
                if let (Some(i), Some(j)) = (global[r], global[s]) {
                    add_entry(&mut op, i, j, local[r][s]);
                }
            }
        }
    }
    let adjoint = op.transpose();
    Ok(AssembledSystem {
        mesh: *mesh,
        mass,
        operator: op,
        adjoint,
    })
}

fn add_entry(m: &mut Tridiagonal, i: usize, j: usize, v: f64) {
    if i == j {
        m.diag[i] += v;
    } else if i == j + 1 {
        m.lower[j] += v;
    } else {
        m.upper[i] += v;
    }
}

impl AssembledSystem {
    /// Build a system directly from matrices (e.g. scalar surrogates).
    pub fn from_matrices(
        mesh: SpaceMesh1D,
        mass: Tridiagonal,
        operator: Tridiagonal,
    ) -> Result<Self> {
        if mass.dim() != operator.dim() {
            return domain("mass and operator matrices differ in size");
        }
        if !mass.is_symmetric() {
            return domain("mass matrix must be symmetric");
        }
        let adjoint = operator.transpose();
        Ok(Self {
            mesh,
            mass,
            operator,
            adjoint,
        })
    }

    /// One-unknown surrogate `M = [m]`, `A_h = [a]`.
    pub fn scalar(mass: f64, operator: f64) -> Result<Self> {
        let mesh = SpaceMesh1D::unit(2)?;
        Self::from_matrices(
            mesh,
            Tridiagonal::new(vec![], vec![mass], vec![]),
            Tridiagonal::new(vec![], vec![operator], vec![]),
        )
    }

    pub fn mesh(&self) -> &SpaceMesh1D {
        &self.mesh
    }

    pub fn dofs(&self) -> usize {
        self.mass.dim()
    }

    pub fn mass(&self) -> &Tridiagonal {
        &self.mass
    }

    pub fn operator(&self) -> &Tridiagonal {
        &self.operator
    }

    pub fn adjoint(&self) -> &Tridiagonal {
        &self.adjoint
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.operator.is_symmetric()
    }

    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mass.bilinear(u, v)
    }

    /// L² norm of the finite element function with nodal values `v`.
    pub fn mass_norm(&self, v: &[f64]) -> f64 {
        self.mass_inner(v, v).max(0.0).sqrt()
    }

    /// Symmetric part of the operator matrix.
    pub fn symmetric_part(&self) -> Tridiagonal {
        self.operator.combine(0.5, &self.adjoint, 0.5)
    }
}

/// Largest generalized eigenvalue of the pencil `(S, M)` for symmetric
/// tridiagonal `S` and SPD tridiagonal `M`, by Sturm-sequence bisection.
fn top_pencil_eigenvalue(s: &Tridiagonal, m: &Tridiagonal) -> f64 {
    let n = s.dim();
    let gersh = |t: &Tridiagonal| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += t.lower[i - 1].abs();
            }
            if i + 1 < n {
                r += t.upper[i].abs();
            }
            lo = lo.min(t.diag[i] - r);
            hi = hi.max(t.diag[i] + r);
        }
        (lo, hi)
    };
    let (slo, shi) = gersh(s);
    let (mlo, _) = gersh(m);
    let mmin = if mlo > 0.0 {
        mlo
    } else {
        f64::MIN_POSITIVE.sqrt()
    };
    let bound = slo.abs().max(shi.abs()) / mmin + 1.0;
    // number of pencil eigenvalues strictly above λ = positive pivots of S - λM
    let count_above = |lambda: f64| -> usize {
        let mut count = 0;
        let mut d_prev = 1.0;
        for i in 0..n {
            let mut d = s.diag[i] - lambda * m.diag[i];
            if i > 0 {
                let off = s.lower[i - 1] - lambda * m.lower[i - 1];
                d -= off * off / d_prev;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + lambda.abs());
            }
            if d > 0.0 {
                count += 1;
            }
            d_prev = d;
        }
        count
    };
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper estimate of `max_v vᵀ sym(A_h) v / vᵀ M v`; a nonpositive value
/// certifies that the discrete operator is dissipative.
pub fn check_dissipativity(system: &AssembledSystem, trials: usize) -> f64 {
    let sym = system.symmetric_part();
    let mut margin = top_pencil_eigenvalue(&sym, system.mass());
    let mut rng = ChaCha8Rng::seed_from_u64(0x00d1_5517);
    let n = system.dofs();
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let den = system.mass_inner(&v, &v);
        if den > 0.0 {
            margin = margin.max(sym.bilinear(&v, &v) / den);
        }
    }
    margin
}

/// Generalized eigenpairs `(-A_h) φ = μ M φ`, ascending, M-orthonormal.
#[derive(Debug, Clone)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    modes: Vec<Vec<f64>>,
    mass: Tridiagonal,
}

pub fn generalized_eigendecomposition(system: &AssembledSystem) -> Result<SpectralData> {
    if !system.is_self_adjoint() {
        return Err(Error::Unsupported(
            "spectral decomposition requires a symmetric operator matrix".into(),
        ));
    }
    let n = system.dofs();
    let m = system.mass().to_dense();
    let k = -system.operator().to_dense();
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Singular("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L^{-1} K L^{-T}
    let linv_k = l
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let c = 0.5 * (&c + c.transpose());
    let eig = nalgebra::SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let y = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let phi = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let modes = (0..n)
        .map(|j| phi.column(j).iter().copied().collect())
        .collect();
    Ok(SpectralData {
        eigenvalues,
        modes,
        mass: system.mass().clone(),
    })
}

impl SpectralData {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> &[Vec<f64>] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Φᵀ M v`.
    pub fn modal_coefficients(&self, v: &[f64]) -> Vec<f64> {
        let mv = self.mass.matvec(v);
        self.modes
            .iter()
            .map(|phi| phi.iter().zip(&mv).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Σ_i c_i φ_i`, summed in ascending-eigenvalue order.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.mass.dim();
        let mut out = vec![0.0; n];
        for (c, phi) in coeffs.iter().zip(&self.modes) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        out
    }
}

/// Spatial profile used for loads, targets and initial data.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `coeff · x^exponent`
    Power {
        coeff: f64,
        exponent: f64,
    },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Power { coeff, exponent } => write!(f, "Power({coeff} x^{exponent})"),
            Profile::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl Profile {
    pub fn power(exponent: f64) -> Self {
        Profile::Power {
            coeff: 1.0,
            exponent,
        }
    }

    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Power { coeff, exponent } => coeff * x.powf(*exponent),
            Profile::Function(f) => f(x),
        }
    }
}

/// `∫ g φ_i` for every interior hat function.
pub fn load_vector(mesh: &SpaceMesh1D, g: &Profile) -> Result<Vec<f64>> {
    match g {
        Profile::Constant(c) => power_moments(mesh, *c, 0.0),
        Profile::Power { coeff, exponent } => power_moments(mesh, *coeff, *exponent),
        Profile::Function(f) => {
            let rule = crate::quad::GaussRule::new(6);
            let h = mesh.h();
            Ok((1..mesh.cells())
                .map(|i| {
                    let (a, b, c) = (mesh.node(i - 1), mesh.node(i), mesh.node(i + 1));
                    rule.integrate(a, b, |x| f(x) * (x - a) / h)
                        + rule.integrate(b, c, |x| f(x) * (c - x) / h)
                })
                .collect())
        }
    }
}

fn power_moments(mesh: &SpaceMesh1D, coeff: f64, p: f64) -> Result<Vec<f64>> {
    if p <= -1.0 {
        return domain(format!("x^{p} is not integrable at the origin"));
    }
    if mesh.left() < 0.0 && p != p.floor() {
        return domain(format!(
            "x^{p} is not real on a mesh reaching {}",
            mesh.left()
        ));
    }
    let h = mesh.h();
    let p1 = |x: f64| x.powf(p + 1.0) / (p + 1.0);
    let p2 = |x: f64| x.powf(p + 2.0) / (p + 2.0);
    Ok((1..mesh.cells())
        .map(|i| {
            let (a, b, c) = (mesh.node(i - 1), mesh.node(i), mesh.node(i + 1));
            let left = (p2(b) - p2(a)) - a * (p1(b) - p1(a));
            let right = c * (p1(c) - p1(b)) - (p2(c) - p2(b));
            coeff * (left + right) / h
        })
        .collect())
}

/// Nodal coefficients of the L² projection of `g` onto the P1 space.
pub fn project_load(mesh: &SpaceMesh1D, g: &Profile) -> Result<Vec<f64>> {
    let n = mesh.dofs();
    let h = mesh.h();
    let mass = Tridiagonal::new(
        vec![h / 6.0; n - 1],
        vec![2.0 * h / 3.0; n],
        vec![h / 6.0; n - 1],
    );
    let load = load_vector(mesh, g)?;
    Ok(mass.factor()?.solve(&load))
}
