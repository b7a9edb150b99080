//! Grids, finite-difference calculus, and PDE residuals.
//!
//! All derivatives are second-order accurate: central stencils in the
//! interior and one-sided stencils of matching order on the boundary rows.
//! The nonlocal operator `∂x⁻¹` is the cumulative trapezoid rule along `x`,
//! anchored to zero at the left edge of the grid.

use crate::{Error, Real, Result};

/// Coordinate axes of a [`Grid3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    T,
}

/// Uniform tensor-product grid in `(x, y, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3<F> {
    pub x_min: F,
    pub x_max: F,
    pub nx: usize,
    pub y_min: F,
    pub y_max: F,
    pub ny: usize,
    pub t_min: F,
    pub t_max: F,
    pub nt: usize,
}

impl<F: Real> Grid3<F> {
    /// Validated constructor: every axis needs at least 5 points (the widest
    /// stencil) and strictly increasing bounds.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: F,
        x_max: F,
        nx: usize,
        y_min: F,
        y_max: F,
        ny: usize,
        t_min: F,
        t_max: F,
        nt: usize,
    ) -> Result<Self> {
        for (axis, n) in [(Axis::X, nx), (Axis::Y, ny), (Axis::T, nt)] {
            if n < 5 {
                return Err(Error::AxisTooShort { axis, len: n, required: 5 });
            }
        }
        for (name, lo, hi) in [("x", x_min, x_max), ("y", y_min, y_max), ("t", t_min, t_max)] {
            if !(hi > lo) {
                return Err(Error::InvalidParams(format!(
                    "{name} bounds must satisfy min < max (got [{lo}, {hi}])"
                )));
            }
        }
        Ok(Self { x_min, x_max, nx, y_min, y_max, ny, t_min, t_max, nt })
    }

    pub fn hx(&self) -> F {
        (self.x_max - self.x_min) / F::of((self.nx - 1) as f64)
    }
    pub fn hy(&self) -> F {
        (self.y_max - self.y_min) / F::of((self.ny - 1) as f64)
    }
    pub fn ht(&self) -> F {
        (self.t_max - self.t_min) / F::of((self.nt - 1) as f64)
    }

    pub fn x(&self, i: usize) -> F {
        self.x_min + self.hx() * F::of(i as f64)
    }
    pub fn y(&self, j: usize) -> F {
        self.y_min + self.hy() * F::of(j as f64)
    }
    pub fn t(&self, k: usize) -> F {
        self.t_min + self.ht() * F::of(k as f64)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, `x` fastest.
    pub fn idx(&self, ix: usize, iy: usize, it: usize) -> usize {
        ix + self.nx * (iy + self.ny * it)
    }

    /// One dyadic refinement per axis (`n → 2n - 1`); the coarse points nest
    /// in the fine grid, so pointwise comparisons need no interpolation.
    pub fn refine(&self) -> Self {
        Self {
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
            nt: 2 * self.nt - 1,
            ..self.clone()
        }
    }
}

/// Scalar field sampled on a [`Grid3`], `x` fastest in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3<F> {
    grid: Grid3<F>,
    values: Vec<F>,
}

impl<F: Real> ScalarField3<F> {
    pub fn zeros(grid: &Grid3<F>) -> Self {
        Self { grid: grid.clone(), values: vec![F::zero(); grid.len()] }
    }

    /// Samples `f(x, y, t)` on the grid.
    pub fn from_fn(grid: &Grid3<F>, f: impl Fn(F, F, F) -> F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for it in 0..grid.nt {
            let t = grid.t(it);
            for iy in 0..grid.ny {
                let y = grid.y(iy);
                for ix in 0..grid.nx {
                    values.push(f(grid.x(ix), y, t));
                }
            }
        }
        Self { grid: grid.clone(), values }
    }

    /// Wraps an existing value buffer (x fastest, matching [`Grid3::idx`]).
    pub fn from_values(grid: &Grid3<F>, values: Vec<F>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "value buffer has {} entries, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Fallible sampler; the first error aborts the sweep.
    pub fn try_from_fn(
        grid: &Grid3<F>,
        mut f: impl FnMut(F, F, F) -> Result<F>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for it in 0..grid.nt {
            let t = grid.t(it);
            for iy in 0..grid.ny {
                let y = grid.y(iy);
                for ix in 0..grid.nx {
                    values.push(f(grid.x(ix), y, t)?);
                }
            }
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Grid3<F> {
        &self.grid
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize, it: usize) -> F {
        self.values[self.grid.idx(ix, iy, it)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, it: usize, v: F) {
        let i = self.grid.idx(ix, iy, it);
        self.values[i] = v;
    }

    /// Entrywise combination of two fields on the same grid.
    pub fn zip_with(&self, rhs: &Self, f: impl Fn(F, F) -> F) -> Result<Self> {
        if self.grid != rhs.grid {
            return Err(Error::GridMismatch("zip_with needs matching grids".into()));
        }
        let values = self.values.iter().zip(&rhs.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn max_abs(&self) -> F {
        self.values.iter().fold(F::zero(), |m, &v| m.max(v.abs()))
    }

    /// Max-norm over the interior, excluding `margin` cells on every side of
    /// every axis (one-sided boundary stencils have larger error constants,
    /// which would pollute convergence ratios).
    pub fn interior_max_abs(&self, margin: usize) -> F {
        let g = &self.grid;
        assert!(
            g.nx > 2 * margin && g.ny > 2 * margin && g.nt > 2 * margin,
            "margin leaves no interior"
        );
        let mut m = F::zero();
        for it in margin..g.nt - margin {
            for iy in margin..g.ny - margin {
                for ix in margin..g.nx - margin {
                    m = m.max(self.get(ix, iy, it).abs());
                }
            }
        }
        m
    }
}

/// Ratio of interior max-norms of two residual fields, coarse over fine.
///
/// For a second-order scheme on an exact solution the ratio approaches 4 as
/// the fine grid is one dyadic refinement of the coarse grid.
pub fn convergence_ratio<F: Real>(
    coarse: &ScalarField3<F>,
    fine: &ScalarField3<F>,
    margin: usize,
) -> F {
    coarse.interior_max_abs(margin) / fine.interior_max_abs(margin)
}

/// Finite-difference derivative of `f` along `axis`, `order ∈ {1, 2, 3}`.
///
/// Second-order accurate everywhere. Interior stencils are central; the
/// boundary rows use one-sided stencils of the same order of accuracy.
pub fn diff<F: Real>(f: &ScalarField3<F>, axis: Axis, order: usize) -> Result<ScalarField3<F>> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParams(format!("derivative order must be 1..=3, got {order}")));
    }
    let g = f.grid().clone();
    let (n, h) = match axis {
        Axis::X => (g.nx, g.hx()),
        Axis::Y => (g.ny, g.hy()),
        Axis::T => (g.nt, g.ht()),
    };
    let required = if order == 3 { 5 } else { 4 };
    if n < required {
        return Err(Error::AxisTooShort { axis, len: n, required });
    }

    let mut out = ScalarField3::zeros(&g);
    let mut line = vec![F::zero(); n];
    let mut dline = vec![F::zero(); n];
    for_each_line(&g, axis, |get_idx| {
        for (i, slot) in line.iter_mut().enumerate() {
            *slot = f.values[get_idx(i)];
        }
        diff_line(&line, h, order, &mut dline);
        for (i, &v) in dline.iter().enumerate() {
            out.values[get_idx(i)] = v;
        }
    });
    Ok(out)
}

/// Applies `body` once per 1-D grid line along `axis`; `body` receives a map
/// from the position along the line to the flat field index.
fn for_each_line<F: Real>(g: &Grid3<F>, axis: Axis, mut body: impl FnMut(&dyn Fn(usize) -> usize)) {
    match axis {
        Axis::X => {
            for it in 0..g.nt {
                for iy in 0..g.ny {
                    body(&|i| g.idx(i, iy, it));
                }
            }
        }
        Axis::Y => {
            for it in 0..g.nt {
                for ix in 0..g.nx {
                    body(&|i| g.idx(ix, i, it));
                }
            }
        }
        Axis::T => {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    body(&|i| g.idx(ix, iy, i));
                }
            }
        }
    }
}

fn diff_line<F: Real>(f: &[F], h: F, order: usize, out: &mut [F]) {
    let n = f.len();
    let c = |v: f64| F::of(v);
    match order {
        1 => {
            let inv2h = c(0.5) / h;
            out[0] = (c(-3.0) * f[0] + c(4.0) * f[1] - f[2]) * inv2h;
            for i in 1..n - 1 {
                out[i] = (f[i + 1] - f[i - 1]) * inv2h;
            }
            out[n - 1] = (c(3.0) * f[n - 1] - c(4.0) * f[n - 2] + f[n - 3]) * inv2h;
        }
        2 => {
            let inv_h2 = F::one() / (h * h);
            out[0] = (c(2.0) * f[0] - c(5.0) * f[1] + c(4.0) * f[2] - f[3]) * inv_h2;
            for i in 1..n - 1 {
                out[i] = (f[i - 1] - c(2.0) * f[i] + f[i + 1]) * inv_h2;
            }
            out[n - 1] =
                (c(2.0) * f[n - 1] - c(5.0) * f[n - 2] + c(4.0) * f[n - 3] - f[n - 4]) * inv_h2;
        }
        3 => {
            let inv_h3 = F::one() / (h * h * h);
            let inv2h3 = c(0.5) * inv_h3;
            // One-sided 5-point stencils, second-order accurate.
            out[0] = (c(-2.5) * f[0] + c(9.0) * f[1] - c(12.0) * f[2] + c(7.0) * f[3]
                - c(1.5) * f[4])
                * inv_h3;
            out[1] = (c(-1.5) * f[0] + c(5.0) * f[1] - c(6.0) * f[2] + c(3.0) * f[3]
                - c(0.5) * f[4])
                * inv_h3;
            for i in 2..n - 2 {
                out[i] =
                    (-f[i - 2] + c(2.0) * f[i - 1] - c(2.0) * f[i + 1] + f[i + 2]) * inv2h3;
            }
            out[n - 2] = -((c(-1.5) * f[n - 1] + c(5.0) * f[n - 2] - c(6.0) * f[n - 3]
                + c(3.0) * f[n - 4]
                - c(0.5) * f[n - 5])
                * inv_h3);
            out[n - 1] = -((c(-2.5) * f[n - 1] + c(9.0) * f[n - 2] - c(12.0) * f[n - 3]
                + c(7.0) * f[n - 4]
                - c(1.5) * f[n - 5])
                * inv_h3);
        }
        _ => unreachable!("order validated by diff"),
    }
}

/// Cumulative trapezoid along `x`, anchored to zero at `x = x_min` on every
/// `(y, t)` line. This is the `∂x⁻¹` entering the mKP residual.
pub fn antiderivative_x<F: Real>(f: &ScalarField3<F>) -> ScalarField3<F> {
    let g = f.grid().clone();
    let half_h = F::of(0.5) * g.hx();
    let mut out = ScalarField3::zeros(&g);
    for it in 0..g.nt {
        for iy in 0..g.ny {
            let mut acc = F::zero();
            out.values[g.idx(0, iy, it)] = acc;
            for ix in 1..g.nx {
                acc = acc
                    + half_h * (f.values[g.idx(ix - 1, iy, it)] + f.values[g.idx(ix, iy, it)]);
                out.values[g.idx(ix, iy, it)] = acc;
            }
        }
    }
    out
}

/// Residual of the mKP equation,
/// `R = q_t - (1/4)(q_xxx - 6 q² q_x - 6 q_x ∂x⁻¹ q_y + 3 ∂x⁻¹ q_yy)`.
///
/// The continuous `∂x⁻¹` carries the decaying-at-infinity convention. A
/// slanted solitary wave always exits a finite box through one `x` boundary
/// on some `(y, t)` lines, so the nonlocal terms are re-anchored per line at
/// whichever `x` boundary holds the smaller `|q|` — that side sits in the
/// decay region and its true antiderivative value is negligible there.
///
/// An exact solution sampled on the grid makes `R = O(h²)` in the interior.
pub fn mkp_residual<F: Real>(q: &ScalarField3<F>) -> Result<ScalarField3<F>> {
    let c = |v: f64| F::of(v);
    let q_t = diff(q, Axis::T, 1)?;
    let q_x = diff(q, Axis::X, 1)?;
    let q_xxx = diff(q, Axis::X, 3)?;
    let q_y = diff(q, Axis::Y, 1)?;
    let q_yy = diff(q, Axis::Y, 2)?;
    let mut inv_qy = antiderivative_x(&q_y);
    let mut inv_qyy = antiderivative_x(&q_yy);

    // Re-anchor the nonlocal terms at the more-decayed boundary of each line.
    let g = q.grid().clone();
    for it in 0..g.nt {
        for iy in 0..g.ny {
            let left = q.values[g.idx(0, iy, it)].abs();
            let right = q.values[g.idx(g.nx - 1, iy, it)].abs();
            if right < left {
                for f in [&mut inv_qy, &mut inv_qyy] {
                    let end = f.values[g.idx(g.nx - 1, iy, it)];
                    for ix in 0..g.nx {
                        let i = g.idx(ix, iy, it);
                        f.values[i] = f.values[i] - end;
                    }
                }
            }
        }
    }

    let mut out = ScalarField3::zeros(q.grid());
    for i in 0..out.values.len() {
        let qv = q.values[i];
        let rhs = q_xxx.values[i]
            - c(6.0) * qv * qv * q_x.values[i]
            - c(6.0) * q_x.values[i] * inv_qy.values[i]
            + c(3.0) * inv_qyy.values[i];
        out.values[i] = q_t.values[i] - c(0.25) * rhs;
    }
    Ok(out)
}

/// Which integrable decomposition a [`VectorPotential`] belongs to.
///
/// `Cll` holds the Chen–Lee–Liu-type pairs `(u_j, v_j)`; `Kn` holds the
/// Kaup–Newell-type pairs `(m_j, p_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Cll,
    Kn,
}

/// The four coupled systems whose residuals can be evaluated.
///
/// `CllY`/`KnY` are the second-order (`y`) flows, `CllT`/`KnT` the
/// third-order (`t`) flows of the respective branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoupledSystem {
    CllY,
    CllT,
    KnY,
    KnT,
}

impl CoupledSystem {
    pub fn branch(self) -> Branch {
        match self {
            CoupledSystem::CllY | CoupledSystem::CllT => Branch::Cll,
            CoupledSystem::KnY | CoupledSystem::KnT => Branch::Kn,
        }
    }
}

/// `N` pairs of potential components on a shared grid.
///
/// For the CLL branch the pairs are `(u_j, v_j)`; for the KN branch they are
/// `(m_j, p_j)`.
#[derive(Debug, Clone)]
pub struct VectorPotential<F> {
    branch: Branch,
    components: Vec<(ScalarField3<F>, ScalarField3<F>)>,
}

impl<F: Real> VectorPotential<F> {
    pub fn new(
        branch: Branch,
        components: Vec<(ScalarField3<F>, ScalarField3<F>)>,
    ) -> Result<Self> {
        let first_grid = components
            .first()
            .map(|(a, _)| a.grid().clone())
            .ok_or_else(|| Error::InvalidParams("potential needs at least one pair".into()))?;
        for (a, b) in &components {
            if a.grid() != &first_grid || b.grid() != &first_grid {
                return Err(Error::GridMismatch(
                    "all potential components must share one grid".into(),
                ));
            }
        }
        Ok(Self { branch, components })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn grid(&self) -> &Grid3<F> {
        self.components[0].0.grid()
    }

    /// The `j`-th pair (`(u_j, v_j)` or `(m_j, p_j)`).
    pub fn pair(&self, j: usize) -> (&ScalarField3<F>, &ScalarField3<F>) {
        (&self.components[j].0, &self.components[j].1)
    }

    fn expect_branch(&self, branch: Branch, what: &str) -> Result<()> {
        if self.branch != branch {
            return Err(Error::BranchMismatch(format!(
                "{what} needs a {branch:?}-branch potential, got {:?}",
                self.branch
            )));
        }
        Ok(())
    }
}

/// The scalar potential carried by a vector potential:
/// `q = -(1/2) Σ_j u_j v_j` (CLL branch) or `q = -(1/2) Σ_j m_j p_j` (KN).
pub fn constrained_potential<F: Real>(pot: &VectorPotential<F>) -> ScalarField3<F> {
    let grid = pot.grid().clone();
    let mut out = ScalarField3::zeros(&grid);
    for (a, b) in &pot.components {
        for i in 0..out.values.len() {
            out.values[i] = out.values[i] - F::of(0.5) * a.values[i] * b.values[i];
        }
    }
    out
}

/// Finite-difference residuals of one of the four coupled systems, one field
/// per equation, ordered `(first_1, second_1, first_2, second_2, ...)`.
pub fn coupled_system_residual<F: Real>(
    which: CoupledSystem,
    pot: &VectorPotential<F>,
) -> Result<Vec<ScalarField3<F>>> {
    pot.expect_branch(which.branch(), "coupled_system_residual")?;
    match which {
        CoupledSystem::CllY => cll_y_residual(pot),
        CoupledSystem::CllT => cll_t_residual(pot),
        CoupledSystem::KnY => kn_y_residual(pot),
        CoupledSystem::KnT => kn_t_residual(pot),
    }
}

/// `Σ_k a_k b_k` over the component pairs, as a field.
fn pair_sum<F: Real>(pot: &VectorPotential<F>) -> ScalarField3<F> {
    let mut out = ScalarField3::zeros(pot.grid());
    for (a, b) in &pot.components {
        for i in 0..out.values.len() {
            out.values[i] = out.values[i] + a.values[i] * b.values[i];
        }
    }
    out
}

/// `Σ_k (∂x a_k) b_k`.
fn pair_sum_dx_first<F: Real>(
    pot: &VectorPotential<F>,
    swap: bool,
) -> Result<ScalarField3<F>> {
    let mut out = ScalarField3::zeros(pot.grid());
    for (a, b) in &pot.components {
        let (da, other) = if swap { (diff(b, Axis::X, 1)?, a) } else { (diff(a, Axis::X, 1)?, b) };
        for i in 0..out.values.len() {
            out.values[i] = out.values[i] + da.values[i] * other.values[i];
        }
    }
    Ok(out)
}

fn cll_y_residual<F: Real>(pot: &VectorPotential<F>) -> Result<Vec<ScalarField3<F>>> {
    let sigma = pair_sum(pot);
    let mut res = Vec::with_capacity(2 * pot.n());
    for (u, v) in &pot.components {
        let u_y = diff(u, Axis::Y, 1)?;
        let u_xx = diff(u, Axis::X, 2)?;
        let u_x = diff(u, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = u_y.values[i] - u_xx.values[i] - sigma.values[i] * u_x.values[i];
        }
        res.push(r);

        let v_y = diff(v, Axis::Y, 1)?;
        let v_xx = diff(v, Axis::X, 2)?;
        let v_x = diff(v, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = v_y.values[i] + v_xx.values[i] - sigma.values[i] * v_x.values[i];
        }
        res.push(r);
    }
    Ok(res)
}

fn cll_t_residual<F: Real>(pot: &VectorPotential<F>) -> Result<Vec<ScalarField3<F>>> {
    let c = |v: f64| F::of(v);
    let sigma = pair_sum(pot);
    let sum_ux_v = pair_sum_dx_first(pot, false)?; // Σ u_{k,x} v_k
    let sum_vx_u = pair_sum_dx_first(pot, true)?; // Σ v_{k,x} u_k
    let mut res = Vec::with_capacity(2 * pot.n());
    for (u, v) in &pot.components {
        let u_t = diff(u, Axis::T, 1)?;
        let u_xxx = diff(u, Axis::X, 3)?;
        let u_xx = diff(u, Axis::X, 2)?;
        let u_x = diff(u, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            let s = sigma.values[i];
            r.values[i] = u_t.values[i]
                - u_xxx.values[i]
                - c(1.5) * s * u_xx.values[i]
                - c(0.75) * (s * s + c(2.0) * sum_ux_v.values[i]) * u_x.values[i];
        }
        res.push(r);

        let v_t = diff(v, Axis::T, 1)?;
        let v_xxx = diff(v, Axis::X, 3)?;
        let v_xx = diff(v, Axis::X, 2)?;
        let v_x = diff(v, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            let s = sigma.values[i];
            r.values[i] = v_t.values[i] - v_xxx.values[i] + c(1.5) * s * v_xx.values[i]
                - c(0.75) * (s * s - c(2.0) * sum_vx_u.values[i]) * v_x.values[i];
        }
        res.push(r);
    }
    Ok(res)
}

fn kn_y_residual<F: Real>(pot: &VectorPotential<F>) -> Result<Vec<ScalarField3<F>>> {
    let sigma = pair_sum(pot); // Σ m_k p_k
    let mut res = Vec::with_capacity(2 * pot.n());
    for (m, p) in &pot.components {
        let m_y = diff(m, Axis::Y, 1)?;
        let m_xx = diff(m, Axis::X, 2)?;
        let bracket = sigma.zip_with(m, |s, mv| s * mv)?;
        let bracket_x = diff(&bracket, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = m_y.values[i] + m_xx.values[i] - bracket_x.values[i];
        }
        res.push(r);

        let p_y = diff(p, Axis::Y, 1)?;
        let p_xx = diff(p, Axis::X, 2)?;
        let bracket = sigma.zip_with(p, |s, pv| s * pv)?;
        let bracket_x = diff(&bracket, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = p_y.values[i] - p_xx.values[i] - bracket_x.values[i];
        }
        res.push(r);
    }
    Ok(res)
}

fn kn_t_residual<F: Real>(pot: &VectorPotential<F>) -> Result<Vec<ScalarField3<F>>> {
    let c = |v: f64| F::of(v);
    let sigma = pair_sum(pot); // Σ m_k p_k
    let sum_mx_p = pair_sum_dx_first(pot, false)?; // Σ m_{k,x} p_k
    let sum_px_m = pair_sum_dx_first(pot, true)?; // Σ p_{k,x} m_k
    let mut res = Vec::with_capacity(2 * pot.n());
    for (m, p) in &pot.components {
        let m_t = diff(m, Axis::T, 1)?;
        let m_xxx = diff(m, Axis::X, 3)?;
        let m_x = diff(m, Axis::X, 1)?;
        let mut bracket = ScalarField3::zeros(pot.grid());
        for i in 0..bracket.values.len() {
            let s = sigma.values[i];
            bracket.values[i] = s * s * m.values[i]
                - s * m_x.values[i]
                - sum_mx_p.values[i] * m.values[i];
        }
        let bracket_x = diff(&bracket, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = m_t.values[i] - m_xxx.values[i] - c(1.5) * bracket_x.values[i];
        }
        res.push(r);

        let p_t = diff(p, Axis::T, 1)?;
        let p_xxx = diff(p, Axis::X, 3)?;
        let p_x = diff(p, Axis::X, 1)?;
        let mut bracket = ScalarField3::zeros(pot.grid());
        for i in 0..bracket.values.len() {
            let s = sigma.values[i];
            bracket.values[i] = s * s * p.values[i]
                + s * p_x.values[i]
                + sum_px_m.values[i] * p.values[i];
        }
        let bracket_x = diff(&bracket, Axis::X, 1)?;
        let mut r = ScalarField3::zeros(pot.grid());
        for i in 0..r.values.len() {
            r.values[i] = p_t.values[i] - p_xxx.values[i] - c(1.5) * bracket_x.values[i];
        }
        res.push(r);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> Grid3<f64> {
        Grid3::new(-2.0, 2.0, 33, -1.0, 1.0, 17, -0.5, 0.5, 9).unwrap()
    }

    #[test]
    fn grid_validation_rejects_short_axes_and_bad_bounds() {
        assert!(matches!(
            Grid3::new(0.0, 1.0, 4, 0.0, 1.0, 8, 0.0, 1.0, 8),
            Err(Error::AxisTooShort { axis: Axis::X, .. })
        ));
        assert!(Grid3::new(1.0, 0.0, 8, 0.0, 1.0, 8, 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn refine_nests_points() {
        let g = small_grid();
        let r = g.refine();
        assert_eq!(r.nx, 65);
        assert!((r.x(2 * 7) - g.x(7)).abs() < 1e-15);
        assert!((r.hy() - 0.5 * g.hy()).abs() < 1e-15);
    }

    /// First and second derivative stencils are exact on quadratics; the
    /// five-point third-derivative stencils are exact on quartics.
    #[test]
    fn diff_is_exact_on_low_degree_polynomials() {
        let g = small_grid();
        let f = ScalarField3::from_fn(&g, |x, y, t| {
            3.0 + 2.0 * x - x * x + 0.5 * y * y + y - 2.0 * t + t * t
        });
        let fx = diff(&f, Axis::X, 1).unwrap();
        let fyy = diff(&f, Axis::Y, 2).unwrap();
        let ft = diff(&f, Axis::T, 1).unwrap();
        for it in 0..g.nt {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    assert!((fx.get(ix, iy, it) - (2.0 - 2.0 * g.x(ix))).abs() < 1e-11);
                    assert!((fyy.get(ix, iy, it) - 1.0).abs() < 1e-11);
                    assert!((ft.get(ix, iy, it) - (-2.0 + 2.0 * g.t(it))).abs() < 1e-11);
                }
            }
        }

        let quartic = ScalarField3::from_fn(&g, |x, _, _| x.powi(4) - 2.0 * x.powi(3) + x);
        let d3 = diff(&quartic, Axis::X, 3).unwrap();
        for ix in 0..g.nx {
            let expect = 24.0 * g.x(ix) - 12.0;
            assert!(
                (d3.get(ix, 0, 0) - expect).abs() < 1e-9,
                "third derivative at boundary/interior row {ix}"
            );
        }
    }

    #[test]
    fn diff_converges_at_second_order_on_smooth_data() {
        let g = Grid3::new(-1.0, 1.0, 33, -1.0, 1.0, 9, -1.0, 1.0, 5).unwrap();
        let fine_g = g.refine();
        for order in 1..=3 {
            let err = |gr: &Grid3<f64>| {
                let f = ScalarField3::from_fn(gr, |x, _, _| (1.3 * x).sin());
                let d = diff(&f, Axis::X, order).unwrap();
                let exact = ScalarField3::from_fn(gr, |x, _, _| match order {
                    1 => 1.3 * (1.3 * x).cos(),
                    2 => -(1.3f64.powi(2)) * (1.3 * x).sin(),
                    _ => -(1.3f64.powi(3)) * (1.3 * x).cos(),
                });
                d.zip_with(&exact, |a, b| a - b).unwrap().max_abs()
            };
            let ratio = err(&g) / err(&fine_g);
            assert!(
                (3.0..5.0).contains(&ratio),
                "order-{order} stencil converged with ratio {ratio}"
            );
        }
    }

    #[test]
    fn antiderivative_is_exact_on_linear_and_anchored_at_left() {
        let g = small_grid();
        let f = ScalarField3::from_fn(&g, |x, _, _| 2.0 * x);
        let int = antiderivative_x(&f);
        for it in 0..g.nt {
            for iy in 0..g.ny {
                assert_eq!(int.get(0, iy, it), 0.0);
                for ix in 0..g.nx {
                    let expect = g.x(ix).powi(2) - g.x_min.powi(2);
                    assert!((int.get(ix, iy, it) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mkp_residual_vanishes_identically_on_zero_field() {
        let g = small_grid();
        let r = mkp_residual(&ScalarField3::zeros(&g)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    /// A line soliton of the KP-family reduction `q(x,y,t) = c·sech(ξ)` is
    /// not an mKP solution; the residual must instead converge to the
    /// analytic residual of the trial function — this pins the sign and
    /// scaling conventions of every term in `mkp_residual`.
    #[test]
    fn mkp_residual_matches_analytic_residual_of_trial_function() {
        let g = Grid3::new(-3.0, 3.0, 129, -1.0, 1.0, 33, -0.25, 0.25, 9).unwrap();
        // q = a·x·y + b·t·x²: every term of the residual is a polynomial and
        // the stencils and trapezoid rule are exact on it.
        let (a, b) = (0.7, -0.4);
        let q = ScalarField3::from_fn(&g, |x, y, t| a * x * y + b * t * x * x);
        let r = mkp_residual(&q).unwrap();
        // q_t = b x²; q_xxx = 0; q_x = a y + 2 b t x; q_y = a x;
        // ∂x⁻¹ q_y = a (x² - x_min²)/2; q_yy = 0.
        let expect = ScalarField3::from_fn(&g, |x, y, t| {
            let q_v = a * x * y + b * t * x * x;
            let q_x = a * y + 2.0 * b * t * x;
            let inv_qy = 0.5 * a * (x * x - g.x_min * g.x_min);
            b * x * x - 0.25 * (-6.0 * q_v * q_v * q_x - 6.0 * q_x * inv_qy)
        });
        let diff_max = r.zip_with(&expect, |u, v| u - v).unwrap().interior_max_abs(2);
        assert!(diff_max < 1e-9, "analytic-vs-FD residual mismatch {diff_max}");
    }

    /// With the second component zero, both CLL flows linearize and
    /// `u = exp(λx + λ²y + λ³t)` is exact; same for the KN flows with
    /// `m = exp(λx - λ²y + λ³t)`. The FD residual must converge at order 2.
    #[test]
    fn coupled_residuals_converge_on_linear_limit_solutions() {
        let g = Grid3::new(-1.0, 1.0, 33, -0.5, 0.5, 17, -0.25, 0.25, 9).unwrap();
        let fine = g.refine();
        let lam = 0.9;

        let make = |gr: &Grid3<f64>, branch: Branch, y_sign: f64| {
            let a = ScalarField3::from_fn(gr, |x, y, t| {
                (lam * x + y_sign * lam * lam * y + lam.powi(3) * t).exp()
            });
            let b = ScalarField3::zeros(gr);
            VectorPotential::new(branch, vec![(a, b)]).unwrap()
        };

        for (system, y_sign) in [
            (CoupledSystem::CllY, 1.0),
            (CoupledSystem::CllT, 1.0),
            (CoupledSystem::KnY, -1.0),
            (CoupledSystem::KnT, -1.0),
        ] {
            let coarse_res =
                coupled_system_residual(system, &make(&g, system.branch(), y_sign)).unwrap();
            let fine_res =
                coupled_system_residual(system, &make(&fine, system.branch(), y_sign)).unwrap();
            let ratio =
                coarse_res[0].interior_max_abs(2) / fine_res[0].interior_max_abs(2);
            assert!(
                (3.0..5.0).contains(&ratio),
                "{system:?} linear-limit convergence ratio {ratio}"
            );
            // The zero-component equation is satisfied identically.
            assert_eq!(coarse_res[1].max_abs(), 0.0);
        }
    }

    /// Oracle check of every nonlinear term: residuals of a manufactured
    /// non-solution must converge to analytically computed values.
    #[test]
    fn coupled_residuals_match_manufactured_oracle() {
        let g = Grid3::new(-1.0, 1.0, 129, -0.5, 0.5, 33, -0.25, 0.25, 9).unwrap();
        let u = |x: f64, y: f64, t: f64| (x + 0.5 * y - 0.3 * t).sin();
        let v = |x: f64, y: f64, _t: f64| (0.7 * x - 0.2 * y).cos();
        let uf = ScalarField3::from_fn(&g, |x, y, t| u(x, y, t));
        let vf = ScalarField3::from_fn(&g, |x, y, t| v(x, y, t));

        // CLL y-flow, first equation: u_y - u_xx - (u v) u_x.
        let pot = VectorPotential::new(Branch::Cll, vec![(uf.clone(), vf.clone())]).unwrap();
        let r = coupled_system_residual(CoupledSystem::CllY, &pot).unwrap();
        let expect = ScalarField3::from_fn(&g, |x, y, t| {
            let s = x + 0.5 * y - 0.3 * t;
            0.5 * s.cos() + s.sin() - u(x, y, t) * v(x, y, t) * s.cos()
        });
        let diff_max = r[0].zip_with(&expect, |a, b| a - b).unwrap().interior_max_abs(2);
        assert!(diff_max < 2e-4, "CLL-y oracle mismatch {diff_max}");

        // KN y-flow, first equation: m_y + m_xx - ((m p) m)_x with the outer
        // derivative applied to the whole bracket.
        let pot = VectorPotential::new(Branch::Kn, vec![(uf, vf)]).unwrap();
        let r = coupled_system_residual(CoupledSystem::KnY, &pot).unwrap();
        let expect = ScalarField3::from_fn(&g, |x, y, t| {
            let s = x + 0.5 * y - 0.3 * t;
            let w = 0.7 * x - 0.2 * y;
            let m = s.sin();
            let m_x = s.cos();
            let p = w.cos();
            let p_x = -0.7 * w.sin();
            let bracket_x = (m_x * p + m * p_x) * m + m * p * m_x;
            0.5 * s.cos() - s.sin() - bracket_x
        });
        let diff_max = r[0].zip_with(&expect, |a, b| a - b).unwrap().interior_max_abs(2);
        assert!(diff_max < 5e-4, "KN-y oracle mismatch {diff_max}");
    }

    #[test]
    fn constrained_potential_sums_pairs() {
        let g = small_grid();
        let a = ScalarField3::from_fn(&g, |x, _, _| x);
        let b = ScalarField3::from_fn(&g, |_, y, _| y + 2.0);
        let pot = VectorPotential::new(Branch::Cll, vec![(a.clone(), b.clone()), (a, b)]).unwrap();
        let q = constrained_potential(&pot);
        assert!((q.get(5, 3, 1) - (-(g.x(5)) * (g.y(3) + 2.0))).abs() < 1e-14);
    }

    #[test]
    fn branch_mismatch_is_an_error() {
        let g = small_grid();
        let a = ScalarField3::zeros(&g);
        let pot = VectorPotential::new(Branch::Kn, vec![(a.clone(), a)]).unwrap();
        assert!(matches!(
            coupled_system_residual(CoupledSystem::CllY, &pot),
            Err(Error::BranchMismatch(_))
        ));
    }
}
