//! The four Lax representations of the coupled systems and their
//! zero-curvature residuals.
//!
//! Each representation packages a triple of `(N+1) × (N+1)` matrices
//! `(U, V, W)`, polynomial in the spectral parameter λ, such that the linear
//! problem `Φ_x = UΦ, Φ_y = VΦ, Φ_t = WΦ` is compatible exactly when the
//! potentials solve the corresponding coupled system:
//!
//! * representations 1 and 2 — the Chen–Lee–Liu branch (`U` linear,
//!   respectively quadratic, in λ);
//! * representations 3 and 4 — the Kaup–Newell branch (same split).
//!
//! Compatibility is measured by the zero-curvature residuals
//! `U_y - V_x + [U, V]` and `U_t - W_x + [U, W]`, which for exact potentials
//! sampled on a grid vanish at the order of the finite-difference stencils.

use crate::calculus::{diff, Axis, Branch, Grid3, ScalarField3, VectorPotential};
use crate::linalg::{block, Mat};
use crate::{Error, Real, Result};

/// One of the four Lax representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepId {
    Rep1,
    Rep2,
    Rep3,
    Rep4,
}

impl RepId {
    pub fn index(self) -> u8 {
        match self {
            RepId::Rep1 => 1,
            RepId::Rep2 => 2,
            RepId::Rep3 => 3,
            RepId::Rep4 => 4,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(RepId::Rep1),
            2 => Ok(RepId::Rep2),
            3 => Ok(RepId::Rep3),
            4 => Ok(RepId::Rep4),
            other => Err(Error::InvalidParams(format!(
                "representation must be 1..=4, got {other}"
            ))),
        }
    }

    /// Which potential branch the representation belongs to.
    pub fn branch(self) -> Branch {
        match self {
            RepId::Rep1 | RepId::Rep2 => Branch::Cll,
            RepId::Rep3 | RepId::Rep4 => Branch::Kn,
        }
    }

    /// Degree of λ in `U` (1 for representations 1/3, 2 for 2/4).
    pub fn u_degree(self) -> usize {
        match self {
            RepId::Rep1 | RepId::Rep3 => 1,
            RepId::Rep2 | RepId::Rep4 => 2,
        }
    }
}

/// Values and x-derivatives of the potential pairs at one grid point, the
/// raw material of the Lax blocks.
#[derive(Debug, Clone)]
pub struct PotentialPoint<F> {
    pub first: Vec<F>,
    pub second: Vec<F>,
    pub first_x: Vec<F>,
    pub second_x: Vec<F>,
    pub first_xx: Vec<F>,
    pub second_xx: Vec<F>,
}

impl<F: Real> PotentialPoint<F> {
    pub fn n(&self) -> usize {
        self.first.len()
    }
}

/// Precomputed x-derivative fields of a potential, for repeated pointwise
/// Lax assembly on a shared grid.
pub struct PotentialDerivs<F> {
    branch: Branch,
    grid: Grid3<F>,
    first: Vec<ScalarField3<F>>,
    second: Vec<ScalarField3<F>>,
    first_x: Vec<ScalarField3<F>>,
    second_x: Vec<ScalarField3<F>>,
    first_xx: Vec<ScalarField3<F>>,
    second_xx: Vec<ScalarField3<F>>,
}

impl<F: Real> PotentialDerivs<F> {
    pub fn new(pot: &VectorPotential<F>) -> Result<Self> {
        let n = pot.n();
        let mut first = Vec::with_capacity(n);
        let mut second = Vec::with_capacity(n);
        let mut first_x = Vec::with_capacity(n);
        let mut second_x = Vec::with_capacity(n);
        let mut first_xx = Vec::with_capacity(n);
        let mut second_xx = Vec::with_capacity(n);
        for j in 0..n {
            let (a, b) = pot.pair(j);
            first_x.push(diff(a, Axis::X, 1)?);
            second_x.push(diff(b, Axis::X, 1)?);
            first_xx.push(diff(a, Axis::X, 2)?);
            second_xx.push(diff(b, Axis::X, 2)?);
            first.push(a.clone());
            second.push(b.clone());
        }
        Ok(Self {
            branch: pot.branch(),
            grid: pot.grid().clone(),
            first,
            second,
            first_x,
            second_x,
            first_xx,
            second_xx,
        })
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn grid(&self) -> &Grid3<F> {
        &self.grid
    }

    pub fn point(&self, ix: usize, iy: usize, it: usize) -> PotentialPoint<F> {
        let pick = |fs: &[ScalarField3<F>]| fs.iter().map(|f| f.get(ix, iy, it)).collect();
        PotentialPoint {
            first: pick(&self.first),
            second: pick(&self.second),
            first_x: pick(&self.first_x),
            second_x: pick(&self.second_x),
            first_xx: pick(&self.first_xx),
            second_xx: pick(&self.second_xx),
        }
    }
}

// ---- small row/column vector algebra over Vec<F> -------------------------

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |s, (&x, &y)| s + x * y)
}

/// Outer product `col · row`, an `n×n` row-major block.
fn outer<F: Real>(col: &[F], row: &[F]) -> Vec<F> {
    let n = col.len();
    let mut out = Vec::with_capacity(n * n);
    for &c in col {
        for &r in row {
            out.push(c * r);
        }
    }
    out
}

fn vscale<F: Real>(c: F, v: &[F]) -> Vec<F> {
    v.iter().map(|&x| c * x).collect()
}

fn vsum<F: Real>(terms: &[Vec<F>]) -> Vec<F> {
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        for (o, &x) in out.iter_mut().zip(t) {
            *o = *o + x;
        }
    }
    out
}

fn eye<F: Real>(n: usize, c: F) -> Vec<F> {
    let mut out = vec![F::zero(); n * n];
    for i in 0..n {
        out[i * n + i] = c;
    }
    out
}

// ---- block assembly per representation ------------------------------------

/// The λ-coefficient matrices of `(U, V, W)`, lowest power first.
pub struct LaxCoefficients<F> {
    pub u: Vec<Mat<F>>,
    pub v: Vec<Mat<F>>,
    pub w: Vec<Mat<F>>,
}

/// Evaluated Lax triple at one `(point, λ)`.
pub type LaxEval<F> = (Mat<F>, Mat<F>, Mat<F>);

fn poly_eval<F: Real>(coeffs: &[Mat<F>], lambda: F) -> Mat<F> {
    let mut acc = Mat::zeros(coeffs[0].dim());
    let mut pow = F::one();
    for c in coeffs {
        acc = acc.add(&c.scale(pow));
        pow = pow * lambda;
    }
    acc
}

/// Assembles the λ-coefficient matrices of a representation at one point.
pub fn lax_coefficients<F: Real>(rep: RepId, pt: &PotentialPoint<F>) -> LaxCoefficients<F> {
    let n = pt.n();
    let c = |v: f64| F::of(v);
    let zr = vec![F::zero(); n];
    let zb = vec![F::zero(); n * n];

    // Shorthands shared by both branches: `a` is the row-vector potential,
    // `b` the column-vector potential of the pair.
    let a = &pt.first;
    let b = &pt.second;
    let ax = &pt.first_x;
    let bx = &pt.second_x;
    let axx = &pt.first_xx;
    let bxx = &pt.second_xx;
    let ab = dot(a, b); // UV  (resp. MP)
    let abx = dot(a, bx); // UV_x (resp. MP_x)
    let axb = dot(ax, b); // U_xV (resp. M_xP)
    let ba = outer(b, a); // VU  (resp. PM)
    let bxa = outer(bx, a); // V_xU
    let bax = outer(b, ax); // VU_x
    let bxax = outer(bx, ax); // V_xU_x
    let bxxa = outer(bxx, a); // V_xxU
    let baxx = outer(b, axx); // VU_xx

    match rep {
        RepId::Rep1 => {
            let u0 = block(F::one(), &zr, b, &eye(n, -F::one()));
            let u1 = block(F::zero(), &vscale(-F::one(), a), &zr, &vscale(c(-0.5), &ba));
            let v1 = block(
                ab,
                &vscale(c(-2.0), a),
                &vsum(&[vscale(c(0.5) * ab, b), vscale(-F::one(), bx)]),
                &vscale(-F::one(), &ba),
            );
            let v2 = block(
                F::zero(),
                &vsum(&[vscale(c(-0.5) * ab, a), vscale(-F::one(), ax)]),
                &zr,
                &vsum(&[
                    vscale(c(-0.25) * ab, &ba),
                    vscale(c(0.5), &bxa),
                    vscale(c(-0.5), &bax),
                ]),
            );
            let w2 = block(
                c(0.5) * ab * ab + axb - abx,
                &vsum(&[vscale(-ab, a), vscale(c(-2.0), ax)]),
                &vsum(&[
                    vscale(c(0.25) * ab * ab + c(0.5) * (axb - abx), b),
                    vscale(-ab, bx),
                    bxx.clone(),
                ]),
                &vsum(&[vscale(c(-0.5) * ab, &ba), bxa.clone(), vscale(-F::one(), &bax)]),
            );
            let w3 = block(
                F::zero(),
                &vscale(
                    c(0.5),
                    &vsum(&[
                        vscale(c(-0.5) * ab * ab + (abx - axb), a),
                        vscale(c(-2.0) * ab, ax),
                        vscale(c(-2.0), axx),
                    ]),
                ),
                &zr,
                &vscale(
                    c(0.5),
                    &vsum(&[
                        vscale(c(-0.25) * ab * ab + c(0.5) * (abx - axb), &ba),
                        vscale(ab, &bxa),
                        vscale(-ab, &bax),
                        bxax.clone(),
                        vscale(-F::one(), &bxxa),
                        vscale(-F::one(), &baxx),
                    ]),
                ),
            );
            LaxCoefficients {
                u: vec![u1, u0.clone()],
                v: vec![v2, v1.clone(), u0.scale(c(2.0))],
                w: vec![w3, w2, v1.scale(c(2.0)), u0.scale(c(4.0))],
            }
        }
        RepId::Rep2 => {
            let u0 = block(-F::one(), &zr, &zr, &eye(n, F::one()));
            let u1 = block(F::zero(), a, b, &zb);
            let u2 = block(F::zero(), &zr, &zr, &vscale(c(-0.5), &ba));
            let v2 = block(-ab, &zr, &zr, &ba);
            let v3 = block(
                F::zero(),
                &vsum(&[vscale(c(0.5) * ab, a), ax.clone()]),
                &vsum(&[vscale(c(0.5) * ab, b), vscale(-F::one(), bx)]),
                &zb,
            );
            let v4 = block(
                F::zero(),
                &zr,
                &zr,
                &vsum(&[
                    vscale(c(-0.25) * ab, &ba),
                    vscale(c(0.5), &bxa),
                    vscale(c(-0.5), &bax),
                ]),
            );
            let w4 = block(
                c(-0.5) * ab * ab + abx - axb,
                &zr,
                &zr,
                &vsum(&[vscale(c(0.5) * ab, &ba), bax.clone(), vscale(-F::one(), &bxa)]),
            );
            let w5 = block(
                F::zero(),
                &vsum(&[
                    vscale(c(0.25) * ab * ab + c(0.5) * (axb - abx), a),
                    vscale(ab, ax),
                    axx.clone(),
                ]),
                &vsum(&[
                    vscale(c(0.25) * ab * ab - c(0.5) * (abx - axb), b),
                    vscale(-ab, bx),
                    bxx.clone(),
                ]),
                &zb,
            );
            let w6 = block(
                F::zero(),
                &zr,
                &zr,
                &vscale(
                    c(0.5),
                    &vsum(&[
                        vscale(c(-0.25) * ab * ab + c(0.5) * (abx - axb), &ba),
                        vscale(-F::one(), &baxx),
                        vscale(-F::one(), &bxxa),
                        bxax.clone(),
                        vscale(-ab, &bax),
                        vscale(ab, &bxa),
                    ]),
                ),
            );
            LaxCoefficients {
                u: vec![u2, u1.clone(), u0.clone()],
                v: vec![v4, v3.clone(), v2.clone(), u1.scale(c(-2.0)), u0.scale(c(-2.0))],
                w: vec![
                    w6,
                    w5,
                    w4,
                    v3.scale(c(-2.0)),
                    v2.scale(c(-2.0)),
                    u1.scale(c(4.0)),
                    u0.scale(c(4.0)),
                ],
            }
        }
        RepId::Rep3 => {
            let u0 = block(F::one(), &zr, b, &eye(n, -F::one()));
            let u1 = block(F::zero(), a, &zr, &zb);
            let v1 = block(
                ab,
                &vscale(c(-2.0), a),
                &vsum(&[vscale(ab, b), bx.clone()]),
                &vscale(-F::one(), &ba),
            );
            let v2 = block(
                F::zero(),
                &vsum(&[vscale(ab, a), vscale(-F::one(), ax)]),
                &zr,
                &zb,
            );
            let w2 = block(
                c(1.5) * ab * ab + abx - axb,
                &vsum(&[vscale(c(-2.0) * ab, a), vscale(c(2.0), ax)]),
                &vsum(&[
                    vscale(c(1.5) * ab * ab, b),
                    vscale(c(1.5) * ab, bx),
                    vscale(c(1.5) * abx, b),
                    bxx.clone(),
                ]),
                &vsum(&[vscale(c(-1.5) * ab, &ba), bax.clone(), vscale(-F::one(), &bxa)]),
            );
            let w3 = block(
                F::zero(),
                &vsum(&[
                    vscale(c(1.5) * ab * ab, a),
                    vscale(c(-1.5) * axb, a),
                    vscale(c(-1.5) * ab, ax),
                    axx.clone(),
                ]),
                &zr,
                &zb,
            );
            LaxCoefficients {
                u: vec![u1, u0.clone()],
                v: vec![v2, v1.clone(), u0.scale(c(-2.0))],
                w: vec![w3, w2, v1.scale(c(-2.0)), u0.scale(c(4.0))],
            }
        }
        RepId::Rep4 => {
            let u0 = block(-F::one(), &zr, &zr, &eye(n, F::one()));
            let u1 = block(F::zero(), a, &vscale(-F::one(), b), &zb);
            let v2 = block(-ab, &zr, &zr, &ba);
            let v3 = block(
                F::zero(),
                &vsum(&[vscale(ab, a), vscale(-F::one(), ax)]),
                &vsum(&[vscale(-ab, b), vscale(-F::one(), bx)]),
                &zb,
            );
            let w4 = block(
                c(-1.5) * ab * ab + axb - abx,
                &zr,
                &zr,
                &vsum(&[vscale(c(1.5) * ab, &ba), bxa.clone(), vscale(-F::one(), &bax)]),
            );
            let w5 = block(
                F::zero(),
                &vsum(&[
                    vscale(c(1.5) * ab * ab, a),
                    vscale(c(-1.5) * ab, ax),
                    vscale(c(-1.5) * axb, a),
                    axx.clone(),
                ]),
                &vsum(&[
                    vscale(c(-1.5) * ab * ab, b),
                    vscale(c(-1.5) * ab, bx),
                    vscale(c(-1.5) * abx, b),
                    vscale(-F::one(), bxx),
                ]),
                &zb,
            );
            let zero = Mat::zeros(n + 1);
            LaxCoefficients {
                u: vec![zero.clone(), u1.clone(), u0.clone()],
                v: vec![
                    zero.clone(),
                    v3.clone(),
                    v2.clone(),
                    u1.scale(c(2.0)),
                    u0.scale(c(2.0)),
                ],
                w: vec![
                    zero,
                    w5,
                    w4,
                    v3.scale(c(2.0)),
                    v2.scale(c(2.0)),
                    u1.scale(c(4.0)),
                    u0.scale(c(4.0)),
                ],
            }
        }
    }
}

/// Evaluates the Lax triple `(U, V, W)` of a representation at one grid
/// point and spectral parameter.
///
/// The point must lie at least two cells away from the x-boundaries, where
/// the centered derivative stencils feeding the blocks are valid.
pub fn build_lax<F: Real>(
    rep: RepId,
    pot: &VectorPotential<F>,
    lambda: F,
    point: (usize, usize, usize),
) -> Result<LaxEval<F>> {
    if pot.branch() != rep.branch() {
        return Err(Error::BranchMismatch(format!(
            "representation {} needs a {:?}-branch potential, got {:?}",
            rep.index(),
            rep.branch(),
            pot.branch()
        )));
    }
    let (ix, iy, it) = point;
    let g = pot.grid();
    const MARGIN: usize = 2;
    if ix < MARGIN || ix + MARGIN >= g.nx {
        return Err(Error::BoundaryPoint { ix, iy, it, margin: MARGIN });
    }
    if ix >= g.nx || iy >= g.ny || it >= g.nt {
        return Err(Error::InvalidParams(format!("point ({ix}, {iy}, {it}) outside grid")));
    }
    let derivs = PotentialDerivs::new(pot)?;
    let pt = derivs.point(ix, iy, it);
    let coeffs = lax_coefficients(rep, &pt);
    Ok((
        poly_eval(&coeffs.u, lambda),
        poly_eval(&coeffs.v, lambda),
        poly_eval(&coeffs.w, lambda),
    ))
}

/// Matrix-valued field on a grid: one small dense matrix per grid point,
/// stored as one scalar field per entry.
pub struct MatrixField<F> {
    grid: Grid3<F>,
    dim: usize,
    entries: Vec<ScalarField3<F>>,
}

impl<F: Real> MatrixField<F> {
    pub fn zeros(grid: &Grid3<F>, dim: usize) -> Self {
        Self {
            grid: grid.clone(),
            dim,
            entries: vec![ScalarField3::zeros(grid); dim * dim],
        }
    }

    pub fn grid(&self) -> &Grid3<F> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField3<F> {
        &self.entries[i * self.dim + j]
    }

    pub fn set_mat(&mut self, ix: usize, iy: usize, it: usize, m: &Mat<F>) {
        assert_eq!(m.dim(), self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                self.entries[i * self.dim + j].set(ix, iy, it, m[(i, j)]);
            }
        }
    }

    pub fn get_mat(&self, ix: usize, iy: usize, it: usize) -> Mat<F> {
        let mut m = Mat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.entry(i, j).get(ix, iy, it);
            }
        }
        m
    }

    /// Entrywise derivative along an axis.
    pub fn diff(&self, axis: Axis, order: usize) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| diff(e, axis, order))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: self.grid.clone(), dim: self.dim, entries })
    }

    pub fn max_abs(&self) -> F {
        self.entries.iter().fold(F::zero(), |m, e| m.max(e.max_abs()))
    }

    /// Max-norm over all entries, excluding `margin` cells per axis side.
    pub fn interior_max_abs(&self, margin: usize) -> F {
        self.entries
            .iter()
            .fold(F::zero(), |m, e| m.max(e.interior_max_abs(margin)))
    }
}

/// Zero-curvature residual fields of a representation at fixed λ:
/// `(U_y - V_x + [U,V], U_t - W_x + [U,W])`.
///
/// For potentials that solve the branch's coupled systems exactly, both
/// fields are `O(h²)` in the grid interior.
pub fn zero_curvature_residual<F: Real>(
    rep: RepId,
    pot: &VectorPotential<F>,
    lambda: F,
) -> Result<(MatrixField<F>, MatrixField<F>)> {
    if pot.branch() != rep.branch() {
        return Err(Error::BranchMismatch(format!(
            "representation {} needs a {:?}-branch potential, got {:?}",
            rep.index(),
            rep.branch(),
            pot.branch()
        )));
    }
    let derivs = PotentialDerivs::new(pot)?;
    let g = pot.grid().clone();
    let dim = pot.n() + 1;
    let mut u_f = MatrixField::zeros(&g, dim);
    let mut v_f = MatrixField::zeros(&g, dim);
    let mut w_f = MatrixField::zeros(&g, dim);
    for it in 0..g.nt {
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let pt = derivs.point(ix, iy, it);
                let coeffs = lax_coefficients(rep, &pt);
                u_f.set_mat(ix, iy, it, &poly_eval(&coeffs.u, lambda));
                v_f.set_mat(ix, iy, it, &poly_eval(&coeffs.v, lambda));
                w_f.set_mat(ix, iy, it, &poly_eval(&coeffs.w, lambda));
            }
        }
    }
    let u_y = u_f.diff(Axis::Y, 1)?;
    let u_t = u_f.diff(Axis::T, 1)?;
    let v_x = v_f.diff(Axis::X, 1)?;
    let w_x = w_f.diff(Axis::X, 1)?;

    let mut r_y = MatrixField::zeros(&g, dim);
    let mut r_t = MatrixField::zeros(&g, dim);
    for it in 0..g.nt {
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let u = u_f.get_mat(ix, iy, it);
                let v = v_f.get_mat(ix, iy, it);
                let w = w_f.get_mat(ix, iy, it);
                let ry = u_y
                    .get_mat(ix, iy, it)
                    .sub(&v_x.get_mat(ix, iy, it))
                    .add(&u.commutator(&v));
                let rt = u_t
                    .get_mat(ix, iy, it)
                    .sub(&w_x.get_mat(ix, iy, it))
                    .add(&u.commutator(&w));
                r_y.set_mat(ix, iy, it, &ry);
                r_t.set_mat(ix, iy, it, &rt);
            }
        }
    }
    Ok((r_y, r_t))
}
