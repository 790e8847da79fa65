//! Finite-difference test of the elliptic criterion
//! `∫(‖∇²u‖² + ⟨∇²W∇u, ∇u⟩)dμ_K / μ(K) ≥ 1/n` for even solutions of
//! `Lu = Δu − ⟨∇W, ∇u⟩ = 1` on a planar body `K`.
//!
//! The solution is the one with `u = 0` on `∂K`, discretized by
//! Shortley–Weller stencils on a uniform grid and solved with BiCGSTAB.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bodies::SymmetricBody;
use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::num;
use crate::quadrature::gauss_legendre;
use crate::report::CheckReport;
use crate::weights::RadialWeight;

/// Grid and solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlOptions {
    /// Grid points per axis; odd so that the origin is a node.
    pub grid: usize,
    /// Tolerance on `E ≥ 1/n`.
    pub tol: f64,
    /// Relative residual target of the linear solver.
    pub solver_tol: f64,
    pub max_iterations: usize,
    /// Tolerance on the pointwise identity evaluated on `u = |x|²/(2n)`.
    pub identity_tol: f64,
}

impl Default for KlOptions {
    fn default() -> Self {
        Self {
            grid: 201,
            tol: 1e-3,
            solver_tol: 1e-13,
            max_iterations: 50_000,
            identity_tol: 1e-6,
        }
    }
}

impl KlOptions {
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }
}

/// Discrete solution and the derived quantities of the criterion.
#[derive(Clone, Debug)]
pub struct KlSolution {
    pub grid: usize,
    pub h: f64,
    pub half_width: f64,
    /// Nodal values, row-major with `x` fastest; `NaN` off the interior.
    pub u: Vec<f64>,
    pub unknowns: usize,
    pub iterations: usize,
    /// `E`, normalized by `μ(K)`.
    pub energy: f64,
    /// `‖L_h u − 1‖_∞` over the unknowns after symmetrization.
    pub lu_residual: f64,
    /// Identity `‖∇²v‖² = ‖∇²(v−r)‖² + (2/n)Δv − 1/n` on `v = r`.
    pub identity_on_r: f64,
    /// `‖∇²u‖² − ‖∇²(u−r)‖² − (2/n)⟨∇W,∇u⟩ − 1/n` at nodes with a full
    /// 3×3 interior neighbourhood.
    pub identity_interior: f64,
    /// The same at the remaining nodes, where derivatives come from a
    /// least-squares quadratic fit.
    pub identity_boundary: f64,
}

const DIM: f64 = 2.0;

struct Grid<'a> {
    body: &'a SymmetricBody,
    n: usize,
    h: f64,
    l: f64,
    /// Unknown index of each node, `usize::MAX` if not interior.
    index: Vec<usize>,
    nodes: Vec<usize>,
}

impl<'a> Grid<'a> {
    fn new(body: &'a SymmetricBody, n: usize) -> Result<Self> {
        if body.dim() != 2 {
            return Err(invalid("the elliptic criterion is implemented for planar bodies"));
        }
        if body.is_degenerate() {
            return Err(Error::Solver("the body has empty interior".into()));
        }
        if n < 5 || n.is_multiple_of(2) {
            return Err(invalid("grid must be odd with at least 5 points per axis"));
        }
        let l = body.support(&[1.0, 0.0]).max(body.support(&[0.0, 1.0]));
        let h = 2.0 * l / (n - 1) as f64;
        let mut g = Self {
            body,
            n,
            h,
            l,
            index: vec![usize::MAX; n * n],
            nodes: Vec::new(),
        };
        for id in 0..n * n {
            if body.gauge(&g.point(id)) < 1.0 - 1e-12 {
                g.index[id] = g.nodes.len();
                g.nodes.push(id);
            }
        }
        if g.nodes.is_empty() {
            return Err(Error::Solver("no interior grid nodes".into()));
        }
        Ok(g)
    }

    fn coord(&self, i: usize) -> f64 {
        if 2 * i + 1 == self.n {
            0.0
        } else {
            -self.l + self.h * i as f64
        }
    }

    fn point(&self, id: usize) -> [f64; 2] {
        [self.coord(id % self.n), self.coord(id / self.n)]
    }

    fn inside(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i >= self.n as i64 || j >= self.n as i64 {
            return None;
        }
        let k = self.index[j as usize * self.n + i as usize];
        (k != usize::MAX).then_some(k)
    }

    fn ij(&self, id: usize) -> (i64, i64) {
        ((id % self.n) as i64, (id / self.n) as i64)
    }

    /// Distance from an interior point to `∂K` along `d`, capped at `cap`.
    fn arm(&self, p: [f64; 2], d: [f64; 2], cap: f64) -> f64 {
        let at = |s: f64| self.body.gauge(&[p[0] + s * d[0], p[1] + s * d[1]]);
        if at(cap) < 1.0 {
            return cap;
        }
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if at(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Arms `(h_+x, h_−x, h_+y, h_−y)` and the neighbouring unknowns.
struct Stencil {
    arms: [f64; 4],
    nbr: [Option<usize>; 4],
}

fn stencils(g: &Grid) -> Vec<Stencil> {
    g.nodes
        .iter()
        .map(|&id| {
            let (i, j) = g.ij(id);
            let p = g.point(id);
            let mut arms = [g.h; 4];
            let mut nbr = [None; 4];
            for (k, (di, dj)) in DIRS.iter().enumerate() {
                nbr[k] = g.inside(i + di, j + dj);
                if nbr[k].is_none() {
                    arms[k] = g.arm(p, [*di as f64, *dj as f64], g.h);
                }
            }
            Stencil { arms, nbr }
        })
        .collect()
}

/// Nonuniform three-point weights `(plus, minus, centre)` for the second
/// and the first derivative.
fn weights_1d(hp: f64, hm: f64) -> ([f64; 3], [f64; 3]) {
    let s = hp + hm;
    (
        [2.0 / (hp * s), 2.0 / (hm * s), -2.0 / (hp * hm)],
        [hm / (hp * s), -hp / (hm * s), (hp - hm) / (hp * hm)],
    )
}

fn drift(w: &RadialWeight, p: [f64; 2]) -> [f64; 2] {
    let mut out = [0.0; 2];
    if num::norm(&p) > 0.0 {
        let _ = w.grad_potential(&p, &mut out);
    }
    out
}

/// Sparse rows of `L_h` with at most five entries.
struct Operator {
    rows: Vec<[(usize, f64); 5]>,
    diag: Vec<f64>,
}

impl Operator {
    fn new(w: &RadialWeight, g: &Grid, st: &[Stencil]) -> Self {
        let mut rows = Vec::with_capacity(st.len());
        let mut diag = Vec::with_capacity(st.len());
        for (k, s) in st.iter().enumerate() {
            let b = drift(w, g.point(g.nodes[k]));
            let mut row = [(usize::MAX, 0.0); 5];
            let mut centre = 0.0;
            for axis in 0..2 {
                let (d2, d1) = weights_1d(s.arms[2 * axis], s.arms[2 * axis + 1]);
                for side in 0..2 {
                    let c = d2[side] - b[axis] * d1[side];
                    if let Some(m) = s.nbr[2 * axis + side] {
                        row[1 + 2 * axis + side] = (m, c);
                    }
                }
                centre += d2[2] - b[axis] * d1[2];
            }
            row[0] = (k, centre);
            rows.push(row);
            diag.push(centre);
        }
        Self { rows, diag }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().filter(|(c, _)| *c != usize::MAX).map(|(c, v)| v * x[*c]).sum();
        }
    }
}

/// Jacobi-preconditioned BiCGSTAB for `A x = b`.
fn bicgstab(a: &Operator, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    let precond = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = x[i] / a.diag[i];
        }
    };
    let bnorm = num::sqrt(dot(b, b));
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let (mut y, mut z, mut s, mut t) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::Solver(format!("BiCGSTAB broke down at iteration {it}")));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond(&p, &mut y);
        a.apply(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if num::sqrt(dot(&s, &s)) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok((x, it));
        }
        precond(&s, &mut z);
        a.apply(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        if num::sqrt(dot(&r, &r)) <= tol * bnorm {
            return Ok((x, it));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Solver("BiCGSTAB diverged".into()));
        }
    }
    Err(Error::Solver(format!("BiCGSTAB did not reach {tol:e} in {max_iter} iterations")))
}

/// Gradient and Hessian `[ux, uy, uxx, uxy, uyy]` at every unknown, and
/// whether the node had a full interior 3×3 neighbourhood.
fn derivatives(g: &Grid, st: &[Stencil], u: &[f64]) -> Vec<([f64; 5], bool)> {
    let h = g.h;
    g.nodes
        .iter()
        .enumerate()
        .map(|(k, &id)| {
            let (i, j) = g.ij(id);
            let at = |di: i64, dj: i64| g.inside(i + di, j + dj).map(|m| u[m]);
            if let (Some(e), Some(wv), Some(nv), Some(sv), Some(ne), Some(nw), Some(se), Some(sw)) =
                (at(1, 0), at(-1, 0), at(0, 1), at(0, -1), at(1, 1), at(-1, 1), at(1, -1), at(-1, -1))
            {
                let c = u[k];
                let d = [
                    (e - wv) / (2.0 * h),
                    (nv - sv) / (2.0 * h),
                    (e - 2.0 * c + wv) / (h * h),
                    (ne - nw - se + sw) / (4.0 * h * h),
                    (nv - 2.0 * c + sv) / (h * h),
                ];
                return (d, true);
            }
            (fit_quadratic(g, st, u, k).unwrap_or_else(|| stencil_derivatives(st, u, k)), false)
        })
        .collect()
}

/// Derivatives from the Shortley–Weller stencil alone (no mixed term).
fn stencil_derivatives(st: &[Stencil], u: &[f64], k: usize) -> [f64; 5] {
    let s = &st[k];
    let mut d = [0.0; 5];
    for axis in 0..2 {
        let (d2, d1) = weights_1d(s.arms[2 * axis], s.arms[2 * axis + 1]);
        let val = |side: usize| s.nbr[2 * axis + side].map_or(0.0, |m| u[m]);
        d[axis] = d1[0] * val(0) + d1[1] * val(1) + d1[2] * u[k];
        d[2 + 2 * axis] = d2[0] * val(0) + d2[1] * val(1) + d2[2] * u[k];
    }
    d
}

/// Least-squares quadratic through the interior nodes of the 5×5 patch and
/// the boundary crossings (value 0) of the arms of the 3×3 patch.
fn fit_quadratic(g: &Grid, st: &[Stencil], u: &[f64], k: usize) -> Option<[f64; 5]> {
    let h = g.h;
    let (i0, j0) = g.ij(g.nodes[k]);
    let mut samples: Vec<([f64; 2], f64)> = Vec::new();
    for dj in -2..=2i64 {
        for di in -2..=2i64 {
            if let Some(m) = g.inside(i0 + di, j0 + dj) {
                let off = [di as f64, dj as f64];
                samples.push((off, u[m]));
                if di.abs() <= 1 && dj.abs() <= 1 {
                    for (a, (ei, ej)) in DIRS.iter().enumerate() {
                        if st[m].nbr[a].is_none() {
                            let s = st[m].arms[a] / h;
                            samples.push(([off[0] + s * *ei as f64, off[1] + s * *ej as f64], 0.0));
                        }
                    }
                }
            }
        }
    }
    if samples.len() < 8 {
        return None;
    }
    // Basis 1, δx, δy, δx²/2, δxδy, δy²/2 in units of h; the centre node is
    // weighted heavily so the fit interpolates it.
    let mut ata = Matrix::zeros(6, 6);
    let mut atb = [0.0; 6];
    for (off, val) in &samples {
        let (x, y) = (off[0], off[1]);
        let row = [1.0, x, y, 0.5 * x * x, x * y, 0.5 * y * y];
        let wgt = if x == 0.0 && y == 0.0 { 1e4 } else { 1.0 / (1.0 + x * x + y * y) };
        for a in 0..6 {
            atb[a] += wgt * row[a] * val;
            for b in 0..6 {
                ata[(a, b)] += wgt * row[a] * row[b];
            }
        }
    }
    let l = cholesky(&ata, 1e-12).ok()?;
    let mut z = [0.0; 6];
    for a in 0..6 {
        let mut s = atb[a];
        for b in 0..a {
            s -= l[(a, b)] * z[b];
        }
        z[a] = s / l[(a, a)];
    }
    let mut c = [0.0; 6];
    for a in (0..6).rev() {
        let mut s = z[a];
        for b in (a + 1)..6 {
            s -= l[(b, a)] * c[b];
        }
        c[a] = s / l[(a, a)];
    }
    Some([c[1] / h, c[2] / h, c[3] / (h * h), c[4] / (h * h), c[5] / (h * h)])
}

/// Area of each cell `[x ± h/2]²` inside `K`, attributed to the node or,
/// for exterior nodes, to the nearest interior neighbour.
fn cell_weights(g: &Grid) -> Vec<f64> {
    const SUB: usize = 16;
    let h = g.h;
    let mut out = vec![0.0; g.nodes.len()];
    for id in 0..g.n * g.n {
        let p = g.point(id);
        let (i, j) = g.ij(id);
        let corners = [[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]];
        let inside_corners = corners
            .iter()
            .filter(|c| g.body.gauge(&[p[0] + c[0] * h, p[1] + c[1] * h]) < 1.0)
            .count();
        let own = g.inside(i, j);
        let area = if inside_corners == 4 {
            h * h
        } else {
            let mut count = 0;
            for a in 0..SUB {
                for b in 0..SUB {
                    let q = [
                        p[0] + h * ((a as f64 + 0.5) / SUB as f64 - 0.5),
                        p[1] + h * ((b as f64 + 0.5) / SUB as f64 - 0.5),
                    ];
                    if g.body.gauge(&q) < 1.0 {
                        count += 1;
                    }
                }
            }
            h * h * count as f64 / (SUB * SUB) as f64
        };
        if area == 0.0 {
            continue;
        }
        let target = own.or_else(|| {
            let order = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];
            order.iter().find_map(|(di, dj)| g.inside(i + di, j + dj))
        });
        if let Some(m) = target {
            out[m] += area;
        }
    }
    out
}

fn frob2(d: &[f64; 5]) -> f64 {
    d[2] * d[2] + 2.0 * d[3] * d[3] + d[4] * d[4]
}

/// `‖H − Id/n‖²`.
fn frob2_shifted(d: &[f64; 5]) -> f64 {
    let c = 1.0 / DIM;
    (d[2] - c) * (d[2] - c) + 2.0 * d[3] * d[3] + (d[4] - c) * (d[4] - c)
}

/// Solves `Lu = 1` with `u = 0` on `∂K` and evaluates the criterion.
pub fn kl_solve(w: &RadialWeight, body: &SymmetricBody, opts: &KlOptions) -> Result<KlSolution> {
    let g = Grid::new(body, opts.grid)?;
    let st = stencils(&g);
    let op = Operator::new(w, &g, &st);
    let m = g.nodes.len();
    let rhs = vec![1.0; m];
    let (mut u, iterations) = bicgstab(&op, &rhs, opts.solver_tol, opts.max_iterations)?;

    // Even symmetrization through the node reflection (i, j) ↦ (N−1−i, N−1−j).
    let n = g.n;
    let sym: Vec<f64> = (0..m)
        .map(|k| {
            let id = g.nodes[k];
            let mirror = g.index[n * n - 1 - id];
            if mirror == usize::MAX {
                u[k]
            } else {
                0.5 * (u[k] + u[mirror])
            }
        })
        .collect();
    u = sym;

    let mut lu = vec![0.0; m];
    op.apply(&u, &mut lu);
    let lu_residual = lu.iter().map(|v| num::abs(v - 1.0)).fold(0.0, f64::max);

    let derived = derivatives(&g, &st, &u);
    let cells = cell_weights(&g);
    let (mut num_e, mut mass) = (0.0, 0.0);
    let (mut id_in, mut id_bd) = (0.0f64, 0.0f64);
    for (k, (d, regular)) in derived.iter().enumerate() {
        let p = g.point(g.nodes[k]);
        let r = num::norm(&p);
        let dens = num::exp(-w.eval(r.max(f64::MIN_POSITIVE)));
        let grad = [d[0], d[1]];
        let curv = if r > 0.0 {
            let hw = w.hessian_potential(&p)?;
            let hg = hw.mul_vec(&grad);
            num::dot(&hg, &grad)
        } else {
            0.0
        };
        let b = drift(w, p);
        let residual = num::abs(frob2(d) - frob2_shifted(d) - (2.0 / DIM) * num::dot(&b, &grad) - 1.0 / DIM);
        if *regular {
            id_in = id_in.max(residual);
        } else {
            id_bd = id_bd.max(residual);
        }
        num_e += cells[k] * dens * (frob2(d) + curv);
        mass += cells[k] * dens;
    }

    // The algebraic identity on v = r = |x|²/(2n) through the same
    // difference formulas.
    let rv: Vec<f64> = g
        .nodes
        .iter()
        .map(|&id| {
            let p = g.point(id);
            num::dot(&p, &p) / (2.0 * DIM)
        })
        .collect();
    let identity_on_r = derivatives(&g, &st, &rv)
        .iter()
        .map(|(d, _)| num::abs(frob2(d) - frob2_shifted(d) - (2.0 / DIM) * (d[2] + d[4]) + 1.0 / DIM))
        .fold(0.0, f64::max);

    let mut full = vec![f64::NAN; n * n];
    for (k, &id) in g.nodes.iter().enumerate() {
        full[id] = u[k];
    }
    Ok(KlSolution {
        grid: n,
        h: g.h,
        half_width: g.l,
        u: full,
        unknowns: m,
        iterations,
        energy: num_e / mass,
        lu_residual,
        identity_on_r,
        identity_interior: id_in,
        identity_boundary: id_bd,
    })
}

/// Passes iff `E ≥ 1/2 − tol` and the identity on `u = r` holds to
/// `identity_tol`. A second solve on the grid with half the spacing count
/// provides the convergence estimate.
pub fn kl_condition_check(w: &RadialWeight, body: &SymmetricBody, opts: &KlOptions) -> Result<CheckReport> {
    let fine = kl_solve(w, body, opts)?;
    let coarse_grid = (opts.grid - 1) / 2 + 1;
    let coarse_grid = if coarse_grid.is_multiple_of(2) {
        coarse_grid + 1
    } else {
        coarse_grid
    };
    let coarse = kl_solve(w, body, &opts.with_grid(coarse_grid.max(5)))?;
    let gap = fine.energy - 1.0 / DIM;
    Ok(CheckReport::new("kl_criterion")
        .param("weight", w.label())
        .param("body", body.label())
        .resolution("grid", format!("{0}x{0}", opts.grid))
        .resolution("unknowns", fine.unknowns)
        .resolution("iterations", fine.iterations)
        .value("energy", fine.energy)
        .value("energy_coarse", coarse.energy)
        .value("lu_residual", fine.lu_residual)
        .value("identity_on_r", fine.identity_on_r)
        .value("identity_interior", fine.identity_interior)
        .value("identity_boundary", fine.identity_boundary)
        .note("u = 0 on the boundary of K")
        .constraint("identity_on_r", -fine.identity_on_r, opts.identity_tol)
        .finish(vec![gap], opts.tol, num::abs(fine.energy - coarse.energy)))
}

/// `E` for the disk of radius `R` from the radial reduction: the regular
/// solution has `u′(r) = e^{w(r)} r^{−1} ∫₀^r s e^{−w(s)} ds` and
/// `u″ = 1 + w′u′ − u′/r`, so `E` is a one-dimensional integral.
pub fn kl_radial_oracle(w: &RadialWeight, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("radius must be a finite positive number"));
    }
    const PANELS: usize = 64;
    let (gx, gw) = gauss_legendre(8);
    let (ix, iw) = gauss_legendre(32);
    let h = radius / PANELS as f64;
    let (mut top, mut bottom) = (0.0, 0.0);
    for p in 0..PANELS {
        for (x, q) in gx.iter().zip(&gw) {
            let r = h * (p as f64 + 0.5 * (1.0 + x));
            let inner: f64 = ix
                .iter()
                .zip(&iw)
                .map(|(y, v)| {
                    let s = 0.5 * r * (1.0 + y);
                    0.5 * r * v * s * num::exp(w.eval(r) - w.eval(s))
                })
                .sum();
            let du = inner / r;
            let d2u = 1.0 + w.deriv(r) * du - du / r;
            let dens = num::exp(-w.eval(r)) * r;
            let q = 0.5 * h * q;
            top += q * dens * (d2u * d2u + (du / r) * (du / r) + w.deriv2(r) * du * du);
            bottom += q * dens;
        }
    }
    Ok(top / bottom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> SymmetricBody {
        SymmetricBody::ball(2).unwrap()
    }

    #[test]
    fn oracle_small_radius_limit() {
        // Without drift u = |x|²/4 and E = 1/2 exactly.
        let flat = RadialWeight::constant(0.0).unwrap();
        assert!((kl_radial_oracle(&flat, 1.0).unwrap() - 0.5).abs() < 1e-13);
        let g = RadialWeight::gaussian();
        let e: Vec<f64> = [2.0, 1.0, 0.5, 0.25].iter().map(|r| kl_radial_oracle(&g, *r).unwrap()).collect();
        for pair in e.windows(2) {
            assert!(pair[0] > pair[1] && pair[1] > 0.5, "{e:?}");
        }
        // E − 1/2 shrinks like R².
        assert!((e[2] - 0.5) / (e[3] - 0.5) > 3.0, "{e:?}");
    }

    #[test]
    fn oracle_matches_closed_form_for_the_gaussian() {
        // For w = t²/2 the inner integral is closed: u′ = (e^{r²/2} − 1)/r.
        let mut top = 0.0;
        let mut bottom = 0.0;
        let steps = 20_000;
        for k in 0..=steps {
            let r = k as f64 / steps as f64;
            let c = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let (du_over_r, du) = if r == 0.0 {
                (0.5, 0.0)
            } else {
                let du = (r * r / 2.0).exp_m1() / r;
                (du / r, du)
            };
            let d2u = 1.0 + r * du - du_over_r;
            let dens = (-r * r / 2.0).exp() * r;
            top += c * dens * (d2u * d2u + du_over_r * du_over_r + du * du);
            bottom += c * dens;
        }
        let e = kl_radial_oracle(&RadialWeight::gaussian(), 1.0).unwrap();
        assert!((e - top / bottom).abs() < 1e-12, "{e} vs {}", top / bottom);
    }

    #[test]
    fn poisson_disk_is_exact_for_quadratics() {
        // Without drift the discrete solution is u = (|x|² − 1)/4 up to the
        // boundary stencil, and E = 1/2.
        let flat = RadialWeight::constant(0.0).unwrap();
        let s = kl_solve(&flat, &disk(), &KlOptions::default().with_grid(41)).unwrap();
        let mid = s.u[(s.grid * s.grid) / 2];
        assert!((mid + 0.25).abs() < 1e-10, "{mid}");
        assert!((s.energy - 0.5).abs() < 1e-8, "{}", s.energy);
        assert!(s.identity_on_r < 1e-9);
    }

    #[test]
    fn gaussian_disk_matches_the_radial_oracle() {
        let g = RadialWeight::gaussian();
        let oracle = kl_radial_oracle(&g, 1.0).unwrap();
        let r = kl_condition_check(&g, &disk(), &KlOptions::default()).unwrap();
        let e = r.get("energy").unwrap();
        assert!((e - oracle).abs() < 1e-3, "{e} vs {oracle}");
        assert!(r.pass);
        assert!(r.get("identity_interior").unwrap() < 1e-8);
    }

    #[test]
    fn residual_shrinks_with_the_grid() {
        let g = RadialWeight::gaussian();
        let oracle = kl_radial_oracle(&g, 1.0).unwrap();
        let err = |n: usize| (kl_solve(&g, &disk(), &KlOptions::default().with_grid(n)).unwrap().energy - oracle).abs();
        let (a, b, c) = (err(51), err(101), err(201));
        // Second order: halving h divides the error by about four.
        assert!(a / b > 3.0 && b / c > 3.0, "{a} {b} {c}");
    }

    #[test]
    fn solution_is_even_and_negative() {
        let w = RadialWeight::power(1.0).unwrap();
        let s = kl_solve(&w, &SymmetricBody::square(), &KlOptions::default().with_grid(31)).unwrap();
        let n = s.grid;
        for id in 0..n * n {
            let (a, b) = (s.u[id], s.u[n * n - 1 - id]);
            if a.is_nan() {
                assert!(b.is_nan());
            } else {
                assert_eq!(a, b);
                assert!(a < 0.0);
            }
        }
        assert!(s.lu_residual < 1e-8);
    }

    #[test]
    fn invalid_grids_and_bodies() {
        let g = RadialWeight::gaussian();
        assert!(matches!(
            kl_solve(&g, &disk(), &KlOptions::default().with_grid(40)),
            Err(Error::InvalidInput(_))
        ));
        let ball3 = SymmetricBody::ball(3).unwrap();
        assert!(kl_solve(&g, &ball3, &KlOptions::default()).is_err());
        let flat = SymmetricBody::dilate(0.0, disk()).unwrap();
        assert!(matches!(
            kl_solve(&g, &flat, &KlOptions::default().with_grid(11)),
            Err(Error::Solver(_))
        ));
        let opts = KlOptions {
            max_iterations: 1,
            ..KlOptions::default().with_grid(41)
        };
        assert!(matches!(kl_solve(&g, &disk(), &opts), Err(Error::Solver(_))));
    }

    #[test]
    fn cell_weights_cover_the_body() {
        let body = SymmetricBody::hexagon();
        let g = Grid::new(&body, 81).unwrap();
        let total: f64 = cell_weights(&g).iter().sum();
        let area = body.as_polygon().unwrap().area();
        assert!((total - area).abs() < 1e-3 * area, "{total} vs {area}");
    }

    #[test]
    fn quadratic_fit_is_exact_on_quadratics() {
        let body = disk();
        let g = Grid::new(&body, 21).unwrap();
        let st = stencils(&g);
        // Boundary samples are 0, so use a quadratic vanishing on the circle.
        let u: Vec<f64> = g
            .nodes
            .iter()
            .map(|&id| {
                let p = g.point(id);
                num::dot(&p, &p) - 1.0
            })
            .collect();
        for (d, regular) in derivatives(&g, &st, &u) {
            assert!(
                (d[2] - 2.0).abs() < 1e-8 && (d[4] - 2.0).abs() < 1e-8 && d[3].abs() < 1e-8,
                "{d:?} {regular}"
            );
        }
    }
}
