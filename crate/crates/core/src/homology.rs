//! Canonical homology basis from lifts of a spanning path through the branch points.
//!
//! Branch points are joined in canonical order (real part, then imaginary
//! part) by straight edges. Each edge has `N` lifts `E_k^{(s)}`, labelled by the
//! sheet at the edge midpoint. The closed chains `γ_{k,s} = E_k^{(s)} - E_k^{(s+1)}`
//! (`s = 0..N-2`) generate `H_1`. Their intersection numbers come from the
//! cyclic order of edge ends in the local coordinate `t = (x - λ)^{1/N}` at each
//! branch point, and an integer congruence reduces the form to the standard
//! symplectic one.

use num_complex::Complex;

use crate::curve::{inverse_mod, CurveSpec};
use crate::error::{Error, Result};
use crate::scalar::{arg_near, czero, ln_near, lit, root_of_unity, Real};
use crate::surface::{branch_loop, continue_sheet, segment_distance, BranchChart};

/// Straight edge between two branch points.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T: Real> {
    pub from: usize,
    pub to: usize,
    /// Anchored `arg(mid - λ_j)` for every `j`; sheet labels are read off these.
    pub mid_args: Vec<T>,
}

impl<T: Real> Edge<T> {
    pub fn mid(&self, spec: &CurveSpec<T>) -> Complex<T> {
        (spec.lambda[self.from] + spec.lambda[self.to]) * lit::<T>(0.5)
    }
}

/// `γ = E_edge^{(sheet)} - E_edge^{(sheet+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub edge: usize,
    pub sheet: u32,
}

/// Integer combination of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub coeffs: Vec<i64>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomologyBasis<T: Real> {
    /// Branch indices in canonical order.
    pub order: Vec<usize>,
    pub edges: Vec<Edge<T>>,
    pub generators: Vec<Generator>,
    pub generator_intersection: Vec<Vec<i64>>,
    pub a: Vec<Cycle>,
    pub b: Vec<Cycle>,
    /// Intersection matrix of `(a_1..a_g, b_1..b_g)`.
    pub intersection: Vec<Vec<i64>>,
}

/// Sheet permutation of a counterclockwise loop around each branch point.
pub fn monodromy_permutations<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<Vec<u32>>> {
    spec.validate()?;
    (0..spec.m())
        .map(|i| {
            (0..spec.n)
                .map(|s| continue_sheet(spec, &branch_loop(spec, spec.base_x, i, s)))
                .collect()
        })
        .collect()
}

/// Canonical ordering: by real part, ties by imaginary part.
pub fn canonical_order<T: Real>(spec: &CurveSpec<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..spec.m()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (spec.lambda[i], spec.lambda[j]);
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    order
}

/// One edge end at a vertex.
#[derive(Debug, Clone, Copy)]
struct End<T> {
    edge: usize,
    sheet: u32,
    angle: T,
}

/// Angle in the `t`-plane at `vertex` of the lift `E_edge^{(sheet)}`.
fn end_angle<T: Real>(spec: &CurveSpec<T>, edge: &Edge<T>, vertex: usize, sheet: u32, chart: &BranchChart<T>) -> Result<T> {
    let n = spec.n;
    let nt = lit::<T>(n as f64);
    let p = spec.lambda[vertex];
    let theta = edge.mid_args[vertex];
    // y on the lift, with the (x - λ_v)^{R_v/N} factor stripped, evaluated at λ_v
    let mut e = czero::<T>();
    for (j, l) in spec.lambda.iter().enumerate() {
        if j == vertex {
            continue;
        }
        e += ln_near(p - l, edge.mid_args[j]) * (lit::<T>(spec.r[j] as f64) / nt);
    }
    let lift = root_of_unity::<T>(n, sheet as i64) * e.exp();
    let mut e0 = czero::<T>();
    for (j, l) in spec.lambda.iter().enumerate() {
        if j == vertex {
            continue;
        }
        e0 += ln_near(p - l, chart.anchor(j)) * (lit::<T>(spec.r[j] as f64) / nt);
    }
    let ratio = lift / e0.exp();
    let c_real = ratio.arg() * nt / T::TAU();
    let c = c_real.round();
    if (c_real - c).abs() > lit(1e-6) {
        return Err(Error::Homology(format!("edge end at vertex {vertex} is not on a sheet (offset {c_real})")));
    }
    let c = c.to_i64().unwrap().rem_euclid(n as i64);
    let j = (c * inverse_mod(spec.r[vertex] as i64, n as i64)).rem_euclid(n as i64);
    let psi = (theta + T::TAU() * lit::<T>(j as f64)) / nt;
    Ok(psi.rem_euclid(&T::TAU()))
}

trait RemEuclid {
    fn rem_euclid(&self, m: &Self) -> Self;
}

impl<T: Real> RemEuclid for T {
    fn rem_euclid(&self, m: &T) -> T {
        let r = *self % *m;
        if r < T::zero() {
            r + *m
        } else {
            r
        }
    }
}

/// Clockwise sweep from `from` to `to`, in `[0, 2π)`.
fn cw<T: Real>(from: T, to: T) -> T {
    (from - to).rem_euclid(&T::TAU())
}

/// Intersection numbers of the generators.
fn intersections<T: Real>(spec: &CurveSpec<T>, edges: &[Edge<T>], gens: &[Generator]) -> Result<Vec<Vec<i64>>> {
    let n = spec.n;
    let m = spec.m();
    let charts: Vec<BranchChart<T>> = (0..m).map(|i| BranchChart::new(spec, i)).collect();
    // ends[v] = all edge ends at vertex v
    let mut ends: Vec<Vec<End<T>>> = vec![Vec::new(); m];
    for (k, e) in edges.iter().enumerate() {
        for v in [e.from, e.to] {
            for s in 0..n {
                let angle = end_angle(spec, e, v, s, &charts[v])?;
                ends[v].push(End { edge: k, sheet: s, angle });
            }
        }
    }
    for v in 0..m {
        let mut a: Vec<T> = ends[v].iter().map(|e| e.angle).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in a.windows(2) {
            if w[1] - w[0] < lit(1e-9) {
                return Err(Error::Homology(format!("coincident edge ends at vertex {v}")));
            }
        }
    }
    let find = |v: usize, edge: usize, sheet: u32| -> T {
        ends[v].iter().find(|e| e.edge == edge && e.sheet == sheet % n).unwrap().angle
    };
    let ng = gens.len();
    let mut g = vec![vec![0i64; ng]; ng];
    for (ci, c) in gens.iter().enumerate() {
        let ec = &edges[c.edge];
        // (vertex, arriving sheet, departing sheet)
        let passages = [(ec.to, c.sheet, c.sheet + 1), (ec.from, c.sheet + 1, c.sheet)];
        for (di, d) in gens.iter().enumerate() {
            let ed = &edges[d.edge];
            let mut total = 0i64;
            for &(v, s_in, s_out) in &passages {
                let alpha = find(v, c.edge, s_in);
                let beta = find(v, c.edge, s_out);
                let sweep = cw(alpha, beta);
                for (sheet, coef) in [(d.sheet, 1i64), (d.sheet + 1, -1i64)] {
                    if ed.from != v && ed.to != v {
                        continue;
                    }
                    let out = if ed.from == v { 1 } else { -1 };
                    let psi = find(v, d.edge, sheet);
                    let dist = cw(alpha, psi);
                    if dist > lit(1e-12) && dist < sweep - lit(1e-12) {
                        total += coef * out;
                    }
                }
            }
            g[ci][di] = total;
        }
    }
    for i in 0..ng {
        for j in 0..ng {
            if g[i][j] != -g[j][i] {
                return Err(Error::Homology(format!("intersection matrix not skew at ({i},{j})")));
            }
        }
    }
    Ok(g)
}

/// Unimodular `P` with `P G Pᵀ = J ⊕ 0`; returns `(P, rank)`.
pub fn symplectic_reduction(g: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, usize)> {
    let n = g.len();
    let mut g: Vec<Vec<i64>> = g.to_vec();
    let mut p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();

    fn swap(g: &mut [Vec<i64>], p: &mut [Vec<i64>], i: usize, j: usize) {
        if i == j {
            return;
        }
        g.swap(i, j);
        for row in g.iter_mut() {
            row.swap(i, j);
        }
        p.swap(i, j);
    }
    // vector k -= q * vector j
    fn sub(g: &mut [Vec<i64>], p: &mut [Vec<i64>], k: usize, j: usize, q: i64) {
        if q == 0 {
            return;
        }
        let n = g.len();
        for c in 0..n {
            g[k][c] -= q * g[j][c];
        }
        for r in 0..n {
            g[r][k] -= q * g[r][j];
        }
        for c in 0..n {
            p[k][c] -= q * p[j][c];
        }
    }

    let mut blk = 0;
    loop {
        let base = 2 * blk;
        if base + 1 >= n {
            break;
        }
        'pivot: loop {
            let mut best: Option<(usize, usize, i64)> = None;
            for i in base..n {
                for j in base..n {
                    let v = g[i][j];
                    if v != 0 && best.is_none_or(|b| v.abs() < b.2.abs()) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((i, j, _)) = best else {
                return finish(g, p, blk);
            };
            swap(&mut g, &mut p, i, base);
            let j = if j == base { i } else { j };
            swap(&mut g, &mut p, j, base + 1);
            if g[base][base + 1] < 0 {
                swap(&mut g, &mut p, base, base + 1);
            }
            let piv = g[base][base + 1];
            let mut clean = true;
            for k in base + 2..n {
                let q = g[base][k].div_euclid(piv);
                sub(&mut g, &mut p, k, base + 1, q);
                // g[base+1][base] = -piv, so this adds q2 * piv to g[base+1][k]
                let q2 = -g[base + 1][k].div_euclid(piv);
                sub(&mut g, &mut p, k, base, q2);
                if g[base][k] != 0 || g[base + 1][k] != 0 {
                    clean = false;
                }
            }
            if clean {
                break 'pivot;
            }
        }
        blk += 1;
    }
    finish(g, p, blk)
}

fn finish(g: Vec<Vec<i64>>, p: Vec<Vec<i64>>, blocks: usize) -> Result<(Vec<Vec<i64>>, usize)> {
    for b in 0..blocks {
        if g[2 * b][2 * b + 1] != 1 {
            return Err(Error::Homology(format!(
                "intersection form is not unimodular (block {b} has {})",
                g[2 * b][2 * b + 1]
            )));
        }
    }
    Ok((p, 2 * blocks))
}

impl<T: Real> HomologyBasis<T> {
    pub fn genus(&self) -> usize {
        self.a.len()
    }

    /// The same cycles over moved branch points (small moves only).
    pub fn transported(&self, spec: &CurveSpec<T>) -> Result<Self> {
        let mut out = self.clone();
        for e in out.edges.iter_mut() {
            let mid = (spec.lambda[e.from] + spec.lambda[e.to]) * lit::<T>(0.5);
            for (j, l) in spec.lambda.iter().enumerate() {
                let new = arg_near(mid - l, e.mid_args[j]);
                if (new - e.mid_args[j]).abs() > lit(1.0) {
                    return Err(Error::Homology("branch points moved too far to transport the basis".into()));
                }
                e.mid_args[j] = new;
            }
        }
        for e in &out.edges {
            let (a, b) = (spec.lambda[e.from], spec.lambda[e.to]);
            for (j, l) in spec.lambda.iter().enumerate() {
                if j != e.from && j != e.to && segment_distance(*l, a, b) < crate::surface::clearance(spec) {
                    return Err(Error::Homology(format!("edge {}-{} passes lambda[{j}]", e.from, e.to)));
                }
            }
        }
        Ok(out)
    }

    /// Coefficients of cycle `c` on the lifts: `(edge, sheet, coefficient)`.
    pub fn lift_chain(&self, c: &Cycle, n: u32) -> Vec<(usize, u32, i64)> {
        let mut out: Vec<(usize, u32, i64)> = Vec::new();
        let mut add = |e: usize, s: u32, v: i64| {
            if let Some(x) = out.iter_mut().find(|x| x.0 == e && x.1 == s) {
                x.2 += v;
            } else {
                out.push((e, s, v));
            }
        };
        for (g, &k) in self.generators.iter().zip(&c.coeffs) {
            if k != 0 {
                add(g.edge, g.sheet, k);
                add(g.edge, (g.sheet + 1) % n, -k);
            }
        }
        out.retain(|x| x.2 != 0);
        out
    }

    /// Diagnostic polylines: each lift as `(from, to, sheet at midpoint, coefficient)`.
    pub fn dump(&self, spec: &CurveSpec<T>) -> Vec<(String, Vec<(Complex<T>, Complex<T>, u32, i64)>)> {
        self.a
            .iter()
            .chain(&self.b)
            .map(|c| {
                let segs = self
                    .lift_chain(c, spec.n)
                    .into_iter()
                    .map(|(e, s, k)| (spec.lambda[self.edges[e].from], spec.lambda[self.edges[e].to], s, k))
                    .collect();
                (c.label.clone(), segs)
            })
            .collect()
    }
}

/// Build the canonical symplectic basis.
pub fn build_basis<T: Real>(spec: &CurveSpec<T>) -> Result<HomologyBasis<T>> {
    let rd = spec.validate()?;
    let g = rd.genus as usize;
    let n = spec.n;
    let order = canonical_order(spec);
    let delta = crate::surface::clearance(spec);
    let mut edges = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (spec.lambda[w[0]], spec.lambda[w[1]]);
        for (j, l) in spec.lambda.iter().enumerate() {
            if j != w[0] && j != w[1] && segment_distance(*l, a, b) < delta {
                return Err(Error::Homology(format!("edge {}-{} passes lambda[{j}]", w[0], w[1])));
            }
        }
        let mid = (a + b) * lit::<T>(0.5);
        let mid_args = spec.lambda.iter().map(|l| (mid - l).arg()).collect();
        edges.push(Edge { from: w[0], to: w[1], mid_args });
    }
    let mut generators = Vec::new();
    for k in 0..edges.len() {
        for s in 0..n - 1 {
            generators.push(Generator { edge: k, sheet: s });
        }
    }
    let gi = intersections(spec, &edges, &generators)?;
    let (p, rank) = symplectic_reduction(&gi)?;
    if rank != 2 * g {
        return Err(Error::Homology(format!("intersection rank {rank}, expected {}", 2 * g)));
    }
    let a: Vec<Cycle> = (0..g).map(|h| Cycle { coeffs: p[2 * h].clone(), label: format!("a{}", h + 1) }).collect();
    let b: Vec<Cycle> =
        (0..g).map(|h| Cycle { coeffs: p[2 * h + 1].clone(), label: format!("b{}", h + 1) }).collect();
    let cycles: Vec<&Cycle> = a.iter().chain(&b).collect();
    let ng = generators.len();
    let mut intersection = vec![vec![0i64; 2 * g]; 2 * g];
    for (i, ci) in cycles.iter().enumerate() {
        for (j, cj) in cycles.iter().enumerate() {
            let mut s = 0;
            for x in 0..ng {
                for y in 0..ng {
                    s += ci.coeffs[x] * gi[x][y] * cj.coeffs[y];
                }
            }
            intersection[i][j] = s;
        }
    }
    for i in 0..2 * g {
        for j in 0..2 * g {
            let expect = if j == i + g && i < g {
                1
            } else if i == j + g && j < g {
                -1
            } else {
                0
            };
            if intersection[i][j] != expect {
                return Err(Error::Homology("reduced intersection matrix is not J".into()));
            }
        }
    }
    Ok(HomologyBasis { order, edges, generators, generator_intersection: gi, a, b, intersection })
}

/// Standard symplectic form `[[0, I], [-I, 0]]`.
pub fn standard_j(g: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0i64; 2 * g]; 2 * g];
    for i in 0..g {
        j[i][i + g] = 1;
        j[i + g][i] = -1;
    }
    j
}
