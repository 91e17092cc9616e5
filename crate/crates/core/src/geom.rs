//! Exact rational convex geometry.
//!
//! Polytopes are kept in H-representation `normal . x + offset >= 0`.
//! Vertex enumeration intersects d-subsets of bounding hyperplanes and
//! filters by feasibility, which is exact and entirely adequate at the
//! dimensions this engine works in (d <= 6 or so). Emptiness is decided by
//! Fourier-Motzkin elimination and boundedness through the recession cone,
//! so the error cases `Infeasible`/`Unbounded` are certified, not guessed.
//!
//! All orderings are deterministic (lexicographic on exact rationals), so
//! every downstream quantity is reproducible byte for byte.

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{primitive_vector, rat_to_f64, Rat};

/// A point on the weight side (coordinates of the moment polytope).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point(pub Vec<Rat>);

/// A direction on the dual side (gradients, normals, one-parameter groups).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Direction(pub Vec<Rat>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }
}

impl Direction {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
}

/// Coordinate pairing between the two sides.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "pairing of mismatched dimensions");
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(a: &[Rat], s: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * s).collect()
}

/// One closed half-space `normal . x + offset >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ineq {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Ineq {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        Ineq { normal, offset }
    }

    pub fn value(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) + &self.offset
    }

    pub fn satisfied(&self, x: &[Rat]) -> bool {
        !crate::rat::is_negative(&self.value(x))
    }

    pub fn active(&self, x: &[Rat]) -> bool {
        self.value(x).is_zero()
    }

    /// Primitive integer normal and the factor `t > 0` with `prim = t * normal`.
    pub fn primitive(&self) -> (Vec<BigInt>, Rat) {
        primitive_vector(&self.normal)
    }

    /// Same half-space with primitive integer normal data (for deduplication).
    fn canonical_key(&self) -> (Vec<BigInt>, Rat) {
        let (prim, t) = self.primitive();
        (prim, &self.offset * t)
    }
}

#[derive(Clone, Debug)]
pub struct HPolytope {
    pub dim: usize,
    pub ineqs: Vec<Ineq>,
}

/// A d-simplex given by d+1 affinely independent vertices.
#[derive(Clone, Debug)]
pub struct Simplex {
    pub vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let d = vertices
            .first()
            .map(|v| v.dim())
            .ok_or_else(|| Error::Invalid("empty simplex".into()))?;
        if vertices.len() != d + 1 {
            return Err(Error::Invalid(format!(
                "simplex in dimension {d} needs {} vertices, got {}",
                d + 1,
                vertices.len()
            )));
        }
        let s = Simplex { vertices };
        if s.det().is_zero() {
            return Err(Error::Invalid("degenerate simplex".into()));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    fn det(&self) -> Rat {
        let d = self.dim();
        let rows: Vec<Vec<Rat>> = (1..=d)
            .map(|i| sub(self.vertices[i].coords(), self.vertices[0].coords()))
            .collect();
        determinant(&rows)
    }

    /// Lattice-normalized volume `|det| / d!`.
    pub fn volume(&self) -> Rat {
        let d = self.dim();
        self.det().abs() / crate::rat::factorial(d)
    }
}

/// Determinant by fraction-free-ish Gaussian elimination over the rationals.
pub fn determinant(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    if n == 0 {
        return Rat::one();
    }
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let v = &m[col][c] * &factor;
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Solve `A x = b` for square rational `A`; `None` if singular.
pub fn solve_linear(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let pv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let v = &m[col][c] * &factor;
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        let pivot = (r..m.len()).find(|&i| !m[i][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => continue,
        };
        m.swap(pivot, r);
        let pv = m[r][col].clone();
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let factor = &m[i][col] / &pv;
                for c in col..ncols {
                    let v = &m[r][c] * &factor;
                    m[i][c] -= v;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a point set.
pub fn affine_rank(points: &[Point]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| sub(p.coords(), points[0].coords()))
        .collect();
    rank(&rows)
}

impl HPolytope {
    pub fn new(dim: usize, ineqs: Vec<Ineq>) -> Self {
        // Deduplicate exact repeats of the same half-space.
        let mut seen: Vec<(Vec<BigInt>, Rat)> = Vec::new();
        let mut kept = Vec::new();
        for iq in ineqs {
            assert_eq!(iq.normal.len(), dim, "inequality dimension mismatch");
            let key = iq.canonical_key();
            if !seen.contains(&key) {
                seen.push(key);
                kept.push(iq);
            }
        }
        HPolytope { dim, ineqs: kept }
    }

    /// Keep duplicates; used when inequality indices must match an external
    /// list (e.g. the facet list of a datum).
    pub fn raw(dim: usize, ineqs: Vec<Ineq>) -> Self {
        HPolytope { dim, ineqs }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.ineqs.iter().all(|iq| iq.satisfied(x))
    }

    pub fn interval(lo: Rat, hi: Rat) -> Self {
        HPolytope::new(
            1,
            vec![
                Ineq::new(vec![Rat::one()], -lo),
                Ineq::new(vec![-Rat::one()], hi),
            ],
        )
    }

    /// Axis-aligned box given per-coordinate bounds.
    pub fn bounding_box(bounds: &[(Rat, Rat)]) -> Self {
        let d = bounds.len();
        let mut ineqs = Vec::new();
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut n = vec![Rat::zero(); d];
            n[i] = Rat::one();
            ineqs.push(Ineq::new(n.clone(), -lo.clone()));
            n[i] = -Rat::one();
            ineqs.push(Ineq::new(n, hi.clone()));
        }
        HPolytope::new(d, ineqs)
    }

    /// Exact emptiness test by Fourier-Motzkin elimination.
    pub fn is_feasible(&self) -> bool {
        fourier_motzkin_feasible(self.dim, &self.ineqs)
    }

    /// The recession cone `{v : normal_i . v >= 0}` is nontrivial iff the
    /// polyhedron is unbounded in some direction. Certified by enumerating
    /// the vertices of the cone clipped to the unit box.
    pub fn recession_nontrivial(&self) -> bool {
        let d = self.dim;
        let mut ineqs: Vec<Ineq> = self
            .ineqs
            .iter()
            .map(|iq| Ineq::new(iq.normal.clone(), Rat::zero()))
            .collect();
        for i in 0..d {
            let mut n = vec![Rat::zero(); d];
            n[i] = Rat::one();
            ineqs.push(Ineq::new(n.clone(), Rat::one()));
            n[i] = -Rat::one();
            ineqs.push(Ineq::new(n, Rat::one()));
        }
        for v in enumerate_basic_feasible(d, &ineqs) {
            if v.0.iter().any(|x| !x.is_zero()) {
                return true;
            }
        }
        false
    }

    /// Exact vertex set, deduplicated, in lexicographic order.
    pub fn vertices(&self) -> Result<Vec<Point>> {
        if !self.is_feasible() {
            return Err(Error::Infeasible);
        }
        if self.recession_nontrivial() {
            return Err(Error::Unbounded);
        }
        let mut vs = enumerate_basic_feasible(self.dim, &self.ineqs);
        vs.sort();
        vs.dedup();
        Ok(vs)
    }

    pub fn is_full_dimensional(&self) -> Result<bool> {
        Ok(affine_rank(&self.vertices()?) == self.dim)
    }

    /// Rational centroid of the vertex set; interior for full-dimensional
    /// polytopes.
    pub fn centroid(&self) -> Result<Point> {
        let vs = self.vertices()?;
        let n = Rat::from_integer(BigInt::from(vs.len()));
        let mut acc = vec![Rat::zero(); self.dim];
        for v in &vs {
            for (a, x) in acc.iter_mut().zip(v.coords()) {
                *a += x;
            }
        }
        Ok(Point(acc.into_iter().map(|x| x / &n).collect()))
    }

    pub fn strictly_inside(&self, x: &[Rat]) -> bool {
        self.ineqs.iter().all(|iq| iq.value(x).is_positive())
    }

    /// Intersection with extra half-spaces.
    pub fn intersect(&self, extra: &[Ineq]) -> HPolytope {
        let mut ineqs = self.ineqs.clone();
        ineqs.extend(extra.iter().cloned());
        HPolytope::new(self.dim, ineqs)
    }

    /// The facet supported by inequality `index`, realized as a
    /// (d-1)-dimensional polytope by eliminating one coordinate, together
    /// with the affine embedding back into ambient coordinates and the
    /// dropped-coordinate entry of the primitive normal (the lattice
    /// projection factor).
    pub fn facet_embedding(&self, index: usize) -> Result<FacetEmbedding> {
        let d = self.dim;
        let iq = self
            .ineqs
            .get(index)
            .ok_or(Error::NotAFacet(index))?
            .clone();
        let (prim, _t) = iq.primitive();
        let drop = (0..d)
            .find(|&j| !prim[j].is_zero())
            .ok_or(Error::NotAFacet(index))?;
        // On the facet: normal . x = -offset, so
        // x_drop = (-offset - sum_{j != drop} normal_j x_j) / normal_drop.
        let nd = iq.normal[drop].clone();
        let mut linear = Vec::with_capacity(d - 1);
        for j in 0..d {
            if j != drop {
                linear.push(-&iq.normal[j] / &nd);
            }
        }
        let constant = -&iq.offset / &nd;
        let embedding = FacetEmbedding {
            ambient_dim: d,
            drop,
            linear,
            constant,
            prim_drop_abs: prim[drop].abs(),
            polytope: None,
        };
        // Substitute into the other inequalities.
        let mut sub_ineqs = Vec::new();
        for (k, other) in self.ineqs.iter().enumerate() {
            if k == index {
                continue;
            }
            let mut n = Vec::with_capacity(d.saturating_sub(1));
            let ed = &other.normal[drop];
            let mut li = 0usize;
            for j in 0..d {
                if j != drop {
                    n.push(&other.normal[j] + ed * &embedding.linear[li]);
                    li += 1;
                }
            }
            let off = &other.offset + ed * &embedding.constant;
            sub_ineqs.push(Ineq::new(n, off));
        }
        Ok(FacetEmbedding {
            polytope: Some(Box::new(HPolytope::new(d - 1, sub_ineqs))),
            ..embedding
        })
    }

    /// Deterministic triangulation: fan from the lexicographically first
    /// vertex over recursively triangulated facets that do not contain it.
    pub fn triangulate(&self) -> Result<Vec<Simplex>> {
        let vs = self.vertices()?;
        if affine_rank(&vs) < self.dim {
            return Err(Error::DegeneratePolytope);
        }
        if self.dim == 0 {
            return Ok(vec![]);
        }
        if self.dim == 1 {
            let lo = vs.first().unwrap().clone();
            let hi = vs.last().unwrap().clone();
            return Ok(vec![Simplex::new(vec![lo, hi])?]);
        }
        let apex = vs[0].clone();
        let mut out = Vec::new();
        for (i, iq) in self.ineqs.iter().enumerate() {
            if iq.active(apex.coords()) {
                continue;
            }
            let on_facet: Vec<Point> = vs
                .iter()
                .filter(|v| iq.active(v.coords()))
                .cloned()
                .collect();
            if affine_rank(&on_facet) < self.dim - 1 {
                continue;
            }
            let emb = self.facet_embedding(i)?;
            let fp = emb.polytope.as_ref().unwrap();
            for s in fp.triangulate_or_point()? {
                let mut verts = vec![apex.clone()];
                for v in s {
                    verts.push(emb.lift(&v));
                }
                out.push(Simplex::new(verts)?);
            }
        }
        Ok(out)
    }

    /// Triangulation as vertex tuples; a 0-dimensional polytope yields the
    /// single point. Used by the facet recursion.
    fn triangulate_or_point(&self) -> Result<Vec<Vec<Point>>> {
        if self.dim == 0 {
            return Ok(vec![vec![Point(vec![])]]);
        }
        Ok(self
            .triangulate()?
            .into_iter()
            .map(|s| s.vertices)
            .collect())
    }

    /// Exact lattice-normalized volume.
    pub fn volume(&self) -> Result<Rat> {
        let mut acc = Rat::zero();
        for s in self.triangulate()? {
            acc += s.volume();
        }
        Ok(acc)
    }

    pub fn bounds(&self) -> Result<Vec<(Rat, Rat)>> {
        let vs = self.vertices()?;
        let mut out = Vec::new();
        for i in 0..self.dim {
            let mut lo = vs[0].0[i].clone();
            let mut hi = lo.clone();
            for v in &vs {
                if v.0[i] < lo {
                    lo = v.0[i].clone();
                }
                if v.0[i] > hi {
                    hi = v.0[i].clone();
                }
            }
            out.push((lo, hi));
        }
        Ok(out)
    }
}

/// Affine parametrization of a facet: `x_drop = linear . y + constant`,
/// other coordinates carried over in order.
#[derive(Clone, Debug)]
pub struct FacetEmbedding {
    pub ambient_dim: usize,
    pub drop: usize,
    pub linear: Vec<Rat>,
    pub constant: Rat,
    /// |u_drop| of the primitive integer normal; dividing a projected
    /// integral by this yields the lattice boundary measure.
    pub prim_drop_abs: BigInt,
    pub polytope: Option<Box<HPolytope>>,
}

impl Default for FacetEmbedding {
    fn default() -> Self {
        FacetEmbedding {
            ambient_dim: 0,
            drop: 0,
            linear: vec![],
            constant: Rat::zero(),
            prim_drop_abs: BigInt::one(),
            polytope: None,
        }
    }
}

impl FacetEmbedding {
    /// Lift facet coordinates `y` to ambient coordinates.
    pub fn lift(&self, y: &Point) -> Point {
        let mut x = Vec::with_capacity(self.ambient_dim);
        let mut yi = 0usize;
        let dropped = dot(&self.linear, y.coords()) + &self.constant;
        for j in 0..self.ambient_dim {
            if j == self.drop {
                x.push(dropped.clone());
            } else {
                x.push(y.0[yi].clone());
                yi += 1;
            }
        }
        Point(x)
    }

    /// Affine forms expressing ambient coordinates in facet coordinates,
    /// for pulling polynomials back onto the facet.
    pub fn coordinate_forms(&self) -> Vec<crate::poly::AffineForm> {
        let m = self.ambient_dim - 1;
        let mut forms = Vec::with_capacity(self.ambient_dim);
        let mut yi = 0usize;
        for j in 0..self.ambient_dim {
            if j == self.drop {
                forms.push(crate::poly::AffineForm::new(
                    self.linear.clone(),
                    self.constant.clone(),
                ));
            } else {
                let mut lin = vec![Rat::zero(); m];
                lin[yi] = Rat::one();
                forms.push(crate::poly::AffineForm::new(lin, Rat::zero()));
                yi += 1;
            }
        }
        forms
    }
}

/// All basic feasible solutions of the inequality system: intersect each
/// d-subset of hyperplanes and keep solutions satisfying everything.
fn enumerate_basic_feasible(dim: usize, ineqs: &[Ineq]) -> Vec<Point> {
    let m = ineqs.len();
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let mut idx: Vec<usize> = (0..dim).collect();
    if m < dim {
        return out;
    }
    loop {
        let a: Vec<Vec<Rat>> = idx.iter().map(|&i| ineqs[i].normal.clone()).collect();
        let b: Vec<Rat> = idx.iter().map(|&i| -ineqs[i].offset.clone()).collect();
        if let Some(x) = solve_linear(&a, &b) {
            if ineqs.iter().all(|iq| iq.satisfied(&x)) {
                out.push(Point(x));
            }
        }
        // Next combination in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - dim {
                idx[i] += 1;
                for j in i + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact feasibility of `normal . x + offset >= 0` systems by eliminating
/// variables one at a time.
fn fourier_motzkin_feasible(dim: usize, ineqs: &[Ineq]) -> bool {
    let mut rows: Vec<(Vec<Rat>, Rat)> = ineqs
        .iter()
        .map(|iq| (iq.normal.clone(), iq.offset.clone()))
        .collect();
    for var in (0..dim).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for (n, o) in rows {
            if n[var].is_positive() {
                pos.push((n, o));
            } else if n[var].is_negative() {
                neg.push((n, o));
            } else {
                rest.push((n, o));
            }
        }
        let mut next = rest;
        for (np, op) in &pos {
            for (nn, on) in &neg {
                // Combine to cancel the variable: p-row / p_coeff - n-row / n_coeff.
                let cp = &np[var];
                let cn = &nn[var];
                let mut n = Vec::with_capacity(var);
                for j in 0..var {
                    n.push(&np[j] / cp - &nn[j] / cn);
                }
                let o = op / cp - on / cn;
                next.push((n, o));
            }
        }
        // Truncate stored rows to the remaining variables and dedupe.
        let mut seen: Vec<(Vec<BigInt>, Rat)> = Vec::new();
        rows = Vec::new();
        for (n, o) in next {
            let n: Vec<Rat> = n.into_iter().take(var).collect();
            let iq = Ineq::new(n, o);
            let key = iq.canonical_key();
            if !seen.contains(&key) {
                seen.push(key);
                rows.push((iq.normal, iq.offset));
            }
        }
    }
    rows.iter().all(|(_, o)| !crate::rat::is_negative(o))
}

/// Exact coefficients expressing `v` in the span of `generators`, or `None`
/// if `v` is outside the span. Generators must be linearly independent.
pub fn cone_coefficients(v: &[Rat], generators: &[Direction]) -> Result<Option<Vec<Rat>>> {
    let m = generators.len();
    if m == 0 {
        return Ok(if v.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        });
    }
    let d = v.len();
    let gen_rows: Vec<Vec<Rat>> = generators.iter().map(|g| g.0.clone()).collect();
    if rank(&gen_rows) < m {
        return Err(Error::DependentGenerators);
    }
    // Solve the d x m system G^T c = v by elimination on [G^T | v].
    let mut aug: Vec<Vec<Rat>> = (0..d)
        .map(|row| {
            let mut r: Vec<Rat> = (0..m).map(|col| gen_rows[col][row].clone()).collect();
            r.push(v[row].clone());
            r
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut r = 0usize;
    for col in 0..m {
        let pivot = (r..d).find(|&i| !aug[i][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => continue,
        };
        aug.swap(pivot, r);
        let pv = aug[r][col].clone();
        for c in col..=m {
            aug[r][c] = &aug[r][c] / &pv;
        }
        for i in 0..d {
            if i != r && !aug[i][col].is_zero() {
                let factor = aug[i][col].clone();
                for c in col..=m {
                    let v2 = &aug[r][c] * &factor;
                    aug[i][c] -= v2;
                }
            }
        }
        pivot_rows.push((r, col));
        r += 1;
    }
    // Inconsistent rows mean v is outside the span.
    for i in r..d {
        if !aug[i][m].is_zero() {
            return Ok(None);
        }
    }
    let mut c = vec![Rat::zero(); m];
    for (row, col) in pivot_rows {
        c[col] = aug[row][m].clone();
    }
    Ok(Some(c))
}

/// Orthogonal projection onto `{v : sigma_j . v = 0 for all j}` with respect
/// to the coordinate dot product.
pub fn project_central(sigmas: &[Direction], v: &[Rat]) -> Result<Vec<Rat>> {
    if sigmas.is_empty() {
        return Ok(v.to_vec());
    }
    let m = sigmas.len();
    // Solve (S S^T) a = S v, then pr(v) = v - S^T a.
    let gram: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| dot(&sigmas[i].0, &sigmas[j].0))
                .collect::<Vec<_>>()
        })
        .collect();
    let rhs: Vec<Rat> = (0..m).map(|i| dot(&sigmas[i].0, v)).collect();
    let a = solve_linear(&gram, &rhs).ok_or(Error::DependentGenerators)?;
    let mut out = v.to_vec();
    for (i, s) in sigmas.iter().enumerate() {
        for (o, x) in out.iter_mut().zip(&s.0) {
            *o -= &a[i] * x;
        }
    }
    Ok(out)
}
