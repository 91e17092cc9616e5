//! Integration over rational polytopes.
//!
//! The exact path triangulates, pulls the integrand back to the standard
//! simplex and applies the monomial formula
//! `int_{simplex_d} x^a dx = (prod a_i!) / (|a| + d)!`, staying in rational
//! arithmetic throughout. Facet integrals are exposed only in the
//! lattice-normalized combination `d(sigma_0) / |u_primitive|`, computed by
//! dropping one coordinate, so no square roots ever appear.
//!
//! The numeric path is a fixed-order Grundmann-Moller simplex rule on a
//! refining triangulation, with the error estimated from two consecutive
//! refinement levels. It exists for weights that are not polynomial.

use num::{BigInt, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{HPolytope, Simplex};
use crate::poly::{AffineForm, Polynomial};
use crate::rat::{factorial, rat_to_f64, Rat};

/// `int_{standard d-simplex} u^alpha du` as an exact rational.
pub fn monomial_simplex_integral(alpha: &[u32]) -> Rat {
    let d = alpha.len();
    let mut num = BigInt::one();
    for &a in alpha {
        for i in 2..=(a as usize) {
            num *= BigInt::from(i);
        }
    }
    let total: usize = alpha.iter().map(|&a| a as usize).sum::<usize>() + d;
    Rat::from_integer(num) / factorial(total)
}

/// Exact integral of `p` over one simplex (lattice-normalized measure).
pub fn integrate_over_simplex(s: &Simplex, p: &Polynomial) -> Rat {
    let d = s.dim();
    if d == 0 {
        return p.eval(s.vertices[0].coords());
    }
    // x = v0 + sum_k (v_k - v0) u_k
    let v0 = s.vertices[0].coords();
    let forms: Vec<AffineForm> = (0..p.nvars())
        .map(|j| {
            let linear: Vec<Rat> = (1..=d).map(|k| &s.vertices[k].0[j] - &v0[j]).collect();
            AffineForm::new(linear, v0[j].clone())
        })
        .collect();
    let pulled = p.substitute_affine(&forms, d);
    let jac = s.volume() * factorial(d); // |det|
    let mut acc = Rat::zero();
    for (e, c) in pulled.terms() {
        acc += c * monomial_simplex_integral(e);
    }
    acc * jac
}

/// Exact integral of a polynomial over a bounded full-dimensional polytope,
/// with the Lebesgue measure normalized so the unit lattice cell has volume 1.
pub fn integrate_polynomial(p: &HPolytope, poly: &Polynomial) -> Result<Rat> {
    let simplices = p.triangulate()?;
    let parts: Vec<Rat> = simplices
        .par_iter()
        .map(|s| integrate_over_simplex(s, poly))
        .collect();
    // Deterministic summation order.
    Ok(parts.into_iter().sum())
}

/// `int_F p dsigma_0 / |u|` over the facet supported by inequality
/// `facet_index`, where `u` is the primitive integer normal. Computed by
/// coordinate projection: the norm cancels against the surface-measure
/// Jacobian, leaving division by one primitive entry.
pub fn facet_integral_lattice(p: &HPolytope, facet_index: usize, poly: &Polynomial) -> Result<Rat> {
    match facet_cell_integral(p, facet_index, poly)? {
        Some(v) => Ok(v),
        None => Err(Error::NotAFacet(facet_index)),
    }
}

/// Like `facet_integral_lattice`, but returns `None` when the inequality
/// does not support a (d-1)-dimensional face (used when summing over region
/// cells, where degenerate cells contribute nothing).
pub fn facet_cell_integral(
    p: &HPolytope,
    facet_index: usize,
    poly: &Polynomial,
) -> Result<Option<Rat>> {
    let d = p.dim;
    let emb = p.facet_embedding(facet_index)?;
    let fp = emb.polytope.as_ref().unwrap();
    let denom = Rat::from_integer(emb.prim_drop_abs.clone());
    if d == 1 {
        // The facet is a single point; the 0-dimensional integral is
        // evaluation there (primitive entries in Z^1 have |u| = 1).
        let iq = &p.ineqs[facet_index];
        if iq.normal[0].is_zero() {
            return Ok(None);
        }
        let x = -&iq.offset / &iq.normal[0];
        let pt = [x];
        if !p.contains(&pt) {
            return Ok(None);
        }
        return Ok(Some(poly.eval(&pt) / denom));
    }
    if !fp.is_feasible() {
        return Ok(None);
    }
    let vs = match fp.vertices() {
        Ok(v) => v,
        Err(Error::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    if crate::geom::affine_rank(&vs) < d - 1 {
        return Ok(None);
    }
    let pulled = poly.substitute_affine(&emb.coordinate_forms(), d - 1);
    let val = integrate_polynomial(fp, &pulled)?;
    Ok(Some(val / denom))
}

// ---------------------------------------------------------------------------
// Numeric quadrature.
// ---------------------------------------------------------------------------

/// Grundmann-Moller rule of degree 2s+1 on the standard d-simplex
/// (weights sum to the simplex volume 1/d!).
pub fn grundmann_moller(d: usize, s: usize) -> Vec<(Vec<f64>, f64)> {
    let mut rule = Vec::new();
    let degree = 2 * s + 1;
    for i in 0..=s {
        let denom_k = d + 2 * (s - i) + 1; // degree + d - 2i
        // weight = (-1)^i 2^{-2s} (degree+d-2i)^degree / (i! (degree+d-i)!)
        let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
        w *= 2f64.powi(-2 * (s as i32));
        w *= (denom_k as f64).powi(degree as i32);
        let mut fact = 1.0;
        for j in 2..=i {
            fact *= j as f64;
        }
        w /= fact;
        let mut fact2 = 1.0;
        for j in 2..=(degree + d - i) {
            fact2 *= j as f64;
        }
        w /= fact2;
        // Points (2b+1)/(d+2s+1-2i) for b in N_0^{d+1}, |b| = s - i; only the
        // first d coordinates enter.
        let target = s - i;
        let mut beta = vec![0usize; d + 1];
        enumerate_compositions(&mut beta, 0, target, &mut |b| {
            let pt: Vec<f64> = (0..d)
                .map(|j| (2 * b[j] + 1) as f64 / denom_k as f64)
                .collect();
            rule.push((pt, w));
        });
    }
    rule
}

fn enumerate_compositions(
    beta: &mut Vec<usize>,
    pos: usize,
    remaining: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if pos == beta.len() - 1 {
        beta[pos] = remaining;
        f(beta);
        return;
    }
    for v in 0..=remaining {
        beta[pos] = v;
        enumerate_compositions(beta, pos + 1, remaining - v, f);
    }
}

#[derive(Clone)]
struct F64Simplex {
    vertices: Vec<Vec<f64>>,
}

impl F64Simplex {
    fn volume(&self) -> f64 {
        let d = self.vertices.len() - 1;
        if d == 0 {
            return 1.0;
        }
        let mut m: Vec<Vec<f64>> = (1..=d)
            .map(|i| {
                (0..d)
                    .map(|j| self.vertices[i][j] - self.vertices[0][j])
                    .collect()
            })
            .collect();
        // LU determinant.
        let mut det = 1.0;
        for c in 0..d {
            let mut piv = c;
            for r in c + 1..d {
                if m[r][c].abs() > m[piv][c].abs() {
                    piv = r;
                }
            }
            if m[piv][c] == 0.0 {
                return 0.0;
            }
            if piv != c {
                m.swap(piv, c);
                det = -det;
            }
            det *= m[c][c];
            for r in c + 1..d {
                let f = m[r][c] / m[c][c];
                for k in c..d {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        let mut fact = 1.0;
        for i in 2..=d {
            fact *= i as f64;
        }
        det.abs() / fact
    }

    fn apply_rule(&self, rule: &[(Vec<f64>, f64)], h: &dyn Fn(&[f64]) -> f64) -> f64 {
        let d = self.vertices.len() - 1;
        let mut fact = 1.0;
        for i in 2..=d {
            fact *= i as f64;
        }
        let scale = self.volume() * fact; // |det|
        let mut acc = 0.0;
        let mut x = vec![0.0; self.vertices[0].len()];
        for (u, w) in rule {
            for (j, xj) in x.iter_mut().enumerate() {
                let mut v = self.vertices[0][j];
                for (k, uk) in u.iter().enumerate() {
                    v += (self.vertices[k + 1][j] - self.vertices[0][j]) * uk;
                }
                *xj = v;
            }
            acc += w * h(&x);
        }
        acc * scale
    }

    /// Bisect across the longest edge.
    fn bisect(&self) -> (F64Simplex, F64Simplex) {
        let n = self.vertices.len();
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let len: f64 = self.vertices[i]
                    .iter()
                    .zip(&self.vertices[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if len > best {
                    best = len;
                    bi = i;
                    bj = j;
                }
            }
        }
        let mid: Vec<f64> = self.vertices[bi]
            .iter()
            .zip(&self.vertices[bj])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mut left = self.clone();
        left.vertices[bi] = mid.clone();
        let mut right = self.clone();
        right.vertices[bj] = mid;
        (left, right)
    }
}

/// Adaptive numeric integration of a continuous function over a polytope.
/// Returns the value and an error estimate taken from the difference of two
/// consecutive refinement levels.
pub fn integrate_numeric(
    p: &HPolytope,
    h: &dyn Fn(&[f64]) -> f64,
    tol: f64,
    max_levels: usize,
) -> Result<(f64, f64)> {
    let base = p.triangulate()?;
    let d = p.dim;
    let rule = grundmann_moller(d, 3);
    let mut simplices: Vec<F64Simplex> = base
        .iter()
        .map(|s| F64Simplex {
            vertices: s.vertices.iter().map(|v| v.to_f64()).collect(),
        })
        .collect();
    let mut prev: f64 = simplices.iter().map(|s| s.apply_rule(&rule, h)).sum();
    for _level in 0..max_levels {
        let mut next_simplices = Vec::with_capacity(simplices.len() * 2);
        for s in &simplices {
            let (a, b) = s.bisect();
            next_simplices.push(a);
            next_simplices.push(b);
        }
        let next: f64 = next_simplices.iter().map(|s| s.apply_rule(&rule, h)).sum();
        let err = (next - prev).abs();
        if err <= tol {
            return Ok((next, err));
        }
        simplices = next_simplices;
        prev = next;
    }
    Err(Error::NoConvergence(max_levels))
}

/// Rasterized midpoint quadrature over the bounding box: an intentionally
/// different code path used to cross-check the adaptive rule.
pub fn integrate_grid(
    p: &HPolytope,
    h: &(dyn Fn(&[f64]) -> f64 + Sync),
    cells_per_axis: usize,
) -> Result<f64> {
    let bounds = p.bounds()?;
    let d = p.dim;
    let lo: Vec<f64> = bounds.iter().map(|(a, _)| rat_to_f64(a)).collect();
    let hi: Vec<f64> = bounds.iter().map(|(_, b)| rat_to_f64(b)).collect();
    let step: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) / cells_per_axis as f64)
        .collect();
    let cell_vol: f64 = step.iter().product();
    let normals: Vec<Vec<f64>> = p
        .ineqs
        .iter()
        .map(|iq| iq.normal.iter().map(rat_to_f64).collect())
        .collect();
    let offsets: Vec<f64> = p.ineqs.iter().map(|iq| rat_to_f64(&iq.offset)).collect();
    let inside = |x: &[f64]| -> bool {
        normals.iter().zip(&offsets).all(|(n, o)| {
            n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + o >= 0.0
        })
    };
    let total_cells: usize = cells_per_axis.pow(d as u32);
    let acc: f64 = (0..total_cells)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut x = vec![0.0; d];
            for j in 0..d {
                let k = idx % cells_per_axis;
                idx /= cells_per_axis;
                x[j] = lo[j] + (k as f64 + 0.5) * step[j];
            }
            if inside(&x) {
                h(&x)
            } else {
                0.0
            }
        })
        .sum();
    Ok(acc * cell_vol)
}

/// Seeded Monte-Carlo integration over the bounding box with a standard-error
/// estimate. Used as an independent oracle in verification suites.
pub fn integrate_monte_carlo(
    p: &HPolytope,
    h: &dyn Fn(&[f64]) -> f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let bounds = p.bounds()?;
    let d = p.dim;
    let lo: Vec<f64> = bounds.iter().map(|(a, _)| rat_to_f64(a)).collect();
    let hi: Vec<f64> = bounds.iter().map(|(_, b)| rat_to_f64(b)).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let normals: Vec<Vec<f64>> = p
        .ineqs
        .iter()
        .map(|iq| iq.normal.iter().map(rat_to_f64).collect())
        .collect();
    let offsets: Vec<f64> = p.ineqs.iter().map(|iq| rat_to_f64(&iq.offset)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut x = vec![0.0; d];
    for _ in 0..samples {
        for j in 0..d {
            x[j] = rng.gen_range(lo[j]..hi[j]);
        }
        let inside = normals.iter().zip(&offsets).all(|(n, o)| {
            n.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + o >= 0.0
        });
        let v = if inside { h(&x) } else { 0.0 };
        sum += v;
        sumsq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    Ok((mean * box_vol, box_vol * (var / n).sqrt()))
}
