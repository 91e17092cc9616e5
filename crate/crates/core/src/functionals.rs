//! The weighted non-Archimedean functionals and the modified Futaki
//! invariant of a test configuration.
//!
//! Everything is a polytope integral. With `ghat` the pulled-back weight,
//! `pi` the weight density, `I_g = int ghat pi`, `I = int pi`, and the
//! region decomposition `Omega_a` (gradient `Lambda_a`, multiplicity `m_a`):
//!
//!   E   = sum_a int_{Omega_a} f ghat pi / I_g
//!   J   = max f - E
//!   L   = f(kappa_P),  D = L - E
//!   M   = -sum_a int_{Omega_a} Lambda_a . (x - kappa_P) ghat pi / I_g
//!   M_b = -(bdry - int (kappa.grad f) ghat pi - n int f ghat pi
//!           - int f <x, grad ghat> pi) / I_g
//!   Fut = (I_g M + sum_a (1 - 1/m_a) int_{Omega_a} ghat pi) / I
//!
//! where `bdry` integrates `f ghat pi` over the boundary against the
//! weighted measure. `M = M_b` is an exact integration-by-parts identity
//! and `Fut_closed`, the alternative boundary-form normalization of the
//! Futaki invariant, satisfies `Fut_closed = (Vg / 2) Fut` identically.
//! Polynomial weights run fully in rational arithmetic; exp-affine weights
//! run through adaptive quadrature and report floats.

use num::{BigInt, One, Signed, Zero};
use serde_json::Value as Json;

use crate::datum::SphericalDatum;
use crate::error::{Error, Result};
use crate::geom::{dot, HPolytope, Point};
use crate::jsonio::{f64_json, rat_json};
use crate::poly::{AffineForm, Polynomial};
use crate::quad::{facet_cell_integral, integrate_numeric, integrate_polynomial};
use crate::rat::{factorial, format_rat, rat_to_f64, Rat};
use crate::tc::{regions, RegionDecomposition, TestConfig};
use crate::weight::{pullback, PulledBackWeight, WeightFunction};

/// An exact rational or a float from the numeric path.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rat),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rat_to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Exact(r) => rat_json(r),
            Value::Approx(x) => f64_json(*x),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => format!("{} ({:.6})", format_rat(r), rat_to_f64(r)),
            Value::Approx(x) => format!("{x:.12}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FunctionalReport {
    pub v: Value,
    pub vg: Value,
    pub e: Value,
    pub j: Value,
    pub d: Value,
    pub l: Value,
    pub m: Value,
    pub m_boundary: Value,
    pub fut: Value,
    pub fut_closed: Value,
    pub barycenter: Vec<Value>,
    pub reduced_central_fibre: bool,
    pub multiplicities: Vec<BigInt>,
    /// Numeric-path error estimate (0 on the exact path).
    pub quadrature_error: f64,
}

impl FunctionalReport {
    pub fn fields(&self) -> Vec<(&'static str, &Value)> {
        vec![
            ("V", &self.v),
            ("Vg", &self.vg),
            ("E", &self.e),
            ("J", &self.j),
            ("D", &self.d),
            ("L", &self.l),
            ("M", &self.m),
            ("M_boundary", &self.m_boundary),
            ("Fut", &self.fut),
            ("Fut_closed", &self.fut_closed),
        ]
    }

    pub fn to_json(&self) -> Json {
        let mut m = serde_json::Map::new();
        for (k, v) in self.fields() {
            m.insert(k.to_string(), v.to_json());
        }
        m.insert(
            "barycenter".into(),
            Json::Array(self.barycenter.iter().map(|b| b.to_json()).collect()),
        );
        m.insert(
            "reduced_central_fibre".into(),
            Json::Bool(self.reduced_central_fibre),
        );
        m.insert(
            "multiplicities".into(),
            Json::Array(
                self.multiplicities
                    .iter()
                    .map(|x| Json::String(x.to_string()))
                    .collect(),
            ),
        );
        Json::Object(m)
    }

    pub fn csv_header() -> String {
        let mut cols = vec![
            "V",
            "Vg",
            "E",
            "J",
            "D",
            "L",
            "M",
            "M_boundary",
            "Fut",
            "Fut_closed",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        cols.push("reduced_central_fibre".into());
        cols.push("barycenter".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols: Vec<String> = self
            .fields()
            .iter()
            .map(|(_, v)| format!("{:.12}", v.to_f64()))
            .collect();
        cols.push(format!("{}", self.reduced_central_fibre));
        cols.push(
            self.barycenter
                .iter()
                .map(|b| format!("{:.12}", b.to_f64()))
                .collect::<Vec<_>>()
                .join(";"),
        );
        cols.join(",")
    }
}

/// Linear polynomial `lambda . x + c` in the polytope coordinates.
fn affine_poly(d: usize, lambda: &[Rat], c: &Rat) -> Polynomial {
    AffineForm::new(lambda.to_vec(), c.clone()).to_poly(d)
}

struct ExactParts {
    i_pi: Rat,
    i_gpi: Rat,
    int_f_gpi: Rat,
    m_sum: Rat,
    boundary: Rat,
    kappa_grad: Rat,
    euler_term: Rat,
    corr: Rat,
}

fn exact_parts(
    datum: &SphericalDatum,
    dec: &RegionDecomposition,
    ghat: &Polynomial,
    euler: &Polynomial,
) -> Result<ExactParts> {
    let poly = datum.polytope();
    let pi = datum.pi_polynomial();
    let gpi = ghat.mul(&pi);
    let d = datum.r0;
    let kappa = datum.kappa_p.coords();

    let i_pi = integrate_polynomial(&poly, &pi)?;
    let i_gpi = integrate_polynomial(&poly, &gpi)?;

    let mut int_f_gpi = Rat::zero();
    let mut m_sum = Rat::zero();
    let mut boundary = Rat::zero();
    let mut kappa_grad = Rat::zero();
    let mut euler_term = Rat::zero();
    let mut corr = Rat::zero();

    let n_facets = poly.ineqs.len();
    for region in &dec.regions {
        let f_poly = affine_poly(d, region.lambda.coords(), &region.c);
        let f_gpi = f_poly.mul(&gpi);
        int_f_gpi += integrate_polynomial(&region.polytope, &f_gpi)?;

        // Lambda_a . (x - kappa).
        let shift = -dot(region.lambda.coords(), kappa);
        let lam_aff = affine_poly(d, region.lambda.coords(), &shift);
        m_sum += integrate_polynomial(&region.polytope, &lam_aff.mul(&gpi))?;

        let g_here = integrate_polynomial(&region.polytope, &gpi)?;
        kappa_grad += dot(kappa, region.lambda.coords()) * &g_here;

        if !euler.is_zero() {
            euler_term +=
                integrate_polynomial(&region.polytope, &f_poly.mul(&euler.mul(&pi)))?;
        }

        let m = Rat::from_integer(region.multiplicity.clone());
        corr += (Rat::one() - Rat::one() / m) * &g_here;

        // Boundary cells: the part of each original facet inside this region,
        // where f is the single affine function of the region.
        for i in 0..n_facets {
            let w = datum.dsigma_weight(i);
            if w.is_zero() {
                continue;
            }
            if let Some(cell) = facet_cell_integral(&region.polytope, i, &f_gpi)? {
                boundary += w * cell;
            }
        }
    }

    Ok(ExactParts {
        i_pi,
        i_gpi,
        int_f_gpi,
        m_sum,
        boundary,
        kappa_grad,
        euler_term,
        corr,
    })
}

fn evaluate_exact(
    datum: &SphericalDatum,
    tc: &TestConfig,
    ghat: &Polynomial,
    euler: &Polynomial,
) -> Result<FunctionalReport> {
    let dec = regions(datum, tc);
    let parts = exact_parts(datum, &dec, ghat, euler)?;
    let n = datum.n;
    let nf = factorial(n);
    let i = parts.i_pi;
    let i_g = parts.i_gpi;
    if i_g.is_zero() {
        return Err(Error::Invalid(
            "weighted volume vanishes; weight is not positive on the polytope".into(),
        ));
    }

    let poly = datum.polytope();
    let maxf = tc.max_over(&poly)?;
    let e = &parts.int_f_gpi / &i_g;
    let j = &maxf - &e;
    let l = tc.eval(datum.kappa_p.coords());
    let dd = &l - &e;
    let m = -&parts.m_sum / &i_g;
    let m_b = -(&parts.boundary
        - &parts.kappa_grad
        - Rat::from_integer(BigInt::from(n)) * &parts.int_f_gpi
        - &parts.euler_term)
        / &i_g;
    let fut = (&i_g * &m + &parts.corr) / &i;
    let bracket = -&parts.boundary
        + Rat::from_integer(BigInt::from(n)) * &parts.int_f_gpi
        + &parts.kappa_grad
        + &parts.euler_term
        + &parts.corr;
    let fut_closed = (&i_g / (Rat::from_integer(BigInt::from(2)) * &i)) * &nf * bracket;

    // Barycenter of ghat pi.
    let gpi = ghat.mul(&datum.pi_polynomial());
    let mut bary = Vec::new();
    for k in 0..datum.r0 {
        let xk = Polynomial::var(datum.r0, k);
        let num = integrate_polynomial(&poly, &xk.mul(&gpi))?;
        bary.push(Value::Exact(num / &i_g));
    }

    Ok(FunctionalReport {
        v: Value::Exact(&nf * &i),
        vg: Value::Exact(&nf * &i_g),
        e: Value::Exact(e),
        j: Value::Exact(j),
        d: Value::Exact(dd),
        l: Value::Exact(l),
        m: Value::Exact(m),
        m_boundary: Value::Exact(m_b),
        fut: Value::Exact(fut),
        fut_closed: Value::Exact(fut_closed),
        barycenter: bary,
        reduced_central_fibre: dec.reduced_central_fibre(),
        multiplicities: dec.regions.iter().map(|r| r.multiplicity.clone()).collect(),
        quadrature_error: 0.0,
    })
}

const NUMERIC_TOL: f64 = 1e-12;
const NUMERIC_LEVELS: usize = 26;

fn numeric_region_integral(
    poly: &HPolytope,
    h: &dyn Fn(&[f64]) -> f64,
) -> Result<(f64, f64)> {
    match poly.vertices() {
        Ok(vs) => {
            if crate::geom::affine_rank(&vs) < poly.dim {
                return Ok((0.0, 0.0));
            }
        }
        Err(Error::Infeasible) => return Ok((0.0, 0.0)),
        Err(e) => return Err(e),
    }
    integrate_numeric(poly, h, NUMERIC_TOL, NUMERIC_LEVELS)
}

/// Numeric boundary cell integral against the lattice measure: integrate the
/// embedded integrand over the (d-1)-dimensional cell and divide by the
/// dropped primitive-normal entry.
fn numeric_facet_cell(
    poly: &HPolytope,
    index: usize,
    h: &dyn Fn(&[f64]) -> f64,
) -> Result<Option<(f64, f64)>> {
    let d = poly.dim;
    let emb = poly.facet_embedding(index)?;
    let denom = rat_to_f64(&Rat::from_integer(emb.prim_drop_abs.clone()));
    if d == 1 {
        let iq = &poly.ineqs[index];
        if iq.normal[0].is_zero() {
            return Ok(None);
        }
        let x = -&iq.offset / &iq.normal[0];
        if !poly.contains(std::slice::from_ref(&x)) {
            return Ok(None);
        }
        let xf = rat_to_f64(&x);
        return Ok(Some((h(&[xf]) / denom, 0.0)));
    }
    let fp = emb.polytope.as_ref().unwrap();
    match fp.vertices() {
        Ok(vs) => {
            if crate::geom::affine_rank(&vs) < d - 1 {
                return Ok(None);
            }
        }
        Err(Error::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    }
    let lin: Vec<f64> = emb.linear.iter().map(rat_to_f64).collect();
    let cons = rat_to_f64(&emb.constant);
    let drop = emb.drop;
    let lifted = move |y: &[f64]| -> f64 {
        let mut x = Vec::with_capacity(d);
        let mut yi = 0usize;
        for jj in 0..d {
            if jj == drop {
                let v: f64 = lin.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + cons;
                x.push(v);
            } else {
                x.push(y[yi]);
                yi += 1;
            }
        }
        h(&x)
    };
    let (v, e) = integrate_numeric(fp, &lifted, NUMERIC_TOL, NUMERIC_LEVELS)?;
    Ok(Some((v / denom, e / denom)))
}

fn evaluate_numeric(
    datum: &SphericalDatum,
    tc: &TestConfig,
    pb: &PulledBackWeight,
) -> Result<FunctionalReport> {
    let dec = regions(datum, tc);
    let poly = datum.polytope();
    let pi = datum.pi_polynomial();
    let n = datum.n;
    let nf = rat_to_f64(&factorial(n));
    let kappa: Vec<f64> = datum.kappa_p.to_f64();

    let gpi = |x: &[f64]| pb.eval_f64(x) * pi.eval_f64(x);
    let mut err_acc = 0.0f64;

    let (i_pi, e0) = numeric_region_integral(&poly, &|x| pi.eval_f64(x))?;
    err_acc += e0;
    let (i_gpi, e1) = numeric_region_integral(&poly, &gpi)?;
    err_acc += e1;
    if i_gpi <= 0.0 {
        return Err(Error::Invalid(
            "weighted volume is not positive on the numeric path".into(),
        ));
    }

    let mut int_f_gpi = 0.0;
    let mut m_sum = 0.0;
    let mut boundary = 0.0;
    let mut kappa_grad = 0.0;
    let mut euler_term = 0.0;
    let mut corr = 0.0;

    for region in &dec.regions {
        let lam: Vec<f64> = region.lambda.coords().iter().map(rat_to_f64).collect();
        let c = rat_to_f64(&region.c);
        let f_here = move |x: &[f64]| c + lam.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let (v, e) = numeric_region_integral(&region.polytope, &|x| f_here(x) * gpi(x))?;
        int_f_gpi += v;
        err_acc += e;

        let lam2: Vec<f64> = region.lambda.coords().iter().map(rat_to_f64).collect();
        let shift: f64 = -lam2.iter().zip(&kappa).map(|(a, b)| a * b).sum::<f64>();
        let (v, e) = numeric_region_integral(&region.polytope, &|x| {
            (shift + lam2.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()) * gpi(x)
        })?;
        m_sum += v;
        err_acc += e;

        let (g_here, e) = numeric_region_integral(&region.polytope, &gpi)?;
        err_acc += e;
        kappa_grad += -shift * g_here;

        let (v, e) = numeric_region_integral(&region.polytope, &|x| {
            f_here(x) * pb.euler_eval_f64(x) * pi.eval_f64(x)
        })?;
        euler_term += v;
        err_acc += e;

        let m = rat_to_f64(&Rat::from_integer(region.multiplicity.clone()));
        corr += (1.0 - 1.0 / m) * g_here;

        for i in 0..poly.ineqs.len() {
            let w = rat_to_f64(&datum.dsigma_weight(i));
            if w == 0.0 {
                continue;
            }
            if let Some((v, e)) =
                numeric_facet_cell(&region.polytope, i, &|x| f_here(x) * gpi(x))?
            {
                boundary += w * v;
                err_acc += w.abs() * e;
            }
        }
    }

    let vs = poly.vertices()?;
    let maxf = vs
        .iter()
        .map(|v| rat_to_f64(&tc.eval(v.coords())))
        .fold(f64::NEG_INFINITY, f64::max);
    let e = int_f_gpi / i_gpi;
    let j = maxf - e;
    let l = rat_to_f64(&tc.eval(datum.kappa_p.coords()));
    let dd = l - e;
    let m = -m_sum / i_gpi;
    let m_b = -(boundary - kappa_grad - n as f64 * int_f_gpi - euler_term) / i_gpi;
    let fut = (i_gpi * m + corr) / i_pi;
    let bracket = -boundary + n as f64 * int_f_gpi + kappa_grad + euler_term + corr;
    let fut_closed = i_gpi / (2.0 * i_pi) * nf * bracket;

    let mut bary = Vec::new();
    for k in 0..datum.r0 {
        let (num, e2) = numeric_region_integral(&poly, &|x| x[k] * gpi(x))?;
        err_acc += e2;
        bary.push(Value::Approx(num / i_gpi));
    }

    Ok(FunctionalReport {
        v: Value::Approx(nf * i_pi),
        vg: Value::Approx(nf * i_gpi),
        e: Value::Approx(e),
        j: Value::Approx(j),
        d: Value::Approx(dd),
        l: Value::Approx(l),
        m: Value::Approx(m),
        m_boundary: Value::Approx(m_b),
        fut: Value::Approx(fut),
        fut_closed: Value::Approx(fut_closed),
        barycenter: bary,
        reduced_central_fibre: dec.reduced_central_fibre(),
        multiplicities: dec.regions.iter().map(|r| r.multiplicity.clone()).collect(),
        quadrature_error: err_acc,
    })
}

/// Full functional report of a test configuration.
pub fn evaluate(
    datum: &SphericalDatum,
    tc: &TestConfig,
    weight: &WeightFunction,
) -> Result<FunctionalReport> {
    let pb = pullback(weight, datum)?;
    match &pb {
        PulledBackWeight::Exact { g, euler, .. } => evaluate_exact(datum, tc, g, euler),
        PulledBackWeight::Numeric { .. } => evaluate_numeric(datum, tc, &pb),
    }
}

/// Weighted barycenter, exact for polynomial weights.
pub fn barycenter(datum: &SphericalDatum, weight: &WeightFunction) -> Result<Vec<Value>> {
    match weight {
        WeightFunction::Polynomial(_) => Ok(barycenter_exact(datum, weight)?
            .into_iter()
            .map(Value::Exact)
            .collect()),
        WeightFunction::ExpAffine { .. } => {
            let (b, _) = barycenter_numeric(datum, weight)?;
            Ok(b.into_iter().map(Value::Approx).collect())
        }
    }
}

pub fn barycenter_exact(datum: &SphericalDatum, weight: &WeightFunction) -> Result<Vec<Rat>> {
    let pb = pullback(weight, datum)?;
    let ghat = pb.exact_g().ok_or(Error::NonPolynomial)?;
    let poly = datum.polytope();
    let gpi = ghat.mul(&datum.pi_polynomial());
    let i_g = integrate_polynomial(&poly, &gpi)?;
    if i_g.is_zero() {
        return Err(Error::Invalid("weighted volume vanishes".into()));
    }
    let mut out = Vec::new();
    for k in 0..datum.r0 {
        let xk = Polynomial::var(datum.r0, k);
        out.push(integrate_polynomial(&poly, &xk.mul(&gpi))? / &i_g);
    }
    Ok(out)
}

/// Numeric barycenter with an error estimate (largest componentwise bound).
pub fn barycenter_numeric(
    datum: &SphericalDatum,
    weight: &WeightFunction,
) -> Result<(Vec<f64>, f64)> {
    let pb = pullback(weight, datum)?;
    let poly = datum.polytope();
    let pi = datum.pi_polynomial();
    let gpi = |x: &[f64]| pb.eval_f64(x) * pi.eval_f64(x);
    let (i_g, e0) = integrate_numeric(&poly, &gpi, NUMERIC_TOL, NUMERIC_LEVELS)?;
    if i_g <= 0.0 {
        return Err(Error::Invalid("weighted volume is not positive".into()));
    }
    let mut out = Vec::new();
    let mut err = e0 / i_g;
    for k in 0..datum.r0 {
        let (num, e) = integrate_numeric(&poly, &|x| x[k] * gpi(x), NUMERIC_TOL, NUMERIC_LEVELS)?;
        out.push(num / i_g);
        err = err.max((e + e0 * (num / i_g).abs()) / i_g);
    }
    Ok((out, err))
}

/// Recompute the report with character `chi + shift` and weight
/// `g(. - shift)`; returns the largest absolute deviation across all report
/// fields (exactly zero when the substitution plumbing is correct).
pub fn lifting_invariance_check(
    datum: &SphericalDatum,
    tc: &TestConfig,
    weight: &WeightFunction,
    chi_shift: &[Rat],
) -> Result<Rat> {
    let base = evaluate(datum, tc, weight)?;
    let shifted_datum = datum.with_chi_shift(chi_shift)?;
    let shifted_weight = weight.shifted(chi_shift)?;
    let other = evaluate(&shifted_datum, tc, &shifted_weight)?;
    let mut max_dev = Rat::zero();
    for ((_, a), (_, b)) in base.fields().iter().zip(other.fields().iter()) {
        let (a, b) = match (a.exact(), b.exact()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::NonPolynomial),
        };
        let dev = (a - b).abs();
        if dev > max_dev {
            max_dev = dev;
        }
    }
    for (a, b) in base.barycenter.iter().zip(other.barycenter.iter()) {
        let (a, b) = match (a.exact(), b.exact()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::NonPolynomial),
        };
        let dev = (a - b).abs();
        if dev > max_dev {
            max_dev = dev;
        }
    }
    Ok(max_dev)
}

/// Convenience: the affine test configuration of a witness direction has
/// `D = -v . (b_g - kappa_P)` whatever constant makes it nonnegative.
pub fn ding_of_direction(
    datum: &SphericalDatum,
    weight: &WeightFunction,
    v: &crate::geom::Direction,
) -> Result<Rat> {
    let b = barycenter_exact(datum, weight)?;
    let diff = crate::geom::sub(&b, datum.kappa_p.coords());
    Ok(-dot(v.coords(), &diff))
}

#[allow(unused)]
fn point_of(v: Vec<Rat>) -> Point {
    Point(v)
}
