//! Weight functions on the torus moment polytope and their pullback to the
//! moment polytope coordinates.
//!
//! A weight g lives in the torus variables theta_1..theta_r. Every
//! functional consumes only the pullback g(theta(x)) with
//! theta_A(x) = xi_A . x + chi_A, so changing the lifting character is an
//! affine substitution and nothing else.

use num::{Signed, Zero};
use serde_json::Value;

use crate::datum::SphericalDatum;
use crate::error::{Error, Result};
use crate::geom::dot;
use crate::jsonio as js;
use crate::poly::{AffineForm, Polynomial};
use crate::rat::{rat_i, rat_to_f64, Rat};

#[derive(Clone, Debug)]
pub enum WeightFunction {
    /// Exact path: a polynomial in the torus variables.
    Polynomial(Polynomial),
    /// Numeric path: exp(constant + sum_A coeffs[A] * theta_A).
    ExpAffine { coeffs: Vec<f64>, constant: f64 },
}

impl WeightFunction {
    pub fn one(rank: usize) -> Self {
        WeightFunction::Polynomial(Polynomial::one(rank))
    }

    pub fn rank(&self) -> usize {
        match self {
            WeightFunction::Polynomial(p) => p.nvars(),
            WeightFunction::ExpAffine { coeffs, .. } => coeffs.len(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, WeightFunction::Polynomial(_))
    }

    /// Weight reinterpreted at the given torus rank. Only constants conform
    /// across ranks; anything else must match exactly.
    pub fn conform(&self, rank: usize) -> Result<WeightFunction> {
        if self.rank() == rank {
            return Ok(self.clone());
        }
        match self {
            WeightFunction::Polynomial(p) if p.total_degree() == 0 => {
                let c = p.eval(&vec![Rat::zero(); p.nvars()]);
                Ok(WeightFunction::Polynomial(Polynomial::constant(rank, c)))
            }
            WeightFunction::ExpAffine { coeffs, constant }
                if coeffs.iter().all(|c| *c == 0.0) =>
            {
                Ok(WeightFunction::ExpAffine {
                    coeffs: vec![0.0; rank],
                    constant: *constant,
                })
            }
            _ => Err(Error::RankMismatch {
                weight: self.rank(),
                datum: rank,
            }),
        }
    }

    /// g(theta - shift) for polynomial weights.
    pub fn shifted(&self, shift: &[Rat]) -> Result<WeightFunction> {
        match self {
            WeightFunction::Polynomial(p) => {
                let r = p.nvars();
                if shift.len() != r {
                    return Err(Error::RankMismatch {
                        weight: shift.len(),
                        datum: r,
                    });
                }
                let forms: Vec<AffineForm> = (0..r)
                    .map(|i| {
                        let mut lin = vec![Rat::zero(); r];
                        lin[i] = rat_i(1);
                        AffineForm::new(lin, -shift[i].clone())
                    })
                    .collect();
                Ok(WeightFunction::Polynomial(p.substitute_affine(&forms, r)))
            }
            WeightFunction::ExpAffine { .. } => Err(Error::NonPolynomial),
        }
    }
}

/// A weight pulled back to the moment polytope coordinates, bundled with the
/// Euler pairing `<x, grad g-hat>` needed by boundary forms.
#[derive(Clone, Debug)]
pub enum PulledBackWeight {
    Exact {
        /// g(theta(x)) as a polynomial in x.
        g: Polynomial,
        /// sum_A (xi_A . x) (dg/dtheta_A)(theta(x)).
        euler: Polynomial,
        chi: Vec<Rat>,
    },
    Numeric {
        coeffs: Vec<f64>,
        constant: f64,
        xi: Vec<Vec<f64>>,
        chi: Vec<f64>,
    },
}

impl PulledBackWeight {
    pub fn is_exact(&self) -> bool {
        matches!(self, PulledBackWeight::Exact { .. })
    }

    pub fn exact_g(&self) -> Option<&Polynomial> {
        match self {
            PulledBackWeight::Exact { g, .. } => Some(g),
            _ => None,
        }
    }

    pub fn exact_euler(&self) -> Option<&Polynomial> {
        match self {
            PulledBackWeight::Exact { euler, .. } => Some(euler),
            _ => None,
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            PulledBackWeight::Exact { g, .. } => g.eval_f64(x),
            PulledBackWeight::Numeric {
                coeffs,
                constant,
                xi,
                chi,
            } => {
                let mut e = *constant;
                for (a, c) in coeffs.iter().enumerate() {
                    let theta: f64 =
                        xi[a].iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + chi[a];
                    e += c * theta;
                }
                e.exp()
            }
        }
    }

    /// `<x, grad g-hat>` as a numeric evaluator.
    pub fn euler_eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            PulledBackWeight::Exact { euler, .. } => euler.eval_f64(x),
            PulledBackWeight::Numeric { coeffs, xi, .. } => {
                let g = self.eval_f64(x);
                let mut s = 0.0;
                for (a, c) in coeffs.iter().enumerate() {
                    let xl: f64 = xi[a].iter().zip(x).map(|(u, v)| u * v).sum();
                    s += c * xl;
                }
                s * g
            }
        }
    }
}

/// Pull a weight back through theta_A(x) = xi_A . x + chi_A.
pub fn pullback(g: &WeightFunction, datum: &SphericalDatum) -> Result<PulledBackWeight> {
    let g = &g.conform(datum.torus_rank())?;
    match g {
        WeightFunction::Polynomial(p) => {
            let forms = datum.theta_forms();
            let ghat = p.substitute_affine(&forms, datum.r0);
            let euler = euler_pairing(g, datum)?;
            Ok(PulledBackWeight::Exact {
                g: ghat,
                euler,
                chi: datum.chi.clone(),
            })
        }
        WeightFunction::ExpAffine { coeffs, constant } => Ok(PulledBackWeight::Numeric {
            coeffs: coeffs.clone(),
            constant: *constant,
            xi: datum
                .torus
                .iter()
                .map(|d| d.coords().iter().map(rat_to_f64).collect())
                .collect(),
            chi: datum.chi.iter().map(rat_to_f64).collect(),
        }),
    }
}

/// The exact polynomial `sum_A (xi_A . x) (dg/dtheta_A)(theta(x))`, which is
/// the chain-rule expansion of `<x, grad(g o theta)>`.
pub fn euler_pairing(g: &WeightFunction, datum: &SphericalDatum) -> Result<Polynomial> {
    let g = g.conform(datum.torus_rank())?;
    let p = match &g {
        WeightFunction::Polynomial(p) => p,
        WeightFunction::ExpAffine { .. } => return Err(Error::NonPolynomial),
    };
    let forms = datum.theta_forms();
    let mut out = Polynomial::zero(datum.r0);
    for (a, xi) in datum.torus.iter().enumerate() {
        let partial = p.derivative(a);
        if partial.is_zero() {
            continue;
        }
        let pulled = partial.substitute_affine(&forms, datum.r0);
        let linear = AffineForm::new(xi.0.clone(), Rat::zero()).to_poly(datum.r0);
        out = out.add(&pulled.mul(&linear));
    }
    Ok(out)
}

/// Sampled positivity audit: evaluate the pullback at every vertex and on a
/// rational interior grid; returns a witness where the weight is <= 0, if
/// any. This is a heuristic check, not a certificate.
pub fn positivity_witness(
    g: &WeightFunction,
    datum: &SphericalDatum,
) -> Result<Option<(Vec<Rat>, String)>> {
    let pb = pullback(g, datum)?;
    let poly = datum.polytope();
    let vertices = poly.vertices()?;
    let kappa = datum.kappa_p.coords().to_vec();
    let mut samples: Vec<Vec<Rat>> = Vec::new();
    samples.extend(vertices.iter().map(|v| v.0.clone()));
    samples.push(kappa.clone());
    // Interior grid: points kappa + t (v - kappa) for t in {1/4, 1/2, 3/4}.
    for v in &vertices {
        for t in [crate::rat::rat(1, 4), crate::rat::rat(1, 2), crate::rat::rat(3, 4)] {
            let pt: Vec<Rat> = kappa
                .iter()
                .zip(v.coords())
                .map(|(k, x)| k + &t * (x - k))
                .collect();
            samples.push(pt);
        }
    }
    match &pb {
        PulledBackWeight::Exact { g, .. } => {
            for s in &samples {
                let val = g.eval(s);
                if !val.is_positive() {
                    return Ok(Some((s.clone(), crate::rat::format_rat(&val))));
                }
            }
        }
        PulledBackWeight::Numeric { .. } => {
            for s in &samples {
                let x: Vec<f64> = s.iter().map(rat_to_f64).collect();
                let val = pb.eval_f64(&x);
                if val <= 0.0 {
                    return Ok(Some((s.clone(), format!("{val}"))));
                }
            }
        }
    }
    Ok(None)
}

/// Parse a weight document:
/// `{"type":"polynomial","terms":[{"coef":rat,"powers":[int]}]}` or
/// `{"type":"exp_affine","coeffs":[float],"constant":float}`.
pub fn load_weight(doc: &Value) -> Result<WeightFunction> {
    let root = js::obj(doc, "$")?;
    let ty = js::string(js::field(root, "$", "type")?, "$.type")?;
    match ty {
        "polynomial" => {
            let terms_v = js::arr(js::field(root, "$", "terms")?, "$.terms")?;
            let mut rank: Option<usize> = None;
            let mut terms = Vec::new();
            for (i, tv) in terms_v.iter().enumerate() {
                let path = format!("$.terms[{i}]");
                let to = js::obj(tv, &path)?;
                let coef = js::rational(js::field(to, &path, "coef")?, &format!("{path}.coef"))?;
                let powers_v =
                    js::arr(js::field(to, &path, "powers")?, &format!("{path}.powers"))?;
                let mut powers = Vec::new();
                for (j, pv) in powers_v.iter().enumerate() {
                    powers.push(
                        js::usize_field(pv, &format!("{path}.powers[{j}]"))? as u32,
                    );
                }
                match rank {
                    None => rank = Some(powers.len()),
                    Some(r) if r != powers.len() => {
                        return Err(Error::parse(
                            format!("{path}.powers"),
                            "inconsistent variable count across terms",
                        ))
                    }
                    _ => {}
                }
                terms.push((coef, powers));
            }
            let rank = rank.unwrap_or(0);
            Ok(WeightFunction::Polynomial(Polynomial::from_terms(
                rank, terms,
            )))
        }
        "exp_affine" => {
            let coeffs_v = js::arr(js::field(root, "$", "coeffs")?, "$.coeffs")?;
            let mut coeffs = Vec::new();
            for (i, cv) in coeffs_v.iter().enumerate() {
                coeffs.push(js::f64_field(cv, &format!("$.coeffs[{i}]"))?);
            }
            let constant = js::f64_field(js::field(root, "$", "constant")?, "$.constant")?;
            Ok(WeightFunction::ExpAffine { coeffs, constant })
        }
        other => Err(Error::parse("$.type", format!("unknown weight type `{other}`"))),
    }
}

pub fn load_weight_str(s: &str) -> Result<WeightFunction> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    load_weight(&v)
}

/// Weighted volume integrand `g-hat * pi` on the exact path.
pub fn weighted_density(pb: &PulledBackWeight, datum: &SphericalDatum) -> Option<Polynomial> {
    pb.exact_g().map(|g| g.mul(&datum.pi_polynomial()))
}

#[allow(unused)]
fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[allow(unused)]
fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    dot(a, b)
}
