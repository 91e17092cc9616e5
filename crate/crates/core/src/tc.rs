//! Equivariant normal test configurations.
//!
//! A test configuration is a rational concave piecewise-linear function
//! `f(x) = min_a (C_a + Lambda_a . x)` on the moment polytope, nonnegative
//! there, with every gradient in the valuation cone and no redundant piece.
//! The region decomposition, central-fibre multiplicities, normalization and
//! twisting all live here.

use num::{BigInt, One, Signed, Zero};
use serde_json::Value;

use crate::datum::SphericalDatum;
use crate::error::{Error, Result};
use crate::geom::{dot, Direction, HPolytope, Ineq};
use crate::jsonio as js;
use crate::rat::{denominator_lcm, format_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub c: Rat,
    pub lambda: Direction,
}

impl Piece {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        &self.c + dot(self.lambda.coords(), x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestConfig {
    pub pieces: Vec<Piece>,
}

impl TestConfig {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .min()
            .expect("test configuration has at least one piece")
    }

    /// Index of the active piece at `x` (lowest index on ties).
    pub fn active_piece(&self, x: &[Rat]) -> usize {
        let mut best = 0usize;
        let mut best_val = self.pieces[0].eval(x);
        for (i, p) in self.pieces.iter().enumerate().skip(1) {
            let v = p.eval(x);
            if v < best_val {
                best_val = v;
                best = i;
            }
        }
        best
    }

    /// Maximum over the polytope; attained at a vertex since f is concave.
    pub fn max_over(&self, poly: &HPolytope) -> Result<Rat> {
        let vs = poly.vertices()?;
        Ok(vs
            .iter()
            .map(|v| self.eval(v.coords()))
            .max()
            .expect("polytope has vertices"))
    }

    /// All gradients integral (reduced central fibre).
    pub fn is_integral(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.lambda.0.iter().all(|x| x.is_integer()) && p.c.is_integer())
    }

    /// f + c.
    pub fn shift(&self, c: &Rat) -> TestConfig {
        TestConfig {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    c: &p.c + c,
                    lambda: p.lambda.clone(),
                })
                .collect(),
        }
    }

    /// t * f for t > 0 (same region structure).
    pub fn scale(&self, t: &Rat) -> TestConfig {
        TestConfig {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    c: &p.c * t,
                    lambda: Direction(crate::geom::scale_vec(p.lambda.coords(), t)),
                })
                .collect(),
        }
    }
}

/// One region of the decomposition: the locus where a piece attains the
/// minimum, with its multiplicity.
#[derive(Clone, Debug)]
pub struct Region {
    pub polytope: HPolytope,
    pub c: Rat,
    pub lambda: Direction,
    /// Least positive integer with m * Lambda integral.
    pub multiplicity: BigInt,
}

#[derive(Clone, Debug)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
}

impl RegionDecomposition {
    pub fn reduced_central_fibre(&self) -> bool {
        self.regions.iter().all(|r| r.multiplicity == BigInt::one())
    }
}

/// The polytope where piece `a` attains the minimum, inside `base`.
fn region_polytope(base: &HPolytope, pieces: &[Piece], a: usize) -> HPolytope {
    let mut extra = Vec::new();
    for (b, pb) in pieces.iter().enumerate() {
        if b == a {
            continue;
        }
        // l_a <= l_b  <=>  (Lambda_b - Lambda_a) . x + (C_b - C_a) >= 0.
        let n = crate::geom::sub(pb.lambda.coords(), pieces[a].lambda.coords());
        let o = &pb.c - &pieces[a].c;
        extra.push(Ineq::new(n, o));
    }
    base.intersect(&extra)
}

fn region_is_full_dimensional(base: &HPolytope, pieces: &[Piece], a: usize) -> Result<bool> {
    let r = region_polytope(base, pieces, a);
    match r.vertices() {
        Ok(vs) => Ok(crate::geom::affine_rank(&vs) == base.dim),
        Err(Error::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Validate raw pieces against a datum: nonnegative on the polytope,
/// gradients in the valuation cone, and minimal (no redundant piece).
pub fn validate_tc(datum: &SphericalDatum, pieces: Vec<Piece>) -> Result<TestConfig> {
    if pieces.is_empty() {
        return Err(Error::Invalid("test configuration needs a piece".into()));
    }
    for (i, p) in pieces.iter().enumerate() {
        if p.lambda.dim() != datum.r0 {
            return Err(Error::DimensionMismatch(format!(
                "piece {i} gradient has {} coordinates, rank is {}",
                p.lambda.dim(),
                datum.r0
            )));
        }
    }

    // Exact duplicates are redundant by definition.
    for i in 0..pieces.len() {
        for j in 0..i {
            if pieces[i] == pieces[j] {
                return Err(Error::RedundantPiece(i));
            }
        }
    }

    // Gradients in the valuation cone: sigma_j . Lambda_a <= 0.
    for (a, p) in pieces.iter().enumerate() {
        for (j, sigma) in datum.spherical_roots.iter().enumerate() {
            if dot(sigma.coords(), p.lambda.coords()).is_positive() {
                return Err(Error::GradientOutsideValuationCone { piece: a, root: j });
            }
        }
    }

    let tc = TestConfig {
        pieces: pieces.clone(),
    };
    let poly = datum.polytope();

    // Nonnegative at all vertices (sufficient by concavity).
    for v in poly.vertices()? {
        if tc.eval(v.coords()).is_negative() {
            return Err(Error::NegativeSomewhere(format!(
                "({})",
                v.coords().iter().map(format_rat).collect::<Vec<_>>().join(", ")
            )));
        }
    }

    // Irredundancy: every piece attains the minimum on a full-dimensional set.
    for a in 0..pieces.len() {
        if !region_is_full_dimensional(&poly, &pieces, a)? {
            return Err(Error::RedundantPiece(a));
        }
    }

    Ok(tc)
}

/// Region decomposition with multiplicities.
pub fn regions(datum: &SphericalDatum, tc: &TestConfig) -> RegionDecomposition {
    let poly = datum.polytope();
    let regions = tc
        .pieces
        .iter()
        .enumerate()
        .map(|(a, p)| Region {
            polytope: region_polytope(&poly, &tc.pieces, a),
            c: p.c.clone(),
            lambda: p.lambda.clone(),
            multiplicity: denominator_lcm(p.lambda.coords()),
        })
        .collect();
    RegionDecomposition { regions }
}

/// Normalize: subtract the central component of the gradient at kappa_P
/// (as the affine function `pr_z(Lambda*) . (x - kappa_P)`) and then the
/// maximum, so that `pr_z(grad f(kappa_P)) = 0` and `max f = 0`.
/// On a kink the active piece of lowest index supplies the gradient.
pub fn normalize(datum: &SphericalDatum, tc: &TestConfig) -> Result<TestConfig> {
    let active = tc.active_piece(datum.kappa_p.coords());
    let lz = crate::geom::project_central(
        &datum.spherical_roots,
        tc.pieces[active].lambda.coords(),
    )?;
    let shift_const = dot(&lz, datum.kappa_p.coords());
    let twisted = TestConfig {
        pieces: tc
            .pieces
            .iter()
            .map(|p| Piece {
                c: &p.c + &shift_const,
                lambda: Direction(crate::geom::sub(p.lambda.coords(), &lz)),
            })
            .collect(),
    };
    let m = twisted.max_over(&datum.polytope())?;
    Ok(twisted.shift(&(-m)))
}

/// Twist by a central direction: pieces become (C_a, Lambda_a - Lambda).
pub fn twist(datum: &SphericalDatum, tc: &TestConfig, lambda: &Direction) -> Result<TestConfig> {
    for (j, sigma) in datum.spherical_roots.iter().enumerate() {
        if !dot(sigma.coords(), lambda.coords()).is_zero() {
            return Err(Error::NotCentral(j));
        }
    }
    Ok(TestConfig {
        pieces: tc
            .pieces
            .iter()
            .map(|p| Piece {
                c: p.c.clone(),
                lambda: Direction(crate::geom::sub(p.lambda.coords(), lambda.coords())),
            })
            .collect(),
    })
}

/// Parse `{"pieces":[{"c":rat,"lambda":[rat]}]}` without validation.
pub fn load_pieces(doc: &Value) -> Result<Vec<Piece>> {
    let root = js::obj(doc, "$")?;
    let arr = js::arr(js::field(root, "$", "pieces")?, "$.pieces")?;
    let mut pieces = Vec::new();
    for (i, pv) in arr.iter().enumerate() {
        let path = format!("$.pieces[{i}]");
        let po = js::obj(pv, &path)?;
        let c = js::rational(js::field(po, &path, "c")?, &format!("{path}.c"))?;
        let lambda =
            js::rational_vec(js::field(po, &path, "lambda")?, &format!("{path}.lambda"))?;
        pieces.push(Piece {
            c,
            lambda: Direction(lambda),
        });
    }
    Ok(pieces)
}

pub fn load_tc_str(datum: &SphericalDatum, s: &str) -> Result<TestConfig> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    validate_tc(datum, load_pieces(&v)?)
}

/// The affine test configuration `x -> v . x - min_P (v . x)` built from a
/// direction in the valuation cone (nonnegative by construction).
pub fn affine_from_direction(datum: &SphericalDatum, v: &Direction) -> Result<TestConfig> {
    let poly = datum.polytope();
    let min = poly
        .vertices()?
        .iter()
        .map(|p| dot(v.coords(), p.coords()))
        .min()
        .expect("polytope has vertices");
    validate_tc(
        datum,
        vec![Piece {
            c: -min,
            lambda: v.clone(),
        }],
    )
}
