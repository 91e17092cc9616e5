//! The combinatorial model of a Q-Fano spherical variety.
//!
//! A datum bundles the moment polytope (facet normals with boundary
//! coefficients), the root functionals entering the weight density, the
//! distinguished weight `kappa_P`, the spherical roots cutting out the
//! valuation cone, and the central torus directions with their lifting
//! character. Inputs are accepted as given and validated linear-algebraically;
//! no group theory is re-derived here.

use num::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::{dot, Direction, HPolytope, Ineq, Point};
use crate::jsonio as js;
use crate::poly::{AffineForm, Polynomial};
use crate::quad::integrate_polynomial;
use crate::rat::{factorial, format_rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetKind {
    GDivisor,
    Colour,
}

/// One facet of the moment polytope: inequality
/// `normal . x >= kappa_P . normal - n_D`.
#[derive(Clone, Debug)]
pub struct FacetData {
    pub normal: Direction,
    pub n_d: Rat,
    pub kind: FacetKind,
}

/// An affine root functional `linear . x + constant` with its pairing
/// against the half-sum of positive roots.
#[derive(Clone, Debug)]
pub struct RootFunctional {
    pub linear: Direction,
    pub constant: Rat,
    pub rho_pairing: Rat,
}

#[derive(Clone, Debug)]
pub struct SphericalDatum {
    pub name: String,
    /// Dimension of the variety.
    pub n: usize,
    /// Rank: the ambient dimension of the moment polytope coordinates.
    pub r0: usize,
    pub facets: Vec<FacetData>,
    pub roots: Vec<RootFunctional>,
    pub kappa_p: Point,
    pub spherical_roots: Vec<Direction>,
    /// Generators of the central torus acting through the moment polytope.
    pub torus: Vec<Direction>,
    /// Lifting character; `chi_canonical` records whether it was expanded
    /// from the marker `"canonical"` (chi_A = -xi_A . kappa_P).
    pub chi: Vec<Rat>,
    pub chi_canonical: bool,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

impl SphericalDatum {
    /// The moment polytope in H-representation. Inequality order matches the
    /// facet list, so facet indices line up.
    pub fn polytope(&self) -> HPolytope {
        let ineqs = self
            .facets
            .iter()
            .map(|f| {
                let offset = &f.n_d - dot(f.normal.coords(), self.kappa_p.coords());
                Ineq::new(f.normal.0.clone(), offset)
            })
            .collect();
        HPolytope::raw(self.r0, ineqs)
    }

    /// Per-facet coefficient of the weighted boundary measure relative to the
    /// lattice facet integral `dsigma_0 / |u_primitive|`:
    /// `t * (n_D - kappa_P . w)` where `u = t * w` is primitive.
    pub fn dsigma_weight(&self, facet_index: usize) -> Rat {
        let f = &self.facets[facet_index];
        let (_prim, t) = crate::rat::primitive_vector(f.normal.coords());
        let raw = &f.n_d - dot(f.normal.coords(), self.kappa_p.coords());
        t * raw
    }

    /// The Duistermaat-Heckman weight density
    /// `pi(x) = prod_roots (linear . x + constant) / rho_pairing`.
    pub fn pi_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::one(self.r0);
        for root in &self.roots {
            let form = AffineForm::new(root.linear.0.clone(), root.constant.clone());
            p = p.mul(&form.to_poly(self.r0).scale(&(Rat::one() / &root.rho_pairing)));
        }
        p
    }

    /// Anticanonical degree `n! * int pi`.
    pub fn degree(&self) -> Result<Rat> {
        let p = self.polytope();
        Ok(factorial(self.n) * integrate_polynomial(&p, &self.pi_polynomial())?)
    }

    pub fn torus_rank(&self) -> usize {
        self.torus.len()
    }

    /// The affine forms `theta_A(x) = xi_A . x + chi_A` realizing the torus
    /// moment coordinates on the polytope.
    pub fn theta_forms(&self) -> Vec<AffineForm> {
        self.torus
            .iter()
            .zip(&self.chi)
            .map(|(xi, c)| AffineForm::new(xi.0.clone(), c.clone()))
            .collect()
    }

    /// Datum with a shifted lifting character (for invariance checks).
    pub fn with_chi_shift(&self, shift: &[Rat]) -> Result<SphericalDatum> {
        if shift.len() != self.torus_rank() {
            return Err(Error::RankMismatch {
                weight: shift.len(),
                datum: self.torus_rank(),
            });
        }
        let mut out = self.clone();
        out.chi = out
            .chi
            .iter()
            .zip(shift)
            .map(|(a, b)| a + b)
            .collect();
        out.chi_canonical = false;
        Ok(out)
    }

    /// Datum with every rho-pairing multiplied by `s > 0` (rescales pi).
    pub fn with_rho_scaled(&self, s: &Rat) -> SphericalDatum {
        let mut out = self.clone();
        for r in &mut out.roots {
            r.rho_pairing = &r.rho_pairing * s;
        }
        out
    }

    /// Run every structural invariant; failures become report entries with a
    /// witness, never errors.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();

        // Dimension bookkeeping: n = r0 + number of roots.
        let dim_ok = self.n == self.r0 + self.roots.len();
        rep.push(
            "dimension",
            dim_ok,
            if dim_ok {
                format!("n = rank + #roots = {} + {}", self.r0, self.roots.len())
            } else {
                format!(
                    "n != rank + #roots: {} != {} + {}",
                    self.n,
                    self.r0,
                    self.roots.len()
                )
            },
        );

        let poly = self.polytope();
        let vertices = match poly.vertices() {
            Ok(vs) => {
                let full = crate::geom::affine_rank(&vs) == self.r0;
                rep.push(
                    "polytope",
                    full,
                    if full {
                        format!("bounded and full-dimensional with {} vertices", vs.len())
                    } else {
                        "polytope is not full-dimensional".into()
                    },
                );
                vs
            }
            Err(e) => {
                rep.push("polytope", false, format!("{e}"));
                return rep;
            }
        };

        // No duplicate facet inequalities.
        let deduped = HPolytope::new(self.r0, poly.ineqs.clone());
        rep.push(
            "facets-distinct",
            deduped.ineqs.len() == poly.ineqs.len(),
            format!(
                "{} facet inequalities, {} distinct",
                poly.ineqs.len(),
                deduped.ineqs.len()
            ),
        );

        // kappa_P interior.
        let interior = poly.strictly_inside(self.kappa_p.coords());
        rep.push(
            "kappa-interior",
            interior,
            if interior {
                "kappa_P lies in the interior".into()
            } else {
                "kappa_P is not an interior point".into()
            },
        );

        // Spherical roots linearly independent.
        let rows: Vec<Vec<Rat>> = self.spherical_roots.iter().map(|s| s.0.clone()).collect();
        let li = crate::geom::rank(&rows) == self.spherical_roots.len();
        rep.push(
            "spherical-roots-independent",
            li,
            format!("{} spherical roots", self.spherical_roots.len()),
        );

        // Central torus: sigma_j . xi_A = 0.
        let mut central_ok = true;
        let mut central_detail = String::from("all torus generators central");
        'outer: for (a, xi) in self.torus.iter().enumerate() {
            for (j, sigma) in self.spherical_roots.iter().enumerate() {
                if !dot(sigma.coords(), xi.coords()).is_zero() {
                    central_ok = false;
                    central_detail = format!("sigma[{j}] . xi[{a}] != 0");
                    break 'outer;
                }
            }
        }
        rep.push("torus-central", central_ok, central_detail);

        // chi length.
        let chi_ok = self.chi.len() == self.torus.len();
        rep.push(
            "chi-rank",
            chi_ok,
            format!("chi has {} entries for {} generators", self.chi.len(), self.torus.len()),
        );

        // Root functionals: rho_pairing > 0, nonnegative at vertices,
        // positive at an interior point (kappa_P).
        for (i, root) in self.roots.iter().enumerate() {
            let rho_ok = root.rho_pairing.is_positive();
            rep.push(
                &format!("root[{i}]-rho-positive"),
                rho_ok,
                format_rat(&root.rho_pairing),
            );
            let mut nonneg = true;
            let mut witness = String::new();
            for v in &vertices {
                let val = dot(root.linear.coords(), v.coords()) + &root.constant;
                if val.is_negative() {
                    nonneg = false;
                    witness = format!(
                        "negative at vertex ({})",
                        v.coords().iter().map(format_rat).collect::<Vec<_>>().join(", ")
                    );
                    break;
                }
            }
            rep.push(
                &format!("root[{i}]-nonnegative"),
                nonneg,
                if nonneg { "nonnegative at all vertices".into() } else { witness },
            );
            let at_kappa =
                dot(root.linear.coords(), self.kappa_p.coords()) + &root.constant;
            rep.push(
                &format!("root[{i}]-interior-positive"),
                at_kappa.is_positive(),
                format!("value at kappa_P = {}", format_rat(&at_kappa)),
            );
        }

        // Q-reflexivity cross-check: each listed inequality supports a facet,
        // on which w . x is constant, equal to kappa . w - n_D. Constancy is
        // automatic for a supporting hyperplane, so the content is that the
        // face has dimension r0 - 1.
        for (i, f) in self.facets.iter().enumerate() {
            let offset = &f.n_d - dot(f.normal.coords(), self.kappa_p.coords());
            let on_facet: Vec<Point> = vertices
                .iter()
                .filter(|v| (dot(f.normal.coords(), v.coords()) + &offset).is_zero())
                .cloned()
                .collect();
            let is_facet = crate::geom::affine_rank(&on_facet) == self.r0.saturating_sub(1)
                && !on_facet.is_empty();
            rep.push(
                &format!("facet[{i}]-reflexive"),
                is_facet,
                if is_facet {
                    format!(
                        "supports a facet; w.x = {} there",
                        format_rat(&(-offset.clone()))
                    )
                } else {
                    "inequality does not support a facet".into()
                },
            );
        }

        rep
    }
}

/// Parse a datum document (see the JSON schema in the README).
pub fn load_datum(doc: &Value) -> Result<SphericalDatum> {
    let root = js::obj(doc, "$")?;
    let name = match root.get("name") {
        Some(v) => js::string(v, "$.name")?.to_string(),
        None => String::from("unnamed"),
    };
    let n = js::usize_field(js::field(root, "$", "dimension")?, "$.dimension")?;
    let r0 = js::usize_field(js::field(root, "$", "rank")?, "$.rank")?;

    let polytope = js::obj(js::field(root, "$", "polytope")?, "$.polytope")?;
    let facets_v = js::arr(js::field(polytope, "$.polytope", "facets")?, "$.polytope.facets")?;
    let mut facets = Vec::new();
    for (i, fv) in facets_v.iter().enumerate() {
        let path = format!("$.polytope.facets[{i}]");
        let fo = js::obj(fv, &path)?;
        let normal = js::rational_vec(js::field(fo, &path, "normal")?, &format!("{path}.normal"))?;
        if normal.len() != r0 {
            return Err(Error::DimensionMismatch(format!(
                "facet {i} normal has {} coordinates, rank is {r0}",
                normal.len()
            )));
        }
        let n_d = js::rational(js::field(fo, &path, "n_D")?, &format!("{path}.n_D"))?;
        let kind = match js::string(js::field(fo, &path, "kind")?, &format!("{path}.kind"))? {
            "g-divisor" => FacetKind::GDivisor,
            "colour" | "color" => FacetKind::Colour,
            other => {
                return Err(Error::parse(
                    format!("{path}.kind"),
                    format!("unknown facet kind `{other}`"),
                ))
            }
        };
        facets.push(FacetData {
            normal: Direction(normal),
            n_d,
            kind,
        });
    }

    let mut roots = Vec::new();
    if let Some(rv) = root.get("roots") {
        for (i, r) in js::arr(rv, "$.roots")?.iter().enumerate() {
            let path = format!("$.roots[{i}]");
            let ro = js::obj(r, &path)?;
            let linear =
                js::rational_vec(js::field(ro, &path, "linear")?, &format!("{path}.linear"))?;
            if linear.len() != r0 {
                return Err(Error::DimensionMismatch(format!(
                    "root {i} has {} coordinates, rank is {r0}",
                    linear.len()
                )));
            }
            let constant =
                js::rational(js::field(ro, &path, "constant")?, &format!("{path}.constant"))?;
            let rho_pairing = js::rational(
                js::field(ro, &path, "rho_pairing")?,
                &format!("{path}.rho_pairing"),
            )?;
            roots.push(RootFunctional {
                linear: Direction(linear),
                constant,
                rho_pairing,
            });
        }
    }

    if n != r0 + roots.len() {
        return Err(Error::DimensionMismatch(format!(
            "n != rank + #roots: {n} != {r0} + {}",
            roots.len()
        )));
    }

    let kappa_p = js::rational_vec(js::field(root, "$", "kappa_p")?, "$.kappa_p")?;
    if kappa_p.len() != r0 {
        return Err(Error::DimensionMismatch(format!(
            "kappa_p has {} coordinates, rank is {r0}",
            kappa_p.len()
        )));
    }

    let mut spherical_roots = Vec::new();
    if let Some(sv) = root.get("spherical_roots") {
        for (i, s) in js::arr(sv, "$.spherical_roots")?.iter().enumerate() {
            let v = js::rational_vec(s, &format!("$.spherical_roots[{i}]"))?;
            if v.len() != r0 {
                return Err(Error::DimensionMismatch(format!(
                    "spherical root {i} has {} coordinates, rank is {r0}",
                    v.len()
                )));
            }
            spherical_roots.push(Direction(v));
        }
    }

    let mut torus = Vec::new();
    let mut chi = Vec::new();
    let mut chi_canonical = true;
    if let Some(tv) = root.get("torus") {
        let to = js::obj(tv, "$.torus")?;
        for (i, x) in js::arr(js::field(to, "$.torus", "xi")?, "$.torus.xi")?
            .iter()
            .enumerate()
        {
            let v = js::rational_vec(x, &format!("$.torus.xi[{i}]"))?;
            if v.len() != r0 {
                return Err(Error::DimensionMismatch(format!(
                    "torus generator {i} has {} coordinates, rank is {r0}",
                    v.len()
                )));
            }
            torus.push(Direction(v));
        }
        let chi_v = js::field(to, "$.torus", "chi")?;
        match chi_v {
            Value::String(s) if s == "canonical" => {
                chi = torus
                    .iter()
                    .map(|xi| -dot(xi.coords(), &kappa_p))
                    .collect();
            }
            other => {
                chi = js::rational_vec(other, "$.torus.chi")?;
                chi_canonical = false;
                if chi.len() != torus.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "chi has {} entries for {} torus generators",
                        chi.len(),
                        torus.len()
                    )));
                }
            }
        }
    }

    Ok(SphericalDatum {
        name,
        n,
        r0,
        facets,
        roots,
        kappa_p: Point(kappa_p),
        spherical_roots,
        torus,
        chi,
        chi_canonical,
    })
}

pub fn load_datum_str(s: &str) -> Result<SphericalDatum> {
    let v: Value =
        serde_json::from_str(s).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    load_datum(&v)
}

/// Build the datum of a toric Fano variety from its anticanonical polytope
/// `{w . x >= -n_D}` with 0 in the interior: no roots, no colours, the full
/// lattice torus acting, canonical character.
pub fn toric_datum(polytope: &HPolytope) -> Result<SphericalDatum> {
    let d = polytope.dim;
    let mut facets = Vec::new();
    for (i, iq) in polytope.ineqs.iter().enumerate() {
        // n_D is the offset with kappa_P = 0; positive exactly when 0 is
        // strictly inside.
        if !iq.offset.is_positive() {
            return Err(Error::NotReflexive(format!(
                "facet {i} has offset {} <= 0 (origin not interior)",
                format_rat(&iq.offset)
            )));
        }
        facets.push(FacetData {
            normal: Direction(iq.normal.clone()),
            n_d: iq.offset.clone(),
            kind: FacetKind::GDivisor,
        });
    }
    // Reject unbounded or degenerate input.
    let vs = polytope.vertices()?;
    if crate::geom::affine_rank(&vs) != d {
        return Err(Error::DegeneratePolytope);
    }
    let torus: Vec<Direction> = (0..d)
        .map(|i| {
            let mut v = vec![Rat::zero(); d];
            v[i] = Rat::one();
            Direction(v)
        })
        .collect();
    Ok(SphericalDatum {
        name: "toric".into(),
        n: d,
        r0: d,
        facets,
        roots: vec![],
        kappa_p: Point(vec![Rat::zero(); d]),
        spherical_roots: vec![],
        torus,
        chi: vec![Rat::zero(); d],
        chi_canonical: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    pub(crate) const P1_JSON: &str = r#"{
        "name": "p1", "dimension": 1, "rank": 1,
        "polytope": {"facets": [
            {"normal": [1], "n_D": 1, "kind": "g-divisor"},
            {"normal": [-1], "n_D": 1, "kind": "g-divisor"}
        ]},
        "roots": [],
        "kappa_p": [0],
        "spherical_roots": [],
        "torus": {"xi": [[1]], "chi": "canonical"}
    }"#;

    pub(crate) const SL2_JSON: &str = r#"{
        "name": "sl2", "dimension": 2, "rank": 1,
        "polytope": {"facets": [
            {"normal": [1], "n_D": 1, "kind": "g-divisor"},
            {"normal": [-1], "n_D": 1, "kind": "g-divisor"}
        ]},
        "roots": [{"linear": [1], "constant": 0, "rho_pairing": 1}],
        "kappa_p": [1],
        "spherical_roots": [[2]],
        "torus": {"xi": [], "chi": []}
    }"#;

    #[test]
    fn p1_loads_and_validates() {
        let d = load_datum_str(P1_JSON).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.chi, vec![rat_i(0)]);
        let rep = d.validate();
        assert!(rep.all_passed(), "{:?}", rep.checks);
        // Polytope is [-1, 1].
        let vs = d.polytope().vertices().unwrap();
        assert_eq!(vs[0].0, vec![rat_i(-1)]);
        assert_eq!(vs[1].0, vec![rat_i(1)]);
        assert_eq!(d.degree().unwrap(), rat_i(2));
        assert!(d.pi_polynomial() == Polynomial::one(1));
    }

    #[test]
    fn sl2_loads_and_validates() {
        let d = load_datum_str(SL2_JSON).unwrap();
        let rep = d.validate();
        assert!(rep.all_passed(), "{:?}", rep.checks);
        // Delta_+ = [0, 2]: facet x >= 1*1 - 1 = 0 and -x >= -1 - 1 = -2.
        let vs = d.polytope().vertices().unwrap();
        assert_eq!(vs[0].0, vec![rat_i(0)]);
        assert_eq!(vs[1].0, vec![rat_i(2)]);
        // pi = x, degree = 2! * int_0^2 x = 4.
        assert_eq!(d.pi_polynomial(), Polynomial::var(1, 0));
        assert_eq!(d.degree().unwrap(), rat_i(4));
    }

    #[test]
    fn rank_mismatch_rejected() {
        let bad = r#"{
            "name": "bad", "dimension": 3, "rank": 1,
            "polytope": {"facets": [
                {"normal": [1], "n_D": 1, "kind": "g-divisor"},
                {"normal": [-1], "n_D": 1, "kind": "g-divisor"}
            ]},
            "roots": [{"linear": [1], "constant": 0, "rho_pairing": 1}],
            "kappa_p": [0], "spherical_roots": [], "torus": {"xi": [], "chi": []}
        }"#;
        assert!(matches!(
            load_datum_str(bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn parse_errors_carry_field_paths() {
        let bad = r#"{
            "name": "x", "dimension": 1, "rank": 1,
            "polytope": {"facets": [
                {"normal": ["1/0"], "n_D": 1, "kind": "g-divisor"}
            ]},
            "roots": [], "kappa_p": [0],
            "spherical_roots": [], "torus": {"xi": [], "chi": []}
        }"#;
        match load_datum_str(bad) {
            Err(Error::Parse { path, .. }) => {
                assert_eq!(path, "$.polytope.facets[0].normal[0]");
            }
            other => panic!("expected a parse error with path, got {other:?}"),
        }
    }

    #[test]
    fn central_check_fails_for_noncentral_torus() {
        let doc = r#"{
            "name": "x", "dimension": 1, "rank": 1,
            "polytope": {"facets": [
                {"normal": [1], "n_D": 1, "kind": "g-divisor"},
                {"normal": [-1], "n_D": 1, "kind": "g-divisor"}
            ]},
            "roots": [],
            "kappa_p": [0],
            "spherical_roots": [[1]],
            "torus": {"xi": [[1]], "chi": "canonical"}
        }"#;
        let d = load_datum_str(doc).unwrap();
        let rep = d.validate();
        assert!(!rep.all_passed());
        let failed: Vec<_> = rep.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.iter().any(|c| c.name == "torus-central"));
    }

    #[test]
    fn pi_with_constants() {
        // roots x and (x+1)/2 -> pi = x(x+1)/2.
        let doc = r#"{
            "name": "x", "dimension": 3, "rank": 1,
            "polytope": {"facets": [
                {"normal": [1], "n_D": 1, "kind": "g-divisor"},
                {"normal": [-1], "n_D": 1, "kind": "colour"}
            ]},
            "roots": [
                {"linear": [1], "constant": 0, "rho_pairing": 1},
                {"linear": [1], "constant": 1, "rho_pairing": 2}
            ],
            "kappa_p": ["1/2"], "spherical_roots": [], "torus": {"xi": [], "chi": []}
        }"#;
        let d = load_datum_str(doc).unwrap();
        let x = Polynomial::var(1, 0);
        let expect = x.mul(&x.add(&Polynomial::one(1))).scale(&rat(1, 2));
        assert_eq!(d.pi_polynomial(), expect);
    }

    #[test]
    fn toric_construction() {
        let p = HPolytope::interval(rat_i(-1), rat_i(1));
        let d = toric_datum(&p).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.degree().unwrap(), rat_i(2));
        assert!(d.validate().all_passed());

        // [0,2]^2 does not contain the origin in its interior.
        let q = HPolytope::bounding_box(&[(rat_i(0), rat_i(2)), (rat_i(0), rat_i(2))]);
        assert!(matches!(toric_datum(&q), Err(Error::NotReflexive(_))));
    }

    #[test]
    fn blp2_degree() {
        let p = HPolytope::new(
            2,
            vec![
                Ineq::new(vec![rat_i(1), rat_i(0)], rat_i(1)),
                Ineq::new(vec![rat_i(0), rat_i(1)], rat_i(1)),
                Ineq::new(vec![rat_i(-1), rat_i(-1)], rat_i(1)),
                Ineq::new(vec![rat_i(1), rat_i(1)], rat_i(1)),
            ],
        );
        let d = toric_datum(&p).unwrap();
        assert!(d.validate().all_passed());
        assert_eq!(d.degree().unwrap(), rat_i(8));
    }

    #[test]
    fn validation_is_idempotent() {
        let d = load_datum_str(SL2_JSON).unwrap();
        let a = d.validate();
        let b = d.validate();
        assert_eq!(a.checks.len(), b.checks.len());
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert_eq!(x.passed, y.passed);
        }
    }
}
