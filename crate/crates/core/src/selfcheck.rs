//! Randomized identity suites over synthetic spherical data.
//!
//! The generator draws bounded rational polytopes in dimensions 1-3 placed in
//! the positive orthant, linear root functionals (positive there), an
//! interior kappa_P, torus characters putting the torus moment coordinates in
//! the positive quadrant (so monomial weights are positive), and piecewise
//! linear configurations with up to five irredundant pieces. Every instance
//! is deterministic in the seed.

use num::{BigInt, One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datum::{FacetData, FacetKind, RootFunctional, SphericalDatum};
use crate::error::Result;
use crate::functionals::{evaluate, lifting_invariance_check};
use crate::geom::{dot, Direction, HPolytope, Ineq, Point};
use crate::poly::Polynomial;
use crate::quad::integrate_polynomial;
use crate::rat::{factorial, format_rat, rat, rat_i, Rat};
use crate::stability::{criterion, destabilizer, Status};
use crate::tc::{regions, validate_tc, Piece, TestConfig};
use crate::weight::{pullback, WeightFunction};

pub struct Instance {
    pub datum: SphericalDatum,
    pub tc: TestConfig,
    pub weight: WeightFunction,
    pub chi_shift: Vec<Rat>,
    pub affine: bool,
}

fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(lo * den..=hi * den);
    rat(num, den)
}

/// A bounded full-dimensional polytope in the strictly positive orthant:
/// a box with at most one extra corner cut that keeps the centroid inside.
fn random_polytope(rng: &mut ChaCha8Rng, d: usize) -> HPolytope {
    let mut ineqs = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..d {
        let lo = rand_rat(rng, 1, 3, 2);
        let width = rand_rat(rng, 1, 3, 2);
        let hi = &lo + &width;
        let mut n = vec![Rat::zero(); d];
        n[i] = Rat::one();
        ineqs.push(Ineq::new(n.clone(), -lo.clone()));
        n[i] = -Rat::one();
        ineqs.push(Ineq::new(n, hi.clone()));
        bounds.push((lo, hi));
    }
    let centroid: Vec<Rat> = bounds
        .iter()
        .map(|(lo, hi)| (lo + hi) / rat_i(2))
        .collect();
    if d >= 2 && rng.gen_bool(0.5) {
        // Cut off the top corner: sum x_i <= s with s between the centroid
        // level and the corner level.
        let corner: Rat = bounds.iter().map(|(_, hi)| hi.clone()).sum();
        let center_level: Rat = centroid.iter().cloned().sum();
        let s = (&center_level + &corner) / rat_i(2);
        ineqs.push(Ineq::new(vec![-Rat::one(); d], s));
    }
    HPolytope::new(d, ineqs)
}

fn random_datum(rng: &mut ChaCha8Rng, d: usize) -> SphericalDatum {
    let poly = random_polytope(rng, d);
    let kappa = poly.centroid().expect("generated polytope has vertices");
    let mut facets = Vec::new();
    for iq in &poly.ineqs {
        let n_d = &iq.offset + dot(&iq.normal, kappa.coords());
        facets.push(FacetData {
            normal: Direction(iq.normal.clone()),
            n_d,
            kind: FacetKind::Colour,
        });
    }
    // Linear root functionals, positive on the positive orthant. Keeping the
    // constant term zero makes the weight density homogeneous, which the
    // boundary form of M requires.
    let n_roots = rng.gen_range(0..=2usize);
    let mut roots = Vec::new();
    for _ in 0..n_roots {
        let mut linear = vec![Rat::zero(); d];
        loop {
            for x in linear.iter_mut() {
                *x = rat_i(rng.gen_range(0..=2));
            }
            if linear.iter().any(|x| !x.is_zero()) {
                break;
            }
        }
        let rho = [rat_i(1), rat_i(2), rat(1, 2)][rng.gen_range(0..3)].clone();
        roots.push(RootFunctional {
            linear: Direction(linear),
            constant: Rat::zero(),
            rho_pairing: rho,
        });
    }
    // Occasionally constrain the valuation cone along the first axis; the
    // torus then spans the remaining axes.
    let with_sigma = d >= 2 && rng.gen_bool(0.25);
    let mut spherical_roots = Vec::new();
    let torus_axes: Vec<usize> = if with_sigma {
        let mut s = vec![Rat::zero(); d];
        s[0] = rat_i(rng.gen_range(1..=2));
        spherical_roots.push(Direction(s));
        (1..d).collect()
    } else {
        (0..d).collect()
    };
    let vertices = poly.vertices().expect("generated polytope has vertices");
    let mut torus = Vec::new();
    let mut chi = Vec::new();
    for &axis in &torus_axes {
        let mut xi = vec![Rat::zero(); d];
        xi[axis] = Rat::one();
        // Character placing theta strictly inside the positive quadrant.
        let min_val = vertices
            .iter()
            .map(|v| v.coords()[axis].clone())
            .min()
            .unwrap();
        let delta = [rat(1, 2), rat_i(1)][rng.gen_range(0..2)].clone();
        chi.push(delta - min_val);
        torus.push(Direction(xi));
    }
    SphericalDatum {
        name: format!("random-{d}d"),
        n: d + roots.len(),
        r0: d,
        facets,
        roots,
        kappa_p: kappa,
        spherical_roots,
        torus,
        chi,
        chi_canonical: false,
    }
}

fn random_weight(rng: &mut ChaCha8Rng, datum: &SphericalDatum) -> WeightFunction {
    let r = datum.torus_rank();
    let kind = rng.gen_range(0..3);
    if kind == 0 || r == 0 {
        return WeightFunction::one(r);
    }
    // theta values are positive, so monomials are positive weights; bound the
    // coefficients of mixed polynomials so positivity survives subtraction.
    let max_theta: Vec<Rat> = {
        let vertices = datum.polytope().vertices().unwrap();
        (0..r)
            .map(|a| {
                vertices
                    .iter()
                    .map(|v| dot(datum.torus[a].coords(), v.coords()) + &datum.chi[a])
                    .max()
                    .unwrap()
            })
            .collect()
    };
    let random_expo = |rng: &mut ChaCha8Rng| -> Vec<u32> {
        let mut e = vec![0u32; r];
        let total = rng.gen_range(1..=3u32);
        for _ in 0..total {
            let a = rng.gen_range(0..r);
            e[a] += 1;
        }
        e
    };
    if kind == 1 {
        let e = random_expo(rng);
        return WeightFunction::Polynomial(Polynomial::from_terms(
            r,
            vec![(rat_i(1), e)],
        ));
    }
    let n_terms = rng.gen_range(1..=2usize);
    let mut p = Polynomial::one(r);
    for _ in 0..n_terms {
        let e = random_expo(rng);
        let mut bound = Rat::one();
        for (a, &k) in e.iter().enumerate() {
            for _ in 0..k {
                bound *= max_theta[a].clone().max(Rat::one());
            }
        }
        // |coef| <= 1 / (4 bound) keeps 1 + sum of terms positive.
        let sign = if rng.gen_bool(0.5) { rat_i(1) } else { rat_i(-1) };
        let coef = sign / (rat_i(4 * n_terms as i64) * bound);
        p = p.add(&Polynomial::from_terms(r, vec![(coef, e)]));
    }
    WeightFunction::Polynomial(p)
}

/// Random rational point of the polytope: a small-denominator convex
/// combination of vertices.
fn random_interior_point(rng: &mut ChaCha8Rng, vertices: &[Point]) -> Vec<Rat> {
    let d = vertices[0].dim();
    loop {
        let mut weights: Vec<Rat> = (0..vertices.len())
            .map(|_| rat_i(rng.gen_range(0..=3i64)))
            .collect();
        let total: Rat = weights.iter().cloned().sum();
        if total.is_zero() {
            continue;
        }
        let mut x = vec![Rat::zero(); d];
        for (w, v) in weights.iter_mut().zip(vertices) {
            *w /= total.clone();
            for (xi, vi) in x.iter_mut().zip(v.coords()) {
                *xi += &*w * vi;
            }
        }
        return x;
    }
}

fn random_tc(rng: &mut ChaCha8Rng, datum: &SphericalDatum, affine: bool) -> TestConfig {
    let d = datum.r0;
    let poly = datum.polytope();
    let vertices = poly.vertices().unwrap();
    let tangent_style = !affine && rng.gen_bool(0.6);
    loop {
        let n_pieces = if affine { 1 } else { rng.gen_range(2..=5usize) };
        let mut pieces = Vec::new();
        for _ in 0..n_pieces {
            let (mut lambda, c0) = if tangent_style {
                // Tangent plane to -|x|^2/2 at a base point inside the
                // polytope: the lower envelope keeps every piece active near
                // its base point, so redundancy is rare.
                let base = random_interior_point(rng, &vertices);
                let lambda: Vec<Rat> = base.iter().map(|x| -x.clone()).collect();
                let c: Rat = base.iter().map(|x| x * x).sum::<Rat>() / rat_i(2);
                (lambda, c)
            } else {
                let mut lambda = vec![Rat::zero(); d];
                for x in lambda.iter_mut() {
                    *x = rand_rat(rng, -2, 2, 3);
                }
                (lambda, rand_rat(rng, 0, 2, 2))
            };
            // Respect the valuation cone along constrained axes.
            for sigma in &datum.spherical_roots {
                if dot(sigma.coords(), &lambda).is_positive() {
                    for (l, s) in lambda.iter_mut().zip(sigma.coords()) {
                        if !s.is_zero() {
                            *l = -l.abs();
                        }
                    }
                }
            }
            pieces.push(Piece {
                c: c0,
                lambda: Direction(lambda),
            });
        }
        // Shift so the minimum over the polytope is nonnegative.
        let tc_raw = TestConfig {
            pieces: pieces.clone(),
        };
        let min = vertices
            .iter()
            .map(|v| tc_raw.eval(v.coords()))
            .min()
            .unwrap();
        if min.is_negative() {
            for p in pieces.iter_mut() {
                p.c = &p.c - &min;
            }
        }
        // Drop redundant pieces until validation passes.
        loop {
            match validate_tc(datum, pieces.clone()) {
                Ok(tc) => return tc,
                Err(crate::error::Error::RedundantPiece(i)) => {
                    pieces.remove(i);
                    if pieces.is_empty() {
                        break;
                    }
                }
                Err(_) => break,
            }
        }
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let d = rng.gen_range(1..=3usize);
    let datum = random_datum(rng, d);
    let affine = rng.gen_bool(0.2);
    let tc = random_tc(rng, &datum, affine);
    let weight = random_weight(rng, &datum);
    let chi_shift: Vec<Rat> = (0..datum.torus_rank())
        .map(|_| rand_rat(rng, -2, 2, 2))
        .collect();
    Instance {
        datum,
        tc,
        weight,
        chi_shift,
        affine,
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(msg());
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelfcheckReport {
    pub suites: Vec<SuiteResult>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{}: {} passed, {} failed\n",
                s.name, s.passed, s.failed
            ));
            for f in &s.failures {
                out.push_str(&format!("  failure: {f}\n"));
            }
        }
        out
    }
}

/// Sum of `(1 - 1/m_a) int_{Omega_a} ghat pi`, recomputed independently of
/// `evaluate` for the Futaki relation check.
fn multiplicity_correction(
    datum: &SphericalDatum,
    tc: &TestConfig,
    weight: &WeightFunction,
) -> Result<Rat> {
    let pb = pullback(weight, datum)?;
    let gpi = pb
        .exact_g()
        .expect("polynomial weight")
        .mul(&datum.pi_polynomial());
    let mut corr = Rat::zero();
    for region in &regions(datum, tc).regions {
        let m = Rat::from_integer(region.multiplicity.clone());
        corr += (Rat::one() - Rat::one() / m) * integrate_polynomial(&region.polytope, &gpi)?;
    }
    Ok(corr)
}

/// Run the randomized identity suites on `cases` seeded instances.
pub fn run(seed: u64, cases: usize) -> Result<SelfcheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m_forms = SuiteResult {
        name: "M-boundary-form equality".into(),
        ..Default::default()
    };
    let mut ding_ineq = SuiteResult {
        name: "M >= D, equality for affine".into(),
        ..Default::default()
    };
    let mut fut_rel = SuiteResult {
        name: "Futaki relation".into(),
        ..Default::default()
    };
    let mut shift_scale = SuiteResult {
        name: "shift/scale behaviour".into(),
        ..Default::default()
    };
    let mut pi_rescale = SuiteResult {
        name: "rho-pairing rescale invariance".into(),
        ..Default::default()
    };
    let mut lifting = SuiteResult {
        name: "lifting invariance".into(),
        ..Default::default()
    };
    let mut verdicts = SuiteResult {
        name: "criterion/destabilizer consistency".into(),
        ..Default::default()
    };

    for case in 0..cases {
        let inst = random_instance(&mut rng);
        let datum = &inst.datum;
        let tc = &inst.tc;
        let weight = &inst.weight;
        let report = evaluate(datum, tc, weight)?;
        let ex = |v: &crate::functionals::Value| v.exact().unwrap().clone();

        // Boundary form of M.
        let m = ex(&report.m);
        let mb = ex(&report.m_boundary);
        m_forms.record(m == mb, || {
            format!(
                "case {case}: M = {} but boundary form {}",
                format_rat(&m),
                format_rat(&mb)
            )
        });

        // Ding-Mabuchi inequality, plus J >= 0 and D = L - E.
        let dv = ex(&report.d);
        ding_ineq.record(m >= dv, || {
            format!("case {case}: M = {} < D = {}", format_rat(&m), format_rat(&dv))
        });
        ding_ineq.record(!ex(&report.j).is_negative(), || {
            format!("case {case}: J negative")
        });
        ding_ineq.record(dv == ex(&report.l) - ex(&report.e), || {
            format!("case {case}: D != L - E")
        });
        if inst.affine {
            ding_ineq.record(m == dv, || {
                format!(
                    "case {case}: affine instance with M = {} != D = {}",
                    format_rat(&m),
                    format_rat(&dv)
                )
            });
        }

        // Futaki relation: I Fut = I_g M + corr, i.e.
        // (V/Vg) Fut = M + n! corr / Vg, plus the boundary-form identity
        // Fut_closed = (Vg/2) Fut.
        let fut = ex(&report.fut);
        let v = ex(&report.v);
        let vg = ex(&report.vg);
        let corr = multiplicity_correction(datum, tc, weight)?;
        let lhs = &v / &vg * &fut;
        let rhs = &m + factorial(datum.n) * &corr / &vg;
        fut_rel.record(lhs == rhs, || {
            format!(
                "case {case}: (V/Vg) Fut = {} but M + n! corr/Vg = {}",
                format_rat(&lhs),
                format_rat(&rhs)
            )
        });
        if report.reduced_central_fibre {
            let expect = &vg / &v * &m;
            fut_rel.record(fut == expect, || {
                format!("case {case}: reduced fibre but Fut != (Vg/V) M")
            });
        }
        let fc = ex(&report.fut_closed);
        let half_vg_fut = &vg / rat_i(2) * &fut;
        fut_rel.record(fc == half_vg_fut, || {
            format!(
                "case {case}: Fut_closed = {} != (Vg/2) Fut = {}",
                format_rat(&fc),
                format_rat(&half_vg_fut)
            )
        });

        // Constant shift: E and L move by c, the rest are unchanged.
        let c = rat(3, 2);
        let shifted = evaluate(datum, &tc.shift(&c), weight)?;
        let ok = ex(&shifted.e) == ex(&report.e) + &c
            && ex(&shifted.l) == ex(&report.l) + &c
            && ex(&shifted.j) == ex(&report.j)
            && ex(&shifted.d) == ex(&report.d)
            && ex(&shifted.m) == ex(&report.m)
            && ex(&shifted.fut) == ex(&report.fut);
        shift_scale.record(ok, || format!("case {case}: constant shift broke a field"));

        // Positive integral scaling: E, J, D, M scale linearly; Fut too when
        // the central fibre stays reduced (multiplicities are unchanged by
        // integral scaling only in that case).
        let t = rat_i(2);
        let scaled = evaluate(datum, &tc.scale(&t), weight)?;
        let ok = ex(&scaled.e) == ex(&report.e) * &t
            && ex(&scaled.j) == ex(&report.j) * &t
            && ex(&scaled.d) == ex(&report.d) * &t
            && ex(&scaled.m) == ex(&report.m) * &t;
        shift_scale.record(ok, || format!("case {case}: integral scaling broke a field"));
        if report.reduced_central_fibre {
            shift_scale.record(ex(&scaled.fut) == ex(&report.fut) * &t, || {
                format!("case {case}: Fut not linear under scaling of a reduced instance")
            });
        }

        // Rescaling every rho-pairing leaves all ratio fields and the
        // barycenter unchanged; V, Vg, Fut_closed scale by the pi factor.
        if !datum.roots.is_empty() {
            let s = rat(3, 2);
            let rescaled_datum = datum.with_rho_scaled(&s);
            let rescaled = evaluate(&rescaled_datum, tc, weight)?;
            let mut factor = Rat::one();
            for _ in 0..datum.roots.len() {
                factor /= s.clone();
            }
            let ok = ex(&rescaled.e) == ex(&report.e)
                && ex(&rescaled.j) == ex(&report.j)
                && ex(&rescaled.d) == ex(&report.d)
                && ex(&rescaled.l) == ex(&report.l)
                && ex(&rescaled.m) == ex(&report.m)
                && ex(&rescaled.m_boundary) == ex(&report.m_boundary)
                && ex(&rescaled.fut) == ex(&report.fut)
                && ex(&rescaled.v) == ex(&report.v) * &factor
                && ex(&rescaled.vg) == ex(&report.vg) * &factor
                && ex(&rescaled.fut_closed) == ex(&report.fut_closed) * &factor
                && rescaled
                    .barycenter
                    .iter()
                    .zip(&report.barycenter)
                    .all(|(a, b)| a.exact() == b.exact());
            pi_rescale.record(ok, || {
                format!("case {case}: rho rescale changed an invariant field")
            });
        }

        // Lifting invariance.
        if datum.torus_rank() > 0 {
            let dev = lifting_invariance_check(datum, tc, weight, &inst.chi_shift)?;
            lifting.record(dev.is_zero(), || {
                format!("case {case}: lifting deviation {}", format_rat(&dev))
            });
        }

        // Verdict consistency.
        let verdict = criterion(datum, weight)?;
        let witness = destabilizer(datum, weight)?;
        match verdict.status {
            Status::CriterionHolds => {
                verdicts.record(witness.is_none(), || {
                    format!("case {case}: criterion holds but a destabilizer was returned")
                });
            }
            Status::Fails | Status::Boundary => {
                verdicts.record(witness.is_some(), || {
                    format!("case {case}: criterion fails without a destabilizer")
                });
                if let Some((w, ding)) = witness {
                    let consistent =
                        crate::functionals::ding_of_direction(datum, weight, &w)? == ding
                            && !ding.is_positive();
                    verdicts.record(consistent, || {
                        format!("case {case}: witness Ding value inconsistent")
                    });
                }
            }
        }

        // Twisting by a central direction never changes the verdict inputs.
        if !datum.spherical_roots.is_empty() || datum.torus_rank() > 0 {
            let b1 = crate::functionals::barycenter_exact(datum, weight)?;
            verdicts.record(
                b1.len() == datum.r0,
                || format!("case {case}: barycenter dimension mismatch"),
            );
        }

        let _ = Point(vec![]);
        let _: BigInt = BigInt::one();
    }

    Ok(SelfcheckReport {
        suites: vec![
            m_forms, ding_ineq, fut_rel, shift_scale, pi_rescale, lifting, verdicts,
        ],
    })
}
