//! Orchestration of a scenario's checks.
//!
//! Groups run in a fixed order: structure equations, spray homogeneity,
//! bracket tables, structure operators, the requested checks (symmetry,
//! then collineation, then derivations), and the dual-path consistency of
//! the curvature formulas. A failing structure check skips everything else.

use spraygeom_core::connection::BerwaldConnection;
use spraygeom_core::curvature::{jacobi_endomorphism, jacobi_endomorphism_local};
use spraygeom_core::derivation::{nabla_h_fn, nabla_h_sec, nabla_v_fn, nabla_v_sec, LieDerivation, ProjectableSection};
use spraygeom_core::prolong::{self, ProlongSection};
use spraygeom_core::residual::{self, Residual, ResidualStats};
use spraygeom_core::symmetry::{a_tensor, collineation_residuals, fn_bracket_j, fn_bracket_v, lie_symmetry};
use spraygeom_core::{BaseSection, CurvatureSuite, Field, Sampling, Space, SprayKind, StructureError, Tensor};

use crate::probe;
use crate::report::{CheckResult, Report, Verdict};
use crate::scenario::{CheckKind, CheckSpec, Expect, Scenario};

pub const ENGINE: &str = concat!("spraygeom ", env!("CARGO_PKG_VERSION"));

/// Roundoff budget for the symmetry equivalences.
const EQUIVALENCE_BUDGET: f64 = 10.0;

/// Command-line overrides of scenario settings.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    Expect(Expect),
    Info,
}

struct Item {
    residual: Residual,
    tol: f64,
    mode: Mode,
}

fn item(residual: Residual, tol: f64) -> Item {
    Item {
        residual,
        tol,
        mode: Mode::Expect(Expect::Pass),
    }
}

fn verdict(stats: &ResidualStats, tol: f64, mode: Mode) -> Verdict {
    if stats.inconclusive() || stats.evaluated == 0 {
        return Verdict::Inconclusive;
    }
    match mode {
        Mode::Info => Verdict::Info,
        Mode::Expect(Expect::Pass) if stats.max <= tol => Verdict::Pass,
        Mode::Expect(Expect::Fail) if stats.max > tol => Verdict::Pass,
        Mode::Expect(_) => Verdict::Fail,
    }
}

struct Runner<'a> {
    scenario: &'a Scenario,
    space: Space,
    points: Vec<Vec<f64>>,
    seed: u64,
    bc: BerwaldConnection,
    suite: Option<Result<CurvatureSuite, StructureError>>,
    default_tol: f64,
    results: Vec<CheckResult>,
    /// Every residual evaluated, kept only for traced runs.
    trace: Option<Vec<Residual>>,
}

impl<'a> Runner<'a> {
    fn evaluate(&mut self, group: &str, items: Vec<Item>) -> Vec<ResidualStats> {
        let sets: Vec<Residual> = items.iter().map(|i| i.residual.clone()).collect();
        let stats = residual::evaluate(self.space, &sets, &self.points);
        if let Some(t) = &mut self.trace {
            t.extend(sets);
        }
        for (it, st) in items.iter().zip(&stats) {
            let v = verdict(st, it.tol, it.mode);
            let mut c = CheckResult::from_stats(group, &it.residual.name, st, it.tol, v);
            if matches!(it.mode, Mode::Expect(Expect::Fail)) && c.note.is_none() {
                c.note = Some("expected to fail".into());
            }
            self.results.push(c);
        }
        stats
    }

    fn suite(&mut self) -> Result<&CurvatureSuite, StructureError> {
        if self.suite.is_none() {
            self.suite = Some(CurvatureSuite::new(&self.bc, self.scenario.options.dimension));
        }
        self.suite.as_ref().expect("just set").as_ref().map_err(Clone::clone)
    }

    fn section(&self, name: &str) -> &'a BaseSection {
        self.scenario.section(name).expect("validated on load")
    }

    fn structure(&mut self) -> bool {
        let (anchor, cyclic) = self.scenario.algebroid.structure_residuals();
        let tol = self.scenario.options.structure_tol;
        let start = self.results.len();
        self.evaluate("structure", vec![item(anchor, tol), item(cyclic, tol)]);
        self.results[start..].iter().all(|c| c.verdict.ok())
    }

    fn spray(&mut self) {
        let o = &self.scenario.options;
        let a = &self.scenario.algebroid;
        let sp = self.space;
        let m = a.m();
        let mode = match self.scenario.spray.kind {
            SprayKind::Spray => Mode::Expect(Expect::Pass),
            SprayKind::Semispray => Mode::Info,
        };
        let b: Vec<Field> = (0..m)
            .flat_map(|g| (0..m).map(move |c| (g, c)))
            .map(|(g, c)| spraygeom_core::tensor::euler(sp, self.bc.coeff(g, c)) - self.bc.coeff(g, c).clone())
            .collect();
        let k = jacobi_endomorphism(&self.bc);
        let berwald = Tensor::from_fn(m, 3, |o, abc| -self.bc.coeff(o, abc[1]).d(sp.y(abc[2])).d(sp.y(abc[0])));
        let items = vec![
            Item {
                residual: self.scenario.spray.euler_defect(a),
                tol: o.operator_tol,
                mode,
            },
            Item {
                residual: Residual::new("connection coefficients of degree 1", b),
                tol: o.bracket_tol,
                mode,
            },
            Item {
                residual: Residual::new("Jacobi endomorphism of degree 2", k.homogeneity_defect(sp, 2.0)),
                tol: o.bracket_tol,
                mode,
            },
            Item {
                residual: Residual::new("Berwald curvature of degree 0", berwald.homogeneity_defect(sp, 0.0)),
                tol: o.bracket_tol,
                mode,
            },
        ];
        self.evaluate("spray", items);
    }

    fn brackets(&mut self) {
        let a = &self.scenario.algebroid;
        let sp = self.space;
        let m = a.m();
        let tol = self.scenario.options.bracket_tol;
        let bc = &self.bc;
        let x = |p| ProlongSection::basis_x(m, p);
        let v = |p| ProlongSection::basis_v(m, p);
        let r = bc.curvature();
        let (mut xx, mut xv, mut vv, mut dd, mut dv, mut cv) = Default::default();
        let extend = |out: &mut Vec<Field>, lhs: &ProlongSection, rhs: &ProlongSection| {
            out.extend(lhs.sub(rhs).components());
        };
        for p in 0..m {
            for q in 0..m {
                let lxx = ProlongSection::new((0..m).map(|g| a.l(g, p, q).clone()).collect(), vec![Field::zero(); m]);
                extend(&mut xx, &prolong::bracket(a, &x(p), &x(q)), &lxx);
                extend(&mut xv, &prolong::bracket(a, &x(p), &v(q)), &ProlongSection::zero(m));
                extend(&mut vv, &prolong::bracket(a, &v(p), &v(q)), &ProlongSection::zero(m));
                let mut rhs = ProlongSection::zero(m);
                for g in 0..m {
                    rhs = rhs.add(&bc.adapted_delta(g).times(a.l(g, p, q)));
                    rhs = rhs.add(&v(g).times(&r[g][p][q]));
                }
                extend(&mut dd, &prolong::bracket(a, &bc.adapted_delta(p), &bc.adapted_delta(q)), &rhs);
                let rhs = ProlongSection::new(vec![Field::zero(); m], (0..m).map(|g| -bc.coeff(g, p).d(sp.y(q))).collect());
                extend(&mut dv, &prolong::bracket(a, &bc.adapted_delta(p), &v(q)), &rhs);
            }
            extend(&mut cv, &prolong::bracket(a, &ProlongSection::liouville(sp), &v(p)), &v(p).scale(-1.0));
        }

        let s = self.scenario.spray.section(a);
        let g = probe::prolong_section(sp, self.seed);
        let mut family: Vec<ProlongSection> = (0..m).map(x).chain((0..m).map(v)).collect();
        family.push(s.clone());
        family.push(g.clone());
        let mut jacobi = Vec::new();
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                for k in j + 1..family.len() {
                    let (p, q, w) = (&family[i], &family[j], &family[k]);
                    let cyc = prolong::bracket(a, p, &prolong::bracket(a, q, w))
                        .add(&prolong::bracket(a, q, &prolong::bracket(a, w, p)))
                        .add(&prolong::bracket(a, w, &prolong::bracket(a, p, q)));
                    jacobi.extend(cyc.components());
                }
            }
        }
        let anti = prolong::bracket(a, &s, &g).add(&prolong::bracket(a, &g, &s));
        let items = vec![
            item(Residual::new("[X_a, X_b] = L X", xx), tol),
            item(Residual::new("[X_a, V_b] = 0", xv), tol),
            item(Residual::new("[V_a, V_b] = 0", vv), tol),
            item(Residual::new("[delta_a, delta_b] = L delta + R V", dd), tol),
            item(Residual::new("[delta_a, V_b] = -dB/dy V", dv), tol),
            item(Residual::new("[C, V_b] = -V_b", cv), tol),
            item(Residual::new("Jacobi identity", jacobi), tol),
            item(Residual::new("antisymmetry", anti.components()), tol),
        ];
        self.evaluate("brackets", items);
    }

    fn operators(&mut self) {
        let a = &self.scenario.algebroid;
        let sp = self.space;
        let tol = self.scenario.options.operator_tol;
        let bc = &self.bc;
        let j = prolong::vertical_endomorphism;
        let g = probe::prolong_section(sp, self.seed);
        let s = self.scenario.spray.section(a);
        let c = ProlongSection::liouville(sp);
        let cat = |parts: &[ProlongSection]| parts.iter().flat_map(|p| p.components()).collect::<Vec<_>>();
        let hom = Item {
            residual: Residual::new("[C, S] = S", prolong::homogeneity_defect(a, &s, 2).components()),
            tol,
            mode: match self.scenario.spray.kind {
                SprayKind::Spray => Mode::Expect(Expect::Pass),
                SprayKind::Semispray => Mode::Info,
            },
        };
        let items = vec![
            item(Residual::new("J J = 0", j(&j(&g)).components()), tol),
            item(Residual::difference("J S = C", &j(&s).components(), &c.components()), tol),
            hom,
            item(
                Residual::new("h J = h v = J v = 0", cat(&[bc.h(&j(&g)), bc.h(&bc.v(&g)), j(&bc.v(&g))])),
                tol,
            ),
            item(Residual::difference("v v = v", &bc.v(&bc.v(&g)).components(), &bc.v(&g).components()), tol),
            item(Residual::new("v h = 0", bc.v(&bc.h(&g)).components()), tol),
            item(
                Residual::new("J h = J = v J", cat(&[j(&bc.h(&g)).sub(&j(&g)), bc.v(&j(&g)).sub(&j(&g))])),
                tol,
            ),
        ];
        self.evaluate("operators", items);
    }

    /// A group label for a requested check, unique within the report.
    fn label(&self, base: String) -> String {
        let taken = |l: &str| self.results.iter().any(|c| c.group == l);
        if !taken(&base) {
            return base;
        }
        (2..).map(|k| format!("{base} ({k})")).find(|l| !taken(l)).expect("unbounded")
    }

    fn tol_for(&self, spec: &CheckSpec) -> f64 {
        spec.tol.unwrap_or(self.default_tol)
    }

    fn lie_symmetry(&mut self, spec: &CheckSpec) {
        let eta = self.section(&spec.section);
        let r = lie_symmetry(&self.bc, eta);
        let inner = self.scenario.options.bracket_tol;
        let main = match &spec.value {
            None => r.residual(),
            Some(v) => Residual::difference("[S, eta^C] vs expected value", &r.bracket.v, v),
        };
        let items = vec![
            item(r.cancellation(), inner),
            item(r.consistency(), inner),
            Item {
                residual: main,
                tol: self.tol_for(spec),
                mode: Mode::Expect(spec.expect),
            },
        ];
        let group = self.label(format!("lie_symmetry {}", spec.section));
        self.evaluate(&group, items);
    }

    fn symmetry_lemma(&mut self, spec: &CheckSpec) {
        let a = &self.scenario.algebroid;
        let sp = self.space;
        let m = a.m();
        let eta = self.section(&spec.section);
        let tol = self.tol_for(spec);
        let inner = self.scenario.options.bracket_tol;
        let ec = prolong::complete_lift(a, eta);
        let ev = prolong::vertical_lift(eta);
        let g = probe::prolong_section(sp, self.seed);
        let mut at = Vec::new();
        let mut fx = Vec::new();
        let mut fv = Vec::new();
        let mut consistency = Vec::new();
        let mut fj = Vec::new();
        for b in 0..m {
            let ab = a_tensor(&self.bc, eta, &a.basis(b));
            let on_x = fn_bracket_v(&self.bc, &ec, &ProlongSection::basis_x(m, b));
            at.extend(ab.components());
            fx.extend(on_x.components());
            consistency.extend(on_x.add(&ab).components());
            fv.extend(fn_bracket_v(&self.bc, &ec, &ProlongSection::basis_v(m, b)).components());
            for lift in [&ec, &ev] {
                fj.extend(fn_bracket_j(&self.bc, lift, &ProlongSection::basis_x(m, b)).components());
                fj.extend(fn_bracket_j(&self.bc, lift, &ProlongSection::basis_v(m, b)).components());
            }
        }
        for lift in [&ec, &ev] {
            fj.extend(fn_bracket_j(&self.bc, lift, &g).components());
        }
        let info = |residual: Residual| Item {
            residual,
            tol,
            mode: Mode::Info,
        };
        let items = vec![
            info(lie_symmetry(&self.bc, eta).residual()),
            info(Residual::new("A(eta, e_b)", at)),
            info(Residual::new("[v, eta^C](X_b)", fx)),
            item(Residual::new("[v, eta^C](X_b) = -A(eta, e_b)", consistency), inner),
            item(Residual::new("[v, eta^C](V_b) = 0", fv), inner),
            item(Residual::new("[J, eta^C] = [J, eta^V] = 0", fj), inner),
        ];
        let group = self.label(format!("symmetry_lemma {}", spec.section));
        let stats = self.evaluate(&group, items);
        let small = |s: &ResidualStats, t: f64| s.within(t);
        let (sym, at, fx) = (&stats[0], &stats[1], &stats[2]);
        let budget = EQUIVALENCE_BUDGET * tol;
        let agree = (!small(sym, tol) || (small(at, budget) && small(fx, budget)))
            && (!small(at, tol) || (small(sym, budget) && small(fx, budget)))
            && (!small(fx, tol) || (small(sym, budget) && small(at, budget)));
        let conclusive = ![sym, at, fx].iter().any(|s| s.inconclusive() || s.evaluated == 0);
        let v = match (conclusive, agree) {
            (false, _) => Verdict::Inconclusive,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        };
        let note = format!("symmetry {}", if small(sym, tol) { "holds" } else { "fails" });
        self.results.push(CheckResult::bare(&group, "criteria agree", tol, v, Some(note)));
    }

    fn collineation(&mut self, spec: &CheckSpec) {
        let group = self.label(format!("collineation {}", spec.section));
        let eta = self.section(&spec.section);
        let tol = self.tol_for(spec);
        let mode = match spec.expect {
            Expect::Pass => Mode::Expect(Expect::Pass),
            Expect::Fail => Mode::Info,
        };
        let bc = self.bc.clone();
        match self.suite() {
            Ok(suite) => {
                let items = collineation_residuals(&bc, suite, eta)
                    .into_iter()
                    .map(|residual| Item { residual, tol, mode })
                    .collect();
                self.evaluate(&group, items);
            }
            Err(e) => self.results.push(CheckResult::bare(&group, "*", tol, Verdict::Skipped, Some(e.to_string()))),
        }
    }

    fn derivations(&mut self, spec: &CheckSpec) {
        let a = &self.scenario.algebroid;
        let sp = self.space;
        let bc = &self.bc;
        let group = self.label(format!("derivations {} {}", spec.section, spec.with.as_deref().unwrap_or("")));
        let tol = self.tol_for(spec);
        let eta = self.section(&spec.section);
        let xi = self.section(spec.with.as_deref().expect("validated on load"));
        let f = spec.function.clone().unwrap_or_else(|| probe::function(sp, self.seed));
        let lift = |s: ProlongSection| ProjectableSection::new(sp, s).expect("lifts of base sections are projectable");

        let ec = prolong::complete_lift(a, eta);
        let lie = LieDerivation::new(a, &lift(ec.clone()));
        let hat_eta = a.hat_lift(eta);
        let hat_xi = a.hat_lift(xi);
        let sigma = hat_xi.scaled(&f);
        let generic = probe::pullback_section(sp, self.seed);
        let tilde = probe::prolong_section(sp, self.seed);
        let dv_fn = |g: &Field| nabla_v_fn(sp, g).eval(std::slice::from_ref(&hat_xi));
        let dh_fn = |g: &Field| nabla_h_fn(bc, g).eval(std::slice::from_ref(&hat_xi));
        let vert = LieDerivation::new(a, &lift(prolong::vertical_lift(eta)));
        let horiz = LieDerivation::new(a, &lift(bc.horizontal_lift(eta)));
        let lie_bv = LieDerivation::new(a, &lift(prolong::vertical_lift(&a.bracket_e(eta, xi))));

        let mut items = vec![
            item(
                Residual::difference("lift derivative of a hat lift", &lie.on_sec(&hat_xi).comp, &a.hat_lift(&a.bracket_e(eta, xi)).comp),
                tol,
            ),
            item(
                Residual::difference("vertical lift derivative", &vert.on_sec(&sigma).comp, &nabla_v_sec(sp, &hat_eta, &sigma).comp),
                tol,
            ),
            item(
                Residual::difference("horizontal lift derivative", &horiz.on_sec(&sigma).comp, &nabla_h_sec(bc, &hat_eta, &sigma).comp),
                tol,
            ),
            item(
                Residual::difference(
                    "commutes with j",
                    &lie.on_sec(&prolong::map_j(&tilde)).comp,
                    &prolong::map_j(&prolong::bracket(a, &ec, &tilde)).comp,
                ),
                tol,
            ),
            item(
                Residual::difference(
                    "vertical commutator on functions",
                    &[lie.on_fn(&dv_fn(&f)) - dv_fn(&lie.on_fn(&f))],
                    &[lie_bv.on_fn(&f)],
                ),
                tol,
            ),
            item(
                Residual::difference(
                    "vertical commutator on sections",
                    &lie.on_sec(&nabla_v_sec(sp, &hat_xi, &sigma)).sub(&nabla_v_sec(sp, &hat_xi, &lie.on_sec(&sigma))).comp,
                    &lie_bv.on_sec(&sigma).comp,
                ),
                tol,
            ),
        ];

        let twisted = prolong::bracket(a, &ec, &bc.horizontal_lift(xi));
        let mut skipped = None;
        match ProjectableSection::verified(sp, twisted, &self.points, 1e-12) {
            Ok(p) => {
                let lie_t = LieDerivation::new(a, &p);
                items.push(item(
                    Residual::difference(
                        "horizontal commutator on functions",
                        &[lie.on_fn(&dh_fn(&f)) - dh_fn(&lie.on_fn(&f))],
                        &[lie_t.on_fn(&f)],
                    ),
                    tol,
                ));
                items.push(item(
                    Residual::difference(
                        "horizontal commutator on sections",
                        &lie.on_sec(&nabla_h_sec(bc, &hat_xi, &sigma)).sub(&nabla_h_sec(bc, &hat_xi, &lie.on_sec(&sigma))).comp,
                        &lie_t.on_sec(&sigma).comp,
                    ),
                    tol,
                ));
            }
            Err(e) => skipped = Some(e.to_string()),
        }

        items.push(item(
            Residual::new("hat lifts stay vertically parallel", nabla_v_sec(sp, &hat_xi, &lie.on_sec(&hat_eta)).comp),
            tol,
        ));
        items.push(item(
            Residual::difference(
                "derivative of a vertical differential",
                &[lie.on_cotensor(&nabla_v_fn(sp, &f)).eval(std::slice::from_ref(&hat_xi))],
                &[prolong::rho_apply(a, &prolong::vertical_lift(xi), &prolong::rho_apply(a, &ec, &f))],
            ),
            tol,
        ));
        items.push(item(
            Residual::difference(
                "Leibniz rule",
                &lie.on_sec(&generic.scaled(&f)).comp,
                &generic.scaled(&lie.on_fn(&f)).add(&lie.on_sec(&generic).scaled(&f)).comp,
            ),
            tol,
        ));
        self.evaluate(&group, items);
        if let Some(note) = skipped {
            self.results.push(CheckResult::bare(&group, "horizontal commutator", tol, Verdict::Skipped, Some(note)));
        }
    }

    fn dual_path(&mut self) {
        let tol = self.scenario.options.dual_tol;
        let k = jacobi_endomorphism(&self.bc);
        let kl = jacobi_endomorphism_local(&self.bc);
        let mut items = vec![item(
            Residual::difference("Jacobi endomorphism: bracket vs coordinates", k.components(), kl.components()),
            tol,
        )];
        let skipped = match self.suite() {
            Ok(s) => {
                items.push(item(
                    Residual::difference("projective deviation: raw vs rewritten", s.w0.components(), s.w0_rewritten.components()),
                    tol,
                ));
                None
            }
            Err(e) => Some(e.to_string()),
        };
        self.evaluate("dual path", items);
        if let Some(note) = skipped {
            self.results
                .push(CheckResult::bare("dual path", "projective deviation: raw vs rewritten", tol, Verdict::Skipped, Some(note)));
        }
    }
}

fn rank(kind: CheckKind) -> usize {
    match kind {
        CheckKind::LieSymmetry | CheckKind::SymmetryLemma => 0,
        CheckKind::Collineation => 1,
        CheckKind::Derivations => 2,
    }
}

fn sampling(scenario: &Scenario, ov: &Overrides) -> Sampling {
    let mut s = scenario.sampling;
    if let Some(p) = ov.points {
        s.points = p;
    }
    if let Some(k) = ov.seed {
        s.seed = k;
    }
    s
}

/// Run every check of `scenario`. `digest` identifies the scenario source.
pub fn run(scenario: &Scenario, digest: &str, ov: &Overrides) -> Report {
    execute(scenario, digest, ov, false).0
}

/// Like [`run`], also returning every residual set that was evaluated.
pub fn run_traced(scenario: &Scenario, digest: &str, ov: &Overrides) -> (Report, Vec<Residual>) {
    execute(scenario, digest, ov, true)
}

fn execute(scenario: &Scenario, digest: &str, ov: &Overrides, traced: bool) -> (Report, Vec<Residual>) {
    let s = sampling(scenario, ov);
    let space = scenario.space();
    let mut r = Runner {
        scenario,
        space,
        points: s.generate(space),
        seed: s.seed,
        bc: BerwaldConnection::new(&scenario.algebroid, &scenario.spray),
        suite: None,
        default_tol: ov.tol.unwrap_or(scenario.options.tol),
        results: Vec::new(),
        trace: traced.then(Vec::new),
    };
    let mut requested: Vec<&CheckSpec> = scenario.checks.iter().collect();
    requested.sort_by_key(|c| rank(c.kind));

    if r.structure() {
        r.spray();
        r.brackets();
        r.operators();
        for spec in requested {
            match spec.kind {
                CheckKind::LieSymmetry => r.lie_symmetry(spec),
                CheckKind::SymmetryLemma => r.symmetry_lemma(spec),
                CheckKind::Collineation => r.collineation(spec),
                CheckKind::Derivations => r.derivations(spec),
            }
        }
        r.dual_path();
    } else {
        let note = Some("structure equations failed".to_string());
        for group in ["spray", "brackets", "operators"] {
            r.results.push(CheckResult::bare(group, "*", 0.0, Verdict::Skipped, note.clone()));
        }
        for spec in requested {
            let t = r.tol_for(spec);
            r.results
                .push(CheckResult::bare(&format!("{} {}", spec.kind.name(), spec.section), "*", t, Verdict::Skipped, note.clone()));
        }
        r.results.push(CheckResult::bare("dual path", "*", 0.0, Verdict::Skipped, note));
    }

    let pass = r.results.iter().all(|c| c.verdict.ok());
    let report = Report {
        engine: ENGINE.to_string(),
        scenario_digest: digest.to_string(),
        seed: s.seed,
        points: s.points,
        pass,
        checks: r.results,
    };
    (report, r.trace.unwrap_or_default())
}

/// Structure equations only, as run by `validate`.
pub fn validate(scenario: &Scenario, digest: &str, ov: &Overrides) -> Report {
    let s = sampling(scenario, ov);
    let space = scenario.space();
    let mut r = Runner {
        scenario,
        space,
        points: s.generate(space),
        seed: s.seed,
        bc: BerwaldConnection::new(&scenario.algebroid, &scenario.spray),
        suite: None,
        default_tol: scenario.options.tol,
        results: Vec::new(),
        trace: None,
    };
    let pass = r.structure();
    Report {
        engine: ENGINE.to_string(),
        scenario_digest: digest.to_string(),
        seed: s.seed,
        points: s.points,
        pass,
        checks: r.results,
    }
}
