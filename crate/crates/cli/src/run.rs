//! Command dispatch.

use std::time::Instant;

use homotopy_core::cohomology::{CohomologyReport, ComplexKind};
use homotopy_core::deformation::{deformation_cohomology, mc_residual, mc_solve, pushforward_mc, FormalElement, MCOutcome, Structure};
use homotopy_core::ibl::certify_ibl;
use homotopy_core::ocha::{check_ocha, check_qocha, solve_ocha_component, ClosedFrame, OCMorphism, OchaTruncation};
use homotopy_core::poly::{Flavor, WordPoly};
use homotopy_core::structures::*;
use homotopy_core::symplectic::SymplecticData;
use homotopy_core::transfer::{decomposition_model, verify_decomposition};
use homotopy_core::trees::fixed_point_residual;
use homotopy_core::{Element, GradedSpace};

use crate::error::CliError;
use crate::model::{Built, Model, COMMANDS};
use crate::report::{names, Record, RunReport, Status};
use crate::workspace::Bounds;

pub const ENV_TRUNCATION: &str = "HOMOTOPY_TRUNCATION";
pub const DEFAULT_BOUNDS: (usize, usize, usize) = (4, 2, 3);

/// Command-line settings shared by every scenario of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub bounds: Bounds,
    pub topological: bool,
}

/// Parses `max_arity=4,max_hbar=2,max_order=3` (any subset, any order).
pub fn parse_env_bounds(text: &str) -> Result<Bounds, CliError> {
    let mut b = Bounds::default();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::validation(ENV_TRUNCATION, format!("expected key=value, got {part:?}")))?;
        let v: usize = v.trim().parse().map_err(|_| CliError::validation(ENV_TRUNCATION, format!("{v:?} is not a count")))?;
        match k.trim() {
            "max_arity" => b.max_arity = Some(v),
            "max_hbar" | "max_genus" => b.max_hbar = Some(v),
            "max_order" => b.max_order = Some(v),
            other => return Err(CliError::validation(ENV_TRUNCATION, format!("unknown key {other:?}"))),
        }
    }
    Ok(b)
}

/// Flag, then scenario, then environment, then the built-in defaults.
pub fn resolve(flags: &Bounds, scenario: Option<&Bounds>, env: &Bounds) -> (usize, usize, usize) {
    let pick = |f: fn(&Bounds) -> Option<usize>, d: usize| f(flags).or_else(|| scenario.and_then(f)).or_else(|| f(env)).unwrap_or(d);
    (pick(|b| b.max_arity, DEFAULT_BOUNDS.0), pick(|b| b.max_hbar, DEFAULT_BOUNDS.1), pick(|b| b.max_order, DEFAULT_BOUNDS.2))
}

/// Runs scenario `name` with `command` (its own command when `None`).
pub fn run_scenario(model: &Model, name: &str, command: Option<&str>, flags: &Flags, env: &Bounds) -> RunReport {
    let start = Instant::now();
    let Some(spec) = model.scenarios.get(name) else {
        let mut r = RunReport::new(name, command.unwrap_or("?"), resolve(&flags.bounds, None, env));
        r.fail_with(CliError::validation("scenarios", format!("unknown scenario {name:?}")));
        return r;
    };
    let command = command.unwrap_or(&spec.command);
    let bounds = resolve(&flags.bounds, spec.bounds.as_ref(), env);
    let mut report = RunReport::new(name, command, bounds);
    let result = match command {
        "check" => check(model, name, &mut report),
        "transfer" => transfer(model, name, &mut report),
        "mc" => mc(model, name, flags, &mut report),
        "cohomology" => cohomology(model, name, &mut report),
        "ocha" => ocha(model, name, false, &mut report),
        "qocha" => ocha(model, name, true, &mut report),
        other => Err(CliError::UnknownCommand(other.into())),
    };
    if let Err(e) = result {
        report.fail_with(e);
    }
    report.elapsed = start.elapsed();
    report
}

pub fn is_command(c: &str) -> bool {
    COMMANDS.contains(&c)
}

fn structure<'a>(model: &'a Model, scenario: &str) -> Result<(&'a str, &'a Built), CliError> {
    let spec = &model.scenarios[scenario];
    let name = spec.structure.as_deref().ok_or_else(|| CliError::validation(format!("scenarios.{scenario}"), "missing \"structure\""))?;
    let built = model.structures.get(name).ok_or_else(|| CliError::validation(format!("scenarios.{scenario}"), format!("unknown structure {name:?}")))?;
    Ok((name, built))
}

fn core<T>(context: &str, r: homotopy_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::core(context, e))
}

fn check(model: &Model, scenario: &str, out: &mut RunReport) -> Result<(), CliError> {
    let (_, built) = structure(model, scenario)?;
    let (n, g) = (out.max_arity, out.max_hbar);
    match built {
        Built::AInfinity(a) => out.relation(&certify_a_infinity(&mut a.clone(), n), &a.space, &a.space),
        Built::LInfinity(a) => out.relation(&certify_l_infinity(&mut a.clone(), n), &a.space, &a.space),
        Built::Loop(a) => out.relation(&certify_loop(&mut a.clone(), n, g), &a.space, &a.space),
        Built::Cyclic(c) => {
            let mut a = core("structure", AInfinityAlgebra::new(c.space.clone(), c.maps.clone()))?;
            out.relation(&certify_a_infinity(&mut a, n), &c.space, &c.space);
            let cs = core("structure", CyclicStructure::new(c.space.clone(), c.maps.clone(), c.omega.clone()))?;
            out.relation(&cyclicity_check(&cs, n), &c.space, &c.space);
            if out.status == Status::Ok {
                out.relation(&core("IBL", certify_ibl(c, n, g))?, &c.space, &c.space);
            }
        }
    }
    Ok(())
}

fn map_terms(out: &mut RunReport, object: &str, space: &GradedSpace, maps: &homotopy_core::family::MultilinearFamily) {
    for (&(arity, genus), table) in maps.components() {
        for (w, v) in table.iter() {
            for (i, c) in v.iter() {
                out.records.push(Record::Term {
                    object: object.into(),
                    order: arity,
                    hbar: genus,
                    word: names(space, w),
                    output: Some(space.name(i).into()),
                    value: c.to_text(),
                });
            }
        }
    }
}

fn poly_terms(out: &mut RunReport, object: &str, space: &GradedSpace, order: usize, hbar: usize, p: &WordPoly) {
    for ((g, w), c) in p.iter() {
        out.records.push(Record::Term { object: object.into(), order, hbar: hbar + g, word: names(space, w), output: None, value: c.to_text() });
    }
}

fn transfer(model: &Model, scenario: &str, out: &mut RunReport) -> Result<(), CliError> {
    let (_, built) = structure(model, scenario)?;
    let Built::Loop(alg) = built else {
        return Err(CliError::validation(format!("scenarios.{scenario}"), "transfer needs a loop structure"));
    };
    let ph_name = model.scenarios[scenario].pre_hodge.as_deref().unwrap_or_default();
    let ph = &model.pre_hodge[ph_name];
    let td = core("transfer", decomposition_model(alg, ph, out.max_arity, out.max_hbar))?;
    out.note("projector idempotent", td.diagnostics.idempotent);
    out.note("projector commutes with d", td.diagnostics.commutes_with_d);
    let fp = fixed_point_residual(&alg.space, &alg.interaction(), &ph.h, &td.trees);
    out.relation(&fp, &alg.space, &alg.space);
    out.relation(&verify_decomposition(&td, out.max_arity, out.max_hbar), &alg.space, &alg.space);
    map_terms(out, "transferred", &alg.space, &td.transferred.maps);
    Ok(())
}

/// Basis vectors that are neither hit by `d` nor moved by it.
pub fn harmonic_directions(alg: &LoopHomotopyAlgebra) -> Vec<usize> {
    let d = alg.differential();
    (0..alg.space.dim()).filter(|&i| (0..alg.space.dim()).all(|j| d.get(i, j).is_zero() && d.get(j, i).is_zero())).collect()
}

/// The same loop data with `ω` zeroed between harmonic directions.
pub fn topological_variant(alg: &LoopHomotopyAlgebra) -> Result<LoopHomotopyAlgebra, CliError> {
    let harmonic = harmonic_directions(alg);
    let n = alg.space.dim();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let c = alg.omega.gram().get(i, j);
            if !c.is_zero() && !(harmonic.contains(&i) && harmonic.contains(&j)) {
                pairs.push((i, j, c.clone()));
            }
        }
    }
    let omega = core("topological form", SymplecticData::build(&alg.space, &pairs, true))?;
    core("topological structure", LoopHomotopyAlgebra::new(alg.space.clone(), alg.maps.clone(), omega))
}

fn mc(model: &Model, scenario: &str, flags: &Flags, out: &mut RunReport) -> Result<(), CliError> {
    let (_, built) = structure(model, scenario)?;
    let spec = &model.scenarios[scenario];
    let space = built.space().clone();
    let seed_terms = spec.seed.clone().unwrap_or_default();
    let mut seed = Element::zero();
    for (name, c) in &seed_terms {
        let obj = format!("scenarios.{scenario}.seed");
        let i = space.index_of(name).ok_or_else(|| CliError::validation(&obj, format!("no basis vector {name:?}")))?;
        seed.add_term(i, &model.field.parse(c).map_err(|e| CliError::validation(&obj, e))?);
    }
    let topo;
    let st = match built {
        Built::AInfinity(a) => Structure::AInfinity(a),
        Built::LInfinity(a) => Structure::LInfinity(a),
        Built::Loop(a) if flags.topological => {
            topo = topological_variant(a)?;
            out.note("topological directions", names(&space, &harmonic_directions(a)).join(","));
            Structure::Loop(&topo)
        }
        Built::Loop(a) => Structure::Loop(a),
        Built::Cyclic(_) => return Err(CliError::validation(format!("scenarios.{scenario}"), "mc needs an A∞, L∞ or loop structure")),
    };
    let (order, hbar) = (out.max_order, out.max_hbar);
    match core("mc", mc_solve(st, &seed, order, hbar))? {
        MCOutcome::Solved(phi) => {
            for (&(e, g), p) in &phi.terms {
                poly_terms(out, "phi", &space, e, g, p);
            }
            out.relation(&mc_residual(st, &phi, order, hbar), &space, &space);
        }
        MCOutcome::Obstructed { partial, obstruction: o } => {
            for (&(e, g), p) in &partial.terms {
                poly_terms(out, "phi", &space, e, g, p);
            }
            out.records.push(Record::Obstruction { order: o.order, hbar: o.hbar, rank_d: o.rank_d, rank_augmented: o.rank_augmented });
            poly_terms(out, "obstruction", &space, o.order, o.hbar, &o.residual);
            out.status = out.status.combine(Status::Obstructed);
        }
    }
    Ok(())
}

fn cohomology(model: &Model, scenario: &str, out: &mut RunReport) -> Result<(), CliError> {
    let (_, built) = structure(model, scenario)?;
    let obj = format!("scenarios.{scenario}.complex");
    let requested = model.scenarios[scenario].complex.as_deref();
    let owned;
    let (kind, st, omega) = match built {
        Built::AInfinity(a) => (ComplexKind::Hochschild, Structure::AInfinity(a), None),
        Built::LInfinity(a) => (ComplexKind::ChevalleyEilenberg, Structure::LInfinity(a), None),
        Built::Loop(a) => (ComplexKind::ChevalleyEilenberg, Structure::Loop(a), None),
        Built::Cyclic(c) => {
            owned = core("structure", AInfinityAlgebra::new(c.space.clone(), c.maps.clone()))?;
            (ComplexKind::CyclicHochschild, Structure::AInfinity(&owned), Some(&c.omega))
        }
    };
    let kind = match requested {
        None => kind,
        Some("hochschild") => ComplexKind::Hochschild,
        Some("cyclic_hochschild") => ComplexKind::CyclicHochschild,
        Some("chevalley_eilenberg") => ComplexKind::ChevalleyEilenberg,
        Some(other) => return Err(CliError::validation(obj, format!("unknown complex {other:?}"))),
    };
    let r = core("cohomology", deformation_cohomology(st, kind, out.max_arity, omega))?;
    cohomology_records(out, &r);
    Ok(())
}

pub fn complex_name(kind: ComplexKind) -> &'static str {
    match kind {
        ComplexKind::Hochschild => "hochschild",
        ComplexKind::CyclicHochschild => "cyclic_hochschild",
        ComplexKind::ChevalleyEilenberg => "chevalley_eilenberg",
    }
}

fn cohomology_records(out: &mut RunReport, r: &CohomologyReport) {
    for (&degree, d) in &r.degrees {
        out.records.push(Record::Cohomology {
            complex: complex_name(r.kind).into(),
            degree,
            cochains: d.cochains,
            rank_out: d.rank_out,
            rank_in: d.rank_in,
            dim: d.dim,
        });
    }
    out.note("total dimension", r.total_dim());
}

fn ocha(model: &Model, scenario: &str, quantum: bool, out: &mut RunReport) -> Result<(), CliError> {
    let spec = &model.scenarios[scenario];
    let obj = format!("scenarios.{scenario}");
    let m = &model.morphisms[spec.morphism.as_deref().unwrap_or_default()];
    let Built::Cyclic(open) = &model.structures[&m.open] else { unreachable!("validated at load") };
    let (closed_l, closed_loop) = match &model.structures[&m.closed] {
        Built::Loop(a) => (a.classical(), Some(a)),
        Built::LInfinity(a) => (a.clone(), None),
        _ => unreachable!("validated at load"),
    };
    let mut classical: OCMorphism = m.n.classical();
    for &(k, a) in &spec.solve {
        classical = core("solve", solve_ocha_component(&classical, &closed_l, open, k, a))?;
    }
    for (w, f) in classical.components() {
        for (o, c) in f.orbit_coordinates() {
            out.records.push(Record::Term {
                object: "n".into(),
                order: w.len(),
                hbar: 0,
                word: names(&closed_l.space, w),
                output: Some(names(&open.space, &o).join("")),
                value: c.to_text(),
            });
        }
    }
    if quantum {
        let lp = closed_loop.ok_or_else(|| CliError::validation(&obj, "qocha needs a loop structure on the closed side"))?;
        let n = m.n.clone().with_order(0, classical);
        let frame = core("frame", ClosedFrame::standard(&lp.space, &lp.omega))?;
        let trunc = OchaTruncation::new(out.max_arity, out.max_arity, out.max_hbar);
        out.relation(&core("qocha", check_qocha(&n, lp, open, &frame, trunc))?, &lp.space, &open.space);
        return Ok(());
    }
    let trunc = OchaTruncation::new(out.max_arity, out.max_arity, 0);
    out.relation(&core("ocha", check_ocha(&classical, &closed_l, open, trunc))?, &closed_l.space, &open.space);
    if let Some(p) = &spec.pushforward {
        let mut seed = Element::zero();
        for (name, c) in &p.seed {
            let o = format!("{obj}.pushforward.seed");
            let i = closed_l.space.index_of(name).ok_or_else(|| CliError::validation(&o, format!("no basis vector {name:?}")))?;
            seed.add_term(i, &model.field.parse(c).map_err(|e| CliError::validation(&o, e))?);
        }
        let order = p.max_order.unwrap_or(1);
        let phi = FormalElement::first_order(Flavor::Symmetric, &seed);
        out.relation(&mc_residual(Structure::LInfinity(&closed_l), &phi, order, 0), &closed_l.space, &closed_l.space);
        let (psi, r) = core("pushforward", pushforward_mc(&classical, &closed_l, open, &phi, order, trunc))?;
        for (e, f) in &psi.terms {
            for (o, c) in f.orbit_coordinates() {
                out.records.push(Record::Term { object: "psi".into(), order: *e, hbar: 0, word: names(&open.space, &o), output: None, value: c.to_text() });
            }
        }
        out.relation(&r, &open.space, &open.space);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_bounds_accept_genus_alias_and_blanks() {
        let b = parse_env_bounds(" max_genus = 1 ,, max_order=2").unwrap();
        assert_eq!((b.max_arity, b.max_hbar, b.max_order), (None, Some(1), Some(2)));
        assert!(parse_env_bounds("max_arity=-1").is_err());
        assert_eq!(parse_env_bounds("").unwrap(), Bounds::default());
    }

    #[test]
    fn defaults_fill_unset_bounds() {
        assert_eq!(resolve(&Bounds::default(), None, &Bounds::default()), DEFAULT_BOUNDS);
    }
}
