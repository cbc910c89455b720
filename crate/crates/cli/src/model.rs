//! Validation of a [`WorkspaceFile`] into core objects.

use indexmap::IndexMap;

use homotopy_core::family::MultilinearFamily;
use homotopy_core::ibl::{CyclicCochain, IBLStructure};
use homotopy_core::linalg::Matrix;
use homotopy_core::ocha::QOCMorphism;
use homotopy_core::poly::{Flavor, WordPoly};
use homotopy_core::scalar::Field;
use homotopy_core::structures::{maps_from_potential, AInfinityAlgebra, LInfinityAlgebra, LoopHomotopyAlgebra};
use homotopy_core::symplectic::SymplecticData;
use homotopy_core::transfer::{build_pre_hodge, Compatibility, PreHodge};
use homotopy_core::{Element, GradedSpace, Scalar};

use crate::error::CliError;
use crate::workspace::*;

pub const COMMANDS: [&str; 6] = ["check", "transfer", "mc", "cohomology", "ocha", "qocha"];

#[derive(Debug, Clone)]
pub enum Built {
    AInfinity(AInfinityAlgebra),
    LInfinity(LInfinityAlgebra),
    /// A cyclic A∞ algebra, stored as the involutive Lie bialgebra it induces.
    Cyclic(IBLStructure),
    Loop(LoopHomotopyAlgebra),
}

impl Built {
    pub fn space(&self) -> &GradedSpace {
        match self {
            Built::AInfinity(a) => &a.space,
            Built::LInfinity(a) => &a.space,
            Built::Cyclic(a) => &a.space,
            Built::Loop(a) => &a.space,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltMorphism {
    pub closed: String,
    pub open: String,
    pub n: QOCMorphism,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub field: Field,
    pub spaces: IndexMap<String, GradedSpace>,
    pub forms: IndexMap<String, SymplecticData>,
    pub structures: IndexMap<String, Built>,
    pub pre_hodge: IndexMap<String, PreHodge>,
    pub morphisms: IndexMap<String, BuiltMorphism>,
    pub scenarios: IndexMap<String, ScenarioSpec>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Accept degenerate pairings.
    pub topological: bool,
}

fn lookup<'a, T>(map: &'a IndexMap<String, T>, name: &str, object: &str, what: &str) -> Result<&'a T, CliError> {
    map.get(name).ok_or_else(|| CliError::validation(object, format!("unknown {what} {name:?}")))
}

fn parse_field(text: Option<&str>) -> Result<Field, CliError> {
    match text.map(str::trim) {
        None | Some("rational") => Ok(Field::Rational),
        Some(t) => {
            let p = t.strip_prefix("mod").map(str::trim).and_then(|p| p.parse::<u64>().ok());
            match p {
                Some(p) if p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) => Ok(Field::Prime(p)),
                _ => Err(CliError::validation("field", format!("expected \"rational\" or \"mod <prime>\", got {t:?}"))),
            }
        }
    }
}

struct Ctx {
    field: Field,
}

impl Ctx {
    fn scalar(&self, text: &str, object: &str) -> Result<Scalar, CliError> {
        self.field.parse(text).map_err(|e| CliError::validation(object, e))
    }

    fn index(&self, space: &GradedSpace, name: &str, object: &str) -> Result<usize, CliError> {
        space.index_of(name).ok_or_else(|| CliError::validation(object, format!("no basis vector {name:?}")))
    }

    fn word(&self, space: &GradedSpace, names: &[String], object: &str) -> Result<Vec<usize>, CliError> {
        names.iter().map(|n| self.index(space, n, object)).collect()
    }

    fn element(&self, space: &GradedSpace, terms: &IndexMap<String, String>, object: &str) -> Result<Element, CliError> {
        let mut e = Element::zero();
        for (name, c) in terms {
            e.add_term(self.index(space, name, object)?, &self.scalar(c, object)?);
        }
        Ok(e)
    }
}

impl Model {
    pub fn load(file: &WorkspaceFile, opts: LoadOptions) -> Result<Model, CliError> {
        let cx = Ctx { field: parse_field(file.field.as_deref())? };
        let mut spaces = IndexMap::new();
        for (name, basis) in &file.spaces {
            let s = GradedSpace::new(basis.iter().map(|(n, d)| (n.clone(), *d))).map_err(|e| CliError::validation(format!("spaces.{name}"), e))?;
            spaces.insert(name.clone(), s);
        }
        let mut forms = IndexMap::new();
        let mut form_space = IndexMap::new();
        for (name, f) in &file.forms {
            let obj = format!("forms.{name}");
            let space = lookup(&spaces, &f.space, &obj, "space")?;
            let mut pairs = Vec::new();
            for (k, (a, b, c)) in f.entries.iter().enumerate() {
                let o = format!("{obj}.entries[{k}]");
                pairs.push((cx.index(space, a, &o)?, cx.index(space, b, &o)?, cx.scalar(c, &o)?));
            }
            let allow = opts.topological || f.degenerate == Some(true);
            let w = SymplecticData::build(space, &pairs, allow).map_err(|e| CliError::validation(&obj, e))?;
            forms.insert(name.clone(), w);
            form_space.insert(name.clone(), f.space.clone());
        }
        let mut structures = IndexMap::new();
        for (name, s) in &file.structures {
            structures.insert(name.clone(), build_structure(&cx, name, s, &spaces, &forms, &form_space)?);
        }
        let mut pre_hodge = IndexMap::new();
        for (name, p) in &file.pre_hodge {
            let obj = format!("pre_hodge.{name}");
            let alg = match lookup(&structures, &p.structure, &obj, "structure")? {
                Built::Loop(a) => a,
                _ => return Err(CliError::validation(&obj, "pre-Hodge data needs a loop structure")),
            };
            let n = alg.space.dim();
            let mut h = Matrix::zeros(n, n);
            for (k, (input, output, c)) in p.entries.iter().enumerate() {
                let o = format!("{obj}.entries[{k}]");
                let (i, j) = (cx.index(&alg.space, input, &o)?, cx.index(&alg.space, output, &o)?);
                h.set(j, i, cx.scalar(c, &o)?);
            }
            let compat = match p.compatibility {
                Some(CompatibilitySpec::SelfAdjoint) => Compatibility::SelfAdjoint,
                _ => Compatibility::AntiSelfAdjoint,
            };
            let ph = build_pre_hodge(&alg.space, &alg.omega, h, compat).map_err(|e| CliError::validation(&obj, e))?;
            pre_hodge.insert(name.clone(), ph);
        }
        let mut morphisms = IndexMap::new();
        for (name, m) in &file.morphisms {
            morphisms.insert(name.clone(), build_morphism(&cx, name, m, &structures)?);
        }
        for (name, s) in &file.scenarios {
            check_scenario(name, s, &structures, &pre_hodge, &morphisms)?;
        }
        Ok(Model { field: cx.field, spaces, forms, structures, pre_hodge, morphisms, scenarios: file.scenarios.clone() })
    }
}

fn build_structure(
    cx: &Ctx,
    name: &str,
    s: &StructureSpec,
    spaces: &IndexMap<String, GradedSpace>,
    forms: &IndexMap<String, SymplecticData>,
    form_space: &IndexMap<String, String>,
) -> Result<Built, CliError> {
    let obj = format!("structures.{name}");
    let space = lookup(spaces, &s.space, &obj, "space")?.clone();
    let omega = match &s.form {
        Some(f) => {
            let w = lookup(forms, f, &obj, "form")?;
            if form_space[f] != s.space {
                return Err(CliError::validation(&obj, format!("form {f:?} lives on another space")));
            }
            Some(w.clone())
        }
        None => None,
    };
    let flavor = match s.kind {
        StructureKind::AInfinity | StructureKind::CyclicAInfinity => Flavor::Tensor,
        _ => Flavor::Symmetric,
    };
    let mut maps = MultilinearFamily::new(flavor, 1);
    if !s.potential.is_empty() {
        let w = match (s.kind, &omega) {
            (StructureKind::Loop, Some(w)) => w,
            _ => return Err(CliError::validation(&obj, "a potential needs a loop structure with a form")),
        };
        let mut pot = WordPoly::zero(Flavor::Symmetric);
        for (k, t) in s.potential.iter().enumerate() {
            let o = format!("{obj}.potential[{k}]");
            pot.add_term(&space, t.genus.unwrap_or(0), cx.word(&space, &t.word, &o)?, &cx.scalar(&t.coeff, &o)?);
        }
        maps = maps_from_potential(&space, w, &pot).map_err(|e| CliError::validation(format!("{obj}.potential"), e))?;
    }
    for (k, m) in s.maps.iter().enumerate() {
        let o = format!("{obj}.maps[{k}]");
        let genus = m.genus.unwrap_or(0);
        if genus > 0 && s.kind != StructureKind::Loop {
            return Err(CliError::validation(&o, "only loop structures have genus > 0 maps"));
        }
        let inputs = cx.word(&space, &m.inputs, &o)?;
        let value = cx.element(&space, &m.output, &o)?;
        let existing = maps.eval(&space, (inputs.len(), genus), &inputs);
        if !existing.is_zero() && existing != value {
            return Err(CliError::validation(&o, "conflicts with an earlier entry under graded symmetry"));
        }
        if existing.is_zero() {
            maps.insert(&space, genus, inputs, &value).map_err(|e| CliError::validation(&o, e))?;
        }
    }
    let need_form = |kind: &str| omega.clone().ok_or_else(|| CliError::validation(&obj, format!("{kind} structures need a form")));
    let built = match s.kind {
        StructureKind::AInfinity => Built::AInfinity(AInfinityAlgebra::new(space, maps).map_err(|e| CliError::validation(&obj, e))?),
        StructureKind::LInfinity => Built::LInfinity(LInfinityAlgebra::new(space, maps).map_err(|e| CliError::validation(&obj, e))?),
        StructureKind::CyclicAInfinity => {
            Built::Cyclic(IBLStructure::new(space, maps, need_form("cyclic")?).map_err(|e| CliError::validation(&obj, e))?)
        }
        StructureKind::Loop => Built::Loop(LoopHomotopyAlgebra::new(space, maps, need_form("loop")?).map_err(|e| CliError::validation(&obj, e))?),
    };
    Ok(built)
}

fn build_morphism(cx: &Ctx, name: &str, m: &MorphismSpec, structures: &IndexMap<String, Built>) -> Result<BuiltMorphism, CliError> {
    let obj = format!("morphisms.{name}");
    let closed = match lookup(structures, &m.closed, &obj, "structure")? {
        Built::Loop(a) => &a.space,
        Built::LInfinity(a) => &a.space,
        _ => return Err(CliError::validation(&obj, "the closed side must be an L∞ or loop structure")),
    };
    let Built::Cyclic(open) = lookup(structures, &m.open, &obj, "structure")? else {
        return Err(CliError::validation(&obj, "the open side must be a cyclic A∞ structure"));
    };
    let mut n = QOCMorphism::zero();
    for (k, c) in m.components.iter().enumerate() {
        let o = format!("{obj}.components[{k}]");
        let word = cx.word(closed, &c.inputs, &o)?;
        let mut f = CyclicCochain::zero();
        for t in &c.value {
            let w = cx.word(&open.space, &t.orbit, &o)?;
            let orbit = CyclicCochain::orbit_sum(&open.space, &w)
                .ok_or_else(|| CliError::validation(&o, format!("orbit {:?} vanishes by symmetry", t.orbit)))?;
            f.add_scaled(&orbit, &cx.scalar(&t.coeff, &o)?);
        }
        n.insert(c.hbar.unwrap_or(0), closed, open, word, &f).map_err(|e| CliError::validation(&o, e))?;
    }
    Ok(BuiltMorphism { closed: m.closed.clone(), open: m.open.clone(), n })
}

fn check_scenario(
    name: &str,
    s: &ScenarioSpec,
    structures: &IndexMap<String, Built>,
    pre_hodge: &IndexMap<String, PreHodge>,
    morphisms: &IndexMap<String, BuiltMorphism>,
) -> Result<(), CliError> {
    let obj = format!("scenarios.{name}");
    if !COMMANDS.contains(&s.command.as_str()) {
        return Err(CliError::validation(&obj, format!("unknown command {:?}", s.command)));
    }
    let needs_structure = matches!(s.command.as_str(), "check" | "transfer" | "mc" | "cohomology");
    match &s.structure {
        Some(st) => {
            lookup(structures, st, &obj, "structure")?;
        }
        None if needs_structure => return Err(CliError::validation(&obj, "missing \"structure\"")),
        None => {}
    }
    if let Some(p) = &s.pre_hodge {
        lookup(pre_hodge, p, &obj, "pre_hodge")?;
    } else if s.command == "transfer" {
        return Err(CliError::validation(&obj, "missing \"pre_hodge\""));
    }
    if let Some(m) = &s.morphism {
        lookup(morphisms, m, &obj, "morphism")?;
    } else if matches!(s.command.as_str(), "ocha" | "qocha") {
        return Err(CliError::validation(&obj, "missing \"morphism\""));
    }
    if s.command == "mc" && s.seed.is_none() {
        return Err(CliError::validation(&obj, "missing \"seed\""));
    }
    Ok(())
}
