use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::{One, Zero};
use serde_json::Value;

use homotopy_cli::model::Built;
use homotopy_cli::run::harmonic_directions;
use homotopy_cli::*;
use homotopy_core::ibl::{cochain_differential, orbit_basis};
use homotopy_core::ocha::{check_ocha, check_qocha, solve_ocha_component, ClosedFrame, OchaTruncation};
use homotopy_core::{Element, Scalar};

use crate::oracle::{apply, mat_mul, q, rank, Raw, Trees, Vector, Q};
use crate::{bundled, scenarios};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn machine(flags: Flags, names: &[&str]) -> Options {
    Options { flags, format: Format::Machine, scenarios: names.iter().map(|s| s.to_string()).collect(), ..Options::default() }
}

fn lines(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).expect("machine output is JSON lines")).collect()
}

fn of_kind<'a>(v: &'a [Value], record: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
    v.iter().filter(move |x| x["record"] == record)
}

fn failing_arities(v: &[Value]) -> BTreeSet<usize> {
    of_kind(v, "bucket").filter(|b| b["residuals"].as_u64() != Some(0)).map(|b| b["arity"].as_u64().unwrap() as usize).collect()
}

fn file(name: &str) -> WorkspaceFile {
    WorkspaceFile::read(&scenarios().join(name)).unwrap()
}

fn model(name: &str) -> Model {
    Model::load(&file(name), LoadOptions::default()).unwrap()
}

fn temp(name: &str, f: &WorkspaceFile) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homotopy-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, f.to_canonical_string()).unwrap();
    p
}

fn arity4() -> Flags {
    Flags { bounds: Bounds { max_arity: Some(4), ..Bounds::default() }, ..Flags::default() }
}

pub fn algebras() -> Outcome {
    let path = scenarios().join("algebras.json");
    let start = Instant::now();
    let (out, code) = execute("check", &path, &machine(arity4(), &[]));
    let secs = start.elapsed().as_secs_f64();
    let v = lines(&out);
    ensure(code == 0 && failing_arities(&v).is_empty(), || format!("exit {code}"))?;
    let max = of_kind(&v, "bucket").map(|b| b["arity"].as_u64().unwrap()).max();
    ensure(max == Some(4), || format!("buckets only reach {max:?}"))?;
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;

    let f = file("algebras.json");
    ensure(Raw::from_file(&f, "dga").a_infinity_failures(4).is_empty(), || "oracle rejects dga".into())?;
    ensure(Raw::from_file(&f, "so3").l_infinity_failures(4).is_empty(), || "oracle rejects so3".into())?;

    let corruptions = [("dga", "dga_check", ["1", "1"], "1", "2"), ("so3", "so3_check", ["e1", "e2"], "e1", "1")];
    for (structure, scenario, inputs, target, value) in corruptions {
        let mut f = file("algebras.json");
        let entry = f.structures[structure].maps.iter_mut().find(|m| m.inputs == inputs).unwrap();
        entry.output.insert(target.into(), value.into());
        let oracle = {
            let raw = Raw::from_file(&f, structure);
            if structure == "dga" { raw.a_infinity_failures(4) } else { raw.l_infinity_failures(4) }
        };
        let p = temp(&format!("{structure}.json"), &f);
        let (out, code) = execute("check", &p, &machine(arity4(), &[scenario]));
        let cli = failing_arities(&lines(&out));
        ensure(code == 2 && cli == oracle && oracle == BTreeSet::from([3]), || format!("{structure}: cli {cli:?} oracle {oracle:?} exit {code}"))?;
    }
    Ok(format!("check {secs:.2}s; corruptions fail exactly at arity 3"))
}

fn matrix(raw: &Raw, entries: impl IntoIterator<Item = (usize, usize, Q)>) -> Vec<Vector> {
    let mut m = vec![vec![Q::zero(); raw.dim()]; raw.dim()];
    for (out, inp, c) in entries {
        m[out][inp] += c;
    }
    m
}

/// `(h, P = 1 + dh + hd)` built from the workspace entries alone.
fn homotopy_data(f: &WorkspaceFile, raw: &Raw, pre_hodge: &str) -> (Vec<Vector>, Vec<Vector>) {
    let h = matrix(raw, f.pre_hodge[pre_hodge].entries.iter().map(|(i, o, c)| (raw.index(o), raw.index(i), q(c))));
    let d: Vec<Vector> = (0..raw.dim()).map(|i| raw.eval_word(0, &[i])).collect();
    let d = matrix(raw, (0..raw.dim()).flat_map(|j| (0..raw.dim()).map(move |i| (i, j))).map(|(i, j)| (i, j, d[j][i].clone())));
    let dh = mat_mul(&d, &h);
    let hd = mat_mul(&h, &d);
    let p = (0..raw.dim())
        .map(|i| (0..raw.dim()).map(|j| &dh[i][j] + &hd[i][j] + if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    (h, p)
}

fn sorted_words(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|w: Vec<usize>| (w.last().copied().unwrap_or(0)..dim).map(move |i| [w.clone(), vec![i]].concat())).collect();
    }
    out
}

pub fn transfer_trees() -> Outcome {
    let f = file("loop.json");
    let start = Instant::now();
    let r = run_scenario(&model("loop.json"), "mixed_transfer", None, &Flags::default(), &Bounds::default());
    let secs = start.elapsed().as_secs_f64();
    ensure(r.exit_code() == 0, || format!("exit {}", r.exit_code()))?;
    let mut got: HashMap<(Vec<String>, String), Q> = HashMap::new();
    for x in &r.records {
        if let Record::Term { object, hbar: 0, word, output: Some(o), value, .. } = x {
            if object == "transferred" && word.len() >= 2 {
                got.insert((word.clone(), o.clone()), q(value));
            }
        }
    }
    let raw = Raw::from_file(&f, "mixed");
    let (h, p) = homotopy_data(&f, &raw, "contract_x");
    let mut trees = Trees::new(&raw, &h);
    let mut compared = 0;
    for n in 2..=r.max_arity {
        for w in sorted_words(raw.dim(), n) {
            let expected = apply(&p, &trees.t(&w));
            let names: Vec<String> = w.iter().map(|&i| raw.names[i].clone()).collect();
            for (j, e) in expected.iter().enumerate() {
                let g = got.remove(&(names.clone(), raw.names[j].clone())).unwrap_or_else(Q::zero);
                ensure(&g == e, || format!("{names:?} -> {}: cli {g} oracle {e}", raw.names[j]))?;
                compared += usize::from(!e.is_zero());
            }
        }
    }
    ensure(got.is_empty(), || format!("unexpected terms {:?}", got.keys().collect::<Vec<_>>()))?;
    ensure(compared > 0 && secs < 30.0, || format!("{compared} nonzero terms in {secs:.2}s"))?;
    Ok(format!("{compared} nonzero coefficients through arity {}", r.max_arity))
}

pub fn fixed_point() -> Outcome {
    let mut buckets = 0;
    for p in bundled() {
        let m = Model::load(&WorkspaceFile::read(&p).unwrap(), LoadOptions::default()).unwrap();
        for (name, s) in &m.scenarios {
            if s.command != "transfer" {
                continue;
            }
            let r = run_scenario(&m, name, None, &Flags::default(), &Bounds::default());
            for x in &r.records {
                if let Record::Bucket { relation, residuals, arity, hbar, .. } = x {
                    if relation == "tree fixed point" {
                        buckets += 1;
                        ensure(*residuals == 0, || format!("{name}: bucket ({arity}, ħ^{hbar}) has {residuals} residuals"))?;
                    }
                }
            }
        }
    }
    ensure(buckets > 0, || "no fixed-point buckets".into())?;
    Ok(format!("{buckets} buckets"))
}

pub fn mc_dichotomy() -> Outcome {
    let m = model("loop.json");
    let r = run_scenario(&m, "cubic_mc", None, &Flags::default(), &Bounds::default());
    ensure(r.exit_code() == 2, || format!("exit {}", r.exit_code()))?;
    let (order, hbar, rd, ra) = r
        .records
        .iter()
        .find_map(|x| match x {
            Record::Obstruction { order, hbar, rank_d, rank_augmented } => Some((*order, *hbar, *rank_d, *rank_augmented)),
            _ => None,
        })
        .ok_or("no obstruction record")?;
    ensure(hbar == 1 && ra > rd, || format!("obstruction at ({order}, {hbar}) ranks {rd}/{ra}"))?;
    let f = file("loop.json");
    let outputs: BTreeSet<&str> = f.structures["cubic"].maps.iter().flat_map(|e| e.output.keys().map(String::as_str)).collect();
    let witness = r.records.iter().any(|x| matches!(x, Record::Term { object, word, .. } if object == "obstruction" && word.iter().any(|l| !outputs.contains(l.as_str()))));
    ensure(witness, || "obstruction class lies in the span of map outputs".into())?;

    let flags = Flags { bounds: Bounds { max_order: Some(3), ..Bounds::default() }, topological: true };
    let (out, code) = execute("mc", &scenarios().join("loop.json"), &machine(flags, &["cubic_mc"]));
    let v = lines(&out);
    let mc: Vec<&Value> = of_kind(&v, "bucket").filter(|b| b["relation"] == "Maurer-Cartan").collect();
    ensure(code == 0 && mc.iter().all(|b| b["residuals"] == 0) && mc.iter().any(|b| b["arity"] == 3), || format!("topological exit {code}"))?;

    let raw = Raw::from_file(&f, "cubic");
    let d: Vec<Vector> = (0..raw.dim()).map(|i| raw.eval_word(0, &[i])).collect();
    let h_dim = raw.dim() - 2 * rank(&d);
    let Built::Loop(alg) = &m.structures["cubic"] else { return Err("cubic is not a loop structure".into()) };
    let harmonic = harmonic_directions(alg).len();
    ensure(h_dim == 2 && harmonic == h_dim, || format!("H(d) {h_dim}, harmonic {harmonic}"))?;
    Ok(format!("obstructed at ε^{order} ħ^{hbar} with rank {rd} < {ra}; topological solves to order 3; dim H(d) = 2"))
}

pub fn ocha_coherence() -> Outcome {
    let m = model("open_closed.json");
    let mor = &m.morphisms["first_order"];
    let (Built::Cyclic(open), Built::Loop(lp)) = (&m.structures[&mor.open], &m.structures[&mor.closed]) else {
        return Err("unexpected structure kinds".into());
    };
    let closed = lp.classical();
    let n = solve_ocha_component(&mor.n.classical(), &closed, open, 2, 2).map_err(|e| e.to_string())?;
    let t0 = OchaTruncation::new(2, 2, 0);
    let classical = check_ocha(&n, &closed, open, t0).map_err(|e| e.to_string())?;
    ensure(classical.passes(), || format!("OCHA fails at {:?}", classical.failing()))?;
    let qn = mor.n.clone().with_order(0, n);
    let standard = ClosedFrame::standard(&lp.space, &lp.omega).map_err(|e| e.to_string())?;
    let limit = check_qocha(&qn, lp, open, &standard, t0).map_err(|e| e.to_string())?;
    ensure(limit.buckets == classical.buckets, || "ħ⁰ QOCHA buckets differ from OCHA".into())?;

    let s = |i: i64| Scalar::from(i);
    let idx = |name: &str| lp.space.index_of(name).unwrap();
    let (c, b, e, f) = (idx("c"), idx("b"), idx("e"), idx("f"));
    let basis = vec![
        Element::from_terms([(c, s(2)), (e, s(1))]),
        Element::from_terms([(b, s(1)), (f, s(-3))]),
        Element::from_terms([(c, s(1)), (e, s(1))]),
        Element::from_terms([(f, s(5))]),
    ];
    let other = ClosedFrame::from_basis(&lp.space, &lp.omega, basis).map_err(|e| e.to_string())?;
    let t1 = OchaTruncation::new(2, 2, 1);
    let a = check_qocha(&qn, lp, open, &standard, t1).map_err(|e| e.to_string())?;
    let z = check_qocha(&qn, lp, open, &other, t1).map_err(|e| e.to_string())?;
    ensure(a.buckets == z.buckets, || "QOCHA report depends on the closed frame".into())?;
    let sewing = a.buckets.iter().filter(|(k, _)| k.hbar >= 1).map(|(_, r)| r.len()).sum::<usize>();
    ensure(sewing > 0, || "ħ¹ buckets are vacuous".into())?;
    Ok(format!("{} OCHA buckets; frames agree on {} buckets with {sewing} ħ¹ residuals", classical.buckets.len(), a.buckets.len()))
}

pub fn pushforward() -> Outcome {
    let (out, code) = execute("ocha", &scenarios().join("open_closed.json"), &machine(Flags::default(), &["ocha_manufactured"]));
    let v = lines(&out);
    ensure(code == 0, || format!("exit {code}"))?;
    let open: Vec<&Value> = of_kind(&v, "bucket").filter(|b| b["relation"] == "open Maurer-Cartan").collect();
    ensure(!open.is_empty() && open.iter().all(|b| b["residuals"] == 0), || "open MC residuals".into())?;
    let psi = of_kind(&v, "term").filter(|t| t["object"] == "psi" && q(t["value"].as_str().unwrap()) != Q::zero()).count();
    ensure(psi > 0, || "ψ vanishes".into())?;
    Ok(format!("{} open buckets clean; ψ has {psi} nonzero coordinates", open.len()))
}

fn cyclic_dims(m: &Model, structure: &str, max_arity: usize) -> (BTreeMap<i64, (usize, usize)>, bool) {
    let Built::Cyclic(ibl) = &m.structures[structure] else { unreachable!() };
    let mut basis = Vec::new();
    for n in 1..=max_arity + 1 {
        for f in orbit_basis(&ibl.space, n) {
            let deg = f.degree(&ibl.space, &ibl.omega).unwrap_or(0);
            basis.push((deg, f));
        }
    }
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (_, f) in &basis {
        for w in f.orbit_coordinates().into_keys() {
            let k = index.len();
            index.entry(w).or_insert(k);
        }
    }
    let coords = |f: &homotopy_core::ibl::CyclicCochain| {
        let mut v = vec![Q::zero(); index.len()];
        for (w, c) in f.orbit_coordinates() {
            if let Some(&i) = index.get(&w) {
                v[i] = q(&c.to_text());
            }
        }
        v
    };
    let source: Vec<Vector> = basis.iter().map(|(_, f)| coords(f)).collect();
    let image: Vec<Vector> = basis.iter().map(|(_, f)| coords(&cochain_differential(ibl, f).unwrap())).collect();
    // Each orbit basis element has a single coordinate; read `d` in that basis.
    let pivot: Vec<(usize, Q)> = source.iter().map(|v| v.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).unwrap()).collect();
    let owner: HashMap<usize, usize> = pivot.iter().enumerate().map(|(k, (i, _))| (*i, k)).collect();
    let mut d = vec![vec![Q::zero(); basis.len()]; basis.len()];
    for (k, img) in image.iter().enumerate() {
        for (i, c) in img.iter().enumerate() {
            if !c.is_zero() {
                let j = owner[&i];
                d[j][k] = c / &pivot[j].1;
            }
        }
    }
    let square_zero = mat_mul(&d, &d).iter().all(|r| r.iter().all(Zero::is_zero));
    let mut by: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, (deg, _)) in basis.iter().enumerate() {
        by.entry(*deg).or_default().push(k);
    }
    let pick = |ks: &[usize]| -> Vec<Vector> { ks.iter().map(|&k| image[k].clone()).collect() };
    let mut out = BTreeMap::new();
    for (deg, ks) in &by {
        let r_out = rank(&pick(ks));
        let r_in = by.get(&(deg - 1)).map_or(0, |p| rank(&pick(p)));
        out.insert(*deg, (ks.len(), ks.len() - r_out - r_in));
    }
    (out, square_zero)
}

pub fn cohomology() -> Outcome {
    let mut checked = Vec::new();
    for p in bundled() {
        let f = WorkspaceFile::read(&p).unwrap();
        let m = Model::load(&f, LoadOptions::default()).unwrap();
        for (name, s) in &m.scenarios {
            if s.command != "cohomology" {
                continue;
            }
            let r = run_scenario(&m, name, None, &Flags::default(), &Bounds::default());
            let got: BTreeMap<i64, (usize, usize)> = r
                .records
                .iter()
                .filter_map(|x| match x {
                    Record::Cohomology { degree, cochains, dim, .. } => Some((*degree, (*cochains, *dim))),
                    _ => None,
                })
                .collect();
            let structure = s.structure.as_deref().unwrap();
            let (expected, square_zero) = match &m.structures[structure] {
                Built::Cyclic(_) => cyclic_dims(&m, structure, r.max_arity),
                _ => {
                    let raw = Raw::from_file(&f, structure);
                    let degrees: Vec<i64> = f.spaces[&f.structures[structure].space].iter().map(|(_, d)| *d).collect();
                    crate::cochains::cohomology(&raw, &degrees, r.max_arity)
                }
            };
            ensure(square_zero, || format!("{name}: d² ≠ 0"))?;
            ensure(got == expected, || format!("{name}: cli {got:?} oracle {expected:?}"))?;
            checked.push(format!("{name} H={}", expected.values().map(|x| x.1).sum::<usize>()));
        }
    }
    ensure(!checked.is_empty(), || "no cohomology scenarios".into())?;
    Ok(checked.join(", "))
}

pub fn determinism() -> Outcome {
    let opts = Options { format: Format::Machine, ..Options::default() };
    let files = bundled();
    for p in &files {
        let serial = execute("suite", p, &opts);
        ensure(serial == execute("suite", p, &opts), || format!("{} differs between runs", name(p)))?;
        ensure(serial == execute("suite", p, &Options { parallel: true, ..opts.clone() }), || format!("{} differs in parallel", name(p)))?;
    }
    Ok(format!("{} workspaces", files.len()))
}

fn name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}
