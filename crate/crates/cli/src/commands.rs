use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use qelie_core::algebra::{
    center, is_nilpotent, is_solvable, is_unimodular, is_unimodular_exact, jacobi_residual, jacobi_residual_exact,
    nilradical_solvable, series, unimodularity_defect, SeriesKind, SeriesReport, SeriesVerdict, Subspace,
};
use qelie_core::catalog::{from_family, tables_report, CatalogEntry};
use qelie_core::curvature::{self, default_split, ricci_distance, ricci_oracle, scalar_and_flatness, Formula};
use qelie_core::document::{parse_algebra, AlgebraDocument};
use qelie_core::lattice::{family_obstruction, rational_structure_check, ObstructedFamily, RationalityReport};
use qelie_core::qe::{
    kirillov_frame, qe_solve, verify_heisenberg_extension_form, verify_nilpotent_structure_theorem,
    verify_solvable_conditions, verify_two_eigenvalue_structure, VerdictReport,
};
use qelie_core::{MetricLieAlgebra, Scalar};

use crate::format::{self, num};
use crate::{Input, Outcome, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};

type Loaded = (AlgebraDocument, MetricLieAlgebra);

fn load(path: &Path) -> Result<Loaded, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::error(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_algebra(&text).map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let l = doc.to_algebra().map_err(|e| Outcome::error(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    Ok((doc, l))
}

fn emit(json: bool, value: Value, text: String) -> String {
    if json {
        format::json(value)
    } else {
        text
    }
}

/// Runs `f` on one file, or on every `*.json` in a directory with `--all`.
/// The exit code is the worst one seen.
pub(crate) fn batch(input: &Input, json: bool, f: impl Fn(&Path) -> Outcome) -> Outcome {
    if !input.all {
        return f(&input.path);
    }
    let entries = match std::fs::read_dir(&input.path) {
        Ok(e) => e,
        Err(e) => return Outcome::error(EXIT_USAGE, format!("cannot read directory {}: {e}", input.path.display())),
    };
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut out = Outcome::default();
    let mut items = Vec::new();
    for p in &files {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let one = f(p);
        out.code = out.code.max(one.code);
        out.stderr.push_str(&one.stderr);
        if json {
            let report = serde_json::from_str::<Value>(&one.stdout).unwrap_or(Value::Null);
            items.push(json!({"file": name, "exit_code": one.code, "report": report}));
        } else {
            let _ = writeln!(out.stdout, "== {name} ==");
            out.stdout.push_str(&one.stdout);
        }
    }
    if json {
        out.stdout = format::json(Value::Array(items));
    }
    out
}

fn verdict_text(v: &SeriesVerdict) -> String {
    match v {
        SeriesVerdict::Nilpotent { step } => format!("nilpotent, step {step}"),
        SeriesVerdict::Solvable { length } => format!("solvable, length {length}"),
        SeriesVerdict::Neither => "not solvable".into(),
    }
}

fn dims_text(r: &SeriesReport) -> String {
    r.dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn header(command: &str, doc: &AlgebraDocument, l: &MetricLieAlgebra) -> String {
    let mode = if l.structure().is_exact() { "exact" } else { "float" };
    format!("{command}: {} (dim {}, {mode})\n", doc.name, l.dim())
}

pub fn check(path: &Path, tol: f64, json: bool) -> Outcome {
    let (doc, l) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let (jac_value, jac_literal, jac_ok) = match jacobi_residual_exact(&l) {
        Some(r) => {
            let s = Scalar::Exact(r);
            (s.to_f64(), s.to_literal(), s.is_zero())
        }
        None => {
            let r = jacobi_residual(&l);
            (r, num(r), r <= tol)
        }
    };
    let unimodular = is_unimodular_exact(&l).unwrap_or_else(|| is_unimodular(&l, tol));
    let defect = unimodularity_defect(&l);
    let lc = series(&l, SeriesKind::LowerCentral, tol);
    let der = series(&l, SeriesKind::Derived, tol);
    let z = center(&l, tol);
    let nil: Result<Subspace, String> = match lc.verdict {
        SeriesVerdict::Nilpotent { .. } => Ok(Subspace::full(l.dim())),
        _ => match der.verdict {
            SeriesVerdict::Solvable { .. } => nilradical_solvable(&l, tol).map_err(|e| e.to_string()),
            _ => Err("algebra is not solvable".into()),
        },
    };

    let mut t = header("check", &doc, &l);
    let _ = writeln!(t, "jacobi:         {}  residual {jac_literal}", pass(jac_ok));
    let _ = writeln!(t, "unimodular:     {}  defect {}", yes(unimodular), num(defect));
    let _ = writeln!(t, "lower central:  {}  ({})", dims_text(&lc), verdict_text(&lc.verdict));
    let _ = writeln!(t, "derived:        {}  ({})", dims_text(&der), verdict_text(&der.verdict));
    let _ = writeln!(t, "center:         dim {}", z.dim());
    for v in z.vectors() {
        let _ = writeln!(t, "  {}", format::vector(&v));
    }
    match &nil {
        Ok(n) => {
            let _ = writeln!(t, "nilradical:     dim {}", n.dim());
        }
        Err(e) => {
            let _ = writeln!(t, "nilradical:     unavailable ({e})");
        }
    }
    let value = json!({
        "command": "check",
        "name": doc.name,
        "dim": l.dim(),
        "exact": l.structure().is_exact(),
        "jacobi": {"passed": jac_ok, "residual": jac_value, "residual_literal": jac_literal},
        "unimodular": {"value": unimodular, "defect": defect},
        "lower_central": {"dims": lc.dims(), "verdict": lc.verdict},
        "derived": {"dims": der.dims(), "verdict": der.verdict},
        "center": z,
        "nilradical": match &nil {
            Ok(n) => json!(n),
            Err(e) => json!({"error": e}),
        },
    });
    let code = if jac_ok { EXIT_OK } else { EXIT_DOMAIN };
    Outcome::with_code(code, emit(json, value, t))
}

fn formula_name(f: Formula) -> &'static str {
    match f {
        Formula::Oracle => "oracle",
        Formula::Nilpotent => "nilpotent",
        Formula::Solvable => "solvable",
        Formula::Standard => "standard",
    }
}

pub fn ricci(path: &Path, formula: Formula, tol: f64, json: bool) -> Outcome {
    let (doc, l) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let oracle = match ricci_oracle(&l, tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(EXIT_DOMAIN, e),
    };
    let rep = match curvature::ricci(&l, formula, tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(EXIT_DOMAIN, format!("{} formula: {e}", formula_name(formula))),
    };
    let distance = ricci_distance(&oracle, &rep);
    let scale = oracle.ricci.amax().max(1.0);
    let agree = distance <= tol * scale;

    let mut t = header("ricci", &doc, &l);
    let _ = writeln!(t, "formula:        {} ({})", formula_name(formula), rep.provenance.as_str());
    let _ = writeln!(t, "eigenvalues:    {}", format::list(&rep.eigenvalues));
    let _ = writeln!(t, "scalar:         {}", num(rep.scalar));
    let _ = writeln!(t, "flat:           {}  (curvature norm {})", yes(rep.flat), num(rep.curvature_norm));
    let _ = writeln!(t, "ricci form:");
    t.push_str(&format::matrix(&rep.ricci, 2));
    let _ = writeln!(t, "oracle distance: {}  tolerance {}  {}", num(distance), num(tol * scale), if agree { "agree" } else { "DISAGREE" });
    let value = json!({
        "command": "ricci",
        "name": doc.name,
        "dim": l.dim(),
        "formula": formula_name(formula),
        "report": rep,
        "oracle_distance": distance,
        "tolerance": tol * scale,
        "agrees_with_oracle": agree,
    });
    let mut out = Outcome::with_code(if agree { EXIT_OK } else { EXIT_DOMAIN }, emit(json, value, t));
    if !agree {
        out.warn(format!("{} formula differs from the oracle by {}", formula_name(formula), num(distance)));
    }
    out
}

/// Declared basis vectors lying in `n`, in declared order, when they span it.
fn declared_frame(l: &MetricLieAlgebra, n: &Subspace, tol: f64) -> Option<nalgebra::DMatrix<f64>> {
    let cols: Vec<_> = (0..l.dim()).map(|i| l.basis_vector(i)).filter(|v| n.contains_vector(v, tol)).collect();
    (cols.len() == n.dim()).then(|| nalgebra::DMatrix::from_columns(&cols))
}

fn structure_reports(l: &MetricLieAlgebra, sols: &[qelie_core::QESolution], m: f64, tol: f64) -> (Vec<VerdictReport>, Vec<String>) {
    let mut reports = Vec::new();
    let mut notes = Vec::new();
    if l.structure().is_abelian() {
        notes.push("abelian: flat, every metric is Einstein with lambda 0".into());
        return (reports, notes);
    }
    if is_nilpotent(l, tol) {
        for (i, s) in sols.iter().enumerate().filter(|(_, s)| !s.flags.einstein) {
            match verify_two_eigenvalue_structure(l, s, tol) {
                Ok(mut r) => {
                    r.title = format!("{} (solution {})", r.title, i + 1);
                    reports.push(r);
                }
                Err(e) => notes.push(format!("two-eigenvalue structure (solution {}): {e}", i + 1)),
            }
        }
        match kirillov_frame(l, tol).and_then(|f| verify_nilpotent_structure_theorem(l, &f, tol)) {
            Ok(r) => reports.push(r),
            Err(e) => notes.push(format!("nilpotent structure theorem not applicable: {e}")),
        }
    } else if is_solvable(l, tol) {
        if !is_unimodular(l, tol) {
            notes.push("not unimodular; the solvable conditions assume a unimodular algebra".into());
            return (reports, notes);
        }
        let (a, n) = match default_split(l, tol) {
            Ok(x) => x,
            Err(e) => {
                notes.push(format!("no standard split: {e}"));
                return (reports, notes);
            }
        };
        match verify_solvable_conditions(l, &a, &n, m, tol) {
            Ok(r) => reports.push(r),
            Err(e) => notes.push(format!("solvable conditions not applicable: {e}")),
        }
        match declared_frame(l, &n, tol) {
            Some(frame) => match verify_heisenberg_extension_form(l, &a, &n, &frame, tol) {
                Ok(r) => reports.push(r),
                Err(e) => notes.push(format!("Heisenberg extension form not applicable: {e}")),
            },
            None => notes.push("nilradical is not spanned by declared basis vectors; extension form skipped".into()),
        }
    } else {
        notes.push("not solvable; no structure theorem applies".into());
    }
    (reports, notes)
}

pub fn qe(path: &Path, m: f64, tol: f64, json: bool) -> Outcome {
    let (doc, l) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let sols = match qe_solve(&l, m, tol) {
        Ok(s) => s,
        Err(e) => return Outcome::error(EXIT_DOMAIN, e),
    };
    let (scalar, flat) = match scalar_and_flatness(&l, tol) {
        Ok(x) => x,
        Err(e) => return Outcome::error(EXIT_DOMAIN, e),
    };
    let (reports, notes) = structure_reports(&l, &sols, m, tol);

    let mut t = header("qe", &doc, &l);
    let _ = writeln!(t, "m:              {}", num(m));
    let _ = writeln!(t, "scalar:         {}  flat {}", num(scalar), yes(flat));
    let _ = writeln!(t, "solutions:      {}", sols.len());
    for (i, s) in sols.iter().enumerate() {
        let _ = writeln!(
            t,
            "  [{}] lambda {}  X = {}  residual {}  killing {}  central {}  einstein {}",
            i + 1,
            num(s.lambda),
            format::vector(&s.x),
            num(s.residual),
            yes(s.flags.x_killing),
            yes(s.flags.x_central),
            yes(s.flags.einstein)
        );
    }
    for r in &reports {
        let status = if !r.applicable {
            "not applicable"
        } else if r.all_passed() {
            "pass"
        } else {
            "FAIL"
        };
        let _ = writeln!(t, "{}: {status}", r.title);
        for c in &r.checks {
            let _ = writeln!(t, "  {:<20} {}  residual {}  tol {}", c.name, pass(c.passed), num(c.residual), num(c.tolerance));
        }
        for n in &r.notes {
            let _ = writeln!(t, "  note: {n}");
        }
    }
    for n in &notes {
        let _ = writeln!(t, "note: {n}");
    }
    let value = json!({
        "command": "qe",
        "name": doc.name,
        "dim": l.dim(),
        "m": m,
        "scalar": scalar,
        "flat": flat,
        "solutions": sols,
        "reports": reports,
        "notes": notes,
    });
    let code = if !sols.is_empty() || flat { EXIT_OK } else { EXIT_DOMAIN };
    Outcome::with_code(code, emit(json, value, t))
}

fn parse_params(raw: &[String]) -> Result<std::collections::BTreeMap<String, Scalar>, Outcome> {
    let mut out = std::collections::BTreeMap::new();
    for item in raw.iter().filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Outcome::error(EXIT_USAGE, format!("--params expects key=value, got '{item}'")))?;
        let value = Scalar::parse(v.trim())
            .ok_or_else(|| Outcome::error(EXIT_USAGE, format!("--params: '{v}' is not a number")))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> Result<(), Outcome> {
    std::fs::write(path, text).map_err(|e| Outcome::error(EXIT_DOMAIN, format!("cannot write {}: {e}", path.display())))
}

fn params_json(e: &CatalogEntry) -> Value {
    e.params.iter().map(|(k, v)| (k.clone(), Value::String(v.to_literal()))).collect::<serde_json::Map<_, _>>().into()
}

pub fn catalog(family: &str, raw: &[String], emit_to: Option<&Path>, tol: f64, json: bool) -> Outcome {
    let params = match parse_params(raw) {
        Ok(p) => p,
        Err(o) => return o,
    };
    if family == "tables" {
        return tables(emit_to, tol, json);
    }
    let entry = match from_family(family, &params) {
        Ok(e) => e,
        Err(e) => return Outcome::error(EXIT_USAGE, e),
    };
    let doc = AlgebraDocument::from_entry(&entry).to_json();
    match emit_to {
        None => Outcome::ok(doc),
        Some(p) => {
            if let Err(o) = write_file(p, &doc) {
                return o;
            }
            let shown = p.display().to_string();
            Outcome::ok(emit(json, json!({"command": "catalog", "written": [shown]}), format!("wrote {shown}\n")))
        }
    }
}

fn tables(emit_to: Option<&Path>, tol: f64, json: bool) -> Outcome {
    let rows = match tables_report(tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(EXIT_DOMAIN, e),
    };
    if let Some(dir) = emit_to {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return Outcome::error(EXIT_DOMAIN, format!("cannot create {}: {e}", dir.display()));
        }
    }
    let mut t = String::from("table  name    dim  center  step  solutions  lambda               expected  match\n");
    let mut items = Vec::new();
    for row in &rows {
        let l = &row.entry.algebra;
        let step = match series(l, SeriesKind::LowerCentral, tol).verdict {
            SeriesVerdict::Nilpotent { step } => Some(step),
            _ => None,
        };
        let zdim = center(l, tol).dim();
        let table = if row.table == 0 { "extra".to_string() } else { row.table.to_string() };
        let expected = row.entry.expected.and_then(|e| e.lambda);
        let file = match emit_to {
            Some(dir) => {
                let p = dir.join(format!("table{}-{}.json", if row.table == 0 { "x".into() } else { row.table.to_string() }, row.entry.name));
                if let Err(o) = write_file(&p, &AlgebraDocument::from_entry(&row.entry).to_json()) {
                    return o;
                }
                Some(p.display().to_string())
            }
            None => None,
        };
        let _ = writeln!(
            t,
            "{:<6} {:<7} {:<4} {:<7} {:<5} {:<10} {:<20} {:<9} {}",
            table,
            row.entry.name,
            l.dim(),
            zdim,
            step.map_or("-".into(), |s| s.to_string()),
            row.solutions_found,
            row.lambda.map_or("-".into(), num),
            expected.map_or("-".into(), num),
            yes(row.matches_expected)
        );
        items.push(json!({
            "table": row.table,
            "name": row.entry.name,
            "family": row.entry.family,
            "params": params_json(&row.entry),
            "dim": l.dim(),
            "center_dim": zdim,
            "nilpotent_step": step,
            "solutions_found": row.solutions_found,
            "lambda": row.lambda,
            "expected_lambda": expected,
            "matches_expected": row.matches_expected,
            "file": file,
        }));
    }
    Outcome::ok(emit(json, json!({"command": "catalog", "family": "tables", "rows": items}), t))
}

fn family_reduction(doc: &AlgebraDocument, l: &MetricLieAlgebra, bound: u64) -> Result<Option<RationalityReport>, String> {
    let fam = match doc.family.as_deref() {
        Some("n6a") => ObstructedFamily::N6a,
        Some("n7a") => ObstructedFamily::N7a,
        _ => return Ok(None),
    };
    let params = doc.params_scalars().map_err(|e| e.to_string())?;
    let entry = from_family(doc.family.as_deref().unwrap_or_default(), &params).map_err(|e| e.to_string())?;
    let diff = entry
        .algebra
        .structure()
        .as_slice()
        .iter()
        .zip(l.structure().as_slice())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if entry.algebra.dim() != l.dim() || diff > 1e-12 {
        return Err("brackets do not match the declared family parameters".into());
    }
    let (a, c) = (params.get("a").cloned().unwrap_or(Scalar::from(0)), params.get("c").cloned().unwrap_or(Scalar::from(0)));
    family_obstruction(fam, &a, &c, bound).map(Some).map_err(|e| e.to_string())
}

pub fn lattice(path: &Path, bound: u64, json: bool) -> Outcome {
    let (doc, l) = match load(path) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let declared = rational_structure_check(&l, bound);
    let mut rep = declared.clone();
    match family_reduction(&doc, &l, bound) {
        Ok(Some(mut fam)) => {
            fam.witnesses = declared.witnesses.clone();
            fam.notes.extend(declared.notes.iter().cloned());
            rep = fam;
        }
        Ok(None) => {}
        Err(e) => rep.notes.push(format!("family reduction skipped: {e}")),
    }
    let unimodular = is_unimodular_exact(&l).unwrap_or_else(|| is_unimodular(&l, qelie_core::DEFAULT_TOL));

    let mut t = header("lattice", &doc, &l);
    let verdict = serde_json::to_value(rep.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let _ = writeln!(t, "verdict:        {verdict}");
    let matched = rep.witnesses.iter().filter(|w| w.matched).count();
    let _ = writeln!(t, "constants:      {} checked, {matched} rational", rep.witnesses.len());
    for w in &rep.witnesses {
        let _ = writeln!(
            t,
            "  [{},{}] -> {}: {} ~ {}  error {}",
            w.i,
            w.j,
            w.k,
            w.value,
            w.rational,
            num(w.error)
        );
    }
    if let Some(ob) = &rep.obstruction {
        let (p, q, r) = ob.equation;
        let _ = writeln!(t, "equation:       {p} x^2 + {q} y^2 = {r} z^2");
        let _ = writeln!(t, "identity:       {}", ob.identity);
        let _ = writeln!(t, "search:         {} nonzero solutions with |x|,|y|,|z| <= {}", ob.solutions_found, ob.bound);
        let _ = writeln!(t, "certificate:    {}", if ob.certificate_valid { "valid" } else { "INVALID" });
    }
    if !unimodular {
        let _ = writeln!(t, "unimodular:     no");
    }
    for n in &rep.notes {
        let _ = writeln!(t, "note: {n}");
    }
    let value = json!({
        "command": "lattice",
        "name": doc.name,
        "dim": l.dim(),
        "unimodular": unimodular,
        "report": rep,
    });
    let mut out = Outcome::ok(emit(json, value, t));
    if !unimodular {
        out.warn("algebra is not unimodular, so the simply connected group admits no lattice");
    }
    out
}
