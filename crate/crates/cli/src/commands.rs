//! The four subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use frameforge::classify::{
    analyze_sequence, classify as classify_sequence, core_block, default_schedule, scan,
    schedule_for, ClassFlag, ScanReport, SynthesisAnalysis, Trend,
};
use frameforge::duals::{
    canonical_dual, check_partner_class, pseudo_codual_construct, pseudo_dual_construct,
    verify_duality, DualityCertificate, PartnerCheck,
};
use frameforge::gallery;
use frameforge::perturb::{
    bari_certificate, kato_certificate_with_bounds, pw_certificate_seeded, BariVariant, Params,
    PerturbationCertificate,
};
use frameforge::sampling::SEED_ENV;
use frameforge::seqfile;
use frameforge::{
    DualityVerdict, FiniteSequence, Relation, Taxonomy, TolerancePolicy, VectorSequence,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{input_error, Body, CliError};
use crate::{DualKind, TheoremArg};

/// Seed for sampled checks: `FRAMEFORGE_SEED`, or 0 when unset.
pub fn seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| input_error(format!("{SEED_ENV}=`{s}` is not an unsigned integer"))),
    }
}

fn load(path: &Path) -> Result<VectorSequence, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    seqfile::parse(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report payloads always serialize")
}

/// Serialized name of a unit-like enum value.
fn label<T: Serialize>(x: &T) -> String {
    match to_value(x) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn describe(s: &VectorSequence) -> Value {
    let field = label(&s.field());
    match s {
        VectorSequence::Finite(f) => {
            json!({"kind": "finite", "field": field, "vectors": f.len(), "dim": f.dim()})
        }
        VectorSequence::Edited(e) => {
            json!({"kind": "edited", "field": field, "edits": e.script().edits.len()})
        }
        VectorSequence::Rule(r) => {
            json!({"kind": "rule", "field": field, "terms": r.terms().len()})
        }
    }
}

fn describe_text(s: &VectorSequence) -> String {
    let field = if s.field() == frameforge::Field::Real {
        "ℝ"
    } else {
        "ℂ"
    };
    match s {
        VectorSequence::Finite(f) => format!("finite, {} vectors in {field}^{}", f.len(), f.dim()),
        VectorSequence::Edited(e) => format!(
            "standard basis of ℓ² over {field} with {} edit(s)",
            e.script().edits.len()
        ),
        VectorSequence::Rule(r) => format!(
            "coefficient rule over {field} with {} term(s)",
            r.terms().len()
        ),
    }
}

fn taxonomy_text(out: &mut String, t: &Taxonomy) {
    let names = |want: bool| {
        let names = ClassFlag::ALL
            .into_iter()
            .filter(|f| t.has(*f) == want)
            .map(ClassFlag::name)
            .collect::<Vec<_>>();
        if names.is_empty() {
            "none".to_string()
        } else {
            names.join(", ")
        }
    };
    let count = |c: Option<usize>| c.map_or("-".to_string(), |v| v.to_string());
    let _ = writeln!(out, "provenance  {}", label(&t.provenance));
    let _ = writeln!(out, "classes     {}", names(true));
    let _ = writeln!(out, "not         {}", names(false));
    let _ = writeln!(out, "excess      {}", count(t.excess));
    let _ = writeln!(out, "deficit     {}", count(t.deficit));
}

fn trend_text(t: Trend) -> String {
    match t {
        Trend::Settled(v) => format!("settled at {v}"),
        Trend::Growing => "growing".into(),
        Trend::Unsettled => "unsettled".into(),
    }
}

fn analysis_text(out: &mut String, a: &SynthesisAnalysis) {
    let _ = writeln!(
        out,
        "bounds      M = {:.6}, frame lower = {:.6}, Riesz lower = {:.6}, γ = {:.6}",
        a.bessel_bound, a.frame_lower, a.riesz_lower, a.gamma
    );
    let _ = writeln!(
        out,
        "dimensions  rank {}, kernel {}, corange {}, index {}",
        a.rank, a.kernel_dim, a.corange_dim, a.index
    );
}

fn scan_text(out: &mut String, r: &ScanReport) {
    let _ = writeln!(
        out,
        "scan        {:>6} {:>6} {:>14} {:>12} {:>7} {:>8}",
        "n", "d", "M", "γ", "kernel", "corange"
    );
    for step in &r.steps {
        let a = &step.analysis;
        let _ = writeln!(
            out,
            "            {:>6} {:>6} {:>14.6} {:>12.6} {:>7} {:>8}",
            step.truncation.n_vectors,
            step.truncation.d_coords,
            a.bessel_bound,
            a.gamma,
            a.kernel_dim,
            a.corange_dim
        );
    }
    let _ = writeln!(
        out,
        "trends      kernel {}, corange {}, γ {}",
        trend_text(r.kernel_trend),
        trend_text(r.corange_trend),
        if r.gamma_settled {
            "settled"
        } else {
            "unsettled"
        }
    );
}

fn notes_text(out: &mut String, notes: &[String]) {
    for n in notes {
        let _ = writeln!(out, "note        {n}");
    }
}

pub fn classify(
    path: &Path,
    scan_dims: Option<&[usize]>,
    assert_classes: &[String],
    tol: &TolerancePolicy,
) -> Result<Body, CliError> {
    let flags = assert_classes
        .iter()
        .map(|name| {
            ClassFlag::from_name(name).ok_or_else(|| {
                let known: Vec<&str> = ClassFlag::ALL.iter().map(|f| f.name()).collect();
                input_error(format!(
                    "unknown class `{name}`; expected one of {}",
                    known.join(", ")
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seq = load(path)?;
    let schedule = |dims: Option<&[usize]>| match dims {
        Some(d) => schedule_for(&seq, d),
        None => default_schedule(&seq),
    };
    let (taxonomy, analysis, report) = match (&seq, scan_dims) {
        (VectorSequence::Finite(_), Some(_)) => {
            return Err(input_error(
                "--scan-dims applies to structured sequences only",
            ))
        }
        (VectorSequence::Rule(_), dims) => {
            let r = scan(&seq, &schedule(dims)?, tol)?;
            (r.extrapolated.clone(), None, Some(r))
        }
        (_, dims) => {
            let r = match dims {
                Some(_) => Some(scan(&seq, &schedule(dims)?, tol)?),
                None => None,
            };
            (
                classify_sequence(&seq, tol)?,
                Some(analyze_sequence(&seq, tol)?),
                r,
            )
        }
    };
    let mut notes: Vec<String> = Vec::new();
    if let Some(r) = &report {
        notes.extend(r.notes.iter().map(ToString::to_string));
        if !r.gamma_settled {
            notes.push("γ did not settle across the scan".into());
        }
    }
    let assertions: Vec<(ClassFlag, bool)> = flags.iter().map(|f| (*f, taxonomy.has(*f))).collect();

    let mut text = String::new();
    let _ = writeln!(text, "sequence    {}", describe_text(&seq));
    taxonomy_text(&mut text, &taxonomy);
    if let Some(a) = &analysis {
        analysis_text(&mut text, a);
    }
    if let Some(r) = &report {
        scan_text(&mut text, r);
    }
    notes_text(&mut text, &notes);
    for (flag, holds) in &assertions {
        let _ = writeln!(
            text,
            "assert      {flag}: {}",
            if *holds { "holds" } else { "fails" }
        );
    }

    Ok(Body {
        result: json!({
            "sequence": describe(&seq),
            "taxonomy": taxonomy,
            "analysis": analysis,
            "scan": report,
            "notes": notes,
            "assertions": assertions
                .iter()
                .map(|(f, h)| json!({"class": f.name(), "holds": h}))
                .collect::<Vec<_>>(),
        }),
        text,
        negative: assertions.iter().any(|(_, h)| !h),
    })
}

fn certificate_text(out: &mut String, c: &DualityCertificate, check: &PartnerCheck) {
    let _ = writeln!(
        out,
        "relation    {}: defect rank {} (budget {}), verdict {}",
        c.relation, c.defect_rank, c.rank_budget, c.verdict
    );
    if let Some(t) = c.section {
        let _ = writeln!(
            out,
            "section     {} vectors × {} coordinates",
            t.n_vectors, t.d_coords
        );
    }
    let _ = writeln!(
        out,
        "partner     {}",
        if c.bessel_flag_of_partner {
            "Bessel"
        } else {
            "not Bessel"
        }
    );
    let _ = writeln!(out, "check       {check}");
}

fn assert_failed(kind: Option<DualKind>, c: &DualityCertificate, check: &PartnerCheck) -> bool {
    let exact_required = kind == Some(DualKind::Canonical);
    c.verdict == DualityVerdict::NotAPseudoDual
        || (exact_required && c.verdict != DualityVerdict::ExactDual)
        || matches!(check, PartnerCheck::Fail { .. })
}

pub fn dual(
    path: &Path,
    kind: Option<DualKind>,
    verify_with: Option<&Path>,
    output: Option<&Path>,
    assert: bool,
    tol: &TolerancePolicy,
) -> Result<Body, CliError> {
    let f = load(path)?;
    let mut text = String::new();
    let _ = writeln!(text, "sequence    {}", describe_text(&f));

    if let Some(partner_path) = verify_with {
        let g = load(partner_path)?;
        let relations = match kind {
            Some(DualKind::Canonical | DualKind::Pseudo) => vec![Relation::Dual],
            Some(DualKind::Codual) => vec![Relation::Codual],
            None => vec![Relation::Dual, Relation::Codual],
        };
        let partner_taxonomy = classify_sequence(&g, tol)?;
        let mut notes = Vec::new();
        if !partner_taxonomy.bessel {
            notes.push("partner is not Bessel".to_string());
        }
        let mut entries = Vec::new();
        let mut negative = false;
        for relation in relations {
            let cert = verify_duality(&f, &g, relation, None, tol)?;
            let check = check_partner_class(&cert, &partner_taxonomy);
            certificate_text(&mut text, &cert, &check);
            negative |= assert && assert_failed(kind, &cert, &check);
            entries.push(json!({"certificate": cert, "partner_check": check}));
        }
        notes_text(&mut text, &notes);
        return Ok(Body {
            result: json!({
                "mode": "verify",
                "sequence": describe(&f),
                "partner": describe(&g),
                "partner_taxonomy": partner_taxonomy,
                "relations": entries,
                "notes": notes,
            }),
            text,
            negative,
        });
    }

    let kind = kind.unwrap_or(DualKind::Pseudo);
    let (fin, section) = match &f {
        VectorSequence::Finite(x) => (x.clone(), None),
        VectorSequence::Edited(e) => {
            let t = core_block(e);
            (FiniteSequence::from_synthesis(f.truncate(t)?.matrix)?, Some(t))
        }
        VectorSequence::Rule(_) => {
            return Err(input_error(
                "constructing a partner needs a finite sequence or an edited basis; check rule pairs with --verify-with",
            ))
        }
    };
    let fin = &fin;
    let (g, cert) = match kind {
        DualKind::Canonical => {
            let g = canonical_dual(fin, tol)?;
            let cert = verify_duality(
                &f,
                &VectorSequence::Finite(g.clone()),
                Relation::Dual,
                None,
                tol,
            )?;
            (g, cert)
        }
        DualKind::Pseudo => pseudo_dual_construct(fin, tol)?,
        DualKind::Codual => pseudo_codual_construct(fin, tol)?,
    };
    let g = VectorSequence::Finite(g);
    let spec = seqfile::to_json(&g);
    let mut notes = Vec::new();
    if let Some(t) = section {
        let _ = writeln!(
            text,
            "section     {} vectors × {} coordinates (core block)",
            t.n_vectors, t.d_coords
        );
        notes.push(
            "the partner is built on the core block; past it the sequence is orthonormal and is its own partner"
                .to_string(),
        );
    }
    let partner_taxonomy = classify_sequence(&g, tol)?;
    let check = check_partner_class(&cert, &partner_taxonomy);
    certificate_text(&mut text, &cert, &check);
    notes_text(&mut text, &notes);
    match output {
        Some(out) => {
            write(out, &spec)?;
            let _ = writeln!(text, "written     {}", out.display());
        }
        None => {
            let _ = writeln!(text, "partner spec\n{spec}");
        }
    }
    Ok(Body {
        result: json!({
            "mode": "construct",
            "kind": format!("{kind:?}").to_lowercase(),
            "sequence": describe(&f),
            "partner_spec": serde_json::from_str::<Value>(&spec).expect("spec is JSON"),
            "partner_taxonomy": partner_taxonomy,
            "certificate": cert,
            "partner_check": check,
            "section": section,
            "notes": notes,
            "output": output.map(|p| p.display().to_string()),
        }),
        text,
        negative: assert && assert_failed(Some(kind), &cert, &check),
    })
}

fn params_text(p: &Params) -> String {
    let opt = |x: Option<f64>| x.map_or("∞".to_string(), |v| format!("{v}"));
    match *p {
        Params::Kato { a, b } => format!("a = {a}, b = {b}"),
        Params::PwType {
            lambda,
            mu,
            estimated,
        } => {
            let how = if estimated { " (estimated)" } else { "" };
            format!("λ = {lambda}, μ = {mu}{how}")
        }
        Params::Quadratic { q, a } => format!("q = {}, a = {}", opt(q), opt(a)),
    }
}

fn perturbation_text(out: &mut String, c: &PerturbationCertificate) {
    let _ = writeln!(out, "theorem     {}", c.theorem);
    let _ = writeln!(out, "parameters  {}", params_text(&c.params));
    let _ = writeln!(out, "γ(f)        {:.6}", c.gamma_of_reference);
    let _ = writeln!(out, "bound       {}", label(&c.bound_check));
    let _ = writeln!(
        out,
        "hypothesis  {}",
        if c.hypothesis_met { "met" } else { "not met" }
    );
    for g in &c.guaranteed {
        let _ = writeln!(out, "guarantee   {g}");
    }
    let inv = |i: &frameforge::perturb::Invariants| {
        format!(
            "kernel {}, corange {}, classes {}",
            i.kernel,
            i.corange,
            i.taxonomy
                .flags()
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    let _ = writeln!(out, "reference   {}", inv(&c.empirical.reference));
    let _ = writeln!(out, "perturbed   {}", inv(&c.empirical.perturbed));
    let _ = writeln!(
        out,
        "observed    {}",
        if c.empirical_agreement {
            "all guarantees hold"
        } else {
            "a guarantee fails"
        }
    );
    let _ = writeln!(out, "provenance  {}", label(&c.provenance));
    notes_text(out, &c.notes);
}

#[allow(clippy::too_many_arguments)]
pub fn perturb(
    reference: &Path,
    perturbed: &Path,
    theorem: TheoremArg,
    lambda: Option<f64>,
    mu: Option<f64>,
    assert: bool,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<Body, CliError> {
    let f = load(reference)?;
    let g = load(perturbed)?;
    let cert = match theorem {
        TheoremArg::Kato => {
            let (Some(ff), Some(gg)) = (f.as_finite(), g.as_finite()) else {
                return Err(input_error(
                    "the Kato certificate needs two finite sequences",
                ));
            };
            if ff.synthesis().shape() != gg.synthesis().shape() {
                return Err(input_error(format!(
                    "incompatible shapes: {} vectors in dimension {} and {} vectors in dimension {}",
                    ff.len(),
                    ff.dim(),
                    gg.len(),
                    gg.dim()
                )));
            }
            let bounds = match (lambda, mu) {
                (None, None) => None,
                (Some(l), Some(m)) => Some((m, l)),
                _ => return Err(input_error("give both --lambda and --mu, or neither")),
            };
            let a = gg.synthesis() - ff.synthesis();
            kato_certificate_with_bounds(ff.synthesis(), &a, bounds, tol)?
        }
        TheoremArg::Pw => pw_certificate_seeded(&f, &g, lambda, mu, seed, tol)?,
        TheoremArg::BariPrb | TheoremArg::BariGamma => {
            if lambda.is_some() || mu.is_some() {
                return Err(input_error(
                    "--lambda and --mu apply to the kato and pw theorems only",
                ));
            }
            let variant = if theorem == TheoremArg::BariPrb {
                BariVariant::Prb
            } else {
                BariVariant::Gamma
            };
            bari_certificate(&f, &g, variant, tol)?
        }
    };
    let mut text = String::new();
    perturbation_text(&mut text, &cert);
    Ok(Body {
        negative: assert && !(cert.hypothesis_met && cert.empirical_agreement),
        result: json!({
            "reference": describe(&f),
            "perturbed": describe(&g),
            "certificate": cert,
        }),
        text,
    })
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect::<String>()
        .trim_end_matches('-')
        .to_string()
}

pub fn gallery(name: Option<&str>, list: bool, emit: Option<&Path>) -> Result<Body, CliError> {
    let Some(name) = name.filter(|_| !list) else {
        if emit.is_some() {
            return Err(input_error("--emit needs an entry name"));
        }
        let names = gallery::list_names();
        let text = names.iter().map(|n| format!("{n}\n")).collect();
        return Ok(Body {
            result: json!({"entries": names}),
            text,
            negative: false,
        });
    };
    let entry = gallery::get(name)?;
    let mut files = Vec::new();
    if let Some(dir) = emit {
        fs::create_dir_all(dir)
            .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))?;
        let stem = slug(&entry.name);
        let sequence_file = format!("{stem}.json");
        write(
            &dir.join(&sequence_file),
            &seqfile::to_json(&entry.sequence),
        )?;
        files.push(sequence_file.clone());
        let partner_file = match &entry.partner {
            Some(g) => {
                let file = format!("{stem}.partner.json");
                write(&dir.join(&file), &seqfile::to_json(g))?;
                files.push(file.clone());
                Some(file)
            }
            None => None,
        };
        let expected_file = format!("{stem}.expected.json");
        let expected = json!({
            "name": entry.name,
            "sequence_file": sequence_file,
            "partner_file": partner_file,
            "expected_taxonomy": entry.expected_taxonomy,
            "partner_expectation": entry.partner_expectation,
            "suggested_truncations": entry.suggested_truncations,
            "claims": entry.claims,
        });
        write(
            &dir.join(&expected_file),
            &serde_json::to_string_pretty(&expected).expect("expectations serialize"),
        )?;
        files.push(expected_file);
    }

    let mut text = String::new();
    let _ = writeln!(text, "entry       {}", entry.name);
    let _ = writeln!(text, "sequence    {}", describe_text(&entry.sequence));
    if let Some(g) = &entry.partner {
        let _ = writeln!(text, "partner     {}", describe_text(g));
    }
    taxonomy_text(&mut text, &entry.expected_taxonomy);
    if let Some(p) = &entry.partner_expectation {
        let _ = writeln!(
            text,
            "expect      {} defect rank {}, partner {}",
            p.relation,
            p.defect_rank,
            if p.partner_bessel {
                "Bessel"
            } else {
                "not Bessel"
            }
        );
    }
    for c in &entry.claims {
        let _ = writeln!(text, "claim       {} ({})", c.statement, c.source);
    }
    for f in &files {
        let _ = writeln!(
            text,
            "written     {}",
            emit.expect("files imply a directory").join(f).display()
        );
    }
    Ok(Body {
        result: json!({
            "name": entry.name,
            "sequence": describe(&entry.sequence),
            "expected_taxonomy": entry.expected_taxonomy,
            "partner_expectation": entry.partner_expectation,
            "claims": entry.claims,
            "files": files,
        }),
        text,
        negative: false,
    })
}
