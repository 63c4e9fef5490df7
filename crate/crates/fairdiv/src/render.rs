//! JSON values and aligned text tables for reports, matrices and certificates.

use fairdiv_core::algorithms::QueryCounts;
use fairdiv_core::fairness::{FairnessReport, Verdict, Witness};
use fairdiv_core::impossibility::{Evidence, SearchCertificate};
use fairdiv_core::rational::{self, Rational};
use fairdiv_core::strongkprop::{EqualityClasses, StrongDivision};
use fairdiv_core::SharingMatrix;
use serde_json::{json, Value};

use crate::io::{division_json, matrix_json, rational_json};

pub fn witness_json(w: &Witness) -> Value {
    json!({ "player": w.player, "subset": w.subset, "slack": rational_json(&w.slack) })
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({ "holds": v.holds, "witness": v.witness.as_ref().map(witness_json) })
}

pub fn report_json(r: &FairnessReport) -> Value {
    let bound = |list: &[(usize, Verdict)]| -> Value {
        list.iter().map(|(k, v)| json!({ "k": k, "verdict": verdict_json(v) })).collect()
    };
    json!({
        "n": r.n,
        "proportional": verdict_json(&r.proportional),
        "strong_proportional": verdict_json(&r.strong_proportional),
        "envy_free": verdict_json(&r.envy_free),
        "strong_envy_free": verdict_json(&r.strong_envy_free),
        "equitable": verdict_json(&r.equitable),
        "exact": verdict_json(&r.exact),
        "k_profile": r.k_profile.iter().map(|l| json!({
            "k": l.k,
            "proportional": verdict_json(&l.proportional),
            "strong": verdict_json(&l.strong),
        })).collect::<Vec<_>>(),
        "chb": bound(&r.chb),
        "clb": bound(&r.clb),
    })
}

pub fn sharing_json(m: &SharingMatrix) -> Value {
    matrix_json(m.entries())
}

pub fn ledger_json(c: &QueryCounts) -> Value {
    json!({ "eval_count": c.eval_count, "cut_count": c.cut_count })
}

pub fn certificate_json(c: &SearchCertificate, timing: bool) -> Value {
    let evidence = match &c.evidence {
        Evidence::Pie(p) => json!({
            "grid_v": p.grid_v,
            "refined_v": p.refined_v,
            "v_star": p.v_star,
            "v_star_exact": rational_json(&p.v_star_exact),
            "best_division": division_json(&p.best.clone().into()),
            "near_feasible": p.near_feasible,
            "mechanism_confirmed": p.mechanism_confirmed,
            "polish_programs": p.polish_programs,
        }),
        Evidence::Cake(e) => json!({
            "proportional_found": e.proportional_found,
            "diagonal_failures": e.diagonal_failures,
            "undominated": e.undominated,
            "first_found": e.first_found.as_ref().map(|d| division_json(&d.clone().into())),
        }),
    };
    let mut v = json!({
        "theorem": c.theorem.id(),
        "n": c.n,
        "k": c.k,
        "grid": c.grid,
        "refine_rounds": c.refine_rounds,
        "divisions_examined": c.divisions_examined,
        "assignments_examined": c.assignments_examined,
        "evidence": evidence,
        "passed": c.passed,
    });
    if timing {
        v["wall_time_secs"] = json!(c.wall_time_secs);
    }
    v
}

pub fn classes_json(c: &EqualityClasses) -> Value {
    json!(c.classes())
}

pub fn strong_json(s: &StrongDivision, report: &FairnessReport) -> Value {
    json!({
        "exists": true,
        "epsilon": rational_json(&s.epsilon),
        "halvings": s.halvings,
        "proper_matrix": matrix_json(s.proper.entries()),
        "sharing_matrix": sharing_json(&s.matrix),
        "division": division_json(&s.division.clone().into()),
        "report": report_json(report),
    })
}

fn mark(holds: bool) -> &'static str {
    if holds {
        "✓"
    } else {
        "✗"
    }
}

fn subset(s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn witness_text(v: &Verdict) -> String {
    match &v.witness {
        Some(w) => format!("player {}, J = {}, slack {}", w.player, subset(&w.subset), rational::format(&w.slack)),
        None => "-".into(),
    }
}

/// Left-aligned columns separated by two spaces. Width counts chars so the
/// check marks line up.
pub fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c + 1 < r.len() {
                line.push_str(cell);
                line.extend(core::iter::repeat_n(' ', widths[c] - cell.chars().count() + 2));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn report_text(r: &FairnessReport) -> String {
    let mut rows = vec![vec!["notion".to_string(), "holds".into(), "worst case".into()]];
    let mut push = |name: String, v: &Verdict| rows.push(vec![name, mark(v.holds).into(), witness_text(v)]);
    push("proportional".into(), &r.proportional);
    push("strong proportional".into(), &r.strong_proportional);
    push("envy-free".into(), &r.envy_free);
    push("strong envy-free".into(), &r.strong_envy_free);
    push("equitable".into(), &r.equitable);
    push("exact".into(), &r.exact);
    for l in &r.k_profile {
        push(format!("{}-proportional", l.k), &l.proportional);
        push(format!("strong {}-proportional", l.k), &l.strong);
    }
    for (k, v) in &r.chb {
        push(format!("CHB k={k}"), v);
    }
    for (k, v) in &r.clb {
        push(format!("CLB k={k}"), v);
    }
    table(&rows)
}

pub fn matrix_text(rows: &[Vec<Rational>], names: &[String]) -> String {
    let mut out = vec![core::iter::once(String::new()).chain(names.iter().cloned()).collect::<Vec<_>>()];
    for (name, row) in names.iter().zip(rows) {
        out.push(core::iter::once(name.clone()).chain(row.iter().map(rational::format)).collect());
    }
    table(&out)
}

pub fn ledger_text(c: &QueryCounts) -> String {
    format!("queries: {} eval, {} cut\n", c.eval_count, c.cut_count)
}

pub fn certificate_text(c: &SearchCertificate) -> String {
    let mut rows = vec![
        vec!["theorem".to_string(), c.theorem.id().to_string()],
        vec!["n, k".into(), format!("{}, {}", c.n, c.k)],
        vec!["grid".into(), format!("1/{}", c.grid)],
        vec!["refine rounds".into(), c.refine_rounds.to_string()],
        vec!["divisions examined".into(), c.divisions_examined.to_string()],
        vec!["assignments examined".into(), c.assignments_examined.to_string()],
    ];
    match &c.evidence {
        Evidence::Pie(p) => {
            rows.push(vec!["V grid".into(), format!("{:.6}", p.grid_v)]);
            rows.push(vec!["V refined".into(), format!("{:.6}", p.refined_v)]);
            rows.push(vec!["V*".into(), format!("{:.6} (exact {})", p.v_star, rational::format(&p.v_star_exact))]);
            rows.push(vec![
                "mechanism".into(),
                format!("{} of {} near-feasible divisions", p.mechanism_confirmed, p.near_feasible),
            ]);
            rows.push(vec!["LP polish programs".into(), p.polish_programs.to_string()]);
        }
        Evidence::Cake(e) => {
            rows.push(vec!["proportional found".into(), e.proportional_found.to_string()]);
            rows.push(vec!["diagonal failures".into(), e.diagonal_failures.to_string()]);
            rows.push(vec!["undominated".into(), e.undominated.to_string()]);
        }
    }
    if let Some(t) = c.wall_time_secs {
        rows.push(vec!["wall time".into(), format!("{t:.2} s")]);
    }
    rows.push(vec!["certified".into(), mark(c.passed).into()]);
    table(&rows)
}
