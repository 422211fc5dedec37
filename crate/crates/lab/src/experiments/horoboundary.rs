use psgrowth_core::boundary::{boundary_limit, reduced_equiv, Cocycle, Equivalence};
use psgrowth_core::spaces::{Element, GroupKind, MarkedGroup};

use crate::config::{ExperimentConfig, ExperimentKind, FamilySpec};
use crate::error::{LabError, Result};
use crate::report::{real, text, ExperimentReport, Table};

/// Evaluates `k·n + c` written as e.g. `2n+1`, `n`, `3`, `n-2`.
fn linear(expr: &str, n: i64) -> Result<i64> {
    let bad = || LabError::Config(format!("cannot read exponent {{{expr}}}"));
    let e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if e.is_empty() {
        return Err(bad());
    }
    let mut total = 0i64;
    let mut start = 0;
    let bytes = e.as_bytes();
    for i in 1..=bytes.len() {
        if i == bytes.len() || bytes[i] == b'+' || bytes[i] == b'-' {
            let term = &e[start..i];
            let (sign, body) = match term.as_bytes()[0] {
                b'-' => (-1, &term[1..]),
                b'+' => (1, &term[1..]),
                _ => (1, term),
            };
            let value = if let Some(coef) = body.strip_suffix('n') {
                let k = if coef.is_empty() { 1 } else { coef.parse::<i64>().map_err(|_| bad())? };
                k * n
            } else {
                body.parse::<i64>().map_err(|_| bad())?
            };
            total += sign * value;
            start = i;
        }
    }
    Ok(total)
}

/// Substitutes `n` into every `{…}` exponent of a family template.
pub fn expand_template(template: &str, n: i64) -> Result<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| LabError::Config(format!("unclosed brace in {template}")))?
            + open;
        let v = linear(&rest[open + 1..close], n)?;
        if v < 0 {
            return Err(LabError::Config(format!("negative exponent in {template} at n = {n}")));
        }
        out.push_str(&v.to_string());
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn default_families(group: &MarkedGroup) -> Vec<FamilySpec> {
    let f = |name: &str, term: &str| FamilySpec {
        name: name.into(),
        term: term.into(),
    };
    match group.kind() {
        GroupKind::FreeAbelian { dim: 2 } => vec![
            f("(n,n)", "a^{n}b^{n}"),
            f("(2n,n)", "a^{2n}b^{n}"),
            f("(n,0)", "a^{n}"),
            f("(0,n)", "b^{n}"),
            f("(-n,n)", "A^{n}b^{n}"),
        ],
        _ => vec![f("a^n", "a^{n}"), f("a^n b", "a^{n}b")],
    }
}

fn describe(c: &Cocycle) -> String {
    serde_json::to_string(c).unwrap_or_default()
}

pub fn run_horoboundary(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    let p = &cfg.params;
    let horizon = p.horizon.unwrap_or(40);
    let test_radius = p.test_radius.unwrap_or(4);
    let families = if p.families.is_empty() { default_families(&group) } else { p.families.clone() };
    let mut rep = ExperimentReport::new(
        ExperimentKind::Horoboundary,
        "The reduced horoboundary identifies cocycles at bounded distance; for the taxicab plane it is not Hausdorff.",
        cfg,
    );
    let mut limits = Vec::new();
    for fam in &families {
        // Validate the template once so errors name the family.
        group.parse(&expand_template(&fam.term, 1)?)?;
        let seq = |n: usize| -> Element {
            let word = expand_template(&fam.term, n as i64).expect("validated template");
            group.parse(&word).expect("validated template")
        };
        limits.push(boundary_limit(&group, seq, horizon, test_radius)?);
    }

    // Union of reduced-equivalence classes among certified boundary limits.
    let n = limits.len();
    let mut class: Vec<Option<usize>> = vec![None; n];
    let mut bound: Vec<Option<f64>> = vec![None; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        if !limits[i].cocycle.is_boundary() || !limits[i].certified {
            continue;
        }
        for (cid, &j) in reps.iter().enumerate() {
            if let Equivalence::Equivalent { sup_bound } = reduced_equiv(&group, &limits[j].cocycle, &limits[i].cocycle)? {
                class[i] = Some(cid);
                bound[i] = Some(sup_bound);
                break;
            }
        }
        if class[i].is_none() {
            class[i] = Some(reps.len());
            bound[i] = Some(0.0);
            reps.push(i);
        }
    }
    let mut table = Table::new("atlas", &["family", "kind", "certified", "class", "sup_bound", "cocycle"]);
    for (i, (fam, lim)) in families.iter().zip(&limits).enumerate() {
        let kind = if !lim.certified {
            "UNCERTIFIED"
        } else if lim.cocycle.is_boundary() {
            "BOUNDARY"
        } else {
            "INTERIOR"
        };
        if !lim.certified {
            rep.flag(format!("family {} has no certified limit by n = {horizon}", fam.name));
        }
        table.push(vec![
            text(&fam.name),
            text(kind),
            lim.certified.into(),
            class[i].map_or(serde_json::Value::Null, |c| c.into()),
            real(bound[i]),
            text(describe(&lim.cocycle)),
        ]);
    }
    rep.headline("boundary_classes", reps.len() as f64);
    rep.scope(format!(
        "limits fitted on n <= {horizon} and checked on B(o, {test_radius}); interior limits are excluded from classes; \
         sup bounds are to the first member of each class"
    ));
    rep.tables.push(table);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates() {
        assert_eq!(expand_template("a^{2n}b^{n+1}", 3).unwrap(), "a^6b^4");
        assert_eq!(expand_template("ab", 3).unwrap(), "ab");
        assert_eq!(expand_template("a^{n-1}", 1).unwrap(), "a^0");
        assert!(expand_template("a^{n-2}", 1).is_err());
        assert!(expand_template("a^{x}", 1).is_err());
        assert!(expand_template("a^{n", 1).is_err());
    }
}
