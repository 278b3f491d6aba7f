//! One function per subcommand. Each returns a result document, an exit
//! code and a short human summary for stderr.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::io::Read;

use couplings::campaign::{stratified_pairs, uniform_scenarios};
use couplings::conditionalization::{build, tree_example, ConditionalizationError, Stratum};
use couplings::connections::{
    rationalize, test_role, Counterexample, ScenarioSampler, DEFAULT_MAX_DENOMINATOR,
};
use couplings::distributions::NoSignalingReport;
use couplings::inequalities::report;
use couplings::rational::{format_rational, parse_rational, to_f64, Rational};
use couplings::{
    check_no_signaling, connection_range, coupling_exists, identity_coupling_exists,
    scenario_from_correlations, singlet_correlations, uninformativeness_report_pairs,
    verify_conditionals, ConditionDistribution, ConditionalCoupling, Connection, ConnectionVector,
    ConstructionKind, CorrelationVector, Family, FamilyReport, Role, SetRole, SettingVector,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::document::{
    rational_value, DocumentError, ResultDocument, ScenarioDocument, WitnessDocument,
};
use crate::{Cli, Command, DemoArg, FamilyArg, KindArg, RoleArg, EXIT_AFFIRMATIVE, EXIT_NEGATIVE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Usage(String),
}

pub struct CommandOutput {
    pub document: ResultDocument,
    pub code: i32,
    pub summary: String,
}

fn exit_for(affirmative: bool) -> i32 {
    if affirmative {
        EXIT_AFFIRMATIVE
    } else {
        EXIT_NEGATIVE
    }
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Check {
            correlations,
            family,
        } => check(cli, stdin, correlations.as_deref(), family),
        Command::Couple {
            identity,
            connections,
            range,
        } => couple(
            cli,
            stdin,
            *identity,
            connections.as_deref(),
            range.as_deref(),
        ),
        Command::Connections { conn, family, role } => {
            connections_cmd(cli, conn.as_deref(), *family, *role)
        }
        Command::Conditionalize { pi, kind } => conditionalize(cli, stdin, pi.as_deref(), *kind),
        Command::Demo { name, p, q, pi } => demo(cli, *name, p, q, pi),
    }
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<ScenarioDocument, CliError> {
    let mut text = String::new();
    match cli.input.as_deref() {
        Some(path) if path.as_os_str() != "-" => {
            text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        _ => {
            stdin
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
        }
    }
    Ok(ScenarioDocument::parse(&text)?)
}

fn family_of(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Bell => Family::Bell,
        FamilyArg::Quantum => Family::Quantum,
        FamilyArg::Tsirelson => Family::Tsirelson,
    }
}

fn split4(text: &str, what: &str) -> Result<[String; 4], CliError> {
    let parts: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
    parts.try_into().map_err(|p: Vec<String>| {
        CliError::Usage(format!("{what} needs 4 values, got {}", p.len()))
    })
}

/// Four exact rationals; anything else is refused with a hint.
fn exact4(text: &str, what: &str) -> Result<[Rational; 4], CliError> {
    let parts = split4(text, what)?;
    let mut out = Vec::with_capacity(4);
    for p in &parts {
        out.push(parse_rational(p).map_err(|e| {
            CliError::Usage(format!(
                "{what}: {e}; rationalize first (e.g. 0.7071 or 7071/10000)"
            ))
        })?);
    }
    Ok(out.try_into().expect("four values"))
}

fn rational_list(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(rational_value).collect())
}

fn family_report_json(r: &FamilyReport) -> Value {
    json!({
        "family": r.family.name(),
        "satisfied": r.satisfied,
        "max_lhs": r.max_lhs,
        "bound": r.bound,
        "tight": r.tight,
        "exact_max_lhs": r.exact_max_lhs.as_ref().map(rational_value),
    })
}

fn no_signaling_json(r: &NoSignalingReport) -> Value {
    json!({
        "holds": r.holds,
        "violations": r.violations.iter().map(|v| json!({
            "name": v.name,
            "left": rational_value(&v.left),
            "right": rational_value(&v.right),
        })).collect::<Vec<_>>(),
    })
}

fn correlations_json(c: &CorrelationVector) -> Value {
    let mut m = Map::new();
    m.insert("values".into(), json!(c.values()));
    if let Some(exact) = c.exact() {
        m.insert("exact".into(), rational_list(exact));
    }
    Value::Object(m)
}

fn check(
    cli: &Cli,
    stdin: &mut dyn Read,
    correlations: Option<&str>,
    requested: &[FamilyArg],
) -> Result<CommandOutput, CliError> {
    let mut doc = ResultDocument::new("check");
    let input = match correlations {
        Some(text) => {
            let parts = split4(text, "--correlations")?;
            let mut values = [0.0f64; 4];
            for (v, p) in values.iter_mut().zip(&parts) {
                *v = p
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Usage(format!("`{p}` is not a finite number")))?;
            }
            let exact = values.map(|x| rationalize(x, DEFAULT_MAX_DENOMINATOR));
            let s =
                scenario_from_correlations(&exact).map_err(|e| CliError::Usage(e.to_string()))?;
            doc.arg("correlations", json!(values));
            ScenarioDocument::from_scenario(&s, Some(json!({ "source_correlations": values })))
        }
        None => read_input(cli, stdin)?,
    };
    let s = input.to_scenario()?;
    let families: Vec<Family> = if requested.is_empty() {
        Family::ALL.to_vec()
    } else {
        requested.iter().map(|&f| family_of(f)).collect()
    };
    doc.arg(
        "family",
        json!(families.iter().map(|f| f.name()).collect::<Vec<_>>()),
    )
    .arg("tolerance", cli.tolerance);

    let c = s.correlations();
    let ns = check_no_signaling(&s);
    doc.report("no_signaling", no_signaling_json(&ns))
        .report("correlations", correlations_json(&c))
        .verdict("no_signaling", ns.holds);
    let mut summary = String::new();
    let mut all = true;
    let mut families_json = Map::new();
    for family in Family::ALL {
        let r = report(&c, family, cli.tolerance);
        families_json.insert(family.name().into(), family_report_json(&r));
        doc.verdict(family.name(), r.satisfied);
        if families.contains(&family) {
            all &= r.satisfied;
        }
        let _ = writeln!(
            summary,
            "{:<9} {} (max {:.12} vs bound {:.12})",
            family.name(),
            if r.satisfied { "satisfied" } else { "violated" },
            r.max_lhs,
            r.bound
        );
    }
    let _ = writeln!(
        summary,
        "no-signaling {}",
        if ns.holds { "holds" } else { "fails" }
    );
    doc.report("families", Value::Object(families_json));
    doc.command.input = Some(input);
    Ok(CommandOutput {
        document: doc,
        code: exit_for(all),
        summary,
    })
}

fn couple(
    cli: &Cli,
    stdin: &mut dyn Read,
    identity: bool,
    connections: Option<&str>,
    range: Option<&str>,
) -> Result<CommandOutput, CliError> {
    let input = read_input(cli, stdin)?;
    let s = input.to_scenario()?;
    let mut doc = ResultDocument::new("couple");
    let out = if let Some(name) = range {
        let which = Connection::from_name(name)
            .ok_or_else(|| CliError::Usage(format!("unknown connection `{name}`")))?;
        let (lo, hi) = connection_range(&s, which);
        doc.arg("range", which.name()).report(
            "range",
            json!({ "connection": which.name(), "lo": rational_value(&lo), "hi": rational_value(&hi) }),
        );
        let summary = format!(
            "<{}> ranges over [{}, {}]\n",
            which.name(),
            format_rational(&lo),
            format_rational(&hi)
        );
        (EXIT_AFFIRMATIVE, summary)
    } else {
        let (mode, conn) = if identity {
            doc.arg("identity", true);
            ("identity", Some(ConnectionVector::identity()))
        } else if let Some(text) = connections {
            let targets = exact4(text, "--connections")?;
            let conn =
                ConnectionVector::new(targets).map_err(|e| CliError::Usage(e.to_string()))?;
            doc.arg("connections", rational_list(conn.targets()));
            ("connections", Some(conn))
        } else {
            ("unconstrained", None)
        };
        let verdict = if identity {
            identity_coupling_exists(&s)
        } else {
            coupling_exists(&s, conn.as_ref())
        };
        doc.report("mode", json!(mode))
            .verdict("feasible", verdict.feasible);
        if let Some(w) = &verdict.witness {
            doc.witnesses.insert(
                "coupling".into(),
                WitnessDocument::new(w, &s, conn.as_ref().map(|c| c.targets())),
            );
        }
        let summary = format!(
            "{mode} coupling {}\n",
            if verdict.feasible {
                "exists"
            } else {
                "does not exist"
            }
        );
        (exit_for(verdict.feasible), summary)
    };
    doc.command.input = Some(input);
    Ok(CommandOutput {
        document: doc,
        code: out.0,
        summary: out.1,
    })
}

fn counterexample_json(c: &Counterexample) -> Value {
    json!({
        "failed": c.failed.name(),
        "sample_index": c.sample_index,
        "correlations": rational_list(&c.correlations),
        "scenario": serde_json::to_value(ScenarioDocument::from_scenario(&c.scenario, None))
            .expect("documents serialize"),
        "family_report": family_report_json(&c.family_report),
        "detail": c.detail,
    })
}

fn set_role_json(r: &SetRole) -> Value {
    json!({
        "role": r.role.name(),
        "family": r.family.name(),
        "verdict": r.verdict,
        "samples_checked": r.samples_checked,
        "counterexample": r.counterexample.as_ref().map(counterexample_json),
    })
}

fn connections_cmd(
    cli: &Cli,
    conn: Option<&str>,
    family: FamilyArg,
    role: RoleArg,
) -> Result<CommandOutput, CliError> {
    let family = family_of(family);
    let role = match role {
        RoleArg::Fitting => Role::Fitting,
        RoleArg::Forcing => Role::Forcing,
        RoleArg::Equivalent => Role::Equivalent,
    };
    let conn = match conn {
        Some(text) => Some(
            ConnectionVector::new(exact4(text, "--conn")?)
                .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        None => None,
    };
    let n = cli.n.unwrap_or(100);
    let sampler = ScenarioSampler::new(cli.seed).with_tolerance(cli.tolerance);
    let r = test_role(role, &sampler, conn.as_ref(), family, n)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut doc = ResultDocument::new("connections");
    doc.arg("family", family.name())
        .arg("role", role.name())
        .arg("n", n)
        .arg("seed", cli.seed)
        .arg("tolerance", cli.tolerance)
        .arg(
            "conn",
            conn.as_ref()
                .map_or(Value::Null, |c| rational_list(c.targets())),
        )
        .verdict(role.name(), r.verdict)
        .report("set_role", set_role_json(&r));
    if let Some(w) = r
        .counterexample
        .as_ref()
        .and_then(|c| c.witness.as_ref().map(|w| (w, c)))
    {
        let targets = conn.as_ref().map(|c| c.targets());
        doc.witnesses.insert(
            "counterexample".into(),
            WitnessDocument::new(w.0, &w.1.scenario, targets),
        );
    }
    let mut summary = format!(
        "{} set for {}: {} after {} samples\n",
        role.name(),
        family.name(),
        r.verdict,
        r.samples_checked
    );
    if let Some(c) = &r.counterexample {
        let _ = writeln!(
            summary,
            "counterexample at sample {}: {}",
            c.sample_index, c.detail
        );
    }
    Ok(CommandOutput {
        document: doc,
        code: exit_for(r.verdict),
        summary,
    })
}

fn output_symbol(v: i8) -> char {
    match v.signum() {
        1 => '+',
        -1 => '-',
        _ => '0',
    }
}

fn table_json(cc: &ConditionalCoupling) -> Value {
    let cells: Map<String, Value> = cc
        .cells()
        .iter()
        .map(|((ctx, out), m)| {
            let key = format!(
                "{}:{}",
                ctx.label(),
                out.iter().map(|&v| output_symbol(v)).collect::<String>()
            );
            (key, rational_value(m))
        })
        .collect();
    Value::Object(cells)
}

fn context_map(values: &[Rational; 4]) -> Value {
    let m: Map<String, Value> = couplings::Context::ALL
        .into_iter()
        .map(|c| (c.label().to_string(), rational_value(&values[c.index()])))
        .collect();
    Value::Object(m)
}

fn conditionalize(
    cli: &Cli,
    stdin: &mut dyn Read,
    pi: Option<&str>,
    kind: KindArg,
) -> Result<CommandOutput, CliError> {
    let pi = match pi {
        Some(text) => ConditionDistribution::new(exact4(text, "--pi")?).map_err(|e| match e {
            ConditionalizationError::NonPositiveCondition { .. } => CliError::Usage(format!(
                "{e}. A context that never occurs has no conditional distribution, so it \
                 cannot be treated as a value of the condition variable"
            )),
            other => CliError::Usage(other.to_string()),
        })?,
        None => ConditionDistribution::uniform(),
    };
    let kind = match kind {
        KindArg::Simple => ConstructionKind::Simple,
        KindArg::Even => ConstructionKind::EvenPartition,
        KindArg::Zero => ConstructionKind::ZeroPadded,
    };
    let input = read_input(cli, stdin)?;
    let s = input.to_scenario()?;
    let cc = build(kind, &s, &pi);
    let verified = verify_conditionals(&cc, &s);
    let mut doc = ResultDocument::new("conditionalize");
    doc.arg("kind", kind.name())
        .arg("pi", rational_list(pi.as_array()))
        .verdict("verified", verified)
        .report("kind", json!(kind.name()))
        .report("table", table_json(&cc))
        .report("condition_marginal", context_map(&cc.condition_marginal()))
        .report("cells", json!(cc.cells().len()));
    doc.command.input = Some(input);
    let summary = format!(
        "{} construction with {} cells: conditionals {}\n",
        kind.name(),
        cc.cells().len(),
        if verified {
            "recovered"
        } else {
            "NOT recovered"
        }
    );
    Ok(CommandOutput {
        document: doc,
        code: exit_for(verified),
        summary,
    })
}

fn demo(cli: &Cli, name: DemoArg, p: &str, q: &str, pi: &str) -> Result<CommandOutput, CliError> {
    match name {
        DemoArg::Fine => demo_fine(cli),
        DemoArg::TsirelsonTight => demo_tsirelson(cli),
        DemoArg::Uninformative => demo_uninformative(cli),
        DemoArg::Tree => demo_tree(p, q, pi),
    }
}

fn demo_fine(cli: &Cli) -> Result<CommandOutput, CliError> {
    let n = cli.n.unwrap_or(1000);
    let scenarios = uniform_scenarios(cli.seed, n as usize);
    let mut agreements = 0u64;
    let mut bell = 0u64;
    let mut disagreements = Vec::new();
    for s in &scenarios {
        let satisfied = couplings::bell_ch_fine(&s.correlations()).satisfied;
        let feasible = identity_coupling_exists(s).feasible;
        bell += u64::from(satisfied);
        if satisfied == feasible {
            agreements += 1;
        } else {
            disagreements.push(rational_list(&s.correlations().to_rationals()));
        }
    }
    let all = agreements == n;
    let mut doc = ResultDocument::new("demo");
    doc.arg("name", "fine")
        .arg("n", n)
        .arg("seed", cli.seed)
        .verdict("agreement", all)
        .report(
            "fine",
            json!({
                "samples": n,
                "agreements": agreements,
                "bell_satisfied": bell,
                "disagreements": disagreements,
            }),
        );
    let summary = format!(
        "identity coupling exists iff Bell holds: agreement {agreements}/{n} \
         ({bell} Bell-satisfying scenarios)\n"
    );
    Ok(CommandOutput {
        document: doc,
        code: exit_for(all),
        summary,
    })
}

fn in_plane(angle: f64) -> SettingVector {
    SettingVector::new(angle.cos(), angle.sin(), 0.0).expect("unit vector")
}

fn demo_tsirelson(cli: &Cli) -> Result<CommandOutput, CliError> {
    let c = singlet_correlations(
        &in_plane(0.0),
        &in_plane(FRAC_PI_2),
        &in_plane(FRAC_PI_4),
        &in_plane(-FRAC_PI_4),
    );
    let mut doc = ResultDocument::new("demo");
    doc.arg("name", "tsirelson-tight")
        .arg("tolerance", cli.tolerance)
        .report("correlations", correlations_json(&c))
        .report(
            "settings_degrees",
            json!({ "a1": 0.0, "a2": 90.0, "b1": 45.0, "b2": -45.0 }),
        );
    let mut summary = String::from("singlet at the standard CHSH angles\n");
    let mut families = Map::new();
    for family in Family::ALL {
        let r = report(&c, family, cli.tolerance);
        let _ = writeln!(
            summary,
            "{:<9} max {:.15} bound {:.15} {}",
            family.name(),
            r.max_lhs,
            r.bound,
            if r.tight {
                "tight"
            } else if r.satisfied {
                "slack"
            } else {
                "violated"
            }
        );
        families.insert(family.name().into(), family_report_json(&r));
        doc.verdict(&format!("{}_satisfied", family.name()), r.satisfied);
        doc.verdict(&format!("{}_tight", family.name()), r.tight);
    }
    doc.report("families", Value::Object(families));
    let ok = doc.verdicts["tsirelson_tight"]
        && doc.verdicts["quantum_tight"]
        && !doc.verdicts["bell_satisfied"];
    Ok(CommandOutput {
        document: doc,
        code: exit_for(ok),
        summary,
    })
}

fn demo_uninformative(cli: &Cli) -> Result<CommandOutput, CliError> {
    let n = cli.n.unwrap_or(500);
    let per_stratum = n.div_ceil(Stratum::ALL.len() as u64) as usize;
    let pairs = stratified_pairs(cli.seed, per_stratum);
    let report =
        uninformativeness_report_pairs(&pairs).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut strata = Map::new();
    let mut summary = format!(
        "{} (scenario, pi) pairs x {} constructions\n",
        pairs.len(),
        ConstructionKind::ALL.len()
    );
    for (stratum, (ok, total)) in report.by_stratum() {
        strata.insert(
            stratum.name().into(),
            json!({ "succeeded": ok, "attempted": total }),
        );
        let _ = writeln!(summary, "{:<20} {ok}/{total}", stratum.name());
    }
    let all = report.succeeded() == report.attempted();
    let _ = writeln!(summary, "success rate {:.3}", report.success_rate());
    let mut doc = ResultDocument::new("demo");
    doc.arg("name", "uninformative")
        .arg("n", n)
        .arg("seed", cli.seed)
        .verdict("all_verified", all)
        .report(
            "uninformative",
            json!({
                "pairs": pairs.len(),
                "attempted": report.attempted(),
                "succeeded": report.succeeded(),
                "success_rate": report.success_rate(),
                "by_stratum": strata,
            }),
        );
    Ok(CommandOutput {
        document: doc,
        code: exit_for(all),
        summary,
    })
}

fn demo_tree(p: &str, q: &str, pi: &str) -> Result<CommandOutput, CliError> {
    let parse = |flag: &str, text: &str| {
        parse_rational(text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
    };
    let (p, q, pi) = (parse("p", p)?, parse("q", q)?, parse("pi", pi)?);
    let t = tree_example(&p, &q, &pi).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut doc = ResultDocument::new("demo");
    doc.arg("name", "tree")
        .arg("p", rational_value(&p))
        .arg("q", rational_value(&q))
        .arg("pi", rational_value(&pi))
        .verdict("recovered", t.recovered == (p.clone(), q.clone()))
        .verdict("identity_possible", t.identity_possible)
        .report(
            "tree",
            json!({
                "joint": {
                    "a": { "c": rational_value(&t.joint[0][0]), "d": rational_value(&t.joint[0][1]) },
                    "b": { "c": rational_value(&t.joint[1][0]), "d": rational_value(&t.joint[1][1]) },
                },
                "outcome_marginal": { "c": rational_value(&t.outcome_marginal[0]), "d": rational_value(&t.outcome_marginal[1]) },
                "recovered": { "a": rational_value(&t.recovered.0), "b": rational_value(&t.recovered.1) },
                "coupling_range": { "lo": rational_value(&t.coupling_range.0), "hi": rational_value(&t.coupling_range.1) },
                "independent": rational_value(&t.independent),
            }),
        );
    let summary = format!(
        "Pr[X=c] = {} ({:.6}); conditionals recovered as {} and {}; \
         Pr[X'_a = c, X'_b = c] ranges over [{}, {}]\n",
        format_rational(&t.outcome_marginal[0]),
        to_f64(&t.outcome_marginal[0]),
        format_rational(&t.recovered.0),
        format_rational(&t.recovered.1),
        format_rational(&t.coupling_range.0),
        format_rational(&t.coupling_range.1),
    );
    Ok(CommandOutput {
        document: doc,
        code: EXIT_AFFIRMATIVE,
        summary,
    })
}
