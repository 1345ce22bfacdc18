//! Worked examples checked against the bundled fixtures.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;

use credal_core::decide::{
    admissible_set, anytime_decide_fh, anytime_decide_nilsson, bounds_snapshot_system, domain_inequalities,
    e_admissible, exclusivity_statements, DecisionProblem,
};
use credal_core::deduction::{anytime_deduce, rule_conjunction, rule_forward_implication, rule_trivial};
use credal_core::format::{load_condition_tuples, load_database, load_kb, load_pool, load_problem};
use credal_core::kernel::{
    lp_feasible, lp_optimize, parse_rational, Interval, LinearConstraint, LinearSystem, Rational, Relation, Sense,
};
use credal_core::maxent::{
    centroid, conjunction_segment, eccentricity, expected_ecc_mc, maxent_conjunction, maxent_on_segment,
    modus_ponens_segment, EccMode,
};
use credal_core::pdb::{
    anytime_decide_pdb, extension_system, is_refinement, project_db, project_table, scheme_ladder, Scheme,
};
use credal_core::worlds::{build_system, tree_add_sentence, tree_init};
use credal_core::Formula;

use crate::output::Printer;

const BEACH_KB: &str = include_str!("../../../fixtures/beach_kb.json");
const BEACH_PROBLEM: &str = include_str!("../../../fixtures/beach_problem.json");
const BEACH_POOL: &str = include_str!("../../../fixtures/beach_pool.json");
const THREE_POOL: &str = include_str!("../../../fixtures/three_conditions_pool.json");
const THREE_PROBLEM: &str = include_str!("../../../fixtures/three_conditions_problem.json");
const DB: &str = include_str!("../../../fixtures/rain_trains_db.json");
const DB_PROBLEM: &str = include_str!("../../../fixtures/rain_trains_problem.json");
const DB_CONDITIONS: &str = include_str!("../../../fixtures/rain_trains_conditions.json");

type Check = Result<(), String>;
type Named = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn r(s: &str) -> Rational {
    parse_rational(s).expect("literal rational")
}

fn iv(l: &str, u: &str) -> Interval {
    Interval::new(r(l), r(u)).expect("literal interval")
}

fn f(s: &str) -> Formula {
    Formula::parse(s).expect("literal formula")
}

fn err(e: credal_core::Error) -> String {
    e.to_string()
}

fn beach_problem() -> Result<DecisionProblem, String> {
    load_problem(BEACH_PROBLEM).map_err(err)
}

fn rules_on_beach_statements() -> Check {
    let kb = load_kb(BEACH_KB).map_err(err)?.kb;
    let s = &kb.statements;
    ensure!(rule_trivial(f("Rain")).bounds.is_unit(), "(8) is not [0, 1]");
    let nine = rule_forward_implication(&s[0], &s[1]).map_err(err)?;
    ensure!(nine.bounds == iv(".35", ".6"), "(9) = {}", nine.bounds);
    let ten = rule_conjunction(&s[3], &s[4]);
    ensure!(ten.bounds == iv(".9", "1"), "(10) = {}", ten.bounds);
    let eleven = rule_forward_implication(&ten, &s[2]).map_err(err)?;
    ensure!(eleven.bounds == iv(".55", ".95"), "(11) = {}", eleven.bounds);
    Ok(())
}

fn beach_target_trace() -> Check {
    let kb = load_kb(BEACH_KB).map_err(err)?.kb;
    let trace = anytime_deduce(&kb, 10).map_err(err)?;
    let targets: Vec<&Interval> = trace.target_intervals();
    ensure!(*targets[0] == Interval::unit(), "first target interval {}", targets[0]);
    ensure!(*targets[1] == iv(".35", ".6"), "second target interval {}", targets[1]);
    let derived: Vec<&Interval> = trace.derived().map(|s| &s.bounds).collect();
    ensure!(derived.contains(&&iv(".9", "1")), "(10) not derived");
    ensure!(derived.contains(&&iv(".55", ".95")), "(11) not derived");
    ensure!(trace.final_interval() == Some(&iv("11/20", "3/5")), "final {:?}", trace.final_interval());
    Ok(())
}

fn beach_domains() -> Check {
    let problem = beach_problem()?;
    let simplex = bounds_snapshot_system(&problem, &[Interval::unit(), Interval::unit()]).map_err(err)?;
    let row = &domain_inequalities(&problem, 1, &simplex)[0];
    // .8 p(Rain) - .8 p(No rain) >= 0 is p(Rain) >= 1/2 on the simplex.
    ensure!(row.coefficients == vec![r(".8"), r("-.8")] && row.relation == Relation::Ge, "D(Do not go) row {row}");
    let narrowed = bounds_snapshot_system(&problem, &[iv(".55", ".95"), Interval::unit()]).map_err(err)?;
    ensure!(!e_admissible(&problem, 0, &narrowed).map_err(err)?, "Go admissible on [.55, .95]");
    ensure!(e_admissible(&problem, 1, &narrowed).map_err(err)?, "Do not go inadmissible on [.55, .95]");
    Ok(())
}

fn beach_fh_decision() -> Check {
    let problem = beach_problem()?;
    let input = load_kb(BEACH_KB).map_err(err)?;
    let conditions = input.conditions.ok_or("fixture lacks conditions")?;
    let out = anytime_decide_fh(&problem, input.kb.statements, conditions, 50).map_err(err)?;
    for e in &out {
        let unique = e.admissible.actions == vec![1];
        let reached = *e.intervals[0].lower() >= r("1/2");
        ensure!(
            unique == reached,
            "step {}: admissible {:?} with Rain {}",
            e.step,
            e.admissible.actions,
            e.intervals[0]
        );
    }
    ensure!(out.last().map(|e| e.admissible.actions.clone()) == Some(vec![1]), "Do not go never unique");
    Ok(())
}

fn sum_row(n: usize, ones: &[usize], rel: Relation, rhs: &str) -> LinearConstraint {
    let zero_based: Vec<usize> = ones.iter().map(|i| i - 1).collect();
    LinearConstraint::sum_of(n, &zero_based, rel, r(rhs))
}

/// `Σ_S 0 + Σ_T 1 >= Σ_S .8 + Σ_T .2` for Go, or the reverse for Do not go,
/// where S are the Rain worlds.
fn eu_row(n: usize, rain: &[usize], go: bool) -> LinearConstraint {
    let mut coefficients = vec![Rational::from_integer(0.into()); n];
    for (k, c) in coefficients.iter_mut().enumerate() {
        let gap = if rain.contains(&(k + 1)) { r("-.8") } else { r(".8") };
        *c = if go { gap } else { -gap };
    }
    LinearConstraint::new(coefficients, Relation::Ge, r("0"))
}

fn column_multiset(rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut cols: Vec<Vec<u8>> = (0..width).map(|c| rows.iter().map(|row| row[c]).collect()).collect();
    cols.sort();
    cols
}

fn nilsson_beach() -> Check {
    let problem = beach_problem()?;
    let setup = load_pool(BEACH_POOL).map_err(err)?;
    let mut tree = tree_init(setup.layout.clone()).map_err(err)?;
    for k in 0..2 {
        tree = tree_add_sentence(&tree, setup.pool[k].0.clone()).map_err(err)?;
    }
    ensure!(tree.leaves().len() == 5, "{} world classes after (3), (5)", tree.leaves().len());
    // Rain, (3), (5) per column as in the first displayed system.
    let expected5 = vec![vec![0, 0, 1, 0, 1], vec![0, 1, 1, 1, 1], vec![1, 0, 0, 1, 1]];
    ensure!(column_multiset(&tree.matrix().rows()) == column_multiset(&expected5), "5-world matrix differs");
    tree = tree_add_sentence(&tree, setup.pool[2].0.clone()).map_err(err)?;
    ensure!(tree.leaves().len() == 8, "{} world classes after (4)", tree.leaves().len());
    let expected8 = vec![
        vec![1, 1, 1, 1, 0, 0, 0, 0],
        vec![1, 1, 1, 1, 1, 1, 1, 0],
        vec![1, 1, 0, 0, 0, 1, 0, 1],
        vec![1, 0, 1, 0, 1, 0, 0, 1],
    ];
    ensure!(column_multiset(&tree.matrix().rows()) == column_multiset(&expected8), "8-world matrix differs");

    // The displayed systems, written out by hand.
    let first = LinearSystem::simplex(5)
        .with(sum_row(5, &[2, 3, 4, 5], Relation::Ge, ".65"))
        .with(sum_row(5, &[2, 3, 4, 5], Relation::Le, ".95"))
        .with(sum_row(5, &[1, 4, 5], Relation::Ge, ".95"));
    ensure!(lp_feasible(&first.extended([eu_row(5, &[3, 5], true)])).map_err(err)?, "5-world Go system infeasible");
    let second = LinearSystem::simplex(8)
        .with(sum_row(8, &[1, 2, 3, 4, 5, 6, 7], Relation::Ge, ".65"))
        .with(sum_row(8, &[1, 2, 3, 4, 5, 6, 7], Relation::Le, ".95"))
        .with(sum_row(8, &[1, 2, 6, 8], Relation::Ge, ".95"))
        .with(sum_row(8, &[1, 3, 5, 8], Relation::Ge, ".95"));
    let rain8 = [1, 2, 3, 4];
    ensure!(lp_feasible(&second.extended([eu_row(8, &rain8, false)])).map_err(err)?, "8-world Do not go infeasible");
    ensure!(!lp_feasible(&second.extended([eu_row(8, &rain8, true)])).map_err(err)?, "8-world Go feasible");

    let out = anytime_decide_nilsson(&problem, setup).map_err(err)?;
    let sets: Vec<Vec<usize>> = out.iter().map(|e| e.admissible.actions.clone()).collect();
    ensure!(sets == vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![1]], "emitted {sets:?}");
    Ok(())
}

fn condition_first_tree() -> Check {
    let setup = load_pool(THREE_POOL).map_err(err)?;
    let problem = load_problem(THREE_PROBLEM).map_err(err)?;
    let mut tree = tree_init(setup.layout.clone()).map_err(err)?;
    ensure!(tree.leaves().len() == 3, "{} live nodes at level n", tree.leaves().len());
    for (sentence, _) in &setup.pool {
        tree = tree_add_sentence(&tree, sentence.clone()).map_err(err)?;
    }
    let expected = vec![
        vec![1, 1, 0, 0, 0, 0],
        vec![0, 0, 1, 1, 0, 0],
        vec![0, 0, 0, 0, 1, 1],
        vec![1, 1, 1, 0, 1, 0],
        vec![1, 0, 0, 1, 0, 1],
    ];
    ensure!(column_multiset(&tree.matrix().rows()) == column_multiset(&expected), "6-world matrix differs");
    let bounds: Vec<(usize, Interval)> =
        setup.pool.iter().map(|(s, i)| (tree.sentence_index(s).expect("added"), i.clone())).collect();
    let built = build_system(&tree, &bounds).map_err(err)?;
    let c1 = built.sentence_objective(0);
    let min = lp_optimize(&built.system, &c1, Sense::Minimize).map_err(err)?;
    ensure!(min.value == r("7/10"), "min p(c1) = {}", min.value);
    let out = anytime_decide_nilsson(&problem, setup).map_err(err)?;
    ensure!(out.last().map(|e| e.admissible.actions.clone()) == Some(vec![0]), "a1 not uniquely admissible");
    for n in 2..=6usize {
        let conds: Vec<Formula> = (1..=n).map(|i| Formula::atom(format!("c{i}"))).collect();
        let count = exclusivity_statements(&conds).map_err(err)?.len();
        ensure!(count == n * (n - 1) / 2 + 1, "{count} exclusivity statements for n = {n}");
    }
    Ok(())
}

fn maxent_numbers() -> Check {
    let a = r(".9");
    let b = r(".1");
    let seg = conjunction_segment(&a, &b).map_err(err)?;
    let report = eccentricity(&maxent_conjunction(&a, &b), &seg).map_err(err)?;
    ensure!(report.ecc_squared == r("16/25"), "ecc^2 = {}", report.ecc_squared);
    for i in 1..20 {
        for j in 1..20 {
            let x = Rational::new(i.into(), 20.into());
            let y = Rational::new(j.into(), 20.into());
            if y < Rational::from_integer(1.into()) - &x {
                continue;
            }
            let seg = modus_ponens_segment(&x, &y).map_err(err)?;
            if seg.is_degenerate() {
                continue;
            }
            let m = maxent_on_segment(&seg).map_err(err)?;
            let ce = centroid(&seg);
            for k in 0..4 {
                let gap = (m[k] - credal_core::kernel::to_f64(&ce[k])).abs();
                ensure!(gap < 1e-9, "modus ponens maxent off the centroid at ({x}, {y})");
            }
        }
    }
    let maxent = expected_ecc_mc(EccMode::MaxentPoint, 1_000_000, 7);
    ensure!((maxent - 1.0 / 3.0).abs() <= 0.01, "E ecc(m) = {maxent}");
    let uniform = expected_ecc_mc(EccMode::UniformPoint, 1_000_000, 7);
    ensure!((uniform - 0.5).abs() <= 0.005, "E ecc(p) = {uniform}");
    Ok(())
}

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn database() -> Check {
    let db = load_database(DB).map_err(err)?;
    let problem = load_problem(DB_PROBLEM).map_err(err)?;
    let tuples = load_condition_tuples(DB_CONDITIONS, &problem).map_err(err)?;
    let t = db.tables();
    let p5 = project_table(&t[1], &set(&["Trains"])).map_err(err)?;
    let p6 = project_table(&t[2], &set(&["Temperature"])).map_err(err)?;
    let p7 = project_table(&t[0], &set(&["Rain"])).map_err(err)?;
    ensure!(p5.cells() == [r(".5"), r(".5")], "p5 = {:?}", p5.cells());
    ensure!(p6.cells() == [r(".7"), r(".2"), r(".1")], "p6 = {:?}", p6.cells());
    ensure!(p7.cells() == [r(".5"), r(".5")], "p7 = {:?}", p7.cells());
    let trains_temp = Scheme::new([["Trains"], ["Temperature"]]).map_err(err)?;
    ensure!(is_refinement(&trains_temp, &db.scheme()), "{{Trains}}, {{Temperature}} is not a refinement");
    let projected = project_db(&db, &trains_temp).map_err(err)?;
    ensure!(projected.tables().contains(&p5) && projected.tables().contains(&p6), "projection is not p5, p6");

    let full = extension_system(&db, None).map_err(err)?;
    ensure!(full.variable_count() == 48, "{} unknowns", full.variable_count());
    ensure!(full.system.constraints.len() == 20, "{} equations", full.system.constraints.len());

    let ladder = scheme_ladder(&db, &set(&["Rain", "Trains"])).map_err(err)?;
    let rung1 = Scheme::new([["Rain"], ["Trains"]]).map_err(err)?;
    let rung2 = Scheme::new([["Rain", "No Phones"], ["No Phones", "Trains"]]).map_err(err)?;
    ensure!(ladder == vec![rung1.clone(), rung2.clone(), db.scheme()], "ladder {ladder:?}");

    let singles = project_db(&db, &rung1).map_err(err)?;
    let credal1 = extension_system(&singles, None).map_err(err)?.credal(&tuples).map_err(err)?;
    ensure!(admissible_set(&problem, &credal1).map_err(err)?.actions == vec![0, 1], "singleton rung");

    let pair = project_db(&db, &rung2).map_err(err)?;
    let over = ["Rain".to_string(), "No Phones".to_string(), "Trains".to_string()];
    let ext2 = extension_system(&pair, Some(&over)).map_err(err)?;
    ensure!(ext2.variable_count() == 8 && ext2.system.constraints.len() == 8, "rung-2 system shape");
    let first = &ext2.system.constraints[0];
    let ones: Vec<usize> = (0..8).filter(|&k| first.coefficients[k] == r("1")).collect();
    ensure!(
        ext2.tuple(ones[0]) == ["yes", "true", "yes"]
            && ext2.tuple(ones[1]) == ["yes", "true", "no"]
            && first.rhs == r(".4"),
        "first rung-2 equation {first}"
    );
    let credal2 = ext2.credal(&tuples).map_err(err)?;
    let row = &domain_inequalities(&problem, 1, &credal2)[0];
    let gaps = [r("3/4") - r("1/2"), r("7/8"), r("1/8") - r("1"), r("1/2") - r("5/8")];
    for (j, vars) in credal2.condition_map.iter().enumerate() {
        ensure!(vars.iter().all(|&v| row.coefficients[v] == gaps[j]), "Don't go row coefficient for condition {j}");
    }
    ensure!(admissible_set(&problem, &credal2).map_err(err)?.actions == vec![1], "{{p1, p2}} rung");
    let low = lp_optimize(&credal2.system, &credal2.condition_objective(0), Sense::Minimize).map_err(err)?;
    ensure!(low.value == r("1/20"), "min p(rain, train) = {}", low.value);

    let out = anytime_decide_pdb(&problem, &db, tuples).map_err(err)?;
    let sets: Vec<Vec<usize>> = out.iter().map(|e| e.admissible.actions.clone()).collect();
    ensure!(sets == vec![vec![0, 1], vec![1]], "ladder emitted {sets:?}");
    Ok(())
}

/// Runs every check, printing one line each. True when all pass.
pub fn run(printer: &Printer) -> bool {
    let checks: [Named; 8] = [
        ("inference rules on the beach statements", rules_on_beach_statements),
        ("beach target interval trace", beach_target_trace),
        ("beach action domains", beach_domains),
        ("deduction-driven beach decision", beach_fh_decision),
        ("worlds-driven beach decision", nilsson_beach),
        ("condition-first tree and exclusivity counts", condition_first_tree),
        ("eccentricity and maximum entropy", maxent_numbers),
        ("rain/trains database ladder", database),
    ];
    let mut all = true;
    for (name, check) in checks {
        let result = check();
        all &= result.is_ok();
        printer.record(
            || match &result {
                Ok(()) => format!("PASS {name}"),
                Err(why) => format!("FAIL {name}: {why}"),
            },
            || serde_json::json!({ "check": name, "pass": result.is_ok(), "detail": result.as_ref().err() }),
        );
    }
    all
}
