//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances and time limits are fixed.

mod common;

use std::time::{Duration, Instant};

use fuzzyrank_core::engine::{Engine, EngineConfig};
use fuzzyrank_core::eval::{
    compare_rankers, inter_judge_agreement, planted_corpus, AgreementRule, AgreementRules, JudgmentSet,
    PlantedCategory, Side, ANY_QUERY, PLANTED_QUERY,
};
use fuzzyrank_core::index::{load_index, save_index};
use fuzzyrank_core::ingest::{Corpus, RawArticle, ZoneKind};
use fuzzyrank_core::ontology::MatchType;
use fuzzyrank_core::scoring::{baseline_level, baseline_score, collect_occurrences, score_direct, RelevanceLevel};
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{make_doc, random_doc, random_zones, Oracle, QUERIES, TAXON_PHRASES};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn engine() -> Engine {
    Engine::new(EngineConfig::default()).expect("default config is valid")
}

fn not_relevant_agreement() -> Outcome {
    let r = inter_judge_agreement(&JudgmentSet::study(), ANY_QUERY, AgreementRules::default())
        .map_err(|e| e.to_string())?;
    let f = r.not_relevant_agreement;
    check(
        f.numerator == 7 && f.denominator == 10,
        format!("unanimous not-relevant agreement {f}, expected 7/10 (70.0%)"),
    )
}

fn relevant_agreement() -> Outcome {
    let js = JudgmentSet::study();
    let rules = |relevant| AgreementRules {
        relevant,
        ..AgreementRules::default()
    };
    let two = inter_judge_agreement(&js, ANY_QUERY, rules(AgreementRule::TwoOfThree)).map_err(|e| e.to_string())?;
    let una = inter_judge_agreement(&js, ANY_QUERY, rules(AgreementRule::Unanimous)).map_err(|e| e.to_string())?;
    let (hi, lo) = (two.relevant_agreement, una.relevant_agreement);
    // Hand tally under the default (2 of 3) rule: ginkgo 8 of 12, allosaurus 8 of 11.
    let mut tally = (0, 0);
    for q in ["ginkgo", "allosaurus"] {
        let r = inter_judge_agreement(&js, q, AgreementRules::default()).map_err(|e| e.to_string())?;
        let rows = r.rows.iter().filter(|r| r.side == Side::Relevant);
        tally.1 += rows.clone().count();
        tally.0 += rows.filter(|r| r.full_agreement).count();
    }
    let brackets = lo.value <= 0.40 && 0.40 <= hi.value;
    let default_matches = (hi.numerator, hi.denominator) == (16, 23) && tally == (16, 23);
    check(
        brackets && default_matches,
        format!(
            "unanimous {lo} <= 40% <= two-of-three {hi}; hand tally {}/{}",
            tally.0, tally.1
        ),
    )
}

fn baseline_thresholds() -> Outcome {
    let expected = |n: u32| match n {
        0 => RelevanceLevel::NotRelevant,
        1 | 2 => RelevanceLevel::Low,
        3 | 4 => RelevanceLevel::Medium,
        _ => RelevanceLevel::High,
    };
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(0u32..=10), |n| {
            proptest::prop_assert_eq!(baseline_level(n), expected(n));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    // The same step function through real documents, References excluded.
    let e = engine();
    let eq = e.expand("allosaurus");
    for n in 0..=10u32 {
        let body = vec!["Allosaurus bone."; n as usize].join(" ");
        let zones = vec![
            (ZoneKind::BodyLate, format!("Plain text. {body}")),
            (ZoneKind::References, "Allosaurus allosaurus.".to_string()),
        ];
        let doc = make_doc("b", &zones, e.pipeline());
        let b = baseline_score(&doc, &eq);
        if b.count != n || b.level != expected(n) {
            return Err(format!("{n} occurrences gave count {} and {:?}", b.count, b.level));
        }
    }
    Ok("counts 0..=10 map to NR, Low x2, Medium x2, High".into())
}

fn weight_table() -> Outcome {
    let e = engine();
    let score = |q: &str, zones: &[(ZoneKind, &str)]| {
        let zones: Vec<(ZoneKind, String)> = zones.iter().map(|(k, t)| (*k, t.to_string())).collect();
        let doc = make_doc("w", &zones, e.pipeline());
        score_direct(&doc, &e.expand(q), e.scoring())
    };
    let mut cases: Vec<(String, f64, f64)> = Vec::new();
    for (zone, w) in [
        (ZoneKind::Title, 12.0),
        (ZoneKind::Keywords, 12.0),
        (ZoneKind::Abstract, 10.0),
        (ZoneKind::ErsatzAbstract, 9.0),
        (ZoneKind::Caption, 8.0),
        (ZoneKind::BodyEarly, 4.0),
        (ZoneKind::BodyLate, 2.0),
        (ZoneKind::References, 0.0),
    ] {
        let s = score("allosaurus", &[(zone, "Allosaurus.")]);
        let expected = if zone == ZoneKind::References { 0.0 } else { w + 5.0 };
        cases.push((format!("{zone:?} exact1"), s.total, expected));
    }
    let s = score(
        "allosaurus",
        &[(ZoneKind::Caption, "Fig. 1. Allosaurus and Tyrannosaurus.")],
    );
    cases.push(("caption dampened".into(), s.total, 3.0 + 5.0));
    let s = score("Allosaurus fragilis", &[(ZoneKind::BodyLate, "Allosaurus fragilis.")]);
    cases.push(("exact2".into(), s.total, 2.0 + 10.0));
    let s = score("allosaurus", &[(ZoneKind::BodyLate, "Allosaurus fragilis.")]);
    cases.push(("child".into(), s.total, 2.0 + 3.0));
    let s = score("Allosaurus fragilis", &[(ZoneKind::BodyLate, "Allosaurus.")]);
    cases.push(("parent".into(), s.total, 2.0 + 2.0));
    let s = score(
        "allosaurus",
        &[(ZoneKind::BodyEarly, "Jurassic beds in Utah yield allosaurus.")],
    );
    cases.push(("context x5".into(), s.total, (4.0 + 5.0) * 5.0));
    let bad: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(n, got, want)| format!("{n}: {got} != {want}"))
        .collect();
    check(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} single-occurrence cases exact", cases.len())
        } else {
            bad.join("; ")
        },
    )
}

fn oracle_equivalence() -> Outcome {
    let e = engine();
    let oracle = Oracle::new(e.taxonomies());
    let queries: Vec<_> = QUERIES.iter().map(|q| e.expand(q)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let mut nonzero = 0;
    for case in 0..1000 {
        let doc = random_doc(&mut rng, e.pipeline(), 50);
        let eq = &queries[rng.gen_range(0..queries.len())];
        let got = score_direct(&doc, eq, e.scoring());
        let want = oracle.score(&doc, eq);
        let same = got.total.to_bits() == want.total.to_bits()
            && got.zone_component.to_bits() == want.zone.to_bits()
            && got.ontology_component.to_bits() == want.ontology.to_bits()
            && got.level == want.level;
        if !same {
            return Err(format!(
                "case {case}, query {:?}: scorer {} vs oracle {}",
                eq.query, got.total, want.total
            ));
        }
        nonzero += usize::from(want.total > 0.0);
    }
    Ok(format!("1000 cases bit-exact ({nonzero} with non-zero score)"))
}

fn planted_comparison() -> Outcome {
    let e = engine();
    let p = planted_corpus(42);
    let corpus = p.corpus(&e).map_err(|x| x.to_string())?;
    let r = compare_rankers(&e, &corpus, &[PLANTED_QUERY.to_string()], &p.judgments).map_err(|x| x.to_string())?;
    let fuzzy = r.fuzzy.at_least_one_judge;
    let base = r.baseline.at_least_one_judge;
    let gap = (fuzzy.value - base.value) * 100.0;

    // What the construction forces: one occurrence per planted mention, each
    // worth its zone weight plus 5 (Exact1), no context, no dampening.
    let (mut want_fuzzy, mut want_base) = (0, 0);
    for c in PlantedCategory::ALL {
        let pl = c.placement();
        let total = (pl.title * 17 + pl.abstract_ * 15 + pl.caption * 13 + pl.body_early * 9 + pl.body_late * 7) as f64;
        let fuzzy_level = match total {
            t if t >= 24.0 => RelevanceLevel::High,
            t if t >= 10.0 => RelevanceLevel::Medium,
            t if t > 0.0 => RelevanceLevel::Low,
            _ => RelevanceLevel::NotRelevant,
        };
        let count = pl.title + pl.abstract_ + pl.caption + pl.body_early + pl.body_late;
        want_fuzzy += c.count() * usize::from(fuzzy_level == c.level());
        want_base += c.count() * usize::from(baseline_level(count) == c.level());
    }
    let want_gap = (want_fuzzy as f64 - want_base as f64) / 30.0 * 100.0;
    check(
        fuzzy.value > base.value
            && gap >= 10.0
            && fuzzy.numerator as usize == want_fuzzy
            && base.numerator as usize == want_base,
        format!(
            "fuzzy {fuzzy} vs baseline {base}, gap {gap:.1} pp (construction: {want_fuzzy}/30 vs {want_base}/30, {want_gap:.1} pp)"
        ),
    )
}

/// Inserts one more query-term sentence into a random scored zone, either
/// into an existing zone's text or as a new zone.
fn add_one_occurrence(rng: &mut impl Rng, zones: &[(ZoneKind, String)], surface: &str) -> Vec<(ZoneKind, String)> {
    let mut out = zones.to_vec();
    let sentence = format!("{surface} bone.");
    let scored: Vec<usize> = (0..out.len()).filter(|i| out[*i].0 != ZoneKind::References).collect();
    if scored.is_empty() || rng.gen_bool(0.25) {
        let kinds: Vec<ZoneKind> = ZoneKind::ALL
            .into_iter()
            .filter(|k| *k != ZoneKind::References)
            .collect();
        let at = rng.gen_range(0..=out.len());
        out.insert(at, (*kinds.choose(rng).unwrap(), sentence));
    } else {
        let i = *scored.choose(rng).unwrap();
        let text = &mut out[i].1;
        *text = if rng.gen_bool(0.5) {
            format!("{text} {sentence}")
        } else {
            format!("{sentence} {text}")
        };
    }
    out
}

fn monotonicity() -> Outcome {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3070);
    let mut done = 0;
    let mut violations = Vec::new();
    let mut rejected = 0;
    while done < 500 {
        let zones = random_zones(&mut rng);
        let q = QUERIES[rng.gen_range(0..QUERIES.len())];
        let eq = e.expand(q);
        let surfaces: Vec<&str> = TAXON_PHRASES
            .iter()
            .copied()
            .filter(|s| eq.expansion.contains_key(&e.pipeline().normalize_phrase(s).join(" ")))
            .collect();
        let Some(surface) = surfaces.choose(&mut rng) else {
            continue;
        };
        let before_doc = make_doc("m", &zones, e.pipeline());
        let after_zones = add_one_occurrence(&mut rng, &zones, surface);
        let after_doc = make_doc("m", &after_zones, e.pipeline());
        // Only perturbations that add exactly one scored occurrence count.
        if collect_occurrences(&after_doc, &eq).scored_count()
            != collect_occurrences(&before_doc, &eq).scored_count() + 1
        {
            rejected += 1;
            continue;
        }
        done += 1;
        let before = score_direct(&before_doc, &eq, e.scoring());
        let after = score_direct(&after_doc, &eq, e.scoring());
        if after.total < before.total || after.level > before.level {
            violations.push(format!(
                "query {q:?}: {} ({:?}) -> {} ({:?}) after adding {surface:?}",
                before.total, before.level, after.total, after.level
            ));
        }
    }
    match violations.first() {
        None => Ok(format!(
            "500 perturbations, none lowered total or level ({rejected} redrawn)"
        )),
        Some(first) => Err(format!(
            "{} of 500 perturbations decreased; first: {first}",
            violations.len()
        )),
    }
}

fn ontology_expansion() -> Outcome {
    let e = engine();
    let docs = [
        (
            "child",
            "Notes on a skeleton\n\nA partial Allosaurus fragilis skeleton with bones.\n",
        ),
        (
            "literal",
            "Notes on a skeleton\n\nA partial allosaurus skeleton with bones.\n",
        ),
    ];
    let parsed = docs
        .iter()
        .map(|(id, t)| Ok((e.parse_document(&RawArticle::plain(*id, *t))?, format!("{id}.txt"))))
        .collect::<Result<Vec<_>, fuzzyrank_core::ingest::IngestError>>()
        .map_err(|x| x.to_string())?;
    let corpus = Corpus::new(parsed).map_err(|x| x.to_string())?;
    let r = e.search_direct(&corpus, "allosaurus");
    let order: Vec<&str> = r.results.iter().map(|h| h.doc_id.as_str()).collect();
    let child = &r
        .results
        .iter()
        .find(|h| h.doc_id == "child")
        .ok_or("child doc not returned")?
        .breakdown;
    let literal = &r
        .results
        .iter()
        .find(|h| h.doc_id == "literal")
        .ok_or("literal doc not returned")?
        .breakdown;
    let ok = order == ["literal", "child"]
        && child.per_match_type.get(&MatchType::Child) == Some(&3.0)
        && child.occurrence_count == 1
        && literal.per_match_type.get(&MatchType::Exact1) == Some(&5.0)
        && literal.total > child.total;
    check(
        ok,
        format!(
            "order {order:?}; child total {} (Child 3), literal total {} (Exact1 5)",
            child.total, literal.total
        ),
    )
}

fn index_parity() -> Outcome {
    let e = engine();
    let p = planted_corpus(11);
    let planted = p.corpus(&e).map_err(|x| x.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1DE);
    let mut docs: Vec<_> = planted
        .documents()
        .iter()
        .map(|d| (d.clone(), format!("{}.txt", d.id)))
        .collect();
    for i in 0..40 {
        let mut d = random_doc(&mut rng, e.pipeline(), 200);
        d.id = format!("random{i:02}");
        docs.push((d, format!("random{i:02}.txt")));
    }
    let corpus = Corpus::new(docs).map_err(|x| x.to_string())?;
    let index = e.build_index(&corpus, Some(0)).map_err(|x| x.to_string())?;
    let dir = tempfile::tempdir().map_err(|x| x.to_string())?;
    let path = dir.path().join("corpus.idx");
    save_index(&index, &path).map_err(|x| x.to_string())?;
    let loaded = load_index(&path).map_err(|x| x.to_string())?;
    if loaded != index {
        return Err("loaded index differs from the saved one".into());
    }
    let mut hits = 0;
    for q in QUERIES {
        let direct = e.search_direct(&corpus, q);
        let via = e.search(&loaded, q).map_err(|x| x.to_string())?;
        if via != direct {
            return Err(format!("query {q:?}: index results differ from direct scoring"));
        }
        hits += via.results.len();
    }
    Ok(format!(
        "{} docs, {} queries, {hits} hits identical; save/load round trip equal",
        corpus.documents().len(),
        QUERIES.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "not-relevant agreement 7/10",
            Duration::from_secs(1),
            not_relevant_agreement,
        ),
        (
            "relevant agreement brackets 40%",
            Duration::from_secs(1),
            relevant_agreement,
        ),
        ("baseline thresholds", Duration::from_secs(1), baseline_thresholds),
        ("weight table", Duration::from_secs(1), weight_table),
        ("oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        ("planted corpus comparison", Duration::from_secs(30), planted_comparison),
        ("monotonicity", Duration::from_secs(10), monotonicity),
        ("ontology expansion", Duration::from_secs(1), ontology_expansion),
        ("index parity and round trip", Duration::from_secs(10), index_parity),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} {name}: {detail} [{:.3}s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
