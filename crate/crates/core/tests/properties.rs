use std::collections::{HashSet, VecDeque};

use jptense_core::classifier::infer_type;
use jptense_core::conjugator::{conjugate_past, over_regularized_form, VerbType};
use jptense_core::dataset::{emit_tsv, generate_synthetic, parse_tsv, split, SplitKind, SplitSpec, TypeCounts};
use jptense_core::kana::{diff, segment_moras, EditKind, KanaWord, Mora, HIRAGANA_FIRST, HIRAGANA_LAST};
use jptense_core::metrics::{
    error_reduction, exact_match_accuracy, report_from_tally, subgroup_report, PredictionRecord, SubgroupTally,
};
use jptense_core::taxonomy::{taxonomy_report, ErrorClassifier};
use jptense_core::{ExactRatio, Scalar};
use proptest::prelude::*;

fn any_hiragana() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::char::range(HIRAGANA_FIRST, HIRAGANA_LAST), 1..10).prop_map(|v| v.into_iter().collect())
}

/// Small alphabet so random pairs share material.
fn small_kana() -> impl Strategy<Value = String> {
    let alphabet: Vec<char> = "かきたっんいゃあ".chars().collect();
    prop::collection::vec(prop::sample::select(alphabet), 1..5).prop_map(|v| v.into_iter().collect())
}

/// Breadth-first search over single mora edits. Inserted and substituted
/// moras only need to come from the target.
fn brute_force_distance(a: &KanaWord, b: &KanaWord) -> usize {
    let target: Vec<Mora> = b.moras().to_vec();
    let alphabet: Vec<Mora> = target.iter().copied().collect::<HashSet<_>>().into_iter().collect();
    let start: Vec<Mora> = a.moras().to_vec();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((w, d)) = queue.pop_front() {
        if w == target {
            return d;
        }
        let mut next = Vec::new();
        for i in 0..w.len() {
            let mut x = w.clone();
            x.remove(i);
            next.push(x);
            for &m in &alphabet {
                let mut x = w.clone();
                x[i] = m;
                next.push(x);
            }
        }
        if w.len() < target.len() + 1 {
            for i in 0..=w.len() {
                for &m in &alphabet {
                    let mut x = w.clone();
                    x.insert(i, m);
                    next.push(x);
                }
            }
        }
        for x in next {
            if seen.insert(x.clone()) {
                queue.push_back((x, d + 1));
            }
        }
    }
    unreachable!("target is always reachable")
}

#[test]
fn brute_force_oracle_pins_example_diffs() {
    let w = |s: &str| segment_moras(s).unwrap();
    assert_eq!(brute_force_distance(&w("ねがえった"), &w("ねがえた")), 1);
    assert_eq!(brute_force_distance(&w("できた"), &w("できった")), 1);
    // The only single deletion turning ねがえった into ねがえた is at index 3.
    let src = w("ねがえった");
    let hits: Vec<usize> = (0..src.len())
        .filter(|&i| {
            let mut m = src.moras().to_vec();
            m.remove(i);
            KanaWord::from_moras(m) == w("ねがえた")
        })
        .collect();
    assert_eq!(hits, [3]);
    let d = diff(&src, &w("ねがえた"));
    let op = d.single_edit().unwrap();
    assert_eq!((op.kind, op.position), (EditKind::Delete, 3));
}

proptest! {
    #[test]
    fn segmentation_round_trips(s in any_hiragana()) {
        let w = segment_moras(&s).unwrap();
        prop_assert_eq!(w.to_string(), s);
        for m in w.moras() {
            if m.is_sokuon() || m.is_moraic_nasal() {
                prop_assert_eq!(m.glide(), None);
            }
            if let Some(g) = m.glide() {
                prop_assert!(matches!(g, 'ゃ' | 'ゅ' | 'ょ'));
            }
        }
    }

    #[test]
    fn segmentation_is_prefix_stable(s in any_hiragana(), c in prop::sample::select("かきたあんっいゆ".chars().collect::<Vec<_>>())) {
        let before = segment_moras(&s).unwrap();
        let after = segment_moras(&format!("{s}{c}")).unwrap();
        prop_assert_eq!(&after.moras()[..before.len()], before.moras());
    }

    #[test]
    fn diff_applies_and_is_minimal(a in small_kana(), b in small_kana()) {
        let (a, b) = (segment_moras(&a).unwrap(), segment_moras(&b).unwrap());
        let script = diff(&a, &b);
        prop_assert_eq!(script.apply(&a).unwrap(), b.clone());
        prop_assert_eq!(script.cost(), brute_force_distance(&a, &b));
        prop_assert_eq!(diff(&a, &b), script);
    }

    #[test]
    fn diff_of_identical_words_has_no_edits(a in any_hiragana()) {
        let w = segment_moras(&a).unwrap();
        prop_assert_eq!(diff(&w, &w).cost(), 0);
    }

    #[test]
    fn diff_applies_on_arbitrary_kana(a in any_hiragana(), b in any_hiragana()) {
        let (a, b) = (segment_moras(&a).unwrap(), segment_moras(&b).unwrap());
        prop_assert_eq!(diff(&a, &b).apply(&a).unwrap(), b);
    }
}

fn sweep(seed: u64) -> jptense_core::Dataset {
    let counts = TypeCounts::from_pairs([
        (VerbType::Godan, 300),
        (VerbType::Ichidan, 200),
        (VerbType::IGemination, 60),
        (VerbType::EGemination, 40),
        (VerbType::Localized, 1),
    ]);
    generate_synthetic(&counts, seed).unwrap()
}

#[test]
fn conjugation_invariants() {
    let d = sweep(21);
    for p in &d.pairs {
        let again = conjugate_past(&p.lemma, p.vtype).unwrap();
        assert_eq!(again, p.past);
        let s = p.past.to_string();
        assert!(s.ends_with('た') || s.ends_with('だ'), "{s}");

        let lemma_s = p.lemma.to_string();
        let geminates = s.ends_with("った");
        let expect_gemination = match p.vtype {
            VerbType::Godan => matches!(lemma_s.chars().last(), Some('う' | 'つ' | 'る')),
            VerbType::Ichidan => false,
            _ => true,
        };
        assert_eq!(geminates, expect_gemination, "{lemma_s} → {s}");

        if p.vtype == VerbType::Ichidan {
            assert_eq!(s, format!("{}た", lemma_s.strip_suffix('る').unwrap()));
        }
        if matches!(p.vtype, VerbType::IGemination | VerbType::EGemination) {
            let over = over_regularized_form(&p.lemma, p.vtype).unwrap();
            let script = diff(&p.past, &over);
            let op = script.single_edit().unwrap();
            assert_eq!(op.kind, EditKind::Delete);
            assert!(op.source.unwrap().is_sokuon());
        }
    }
}

#[test]
fn classifier_round_trips() {
    for seed in 0..5 {
        for p in &sweep(seed).pairs {
            let t = infer_type(&p.lemma, &p.past).unwrap();
            assert_eq!(t, p.vtype, "{} {}", p.lemma, p.past);
            assert_eq!(conjugate_past(&p.lemma, t).unwrap(), p.past);
        }
    }
}

#[test]
fn godan_ru_with_front_vowel_reads_as_type4() {
    let w = |s: &str| segment_moras(s).unwrap();
    for (lemma, expected) in [("はしる", VerbType::IGemination), ("かえる", VerbType::EGemination)] {
        let past = conjugate_past(&w(lemma), VerbType::Godan).unwrap();
        assert_eq!(infer_type(&w(lemma), &past).unwrap(), expected);
    }
}

#[test]
fn split_properties_over_many_seeds() {
    let d = sweep(9);
    for seed in 0..100 {
        for kind in [SplitKind::Form, SplitKind::Lemma] {
            let spec = SplitSpec { kind, test_fraction: 0.2, seed };
            let (train, test) = split(&d, &spec).unwrap();
            let (train2, test2) = split(&d, &spec).unwrap();
            assert_eq!((&train.pairs, &test.pairs), (&train2.pairs, &test2.pairs));
            assert_eq!(test.len(), spec.test_size(d.len()).unwrap());
            assert_eq!(train.len() + test.len(), d.len());
            let tr: HashSet<_> = train.pairs.iter().map(|p| p.lemma.clone()).collect();
            let te: HashSet<_> = test.pairs.iter().map(|p| p.lemma.clone()).collect();
            assert!(tr.is_disjoint(&te));
            let all: HashSet<_> = d.pairs.iter().map(|p| p.lemma.clone()).collect();
            assert_eq!(&tr | &te, all);
        }
    }
}

#[test]
fn emit_parse_identity() {
    let d = sweep(4);
    let mut buf = Vec::new();
    emit_tsv(&d, &mut buf).unwrap();
    let back = parse_tsv(buf.as_slice(), d.provenance.clone()).unwrap();
    assert_eq!(back, d);
}

fn records_with_errors(seed: u64, error_every: usize) -> Vec<PredictionRecord> {
    sweep(seed)
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pred = if i % error_every == 0 { format!("{}た", p.past) } else { p.past.to_string() };
            PredictionRecord::new(p, pred)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn metric_identities(seed in 0u64..50, every in 2usize..40) {
        let recs = records_with_errors(seed, every);
        let rep = subgroup_report::<ExactRatio>(&recs).unwrap();
        let one = ExactRatio::from_integer(1);

        let data_sum: ExactRatio = rep.rows.iter().map(|r| r.data_share).sum();
        prop_assert_eq!(data_sum, one);
        let err_sum: ExactRatio = rep.rows.iter().map(|r| r.error_share).sum();
        prop_assert_eq!(err_sum, one);

        // Aggregate accuracy is the data-share-weighted mean of subgroup accuracies.
        let weighted: ExactRatio = rep.rows.iter().map(|r| r.data_share * r.accuracy).sum();
        prop_assert_eq!(weighted, rep.accuracy);
        prop_assert_eq!(exact_match_accuracy::<ExactRatio>(&recs).unwrap(), rep.accuracy);

        let disparity_mass: ExactRatio = rep.rows.iter().map(|r| r.disparity_ratio.unwrap() * r.data_share).sum();
        prop_assert_eq!(disparity_mass, one);

        let float = subgroup_report::<f64>(&recs).unwrap();
        let weighted_f: f64 = float.rows.iter().map(|r| r.data_share * r.accuracy).sum();
        prop_assert!((weighted_f - float.accuracy).abs() < 1e-12);
    }

    #[test]
    fn tally_merge_is_associative(seed in 0u64..20, cut1 in 0usize..600, cut2 in 0usize..600) {
        let recs = records_with_errors(seed, 7);
        let (lo, hi) = (cut1.min(cut2), cut1.max(cut2));
        let parts = [&recs[..lo], &recs[lo..hi], &recs[hi..]].map(SubgroupTally::from_records);
        let left = parts[0].clone().merge(&parts[1]).merge(&parts[2]);
        let right = parts[0].clone().merge(&parts[1].clone().merge(&parts[2]));
        let whole = SubgroupTally::from_records(&recs);
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(&right, &whole);
        prop_assert_eq!(report_from_tally::<ExactRatio>(&left), subgroup_report::<ExactRatio>(&recs).unwrap());
    }

    #[test]
    fn error_reduction_identity(a in 0u32..9999, b in 0u32..=10000) {
        let a = ExactRatio::new(a as i64, 10000);
        let b = ExactRatio::new(b as i64, 10000);
        let r = error_reduction(a, b).unwrap();
        prop_assert_eq!(r * (ExactRatio::from_integer(1) - a), b - a);
    }

    #[test]
    fn taxonomy_is_total_and_order_stable(seed in 0u64..20, pred in small_kana()) {
        let d = sweep(seed);
        let clf = ErrorClassifier::default();
        let mut recs: Vec<PredictionRecord> = d.pairs.iter().take(40).map(|p| PredictionRecord::new(p, pred.clone())).collect();
        recs.retain(|r| !r.is_correct());
        let classified = clf.classify_all(&recs).unwrap();
        prop_assert_eq!(classified.len(), recs.len());
        let forward = taxonomy_report(&classified);
        let mut reversed = classified.clone();
        reversed.reverse();
        prop_assert_eq!(taxonomy_report(&reversed), forward);
    }
}

#[test]
fn float_and_exact_backends_agree() {
    let recs = records_with_errors(2, 9);
    let exact = subgroup_report::<ExactRatio>(&recs).unwrap();
    let float = subgroup_report::<f32>(&recs).unwrap();
    for (e, f) in exact.rows.iter().zip(&float.rows) {
        assert!((e.accuracy.as_f64() - f.accuracy.as_f64()).abs() < 1e-6);
        assert!((e.disparity_ratio.unwrap().as_f64() - f.disparity_ratio.unwrap().as_f64()).abs() < 1e-5);
    }
}
