use proptest::prelude::*;

use rcsplit_core::corpus::CanonicalItem;
use rcsplit_core::heuristics::{
    best_rouge_span, sentence_overlaps, truncate_question, OverlapMode, TruncationSpec,
};
use rcsplit_core::metrics::{f1_single, lcs_len, rouge_from_lcs, DEFAULT_BETA};
use rcsplit_core::textproc::{
    content_terms, normalize_answer, segment_sentences, tokenize, Stopwords,
};

fn words() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[a-zA-Z]{1,8}",
            Just("the".to_string()),
            Just("an".to_string()),
            Just(",".to_string()),
            Just(".".to_string()),
            Just("?".to_string()),
            Just("\"Quoted\"".to_string()),
            Just("(1969)".to_string()),
            Just("é-mail".to_string()),
        ],
        0..30,
    )
    .prop_map(|w| w.join(" "))
}

fn naive_lcs(a: &[u8], b: &[u8]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            t[i][j] = if a[i] == b[j] {
                1 + t[i + 1][j + 1]
            } else {
                t[i + 1][j].max(t[i][j + 1])
            };
        }
    }
    t[0][0]
}

proptest! {
    #[test]
    fn tokens_reassemble_the_text(text in words()) {
        let tokens = tokenize(&text);
        let joined: String = tokens.iter().map(|t| t.surface.as_str()).collect();
        let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(joined, squeezed);
        for t in &tokens {
            prop_assert_eq!(&text[t.start..t.end], t.surface.as_str());
        }
    }

    #[test]
    fn sentences_tile_tokens(text in words()) {
        let all = tokenize(&text);
        let sents = segment_sentences(&text);
        let tiled: Vec<_> = sents.iter().flat_map(|s| s.tokens.clone()).collect();
        prop_assert_eq!(tiled, all);
        for (i, s) in sents.iter().enumerate() {
            prop_assert_eq!(s.index, i);
            prop_assert!(!s.tokens.is_empty());
        }
    }

    #[test]
    fn normalization_is_idempotent(text in words()) {
        let once = normalize_answer(&text);
        prop_assert_eq!(normalize_answer(&once), once);
    }

    #[test]
    fn content_terms_grow_with_prefixes(text in words(), cut in 0usize..40) {
        let sw = Stopwords::default();
        let tokens = tokenize(&text);
        let cut = cut.min(tokens.len());
        let prefix = content_terms(&tokens[..cut], &sw);
        prop_assert!(prefix.is_submultiset_of(&content_terms(&tokens, &sw)));
    }

    #[test]
    fn lcs_matches_naive(a in prop::collection::vec(0u8..5, 0..20), b in prop::collection::vec(0u8..5, 0..20)) {
        prop_assert_eq!(lcs_len(&a, &b), naive_lcs(&a, &b));
        prop_assert_eq!(lcs_len(&a, &b), lcs_len(&b, &a));
    }

    #[test]
    fn f1_is_symmetric(a in words(), b in words()) {
        prop_assert_eq!(f1_single(&a, &b), f1_single(&b, &a));
    }

    #[test]
    fn truncation_keeps_a_prefix(q in words(), k in 1usize..6) {
        prop_assume!(!tokenize(&q).is_empty());
        let item = CanonicalItem { item_id: "x".into(), question_text: q.clone(), ..Default::default() };
        let spec = TruncationSpec::new(k).unwrap();
        let once = truncate_question(&item, spec).unwrap();
        prop_assert!(q.starts_with(&once.question_text));
        let n = tokenize(&once.question_text).len();
        prop_assert_eq!(n, k.min(tokenize(&q).len()));
        let twice = truncate_question(&once, spec).unwrap();
        prop_assert_eq!(twice.question_text, once.question_text);
    }

    #[test]
    fn bounded_projection_matches_exhaustive(
        ctx in prop::collection::vec(0u8..4, 1..30),
        target in prop::collection::vec(0u8..4, 1..6),
    ) {
        let (s, e, v) = best_rouge_span(&ctx, &target, DEFAULT_BETA, ctx.len());
        let mut best = (0, ctx.len(), 0.0);
        for i in 0..ctx.len() {
            for j in i + 1..=ctx.len() {
                let val = rouge_from_lcs(naive_lcs(&ctx[i..j], &target), j - i, target.len(), DEFAULT_BETA);
                if val > best.2 {
                    best = (i, j, val);
                }
            }
        }
        prop_assert_eq!((s, e), (best.0, best.1));
        prop_assert_eq!(v, best.2);
    }

    #[test]
    fn min_count_overlap_bounded_by_question_terms(q in words(), c in words()) {
        let sw = Stopwords::default();
        let item = CanonicalItem { item_id: "x".into(), question_text: q.clone(), context_text: c.clone(), ..Default::default() };
        let bound = content_terms(&tokenize(&q), &sw).len();
        for o in sentence_overlaps(&item, &segment_sentences(&c), &sw, OverlapMode::MinCount) {
            prop_assert!(o <= bound);
        }
    }
}
