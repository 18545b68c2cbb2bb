//! Library results checked against slow, independent reference code.

use std::collections::BTreeSet;

use dupaudit::near_dup::MyersPattern;
use dupaudit::synth::{self, PlantedSpec};
use dupaudit::*;
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

/// Full-matrix Wagner–Fischer.
#[allow(clippy::needless_range_loop)]
fn dp_oracle(a: &[char], b: &[char]) -> usize {
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        m[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = m[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            m[i][j] = sub.min(m[i - 1][j] + 1).min(m[i][j - 1] + 1);
        }
    }
    m[a.len()][b.len()]
}

fn random_string(rng: &mut StdRng, max_len: usize, alphabet: &[char]) -> Vec<char> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

#[test]
fn distance_routes_agree_with_matrix_dp() {
    let mut rng = StdRng::seed_from_u64(11);
    let alphabet = ['a', 'b', 'c', 'd'];
    for _ in 0..10_000 {
        let a = random_string(&mut rng, 30, &alphabet);
        let b = random_string(&mut rng, 30, &alphabet);
        let expected = dp_oracle(&a, &b);
        let (sa, sb): (String, String) = (a.iter().collect(), b.iter().collect());
        assert_eq!(levenshtein(&sa, &sb), expected);
        assert_eq!(MyersPattern::new(&a).distance(&b), expected);
        for bound in [0, 1, 3, expected, expected + 2, 40] {
            let want = if expected <= bound { Distance::Within(expected) } else { Distance::ExceedsBound };
            assert_eq!(bounded_levenshtein(&sa, &sb, bound), want, "{sa} {sb} {bound}");
            assert_eq!(MyersPattern::new(&a).bounded(&b, bound), want);
        }
    }
}

#[test]
fn multi_block_and_non_ascii_patterns() {
    let mut rng = StdRng::seed_from_u64(12);
    let alphabet = ['a', 'b', 'é', '中', ' ', '😀'];
    for _ in 0..300 {
        let a = random_string(&mut rng, 200, &alphabet);
        let mut b = a.clone();
        for _ in 0..rng.gen_range(0..30) {
            if b.is_empty() {
                break;
            }
            let at = rng.gen_range(0..b.len());
            match rng.gen_range(0..3) {
                0 => b[at] = alphabet[rng.gen_range(0..alphabet.len())],
                1 => b.insert(at, alphabet[rng.gen_range(0..alphabet.len())]),
                _ => {
                    b.remove(at);
                }
            }
        }
        let expected = dp_oracle(&a, &b);
        assert_eq!(MyersPattern::new(&a).distance(&b), expected);
        assert_eq!(MyersPattern::new(&b).distance(&a), expected);
        assert_eq!(
            bounded_levenshtein(&a.iter().collect::<String>(), &b.iter().collect::<String>(), 20).value(),
            (expected <= 20).then_some(expected)
        );
    }
}

/// Character scanner for the default mention and URL rules.
fn normalize_oracle(raw: &str) -> String {
    use unicode_normalization::UnicodeNormalization;
    let s: Vec<char> = raw.nfc().collect();
    let mut out = String::new();
    let mut i = 0;
    let word = |c: char| c.is_alphanumeric() || c == '_';
    let starts_with_ci = |at: usize, lit: &str| {
        let lit: Vec<char> = lit.chars().collect();
        at + lit.len() <= s.len()
            && s[at..at + lit.len()].iter().zip(&lit).all(|(a, b)| a.to_ascii_lowercase() == *b)
    };
    while i < s.len() {
        let boundary = i == 0 || !(word(s[i - 1]) || is_mark(s[i - 1]));
        let url_prefix = ["https://", "http://", "www."].iter().find(|p| starts_with_ci(i, p));
        if let (true, Some(_)) = (boundary, url_prefix) {
            while i < s.len() && !s[i].is_whitespace() {
                i += 1;
            }
            out.push_str("URL");
            continue;
        }
        if s[i] == '@' && i + 1 < s.len() && (word(s[i + 1]) || is_mark(s[i + 1])) {
            i += 1;
            while i < s.len() && (word(s[i]) || is_mark(s[i])) {
                i += 1;
            }
            out.push_str("@USER");
            continue;
        }
        out.push(s[i]);
        i += 1;
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_mark(c: char) -> bool {
    // Combining marks that survive composition in the generated inputs.
    matches!(c, '\u{0301}' | '\u{0308}' | '\u{0327}')
}

#[test]
fn normalization_matches_scanner() {
    let mut rng = StdRng::seed_from_u64(13);
    let pieces = [
        "@", "@bob", "@_x", "http://", "https://a.b/c", "HTTP://X", "www.", "WwW.site", "x", "é",
        "e\u{0301}", "\u{0301}", " ", "  ", "\t", "\n", "rt", "!!", "a@b", "中文", "_", ".", "/",
        "wwwx", "@Zoë", "ß",
    ];
    let cfg = NormalizationConfig::default();
    for _ in 0..5_000 {
        let raw: String = (0..rng.gen_range(0..12)).map(|_| pieces[rng.gen_range(0..pieces.len())]).collect();
        assert_eq!(normalize_text(&raw, &cfg), normalize_oracle(&raw), "input {raw:?}");
        assert_eq!(comparison_key(&raw, &cfg), normalize_oracle(&raw).to_lowercase());
    }
}

#[test]
fn exact_groups_match_all_pairs_key_equality() {
    let mut rng = StdRng::seed_from_u64(14);
    let pool = ["Same text", "same text", "@a same text", "@b Same   text", "other", "other ", "http://x other"];
    let texts: Vec<String> = (0..1000)
        .map(|i| if i % 3 == 0 { format!("unique {i}") } else { pool[rng.gen_range(0..pool.len())].to_string() })
        .collect();
    let corpus = Corpus::from_texts(texts.clone());
    let cfg = NormalizationConfig::default();
    for mode in [KeyMode::Raw, KeyMode::Normalized] {
        let clusters = build_clusters(&corpus, mode, &cfg);
        let mut cluster_of = vec![usize::MAX; texts.len()];
        for (c, cluster) in clusters.iter().enumerate() {
            for id in &cluster.member_ids {
                cluster_of[id.parse::<usize>().unwrap()] = c;
            }
        }
        for i in 0..texts.len() {
            for j in i + 1..texts.len() {
                let same = mode.key(&texts[i], &cfg) == mode.key(&texts[j], &cfg);
                assert_eq!(same, cluster_of[i] == cluster_of[j], "{mode} {i} {j}");
            }
        }
    }
}

/// All-pairs scan with the banded DP; independent of the index and of the
/// bit-parallel kernel used by the library.
fn brute_pairs(corpus: &Corpus, config: &NearDupConfig, norm: &NormalizationConfig) -> BTreeSet<(String, String, usize)> {
    let keys: Vec<String> = corpus.iter().map(|r| comparison_key(&r.text, norm)).collect();
    let lens: Vec<usize> = keys.iter().map(|k| k.chars().count()).collect();
    let mut out = BTreeSet::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let bound = config.pair_bound(lens[i], lens[j]);
            if let Distance::Within(d) = bounded_levenshtein(&keys[i], &keys[j], bound) {
                out.insert((corpus.records()[i].id.clone(), corpus.records()[j].id.clone(), d));
            }
        }
    }
    out
}

fn mixed_corpus(seed: u64, n: usize) -> Corpus {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut srng = synth::rng(seed);
    let bases: Vec<String> = (0..20).map(|_| synth::base_text(&mut srng)).collect();
    let texts: Vec<String> = (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => synth::random_words(&mut srng, rng.gen_range(0..30)),
            1 => random_string(&mut rng, 40, &['a', 'b', ' ']).into_iter().collect(),
            _ => {
                let base = &bases[rng.gen_range(0..bases.len())];
                synth::perturb(&mut srng, base, rng.gen_range(0..16))
            }
        })
        .collect();
    Corpus::from_texts(texts)
}

#[test]
fn near_duplicate_pairs_match_brute_force() {
    let norm = NormalizationConfig::default();
    let configs = [
        NearDupConfig::absolute(20),
        NearDupConfig::absolute(3),
        NearDupConfig::normalized_ratio(0.2).unwrap(),
    ];
    for seed in 0..4 {
        let corpus = mixed_corpus(seed, 700);
        for config in &configs {
            let (pairs, _) = find_near_duplicates(&corpus, config, &norm);
            let got: BTreeSet<_> = pairs.into_iter().map(|p| (p.id_a, p.id_b, p.distance)).collect();
            assert_eq!(got, brute_pairs(&corpus, config, &norm), "seed {seed} {config:?}");
        }
    }
}

#[test]
fn candidates_are_a_superset_of_near_pairs() {
    let norm = NormalizationConfig::default();
    let corpus = mixed_corpus(21, 2000);
    let config = NearDupConfig::absolute(20);
    let candidates: BTreeSet<(String, String)> = candidate_pairs(&corpus, &config, &norm)
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let order = |id: &str| id.parse::<usize>().unwrap();
    for (a, b) in &candidates {
        assert!(order(a) < order(b));
    }
    let (pairs, _) = find_near_duplicates(&corpus, &config, &norm);
    assert!(!pairs.is_empty());
    for p in &pairs {
        assert!(candidates.contains(&(p.id_a.clone(), p.id_b.clone())), "{p:?}");
    }
}

#[test]
fn clusters_are_connected_components() {
    let norm = NormalizationConfig::default();
    let corpus = mixed_corpus(22, 600);
    let config = NearDupConfig::absolute(10);
    let (pairs, clusters) = find_near_duplicates(&corpus, &config, &norm);
    // Components by repeated relaxation over the pair list.
    let n = corpus.len();
    let mut comp: Vec<usize> = (0..n).collect();
    let idx = |id: &str| id.parse::<usize>().unwrap();
    loop {
        let mut changed = false;
        for p in &pairs {
            let (a, b) = (idx(&p.id_a), idx(&p.id_b));
            let m = comp[a].min(comp[b]);
            if comp[a] != m || comp[b] != m {
                comp[a] = m;
                comp[b] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let flagged: BTreeSet<usize> = pairs.iter().flat_map(|p| [idx(&p.id_a), idx(&p.id_b)]).collect();
    let mut expected: Vec<Vec<usize>> = Vec::new();
    for &p in &flagged {
        match expected.iter_mut().find(|c| comp[c[0]] == comp[p]) {
            Some(c) => c.push(p),
            None => expected.push(vec![p]),
        }
    }
    let got: Vec<Vec<usize>> = clusters
        .clusters
        .iter()
        .map(|c| {
            assert_eq!(c.representative, c.member_ids[0]);
            c.member_ids.iter().map(|id| idx(id)).collect()
        })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn mean_tokens_recount() {
    let corpus = PlantedSpec { seed: 5, ..PlantedSpec::default() }.build();
    let report = audit(&corpus, &NormalizationConfig::default(), &NearDupConfig::default());
    let total: usize = corpus.iter().map(|r| r.text.split_whitespace().count()).sum();
    let mean = total as f64 / corpus.len() as f64;
    assert_eq!(report.mean_tokens, (mean + 0.5).floor() as u64);
}

#[test]
fn filter_short_matches_manual_count() {
    let mut rng = StdRng::seed_from_u64(15);
    let texts: Vec<String> = (0..1000)
        .map(|_| (0..rng.gen_range(0..10)).map(|_| "w").collect::<Vec<_>>().join(" "))
        .collect();
    let corpus = Corpus::from_texts(texts.clone());
    let filtered = filter_short(&corpus, &FilterConfig::min_tokens(5).unwrap(), |t| token_count(t, Language::EnglishLike)).unwrap();
    let expected: Vec<String> = (0..1000).filter(|&i| texts[i].split(' ').filter(|w| !w.is_empty()).count() >= 5).map(|i| i.to_string()).collect();
    assert_eq!(filtered.ids().collect::<Vec<_>>(), expected);
}
