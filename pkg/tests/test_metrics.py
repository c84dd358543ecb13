import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import rename_identifiers
from oracles import (
    OrthogonalEmbedder,
    chrf_order_stats,
    lcs_bruteforce,
    random_program,
    unigram_precision_bleu1,
)
from sdvbench.analysis import extract_dataflow, metric_tokens, parse
from sdvbench.metrics import (
    CodeBleuWeights,
    EmbeddingError,
    HashEmbedder,
    HttpEmbedder,
    MetricReport,
    ReferenceParseError,
    chrf,
    chrf_statistics,
    codebert_score,
    codebleu,
    combine,
    dataflow_match,
    lcs_length,
    ngram_bleu,
    rouge_l,
    score_pair,
    syntax_match,
    weighted_ngram_bleu,
)

tokens = st.lists(st.sampled_from(list("abcde")), max_size=12)


# -- BLEU ----------------------------------------------------------------------


def test_bleu_identity():
    t = "await self . Vehicle . Speed . get ( )".split()
    assert ngram_bleu(t, t) == pytest.approx(1.0, abs=1e-12)
    assert weighted_ngram_bleu(t, t) == pytest.approx(1.0, abs=1e-12)


def test_bleu_unigram_hand_count():
    assert ngram_bleu("a b c".split(), "a b d".split(), max_n=1) == pytest.approx(2 / 3)


def test_bleu_empty_candidate():
    assert ngram_bleu([], ["a"]) == 0.0
    assert weighted_ngram_bleu([], ["a"]) == 0.0


def test_bleu_brevity_penalty():
    # 2 of 2 unigrams match, candidate half the reference length
    assert ngram_bleu(["a", "b"], ["a", "b", "c", "d"], max_n=1) == pytest.approx(math.exp(-1))


def test_bleu_add_one_smoothing_on_higher_orders():
    # unigrams 2/2, bigrams 0/1 -> (0+1)/(1+1)
    got = ngram_bleu(["a", "b"], ["b", "a"], max_n=2)
    assert got == pytest.approx(math.sqrt(1.0 * 0.5))


@settings(max_examples=200)
@given(tokens, tokens)
def test_bleu1_matches_hand_oracle(c, r):
    assert ngram_bleu(c, r, max_n=1) == pytest.approx(unigram_precision_bleu1(c, r), abs=1e-12)


@settings(max_examples=200)
@given(tokens, tokens)
def test_weighted_bleu_with_unit_weight_is_plain_bleu(c, r):
    assert weighted_ngram_bleu(c, r, keyword_weight=1.0) == pytest.approx(ngram_bleu(c, r), abs=1e-12)


def test_keyword_difference_costs_more_than_identifier_difference():
    # the keyword and the identifier sit at mirror positions, so every n-gram
    # order loses the same number of matches and plain BLEU cannot tell them apart
    ref = ["speed", "not", "limit", "gap", "flag"]
    kw_diff = ["speed", "q", "limit", "gap", "flag"]
    id_diff = ["speed", "not", "limit", "q", "flag"]
    assert ngram_bleu(kw_diff, ref) == ngram_bleu(id_diff, ref)
    assert weighted_ngram_bleu(kw_diff, ref) < weighted_ngram_bleu(id_diff, ref)
    # unigram precision by hand: 4/5 against (1 + 5 + 1 + 1) / (1 + 5 + 1 + 1 + 1)
    hi = ngram_bleu(kw_diff, ref) / 0.8 ** 0.25
    assert weighted_ngram_bleu(id_diff, ref) == pytest.approx(hi * (8 / 9) ** 0.25)


# -- ROUGE-L -------------------------------------------------------------------


def test_rouge_identity():
    t = list("abcab")
    assert rouge_l(t, t) == rouge_l(t, t).__class__(1.0, 1.0, 1.0)


def test_rouge_worked_example():
    s = rouge_l("the cat sat".split(), "the cat on the mat sat".split())
    assert (s.precision, s.recall) == (1.0, 0.5)
    assert s.f == pytest.approx(2 / 3, abs=1e-12)


def test_rouge_disjoint_and_empty():
    assert rouge_l(["a"], ["b"]).f == 0.0
    assert rouge_l([], ["b"]).f == 0.0
    assert rouge_l(["a"], []).f == 0.0


@settings(max_examples=200)
@given(tokens, tokens)
def test_lcs_matches_exhaustive_enumeration(a, b):
    assert lcs_length(a, b) == lcs_bruteforce(a, b)


@settings(max_examples=200)
@given(tokens, tokens)
def test_rouge_symmetry(a, b):
    x, y = rouge_l(a, b), rouge_l(b, a)
    assert (x.precision, x.recall) == (y.recall, y.precision)
    assert x.f == pytest.approx(y.f, abs=1e-15)


def test_rouge_beta_weights_recall():
    s = rouge_l("a b".split(), "a b c d".split(), beta=2.0)
    p, r = 1.0, 0.5
    assert s.f == pytest.approx(5 * p * r / (r + 4 * p))


# -- ChrF ----------------------------------------------------------------------


def test_chrf_worked_example_is_exact():
    s = chrf("ab", "ac", n_max=1)
    assert (s.precision, s.recall, s.score) == (0.5, 0.5, 0.5)


def test_chrf_identity_and_empty():
    assert chrf("x = foo(1)", "x = foo(1)").score == pytest.approx(1.0, abs=1e-12)
    assert chrf("", "abc").score == 0.0
    assert chrf("   ", "abc").score == 0.0


def test_chrf_whitespace_runs_collapse():
    assert chrf("a  b\n\tc", "a b c").score == pytest.approx(1.0, abs=1e-12)


def test_chrf_skips_orders_without_reference_ngrams():
    # reference has 2 characters, so only orders 1 and 2 count
    s = chrf("ab", "ab", n_max=6)
    assert s.score == pytest.approx(1.0, abs=1e-12)


_short = st.text(alphabet="ab c\n", max_size=10)
_long = st.text(alphabet="ab c\n", min_size=6, max_size=20)


@settings(max_examples=200)
@given(_short, _short, st.integers(1, 6))
def test_chrf_counts_match_bruteforce(c, r, n_max):
    for s in chrf_statistics(c, r, n_max):
        assert (s.matches, s.cand_total, s.ref_total) == chrf_order_stats(c, r, s.n)


@settings(max_examples=200)
@given(_long, _long)
def test_chrf_symmetry(a, b):
    # symmetric only when every order has n-grams on both sides
    assume(len(" ".join(a.split())) >= 6 and len(" ".join(b.split())) >= 6)
    x, y = chrf(a, b), chrf(b, a)
    assert x.precision == pytest.approx(y.recall, abs=1e-15)
    assert x.score == pytest.approx(y.score, abs=1e-15)


# -- CodeBERTScore -----------------------------------------------------------


def test_codebert_orthogonal_example():
    s = codebert_score(["a", "b"], ["a", "c"], OrthogonalEmbedder())
    assert (s.precision, s.recall, s.f1) == (0.5, 0.5, 0.5)


def test_codebert_identity_and_empty():
    toks = metric_tokens("x = self.Vehicle.Speed.get()")
    assert codebert_score(toks, toks, HashEmbedder()).f1 == pytest.approx(1.0, abs=1e-9)
    assert codebert_score([], toks, HashEmbedder()).f1 == 0.0


def test_codebert_rejects_malformed_embeddings():
    class Bad:
        def embed(self, tokens):
            return np.ones((len(tokens), 4))

    class Short:
        def embed(self, tokens):
            return np.eye(8)[: max(0, len(tokens) - 1)]

    with pytest.raises(EmbeddingError, match="unit"):
        codebert_score(["a"], ["a"], Bad())
    with pytest.raises(EmbeddingError, match="expected"):
        codebert_score(["a", "b"], ["a"], Short())


def test_codebert_dimension_mismatch():
    class Flip:
        calls = 0

        def embed(self, tokens):
            Flip.calls += 1
            return np.eye(4 if Flip.calls == 1 else 8)[: len(tokens)]

    with pytest.raises(EmbeddingError, match="mismatch"):
        codebert_score(["a"], ["a"], Flip())


def test_hash_embedder_is_deterministic_and_unit():
    a = HashEmbedder(32).embed(["x", "y", "x"])
    b = HashEmbedder(32).embed(["x", "y", "x"])
    assert np.array_equal(a, b)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    assert np.array_equal(a[0], a[2])


def test_http_embedder_wire_format():
    import json

    import httpx

    seen = {}

    def handler(request):
        seen["body"] = json.loads(request.content)
        n = len(seen["body"]["tokens"])
        return httpx.Response(200, json={"vectors": np.eye(4)[:n].tolist()})

    emb = HttpEmbedder("http://embed.local/v1", client=httpx.Client(transport=httpx.MockTransport(handler)))
    out = emb.embed(["a", "b"])
    assert out.shape == (2, 4)
    assert seen["body"] == {"tokens": ["a", "b"]}

    failing = HttpEmbedder(
        "http://embed.local/v1",
        client=httpx.Client(transport=httpx.MockTransport(lambda r: httpx.Response(500))),
    )
    with pytest.raises(EmbeddingError):
        failing.embed(["a"])


# -- CodeBLEU ------------------------------------------------------------------

SCRIPT = """\
speed = get_speed()
if speed > 120:
    warn(speed)
limit = speed - 10
set_limit(limit)
"""


def test_codebleu_identity():
    r = codebleu(SCRIPT, SCRIPT)
    assert r.composite == pytest.approx(1.0, abs=1e-12)
    assert (r.ngram, r.weighted_ngram, r.syntax, r.dataflow) == pytest.approx((1, 1, 1, 1), abs=1e-12)


def test_codebleu_published_submetrics_combine_to_0_68():
    assert combine(0.8, 0.6, 0.79, 0.53, CodeBleuWeights()) == 0.68


def test_codebleu_degenerate_weights():
    cand = SCRIPT.replace("120", "100")
    r = codebleu(cand, SCRIPT, CodeBleuWeights(1, 0, 0, 0))
    assert r.composite == ngram_bleu(metric_tokens(cand), metric_tokens(SCRIPT))


def test_weights_validation():
    with pytest.raises(ValueError):
        CodeBleuWeights(0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        CodeBleuWeights(1.5, -0.5, 0, 0)


def test_unparseable_candidate_zeroes_structure_and_sets_flag():
    r = codebleu("if speed >\n", SCRIPT)
    assert r.syntax == 0.0 and r.dataflow == 0.0 and r.candidate_parse_failed
    rep = score_pair("if speed >\n", SCRIPT)
    assert rep.candidate_parse_failed and rep.flags["candidate_parse_failed"]


def test_unparseable_reference_is_a_data_error():
    with pytest.raises(ReferenceParseError):
        codebleu(SCRIPT, "x = = 1")


def test_syntax_match_first_half_oracle():
    lines = SCRIPT.splitlines(keepends=True)
    half = "".join(lines[:3])
    ref_tree, cand_tree = parse(SCRIPT), parse(half)
    # oracle: enumerate depth-one subtrees by hand-walking the trees
    def subtrees(tree):
        out = []
        for node in tree.walk():
            if node.children:
                out.append((node.kind, node.text if node.kind in ("BinOp", "Compare") else None,
                            tuple((c.kind, c.text if c.kind in ("BinOp", "Compare") else None) for c in node.children)))
        return out
    ref_list, cand_list = subtrees(ref_tree), subtrees(cand_tree)
    hits = 0
    for s in ref_list:
        if s in cand_list:
            cand_list.remove(s)
            hits += 1
    assert syntax_match(cand_tree, ref_tree) == hits / len(ref_list)


def test_dataflow_match_rules():
    g = lambda s: extract_dataflow(parse(s))
    assert dataflow_match(g("a = 1\nb = a\n"), g("x = 1\ny = x\n")) == 1.0
    assert dataflow_match(g("a = 1"), g("b = 2")) == 1.0
    assert dataflow_match(g("a = 1\nb = 2\n"), g("x = 1\ny = x\n")) == 0.0
    assert dataflow_match(g("a = 1\nb = a\n"), g("x = 1\n")) == 0.0


def test_empty_reference_multiset_rule():
    assert syntax_match(parse(""), parse("")) == 1.0
    assert syntax_match(parse("x = 1"), parse("")) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False), st.randoms(use_true_random=False),
       st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda w: sum(w) > 0))
def test_codebleu_composite_is_weighted_sum(r1, r2, raw_w):
    total = math.fsum(raw_w)
    w = [x / total for x in raw_w]
    w[-1] = 1.0 - math.fsum(w[:-1])
    assume(w[-1] >= 0)
    weights = CodeBleuWeights(*w)
    cand, ref = random_program(r1), random_program(r2)
    rep = codebleu(cand, ref, weights)
    expected = (weights.alpha * rep.ngram + weights.beta * rep.weighted_ngram
                + weights.gamma * rep.syntax + weights.delta * rep.dataflow)
    assert abs(rep.composite - expected) <= 1e-12


def test_structure_scores_invariant_under_candidate_renaming():
    rng = random.Random(7)
    for _ in range(30):
        cand, ref = random_program(rng), random_program(rng)
        renamed = rename_identifiers(cand)
        a, b = codebleu(cand, ref), codebleu(renamed, ref)
        assert (a.syntax, a.dataflow) == (b.syntax, b.dataflow)


# -- report --------------------------------------------------------------------


def test_metric_report_round_trip_and_range():
    rep = score_pair(SCRIPT.replace("warn", "alert"), SCRIPT)
    assert MetricReport.from_dict(rep.to_dict()) == rep
    assert all(0.0 <= v <= 1.0 for v in rep.flat().values())
    assert set(rep.flat()) >= {"codebleu.composite", "codebert.f1", "rouge_l.f", "chrf.score"}


def test_score_pair_identity_on_random_programs():
    rng = random.Random(3)
    for _ in range(20):
        src = random_program(rng)
        for v in score_pair(src, src).flat().values():
            assert v == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=80))
def test_all_scores_in_range_for_arbitrary_candidates(cand):
    for v in score_pair(cand, SCRIPT).flat().values():
        assert 0.0 <= v <= 1.0
