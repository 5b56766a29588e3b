"""Verbatim-leak scanner against an exhaustive alignment oracle."""
import random

from petlp.transform import normalise_tokens, scan_verbatim_leak


def oracle_matches(output_text, corpus, threshold):
    """Extend a run from every (i, j) alignment where one can start."""
    out = normalise_tokens(output_text)
    found = set()
    for doc_id, doc_text in corpus.items():
        doc = normalise_tokens(doc_text)
        for i in range(len(out)):
            for j in range(len(doc)):
                if out[i] != doc[j]:
                    continue
                if i > 0 and j > 0 and out[i - 1] == doc[j - 1]:
                    continue  # not a run start
                length = 0
                while i + length < len(out) and j + length < len(doc) and out[i + length] == doc[j + length]:
                    length += 1
                if length >= threshold:
                    found.add((doc_id, i, length))
    return found


CORPUS_POST = "The committee voted to approve the new funding proposal for community parks yesterday evening"


def _embed(words: int) -> str:
    taken = " ".join(CORPUS_POST.split()[:words])
    return f"As one user put it: {taken}. Many agreed."


def test_eleven_word_overlap_is_one_match():
    report = scan_verbatim_leak(_embed(11), {"post1": CORPUS_POST})
    assert len(report.matches) == 1
    match = report.matches[0]
    assert match.length_words == 11
    assert match.corpus_doc_id == "post1"
    assert match.text.startswith("the committee voted")


def test_ten_word_overlap_is_clean_at_default_threshold():
    report = scan_verbatim_leak(_embed(10), {"post1": CORPUS_POST})
    assert report.clean


def test_empty_output_is_clean():
    assert scan_verbatim_leak("", {"post1": CORPUS_POST}).clean


def test_punctuation_and_case_do_not_hide_leaks():
    quoted = "THE Committee, voted... to APPROVE the new funding; proposal for community parks!"
    report = scan_verbatim_leak(quoted, {"post1": CORPUS_POST}, threshold_words=11)
    assert not report.clean


def test_matches_are_maximal_not_fragments():
    output = _embed(13)
    report = scan_verbatim_leak(output, {"post1": CORPUS_POST}, threshold_words=5)
    assert len(report.matches) == 1
    assert report.matches[0].length_words == 13


def test_multiple_documents_reported_separately():
    output = _embed(11) + " Also: " + "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda"
    corpus = {
        "post1": CORPUS_POST,
        "post2": "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu",
    }
    report = scan_verbatim_leak(output, corpus)
    assert {m.corpus_doc_id for m in report.matches} == {"post1", "post2"}


def test_scanner_equals_exhaustive_oracle_on_random_texts():
    """Random low-alphabet texts force plenty of repeated runs; the scanner
    must agree with the all-alignments oracle exactly."""
    rng = random.Random(99)
    vocab = ["red", "green", "blue", "cyan"]
    for trial in range(150):
        output = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 60)))
        corpus = {
            f"d{k}": " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 80)))
            for k in range(rng.randint(1, 3))
        }
        threshold = rng.randint(2, 6)
        report = scan_verbatim_leak(output, corpus, threshold)
        got = {(m.corpus_doc_id, m.output_start, m.length_words) for m in report.matches}
        assert got == oracle_matches(output, corpus, threshold), f"trial {trial}"


def test_scanner_equals_oracle_on_a_corpus_sized_document():
    rng = random.Random(7)
    vocab = ["aa", "bb", "cc"]
    output = " ".join(rng.choice(vocab) for _ in range(300))
    corpus = {"big": " ".join(rng.choice(vocab) for _ in range(10_000))}
    report = scan_verbatim_leak(output, corpus, threshold_words=12)
    got = {(m.corpus_doc_id, m.output_start, m.length_words) for m in report.matches}
    assert got == oracle_matches(output, corpus, 12)
