import random

from divcurate.tokenizer import TokenizedText, tokenize, word_count


def test_case_folding_and_punct_stripping():
    assert tokenize("The cat, the CAT.") == ["the", "cat", "the", "cat"]


def test_empty_and_whitespace_only():
    assert tokenize("") == []
    assert tokenize(" \t\n  ") == []


def test_mixed_whitespace():
    assert tokenize("a  b\tc\nd") == ["a", "b", "c", "d"]


def test_interior_punctuation_kept():
    assert tokenize("well-known don't") == ["well-known", "don't"]


def test_pure_punctuation_piece_dropped():
    assert tokenize("hello ... world !!") == ["hello", "world"]


def test_unicode_quotes_stripped():
    assert tokenize("“quoted” (parens)") == ["quoted", "parens"]


def test_digits_and_symbols_survive():
    # currency and math signs are symbols, not punctuation
    assert tokenize("$100 a+b 3.5") == ["$100", "a+b", "3.5"]


def test_word_count_matches_token_count():
    rng = random.Random(11)
    pieces = ["word", "Word,", "(two)", "---", "it's", "A."]
    for _ in range(50):
        text = " ".join(rng.choice(pieces) for _ in range(rng.randint(0, 30)))
        toks = tokenize(text)
        assert word_count(text) == len(toks)
        assert all(t == t.lower() for t in toks)
        assert all(t for t in toks)


def test_tokenized_text_wrapper():
    tt = TokenizedText("One two TWO.")
    assert tt.tokens == ("one", "two", "two")
    assert tt.word_count == 3
