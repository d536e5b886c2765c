import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outfitgen.catalog import (Triplet, TripletKind, Vocabulary,
                               enumerate_triplets, load_vocabulary,
                               validate_triplet)
from outfitgen.errors import ConfigurationError, ValidationError

VALID_SOURCE = {
    "styles": ["gothic", "classic"],
    "occasions": ["a wedding", "a music festival"],
    "simple_types": ["woman", "man"],
    "complex_types": ["petite woman"],
}


class TestLoadVocabulary:
    def test_articles_stripped_from_occasions(self):
        vocab = load_vocabulary(VALID_SOURCE)
        assert vocab.occasions == ("wedding", "music festival")

    def test_labels_lowercased_and_trimmed(self):
        vocab = load_vocabulary({**VALID_SOURCE, "styles": ["  Gothic ", "Classic"]})
        assert vocab.styles == ("gothic", "classic")

    def test_duplicate_after_canonicalization_names_the_duplicate(self):
        with pytest.raises(ValidationError) as exc:
            load_vocabulary({**VALID_SOURCE, "styles": ["Gothic", "gothic"]})
        assert "gothic" in str(exc.value)

    def test_missing_list_is_a_configuration_error(self):
        source = dict(VALID_SOURCE)
        del source["occasions"]
        with pytest.raises(ConfigurationError):
            load_vocabulary(source)

    def test_empty_list_is_a_configuration_error(self):
        with pytest.raises(ConfigurationError):
            load_vocabulary({**VALID_SOURCE, "styles": []})

    def test_an_prefix_also_stripped(self):
        vocab = load_vocabulary({**VALID_SOURCE,
                                 "occasions": ["an office party", "a cruise"]})
        assert vocab.occasions == ("office party", "cruise")


class TestEnumerateTriplets:
    def test_hundred_triplet_grid(self, ten_occasion_vocab):
        simple = enumerate_triplets(ten_occasion_vocab, TripletKind.SIMPLE)
        assert len(simple) == 100

    def test_singleton_product(self):
        vocab = Vocabulary(("a",), ("b",), ("c",), ("d",))
        assert enumerate_triplets(vocab, TripletKind.SIMPLE) == [
            Triplet("a", "b", "c", TripletKind.SIMPLE)]

    def test_empty_factor_yields_empty_list(self):
        vocab = Vocabulary(("a",), (), ("c",), ("d",))
        assert enumerate_triplets(vocab, TripletKind.SIMPLE) == []

    def test_lexicographic_by_index(self):
        vocab = Vocabulary(("s1", "s2"), ("o1", "o2"), ("t1", "t2"), ("x",))
        grid = enumerate_triplets(vocab, TripletKind.SIMPLE)
        assert [(t.style, t.occasion, t.wearer_type) for t in grid[:4]] == [
            ("s1", "o1", "t1"), ("s1", "o1", "t2"),
            ("s1", "o2", "t1"), ("s1", "o2", "t2")]

    def test_deterministic(self, ten_occasion_vocab):
        a = enumerate_triplets(ten_occasion_vocab, TripletKind.COMPLEX)
        b = enumerate_triplets(ten_occasion_vocab, TripletKind.COMPLEX)
        assert a == b


labels = st.lists(
    st.text(alphabet=string.ascii_lowercase, min_size=1, max_size=6),
    min_size=0, max_size=4, unique=True)


@settings(max_examples=60)
@given(styles=labels, occasions=labels, simple=labels)
def test_grid_cardinality_property(styles, occasions, simple):
    vocab = Vocabulary(tuple(styles), tuple(occasions), tuple(simple), ())
    grid = enumerate_triplets(vocab, TripletKind.SIMPLE)
    assert len(grid) == len(styles) * len(occasions) * len(simple)
    for t in grid:
        assert validate_triplet(t, vocab).ok


class TestValidateTriplet:
    def test_accepts_default_vocabulary_member(self, default_vocab):
        t = Triplet("gothic", "wedding", "woman", TripletKind.SIMPLE)
        assert validate_triplet(t, default_vocab).ok

    def test_rejects_unknown_style(self, default_vocab):
        t = Triplet("steampunk", "wedding", "woman", TripletKind.SIMPLE)
        verdict = validate_triplet(t, default_vocab)
        assert not verdict.ok
        assert verdict.problems[0][0] == "style"

    def test_rejects_kind_mismatch(self, default_vocab):
        t = Triplet("gothic", "wedding", "petite woman", TripletKind.SIMPLE)
        verdict = validate_triplet(t, default_vocab)
        assert not verdict.ok
        assert any(field == "kind" for field, _ in verdict.problems)

    def test_names_every_offending_field(self, default_vocab):
        t = Triplet("steampunk", "gala", "robot", TripletKind.SIMPLE)
        verdict = validate_triplet(t, default_vocab)
        assert {field for field, _ in verdict.problems} == {
            "style", "occasion", "wearer_type"}
