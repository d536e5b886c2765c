from __future__ import annotations

from pathlib import Path

import pytest

from outfitgen.catalog import Triplet, TripletKind, Vocabulary
from outfitgen.gateway import MockEmbedBackend, MockImageBackend, MockTextBackend

GOLDEN_DIR = Path(__file__).parent / "golden"


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_bytes().decode("utf-8")


@pytest.fixture
def fixed_triplet() -> Triplet:
    return Triplet("gothic", "wedding", "woman", TripletKind.SIMPLE)


@pytest.fixture
def default_vocab() -> Vocabulary:
    """The shipped nine-occasion vocabulary."""
    return Vocabulary(
        styles=("gothic", "classic", "casual", "bohemian", "sporty"),
        occasions=("music festival", "wedding", "bachelor party", "play/concert",
                   "job interview", "business meeting", "work/office event",
                   "tropical vacation", "cruise"),
        simple_types=("woman", "man"),
        complex_types=("petite woman", "tall man"),
    )


@pytest.fixture
def ten_occasion_vocab(default_vocab) -> Vocabulary:
    """Test vocabulary with a tenth occasion so the 5 x 10 x 2 grid is 100."""
    return Vocabulary(
        styles=default_vocab.styles,
        occasions=default_vocab.occasions + ("picnic",),
        simple_types=default_vocab.simple_types,
        complex_types=default_vocab.complex_types,
    )


@pytest.fixture
def mock_text():
    return MockTextBackend()


@pytest.fixture
def mock_embed():
    return MockEmbedBackend(dim=16)


@pytest.fixture
def mock_image():
    return MockImageBackend()


class FakeQA:
    def __init__(self, question: str, answer: str):
        self.question = question
        self.answer = answer


@pytest.fixture
def two_exemplars():
    q1 = ("Imagine you are an expert in fashion design. Write a description for a "
          "fashion outfit in classic style appropriate for a man at a cruise. Be "
          "sure to address the colors and the textures.")
    a1 = "A navy blazer over white linen trousers with woven leather loafers."
    q2 = ("Imagine you are an expert in fashion design. Write a description for a "
          "fashion outfit in bohemian style appropriate for a woman at a music "
          "festival. Be sure to address the colors and the textures.")
    a2 = "A fringed suede vest over a tiered cream chiffon maxi skirt."
    return [FakeQA(q1, a1), FakeQA(q2, a2)]


@pytest.fixture
def two_cot_exemplars():
    q1 = ("Imagine you are an expert in fashion design. Suggest the colors and the "
          "textures for a fashion outfit in classic style appropriate for a man at "
          "a cruise.")
    a1 = "Colors: navy, white\nTextures: linen, leather"
    q2 = ("Imagine you are an expert in fashion design. Suggest the colors and the "
          "textures for a fashion outfit in bohemian style appropriate for a woman "
          "at a music festival.")
    a2 = "Colors: cream, rust\nTextures: chiffon, suede"
    return [FakeQA(q1, a1), FakeQA(q2, a2)]
