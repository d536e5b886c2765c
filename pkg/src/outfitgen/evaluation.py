"""Text-image alignment scores, survey instruments, and the statistics harness."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import DomainError, EngineError, ValidationError
from .exemplars import cosine_similarity
from .pipeline import GenerationRecord, StrategyKind

METHOD_KINDS = tuple(k.value for k in StrategyKind)

LIKERT = "likert_1_5"
YES_NO = "yes_no"
RANK = "rank_permutation_5"


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    answer_kind: str


@dataclass(frozen=True)
class SurveyInstrument:
    experiment: str
    questions: tuple[Question, ...]

    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.questions)

    def question(self, qid: str) -> Question:
        for q in self.questions:
            if q.id == qid:
                return q
        raise KeyError(qid)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment,
                "questions": [q.__dict__ for q in self.questions]}


_E1_TEXTS = (
    "On a scale of 1 to 5, how well does the outfit align with the style?",
    "On a scale of 1 to 5, how suitable is the outfit for the occasion?",
    "On a scale of 1 to 5, how fitting is the outfit for the type?",
    "On a scale of 1 to 5, how creative is the outfit?",
    "On a scale of 1 to 5, rate the aesthetic appeal of the outfit.",
    "On a scale of 1 to 5, how well do the clothes and accessories match in the outfit?",
    "Are there any abnormalities or inconsistencies in the image?",
    "If the answer in the previous question was yes: Despite any abnormalities or "
    "inconsistencies, do you believe the image could serve as inspiration for a "
    "fashion designer?",
)

_E2_TEXTS = (
    "On a scale of 1 to 5, how comprehensible is the description?",
    "On a scale of 1 to 5, how coherent is the description?",
    "On a scale of 1 to 5, how suitable is the outfit described for the occasion?",
    "On a scale of 1 to 5, how suitable is the outfit described for a type?",
    "On a scale of 1 to 5, how well does the outfit described align with the style?",
    "On a scale of 1 to 5, how suitable are the colors used for the occasion?",
    "On a scale of 1 to 5, how suitable are the colors used for a type?",
    "On a scale of 1 to 5, how suitable are the colors used for a style?",
    "On a scale of 1 to 5, how suitable are the textures used for the occasion?",
    "On a scale of 1 to 5, how suitable are the textures used for a type?",
    "On a scale of 1 to 5, how suitable are the textures used for a style?",
)

E1_INSTRUMENT = SurveyInstrument("e1", tuple(
    Question(f"e1_q{i}", text, LIKERT if i <= 6 else YES_NO)
    for i, text in enumerate(_E1_TEXTS, start=1)))

E2_INSTRUMENT = SurveyInstrument("e2", tuple(
    Question(f"e2_q{i}", text, LIKERT) for i, text in enumerate(_E2_TEXTS, start=1)))

E3_INSTRUMENT = SurveyInstrument("e3", (
    Question("e3_rank",
             "Rank the five outfits from most preferred (first) to least "
             "preferred (last).", RANK),
))

INSTRUMENTS = {"e1": E1_INSTRUMENT, "e2": E2_INSTRUMENT, "e3": E3_INSTRUMENT}


AGE_RANGES = ("18-24", "25-34", "35-44", "45-54", "55+")
GENDERS = ("female", "male", "non-binary", "prefer_not_to_say")
OCCUPATIONS = ("student", "full-time employed", "part-time employed",
               "self-employed", "unemployed", "retired", "other")
ENGLISH_LEVELS = ("beginner", "intermediate", "proficient", "native/fluent")
YES_NO_VALUES = ("yes", "no")

DEMOGRAPHIC_FIELDS = {
    "age_range": AGE_RANGES,
    "gender": GENDERS,
    "occupation": OCCUPATIONS,
    "art_related": YES_NO_VALUES,
    "english_level": ENGLISH_LEVELS,
    "prior_ai_survey": YES_NO_VALUES,
    "prior_fashion_survey": YES_NO_VALUES,
    "fashion_interest": (1, 2, 3, 4, 5),
}


def validate_demographics(demographics: dict) -> list[tuple[str, str]]:
    problems: list[tuple[str, str]] = []
    if not isinstance(demographics, dict):
        return [("demographics", "must be an object")]
    for name, allowed in DEMOGRAPHIC_FIELDS.items():
        if name not in demographics:
            problems.append((f"demographics.{name}", "missing"))
        elif demographics[name] not in allowed:
            problems.append((f"demographics.{name}",
                             f"must be one of {list(allowed)}"))
    for name in demographics:
        if name not in DEMOGRAPHIC_FIELDS:
            problems.append((f"demographics.{name}", "unknown field"))
    return problems


@dataclass
class SurveyResponse:
    """One participant's answers to one experiment item."""

    participant_id: str
    experiment: str
    stimulus_id: str
    answers: dict
    demographics: dict = field(default_factory=dict)
    method: Optional[str] = None
    timestamp: str = ""

    def to_dict(self) -> dict:
        return {"participant_id": self.participant_id,
                "experiment": self.experiment,
                "stimulus_id": self.stimulus_id,
                "method": self.method,
                "answers": self.answers,
                "demographics": self.demographics,
                "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, data: dict) -> "SurveyResponse":
        return cls(participant_id=data["participant_id"],
                   experiment=data["experiment"],
                   stimulus_id=data["stimulus_id"],
                   answers=dict(data["answers"]),
                   demographics=dict(data.get("demographics", {})),
                   method=data.get("method"),
                   timestamp=data.get("timestamp", ""))


def _is_likert(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and 1 <= value <= 5


def validate_answers(experiment: str, answers: dict) -> list[tuple[str, str]]:
    """Field-level problems for an answers map against its instrument.

    The conditional eighth E1 answer must be present as a key; "yes"/"no" when
    question 7 was answered "yes", null otherwise.
    """
    instrument = INSTRUMENTS.get(experiment)
    if instrument is None:
        return [("experiment", f"unknown experiment {experiment!r}")]
    if not isinstance(answers, dict):
        return [("answers", "must be an object")]
    problems: list[tuple[str, str]] = []
    expected = set(instrument.question_ids())
    for qid in sorted(expected - set(answers)):
        problems.append((f"answers.{qid}", "missing answer"))
    for qid in sorted(set(answers) - expected):
        problems.append((f"answers.{qid}", "not a question of this experiment"))
    for q in instrument.questions:
        if q.id not in answers:
            continue
        value = answers[q.id]
        if q.answer_kind == LIKERT:
            if not _is_likert(value):
                problems.append((f"answers.{q.id}", "must be an integer in 1..5"))
        elif q.answer_kind == YES_NO:
            if experiment == "e1" and q.id == "e1_q8":
                gate = answers.get("e1_q7")
                if gate == "yes":
                    if value not in YES_NO_VALUES:
                        problems.append((f"answers.{q.id}", 'must be "yes" or "no"'))
                elif gate == "no":
                    if value is not None:
                        problems.append((f"answers.{q.id}",
                                         "must be null when question 7 is \"no\""))
                # an invalid q7 is reported on its own key
            elif value not in YES_NO_VALUES:
                problems.append((f"answers.{q.id}", 'must be "yes" or "no"'))
        elif q.answer_kind == RANK:
            if (not isinstance(value, list) or len(value) != 5
                    or set(value) != set(METHOD_KINDS)):
                problems.append((f"answers.{q.id}",
                                 "must be a permutation of the five method kinds"))
    return problems


# ---------------------------------------------------------------------------
# Alignment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlignmentScore:
    record_id: str
    score: float


def clip_score(text_embedding, image_embedding, rescale: bool = False) -> float:
    """Raw cosine between the two embeddings, in [-1, 1].

    ``rescale`` applies the 2.5 * max(0, cos) literature variant; off by
    default because the raw cosine is what downstream reports expect.
    """
    cos = cosine_similarity(text_embedding, image_embedding)
    return 2.5 * max(0.0, cos) if rescale else cos


def score_alignment(record: GenerationRecord, embed_backend,
                    rescale: bool = False) -> AlignmentScore:
    """Alignment of a record's description with its image reference.

    The image side is represented by embedding the token "image:<digest>";
    a live CLIP-style service would embed the pixels behind the same call.
    """
    text_vec = embed_backend.embed([record.description])[0]
    image_vec = embed_backend.embed([f"image:{record.image_digest}"])[0]
    return AlignmentScore(record_id=record.id,
                          score=clip_score(text_vec, image_vec, rescale=rescale))


# ---------------------------------------------------------------------------
# Rating aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatingAggregate:
    n: int
    mean: float
    histogram: dict[int, int]


def aggregate_ratings(responses: Iterable[SurveyResponse], experiment: str,
                      criterion: str, method: str) -> Optional[RatingAggregate]:
    """Mean and 1..5 histogram of one likert criterion for one method.

    Returns None (an explicit empty marker) when nothing matches, never a
    fabricated zero.
    """
    instrument = INSTRUMENTS[experiment]
    if instrument.question(criterion).answer_kind != LIKERT:
        raise ValidationError(f"criterion {criterion!r} is not a likert question")
    values = [r.answers[criterion] for r in responses
              if r.experiment == experiment and r.method == method
              and criterion in r.answers and _is_likert(r.answers[criterion])]
    if not values:
        return None
    histogram = {v: values.count(v) for v in range(1, 6) if values.count(v)}
    return RatingAggregate(n=len(values), mean=sum(values) / len(values),
                           histogram=histogram)


# ---------------------------------------------------------------------------
# Chi-square machinery
# ---------------------------------------------------------------------------

def chi_square_homogeneity(table: Sequence[Sequence[float]]) -> tuple[float, int]:
    """Pearson chi-square of a 2 x m table of observed counts.

    Columns empty in both rows are removed first; no continuity correction.
    Returns (chi2, df) with df = m' - 1 over the m' surviving columns.
    """
    if len(table) != 2 or len(table[0]) != len(table[1]):
        raise ValidationError("table must be 2 x m")
    rows = [list(map(float, row)) for row in table]
    if any(v < 0 for row in rows for v in row):
        raise ValidationError("observed counts must be non-negative")
    keep = [j for j in range(len(rows[0])) if rows[0][j] > 0 or rows[1][j] > 0]
    if len(keep) < 2:
        raise ValidationError("fewer than two non-empty columns")
    rows = [[row[j] for j in keep] for row in rows]
    row_totals = [sum(row) for row in rows]
    if any(total == 0 for total in row_totals):
        raise ValidationError("each row must have a positive total")
    col_totals = [rows[0][j] + rows[1][j] for j in range(len(keep))]
    grand = sum(row_totals)
    chi2 = 0.0
    for i in range(2):
        for j in range(len(keep)):
            expected = row_totals[i] * col_totals[j] / grand
            if expected == 0:
                raise EngineError("zero expected count survived column removal")
            diff = rows[i][j] - expected
            chi2 += diff * diff / expected
    return chi2, len(keep) - 1


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series; x < a + 1."""
    if x == 0.0:
        return 0.0
    term = 1.0 / a
    total = term
    n = a
    for _ in range(500):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_contfrac(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction; x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail probability of the chi-square distribution.

    Computed as the regularized upper incomplete gamma Q(df/2, x/2): series
    for the lower function when x/2 < df/2 + 1, continued fraction otherwise.
    """
    if x < 0:
        raise DomainError("chi-square statistic must be >= 0")
    if df < 1:
        raise DomainError("degrees of freedom must be >= 1")
    if x == 0.0:
        return 1.0
    a = df / 2.0
    xg = x / 2.0
    p = 1.0 - _lower_gamma_series(a, xg) if xg < a + 1.0 else _upper_gamma_contfrac(a, xg)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class MethodComparison:
    experiment: str
    criterion: str
    method_a: str
    method_b: str
    table: tuple[tuple[int, ...], tuple[int, ...]]
    chi2: float
    df: int
    p: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int


def _full_histogram(aggregate: RatingAggregate) -> tuple[int, ...]:
    return tuple(aggregate.histogram.get(v, 0) for v in range(1, 6))


def compare_methods(responses: Sequence[SurveyResponse], experiment: str,
                    criterion: str, method_a: str, method_b: str) -> MethodComparison:
    """Chi-square homogeneity of two methods' 1..5 rating histograms."""
    agg_a = aggregate_ratings(responses, experiment, criterion, method_a)
    agg_b = aggregate_ratings(responses, experiment, criterion, method_b)
    if agg_a is None or agg_b is None:
        missing = method_a if agg_a is None else method_b
        raise ValidationError(f"no ratings for method {missing!r} on {criterion!r}")
    table = (_full_histogram(agg_a), _full_histogram(agg_b))
    chi2, df = chi_square_homogeneity(table)
    return MethodComparison(
        experiment=experiment, criterion=criterion, method_a=method_a,
        method_b=method_b, table=table, chi2=chi2, df=df, p=chi2_sf(chi2, df),
        mean_a=agg_a.mean, mean_b=agg_b.mean, n_a=agg_a.n, n_b=agg_b.n)


def likert_criteria(experiment: str) -> list[str]:
    return [q.id for q in INSTRUMENTS[experiment].questions if q.answer_kind == LIKERT]


def methods_present(responses: Sequence[SurveyResponse], experiment: str) -> list[str]:
    present = {r.method for r in responses if r.experiment == experiment and r.method}
    return [m for m in METHOD_KINDS if m in present]


def pairwise_comparisons(responses: Sequence[SurveyResponse],
                         experiment: str) -> list[MethodComparison]:
    """Every method pair on every likert criterion of the experiment."""
    methods = methods_present(responses, experiment)
    out: list[MethodComparison] = []
    for criterion in likert_criteria(experiment):
        for method_a, method_b in combinations(methods, 2):
            out.append(compare_methods(responses, experiment, criterion,
                                       method_a, method_b))
    return out


# ---------------------------------------------------------------------------
# Rank distributions
# ---------------------------------------------------------------------------

def rank_distribution(responses: Sequence[SurveyResponse]) -> list[list[int]]:
    """5 x 5 counts: cell (method, place) over comparative-ranking responses.

    Every row and every column sums to the number of responses because each
    valid answer is a permutation.
    """
    matrix = [[0] * 5 for _ in METHOD_KINDS]
    index = {m: i for i, m in enumerate(METHOD_KINDS)}
    count = 0
    for response in responses:
        if response.experiment != "e3":
            continue
        answer = response.answers.get("e3_rank")
        if (not isinstance(answer, list) or len(answer) != 5
                or set(answer) != set(METHOD_KINDS)):
            raise ValidationError(
                f"participant {response.participant_id!r} submitted a non-permutation "
                f"ranking: {answer!r}")
        for place, method in enumerate(answer):
            matrix[index[method]][place] += 1
        count += 1
    return matrix


# ---------------------------------------------------------------------------
# Loading and CSV export
# ---------------------------------------------------------------------------

def load_responses(path: str | Path) -> list[SurveyResponse]:
    responses = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                responses.append(SurveyResponse.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise EngineError(f"{path}:{lineno}: bad response ({exc})") from exc
    return responses


def save_responses(responses: Sequence[SurveyResponse], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for response in responses:
            fh.write(json.dumps(response.to_dict(), ensure_ascii=False) + "\n")


def write_alignment_csv(path: str | Path, records: Sequence[GenerationRecord],
                        scores: Sequence[AlignmentScore]) -> None:
    by_id = {s.record_id: s.score for s in scores}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", "strategy", "clip_score"])
        for record in records:
            score = by_id.get(record.id)
            writer.writerow([record.id, record.strategy.value,
                             "" if score is None else f"{score:.6f}"])


def write_means_csv(path: str | Path, responses: Sequence[SurveyResponse]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "criterion", "method", "n", "mean"])
        for experiment in ("e1", "e2"):
            for criterion in likert_criteria(experiment):
                for method in methods_present(responses, experiment):
                    agg = aggregate_ratings(responses, experiment, criterion, method)
                    if agg is not None:
                        writer.writerow([experiment, criterion, method, agg.n,
                                         f"{agg.mean:.4f}"])


def write_comparisons_csv(path: str | Path,
                          comparisons: Sequence[MethodComparison]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experiment", "criterion", "method_a", "method_b",
                         "chi2", "df", "p", "mean_a", "mean_b", "n_a", "n_b"])
        for c in comparisons:
            writer.writerow([c.experiment, c.criterion, c.method_a, c.method_b,
                             f"{c.chi2:.6f}", c.df, f"{c.p:.6g}",
                             f"{c.mean_a:.4f}", f"{c.mean_b:.4f}", c.n_a, c.n_b])


def write_rank_matrix_csv(path: str | Path, matrix: Sequence[Sequence[int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method"] + [f"place_{p}" for p in range(1, 6)])
        for method, row in zip(METHOD_KINDS, matrix):
            writer.writerow([method] + list(row))
