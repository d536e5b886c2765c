"""Deterministic synthetic survey data with known analytic means.

Used by tests and demo scripts: per-method rating distributions are fixed, and
histograms are materialized by largest-remainder quota allocation so the
realized means sit within rounding distance of the analytic ones regardless of
sample size.
"""

from __future__ import annotations

import numpy as np

from .evaluation import (AGE_RANGES, ENGLISH_LEVELS, GENDERS, METHOD_KINDS,
                         OCCUPATIONS, SurveyResponse, likert_criteria)

# Probability of each rating 1..5, per method. Chosen to give the methods
# distinct, ordered analytic means.
METHOD_RATING_DISTS: dict[str, tuple[float, ...]] = {
    "zs": (0.10, 0.20, 0.30, 0.25, 0.15),
    "fs": (0.02, 0.08, 0.20, 0.35, 0.35),
    "cot": (0.05, 0.10, 0.25, 0.35, 0.25),
    "rag_pdf": (0.04, 0.08, 0.22, 0.36, 0.30),
    "rag_blog": (0.06, 0.12, 0.27, 0.33, 0.22),
}


def analytic_means() -> dict[str, float]:
    return {method: sum(r * p for r, p in zip(range(1, 6), dist))
            for method, dist in METHOD_RATING_DISTS.items()}


def quota_counts(dist: tuple[float, ...], n: int) -> list[int]:
    """Largest-remainder apportionment of n observations over the distribution."""
    exact = [p * n for p in dist]
    counts = [int(x) for x in exact]
    remainder = n - sum(counts)
    order = sorted(range(len(dist)), key=lambda i: (exact[i] - counts[i]), reverse=True)
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def _quota_values(dist: tuple[float, ...], n: int,
                  rng: np.random.Generator) -> list[int]:
    values = [rating for rating, count in zip(range(1, 6), quota_counts(dist, n))
              for _ in range(count)]
    rng.shuffle(values)
    return values


def _demographics(rng: np.random.Generator) -> dict:
    return {
        "age_range": AGE_RANGES[int(rng.integers(len(AGE_RANGES)))],
        "gender": GENDERS[int(rng.integers(len(GENDERS)))],
        "occupation": OCCUPATIONS[int(rng.integers(len(OCCUPATIONS)))],
        "art_related": "yes" if rng.random() < 0.2 else "no",
        "english_level": ENGLISH_LEVELS[int(rng.integers(len(ENGLISH_LEVELS)))],
        "prior_ai_survey": "yes" if rng.random() < 0.3 else "no",
        "prior_fashion_survey": "yes" if rng.random() < 0.15 else "no",
        "fashion_interest": int(rng.integers(1, 6)),
    }


def build_synthetic_survey(n_participants: int = 79,
                           seed: int = 7) -> list[SurveyResponse]:
    """E1, E2, and E3 responses for n participants.

    Each participant rates one stimulus per method in E1 and E2 (likert answers
    quota-drawn from METHOD_RATING_DISTS) and submits one E3 ranking.
    """
    rng = np.random.default_rng(seed)
    demographics = [_demographics(rng) for _ in range(n_participants)]
    responses: list[SurveyResponse] = []

    for experiment in ("e1", "e2"):
        criteria = likert_criteria(experiment)
        for method in METHOD_KINDS:
            dist = METHOD_RATING_DISTS[method]
            columns = {criterion: _quota_values(dist, n_participants, rng)
                       for criterion in criteria}
            for i in range(n_participants):
                answers = {criterion: columns[criterion][i] for criterion in criteria}
                if experiment == "e1":
                    abnormal = "yes" if rng.random() < 0.22 else "no"
                    answers["e1_q7"] = abnormal
                    answers["e1_q8"] = (
                        ("yes" if rng.random() < 0.85 else "no")
                        if abnormal == "yes" else None)
                responses.append(SurveyResponse(
                    participant_id=f"p{i:03d}",
                    experiment=experiment,
                    stimulus_id=f"{experiment}-{method}-stim",
                    answers=answers,
                    demographics=demographics[i],
                    method=method,
                    timestamp="1970-01-01T00:00:00Z"))

    for i in range(n_participants):
        order = list(METHOD_KINDS)
        rng.shuffle(order)
        responses.append(SurveyResponse(
            participant_id=f"p{i:03d}",
            experiment="e3",
            stimulus_id="e3-set-0",
            answers={"e3_rank": order},
            demographics=demographics[i],
            method=None,
            timestamp="1970-01-01T00:00:00Z"))

    return responses
