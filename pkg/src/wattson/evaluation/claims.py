"""Numeric claim extraction and verification against ground truth.

Scripted transcripts mark verifiable claims inline as
``[#claim <key> <value> <unit>]``; the key names a ground-truth quantity.
Unmarked numeric statements (``12 kWh``, ``$1.20``) are still extracted
but, lacking a key, stay unverifiable and are excluded from the accuracy
denominator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ACCURACY_TOLERANCE_PCT = 5.0

_MARKED = re.compile(r"\[#claim\s+(?P<key>[\w.]+)\s+(?P<value>-?\d+(?:\.\d+)?)\s+(?P<unit>[^\]\s]+)\]")
_PLAIN = re.compile(
    r"(?<!\[#claim )(?:\$(?P<dollars>\d+(?:\.\d+)?)|(?P<value>\d+(?:\.\d+)?)\s?(?P<unit>kWh|kW|W|%|F(?=\b)))"
)


@dataclass
class Claim:
    text: str
    value: float
    unit: str
    key: str | None = None  # ground-truth quantity this claim asserts
    turn: int | None = None
    ground_truth: float | None = None
    percent_error: float | None = None
    verdict: str = "unverifiable"  # accurate | inaccurate | unverifiable


def extract_claims(text: str, turn: int | None = None) -> list[Claim]:
    claims: list[Claim] = []
    consumed: list[tuple[int, int]] = []
    for match in _MARKED.finditer(text):
        consumed.append(match.span())
        claims.append(
            Claim(
                text=match.group(0),
                value=float(match.group("value")),
                unit=match.group("unit"),
                key=match.group("key"),
                turn=turn,
            )
        )
    for match in _PLAIN.finditer(text):
        if any(start <= match.start() < end for start, end in consumed):
            continue
        if match.group("dollars") is not None:
            value, unit = float(match.group("dollars")), "USD"
        else:
            value, unit = float(match.group("value")), match.group("unit")
        claims.append(Claim(text=match.group(0), value=value, unit=unit, turn=turn))
    return claims


def verify_claims(claims: list[Claim], ground_truth: dict[str, float]) -> list[Claim]:
    """Attach verdicts in place and return the list for convenience.

    A claim is accurate iff its ground truth resolves and the absolute
    percent error is at most 5%. Zero ground truth is accurate only for a
    zero claim. Unresolvable claims stay unverifiable.
    """
    for claim in claims:
        if claim.key is None or claim.key not in ground_truth:
            claim.verdict = "unverifiable"
            continue
        truth = ground_truth[claim.key]
        claim.ground_truth = truth
        if truth == 0.0:
            claim.percent_error = 0.0 if claim.value == 0.0 else float("inf")
            claim.verdict = "accurate" if claim.value == 0.0 else "inaccurate"
            continue
        error = abs(claim.value - truth) / abs(truth) * 100.0
        claim.percent_error = error
        claim.verdict = "accurate" if error <= ACCURACY_TOLERANCE_PCT else "inaccurate"
    return claims


def claim_payload(claim: Claim) -> dict:
    return {
        "text": claim.text,
        "value": claim.value,
        "unit": claim.unit,
        "key": claim.key,
        "turn": claim.turn,
        "ground_truth": claim.ground_truth,
        "percent_error": claim.percent_error,
        "verdict": claim.verdict,
    }
