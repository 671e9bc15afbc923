"""Transcript annotation.

Scripted mode uses the deterministic rule-based extractor below (question
marks, marked claim spans, tool-log cross-reference) so the whole suite
runs offline; live mode swaps in an LLM extractor with the same output
shape. Scoring itself happens downstream in compute_metrics — this layer
only extracts and flags.

Rule rubric (versioned with the repo):

* question      — a user sentence ending in "?"; answered when the same
                  turn's assistant response is a non-error message sharing
                  at least one content token with the question.
* question type — "data" when the question references the user's own
                  data (my/our/bill or a known appliance/device name),
                  else "general"; a data question is appropriately
                  answered when the response carries a number.
* recommendation— an assistant sentence opening with an imperative cue
                  (consider/try/shift/set/schedule/...); actionable when
                  it names a number or a known appliance/device.
* jargon        — glossary terms, counted once per run on first use in
                  assistant text; explained when the same sentence carries
                  a parenthetical or a defining phrase.
* claims        — marked claim spans plus plain number-unit patterns.
* control action— control_device / schedule_device_action invocations in
                  the tool log; preceded_by_info when any earlier
                  successful non-control tool ran, confirmed when its
                  confirmation was approved, explained when the same
                  turn's response names the device alongside a causal cue.
"""

from __future__ import annotations

import re
from typing import Any

from wattson.evaluation.claims import Claim, extract_claims

CONTROL_TOOLS = ("control_device", "schedule_device_action")

QUESTION_STOPWORDS = {
    "what", "which", "when", "where", "does", "much", "many", "about",
    "there", "their", "really", "exactly", "please", "your", "mine",
    "this", "that", "these", "those", "have", "will", "would", "could",
    "should", "from", "with", "into", "them", "then", "than",
    "the", "and", "for", "you", "are", "can", "how", "why", "who",
    "did", "not", "its", "was", "has", "had", "but", "any", "all",
    "one", "out", "just", "still",
}

RECOMMENDATION_CUES = (
    "consider ", "try ", "shift ", "set ", "schedule ", "upgrade ",
    "i recommend", "you could", "you should", "run ", "move ",
    "replace ", "apply ", "enroll ", "charge ", "lower ", "raise ",
    "start ", "switch ",
)

EXPLANATION_CUES = (
    "because", "so that", "to reduce", "to save", "to keep",
    "to minimize", "this will", "which cuts", "trims", "while you",
)

DEFINITION_CUES = ("which means", "that is,", "in other words", "stands for", "meaning ")

JARGON_GLOSSARY = (
    "kwh", "kilowatt-hour", "time-of-use", "tou", "peak hours",
    "off-peak", "setpoint", "coefficient of variation", "phantom load",
    "hvac", "uef", "seer", "hspf", "demand response", "vacation mode",
    "self-consumption",
)

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_SOURCE_REF = re.compile(r"\b([\w-]+\.(?:md|csv)(?:#\d+)?)\b")
_WORD = re.compile(r"[a-z0-9-]+")
_MARKER = re.compile(r"\[#claim\s+[\w.]+\s+(-?\d+(?:\.\d+)?)\s+([^\]\s]+)\]")


def _natural(text: str) -> str:
    """Render claim markers as their plain value+unit for the text rules."""
    return _MARKER.sub(lambda m: f"{m.group(1)} {m.group(2)}", text)


def annotate_run(
    transcript: list[dict[str, Any]],
    tool_log: list[dict[str, Any]],
    known_entities: tuple[str, ...] = (),
) -> dict[str, Any]:
    """Rule-based annotations over a completed run.

    ``transcript`` rows: {"turn", "role", "content", "error"?}.
    ``tool_log`` rows: {"turn", "tool", "arguments", "is_error", "status",
    "confirmation_id"?, "device_id"?}.
    """
    entities = tuple(e.lower() for e in known_entities)
    responses_by_turn: dict[int, dict] = {}
    for row in transcript:
        if row["role"] == "assistant":
            view = dict(row)
            view["content"] = _natural(row["content"])
            responses_by_turn.setdefault(row["turn"], view)

    questions = []
    for row in transcript:
        if row["role"] != "user":
            continue
        for sentence in _sentences(row["content"]):
            if not sentence.endswith("?"):
                continue
            response = responses_by_turn.get(row["turn"])
            question_type = _question_type(sentence, entities)
            questions.append(
                {
                    "turn": row["turn"],
                    "text": sentence,
                    "type": question_type,
                    "answered": _answered(sentence, response),
                    "type_match": _type_match(question_type, response),
                }
            )

    recommendations = []
    jargon: list[dict] = []
    seen_terms: set[str] = set()
    claims: list[Claim] = []
    sources: set[str] = set()
    for row in transcript:
        if row["role"] != "assistant":
            continue
        claims.extend(extract_claims(row["content"], turn=row["turn"]))
        content = _natural(row["content"])
        sources.update(_SOURCE_REF.findall(content))
        for sentence in _sentences(content):
            lowered = sentence.lower().lstrip("-*0123456789. ")
            if lowered.startswith(RECOMMENDATION_CUES):
                recommendations.append(
                    {
                        "turn": row["turn"],
                        "text": sentence,
                        "actionable": _actionable(sentence, entities),
                    }
                )
            for term in JARGON_GLOSSARY:
                if term in seen_terms:
                    continue
                if re.search(rf"(?<![\w-]){re.escape(term)}(?![\w-])", sentence.lower()):
                    seen_terms.add(term)
                    jargon.append(
                        {
                            "turn": row["turn"],
                            "term": term,
                            "text": sentence,
                            "explained": _has_definition(sentence),
                        }
                    )

    control_actions = _control_actions(tool_log, responses_by_turn, entities)

    return {
        "questions": questions,
        "recommendations": recommendations,
        "jargon": jargon,
        "claims": claims,
        "sources": sorted(sources),
        "control_actions": control_actions,
    }


# ── per-rule helpers ─────────────────────────────────────────────────────


def _sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT.split(text) if s.strip()]


def _tokens(text: str) -> set[str]:
    return set(_WORD.findall(text.lower()))


def _content_tokens(question: str) -> set[str]:
    return {
        token
        for token in _tokens(question)
        if len(token) >= 3 and token not in QUESTION_STOPWORDS
    }


def _tokens_match(asked: str, answered: str) -> bool:
    # "appliances" answers "appliance", "savings" answers "save".
    if asked == answered:
        return True
    if len(asked) >= 4 and len(answered) >= 4:
        return asked[:3] == answered[:3]
    return False


def _answered(question: str, response: dict | None) -> bool:
    if response is None or response.get("error"):
        return False
    asked = _content_tokens(question)
    if not asked:
        return bool(response["content"].strip())
    available = _tokens(response["content"])
    return any(_tokens_match(q, r) for q in asked for r in available)


def _question_type(question: str, entities: tuple[str, ...]) -> str:
    lowered = f" {question.lower()} "
    if any(marker in lowered for marker in (" my ", " our ", " i save", " i spend", " i use", " bill ")):
        return "data"
    if any(entity in lowered for entity in entities):
        return "data"
    return "general"


def _type_match(question_type: str, response: dict | None) -> bool:
    if response is None or response.get("error"):
        return False
    if question_type == "data":
        return bool(re.search(r"\d", response["content"]))
    return bool(response["content"].strip())


def _actionable(sentence: str, entities: tuple[str, ...]) -> bool:
    if re.search(r"\d", sentence):
        return True
    lowered = sentence.lower()
    return any(entity in lowered for entity in entities)


def _has_definition(sentence: str) -> bool:
    if "(" in sentence:
        return True
    lowered = sentence.lower()
    return any(cue in lowered for cue in DEFINITION_CUES)


def _control_actions(
    tool_log: list[dict],
    responses_by_turn: dict[int, dict],
    entities: tuple[str, ...],
) -> list[dict]:
    approvals: dict[str, str] = {}
    for entry in tool_log:
        if entry["tool"] == "confirm_action" and isinstance(entry.get("content"), dict):
            body = entry["content"]
            if body.get("confirmation_id"):
                approvals[body["confirmation_id"]] = body.get("status", "")

    actions = []
    for index, entry in enumerate(tool_log):
        if entry["tool"] not in CONTROL_TOOLS:
            continue
        if entry.get("is_error"):
            continue  # rejected commands never became actions
        status = entry.get("status")
        confirmation_id = entry.get("confirmation_id")
        if status == "confirmation_required":
            confirmed = approvals.get(confirmation_id, "") in ("executed", "scheduled")
        else:
            confirmed = False  # executed directly, no user confirmation involved
        preceded = any(
            earlier["tool"] not in CONTROL_TOOLS
            and earlier["tool"] != "confirm_action"
            and not earlier.get("is_error")
            for earlier in tool_log[:index]
        )
        device_id = str(entry.get("arguments", {}).get("device_id", ""))
        response = responses_by_turn.get(entry["turn"])
        actions.append(
            {
                "turn": entry["turn"],
                "tool": entry["tool"],
                "device_id": device_id,
                "action": str(entry.get("arguments", {}).get("action", "")),
                "preceded_by_info": preceded,
                "confirmed": confirmed,
                "explained": _explains_action(response, device_id),
            }
        )
    return actions


def _explains_action(response: dict | None, device_id: str) -> bool:
    if response is None or response.get("error"):
        return False
    lowered = response["content"].lower()
    mentions = device_id.lower() in lowered or device_id.replace("_", " ").lower() in lowered
    return mentions and any(cue in lowered for cue in EXPLANATION_CUES)


# ── live-mode LLM extractor ──────────────────────────────────────────────

ANNOTATION_SCHEMA = {
    "type": "object",
    "properties": {
        "questions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "turn": {"type": "integer"},
                    "text": {"type": "string"},
                    "type": {"type": "string", "enum": ["data", "general"]},
                    "answered": {"type": "boolean"},
                    "type_match": {"type": "boolean"},
                },
                "required": ["turn", "text", "answered"],
            },
        },
        "recommendations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "turn": {"type": "integer"},
                    "text": {"type": "string"},
                    "actionable": {"type": "boolean"},
                },
                "required": ["turn", "text", "actionable"],
            },
        },
        "jargon": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "turn": {"type": "integer"},
                    "term": {"type": "string"},
                    "text": {"type": "string"},
                    "explained": {"type": "boolean"},
                },
                "required": ["turn", "term", "explained"],
            },
        },
        "claims": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "turn": {"type": "integer"},
                    "text": {"type": "string"},
                    "value": {"type": "number"},
                    "unit": {"type": "string"},
                    "quantity_key": {"type": ["string", "null"]},
                },
                "required": ["turn", "text", "value", "unit"],
            },
        },
        "sources": {"type": "array", "items": {"type": "string"}},
        "action_explanations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"turn": {"type": "integer"}, "explained": {"type": "boolean"}},
                "required": ["turn", "explained"],
            },
        },
    },
    "required": ["questions", "recommendations", "jargon", "claims", "sources"],
}

ANNOTATOR_PROMPT = """You are an evaluation annotator for a home energy assistant transcript.
Extract, without judging overall quality:

- questions: every user sentence ending in a question mark, with whether the
  assistant's reply in the same turn directly answered it, whether the
  question is data-specific (about the user's own data/devices) or general,
  and whether the reply's style matched that type (data questions deserve
  numbers).
- recommendations: assistant suggestions of actions the user could take, and
  whether each is specific and actionable (names a concrete device, number,
  or step) rather than generic advice.
- jargon: technical terms the assistant used (kWh, time-of-use, setpoint,
  coefficient of variation, ...), each with whether it was explained in
  plain language where first used.
- claims: every numerical factual claim (value + unit). If the claim clearly
  asserts one of the known quantity keys provided, set quantity_key to it,
  else null.
- sources: data or document sources the assistant cited.
- action_explanations: for each turn in which a device action was taken,
  whether the assistant explained why.

Quote exact text spans. Respond with a single JSON document matching the
requested schema.
"""


def annotate_run_llm(
    transcript: list[dict[str, Any]],
    tool_log: list[dict[str, Any]],
    gateway,
    known_entities: tuple[str, ...] = (),
    quantity_keys: tuple[str, ...] = (),
) -> dict[str, Any]:
    """Live-mode annotator: LLM extraction, deterministic scoring downstream.

    Tool-log cross-references (preceded_by_info, confirmed) stay mechanical;
    only text-side annotations come from the model. Output shape matches
    annotate_run.
    """
    from wattson.gateway import ChatRequest, Message

    rendered = "\n".join(
        f"[turn {row['turn']}] {row['role']}: {row['content']}" for row in transcript
    )
    keys = ", ".join(quantity_keys) if quantity_keys else "(none provided)"
    request = ChatRequest(
        messages=(
            Message(role="system", content=ANNOTATOR_PROMPT),
            Message(
                role="user",
                content=f"Known quantity keys: {keys}\n\nTranscript:\n{rendered}",
            ),
        ),
        output_schema=ANNOTATION_SCHEMA,
        temperature=0.0,
    )
    document = gateway.complete_structured(request).content
    assert isinstance(document, dict)

    claims = [
        Claim(
            text=str(raw["text"]),
            value=float(raw["value"]),
            unit=str(raw["unit"]),
            key=raw.get("quantity_key") or None,
            turn=raw.get("turn"),
        )
        for raw in document.get("claims", [])
    ]
    questions = [
        {
            "turn": raw.get("turn"),
            "text": raw.get("text", ""),
            "type": raw.get("type", "general"),
            "answered": bool(raw.get("answered")),
            "type_match": bool(raw.get("type_match", raw.get("answered"))),
        }
        for raw in document.get("questions", [])
    ]
    explained_turns = {
        raw["turn"]: bool(raw["explained"])
        for raw in document.get("action_explanations", [])
    }
    responses_by_turn: dict[int, dict] = {}
    for row in transcript:
        if row["role"] == "assistant":
            responses_by_turn.setdefault(row["turn"], row)
    control_actions = _control_actions(tool_log, responses_by_turn, known_entities)
    for action in control_actions:
        if action["turn"] in explained_turns:
            action["explained"] = explained_turns[action["turn"]]
    return {
        "questions": questions,
        "recommendations": list(document.get("recommendations", [])),
        "jargon": list(document.get("jargon", [])),
        "claims": claims,
        "sources": sorted(set(document.get("sources", []))),
        "control_actions": control_actions,
    }
