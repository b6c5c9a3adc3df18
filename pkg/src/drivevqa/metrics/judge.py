"""Answer-quality grading through an external chat model, plus an offline
deterministic stand-in for tests and air-gapped runs."""

from __future__ import annotations

import hashlib
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import requests

from .pairs import EvalPair

ENDPOINT_ENV = "DRIVEVQA_JUDGE_URL"
API_KEY_ENV = "DRIVEVQA_JUDGE_API_KEY"

GRADING_PROMPT = (
    "You are grading an answer from a driving-scene question answering system.\n"
    "Question: {question}\n"
    "Reference answer: {reference}\n"
    "Predicted answer: {prediction}\n"
    "Rate how correct and complete the prediction is compared to the reference.\n"
    "Reply with a single integer score from 0 to 100."
)

_INT_RE = re.compile(r"\d+")


class JudgeUnavailable(RuntimeError):
    """The judge endpoint could not be reached or refused the request."""


class UnparsableVerdict(ValueError):
    def __init__(self, reply: str) -> None:
        super().__init__(f"no usable 0-100 score in judge reply: {reply!r}")
        self.reply = reply


class JudgeClient(Protocol):
    def grade(self, question: str, reference: str, prediction: str) -> str:
        """Grade one answer; return the raw reply text."""
        ...


def grading_prompt(question: str, reference: str, prediction: str) -> str:
    return GRADING_PROMPT.format(question=question, reference=reference,
                                 prediction=prediction)


@dataclass
class StubJudgeClient:
    """Offline judge: the score is a seeded hash of (prediction, reference).

    Deterministic across runs and platforms, so reports built with the stub
    are byte-reproducible.
    """

    seed: int = 0

    def grade(self, question: str, reference: str, prediction: str) -> str:
        payload = f"{self.seed}|{prediction}|{reference}".encode("utf-8")
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        return f"Score: {int.from_bytes(digest, 'big') % 101}"


@dataclass
class HttpJudgeClient:
    """Chat-completion judge over HTTP POST.

    The endpoint URL and API key come from the DRIVEVQA_JUDGE_URL and
    DRIVEVQA_JUDGE_API_KEY environment variables unless given explicitly.
    """

    endpoint: str | None = None
    api_key: str | None = None
    model: str = "gpt-4o"
    timeout_s: float = 30.0
    session: requests.Session = field(default_factory=requests.Session)

    def __post_init__(self) -> None:
        self.endpoint = self.endpoint or os.environ.get(ENDPOINT_ENV)
        self.api_key = self.api_key or os.environ.get(API_KEY_ENV)
        if not self.endpoint:
            raise JudgeUnavailable(f"no judge endpoint configured (set {ENDPOINT_ENV})")

    def grade(self, question: str, reference: str, prediction: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user",
                          "content": grading_prompt(question, reference, prediction)}],
            "temperature": 0,
        }
        try:
            resp = self.session.post(self.endpoint, json=body, headers=headers,
                                     timeout=self.timeout_s)
            resp.raise_for_status()
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
            raise JudgeUnavailable(str(exc)) from exc


def parse_verdict(reply: str) -> int:
    """First integer in the reply, required to be within 0..100."""
    m = _INT_RE.search(reply)
    if m is None:
        raise UnparsableVerdict(reply)
    score = int(m.group())
    if score > 100:
        raise UnparsableVerdict(reply)
    return score


def judge_scores(
    pairs: Sequence[EvalPair],
    client: JudgeClient,
    retries: int = 2,
    max_in_flight: int = 4,
    diagnostics: list[str] | None = None,
) -> float:
    """Mean judge score over the corpus, in [0, 100].

    Each pair is graded independently (concurrently up to
    ``max_in_flight``) against its first reference; a pair whose grading
    keeps failing after ``retries`` additional attempts scores 0 and is
    reported to ``diagnostics``.
    """
    if not pairs:
        raise ValueError("no pairs to judge")

    def grade_one(pair: EvalPair) -> tuple[int, str | None]:
        question = pair.question or pair.question_id
        last_error = "unknown"
        for _ in range(retries + 1):
            try:
                reply = client.grade(question, pair.references[0], pair.prediction)
                return parse_verdict(reply), None
            except (JudgeUnavailable, UnparsableVerdict) as exc:
                last_error = str(exc)
        return 0, f"{pair.question_id}: scored 0 after {retries + 1} attempts ({last_error})"

    if max_in_flight > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            results = list(pool.map(grade_one, pairs))
    else:
        results = [grade_one(p) for p in pairs]

    total = 0
    for score, problem in results:
        total += score
        if problem is not None and diagnostics is not None:
            diagnostics.append(problem)
    return total / len(pairs)
