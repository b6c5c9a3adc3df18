"""Masked cross-entropy over token streams: a text loss over every position
plus a location loss over the positions that spell tag coordinates, combined
with two weights. Includes an exchange format for logits and a
finite-difference checker for the analytic gradient.

Logits are stored as 32-bit floats but every computation here runs in
float64 so the gradient-check tolerance is meaningful.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

LOGITS_MAGIC = b"LGT1"


class LogitsFormatError(ValueError):
    """Base for malformed logits files."""


class BadMagic(LogitsFormatError):
    pass


class TruncatedFile(LogitsFormatError):
    pass


class NonFiniteValue(LogitsFormatError):
    def __init__(self, position: int) -> None:
        super().__init__(f"non-finite logit at flat position {position}")
        self.position = position


class LabelOutOfVocab(ValueError):
    pass


class SpanOutOfRange(ValueError):
    pass


def read_logits_file(path: str | Path) -> np.ndarray:
    """Read a ``LGT1`` logits file into a (T, V) float64 array.

    Layout: 4-byte magic, little-endian u32 T, little-endian u32 V, then
    T*V little-endian float32 values in row-major order.

    Raises:
        BadMagic, TruncatedFile, NonFiniteValue.
    """
    data = Path(path).read_bytes()
    if data[:4] != LOGITS_MAGIC:
        raise BadMagic(f"expected magic {LOGITS_MAGIC!r} at start of {path}")
    if len(data) < 12:
        raise TruncatedFile(f"{path}: header cut short at {len(data)} bytes")
    t, v = struct.unpack_from("<II", data, 4)
    if t < 1 or v < 2:
        raise LogitsFormatError(f"{path}: invalid shape T={t}, V={v} (need T >= 1, V >= 2)")
    need = 12 + 4 * t * v
    if len(data) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes for a {t}x{v} tensor, got {len(data)}")
    values = np.frombuffer(data, dtype="<f4", count=t * v, offset=12)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonFiniteValue(int(bad[0]))
    return values.astype(np.float64).reshape(t, v)


def write_logits_file(path: str | Path, logits: np.ndarray) -> None:
    """Write a (T, V) array in the ``LGT1`` format (values stored as float32)."""
    arr = np.asarray(logits, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"logits must be 2-D, got shape {arr.shape}")
    t, v = arr.shape
    with open(path, "wb") as fp:
        fp.write(LOGITS_MAGIC)
        fp.write(struct.pack("<II", t, v))
        fp.write(arr.astype("<f4").tobytes(order="C"))


@dataclass(frozen=True)
class TokenAlignment:
    """Token ids plus the character range each token covers in the label text."""

    token_ids: tuple[int, ...]
    char_offsets: tuple[tuple[int, int], ...]
    label_text: str

    def __post_init__(self) -> None:
        if len(self.token_ids) != len(self.char_offsets):
            raise ValueError("token_ids and char_offsets must have equal length")
        prev_end = 0
        for i, (start, end) in enumerate(self.char_offsets):
            if start > end:
                raise ValueError(f"offset {i} is inverted: ({start}, {end})")
            if start < prev_end:
                raise ValueError(f"offset {i} overlaps or precedes its predecessor")
            if end > len(self.label_text):
                raise ValueError(f"offset {i} exceeds the label text (length {len(self.label_text)})")
            prev_end = end


def read_alignment_file(fp: IO[str]) -> tuple[TokenAlignment, list[tuple[int, int]]]:
    """Read the JSON alignment sidecar: label text, token ids, per-token
    character offsets, and the numeric coordinate spans to mask."""
    obj = json.load(fp)
    align = TokenAlignment(
        token_ids=tuple(int(t) for t in obj["token_ids"]),
        char_offsets=tuple((int(s), int(e)) for s, e in obj["char_offsets"]),
        label_text=obj["label_text"],
    )
    spans = [(int(s), int(e)) for s, e in obj.get("numeric_spans", [])]
    return align, spans


def build_location_mask(
    align: TokenAlignment,
    numeric_spans: Sequence[tuple[int, int]],
) -> np.ndarray:
    """Mark every token whose character range overlaps a coordinate span.

    Any overlap counts: tokenizers split numbers unpredictably, and dropping
    a token that carries part of a digit would silently weaken the loss.

    Raises:
        SpanOutOfRange: if a span leaves the label text.
    """
    for start, end in numeric_spans:
        if start < 0 or end > len(align.label_text) or start > end:
            raise SpanOutOfRange(f"span ({start}, {end}) outside label text "
                                 f"of length {len(align.label_text)}")
    mask = np.zeros(len(align.token_ids), dtype=bool)
    for i, (tok_start, tok_end) in enumerate(align.char_offsets):
        for start, end in numeric_spans:
            if max(tok_start, start) < min(tok_end, end):
                mask[i] = True
                break
    return mask


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def masked_cross_entropy(
    logits: np.ndarray,
    labels: Sequence[int],
    mask: np.ndarray | None = None,
    reduction: str = "mean",
) -> tuple[float, np.ndarray]:
    """Cross-entropy over the selected positions, with its gradient.

    ``mask=None`` selects every position. The loss is the mean (or sum,
    per ``reduction``) over selected positions of -log softmax(logits_t) at
    the label index. The gradient w.r.t. the logits is
    (softmax - onehot) / count at selected positions and exactly zero
    elsewhere. An empty selection yields loss 0 and a zero gradient, with
    a warning.

    Raises:
        LabelOutOfVocab: if any label index falls outside [0, V).
    """
    logits = np.asarray(logits, dtype=np.float64)
    t, v = logits.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (t,):
        raise ValueError(f"expected {t} labels, got shape {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= v:
        bad = labels[(labels < 0) | (labels >= v)][0]
        raise LabelOutOfVocab(f"label {bad} outside vocabulary of size {v}")
    if reduction not in ("mean", "sum"):
        raise ValueError(f"unknown reduction {reduction!r}")

    selected = np.ones(t, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if selected.shape != (t,):
        raise ValueError(f"mask length {selected.shape} does not match T={t}")
    count = int(selected.sum())
    grad = np.zeros_like(logits)
    if count == 0:
        warnings.warn("selection is empty; cross-entropy is 0 with zero gradient",
                      RuntimeWarning, stacklevel=2)
        return 0.0, grad

    log_probs = _log_softmax(logits[selected])
    sel_labels = labels[selected]
    nll = -log_probs[np.arange(count), sel_labels]
    scale = 1.0 / count if reduction == "mean" else 1.0
    loss = float(nll.sum() * scale)

    sel_grad = np.exp(log_probs)
    sel_grad[np.arange(count), sel_labels] -= 1.0
    grad[selected] = sel_grad * scale
    return loss, grad


@dataclass(frozen=True)
class LossBreakdown:
    loss_text: float
    loss_location: float
    lambda1: float
    lambda2: float
    total: float
    grad: np.ndarray


def total_loss(
    logits: np.ndarray,
    labels: Sequence[int],
    mask: np.ndarray | None,
    lambda1: float,
    lambda2: float,
    reduction: str = "mean",
) -> LossBreakdown:
    """Weighted sum of the all-position text loss and the masked location loss.

    ``total`` is computed as ``lambda1 * loss_text + lambda2 * loss_location``
    in exactly that floating-point order; the gradient combines the two
    per-term gradients with the same weights.
    """
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("loss weights must be non-negative")
    loss_text, grad_text = masked_cross_entropy(logits, labels, None, reduction)
    loss_location, grad_location = masked_cross_entropy(logits, labels, mask, reduction)
    total = lambda1 * loss_text + lambda2 * loss_location
    grad = lambda1 * grad_text + lambda2 * grad_location
    return LossBreakdown(loss_text, loss_location, lambda1, lambda2, total, grad)


def finite_difference_check(
    logits: np.ndarray,
    labels: Sequence[int],
    mask: np.ndarray | None,
    lambda1: float,
    lambda2: float,
    epsilon: float = 1e-5,
    sample_count: int = 32,
    seed: int = 0,
) -> float:
    """Compare the analytic gradient against central finite differences.

    Entries are sampled without replacement by a seeded generator. Returns
    the max relative error ``|fd - analytic| / max(|analytic|, 1e-12)`` over
    the sampled entries (0.0 when nothing is sampled).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    logits = np.asarray(logits, dtype=np.float64)
    breakdown = total_loss(logits, labels, mask, lambda1, lambda2)
    t, v = logits.shape
    n = min(sample_count, t * v)
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    flat_indices = rng.choice(t * v, size=n, replace=False)

    worst = 0.0
    for flat in flat_indices:
        ti, vi = divmod(int(flat), v)
        bumped = logits.copy()
        bumped[ti, vi] += epsilon
        up = total_loss(bumped, labels, mask, lambda1, lambda2).total
        bumped[ti, vi] -= 2 * epsilon
        down = total_loss(bumped, labels, mask, lambda1, lambda2).total
        fd = (up - down) / (2 * epsilon)
        analytic = breakdown.grad[ti, vi]
        rel = abs(fd - analytic) / max(abs(analytic), 1e-12)
        worst = max(worst, rel)
    return worst
