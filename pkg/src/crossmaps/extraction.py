"""Recover the crossmap embedded in an opaque transformation by probing it.

Feeding a transform the array that puts mass 1 on a single source key and
0 everywhere else returns that key's column of outgoing weights; one probe
per source key recovers the whole mapping, no matter how tangled the code
implementing it is.  This observes net behaviour only — conditional logic,
interactions and dead branches inside the script all come out in the wash.

The technique presumes the transform is linear across keys and
deterministic; determinism is spot-checked by probing one key twice before
anything else runs.  Cross-key nonlinearity cannot be detected from these
probes and is the caller's judgement.
"""

from __future__ import annotations

import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from types import SimpleNamespace
from typing import Callable, Sequence

from .core import (
    Crossmap,
    CrossmapError,
    Edge,
    EdgeListDraft,
    MassArray,
    ONE,
    ZERO,
    build_crossmap,
    clean_key,
)
from . import formats

__all__ = [
    "BlackboxTransform",
    "ExternalCommandTransform",
    "ExtractionResult",
    "InProcessTransform",
    "ProbeError",
    "probe_blackbox",
    "rationalize",
]


class ProbeError(CrossmapError):
    """A probe failed: process error, unparsable output, or nondeterminism."""


@dataclass(frozen=True)
class InProcessTransform:
    """Probe target wrapping a direct array -> array function."""

    fn: Callable[[MassArray], MassArray]

    def run(self, array: MassArray) -> MassArray:
        return self.fn(array)


@dataclass(frozen=True)
class ExternalCommandTransform:
    """Probe target launching a command once per probe.

    Protocol: the command reads an array CSV on standard input and writes
    one to standard output; a nonzero exit status is a probe failure.
    """

    argv: tuple[str, ...]

    def __init__(self, argv: Sequence[str]):
        object.__setattr__(self, "argv", tuple(argv))

    def run(self, array: MassArray) -> MassArray:
        try:
            proc = subprocess.run(
                self.argv,
                input=formats.write_array(array),
                capture_output=True,
                text=True,
            )
        except OSError as exc:
            raise ProbeError(f"could not launch {self.argv[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            detail = proc.stderr.strip() or f"exit status {proc.returncode}"
            raise ProbeError(f"{self.argv[0]!r} failed: {detail}")
        stdout = proc.stdout
        output = SimpleNamespace(read=lambda: stdout, name=self.argv[0])
        try:
            return formats.read_array(output)
        except (formats.ParseError, ValueError) as exc:
            raise ProbeError(f"unparsable output from {self.argv[0]!r}: {exc}") from exc


BlackboxTransform = InProcessTransform | ExternalCommandTransform


@dataclass(frozen=True)
class ExtractionResult:
    """Everything a probe session learned.

    ``crossmap`` is present only when every probed source conformed: all
    final weights in (0, 1] and summing to exactly 1.  Otherwise
    ``nonconforming_sources`` carries each offender with its exact probe
    total, and ``raw_weights`` keeps the untouched outputs for diagnosis.
    """

    crossmap: Crossmap | None
    raw_weights: dict[str, MassArray]
    nonconforming_sources: tuple[tuple[str, Fraction], ...]
    tolerance_used: Fraction
    rationalized: bool

    def to_json_dict(self) -> dict:
        return {
            "extracted": self.crossmap is not None,
            "tolerance": str(self.tolerance_used),
            "rationalized": self.rationalized,
            "nonconforming_sources": [
                {"source": s, "total": str(total)} for s, total in self.nonconforming_sources
            ],
        }


def rationalize(value: Fraction | int | str, max_denominator: int) -> Fraction:
    """Closest rational with denominator at most ``max_denominator``.

    Ties (the value sits exactly between two candidates) resolve toward
    the smaller denominator.  Text input is read as an exact base-10
    value, so ``"0.333333"`` snaps to 1/3 under a bound of 100.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be at least 1")
    x = Fraction(value)
    if x.denominator <= max_denominator:
        return x
    # Walk the continued-fraction convergents until the denominator bound,
    # then compare the last convergent with the best semiconvergent.
    p0, q0, p1, q1 = 0, 1, 1, 0
    n, d = x.numerator, x.denominator
    while True:
        a = n // d
        q2 = q0 + a * q1
        if q2 > max_denominator:
            break
        p0, q0, p1, q1 = p1, q1, p0 + a * p1, q2
        n, d = d, n - a * d
    k = (max_denominator - q0) // q1
    semiconvergent = Fraction(p0 + k * p1, q0 + k * q1)
    convergent = Fraction(p1, q1)
    err_semi = abs(semiconvergent - x)
    err_conv = abs(convergent - x)
    if err_conv < err_semi:
        return convergent
    if err_semi < err_conv:
        return semiconvergent
    return convergent if convergent.denominator <= semiconvergent.denominator else semiconvergent


def _identity_probe(keys: tuple[str, ...], hot: str) -> MassArray:
    return MassArray({k: (ONE if k == hot else ZERO) for k in keys})


def probe_blackbox(
    transform: BlackboxTransform,
    source_keys: Sequence[str],
    tolerance: Fraction | str | int = Fraction(1, 10**9),
    rationalize_max_denominator: int | None = None,
    jobs: int = 1,
) -> ExtractionResult:
    """Probe one identity array per source key and assemble the implied crossmap.

    Output values with magnitude at most ``tolerance`` count as zero (no
    edge).  With ``rationalize_max_denominator`` set, each surviving weight
    snaps to the nearest rational under that denominator bound whenever the
    snap moves it by at most ``tolerance``; weights are otherwise kept as
    the exact base-10 values the transform produced, so no precision is
    invented silently.  Probes run concurrently across ``jobs`` workers
    after a serial determinism check on the first key; the session issues
    at most ``len(source_keys) + 1`` probes.
    """
    keys = tuple(dict.fromkeys(clean_key(k) for k in source_keys))
    if not keys:
        raise ValueError("need at least one source key to probe")
    tol = Fraction(tolerance)
    if tol < ZERO:
        raise ValueError("tolerance must be non-negative")

    def probe(hot: str) -> MassArray:
        out = transform.run(_identity_probe(keys, hot))
        if out.missing_keys():
            raise ProbeError(f"probe of {hot!r} produced missing values: {', '.join(out.missing_keys())}")
        return out

    first_out = probe(keys[0])
    if probe(keys[0]) != first_out:
        raise ProbeError(f"transform is nondeterministic: probing {keys[0]!r} twice gave different outputs")

    outputs: dict[str, MassArray] = {keys[0]: first_out}
    rest = keys[1:]
    if rest:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for key, out in zip(rest, pool.map(probe, rest)):
                    outputs[key] = out
        else:
            for key in rest:
                outputs[key] = probe(key)

    snap = rationalize_max_denominator is not None
    edges: list[Edge] = []
    nonconforming: list[tuple[str, Fraction]] = []
    for key in keys:
        weights: dict[str, Fraction] = {}
        for target, value in outputs[key].items():
            assert value is not None
            if abs(value) <= tol:
                continue
            if snap:
                snapped = rationalize(value, rationalize_max_denominator)
                if abs(snapped - value) <= tol:
                    value = snapped
            if value != ZERO:
                weights[target] = value
        total = sum(weights.values(), ZERO)
        if total != ONE or any(not ZERO < w <= ONE for w in weights.values()):
            nonconforming.append((key, total))
        else:
            edges.extend(Edge(key, target, w) for target, w in weights.items())

    crossmap: Crossmap | None = None
    if not nonconforming:
        built = build_crossmap(EdgeListDraft(edges))
        assert isinstance(built, Crossmap)
        crossmap = built
    return ExtractionResult(
        crossmap=crossmap,
        raw_weights=outputs,
        nonconforming_sources=tuple(nonconforming),
        tolerance_used=tol,
        rationalized=snap,
    )
