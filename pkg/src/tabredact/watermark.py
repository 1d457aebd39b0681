"""Watermark interpolation between a base row and the protected target.

A candidate at mixing coefficient gamma moves each feature of the base
toward the target: numerics interpolate linearly, discretes interpolate
then round to the nearest integer, and categoricals switch from the base's
value to the target's at gamma 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dataset import Row
from .encoding import Encoder
from .errors import DataError
from .realism import clip_quantize
from .schema import FeatureKind, FeatureSchema


@dataclass(frozen=True)
class Provenance:
    kind: str  # "watermark" | "sampled"
    base_index: int | None = None
    gamma: float | None = None
    draw_index: int | None = None


@dataclass
class Candidate:
    """A generated row with its origin and encoded distance to the target."""

    row: Row
    provenance: Provenance
    distance_to_target: float
    assigned_label: int | None = None  # boundary-assigned class, set at selection


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def watermark(base: Row, target: Row, gamma: float, schema: FeatureSchema) -> Row:
    """Interpolated row at coefficient gamma (0 -> base, 1 -> target)."""
    if not (0.0 <= gamma <= 1.0):
        raise DataError(f"gamma must lie in [0, 1], got {gamma}")
    out = []
    for spec, b, t in zip(schema.features, base, target):
        if spec.kind is FeatureKind.NUMERIC:
            out.append(gamma * float(t) + (1.0 - gamma) * float(b))
        elif spec.kind is FeatureKind.DISCRETE:
            out.append(_round_half_up(gamma * float(t) + (1.0 - gamma) * float(b)))
        else:
            out.append(t if _round_half_up(gamma) == 1 else b)
    return tuple(out)


def generate_watermark_candidates(
    bases: list[Row],
    target: Row,
    grid_resolution: int,
    schema: FeatureSchema,
    encoder: Encoder,
) -> list[Candidate]:
    """Candidates on the gamma grid {0, 1/r, ..., (r-1)/r} for every base.

    gamma = 1 is excluded (it reproduces the target, which can never carry a
    different label), as is any other grid point that happens to collapse
    onto the target row. Candidates are clipped/quantized and ordered by
    (base index, gamma).
    """
    if not bases:
        raise DataError("need at least one base row")
    if grid_resolution < 1:
        raise DataError("grid resolution must be >= 1")
    target_vec = encoder.encode_row(target)
    target_row = tuple(target)
    out: list[Candidate] = []
    for base_index, base in enumerate(bases):
        for i in range(grid_resolution):
            gamma = i / grid_resolution
            row = clip_quantize(watermark(base, target, gamma, schema), schema)
            if row == target_row:
                continue
            diff = encoder.encode_row(row) - target_vec
            out.append(
                Candidate(
                    row=row,
                    provenance=Provenance("watermark", base_index=base_index, gamma=gamma),
                    distance_to_target=float(diff @ diff),
                )
            )
    return out
