"""Dickson-case labelling of subgroups of GL_2(p)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import (
    Subgroup,
    batch_projective_orders,
    conjugate_contains,
    sl2_intersection,
    standard,
)
from .mat2 import Mat2, batch_det, is_prime

CONTAINS_SL2 = "ContainsSL2"
BOREL = "BorelConj"
SPLIT_NORMALIZER = "SplitNormalizerConj"
NONSPLIT_NORMALIZER = "NonsplitNormalizerConj"
A4, S4, A5 = "ExceptionalA4", "ExceptionalS4", "ExceptionalA5"

# target group for each containment label
CONJ_TARGETS = {BOREL: "B0", SPLIT_NORMALIZER: "Ns", NONSPLIT_NORMALIZER: "Nns"}

# element-order histograms of A4, S4, A5
EXCEPTIONAL_HISTOGRAMS = {
    A4: {1: 1, 2: 3, 3: 8},
    S4: {1: 1, 2: 9, 3: 8, 4: 6},
    A5: {1: 1, 2: 15, 3: 20, 5: 24},
}
EXCEPTIONAL_ORDERS = {A4: 12, S4: 24, A5: 60}


@dataclass(frozen=True)
class ShapeLabel:
    tag: str
    witness: Mat2 | None = None

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.witness is not None:
            out["witness"] = self.witness.encode()
        return out


@dataclass
class ClassificationResult:
    key: str
    labels: list[ShapeLabel]
    projective_order: int
    is_abelian: bool
    is_diagonalizable: bool
    det_image_order: int
    order: int = 0
    diagonalizing_witness: Mat2 | None = field(default=None, repr=False)

    @property
    def tags(self) -> set[str]:
        return {lab.tag for lab in self.labels}

    def label(self, tag: str) -> ShapeLabel | None:
        return next((lab for lab in self.labels if lab.tag == tag), None)

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "labels": [lab.to_json() for lab in self.labels],
            "projective_order": self.projective_order,
            "is_abelian": self.is_abelian,
            "is_diagonalizable": self.is_diagonalizable,
            "det_image_order": self.det_image_order,
        }


def _require_odd_prime(G: Subgroup):
    if not (is_prime(G.n) and G.n >= 3):
        raise ValueError(f"classification needs an odd prime modulus, got {G.n}")


def is_abelian(G: Subgroup) -> bool:
    return G.is_abelian


def is_diagonalizable(G: Subgroup) -> Mat2 | None:
    _require_odd_prime(G)
    return conjugate_contains(standard("Cs", G.n), G)


def scalar_part(G: Subgroup) -> np.ndarray:
    from .mat2 import batch_decode

    a, b, c, d = batch_decode(G.codes, G.n)
    return G.codes[(b == 0) & (c == 0) & (a == d)]


def projective_quotient_histogram(G: Subgroup) -> dict[int, int]:
    """Element orders of G/(Z n G), one count per coset."""
    _require_odd_prime(G)
    z = scalar_part(G).size
    orders = batch_projective_orders(G.codes, G.n)
    vals, counts = np.unique(orders, return_counts=True)
    return {int(v): int(c) // z for v, c in zip(vals, counts)}


def classify(G: Subgroup) -> ClassificationResult:
    """Every Dickson case that applies to G, with conjugating witnesses."""
    _require_odd_prime(G)
    p = G.n
    labels = []
    sl2_count = int(np.count_nonzero(batch_det(G.codes, p) == 1))
    if sl2_count == p * (p * p - 1):
        labels.append(ShapeLabel(CONTAINS_SL2))
    for tag, target in CONJ_TARGETS.items():
        w = conjugate_contains(standard(target, p), G)
        if w is not None:
            labels.append(ShapeLabel(tag, w))
    proj_hist = projective_quotient_histogram(G)
    proj_order = sum(proj_hist.values())
    for tag, hist in EXCEPTIONAL_HISTOGRAMS.items():
        if proj_hist == hist:
            labels.append(ShapeLabel(tag))
    diag = conjugate_contains(standard("Cs", p), G)
    return ClassificationResult(
        key=G.key,
        labels=labels,
        projective_order=proj_order,
        is_abelian=G.is_abelian,
        is_diagonalizable=diag is not None,
        det_image_order=G.order // sl2_count,
        order=G.order,
        diagonalizing_witness=diag,
    )


def check_witnesses(G: Subgroup, result: ClassificationResult) -> bool:
    """Re-verify every conjugating witness by direct containment."""
    from .groups import conjugate_subgroup

    for lab in result.labels:
        if lab.tag in CONJ_TARGETS:
            image = conjugate_subgroup(lab.witness, G)
            if not image.is_subgroup_of(standard(CONJ_TARGETS[lab.tag], G.n)):
                return False
    return True


def sl2_kernel_order(G: Subgroup) -> int:
    return sl2_intersection(G).order
