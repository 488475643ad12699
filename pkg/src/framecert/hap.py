"""Uniform local approximation certificates for coherent frames.

Given a frame {pi(x_j) g} with dual family {h_j}, a test vector f, and a
tolerance epsilon, the task is to find a compact set L such that for every
group element y and every window K of a configured ball family,

    max_{x in yK} || pi(x) f - P_{yKL} pi(x) f ||  <  epsilon,

where P_{yKL} projects onto span{h_j : x_j in yKL}.  On a finite carrier the
quantifiers over y and K are checked exhaustively, cell by cell, and the
certificate stores the full error table together with a closed-form tail
bound

    ( (C0 / |U|) * tail_mass(V_g f, U, L) / A )^(1/2)

that dominates every cell error whenever the dual family's Bessel constant is
at most 1/A (true for the canonical dual).  The candidate list for L is
scanned smallest-first, so the first success is also the minimal admissible
candidate by monotonicity of the error in L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from framecert.amalgam import local_max, tail_mass
from framecert.frames import FrameSystem, SpanProjector, span_projector
from framecert.groups import (
    CompactSet,
    OutOfCarrier,
    PointSet,
    complement,
    measure,
    product_set,
    separation_constant,
    translate_set,
)
from framecert.representations import apply_rep, voice_transform


class NoAdmissibleL(Exception):
    """No candidate met the tolerance; the candidate family is malformed.

    On a finite group the full carrier always yields error zero, so this can
    only happen when the largest candidate falls short of the carrier.
    """


def local_subspace(duals, X: PointSet, y, S: CompactSet) -> SpanProjector:
    """Projector onto span{h_j : x_j in yS}; empty selection gives the zero map."""
    duals = np.asarray(duals, dtype=complex)
    translated = translate_set(y, S)
    selected = [j for j, p in enumerate(X.points) if p in translated]
    return span_projector(duals[:, selected], dim=duals.shape[0])


def hap_error(frame: FrameSystem, duals, f, y, K: CompactSet, L: CompactSet) -> float:
    """max_{x in yK} ||pi(x) f - P pi(x) f|| with P onto span{h_j : x_j in yKL}.

    OutOfCarrier propagates on truncated groups; boundary cells are the
    caller's to report, never to skip silently.
    """
    projector = local_subspace(duals, frame.points, y, product_set(K, L))
    targets = np.column_stack(
        [apply_rep(frame.rep, x, f) for x in translate_set(y, K).sorted_members()]
    )
    residual = targets - projector.apply(targets)
    return float(np.max(np.linalg.norm(residual, axis=0)))


def theoretical_tail_bound(
    frame: FrameSystem, lower_bound: float, f, U: CompactSet, L: CompactSet, C0: int
) -> float:
    """Tail bound ((C0/|U|) * tail_mass(V_g f, U, L) / A)^(1/2).

    Valid as a uniform upper bound for hap_error at every (y, K) when the
    dual family obeys the Bessel inequality with constant 1/A.
    """
    transform = voice_transform(frame.rep, frame.window, f)
    c = C0 / measure(U)
    return float(np.sqrt(c * tail_mass(transform, U, L) / lower_bound))


@dataclass
class HapScenario:
    """One approximation question: frame with duals, test vector, tolerance, families."""

    frame: FrameSystem
    duals: np.ndarray
    lower_bound: float
    f: np.ndarray
    epsilon: float
    U: CompactSet
    K_family: list[CompactSet]
    L_family: list[CompactSet]
    k_labels: list | None = None
    l_labels: list | None = None
    dual_label: str = "canonical"

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.K_family:
            raise ValueError("K_family must be nonempty")
        if not self.L_family:
            raise ValueError("L_family must be nonempty")
        for smaller, larger in zip(self.L_family, self.L_family[1:]):
            if not smaller.members <= larger.members:
                raise ValueError("L_family must be nested increasing")
        if self.k_labels is None:
            self.k_labels = list(range(len(self.K_family)))
        if self.l_labels is None:
            self.l_labels = list(range(len(self.L_family)))
        self.duals = np.asarray(self.duals, dtype=complex)
        self.f = np.asarray(self.f, dtype=complex)


@dataclass(frozen=True)
class HapCell:
    y: object
    k_label: object
    l_label: object
    error: float | None
    boundary: bool


@dataclass(frozen=True)
class HapCandidate:
    l_label: object
    worst_error: float | None
    theoretical_bound: float | None
    passed: bool
    domination_ok: bool


@dataclass
class HapCertificate:
    """Outcome of the candidate scan: chosen set, worst error, and full table."""

    chosen_L: CompactSet
    chosen_l_label: object
    worst_error: float
    theoretical_bound: float | None
    epsilon: float
    separation: int
    passed: bool
    table: list[HapCell]
    candidates: list[HapCandidate]
    dual_label: str


def find_L(scenario: HapScenario) -> HapCertificate:
    """Scan the candidate family smallest-first and certify the first success.

    Error tables are computed for *every* candidate (they are wanted in
    reports and for monotonicity checks), so the scan does not stop early.
    Cells whose windows escape a truncated carrier are marked boundary and
    excluded from the pass/fail aggregate.
    """
    frame = scenario.frame
    group = frame.rep.group
    dim = frame.rep.dim

    transported = np.column_stack([apply_rep(frame.rep, x, scenario.f) for x in group.carrier])
    point_positions = frame.points.positions()
    by_position: list[list[int]] = [[] for _ in range(group.order)]
    for j, p in enumerate(point_positions):
        by_position[int(p)].append(j)

    c0 = separation_constant(frame.points, scenario.U)
    bounds: list[float | None] = []
    try:
        transform = voice_transform(frame.rep, frame.window, scenario.f)
        sharp = local_max(transform, scenario.U)
    except OutOfCarrier:
        # The window maxima already escape a truncated carrier.
        sharp = None
    if sharp is None:
        bounds = [None] * len(scenario.L_family)
    else:
        c = c0 / measure(scenario.U)
        for L in scenario.L_family:
            try:
                idx = product_set(complement(L), scenario.U).positions()
            except OutOfCarrier:
                bounds.append(None)  # this tail domain escapes; no closed form
                continue
            tail = float(np.sum(sharp.values[idx] ** 2 * group.haar[idx]))
            bounds.append(float(np.sqrt(c * tail / scenario.lower_bound)))

    table: list[HapCell] = []
    worst: dict[int, float] = {}
    dominated: dict[int, bool] = {il: True for il in range(len(scenario.L_family))}
    for ik, K in enumerate(scenario.K_family):
        k_positions = K.positions()
        for il, L in enumerate(scenario.L_family):
            k_label, l_label = scenario.k_labels[ik], scenario.l_labels[il]
            try:
                kl_positions = product_set(K, L).positions()
            except OutOfCarrier:
                table.extend(
                    HapCell(y, k_label, l_label, None, True) for y in group.carrier
                )
                continue
            for y in group.carrier:
                try:
                    yk = group._translate_positions(y, k_positions)
                    ykl = group._translate_positions(y, kl_positions)
                except OutOfCarrier:
                    table.append(HapCell(y, k_label, l_label, None, True))
                    continue
                selected = [j for p in ykl for j in by_position[int(p)]]
                projector = span_projector(scenario.duals[:, selected], dim=dim)
                targets = transported[:, yk]
                residual = targets - projector.matrix @ targets
                error = float(np.max(np.linalg.norm(residual, axis=0)))
                table.append(HapCell(y, k_label, l_label, error, False))
                if error > worst.get(il, -1.0):
                    worst[il] = error
                if bounds[il] is not None and error > bounds[il] + 1e-9:
                    dominated[il] = False

    candidates = []
    chosen_index = None
    for il in range(len(scenario.L_family)):
        worst_l = worst.get(il)
        passed = worst_l is not None and worst_l < scenario.epsilon
        candidates.append(
            HapCandidate(
                l_label=scenario.l_labels[il],
                worst_error=worst_l,
                theoretical_bound=bounds[il],
                passed=passed,
                domination_ok=dominated[il],
            )
        )
        if passed and chosen_index is None:
            chosen_index = il
    if chosen_index is None:
        raise NoAdmissibleL(
            f"no candidate among {scenario.l_labels} reached worst error < {scenario.epsilon}"
        )
    return HapCertificate(
        chosen_L=scenario.L_family[chosen_index],
        chosen_l_label=scenario.l_labels[chosen_index],
        worst_error=worst[chosen_index],
        theoretical_bound=bounds[chosen_index],
        epsilon=scenario.epsilon,
        separation=c0,
        passed=True,
        table=table,
        candidates=candidates,
        dual_label=scenario.dual_label,
    )
