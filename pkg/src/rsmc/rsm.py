"""Relation strength measurement (RSM) matrices and their validation.

An RSM assigns every ordered vertex pair a nonnegative strength value where 0
means "same vertex", larger means weaker relation, and +inf means the pair is
disconnected. Two generators are provided (shortest-path distance and
effective electrical resistance) plus an axiom validator that works on any
matrix, including externally supplied ones.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import (
    AllZeroProfileError,
    DimensionMismatchError,
    DirectedInputError,
    NumericalError,
    ParseError,
    SingularityError,
)
from .graph import ComponentPartition, Graph, connected_components, undirected_adjacency

log = logging.getLogger(__name__)

SDF_TAG = "sdf"
ERF_TAG = "erf"
SIMILARITY_TAG = "similarity"
EXTERNAL_TAG = "external"

#: Default tolerance for linear-algebra residuals.
RESIDUAL_TOL = 1e-9
#: Default tolerance for axiom checks.
AXIOM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class RsmMatrix:
    """Square matrix of relation strength values over extended nonnegative reals.

    +inf is an explicit sentinel for "no relation whatsoever"; it is never
    approximated by a large finite number. The array is copied on
    construction and frozen against writes.
    """

    values: np.ndarray
    source_rsm: str

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionMismatchError(f"expected a nonempty square matrix, got shape {arr.shape}")
        if np.isnan(arr).any():
            raise ValueError("matrix entries must not be NaN")
        if np.isneginf(arr).any():
            raise ValueError("matrix entries must not be -inf")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "source_rsm", str(self.source_rsm))

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _edge_csr(g: Graph) -> csr_matrix:
    n = g.vertex_count
    if not g.edges:
        return csr_matrix((n, n))
    rows = [s for s, _, _ in g.edges]
    cols = [d for _, d, _ in g.edges]
    data = [w for _, _, w in g.edges]
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def sdf_matrix(g: Graph) -> RsmMatrix:
    """All-pairs shortest-path distance matrix.

    Entry (i, j) is the minimum total weight over directed paths i -> j
    (undirected graphs traverse edges both ways), +inf when j is unreachable
    from i, and 0 on the diagonal. Weights are nonnegative by the Graph
    invariants, so per-source Dijkstra applies.
    """
    dist = dijkstra(_edge_csr(g), directed=g.directed, return_predecessors=False)
    return RsmMatrix(values=dist, source_rsm=SDF_TAG)


def laplacian(g: Graph) -> np.ndarray:
    """Weighted graph Laplacian (degree matrix minus adjacency matrix).

    The degree of a vertex is the sum of the weights of its incident edges.
    """
    if g.directed:
        raise DirectedInputError("Laplacian is defined for undirected graphs only")
    n = g.vertex_count
    lap = np.zeros((n, n))
    for s, d, w in g.edges:
        lap[s, s] += w
        lap[d, d] += w
        lap[s, d] -= w
        lap[d, s] -= w
    return lap


def laplacian_pseudoinverse(component: Graph, residual_tol: float = RESIDUAL_TOL) -> np.ndarray:
    """Generalized inverse of the Laplacian of a connected undirected graph.

    Uses the identity pinv(L) = inv(L + J/n) - J/n where J is the all-ones
    matrix, exact for connected graphs. The result is symmetrized and checked
    to satisfy L @ pinv @ L == L within ``residual_tol`` (max-norm), raising
    NumericalError otherwise. A disconnected input makes L + J/n singular and
    raises SingularityError.
    """
    if component.directed:
        raise DirectedInputError("pseudoinverse is defined for undirected graphs only")
    if connected_components(component).component_count != 1:
        raise SingularityError("input graph is disconnected; per-component Laplacians required")
    lap = laplacian(component)
    n = component.vertex_count
    shift = np.ones((n, n)) / n
    try:
        inv = np.linalg.inv(lap + shift)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"Laplacian shift matrix is singular: {exc}") from exc
    pinv = inv - shift
    pinv = (pinv + pinv.T) / 2.0
    residual = float(np.abs(lap @ pinv @ lap - lap).max())
    if not residual <= residual_tol:
        raise NumericalError(
            f"pseudoinverse residual {residual:.3e} exceeds tolerance {residual_tol:.3e}"
        )
    return pinv


def _subgraph(g: Graph, vertices: list[int], edges: list[tuple[int, int, float]]) -> Graph:
    pos = {v: i for i, v in enumerate(vertices)}
    return Graph(
        vertex_count=len(vertices),
        edges=tuple((pos[s], pos[d], w) for s, d, w in edges),
        directed=False,
        labels=tuple(g.label_of(v) for v in vertices),
    )


def _resistance_block(sub: Graph, residual_tol: float) -> np.ndarray:
    pinv = laplacian_pseudoinverse(sub, residual_tol=residual_tol)
    diag = np.diag(pinv)
    block = diag[:, None] + diag[None, :] - 2.0 * pinv
    np.fill_diagonal(block, 0.0)
    return block


def _thread_cap() -> int:
    raw = os.environ.get("RSMC_THREADS")
    if raw:
        try:
            cap = int(raw)
            if cap >= 1:
                return cap
        except ValueError:
            pass
        log.warning("ignoring invalid RSMC_THREADS=%r", raw)
    return os.cpu_count() or 1


def erf_matrix(g: Graph, residual_tol: float = RESIDUAL_TOL) -> RsmMatrix:
    """Effective-resistance distance matrix of an undirected graph.

    Each edge acts as a resistor whose resistance is the edge weight, so the
    Laplacian is built over conductances (1/weight); for unit weights that is
    the plain adjacency Laplacian. Per connected component the pseudoinverse
    P yields R[i, j] = P[i, i] + P[j, j] - 2 P[i, j]; pairs in different
    components get +inf. The conductance convention is what makes resistance
    scale linearly when all weights scale. Components are processed
    independently (in parallel when RSMC_THREADS allows) with a bit-identical
    deterministic assembly.
    """
    if g.directed:
        raise DirectedInputError("effective resistance is defined for undirected graphs only")
    n = g.vertex_count
    partition = connected_components(g)
    comps = partition.components()
    comp_edges: list[list[tuple[int, int, float]]] = [[] for _ in range(len(comps))]
    for s, d, w in g.edges:
        conductance = 1.0 / w
        if not math.isfinite(conductance):
            raise NumericalError(f"edge ({s}, {d}) weight {w} is too small to invert")
        comp_edges[partition.assignment[s]].append((s, d, conductance))

    subs = [_subgraph(g, comps[cid], comp_edges[cid]) for cid in range(len(comps))]
    cap = min(_thread_cap(), len(subs))
    if cap > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            blocks = list(pool.map(lambda s: _resistance_block(s, residual_tol), subs))
    else:
        blocks = [_resistance_block(s, residual_tol) for s in subs]

    values = np.full((n, n), np.inf)
    for comp, block in zip(comps, blocks):
        idx = np.asarray(comp)
        values[np.ix_(idx, idx)] = block
    np.fill_diagonal(values, 0.0)
    return RsmMatrix(values=values, source_rsm=ERF_TAG)


# ---------------------------------------------------------------------------
# Axiom validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One axiom violation: which check, at which indices, how large."""

    kind: str
    where: tuple
    magnitude: float


@dataclass(frozen=True)
class RsmValidationReport:
    """Per-axiom outcome of validating a matrix against the RSM axioms.

    Flags are None when a check was not applicable (no source graph supplied,
    or symmetry on a directed graph). ``triangle`` covers both the triangle
    inequality and the cut-vertex additivity equality.
    """

    tol: float
    nonnegativity: bool
    coincidence: bool
    connectivity: bool | None
    triangle: bool
    symmetry: bool | None
    violations: tuple[Violation, ...]

    @property
    def all_passed(self) -> bool:
        flags = (self.nonnegativity, self.coincidence, self.connectivity,
                 self.triangle, self.symmetry)
        return all(f is not False for f in flags)

    def summary_lines(self, max_violations: int = 10) -> list[str]:
        def show(flag: bool | None) -> str:
            if flag is None:
                return "skipped"
            return "pass" if flag else "FAIL"

        lines = [
            f"non-negativity:            {show(self.nonnegativity)}",
            f"coincidence (zero diag):   {show(self.coincidence)}",
            f"disconnection pattern:     {show(self.connectivity)}",
            f"triangle + cut additivity: {show(self.triangle)}",
            f"symmetry:                  {show(self.symmetry)}",
        ]
        if self.violations:
            lines.append(f"{len(self.violations)} violation(s), tol={self.tol:g}:")
            for v in self.violations[:max_violations]:
                lines.append(f"  {v.kind} at {v.where}: {v.magnitude:g}")
            if len(self.violations) > max_violations:
                lines.append(f"  ... {len(self.violations) - max_violations} more")
        return lines


def _separations_by_cut_vertex(g: Graph) -> list[tuple[int, list[list[int]]]]:
    """For every cut vertex w, the vertex groups its removal separates.

    Brute force: drop each vertex in turn and re-run reachability inside its
    original component. Quadratic but deterministic and obviously correct,
    which is what a validator wants.
    """
    adj = undirected_adjacency(g)
    partition = connected_components(g)
    comps = partition.components()
    out: list[tuple[int, list[list[int]]]] = []
    for w in range(g.vertex_count):
        comp = comps[partition.assignment[w]]
        rest = [v for v in comp if v != w]
        if len(rest) < 2:
            continue
        unvisited = set(rest)
        parts: list[list[int]] = []
        while unvisited:
            start = min(unvisited)
            stack = [start]
            unvisited.discard(start)
            part = [start]
            while stack:
                u = stack.pop()
                for nb in adj[u]:
                    if nb in unvisited:
                        unvisited.discard(nb)
                        stack.append(nb)
                        part.append(nb)
            parts.append(sorted(part))
        if len(parts) > 1:
            out.append((w, parts))
    return out


def _check_cut_additivity(vals: np.ndarray, g: Graph, tol: float) -> list[Violation]:
    found: list[Violation] = []
    for w, parts in _separations_by_cut_vertex(g):
        for ai in range(len(parts)):
            for bi in range(len(parts)):
                if ai == bi:
                    continue
                a = np.asarray(parts[ai])
                b = np.asarray(parts[bi])
                direct = vals[np.ix_(a, b)]
                legs = vals[a, w][:, None] + vals[w, b][None, :]
                finite = np.isfinite(direct)
                with np.errstate(invalid="ignore"):
                    dev = np.where(finite, np.abs(direct - legs), 0.0)
                bad = finite & ~(dev <= tol)
                for i, j in zip(*np.nonzero(bad)):
                    found.append(
                        Violation("cut-additivity", (int(a[i]), w, int(b[j])), float(dev[i, j]))
                    )
    return found


def validate_rsm(m: RsmMatrix, g: Graph | None = None, tol: float = AXIOM_TOL) -> RsmValidationReport:
    """Check a matrix against the RSM axioms.

    Checks non-negativity, the coincidence axiom (zero diagonal within tol,
    off-diagonal strictly above tol), the disconnection pattern (+inf exactly
    on cross-component pairs, undirected reachability), the triangle
    inequality over all finite triples together with additivity through every
    cut vertex, and symmetry. The pattern and cut-vertex checks need the
    source graph and are skipped when ``g`` is None; symmetry is skipped for
    directed graphs. The alpha-scaling axiom involves two matrices and lives
    in :func:`check_scaling`.
    """
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"tol must be a positive finite real, got {tol}")
    vals = m.values
    n = m.n
    if g is not None and g.vertex_count != n:
        raise DimensionMismatchError(
            f"matrix is {n}x{n} but the graph has {g.vertex_count} vertices"
        )
    violations: list[Violation] = []

    neg = vals < -tol
    for i, j in zip(*np.nonzero(neg)):
        violations.append(Violation("negative", (int(i), int(j)), float(vals[i, j])))
    nonnegativity = not neg.any()

    diag = np.diag(vals)
    diag_bad = ~(np.abs(diag) <= tol)
    for i in np.nonzero(diag_bad)[0]:
        violations.append(Violation("diagonal-nonzero", (int(i),), float(diag[i])))
    off = ~np.eye(n, dtype=bool)
    off_bad = off & ~(vals > tol)
    for i, j in zip(*np.nonzero(off_bad)):
        violations.append(Violation("offdiagonal-zero", (int(i), int(j)), float(vals[i, j])))
    coincidence = not (diag_bad.any() or off_bad.any())

    connectivity: bool | None = None
    if g is not None:
        assignment = np.asarray(connected_components(g).assignment)
        cross = assignment[:, None] != assignment[None, :]
        pattern_bad = np.isinf(vals) != cross
        for i, j in zip(*np.nonzero(pattern_bad)):
            violations.append(Violation("infinity-pattern", (int(i), int(j)), float(vals[i, j])))
        connectivity = not pattern_bad.any()

    triangle_ok = True
    for i in range(n):
        best = (vals[i][:, None] + vals).min(axis=0)
        row_bad = np.isfinite(vals[i]) & ~(vals[i] <= best + tol)
        for j in np.nonzero(row_bad)[0]:
            k = int(np.argmin(vals[i] + vals[:, j]))
            violations.append(
                Violation("triangle", (i, k, int(j)), float(vals[i, j] - best[j]))
            )
            triangle_ok = False
    if g is not None:
        cut_violations = _check_cut_additivity(vals, g, tol)
        violations.extend(cut_violations)
        triangle_ok = triangle_ok and not cut_violations

    symmetry: bool | None = None
    if g is None or not g.directed:
        inf_mask = np.isinf(vals)
        finite_both = ~inf_mask & ~inf_mask.T
        with np.errstate(invalid="ignore"):
            asym = (inf_mask != inf_mask.T) | (finite_both & ~(np.abs(vals - vals.T) <= tol))
        asym &= np.triu(np.ones((n, n), dtype=bool), k=1)
        for i, j in zip(*np.nonzero(asym)):
            gap = float(abs(vals[i, j] - vals[j, i])) if finite_both[i, j] else math.inf
            violations.append(Violation("asymmetry", (int(i), int(j)), gap))
        symmetry = not asym.any()

    return RsmValidationReport(
        tol=tol,
        nonnegativity=nonnegativity,
        coincidence=coincidence,
        connectivity=connectivity,
        triangle=triangle_ok,
        symmetry=symmetry,
        violations=tuple(violations),
    )


def check_scaling(m: RsmMatrix, m_scaled: RsmMatrix, alpha: float, tol: float = AXIOM_TOL) -> bool:
    """True iff ``m_scaled`` equals ``alpha * m`` entrywise.

    Finite entries must agree within ``tol`` and the +inf patterns must be
    identical. ``m_scaled`` is expected to come from the same graph with all
    weights multiplied by ``alpha``.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0):
        raise ValueError(f"alpha must be a positive finite real, got {alpha}")
    if m.values.shape != m_scaled.values.shape:
        raise DimensionMismatchError(
            f"shape mismatch: {m.values.shape} vs {m_scaled.values.shape}"
        )
    inf_a = np.isinf(m.values)
    inf_b = np.isinf(m_scaled.values)
    if (inf_a != inf_b).any():
        return False
    finite = ~inf_a
    return bool(np.all(np.abs(m_scaled.values[finite] - alpha * m.values[finite]) <= tol))


# ---------------------------------------------------------------------------
# Speed profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpeedProfile:
    """Sampled transmission speed over time for one node pair.

    Samples are (time, speed) pairs with strictly increasing nonnegative
    times and nonnegative speeds.
    """

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        norm = tuple((float(t), float(s)) for t, s in self.samples)
        prev = -math.inf
        for t, s in norm:
            if not (math.isfinite(t) and t >= 0):
                raise ValueError(f"sample time {t} must be a nonnegative finite real")
            if not (math.isfinite(s) and s >= 0):
                raise ValueError(f"sample speed {s} must be a nonnegative finite real")
            if t <= prev:
                raise ValueError("sample times must be strictly increasing")
            prev = t
        object.__setattr__(self, "samples", norm)


class SpeedStats(NamedTuple):
    #: Earliest sampled time with positive speed.
    stt: float
    #: Earliest sampled time at or above the threshold, None if never reached.
    cm: float | None


def speed_profile_stats(p: SpeedProfile, delta: float) -> SpeedStats:
    """Shortest transmission time and critical moment of a speed profile.

    ``stt`` is the first sample time with speed > 0; ``delta`` is the lowest
    acceptable speed and ``cm`` is the first sample time with speed >= delta,
    or None when the threshold is never reached. A profile that never goes
    positive (or has no samples at all) raises AllZeroProfileError.
    """
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be a positive finite real, got {delta}")
    stt = None
    cm = None
    for t, s in p.samples:
        if stt is None and s > 0:
            stt = t
        if cm is None and s >= delta:
            cm = t
        if stt is not None and cm is not None:
            break
    if stt is None:
        raise AllZeroProfileError("no sample has positive speed")
    return SpeedStats(stt=stt, cm=cm)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _format_entry(v: float) -> str:
    return "inf" if math.isinf(v) else repr(float(v))


def rsm_to_csv(m: RsmMatrix) -> str:
    """Row-major CSV with an ``inf`` token for +inf, full float precision."""
    lines = [",".join(_format_entry(v) for v in row) for row in m.values]
    return "\n".join(lines) + "\n"


def rsm_from_csv(text: str, source_rsm: str = EXTERNAL_TAG) -> RsmMatrix:
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        row = []
        for tok in line.split(","):
            try:
                v = float(tok.strip())
            except ValueError:
                raise ParseError(f"bad matrix entry {tok.strip()!r}", lineno) from None
            if math.isnan(v):
                raise ParseError(f"NaN matrix entry {tok.strip()!r}", lineno)
            row.append(v)
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows) or len(rows) != width:
        raise DimensionMismatchError(
            f"expected a square matrix, got {len(rows)} rows of width {width}"
        )
    return RsmMatrix(values=np.array(rows), source_rsm=source_rsm)


def rsm_to_json(m: RsmMatrix) -> str:
    """JSON document with nested value arrays; +inf becomes the string "inf"."""
    values = [["inf" if math.isinf(v) else float(v) for v in row] for row in m.values]
    return json.dumps({"rsm": m.source_rsm, "values": values}, indent=2) + "\n"


def rsm_from_json(text: str, source_rsm: str | None = None) -> RsmMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad matrix JSON: {exc}") from exc
    if not isinstance(doc, dict) or "values" not in doc:
        raise ParseError('matrix JSON must be an object with a "values" key')
    raw = doc["values"]
    if not isinstance(raw, list) or not raw:
        raise ParseError('"values" must be a nonempty array of rows')
    rows: list[list[float]] = []
    for row in raw:
        if not isinstance(row, list):
            raise ParseError("matrix rows must be arrays")
        parsed = []
        for v in row:
            if v == "inf":
                parsed.append(math.inf)
            elif isinstance(v, (int, float)) and not isinstance(v, bool) and not math.isnan(v):
                parsed.append(float(v))
            else:
                raise ParseError(f"bad matrix entry {v!r}")
        rows.append(parsed)
    width = len(rows[0])
    if any(len(r) != width for r in rows) or len(rows) != width:
        raise DimensionMismatchError(
            f"expected a square matrix, got {len(rows)} rows of width {width}"
        )
    tag = source_rsm if source_rsm is not None else doc.get("rsm", EXTERNAL_TAG)
    return RsmMatrix(values=np.array(rows), source_rsm=str(tag))
