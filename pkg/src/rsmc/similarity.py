"""Relation strength for similarity networks.

Vertices are described by properties; each property has a finite case set and
a table of pairwise case dissimilarities. The combined relation strength of
two vertices is the weighted sum of their per-property table entries. The
result is an ordinary RsmMatrix and can be fed to refinement like any other.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError, ParseError
from .rsm import SIMILARITY_TAG, RsmMatrix, Violation


class SimilarityWarning(UserWarning):
    """Degenerate-but-allowed similarity input (collapses, non-metric tables)."""


@dataclass(frozen=True, eq=False)
class CaseTable:
    """Dissimilarity table over one property's case set.

    values[i][j] is the dissimilarity of cases[i] and cases[j]. Construction
    only enforces structure (square, finite, matching the case list); whether
    the entries satisfy the similarity axioms is the validator's business.
    """

    cases: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        cases = tuple(str(c) for c in self.cases)
        if not cases:
            raise InvalidSpecError("a case table needs at least one case")
        if len(set(cases)) != len(cases):
            raise InvalidSpecError(f"duplicate case names in {cases}")
        arr = np.array(self.values, dtype=float)
        if arr.shape != (len(cases), len(cases)):
            raise InvalidSpecError(
                f"table shape {arr.shape} does not match {len(cases)} case(s)"
            )
        if not np.isfinite(arr).all():
            raise InvalidSpecError("table entries must be finite reals")
        arr.setflags(write=False)
        object.__setattr__(self, "cases", cases)
        object.__setattr__(self, "values", arr)

    def case_index(self, case: str) -> int:
        try:
            return self.cases.index(case)
        except ValueError:
            raise InvalidSpecError(f"unknown case {case!r}; expected one of {self.cases}") from None


@dataclass(frozen=True)
class TableReport:
    """Axiom report for one case table.

    The three similarity axioms are non-negativity, coincidence (zero exactly
    on the diagonal), and symmetry. The triangle inequality is reported too:
    it is not an axiom of a single table, but combined vertex strengths only
    form a pseudometric when every table respects it.
    """

    nonnegativity: bool
    coincidence: bool
    symmetry: bool
    triangle: bool
    violations: tuple[Violation, ...]

    @property
    def all_passed(self) -> bool:
        return self.nonnegativity and self.coincidence and self.symmetry and self.triangle


def validate_similarity_table(table: CaseTable, tol: float = 1e-12) -> TableReport:
    """Report-only check of a case table against the similarity axioms."""
    vals = table.values
    names = table.cases
    n = len(names)
    violations: list[Violation] = []

    for i, j in zip(*np.nonzero(vals < 0)):
        violations.append(Violation("negative", (names[i], names[j]), float(vals[i, j])))
    nonnegativity = not violations

    coincidence = True
    for i in range(n):
        if vals[i, i] != 0.0:
            violations.append(Violation("diagonal-nonzero", (names[i],), float(vals[i, i])))
            coincidence = False
    zero_off = (vals == 0.0) & ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(zero_off)):
        violations.append(Violation("offdiagonal-zero", (names[i], names[j]), 0.0))
        coincidence = False

    asym = np.triu(vals != vals.T, k=1)
    for i, j in zip(*np.nonzero(asym)):
        violations.append(
            Violation("asymmetry", (names[i], names[j]), float(abs(vals[i, j] - vals[j, i])))
        )
    symmetry = not asym.any()

    triangle = True
    for i in range(n):
        best = (vals[i][:, None] + vals).min(axis=0)
        for j in np.nonzero(~(vals[i] <= best + tol))[0]:
            k = int(np.argmin(vals[i] + vals[:, j]))
            violations.append(
                Violation("triangle", (names[i], names[k], names[j]), float(vals[i, j] - best[j]))
            )
            triangle = False

    return TableReport(
        nonnegativity=nonnegativity,
        coincidence=coincidence,
        symmetry=symmetry,
        triangle=triangle,
        violations=tuple(violations),
    )


@dataclass(frozen=True, eq=False)
class SimilaritySpec:
    """Everything needed to build a similarity RSM.

    ``assignments`` maps vertex label to {property: case}; its insertion
    order fixes the vertex indexing of the resulting matrix. Construction
    enforces the hard invariants (table axioms except off-diagonal zeros,
    weight signs, complete assignments) and raises InvalidSpecError on any
    failure. Off-diagonal zero table entries and triangle violations are
    legal here; the builder warns about their downstream effects instead.
    """

    properties: tuple[str, ...]
    tables: dict[str, CaseTable]
    weights: tuple[float, ...]
    assignments: dict[str, dict[str, str]] = field(repr=False)

    def __post_init__(self):
        props = tuple(str(p) for p in self.properties)
        if not props:
            raise InvalidSpecError("at least one property is required")
        if len(set(props)) != len(props):
            raise InvalidSpecError(f"duplicate property names in {props}")
        object.__setattr__(self, "properties", props)

        if set(self.tables) != set(props):
            raise InvalidSpecError(
                f"tables keyed by {sorted(self.tables)} but properties are {sorted(props)}"
            )
        for prop in props:
            report = validate_similarity_table(self.tables[prop])
            hard = [v for v in report.violations
                    if v.kind in ("negative", "diagonal-nonzero", "asymmetry")]
            if hard:
                first = hard[0]
                raise InvalidSpecError(
                    f"table for {prop!r} violates {first.kind} at {first.where} "
                    f"({len(hard)} violation(s) total)"
                )

        try:
            weights = tuple(float(w) for w in self.weights)
        except (TypeError, ValueError):
            raise InvalidSpecError(f"weights must be numbers, got {self.weights!r}") from None
        if len(weights) != len(props):
            raise InvalidSpecError(
                f"{len(weights)} weight(s) for {len(props)} property(ies)"
            )
        for w in weights:
            if not (np.isfinite(w) and w >= 0):
                raise InvalidSpecError(f"weights must be finite and nonnegative, got {w}")
        if not any(w > 0 for w in weights):
            raise InvalidSpecError("at least one weight must be positive")
        object.__setattr__(self, "weights", weights)

        if not self.assignments:
            raise InvalidSpecError("at least one vertex assignment is required")
        for label, cases in self.assignments.items():
            if set(cases) != set(props):
                raise InvalidSpecError(
                    f"vertex {label!r} must assign exactly the declared properties; "
                    f"got {sorted(cases)}"
                )
            for prop in props:
                self.tables[prop].case_index(cases[prop])

    @property
    def vertex_labels(self) -> tuple[str, ...]:
        return tuple(self.assignments)


def combine_similarities(spec: SimilaritySpec) -> RsmMatrix:
    """Weighted sum of per-property case dissimilarities for every vertex pair.

    values[u][v] = sum over properties P of weight_P * table_P[case of u,
    case of v]. The matrix is finite, symmetric when the tables are, and has
    a zero diagonal. Distinct vertices with identical effective assignments
    collapse to strength 0; a SimilarityWarning names those pairs, as it does
    tables that break the triangle inequality (either way the combined matrix
    is no longer guaranteed to be a pseudometric).
    """
    labels = spec.vertex_labels
    n = len(labels)
    values = np.zeros((n, n))
    shaky_tables = []
    for prop, weight in zip(spec.properties, spec.weights):
        table = spec.tables[prop]
        if not validate_similarity_table(table).triangle:
            shaky_tables.append(prop)
        idx = np.array([table.case_index(spec.assignments[label][prop]) for label in labels])
        values += weight * table.values[np.ix_(idx, idx)]

    if shaky_tables:
        warnings.warn(
            f"case table(s) {shaky_tables} break the triangle inequality; "
            "the combined matrix may not be a pseudometric",
            SimilarityWarning,
            stacklevel=2,
        )
    collapsed = [
        (labels[i], labels[j])
        for i in range(n)
        for j in range(i + 1, n)
        if values[i, j] == 0.0
    ]
    if collapsed:
        warnings.warn(
            f"{len(collapsed)} vertex pair(s) collapse to zero relation strength: {collapsed}",
            SimilarityWarning,
            stacklevel=2,
        )
    return RsmMatrix(values=values, source_rsm=SIMILARITY_TAG)


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r} in similarity JSON")
        seen[key] = value
    return seen


def _load_similarity_parts(text: str):
    """Parse the JSON document shape without judging its semantics.

    Returns (properties, tables, weights, assignments) with CaseTable values;
    raises ParseError on malformed JSON or wrong shapes.
    """
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad similarity JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("similarity JSON must be an object")
    missing = [k for k in ("properties", "cases", "tables", "weights", "assignments")
               if k not in doc]
    if missing:
        raise ParseError(f"similarity JSON is missing key(s) {missing}")

    props = doc["properties"]
    cases = doc["cases"]
    raw_tables = doc["tables"]
    weights = doc["weights"]
    assignments = doc["assignments"]
    if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
        raise ParseError('"properties" must be an array of strings')
    if not isinstance(cases, dict) or not isinstance(raw_tables, dict):
        raise ParseError('"cases" and "tables" must be objects keyed by property')
    if not isinstance(weights, list) or not all(
        isinstance(w, (int, float)) and not isinstance(w, bool) for w in weights
    ):
        raise ParseError('"weights" must be an array of numbers')
    if not isinstance(assignments, dict) or not all(
        isinstance(v, dict) and all(isinstance(c, str) for c in v.values())
        for v in assignments.values()
    ):
        raise ParseError('"assignments" must map vertex labels to {property: case} objects')
    if set(cases) != set(props) or set(raw_tables) != set(props):
        raise ParseError('"cases" and "tables" must have exactly one entry per property')

    tables = {}
    for prop in props:
        case_list = cases[prop]
        if not isinstance(case_list, list) or not all(isinstance(c, str) for c in case_list):
            raise ParseError(f'"cases" for {prop!r} must be an array of strings')
        rows = raw_tables[prop]
        if not isinstance(rows, list) or not all(
            isinstance(r, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                        for v in r)
            for r in rows
        ):
            raise ParseError(f'"tables" for {prop!r} must be a numeric matrix')
        tables[prop] = CaseTable(cases=tuple(case_list), values=np.array(rows, dtype=float))

    return (
        tuple(props),
        tables,
        tuple(weights),
        {str(k): dict(v) for k, v in assignments.items()},
    )


def parse_similarity_json(text: str) -> SimilaritySpec:
    """Load a SimilaritySpec from its JSON document form.

    Expected shape: {"properties": [...], "cases": {P: [...]},
    "tables": {P: [[...]]}, "weights": [...], "assignments":
    {vertexLabel: {P: case}}}. Malformed JSON or wrong shapes raise
    ParseError; semantically invalid specs raise InvalidSpecError.
    """
    props, tables, weights, assignments = _load_similarity_parts(text)
    return SimilaritySpec(
        properties=props, tables=tables, weights=weights, assignments=assignments
    )
