"""Exterior calculus on a single chart.

Differential forms are stored sparsely on strictly increasing coordinate
index tuples; the Koszul sign of any other index order is computed on
access. Vector fields are coordinate-frame component vectors. The Lie
derivative is computed through the Cartan formula L_v = i_v d + d i_v.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import expr as ex
from .expr import Expression, SampleDomain, Verdict

__all__ = [
    "Chart", "VectorField", "DifferentialForm", "wedge",
    "exterior_derivative", "interior", "lie_bracket", "lie_derivative",
    "sort_with_sign", "merge_with_sign", "form_zero_verdicts",
]


class ChartMismatch(Exception):
    pass


@dataclass(frozen=True)
class Chart:
    names: tuple
    domain: SampleDomain

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be distinct")
        if len(self.names) < 1:
            raise ValueError("chart needs at least one coordinate")
        if self.domain.dim != len(self.names):
            raise ValueError("domain dimension does not match chart")

    @property
    def dim(self) -> int:
        return len(self.names)

    def parse(self, text: str) -> Expression:
        return ex.parse(text, self.names)

    def coordinate(self, name_or_index) -> Expression:
        if isinstance(name_or_index, str):
            return ex.Coord(self.names.index(name_or_index))
        return ex.Coord(name_or_index)


def _check_same_chart(a, b) -> None:
    if a.chart.names != b.chart.names:
        raise ChartMismatch(f"{a.chart.names} vs {b.chart.names}")


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.chart.dim:
            raise ValueError("component count must equal chart dimension")

    @staticmethod
    def from_strings(chart: Chart, comps: Sequence[str]) -> "VectorField":
        return VectorField(chart, tuple(chart.parse(c) for c in comps))

    def apply_to(self, f: Expression) -> Expression:
        """Directional derivative v(f)."""
        return ex.add(*(ex.mul(c, ex.differentiate(f, a))
                        for a, c in enumerate(self.components)))

    def evaluate(self, point) -> list:
        return [ex.evaluate(c, point) for c in self.components]


def sort_with_sign(indices: Sequence[int]) -> tuple[Optional[tuple], int]:
    """Sort an index tuple, returning (sorted tuple, sign); None on repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j] < idx[j - 1]:
            idx[j], idx[j - 1] = idx[j - 1], idx[j]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i] == idx[i - 1]:
            return None, 0
    return tuple(idx), sign


def merge_with_sign(a: Sequence[int], b: Sequence[int]) -> tuple[Optional[tuple], int]:
    """Merge two strictly increasing tuples, counting crossing transpositions."""
    out = []
    i = j = 0
    sign = 1
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
            if (len(a) - i) % 2 == 1:
                sign = -sign
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


class DifferentialForm:
    """Degree-p form; ``terms`` maps increasing index tuples to coefficients."""

    def __init__(self, chart: Chart, degree: int, terms: Mapping[tuple, Expression]):
        if not 0 <= degree <= chart.dim:
            raise ValueError(f"degree {degree} out of range for dim {chart.dim}")
        self.chart = chart
        self.degree = degree
        clean = {}
        for key, coeff in terms.items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"key {key} has wrong length for degree {degree}")
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"key {key} is not strictly increasing")
            if not (isinstance(coeff, ex.Rat) and coeff.value == 0):
                clean[key] = coeff
        self.terms = clean

    @staticmethod
    def zero(chart: Chart, degree: int) -> "DifferentialForm":
        return DifferentialForm(chart, degree, {})

    @staticmethod
    def function(chart: Chart, f: Expression) -> "DifferentialForm":
        return DifferentialForm(chart, 0, {(): f})

    @staticmethod
    def from_strings(chart: Chart, degree: int, terms: Mapping[tuple, str]) -> "DifferentialForm":
        return DifferentialForm(chart, degree,
                                {tuple(k): chart.parse(v) for k, v in terms.items()})

    def coefficient(self, indices: Sequence[int]) -> Expression:
        """Coefficient on an arbitrary index tuple, Koszul sign included."""
        key, sign = sort_with_sign(indices)
        if key is None or key not in self.terms:
            return ex.ZERO
        c = self.terms[key]
        return c if sign == 1 else ex.neg(c)

    def add(self, other: "DifferentialForm") -> "DifferentialForm":
        _check_same_chart(self, other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        keys = set(self.terms) | set(other.terms)
        return DifferentialForm(self.chart, self.degree, {
            k: ex.add(self.terms.get(k, ex.ZERO), other.terms.get(k, ex.ZERO))
            for k in keys})

    def scale(self, f: Expression) -> "DifferentialForm":
        return DifferentialForm(self.chart, self.degree,
                                {k: ex.mul(f, c) for k, c in self.terms.items()})

    def negate(self) -> "DifferentialForm":
        return self.scale(ex.Rat(ex.Fraction(-1)))

    def subtract(self, other: "DifferentialForm") -> "DifferentialForm":
        return self.add(other.negate())

    def evaluate(self, indices: Sequence[int], point) -> float:
        return ex.evaluate(self.coefficient(indices), point)

    def __repr__(self) -> str:
        names = self.chart.names
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            coeff = ex.to_string(self.terms[key], names)
            basis = "^".join(f"d{names[i]}" for i in key)
            parts.append(f"({coeff}) {basis}" if basis else coeff)
        return " + ".join(parts)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    _check_same_chart(a, b)
    n = a.chart.dim
    degree = a.degree + b.degree
    if degree > n:
        return DifferentialForm.zero(a.chart, n)
    out: dict[tuple, Expression] = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            key, sign = merge_with_sign(ka, kb)
            if key is None:
                continue
            term = ex.mul(ca, cb) if sign == 1 else ex.neg(ex.mul(ca, cb))
            out[key] = ex.add(out.get(key, ex.ZERO), term)
    return DifferentialForm(a.chart, degree, out)


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    n = a.chart.dim
    if a.degree >= n:
        return DifferentialForm.zero(a.chart, min(a.degree + 1, n))
    out: dict[tuple, Expression] = {}
    for key, coeff in a.terms.items():
        for beta in range(n):
            d = ex.differentiate(coeff, beta)
            if isinstance(d, ex.Rat) and d.value == 0:
                continue
            new_key, sign = merge_with_sign((beta,), key)
            if new_key is None:
                continue
            term = d if sign == 1 else ex.neg(d)
            out[new_key] = ex.add(out.get(new_key, ex.ZERO), term)
    return DifferentialForm(a.chart, a.degree + 1, out)


def interior(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    _check_same_chart(v, a)
    if a.degree == 0:
        raise ValueError("interior product needs a form of degree >= 1")
    out: dict[tuple, Expression] = {}
    for key, coeff in a.terms.items():
        for pos, alpha in enumerate(key):
            comp = v.components[alpha]
            if isinstance(comp, ex.Rat) and comp.value == 0:
                continue
            rest = key[:pos] + key[pos + 1:]
            term = ex.mul(comp, coeff)
            if pos % 2 == 1:
                term = ex.neg(term)
            out[rest] = ex.add(out.get(rest, ex.ZERO), term)
    return DifferentialForm(a.chart, a.degree - 1, out)


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    _check_same_chart(v, w)
    comps = []
    for alpha in range(v.chart.dim):
        comps.append(ex.sub(v.apply_to(w.components[alpha]),
                            w.apply_to(v.components[alpha])))
    return VectorField(v.chart, tuple(comps))


def lie_derivative(v: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan formula; for degree 0 this is the directional derivative."""
    _check_same_chart(v, a)
    if a.degree == 0:
        f = a.terms.get((), ex.ZERO)
        return DifferentialForm.function(a.chart, v.apply_to(f))
    d_part = interior(v, exterior_derivative(a)) if a.degree < a.chart.dim \
        else DifferentialForm.zero(a.chart, a.degree)
    i_part = exterior_derivative(interior(v, a))
    return d_part.add(i_part)


def form_zero_verdicts(a: DifferentialForm, domain: SampleDomain) -> dict[tuple, Verdict]:
    return {key: ex.is_identically_zero(coeff, domain)
            for key, coeff in a.terms.items()}
