"""Bigraded Weil algebra of an algebroid over a chart.

Local generators and bidegrees: x^a (0,0), theta^i (0,1), xdot^a (1,0),
thetadot^i (1,1). Koszul signs follow total degree, so xdot and theta are
odd while thetadot is even. Monomials are stored canonically as (xdots
ascending, thetas ascending, thetadot multiset) with expression
coefficients in x.

Derivations are determined by their images on the generators; coefficient
functions are differentiated through the images of the coordinates.
Commutators are computed as derivations, never as matrices. The BRST
differential d-hat = d + L_D splits into the coordinate differential

    d = xdot^a d/dx^a + thetadot^i d/dtheta^i

and the Lie derivative along the algebroid differential, obtained as the
commutator of d with

    iota_D = rho^a_i theta^i d/dxdot^a - (1/2) c^k_ij theta^i theta^j d/dthetadot^k.

The connection enters through the horizontal projection h* which fixes x,
theta, xdot and sends thetadot^i to -Omega^i_{a j} xdot^a theta^j; the
complement generators eta^i = thetadot^i + Omega^i_{a j} xdot^a theta^j
span the horizontal part of bidegree (1,1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import expr as ex
from .expr import Expression, SampleDomain
from .exterior import Chart, DifferentialForm, merge_with_sign
from .algebroid import AForm, CheckOutcome, LieAlgebroid
from .connection import AStarValuedForm, Connection, torsion_frame

__all__ = [
    "GradedModel", "WeilElement", "WeilDerivation", "weil_product",
    "encode_form", "encode_aform", "encode_astar", "encode_function",
    "d_de_rham", "iota_bold_d", "lie_bold_d", "brst", "conn_derivation",
    "dcheck_derivation", "iota_rho", "iota_torsion", "hat_iota", "hat_lie",
    "iota_section_field", "iota_lie_field", "h_star", "p_star", "hp_star",
    "eta",
    "build_extension", "theorem_check", "TheoremReport",
    "commirhod_outcome", "lemma916_outcome", "prop917_outcome",
    "cartan_table_check", "parallel_projection_check", "dhat_squared_witness",
    "is_basic", "BasicReport", "random_basket",
]


@dataclass(frozen=True)
class GradedModel:
    """Chart, frame data, and optional connection behind the graded algebra."""

    algebroid: LieAlgebroid
    connection: Optional[Connection] = None

    @property
    def chart(self) -> Chart:
        return self.algebroid.chart

    @property
    def dim(self) -> int:
        return self.algebroid.chart.dim

    @property
    def rank(self) -> int:
        return self.algebroid.rank

    def rho(self, i: int, alpha: int) -> Expression:
        return self.algebroid.bundle.anchor[i][alpha]

    def c(self, i: int, j: int, k: int) -> Expression:
        return self.algebroid.c(i, j, k)

    def omega_coeff(self, j: int, alpha: int, i: int) -> Expression:
        if self.connection is None:
            raise ValueError("this operation needs a connection")
        return self.connection.coeffs[j][alpha][i]


# Monomial keys: (xdots, thetas, thetadots); see module docstring.
Key = tuple


def _key_parity(key: Key) -> int:
    return (len(key[0]) + len(key[1])) % 2


def _key_bidegree(key: Key) -> tuple[int, int]:
    xd, th, td = key
    return (len(xd) + len(td), len(th) + len(td))


class WeilElement:
    def __init__(self, model: GradedModel, terms: Mapping[Key, Expression]):
        self.model = model
        clean = {}
        for key, coeff in terms.items():
            if not (isinstance(coeff, ex.Rat) and coeff.value == 0):
                clean[key] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(model: GradedModel) -> "WeilElement":
        return WeilElement(model, {})

    @staticmethod
    def scalar(model: GradedModel, f: Expression) -> "WeilElement":
        return WeilElement(model, {((), (), ()): f})

    @staticmethod
    def generator(model: GradedModel, kind: str, index: int) -> "WeilElement":
        if kind == "xd":
            key = ((index,), (), ())
        elif kind == "th":
            key = ((), (index,), ())
        elif kind == "td":
            key = ((), (), (index,))
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
        return WeilElement(model, {key: ex.ONE})

    # -- algebra ------------------------------------------------------------

    def add(self, other: "WeilElement") -> "WeilElement":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = ex.add(out.get(key, ex.ZERO), coeff)
        return WeilElement(self.model, out)

    def subtract(self, other: "WeilElement") -> "WeilElement":
        return self.add(other.scale(ex.Rat(ex.Fraction(-1))))

    def scale(self, f: Expression) -> "WeilElement":
        return WeilElement(self.model, {k: ex.mul(f, c) for k, c in self.terms.items()})

    def mul(self, other: "WeilElement") -> "WeilElement":
        self._check(other)
        out: dict[Key, Expression] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key, sign = _key_mul(k1, k2)
                if key is None:
                    continue
                term = ex.mul(c1, c2)
                if sign == -1:
                    term = ex.neg(term)
                out[key] = ex.add(out.get(key, ex.ZERO), term)
        return WeilElement(self.model, out)

    def bidegree_component(self, p: int, q: int) -> "WeilElement":
        return WeilElement(self.model, {k: c for k, c in self.terms.items()
                                        if _key_bidegree(k) == (p, q)})

    def bidegrees(self) -> set:
        return {_key_bidegree(k) for k in self.terms}

    def is_structurally_zero(self) -> bool:
        return not self.terms

    def has_thetadot(self) -> bool:
        return any(k[2] for k in self.terms)

    def zero_outcome(self, domain: SampleDomain) -> CheckOutcome:
        items = [(self._label(k), ex.is_identically_zero(c, domain))
                 for k, c in self.terms.items()]
        return CheckOutcome.from_verdicts(items)

    def _label(self, key: Key) -> str:
        names = self.model.chart.names
        xd, th, td = key
        parts = ([f"d{names[a]}" for a in xd] + [f"th{i}" for i in th]
                 + [f"dth{i}" for i in td])
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.model.chart.names
        parts = []
        for key in sorted(self.terms):
            c = ex.to_string(ex.simplify(self.terms[key]), names)
            label = self._label(key)
            parts.append(f"({c})*{label}" if label != "1" else f"({c})")
        return " + ".join(parts)

    def _check(self, other: "WeilElement") -> None:
        if other.model.chart.names != self.model.chart.names \
                or other.model.rank != self.model.rank:
            raise ValueError("elements live over different models")


def _key_mul(k1: Key, k2: Key) -> tuple[Optional[Key], int]:
    xd1, th1, td1 = k1
    xd2, th2, td2 = k2
    sign = -1 if (len(xd2) * len(th1)) % 2 else 1
    xd, s1 = merge_with_sign(xd1, xd2)
    if xd is None:
        return None, 0
    th, s2 = merge_with_sign(th1, th2)
    if th is None:
        return None, 0
    td = tuple(sorted(td1 + td2))
    return (xd, th, td), sign * s1 * s2


def weil_product(a: WeilElement, b: WeilElement) -> WeilElement:
    return a.mul(b)


# ---------------------------------------------------------------------------
# Encodings of chart-level objects


def encode_function(model: GradedModel, f: Expression) -> WeilElement:
    return WeilElement.scalar(model, f)


def encode_form(model: GradedModel, form: DifferentialForm) -> WeilElement:
    return WeilElement(model, {(key, (), ()): c for key, c in form.terms.items()})


def encode_aform(model: GradedModel, form: AForm) -> WeilElement:
    return WeilElement(model, {((), key, ()): c for key, c in form.terms.items()})


def encode_astar(model: GradedModel, sigma: AStarValuedForm) -> WeilElement:
    terms: dict[Key, Expression] = {}
    for key, vec in sigma.terms.items():
        for i, c in enumerate(vec):
            if not (isinstance(c, ex.Rat) and c.value == 0):
                terms[(key, (i,), ())] = c
    return WeilElement(model, terms)


# ---------------------------------------------------------------------------
# Derivations


class WeilDerivation:
    """Derivation given by generator images; Koszul signs by total parity.

    ``x_images[a]`` is the image of the coordinate function x^a; the action
    on a general coefficient f is sum_a (df/dx^a) x_images[a].
    ``thetadot_images`` may be None for operators only defined on the
    thetadot-free subalgebra (the bigraded forms Omega(M, A)).
    """

    def __init__(self, model: GradedModel, parity: int,
                 x_images: Sequence[WeilElement],
                 xdot_images: Sequence[WeilElement],
                 theta_images: Sequence[WeilElement],
                 thetadot_images: Optional[Sequence[WeilElement]],
                 name: str = ""):
        self.model = model
        self.parity = parity % 2
        self.x_images = tuple(x_images)
        self.xdot_images = tuple(xdot_images)
        self.theta_images = tuple(theta_images)
        self.thetadot_images = None if thetadot_images is None else tuple(thetadot_images)
        self.name = name
        self._has_x_action = any(not img.is_structurally_zero() for img in self.x_images)

    def _image(self, kind: str, index: int) -> WeilElement:
        if kind == "xd":
            return self.xdot_images[index]
        if kind == "th":
            return self.theta_images[index]
        if self.thetadot_images is None:
            raise ValueError(f"derivation {self.name or '?'} is undefined on thetadot")
        return self.thetadot_images[index]

    def apply(self, elem: WeilElement) -> WeilElement:
        model = self.model
        out = WeilElement.zero(model)
        for key, coeff in elem.terms.items():
            xd, th, td = key
            word = ([("xd", a) for a in xd] + [("th", i) for i in th]
                    + [("td", i) for i in td])
            if self._has_x_action:
                mono = WeilElement(model, {key: ex.ONE})
                for alpha in range(model.dim):
                    dc = ex.differentiate(coeff, alpha)
                    if isinstance(dc, ex.Rat) and dc.value == 0:
                        continue
                    out = out.add(self.x_images[alpha].scale(dc).mul(mono))
            prefix_parity = 0
            for pos, (kind, idx) in enumerate(word):
                img = self._image(kind, idx)
                if not img.is_structurally_zero():
                    pre = word[:pos]
                    post = word[pos + 1:]
                    pre_key = _word_to_key(pre)
                    post_key = _word_to_key(post)
                    c = coeff
                    if (self.parity * prefix_parity) % 2:
                        c = ex.neg(c)
                    term = WeilElement(model, {pre_key: c}).mul(img).mul(
                        WeilElement(model, {post_key: ex.ONE}))
                    out = out.add(term)
                if kind != "td":
                    prefix_parity ^= 1
        return out

    def __call__(self, elem: WeilElement) -> WeilElement:
        return self.apply(elem)

    def plus(self, other: "WeilDerivation", name: str = "") -> "WeilDerivation":
        if self.parity != other.parity:
            raise ValueError("can only add derivations of equal parity")
        td = None
        if self.thetadot_images is not None and other.thetadot_images is not None:
            td = [a.add(b) for a, b in zip(self.thetadot_images, other.thetadot_images)]
        return WeilDerivation(
            self.model, self.parity,
            [a.add(b) for a, b in zip(self.x_images, other.x_images)],
            [a.add(b) for a, b in zip(self.xdot_images, other.xdot_images)],
            [a.add(b) for a, b in zip(self.theta_images, other.theta_images)],
            td, name or f"({self.name}+{other.name})")


def _word_to_key(word) -> Key:
    xd = tuple(i for kind, i in word if kind == "xd")
    th = tuple(i for kind, i in word if kind == "th")
    td = tuple(i for kind, i in word if kind == "td")
    return (xd, th, td)


def commutator(a: WeilDerivation, b: WeilDerivation, name: str = "") -> WeilDerivation:
    """Graded commutator [a, b] = a b - (-1)^{|a||b|} b a, as a derivation."""
    model = a.model
    sign = -1 if (a.parity * b.parity) % 2 else 1

    def bracket_on(getter_a: WeilElement, getter_b: WeilElement) -> WeilElement:
        first = a.apply(getter_b)
        second = b.apply(getter_a)
        if sign == 1:
            return first.subtract(second)
        return first.add(second)

    x_imgs = [bracket_on(a.x_images[i], b.x_images[i]) for i in range(model.dim)]
    xd_imgs = [bracket_on(a.xdot_images[i], b.xdot_images[i]) for i in range(model.dim)]
    th_imgs = [bracket_on(a.theta_images[i], b.theta_images[i]) for i in range(model.rank)]
    td_imgs = None
    if a.thetadot_images is not None and b.thetadot_images is not None:
        td_imgs = [bracket_on(a.thetadot_images[i], b.thetadot_images[i])
                   for i in range(model.rank)]
    return WeilDerivation(model, (a.parity + b.parity) % 2, x_imgs, xd_imgs,
                          th_imgs, td_imgs, name or f"[{a.name},{b.name}]")


def _zeros(model: GradedModel, count: int) -> list:
    return [WeilElement.zero(model) for _ in range(count)]


def d_de_rham(model: GradedModel) -> WeilDerivation:
    n, r = model.dim, model.rank
    return WeilDerivation(
        model, 1,
        [WeilElement.generator(model, "xd", a) for a in range(n)],
        _zeros(model, n),
        [WeilElement.generator(model, "td", i) for i in range(r)],
        _zeros(model, r), name="d")


def iota_bold_d(model: GradedModel) -> WeilDerivation:
    n, r = model.dim, model.rank
    xd_imgs = []
    for alpha in range(n):
        terms = {((), (i,), ()): model.rho(i, alpha) for i in range(r)}
        xd_imgs.append(WeilElement(model, terms))
    td_imgs = []
    for k in range(r):
        terms = {}
        for i in range(r):
            for j in range(i + 1, r):
                c = model.c(i, j, k)
                if not (isinstance(c, ex.Rat) and c.value == 0):
                    terms[((), (i, j), ())] = ex.neg(c)
        td_imgs.append(WeilElement(model, terms))
    return WeilDerivation(model, 0, _zeros(model, n), xd_imgs,
                          _zeros(model, r), td_imgs, name="iota_D")


def lie_bold_d(model: GradedModel) -> WeilDerivation:
    return commutator(iota_bold_d(model), d_de_rham(model), name="L_D")


def brst(model: GradedModel) -> WeilDerivation:
    return d_de_rham(model).plus(lie_bold_d(model), name="d_hat")


def conn_derivation(model: GradedModel) -> WeilDerivation:
    """Covariant derivative as a derivation on the thetadot-free subalgebra."""
    n, r = model.dim, model.rank
    th_imgs = []
    for i in range(r):
        terms = {}
        for alpha in range(n):
            for j in range(r):
                om = model.omega_coeff(i, alpha, j)
                if not (isinstance(om, ex.Rat) and om.value == 0):
                    key = ((alpha,), (j,), ())
                    terms[key] = ex.add(terms.get(key, ex.ZERO), ex.neg(om))
        th_imgs.append(WeilElement(model, terms))
    return WeilDerivation(
        model, 1,
        [WeilElement.generator(model, "xd", a) for a in range(n)],
        _zeros(model, n), th_imgs, None, name="D")


def dcheck_derivation(model: GradedModel) -> WeilDerivation:
    """Opposite-connection derivation: the algebroid differential on
    functions and frame forms, the dual A-connection on coordinate 1-forms."""
    n, r = model.dim, model.rank
    x_imgs = []
    for alpha in range(n):
        x_imgs.append(WeilElement(model, {((), (i,), ()): model.rho(i, alpha)
                                          for i in range(r)}))
    xd_imgs = []
    for alpha in range(n):
        terms: dict[Key, Expression] = {}
        for beta in range(n):
            for i in range(r):
                val = ex.neg(ex.differentiate(model.rho(i, alpha), beta))
                for j in range(r):
                    val = ex.add(val, ex.mul(model.rho(j, alpha),
                                             model.omega_coeff(j, beta, i)))
                if not (isinstance(val, ex.Rat) and val.value == 0):
                    terms[((beta,), (i,), ())] = val
        xd_imgs.append(WeilElement(model, terms))
    th_imgs = []
    for k in range(r):
        terms = {}
        for i in range(r):
            for j in range(i + 1, r):
                c = model.c(i, j, k)
                if not (isinstance(c, ex.Rat) and c.value == 0):
                    terms[((), (i, j), ())] = ex.neg(c)
        th_imgs.append(WeilElement(model, terms))
    return WeilDerivation(model, 1, x_imgs, xd_imgs, th_imgs, None, name="Dcheck")


def iota_rho(model: GradedModel) -> WeilDerivation:
    n, r = model.dim, model.rank
    xd_imgs = [WeilElement(model, {((), (i,), ()): model.rho(i, alpha)
                                   for i in range(r)}) for alpha in range(n)]
    return WeilDerivation(model, 0, _zeros(model, n), xd_imgs,
                          _zeros(model, r), None, name="iota_rho")


def iota_torsion(model: GradedModel) -> WeilDerivation:
    if model.connection is None:
        raise ValueError("torsion insertion needs a connection")
    n, r = model.dim, model.rank
    tf = torsion_frame(model.algebroid, model.connection)
    th_imgs = []
    for k in range(r):
        terms = {}
        for (i, j), comps in tf.items():
            c = comps[k]
            if not (isinstance(c, ex.Rat) and c.value == 0):
                terms[((), (i, j), ())] = c
        th_imgs.append(WeilElement(model, terms))
    return WeilDerivation(model, 1, _zeros(model, n), _zeros(model, n),
                          th_imgs, None, name="iota_T")


def hat_iota(model: GradedModel, components: Sequence[Expression]) -> WeilDerivation:
    """Interior derivative along a section on the full Weil algebra."""
    if model.connection is None:
        raise ValueError("the interior derivative on W(A) needs a connection")
    n, r = model.dim, model.rank
    th_imgs = [WeilElement.scalar(model, components[i]) for i in range(r)]
    td_imgs = []
    for j in range(r):
        terms: dict[Key, Expression] = {}
        for alpha in range(n):
            total = ex.add(*(ex.mul(components[i], model.omega_coeff(j, alpha, i))
                             for i in range(r)))
            if not (isinstance(total, ex.Rat) and total.value == 0):
                terms[((alpha,), (), ())] = total
        td_imgs.append(WeilElement(model, terms))
    return WeilDerivation(model, 1, _zeros(model, n), _zeros(model, n),
                          th_imgs, td_imgs, name="hat_iota")


def hat_lie(model: GradedModel, components: Sequence[Expression]) -> WeilDerivation:
    return commutator(hat_iota(model, components), brst(model), name="hat_L")


def iota_section_field(model: GradedModel, components: Sequence[Expression]) -> WeilDerivation:
    """De Rham interior along the vertical field of a section: b^k d/dthetadot^k."""
    r = model.rank
    td_imgs = [WeilElement.scalar(model, components[k]) for k in range(r)]
    return WeilDerivation(model, 0, _zeros(model, model.dim),
                          _zeros(model, model.dim), _zeros(model, r),
                          td_imgs, name="iota_i")


def iota_lie_field(model: GradedModel, components: Sequence[Expression]) -> WeilDerivation:
    """De Rham interior along the algebroid Lie-derivative field of a section."""
    n, r = model.dim, model.rank
    xd_imgs = []
    for alpha in range(n):
        total = ex.add(*(ex.mul(components[k], model.rho(k, alpha))
                         for k in range(r)))
        xd_imgs.append(WeilElement.scalar(model, total))
    td_imgs = []
    for m in range(r):
        terms: dict[Key, Expression] = {}
        for j in range(r):
            total = ex.add(*(ex.neg(ex.mul(components[k], model.c(k, j, m)))
                             for k in range(r) if k != j))
            if not (isinstance(total, ex.Rat) and total.value == 0):
                key = ((), (j,), ())
                terms[key] = ex.add(terms.get(key, ex.ZERO), total)
        # coefficient-derivative part: (bold-d b^m) iota_{i_frame}
        for i in range(r):
            db = ex.add(*(ex.mul(model.rho(i, alpha),
                                 ex.differentiate(components[m], alpha))
                          for alpha in range(n)))
            if not (isinstance(db, ex.Rat) and db.value == 0):
                key = ((), (i,), ())
                terms[key] = ex.add(terms.get(key, ex.ZERO), db)
        td_imgs.append(WeilElement(model, terms))
    return WeilDerivation(model, 1, _zeros(model, n), xd_imgs,
                          _zeros(model, r), td_imgs, name="iota_L")


# ---------------------------------------------------------------------------
# Horizontal projection


def h_star(elem: WeilElement) -> WeilElement:
    """Pullback along the horizontal lift; substitutes every thetadot."""
    model = elem.model
    images = [_thetadot_image(model, i) for i in range(model.rank)]
    out = WeilElement.zero(model)
    for key, coeff in elem.terms.items():
        xd, th, td = key
        term = WeilElement(model, {(xd, th, ()): coeff})
        for i in td:
            term = term.mul(images[i])
        out = out.add(term)
    return out


def _thetadot_image(model: GradedModel, i: int) -> WeilElement:
    terms: dict[Key, Expression] = {}
    for alpha in range(model.dim):
        for j in range(model.rank):
            om = model.omega_coeff(i, alpha, j)
            if not (isinstance(om, ex.Rat) and om.value == 0):
                key = ((alpha,), (j,), ())
                terms[key] = ex.add(terms.get(key, ex.ZERO), ex.neg(om))
    return WeilElement(model, terms)


def p_star(elem: WeilElement) -> WeilElement:
    """Inclusion of the thetadot-free bigraded forms into the full algebra."""
    if elem.has_thetadot():
        raise ValueError("p_star is only defined on thetadot-free elements")
    return elem


def hp_star(elem: WeilElement) -> WeilElement:
    """The idempotent projection onto the image of the base algebra."""
    return p_star(h_star(elem))


def eta(model: GradedModel, i: int) -> WeilElement:
    """Horizontal complement generator thetadot^i + Omega^i_{a j} xdot^a theta^j."""
    td = WeilElement.generator(model, "td", i)
    return td.subtract(_thetadot_image(model, i))


# ---------------------------------------------------------------------------
# Closed basic extension of a presymplectic form


def build_extension(model: GradedModel, omega: DifferentialForm,
                    mu: Sequence[Expression]) -> WeilElement:
    """omega-bar = (encoding of omega) + mu_i eta^i."""
    out = encode_form(model, omega)
    for i in range(model.rank):
        out = out.add(eta(model, i).scale(mu[i]))
    return out


@dataclass
class TheoremReport:
    extension: WeilElement
    closed_part: CheckOutcome      # bidegree (3,0) of d_hat omega-bar
    momentum_part: CheckOutcome    # bidegree (2,1)
    bracket_part: CheckOutcome     # bidegree (1,2)
    extension_property: CheckOutcome

    @property
    def closed(self) -> bool:
        return (self.closed_part.passed and self.momentum_part.passed
                and self.bracket_part.passed)


def theorem_check(model: GradedModel, omega: DifferentialForm,
                  mu: Sequence[Expression], domain: SampleDomain) -> TheoremReport:
    """Apply the BRST differential to the horizontal extension and split the
    residual by bidegree; each component mirrors one classical condition
    (closedness of omega, the momentum equation, bracket compatibility)."""
    bar = build_extension(model, omega, mu)
    residual = brst(model).apply(bar)
    closed = residual.bidegree_component(3, 0).zero_outcome(domain)
    momentum = residual.bidegree_component(2, 1).zero_outcome(domain)
    bracket = residual.bidegree_component(1, 2).zero_outcome(domain)
    ext = h_star(bar).subtract(encode_form(model, omega)).zero_outcome(domain)
    return TheoremReport(bar, closed, momentum, bracket, ext)


# ---------------------------------------------------------------------------
# Operator identities


def _generators_basis(model: GradedModel):
    for alpha in range(model.dim):
        yield f"x{alpha}", WeilElement.scalar(model, ex.Coord(alpha))
    for alpha in range(model.dim):
        yield f"dx{alpha}", WeilElement.generator(model, "xd", alpha)
    for i in range(model.rank):
        yield f"th{i}", WeilElement.generator(model, "th", i)


def commirhod_outcome(model: GradedModel, domain: SampleDomain) -> CheckOutcome:
    """Opposite connection vs [iota_rho, D] + iota_T on all generators of the
    thetadot-free subalgebra."""
    dch = dcheck_derivation(model)
    dd = conn_derivation(model)
    ir = iota_rho(model)
    it = iota_torsion(model)
    items = []
    for label, g in _generators_basis(model):
        lhs = dch.apply(g)
        rhs = ir.apply(dd.apply(g)).subtract(dd.apply(ir.apply(g))).add(it.apply(g))
        items.append((f"Dcheck vs [iota_rho,D]+iota_T on {label}",
                      _element_outcome_items(lhs.subtract(rhs), domain)))
    return _merge_items(items)


def lemma916_outcome(model: GradedModel, omega: DifferentialForm,
                     domain: SampleDomain) -> CheckOutcome:
    """iota_rho Dcheck w + 1/2 D iota_rho iota_rho w - iota_T iota_rho w
    - 1/2 iota_rho iota_rho dw vanishes for every 2-form w."""
    dch = dcheck_derivation(model)
    dd = conn_derivation(model)
    ir = iota_rho(model)
    it = iota_torsion(model)
    d = d_de_rham(model)
    w = encode_form(model, omega)
    half = ex.Rat(ex.Fraction(1, 2))
    total = ir.apply(dch.apply(w))
    total = total.add(dd.apply(ir.apply(ir.apply(w))).scale(half))
    total = total.subtract(it.apply(ir.apply(w)))
    total = total.subtract(ir.apply(ir.apply(d.apply(w))).scale(half))
    return total.zero_outcome(domain)


def prop917_outcome(model: GradedModel, mu: Sequence[Expression],
                    domain: SampleDomain) -> tuple[CheckOutcome, CheckOutcome]:
    """(<mu, iota_rho R + D T> via the anticommutator of D and Dcheck on mu,
    <mu, D T> alone) as zero checks."""
    dch = dcheck_derivation(model)
    dd = conn_derivation(model)
    mu_elem = WeilElement(model, {((), (i,), ()): mu[i] for i in range(model.rank)})
    full = dd.apply(dch.apply(mu_elem)).add(dch.apply(dd.apply(mu_elem)))
    # <mu, DT>: pair mu with the covariant derivative of the torsion tensor.
    it = iota_torsion(model)
    irho = iota_rho(model)
    # iota_{DT} mu = [D, iota_T] mu  (both odd, so the graded bracket is an
    # anticommutator); subtracting leaves the curvature part.
    dt_part = dd.apply(it.apply(mu_elem)).add(it.apply(dd.apply(mu_elem)))
    return full.zero_outcome(domain), dt_part.zero_outcome(domain)


def _element_outcome_items(elem: WeilElement, domain: SampleDomain):
    return [(elem._label(k), ex.is_identically_zero(c, domain))
            for k, c in elem.terms.items()]


def _merge_items(labelled) -> CheckOutcome:
    flat = []
    for label, items in labelled:
        for sub, verdict in items:
            flat.append((f"{label} [{sub}]", verdict))
    return CheckOutcome.from_verdicts(flat)


# ---------------------------------------------------------------------------
# Cartan commutator table


def random_basket(model: GradedModel, seed: int, count: int = 10) -> list:
    """Deterministic total-degree <= 2 elements for exercising identities."""
    out = []
    n, r = model.dim, model.rank
    gens = ([("xd", a) for a in range(n)] + [("th", i) for i in range(r)]
            + [("td", i) for i in range(r)])
    odd = [g for g in gens if g[0] != "td"]
    for k in range(count):
        pick = int(ex.sample_unit(seed, k, 0) * len(gens))
        kind, idx = gens[min(pick, len(gens) - 1)]
        coord = int(ex.sample_unit(seed, k, 1) * n)
        coeff = ex.add(ex.ONE, ex.mul(ex.Coord(min(coord, n - 1)),
                                      ex.rat(1 + k % 3)))
        elem = WeilElement.generator(model, kind, idx).scale(coeff)
        if kind != "td":
            # pair two odd generators for a degree-2 monomial when possible
            pick2 = int(ex.sample_unit(seed, k, 2) * len(odd))
            kind2, idx2 = odd[min(pick2, len(odd) - 1)]
            if (kind2, idx2) != (kind, idx):
                maybe = elem.mul(WeilElement.generator(model, kind2, idx2))
                if maybe.terms:
                    elem = maybe
        out.append(elem)
    return out


def cartan_table_check(model: GradedModel, domain: SampleDomain,
                       basket_seed: int = 7) -> list:
    """Verify the commutator table of the interior/Lie/differential operators.

    Returns a list of (relation label, CheckOutcome); each relation is
    checked on every generator and on a basket of random low-degree
    elements, with frame sections standing in for the section arguments.
    """
    r = model.rank
    d = d_de_rham(model)
    idd = iota_bold_d(model)
    ld = lie_bold_d(model)

    def frame(i):
        comps = [ex.ZERO] * r
        comps[i] = ex.ONE
        return comps

    def bracket_section(i, j):
        return [model.c(i, j, k) for k in range(r)]

    ii = [iota_section_field(model, frame(i)) for i in range(r)]
    il = [iota_lie_field(model, frame(i)) for i in range(r)]
    li = [commutator(ii[i], d, name=f"L_i{i}") for i in range(r)]
    ll = [commutator(il[i], d, name=f"L_L{i}") for i in range(r)]

    zero = None  # marker for a vanishing right hand side
    relations = []
    for i in range(r):
        relations.append((f"[L_i{i}, iota_D] = iota_L{i}",
                          commutator(li[i], idd), il[i]))
        relations.append((f"[L_D, iota_i{i}] = iota_L{i}",
                          commutator(ld, ii[i]), il[i]))
        relations.append((f"[iota_i{i}, d] = L_i{i}", commutator(ii[i], d), li[i]))
        relations.append((f"[iota_L{i}, d] = L_L{i}", commutator(il[i], d), ll[i]))
        relations.append((f"[L_i{i}, L_D] = L_L{i}",
                          commutator(li[i], ld), ll[i]))
        relations.append((f"[L_D, iota_L{i}] = 0", commutator(ld, il[i]), zero))
        relations.append((f"[L_L{i}, iota_D] = 0", commutator(ll[i], idd), zero))
        relations.append((f"[d, L_i{i}] = 0", commutator(d, li[i]), zero))
        relations.append((f"[d, L_L{i}] = 0", commutator(d, ll[i]), zero))
        relations.append((f"[iota_i{i}, iota_D] = 0", commutator(ii[i], idd), zero))
        relations.append((f"[iota_L{i}, iota_D] = 0", commutator(il[i], idd), zero))
        for j in range(r):
            cij = bracket_section(i, j)
            relations.append((f"[L_i{i}, iota_L{j}] = iota_i[{i},{j}]",
                              commutator(li[i], il[j]),
                              iota_section_field(model, cij)))
            relations.append((f"[L_L{i}, iota_i{j}] = iota_i[{i},{j}]",
                              commutator(ll[i], ii[j]),
                              iota_section_field(model, cij)))
            relations.append((f"[L_L{i}, iota_L{j}] = iota_L[{i},{j}]",
                              commutator(ll[i], il[j]),
                              iota_lie_field(model, cij)))
            relations.append((f"[L_L{i}, L_L{j}] = L_L[{i},{j}]",
                              commutator(ll[i], ll[j]),
                              commutator(iota_lie_field(model, cij), d)))
            relations.append((f"[iota_i{i}, iota_i{j}] = 0",
                              commutator(ii[i], ii[j]), zero))
            relations.append((f"[iota_L{i}, iota_L{j}] = 0",
                              commutator(il[i], il[j]), zero))
            relations.append((f"[L_i{i}, L_i{j}] = 0",
                              commutator(li[i], li[j]), zero))
    relations.append(("[iota_D, d] = L_D", commutator(idd, d), ld))
    relations.append(("[d, L_D] = 0", commutator(d, ld), zero))
    relations.append(("[L_D, iota_D] = 0", commutator(ld, idd), zero))
    relations.append(("[iota_D, iota_D] = 0", commutator(idd, idd), zero))
    relations.append(("[L_D, L_D] = 0", commutator(ld, ld), zero))

    probes = [(label, g) for label, g in _generators_basis(model)]
    probes += [(f"dth{i}", WeilElement.generator(model, "td", i))
               for i in range(model.rank)]
    probes += [(f"basket{k}", e)
               for k, e in enumerate(random_basket(model, basket_seed))]
    results = []
    for label, lhs, rhs in relations:
        items = []
        for plabel, g in probes:
            left = lhs.apply(g)
            diff = left if rhs is None else left.subtract(rhs.apply(g))
            items.append((plabel, _element_outcome_items(diff, domain)))
        results.append((label, _merge_items(items)))
    return results


def parallel_projection_check(model: GradedModel, domain: SampleDomain) -> CheckOutcome:
    """h* d p* must reproduce the connection derivation and h* L_D p* the
    opposite-connection derivation on the generators x, xdot, theta."""
    d = d_de_rham(model)
    ld = lie_bold_d(model)
    dd = conn_derivation(model)
    dch = dcheck_derivation(model)
    items = []
    for label, g in _generators_basis(model):
        p_d = h_star(d.apply(g))
        p_l = h_star(ld.apply(g))
        items.append((f"P(d) vs D on {label}",
                      _element_outcome_items(p_d.subtract(dd.apply(g)), domain)))
        items.append((f"P(L_D) vs Dcheck on {label}",
                      _element_outcome_items(p_l.subtract(dch.apply(g)), domain)))
    return _merge_items(items)


def dhat_squared_witness(model: GradedModel, domain: SampleDomain):
    """None when the BRST differential squares to zero on all generators;
    otherwise (generator label, monomial label, verdict) for a witness."""
    dh = brst(model)
    probes = list(_generators_basis(model))
    probes += [(f"dth{i}", WeilElement.generator(model, "td", i))
               for i in range(model.rank)]
    for label, g in probes:
        sq = dh.apply(dh.apply(g))
        for key, coeff in sq.terms.items():
            verdict = ex.is_identically_zero(coeff, domain)
            if not verdict.is_zero:
                return (label, sq._label(key), verdict)
    return None


# ---------------------------------------------------------------------------
# Horizontal / invariant / basic predicates


@dataclass
class BasicReport:
    horizontal: bool
    invariant: bool
    frame_level_horizontal: bool
    frame_level_invariant: bool
    witness: Optional[str] = None

    @property
    def basic(self) -> bool:
        return self.horizontal and self.invariant

    @property
    def generation_mismatch(self) -> bool:
        """True when frame sections alone and frame-times-coordinate sections
        disagree; flagged because invariance is not function-linear."""
        return (self.frame_level_horizontal != self.horizontal
                or self.frame_level_invariant != self.invariant)


def is_basic(model: GradedModel, elem: WeilElement, domain: SampleDomain) -> BasicReport:
    r, n = model.rank, model.dim
    test_sections = []
    for i in range(r):
        comps = [ex.ZERO] * r
        comps[i] = ex.ONE
        test_sections.append((f"a{i}", comps, True))
        for beta in range(n):
            scaled = [ex.ZERO] * r
            scaled[i] = ex.Coord(beta)
            test_sections.append((f"x{beta}*a{i}", scaled, False))
    dh = brst(model)
    horizontal = frame_horizontal = True
    invariant = frame_invariant = True
    witness = None
    for label, comps, is_frame in test_sections:
        hi = hat_iota(model, comps)
        res_h = hi.apply(elem).zero_outcome(domain)
        lie = commutator(hi, dh)
        res_i = lie.apply(elem).zero_outcome(domain)
        if not res_h.passed:
            horizontal = False
            if is_frame:
                frame_horizontal = False
            witness = witness or f"hat-iota_{label}: {res_h.witness}"
        if not res_i.passed:
            invariant = False
            if is_frame:
                frame_invariant = False
            witness = witness or f"hat-L_{label}: {res_i.witness}"
    return BasicReport(horizontal, invariant, frame_horizontal,
                       frame_invariant, witness)
