"""Graded-commutative exterior algebra over the fibration's invariant forms.

Generators model the invariant forms on the total space of the T^2-bundle
over the K3 surface: the fiber connection one-forms u1, u2 (curvatures
w1, w2), the dual-side connection forms up1, up2 (curvatures -t*w1,
-t*w2), the Kahler form wS, the holomorphic volume form OmS and its
conjugate, the scalar exponential factor E = e^u (tracked as an integer
exponent), du and the d^c companions, and an opaque Chern-Simons
three-form CS shared by both sides (its two appearances cancel in every
difference we compute).

Coefficients live in Q(i)[t, 1/t, alpha] via sympy expressions.  Two
rewriting relations hold on top of the graded algebra: any monomial
whose base-degree exceeds four vanishes (the base is a real 4-manifold),
and wS or OmS wedged against w1 or w2 vanishes (anti-self-dual (1,1)
forms are primitive and of type (1,1)).

The complex fiber frame is sigma = u1 + i*u2, so d(sigma) = w1 + i*w2 is
a derived fact rather than an independent structure equation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional

import sympy as sp

t = sp.Symbol("t", positive=True)
alpha = sp.Symbol("alpha", nonzero=True)
I = sp.I


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    base_degree: int


_GENERATORS = {
    g.name: g
    for g in [
        Generator("u1", 1, 0),
        Generator("u2", 1, 0),
        Generator("up1", 1, 0),
        Generator("up2", 1, 0),
        Generator("du", 1, 1),
        Generator("dcu", 1, 1),
        Generator("CS", 3, 3),
        Generator("wS", 2, 2),
        Generator("w1", 2, 2),
        Generator("w2", 2, 2),
        Generator("OmS", 2, 2),
        Generator("OmSb", 2, 2),
        Generator("ddcu", 2, 2),
        Generator("FF", 4, 4),
    ]
}

_ORDER = {name: i for i, name in enumerate(_GENERATORS)}


def generator(name: str) -> Generator:
    return _GENERATORS[name]


def _sort_gens(names: tuple[str, ...]) -> tuple[Optional[tuple[str, ...]], int]:
    """Canonically order generator names; returns (sorted, sign) or (None, 0)
    when an odd generator repeats (the monomial vanishes)."""
    lst = list(names)
    sign = 1
    # insertion sort, tracking graded transposition signs
    for i in range(1, len(lst)):
        j = i
        while j > 0 and _ORDER[lst[j - 1]] > _ORDER[lst[j]]:
            if _GENERATORS[lst[j - 1]].degree % 2 and _GENERATORS[lst[j]].degree % 2:
                sign = -sign
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            j -= 1
    for a, b in zip(lst, lst[1:]):
        if a == b and _GENERATORS[a].degree % 2:
            return None, 0
    return tuple(lst), sign


def _vanishes(gens: tuple[str, ...]) -> bool:
    """Rewriting relations: base truncation and primitivity/type of w1, w2."""
    if sum(_GENERATORS[g].base_degree for g in gens) > 4:
        return True
    has_asd = "w1" in gens or "w2" in gens
    if has_asd and ("wS" in gens or "OmS" in gens or "OmSb" in gens):
        return True
    return False


Monomial = tuple[int, tuple[str, ...]]  # (exponent of E, ordered generators)


class Form:
    """Element of the invariant exterior algebra, canonically normalized."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, sp.Expr] | None = None):
        normalized: dict[Monomial, sp.Expr] = {}
        for (e_exp, gens), coeff in (terms or {}).items():
            sorted_gens, sign = _sort_gens(gens)
            if sign == 0 or _vanishes(sorted_gens):
                continue
            key = (e_exp, sorted_gens)
            normalized[key] = normalized.get(key, sp.Integer(0)) + sign * coeff
        self.terms = {}
        for key, coeff in normalized.items():
            c = sp.expand(coeff)
            if c != 0:
                self.terms[key] = c

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Form":
        return Form()

    @staticmethod
    def scalar(c) -> "Form":
        return Form({(0, ()): sp.sympify(c)})

    @staticmethod
    def gen(name: str) -> "Form":
        if name not in _GENERATORS:
            raise KeyError(f"unknown generator {name!r}")
        return Form({(0, (name,)): sp.Integer(1)})

    @staticmethod
    def e_power(n: int) -> "Form":
        """E^n, the n-th power of the conformal factor e^u (degree 0)."""
        return Form({(n, ()): sp.Integer(1)})

    # -- algebra -------------------------------------------------------

    def __add__(self, other: "Form") -> "Form":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, sp.Integer(0)) + coeff
        return Form(terms)

    def __neg__(self) -> "Form":
        return Form({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        c = sp.sympify(c)
        return Form({key: c * v for key, v in self.terms.items()})

    def __rmul__(self, c) -> "Form":
        return self.scale(c)

    def wedge(self, other: "Form") -> "Form":
        terms: dict[Monomial, sp.Expr] = {}
        for (e1, g1), c1 in self.terms.items():
            for (e2, g2), c2 in other.terms.items():
                key = (e1 + e2, g1 + g2)
                coeff = c1 * c2
                # _sort_gens in the Form constructor handles the graded sign
                if key in terms:
                    terms[key] = terms[key] + coeff
                else:
                    terms[key] = coeff
        # identical unsorted tuples share a sign, so premerging is safe
        return Form(terms)

    def __mul__(self, other):
        if isinstance(other, Form):
            return self.wedge(other)
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Form) and (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Form is not hashable")

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e_exp, gens), coeff in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            factors = []
            if e_exp:
                factors.append("E" if e_exp == 1 else f"E^{e_exp}")
            factors.extend(gens)
            body = "^".join(factors) if factors else "1"
            parts.append(f"({coeff})*{body}")
        return " + ".join(parts)


def wedge(a: Form, b: Form) -> Form:
    return a.wedge(b)


# -- exterior derivative ----------------------------------------------

#: Structure equations: d of each generator.  dE = E*du is handled by the
#: E-exponent bookkeeping in d().
def default_rules() -> dict[str, Form]:
    return {
        "u1": Form.gen("w1"),
        "u2": Form.gen("w2"),
        "up1": Form.gen("w1").scale(-t),
        "up2": Form.gen("w2").scale(-t),
        "du": Form.zero(),
        "dcu": Form.gen("ddcu"),
        "ddcu": Form.zero(),
        "wS": Form.zero(),
        "w1": Form.zero(),
        "w2": Form.zero(),
        "OmS": Form.zero(),
        "OmSb": Form.zero(),
        "CS": Form.gen("FF"),
        "FF": Form.zero(),
    }


DEFAULT_RULES = default_rules()


def d(form: Form, rules: Mapping[str, Form] | None = None) -> Form:
    """Exterior derivative: degree-+1 graded derivation over the rules table."""
    rules = DEFAULT_RULES if rules is None else rules
    out = Form.zero()
    for (e_exp, gens), coeff in form.terms.items():
        rest = Form({(e_exp, gens): coeff})
        if e_exp:
            # d(E^n) = n E^n du
            out = out + Form.gen("du").wedge(rest).scale(e_exp)
        sign = 1
        for k, g in enumerate(gens):
            dg = rules[g]
            if not dg.is_zero():
                prefix = Form({(e_exp, gens[:k]): coeff})
                suffix = Form({(0, gens[k + 1:]): sp.Integer(1)})
                out = out + prefix.wedge(dg).wedge(suffix).scale(sign)
            if _GENERATORS[g].degree % 2:
                sign = -sign
    return out


# -- named forms -------------------------------------------------------

def sigma() -> Form:
    """Complex fiber one-form sigma = u1 + i*u2 (so d(sigma) = w1 + i*w2)."""
    return Form.gen("u1") + Form.gen("u2").scale(I)


def sigma_bar() -> Form:
    return Form.gen("u1") - Form.gen("u2").scale(I)


def holomorphic_volume() -> Form:
    """Omega = OmS ^ sigma; closed because OmS kills both curvature forms."""
    return Form.gen("OmS").wedge(sigma())


def hermitian_ansatz() -> Form:
    """omega_{t,u} = E*wS + (i t / 2) sigma ^ sigma_bar."""
    return Form.e_power(1).wedge(Form.gen("wS")) + sigma().wedge(sigma_bar()).scale(I * t / 2)


def dc_omega() -> Form:
    """Input definition of d^c(omega_{t,u}): dcu ^ E*wS - (t/2) sum_j w_j ^ u_j."""
    base = Form.gen("dcu").wedge(Form.e_power(1)).wedge(Form.gen("wS"))
    pairing = Form.gen("w1").wedge(Form.gen("u1")) + Form.gen("w2").wedge(Form.gen("u2"))
    return base - pairing.scale(t / 2)


def dc_omega_dual(rules: Mapping[str, Form] | None = None) -> Form:
    """Same definition on the dual side: fiber size 1/t, curvatures d(up_j)."""
    base = Form.gen("dcu").wedge(Form.e_power(1)).wedge(Form.gen("wS"))
    pairing = Form.zero()
    for j in ("1", "2"):
        pairing = pairing + d(Form.gen("up" + j), rules).wedge(Form.gen("up" + j))
    return base - pairing.scale(1 / (2 * t))


def string_representative(rules: Mapping[str, Form] | None = None) -> Form:
    """H-hat = -d^c(omega) + CS on the original side."""
    return -dc_omega() + Form.gen("CS")


def string_representative_dual(rules: Mapping[str, Form] | None = None) -> Form:
    return -dc_omega_dual(rules) + Form.gen("CS")


# -- builtin identity suite --------------------------------------------

IDENTITIES = ("d2_zero", "omega_closed", "conf_balanced", "dc_omega", "duality_dF")


@dataclass
class IdentityResult:
    name: str
    passed: bool
    witness: Form

    def to_json(self) -> dict:
        return {
            "identity": self.name,
            "pass": self.passed,
            "witness": None if self.passed else repr(self.witness),
        }


def _sample_monomials(rng: random.Random, count: int) -> list[Form]:
    names = list(_GENERATORS)
    out = []
    for _ in range(count):
        picks = rng.sample(names, rng.randint(1, 4))
        f = Form.e_power(rng.randint(-1, 2))
        for name in picks:
            f = f.wedge(Form.gen(name))
        coeff = sp.Rational(rng.randint(-3, 3), rng.randint(1, 4))
        f = f.scale(coeff * t ** rng.randint(-1, 1))
        out.append(f)
    return out


def verify_identity(name: str, rules: Mapping[str, Form] | None = None) -> IdentityResult:
    """Evaluate one builtin identity to normal form; passes iff exactly zero."""
    rules = DEFAULT_RULES if rules is None else rules
    if name == "d2_zero":
        witness = Form.zero()
        for g in _GENERATORS:
            witness = witness + d(d(Form.gen(g), rules), rules)
        rng = random.Random(20240229)
        for m in _sample_monomials(rng, 25):
            ddm = d(d(m, rules), rules)
            if not ddm.is_zero():
                return IdentityResult(name, False, ddm)
        return IdentityResult(name, witness.is_zero(), witness)
    if name == "omega_closed":
        witness = d(holomorphic_volume(), rules)
        return IdentityResult(name, witness.is_zero(), witness)
    if name == "conf_balanced":
        # E^-1 * omega^2 = E*wS^2 + i t wS ^ sigma ^ sigma_bar, up to a constant
        balanced = Form.e_power(1).wedge(Form.gen("wS")).wedge(Form.gen("wS")) + (
            Form.gen("wS").wedge(sigma()).wedge(sigma_bar()).scale(I * t)
        )
        witness = d(balanced, rules)
        return IdentityResult(name, witness.is_zero(), witness)
    if name == "dc_omega":
        lhs = string_representative(rules) - string_representative_dual(rules)
        pair_u = Form.gen("w1").wedge(Form.gen("u1")) + Form.gen("w2").wedge(Form.gen("u2"))
        pair_up = Form.gen("w1").wedge(Form.gen("up1")) + Form.gen("w2").wedge(Form.gen("up2"))
        rhs = pair_u.scale(t / 2) + pair_up.scale(sp.Rational(1, 2))
        witness = lhs - rhs
        return IdentityResult(name, witness.is_zero(), witness)
    if name == "duality_dF":
        lhs = string_representative(rules) - string_representative_dual(rules)
        correspondence = Form.gen("u1").wedge(Form.gen("up1")) + Form.gen("u2").wedge(
            Form.gen("up2")
        )
        rhs = d(correspondence, rules).scale(sp.Rational(1, 2))
        witness = lhs - rhs
        return IdentityResult(name, witness.is_zero(), witness)
    raise KeyError(f"unknown identity {name!r}")


def run_suite(rules: Mapping[str, Form] | None = None) -> list[IdentityResult]:
    return [verify_identity(name, rules) for name in IDENTITIES]


def sign_mutations() -> dict[str, dict[str, Form]]:
    """One mutated rules table per sign-bearing connection structure equation.

    Only the four connection one-forms carry a sign the identity suite can
    see: dE, d(dcu) and d(CS) enter every builtin either through exact
    cancellation or base-degree truncation, so flips there are invisible
    by construction.
    """
    out = {}
    for name in ("u1", "u2", "up1", "up2"):
        rules = default_rules()
        rules[name] = -rules[name]
        out[f"flip d({name})"] = rules
    return out
