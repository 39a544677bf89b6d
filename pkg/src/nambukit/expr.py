"""Exact multivariate polynomials over the rationals and a small expression parser.

Variables are the Nambu coordinates ``x<i>_<a>`` (component ``i`` in 1..3 of
degree of freedom ``a``); parameters are free symbols such as ``m1`` or
``lambda`` that are never differentiated.  Parameters may appear with negative
exponents so that masses can sit in denominators (``1/(2*m1)``); variables
never do.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

MAX_EXPONENT = 2**31 - 1

_VAR_RE = re.compile(r"x([1-9][0-9]*)_([1-9][0-9]*)\Z")
_PARAM_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")

Number = Union[int, Fraction]


class ParseError(ValueError):
    """Malformed expression text; ``position`` is a 0-based column."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SpaceError(ValueError):
    """A polynomial refers to a symbol the variable space does not declare."""


@dataclass(frozen=True)
class Symbol:
    name: str

    @property
    def is_variable(self) -> bool:
        return _VAR_RE.match(self.name) is not None

    @property
    def kind(self) -> str:
        return "variable" if self.is_variable else "parameter"

    @property
    def component(self) -> int:
        m = _VAR_RE.match(self.name)
        if m is None:
            raise AttributeError(f"{self.name} is a parameter")
        return int(m.group(1))

    @property
    def dof(self) -> int:
        m = _VAR_RE.match(self.name)
        if m is None:
            raise AttributeError(f"{self.name} is a parameter")
        return int(m.group(2))

    def __str__(self) -> str:
        return self.name


def var_name(i: int, dof: int) -> str:
    return f"x{i}_{dof}"


def symbol_sort_key(name: str):
    """Variables first, ordered by (dof, component); then parameters by name."""
    m = _VAR_RE.match(name)
    if m:
        return (0, int(m.group(2)), int(m.group(1)), "")
    return (1, 0, 0, name)


def _name(s: Symbol | str) -> str:
    return s.name if isinstance(s, Symbol) else s


# A monomial is a tuple of (symbol name, exponent) pairs sorted by name, with
# no zero exponents.  The empty tuple is the constant monomial.
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        e2 = d.get(s, 0) + e
        if e2:
            d[s] = e2
        else:
            del d[s]
    return tuple(sorted(d.items()))


class Polynomial:
    """Immutable polynomial with ``Fraction`` coefficients in canonical form.

    >>> x = Polynomial.symbol("x1_1")
    >>> str((x + 1) * (x - 1))
    'x1_1^2 - 1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[tuple(sorted((s, e) for s, e in mono if e))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Number) -> "Polynomial":
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def symbol(cls, s: Symbol | str) -> "Polynomial":
        return cls._raw({((_name(s), 1),): Fraction(1)})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._raw({})

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def symbols(self) -> set[str]:
        return {s for mono in self._terms for s, _ in mono}

    def variables(self) -> set[str]:
        return {s for s in self.symbols() if _VAR_RE.match(s)}

    def degree(self, s: Symbol | str | None = None) -> int:
        """Total degree, or the maximal exponent of ``s``; -1 for zero."""
        if not self._terms:
            return -1
        if s is None:
            return max(sum(e for _, e in mono) for mono in self._terms)
        name = _name(s)
        return max(dict(mono).get(name, 0) for mono in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for mono, c in other._terms.items():
            c2 = out.get(mono, 0) + c
            if c2:
                out[mono] = c2
            else:
                out.pop(mono, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Polynomial._raw({})
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                c = out.get(m, 0) + c1 * c2
                if c:
                    out[m] = c
                else:
                    del out[m]
        return Polynomial._raw(out)

    __rmul__ = __mul__

    def scale(self, c: Number) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial._raw({})
        return Polynomial._raw({m: v * c for m, v in self._terms.items()})

    def __truediv__(self, other):
        """Division by a nonzero rational or by a parameter monomial."""
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero polynomial")
            return self.scale(1 / Fraction(other))
        if isinstance(other, Polynomial):
            if len(other._terms) != 1:
                raise ValueError("can only divide by a single-term polynomial")
            (mono, c), = other._terms.items()
            if any(_VAR_RE.match(s) for s, _ in mono):
                raise ValueError("cannot divide by a variable")
            inv = tuple((s, -e) for s, e in mono)
            return (self * Polynomial._raw({inv: 1 / c}))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if k > MAX_EXPONENT:
            raise ValueError("exponent too large")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and evaluation --------------------------------------------
    def diff(self, v: Symbol | str) -> "Polynomial":
        name = _name(v)
        if not _VAR_RE.match(name):
            raise ValueError(f"cannot differentiate with respect to parameter {name!r}")
        out = {}
        for mono, c in self._terms.items():
            for idx, (s, e) in enumerate(mono):
                if s == name:
                    if e == 1:
                        m = mono[:idx] + mono[idx + 1:]
                    else:
                        m = mono[:idx] + ((s, e - 1),) + mono[idx + 1:]
                    out[m] = c * e
                    break
        return Polynomial._raw(out)

    def evaluate(self, assignment: Mapping):
        values = {_name(k): v for k, v in assignment.items()}
        missing = self.symbols() - values.keys()
        if missing:
            raise KeyError(f"no value for {', '.join(sorted(missing))}")
        total = Fraction(0)
        for mono, c in self._terms.items():
            t = c
            for s, e in mono:
                t = t * values[s] ** e
            total = total + t
        return total

    def substitute(self, assignment: Mapping) -> "Polynomial":
        """Replace some symbols by rationals, keeping the rest symbolic."""
        values = {_name(k): Fraction(v) for k, v in assignment.items()}
        out = Polynomial.zero()
        for mono, c in self._terms.items():
            keep = []
            for s, e in mono:
                if s in values:
                    c = c * values[s] ** e
                else:
                    keep.append((s, e))
            out = out + Polynomial._raw({tuple(keep): c} if c else {})
        return out

    # -- comparison & text --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self) -> list:
        """Terms in graded lexicographic order (highest degree first)."""

        def key(item):
            mono = item[0]
            deg = sum(e for _, e in mono)
            expo = sorted(((symbol_sort_key(s), -e) for s, e in mono))
            return (-deg, expo)

        return sorted(self._terms.items(), key=key)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            c = abs(c)
            num = sorted(((s, e) for s, e in mono if e > 0), key=lambda t: symbol_sort_key(t[0]))
            den = sorted(((s, -e) for s, e in mono if e < 0), key=lambda t: symbol_sort_key(t[0]))
            factors = [s if e == 1 else f"{s}^{e}" for s, e in num]
            if c != 1 or not factors:
                factors.insert(0, str(c))
            text = "*".join(factors)
            for s, e in den:
                text += "/" + (s if e == 1 else f"{s}^{e}")
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


def differentiate(p: Polynomial, v: Symbol | str) -> Polynomial:
    return p.diff(v)


def evaluate(p: Polynomial, assignment: Mapping):
    return p.evaluate(assignment)


class VariableSpace:
    """The 3n Nambu variables of an ``n``-DOF system plus declared parameters."""

    def __init__(self, n: int, parameters: Iterable[str] = ()):
        if not isinstance(n, int) or n < 1:
            raise ValueError("number of degrees of freedom must be a positive integer")
        params = tuple(parameters)
        for p in params:
            if not _PARAM_RE.match(p) or _VAR_RE.match(p):
                raise ValueError(f"invalid parameter name {p!r}")
        if len(set(params)) != len(params):
            raise ValueError("duplicate parameter names")
        self.n = n
        self.parameters = tuple(Symbol(p) for p in params)
        self.variables = tuple(Symbol(var_name(i, a)) for a in range(1, n + 1) for i in (1, 2, 3))
        self._names = {s.name for s in self.variables} | set(params)

    @property
    def parameter_names(self) -> tuple:
        return tuple(s.name for s in self.parameters)

    @property
    def variable_names(self) -> tuple:
        return tuple(s.name for s in self.variables)

    def var(self, i: int, dof: int) -> Symbol:
        if i not in (1, 2, 3) or not 1 <= dof <= self.n:
            raise IndexError(f"no variable x{i}_{dof} in a {self.n}-DOF space")
        return self.variables[3 * (dof - 1) + (i - 1)]

    def dof_variables(self, dof: int) -> tuple:
        return self.variables[3 * (dof - 1): 3 * dof]

    def __contains__(self, s) -> bool:
        return _name(s) in self._names

    def check(self, *polys: Polynomial) -> None:
        for p in polys:
            extra = p.symbols() - self._names
            if extra:
                raise SpaceError(f"undeclared symbols: {', '.join(sorted(extra))}")

    def __eq__(self, other):
        if not isinstance(other, VariableSpace):
            return NotImplemented
        return self.n == other.n and self.parameters == other.parameters

    def __hash__(self):
        return hash((self.n, self.parameters))

    def __repr__(self):
        return f"VariableSpace(n={self.n}, parameters={self.parameter_names!r})"


# -- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr   := term (('+'|'-') term)*
    # term   := factor (('*'|'/') factor)*
    # factor := base ('^' INTEGER)?
    # base   := NUMBER | IDENT | '(' expr ')' | ('-'|'+') factor

    def __init__(self, text, space, bindings):
        self.tokens = _tokenize(text)
        self.i = 0
        self.space = space
        self.bindings = bindings or {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            raise ParseError(f"expected {value!r}", pos)

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, _ = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            q = self.factor()
            if op == "*":
                p = p * q
            else:
                p = self._divide(p, q, pos)
        return p

    @staticmethod
    def _divide(p, q, pos):
        if q.is_zero():
            raise ParseError("division by zero", pos)
        if len(q) != 1 or q.variables():
            raise ParseError("can only divide by a nonzero constant or a product of parameters", pos)
        return p / q

    def factor(self):
        p = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            kind, val, pos = self.take()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", pos)
            if kind != "num" or "." in val:
                raise ParseError("exponent must be a nonnegative integer", pos)
            k = int(val)
            if k > MAX_EXPONENT:
                raise ParseError("exponent too large", pos)
            p = p ** k
        return p

    def base(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Polynomial.constant(Fraction(val))
        if kind == "ident":
            if val in self.bindings:
                return self.bindings[val]
            if self.space is not None and val not in self.space:
                raise ParseError(f"undeclared identifier {val!r}", pos)
            if self.space is None and not (_VAR_RE.match(val) or _PARAM_RE.match(val)):
                raise ParseError(f"invalid identifier {val!r}", pos)
            return Polynomial.symbol(val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        if kind == "op" and val in ("-", "+"):
            p = self.factor()
            return -p if val == "-" else p
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse(text: str, space: VariableSpace | None = None,
          bindings: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse ``text`` into a canonical polynomial.

    Identifiers must be declared in ``space`` (when given) or appear as keys of
    ``bindings``, which substitutes whole polynomials for names such as ``H``.
    """
    return _Parser(text, space, bindings).parse()


# -- random generation (test sweeps and the CLI's --random mode) --------------

_COEFFS = (1, -1, 2, -2, 3, Fraction(1, 2), Fraction(-1, 3), Fraction(3, 2))


def random_polynomial(rng: random.Random, names: Iterable[str], max_degree: int = 3,
                      n_terms: int = 4) -> Polynomial:
    """Sparse random polynomial in ``names`` with total degree <= ``max_degree``."""
    names = list(names)
    terms: dict = {}
    for _ in range(rng.randint(1, n_terms)):
        deg = rng.randint(0, max_degree)
        exps: dict = {}
        for _ in range(deg):
            s = rng.choice(names)
            exps[s] = exps.get(s, 0) + 1
        mono = tuple(sorted(exps.items()))
        terms[mono] = terms.get(mono, 0) + rng.choice(_COEFFS)
    return Polynomial(terms)
