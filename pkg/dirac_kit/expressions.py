"""
Coefficient expressions.

Grammar:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' ['-' | '+'] INT)?
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

with FUNC one of sin, cos, sqrt. Names are chart coordinates or parameters; they
are resolved when an expression is compiled onto a chart.
"""

import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Union

import numpy as np

from .errors import ExpressionError
from .jet_calculus import Chart, Jet2, ScalarField, jcos, jsin, jsqrt

_TOKEN = re.compile(r"""
    \s*(?:
        (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>[-+*/^()])
    )""", re.VERBOSE)

FUNCTIONS: Dict[str, Callable[[Jet2], Jet2]] = {"sin": jsin, "cos": jcos, "sqrt": jsqrt}

# binding strength used by the printer
_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY = 3
_POWER = 4
_ATOM = 5


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Name:
    name: str
    offset: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Number, Name, Unary, Binary, Power, Call]


@dataclass
class _Token:
    kind: str
    text: str
    offset: int        # in bytes


def _tokenize(src: str) -> List[_Token]:
    tokens = []
    pos = 0
    stripped_end = len(src.rstrip())
    while pos < stripped_end:
        match = _TOKEN.match(src, pos)
        if match is None or match.end() == pos:
            bad = len(src[:pos].encode("utf-8")) + len(src[pos:]) - len(src[pos:].lstrip())
            char = src[pos:].lstrip()[:1]
            raise ExpressionError(f"unexpected character {char!r}", src, bad)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), len(src[:start].encode("utf-8"))))
        pos = match.end()
    tokens.append(_Token("end", "", len(src.encode("utf-8"))))
    return tokens


class _Parser:
    """Recursive descent over the token list"""

    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _error(self, message: str, token: Optional[_Token] = None):
        token = token or self.current
        raise ExpressionError(message, self.src, token.offset)

    def _take(self) -> _Token:
        token = self.current
        self.pos += 1
        return token

    def _accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def parse(self) -> Node:
        if self.current.kind == "end":
            self._error("empty expression")
        node = self.expr()
        if self.current.kind != "end":
            self._error(f"unexpected {self.current.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._take().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._take().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.current.kind == "op" and self.current.text in "+-":
            op = self._take().text
            return Unary(op, self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if not self._accept("^"):
            return base
        sign = 1
        if self.current.kind == "op" and self.current.text in "+-":
            sign = -1 if self._take().text == "-" else 1
        token = self.current
        if token.kind != "number" or not re.fullmatch(r"\d+", token.text):
            self._error("exponent must be an integer", token)
        self._take()
        return Power(base, sign * int(token.text))

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self._take()
            return Number(float(token.text))
        if token.kind == "name":
            self._take()
            if self._accept("("):
                if token.text not in FUNCTIONS:
                    self._error(f"unknown function {token.text!r}", token)
                arg = self.expr()
                if not self._accept(")"):
                    self._error("expected ')'")
                return Call(token.text, arg)
            if token.text in FUNCTIONS:
                self._error(f"function {token.text!r} needs an argument", token)
            return Name(token.text, token.offset)
        if self._accept("("):
            node = self.expr()
            if not self._accept(")"):
                self._error("expected ')'")
            return node
        if token.kind == "end":
            self._error("unexpected end of expression")
        self._error(f"unexpected {token.text!r}")


def parse_expression(src: str) -> Node:
    if not isinstance(src, str):
        raise ExpressionError(f"expression must be text, got {type(src).__name__}")
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _strength(node: Node) -> int:
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    if isinstance(node, Unary):
        return _UNARY
    if isinstance(node, Power):
        return _POWER
    return _ATOM


def _number_text(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def to_text(node: Node) -> str:
    """Canonical text; parsing it gives back the same tree"""
    if isinstance(node, Number):
        return _number_text(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Power):
        base = to_text(node.base)
        if _strength(node.base) < _ATOM:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Unary):
        inner = to_text(node.operand)
        if _strength(node.operand) < _UNARY:
            inner = f"({inner})"
        return f"{node.op}{inner}"
    strength = _PRECEDENCE[node.op]
    left = to_text(node.left)
    if _strength(node.left) < strength:
        left = f"({left})"
    right = to_text(node.right)
    if _strength(node.right) <= strength:
        right = f"({right})"
    return f"{left}{node.op}{right}"


def names_in(node: Node) -> FrozenSet[str]:
    if isinstance(node, Name):
        return frozenset([node.name])
    if isinstance(node, (Unary, Power, Call)):
        inner = node.operand if isinstance(node, Unary) else node.base if isinstance(node, Power) else node.arg
        return names_in(inner)
    if isinstance(node, Binary):
        return names_in(node.left) | names_in(node.right)
    return frozenset()


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

JetBuilder = Callable[[np.ndarray], Jet2]


def _builder(node: Node, src: str, chart: Chart, params: Mapping[str, float]) -> JetBuilder:
    dim = chart.dim
    if isinstance(node, Number):
        value = node.value
        return lambda p: Jet2.constant(value, dim)
    if isinstance(node, Name):
        if node.name in chart.coords:
            index = chart.index(node.name)
            return lambda p: Jet2.variable(index, p[index], dim)
        if node.name in params:
            value = float(params[node.name])
            return lambda p: Jet2.constant(value, dim)
        raise ExpressionError(f"unknown identifier {node.name!r} (coordinates {list(chart.coords)}, "
                              f"parameters {sorted(params)})", src, node.offset)
    if isinstance(node, Unary):
        inner = _builder(node.operand, src, chart, params)
        if node.op == "-":
            return lambda p: -inner(p)
        return inner
    if isinstance(node, Power):
        base = _builder(node.base, src, chart, params)
        exponent = node.exponent
        return lambda p: base(p) ** exponent
    if isinstance(node, Call):
        arg = _builder(node.arg, src, chart, params)
        fn = FUNCTIONS[node.func]
        return lambda p: fn(arg(p))
    left = _builder(node.left, src, chart, params)
    right = _builder(node.right, src, chart, params)
    if node.op == "+":
        return lambda p: left(p) + right(p)
    if node.op == "-":
        return lambda p: left(p) - right(p)
    if node.op == "*":
        return lambda p: left(p) * right(p)
    return lambda p: left(p) / right(p)


def compile_expression(src: Union[str, Node], chart: Chart,
                       params: Optional[Mapping[str, float]] = None) -> ScalarField:
    """A ScalarField on chart; unknown names raise ExpressionError with their offset"""
    text = src if isinstance(src, str) else to_text(src)
    node = parse_expression(src) if isinstance(src, str) else src
    build = _builder(node, text, chart, params or {})
    return ScalarField(chart, build, to_text(node))


def evaluate_constant(src: str, params: Optional[Mapping[str, float]] = None) -> float:
    """Value of an expression that uses parameters only"""
    node = parse_expression(src)
    stray = sorted(names_in(node) - set(params or {}))
    if stray:
        raise ExpressionError(f"unknown identifier {stray[0]!r} in a constant expression", src,
                              _first_offset(node, stray[0]))
    params = dict(params or {})
    chart = Chart.build("constants", ["_"])
    return compile_expression(node, chart, params)(np.zeros(1))


def _first_offset(node: Node, name: str) -> int:
    if isinstance(node, Name):
        return node.offset if node.name == name else -1
    children = []
    if isinstance(node, Unary):
        children = [node.operand]
    elif isinstance(node, Power):
        children = [node.base]
    elif isinstance(node, Call):
        children = [node.arg]
    elif isinstance(node, Binary):
        children = [node.left, node.right]
    for child in children:
        found = _first_offset(child, name)
        if found >= 0:
            return found
    return -1
