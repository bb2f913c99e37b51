"""
Text syntax for operators and polynomials.

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor (("*"|"/") factor | dfactor)*
    factor := atom ["^" uint]
    atom   := D<i> | x<i> | z<i> | mu<i> | lambda | gamma | uint | name | "(" expr ")"

'*' is composition of operators, '/' divides by an order-zero operator
(a function), and '^' is repeated composition. A D-monomial may directly
follow a factor, so the printed form "(1/x1) D1^2*D2" reads back as a
product. Expressions mentioning mu or z are polynomials or rational
functions; everything else is an operator.
"""
from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from pyparsing import (
    Empty,
    Forward,
    Keyword,
    Literal,
    Opt,
    ParseException,
    ParserElement,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    nums,
    one_of,
)

from errors import DimensionExceeded, DimensionMismatch, ParseError, UnboundName, ZeroDivisor
from operators import DiffOp, format_diffop, format_ratfun
from poly_core import GAMMA, LAMBDA, MultiPoly, RatFun, VarClass, format_poly, mu_var, x_var, z_var

ParserElement.enable_packrat()

Value = Union[DiffOp, MultiPoly, RatFun]


@dataclass
class Node:
    kind: str
    value: object = None
    children: List["Node"] = field(default_factory=list)
    loc: int = 0


def _atom(kind: str, prefix_len: int):
    def action(s, loc, toks):
        return Node(kind, int(toks[0][prefix_len:]), loc=loc)
    return action


def _fold_binary(s, loc, toks):
    tokens = list(toks)
    node = tokens[0]
    for op, right in zip(tokens[1::2], tokens[2::2]):
        node = Node("bin", op, [node, right], loc)
    return node


def _expr_action(s, loc, toks):
    tokens = list(toks)
    if tokens[0] in ("+", "-"):
        sign = tokens.pop(0)
        if sign == "-":
            tokens[0] = Node("neg", None, [tokens[0]], loc)
    return _fold_binary(s, loc, tokens)


def _power_action(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    return Node("pow", int(toks[2]), [toks[0]], loc)


def _build_grammar() -> ParserElement:
    tail = r"(?![A-Za-z0-9_])"
    expr = Forward()
    uint = Word(nums)
    d_atom = Regex(r"D\d+" + tail).set_parse_action(_atom("D", 1))
    x_atom = Regex(r"x\d+" + tail).set_parse_action(_atom("x", 1))
    z_atom = Regex(r"z\d+" + tail).set_parse_action(_atom("z", 1))
    mu_atom = Regex(r"mu\d+" + tail).set_parse_action(_atom("mu", 2))
    param = (Keyword("lambda") | Keyword("gamma")).set_parse_action(lambda s, loc, t: Node("param", t[0], loc=loc))
    number = Regex(r"\d+").set_parse_action(lambda s, loc, t: Node("num", int(t[0]), loc=loc))
    name = Regex(r"[A-Za-z_][A-Za-z0-9_]*").set_parse_action(lambda s, loc, t: Node("name", t[0], loc=loc))
    group = Suppress("(") + expr + Suppress(")")
    atom = d_atom | x_atom | z_atom | mu_atom | param | number | name | group

    factor = (atom + Opt(Literal("^") + uint)).set_parse_action(_power_action)
    d_factor = (d_atom + Opt(Literal("^") + uint)).set_parse_action(_power_action)
    juxtaposed = Empty().set_parse_action(lambda: "*") + d_factor
    term = (factor + ZeroOrMore(one_of("* /") + factor | juxtaposed)).set_parse_action(_fold_binary)
    expr <<= (Opt(one_of("+ -")) + term + ZeroOrMore(one_of("+ -") + term)).set_parse_action(_expr_action)
    return expr


_GRAMMAR = _build_grammar()


def parse_tree(src: str) -> Node:
    try:
        return _GRAMMAR.parse_string(src, parse_all=True)[0]
    except ParseException as e:
        raise ParseError(f"Syntax error: {e.msg}", src, e.loc) from None


class _Evaluator:
    def __init__(self, src: str, dim: int, env: Mapping[str, Value]):
        self.src = src
        self.dim = dim
        self.env = env

    def fail(self, error_cls, message: str, node: Node):
        raise error_cls(f"{message} at position {node.loc} of {self.src!r}")

    def as_op(self, v: Value) -> DiffOp:
        if isinstance(v, DiffOp):
            return v
        return DiffOp.function(self.dim, v)

    def as_function(self, v: Value, node: Node) -> RatFun:
        if isinstance(v, RatFun):
            return v
        if isinstance(v, MultiPoly):
            return RatFun.from_poly(v)
        if v.is_zero:
            return RatFun.zero()
        if v.order != 0:
            self.fail(ZeroDivisor, "Only order-zero operators can divide", node)
        return v.coefficient((0,) * self.dim)

    def check_index(self, node: Node, bound: int) -> None:
        if not 1 <= node.value <= bound:
            self.fail(DimensionExceeded, f"{node.kind}{node.value} exceeds dimension {self.dim}", node)

    def eval(self, node: Node) -> Value:
        kind = node.kind
        if kind == "D":
            self.check_index(node, self.dim)
            return DiffOp.d(self.dim, node.value)
        if kind == "x":
            self.check_index(node, self.dim)
            return RatFun.var(x_var(node.value))
        if kind == "z":
            self.check_index(node, self.dim)
            return RatFun.var(z_var(node.value))
        if kind == "mu":
            self.check_index(node, self.dim + 1)
            return RatFun.var(mu_var(node.value))
        if kind == "param":
            return RatFun.var(LAMBDA if node.value == "lambda" else GAMMA)
        if kind == "num":
            return RatFun.const(node.value)
        if kind == "name":
            if node.value not in self.env:
                self.fail(UnboundName, f"Unbound name {node.value!r}", node)
            value = self.env[node.value]
            if isinstance(value, DiffOp) and value.dim != self.dim:
                self.fail(DimensionMismatch, f"{node.value!r} has dimension {value.dim}", node)
            return value
        if kind == "neg":
            return -self.eval(node.children[0])
        if kind == "pow":
            base = self.eval(node.children[0])
            if isinstance(base, MultiPoly):
                base = RatFun.from_poly(base)
            return base ** node.value
        if kind == "bin":
            return self.binary(node)
        raise ValueError(f"Unknown node kind {kind}")

    def binary(self, node: Node) -> Value:
        left = self.eval(node.children[0])
        right = self.eval(node.children[1])
        op = node.value
        if op == "/":
            divisor = self.as_function(right, node)
            if divisor.is_zero:
                self.fail(ZeroDivisor, "Division by zero", node)
            if isinstance(left, DiffOp):
                return left * DiffOp.function(self.dim, 1 / divisor)
            return self.as_function(left, node) / divisor
        if isinstance(left, DiffOp) or isinstance(right, DiffOp):
            left, right = self.as_op(left), self.as_op(right)
        elif isinstance(left, MultiPoly) or isinstance(right, MultiPoly):
            left, right = self.as_function(left, node), self.as_function(right, node)
        if op == "*":
            return left * right
        if op == "+":
            return left + right
        return left - right


def _mentions_spectral(node: Node, env: Mapping[str, Value]) -> bool:
    if node.kind in ("mu", "z"):
        return True
    if node.kind == "name":
        value = env.get(node.value)
        return isinstance(value, (MultiPoly, RatFun)) and value.involves(VarClass.MU, VarClass.Z)
    return any(_mentions_spectral(child, env) for child in node.children)


def parse_expression(src: str, dim: int, env: Optional[Mapping[str, Value]] = None) -> Value:
    """
    Parse and evaluate src in dimension dim.

    Returns a DiffOp, or a MultiPoly / RatFun (when src mentions mu or z).
    """
    env = env or {}
    tree = parse_tree(src)
    value = _Evaluator(src, dim, env).eval(tree)
    if _mentions_spectral(tree, env):
        if isinstance(value, DiffOp):
            if value.order > 0:
                raise ParseError("Operators cannot be mixed with mu or z", src, tree.loc)
            value = value.coefficient((0,) * dim)
        if isinstance(value, MultiPoly):
            return value
        return value.as_poly() if value.is_polynomial else value
    if isinstance(value, DiffOp):
        return value
    return DiffOp.function(dim, value)


def parse_operator(src: str, dim: int, env: Optional[Mapping[str, Value]] = None) -> DiffOp:
    value = parse_expression(src, dim, env)
    if not isinstance(value, DiffOp):
        raise ParseError(f"Expected an operator, got the function {format_value(value)}", src, 0)
    return value


def parse_polynomial(src: str, dim: int, env: Optional[Mapping[str, Value]] = None) -> MultiPoly:
    """A polynomial; order-zero operator expressions are accepted too"""
    value = parse_expression(src, dim, env)
    if isinstance(value, DiffOp):
        if value.is_zero:
            return MultiPoly.zero()
        if value.order != 0:
            raise ParseError("Expected a polynomial, got an operator", src, 0)
        value = value.coefficient((0,) * dim)
    if isinstance(value, RatFun):
        if not value.is_polynomial:
            raise ParseError(f"Expected a polynomial, got {format_ratfun(value)}", src, 0)
        value = value.as_poly()
    return value


def format_value(value: Value) -> str:
    if isinstance(value, DiffOp):
        return format_diffop(value)
    if isinstance(value, MultiPoly):
        return format_poly(value)
    return format_ratfun(value)


# --- scripts ---

_BINDING = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)$")


@dataclass
class Script:
    dim: int
    bindings: List[Tuple[str, str]]
    command: List[str]


def parse_script(text: str, dim: int) -> Script:
    """
    'NAME = expr' lines (with '#' comments) followed by at most one command
    line 'verb args...'.
    """
    bindings: List[Tuple[str, str]] = []
    command: List[str] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if command:
            raise ParseError(f"Line {number}: nothing may follow the command", raw, 0)
        binding = _BINDING.match(line)
        if binding:
            name, src = binding.group(1), binding.group(2).strip()
            if not src:
                raise ParseError(f"Line {number}: {name} is bound to nothing", raw, len(raw))
            bindings.append((name, src))
        else:
            command = shlex.split(line)
    return Script(dim, bindings, command)


def bind_all(bindings: List[Tuple[str, str]], dim: int, env: Optional[Dict[str, Value]] = None) -> Dict[str, Value]:
    """Evaluate bindings in order; later ones may refer to earlier names"""
    env = dict(env or {})
    for name, src in bindings:
        env[name] = parse_expression(src, dim, env)
    return env
