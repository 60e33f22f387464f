"""Textual ket expressions: parsing, evaluation to states, and formatting.

Grammar (precedence low to high):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' factor) | ('/' factor) | factor)*
    factor := scalar | ket | '(' expr ')' | '-' factor
    scalar := decimal | 'i' | 'sqrt(' decimal ')'
    ket    := '|' label '>'      label matches [0-9+-]+

Adjacency of two factors means multiplication; division requires a
scalar-valued divisor; any product of two ket-valued subexpressions is
rejected, so multi-subsystem structure lives entirely in the label. Labels
map '+' to index 0, '-' to index 1, digits to themselves; per position the
dimension is max digit + 1 (at least 2), or 2 for the +/- alphabet.
Whitespace is insignificant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    KetSyntaxError,
    MixedAlphabetError,
    MixedLabelLengthError,
    ZeroStateError,
)
from .states import Dims, PureState


# -- abstract syntax tree ------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float
    offset: int


@dataclass(frozen=True)
class Imag:
    offset: int


@dataclass(frozen=True)
class SqrtNum:
    value: float
    offset: int


@dataclass(frozen=True)
class Ket:
    label: str
    offset: int


@dataclass(frozen=True)
class Neg:
    operand: "KetExpr"
    offset: int


@dataclass(frozen=True)
class Add:
    left: "KetExpr"
    right: "KetExpr"
    offset: int


@dataclass(frozen=True)
class Sub:
    left: "KetExpr"
    right: "KetExpr"
    offset: int


@dataclass(frozen=True)
class Mul:
    left: "KetExpr"
    right: "KetExpr"
    offset: int


@dataclass(frozen=True)
class Div:
    left: "KetExpr"
    right: "KetExpr"
    offset: int


@dataclass(frozen=True)
class Group:
    inner: "KetExpr"
    offset: int


KetExpr = Union[Num, Imag, SqrtNum, Ket, Neg, Add, Sub, Mul, Div, Group]


def _kind(node: KetExpr) -> str:
    """'scalar' or 'state'; mixed-kind arithmetic was rejected at parse time."""
    if isinstance(node, (Num, Imag, SqrtNum)):
        return "scalar"
    if isinstance(node, Ket):
        return "state"
    if isinstance(node, (Neg, Group)):
        return _kind(node.operand if isinstance(node, Neg) else node.inner)
    if isinstance(node, (Add, Sub, Div)):
        return _kind(node.left)
    if isinstance(node, Mul):
        left = _kind(node.left)
        return "state" if left == "state" else _kind(node.right)
    raise TypeError(f"not a ket expression node: {node!r}")


def _kets(node: KetExpr, out: list[Ket]):
    if isinstance(node, Ket):
        out.append(node)
    elif isinstance(node, Neg):
        _kets(node.operand, out)
    elif isinstance(node, Group):
        _kets(node.inner, out)
    elif isinstance(node, (Add, Sub, Mul, Div)):
        _kets(node.left, out)
        _kets(node.right, out)


# -- lexer ---------------------------------------------------------------------

_LABEL_CHARS = set("0123456789+-")
_DIGITS = set("0123456789")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/()":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        if ch == "|":
            j = i + 1
            while j < n and text[j] in _LABEL_CHARS:
                j += 1
            if j == i + 1:
                raise KetSyntaxError("empty ket label", min(j, n - 1) if n else 0)
            if j >= n or text[j] != ">":
                raise KetSyntaxError("unterminated ket, expected '>'", min(j, n - 1))
            tokens.append(_Token("ket", text[i + 1 : j], i))
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(_Token("number", text[i:j], i))
            i = j
            continue
        if text.startswith("sqrt", i):
            tokens.append(_Token("sqrt", "sqrt", i))
            i += 4
            continue
        if ch == "i" and not text.startswith("sqrt", i):
            tokens.append(_Token("i", "i", i))
            i += 1
            continue
        raise KetSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


# -- parser --------------------------------------------------------------------

_FACTOR_STARTS = {"number", "i", "sqrt", "ket", "("}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.position = 0

    def peek(self) -> _Token | None:
        if self.position < len(self.tokens):
            return self.tokens[self.position]
        return None

    def advance(self) -> _Token:
        token = self.peek()
        if token is None:
            raise KetSyntaxError("unexpected end of input", len(self.text))
        self.position += 1
        return token

    def expect(self, kind: str) -> _Token:
        token = self.peek()
        if token is None or token.kind != kind:
            offset = token.offset if token is not None else len(self.text)
            raise KetSyntaxError(f"expected {kind!r}", offset)
        return self.advance()

    def parse(self) -> KetExpr:
        node = self.expr()
        trailing = self.peek()
        if trailing is not None:
            raise KetSyntaxError(f"unexpected {trailing.text!r}", trailing.offset)
        return node

    def expr(self) -> KetExpr:
        node = self.term()
        while True:
            token = self.peek()
            if token is None or token.kind not in "+-":
                return node
            self.advance()
            right = self.term()
            if _kind(node) != _kind(right):
                raise KetSyntaxError(
                    "cannot add or subtract a scalar and a ket expression", token.offset
                )
            cls = Add if token.kind == "+" else Sub
            node = cls(node, right, token.offset)

    def term(self) -> KetExpr:
        node = self.factor()
        while True:
            token = self.peek()
            if token is None:
                return node
            if token.kind == "*":
                self.advance()
                right = self.factor()
                node = self._multiply(node, right, token.offset)
            elif token.kind == "/":
                self.advance()
                right = self.factor()
                if _kind(right) != "scalar":
                    raise KetSyntaxError("divisor must be scalar-valued", token.offset)
                node = Div(node, right, token.offset)
            elif token.kind in _FACTOR_STARTS:
                right = self.factor()
                node = self._multiply(node, right, token.offset)
            else:
                return node

    @staticmethod
    def _multiply(left: KetExpr, right: KetExpr, offset: int) -> KetExpr:
        if _kind(left) == "state" and _kind(right) == "state":
            raise KetSyntaxError(
                "product of two ket expressions; write the full label in one ket",
                offset,
            )
        return Mul(left, right, offset)

    def factor(self) -> KetExpr:
        token = self.advance()
        if token.kind == "-":
            return Neg(self.factor(), token.offset)
        if token.kind == "number":
            return Num(float(token.text), token.offset)
        if token.kind == "i":
            return Imag(token.offset)
        if token.kind == "sqrt":
            self.expect("(")
            arg = self.expect("number")
            self.expect(")")
            return SqrtNum(float(arg.text), token.offset)
        if token.kind == "ket":
            return Ket(token.text, token.offset)
        if token.kind == "(":
            inner = self.expr()
            self.expect(")")
            return Group(inner, token.offset)
        raise KetSyntaxError(f"unexpected {token.text!r}", token.offset)


def _validate_labels(kets: list[Ket]):
    if not kets:
        return
    length = len(kets[0].label)
    for ket in kets:
        if len(ket.label) != length:
            raise MixedLabelLengthError(
                f"label |{ket.label}> has {len(ket.label)} positions, "
                f"|{kets[0].label}> has {length}",
                ket.offset,
            )
    for position in range(length):
        uses_digit = None
        for ket in kets:
            is_digit = ket.label[position] in _DIGITS
            if uses_digit is None:
                uses_digit = is_digit
            elif uses_digit != is_digit:
                raise MixedAlphabetError(
                    f"position {position} mixes digit and +/- symbols", ket.offset
                )


def parse(text: str) -> KetExpr:
    """Parse ket-expression text into an AST, validating label consistency."""
    node = _Parser(text).parse()
    kets: list[Ket] = []
    _kets(node, kets)
    _validate_labels(kets)
    return node


def _infer_dims(labels: list[str]) -> Dims:
    length = len(labels[0])
    entries = []
    for position in range(length):
        chars = {label[position] for label in labels}
        if chars <= _DIGITS:
            entries.append(max(2, max(int(c) for c in chars) + 1))
        else:
            entries.append(2)
    return Dims(tuple(entries))


def _label_index(label: str, dims: Dims) -> int:
    index = 0
    for position, ch in enumerate(label):
        digit = int(ch) if ch in _DIGITS else (0 if ch == "+" else 1)
        index = index * dims[position] + digit
    return index


def evaluate(expr: KetExpr, normalize: bool = False) -> PureState:
    """Evaluate a parsed ket expression to a PureState.

    Dimensions are inferred per label position; amplitudes accumulate per
    basis label. With `normalize` the result is scaled to unit norm and exact
    cancellation raises ZeroStateError.
    """
    kets: list[Ket] = []
    _kets(expr, kets)
    if not kets:
        raise KetSyntaxError("expression contains no kets; dimensions are undefined", 0)
    if _kind(expr) != "state":
        raise KetSyntaxError("expression is scalar-valued, not a state", 0)
    _validate_labels(kets)
    dims = _infer_dims([k.label for k in kets])

    def walk(node: KetExpr):
        if isinstance(node, Num):
            return complex(node.value)
        if isinstance(node, Imag):
            return 1j
        if isinstance(node, SqrtNum):
            return complex(math.sqrt(node.value))
        if isinstance(node, Ket):
            vec = np.zeros(dims.total_dim, dtype=np.complex128)
            vec[_label_index(node.label, dims)] = 1.0
            return vec
        if isinstance(node, Neg):
            return -walk(node.operand)
        if isinstance(node, Group):
            return walk(node.inner)
        if isinstance(node, Add):
            return walk(node.left) + walk(node.right)
        if isinstance(node, Sub):
            return walk(node.left) - walk(node.right)
        if isinstance(node, Mul):
            return walk(node.left) * walk(node.right)
        if isinstance(node, Div):
            divisor = walk(node.right)
            if divisor == 0:
                raise ZeroDivisionError(f"division by zero at offset {node.offset}")
            return walk(node.left) / divisor
        raise TypeError(f"not a ket expression node: {node!r}")

    amplitudes = walk(expr)
    state = PureState(dims, amplitudes)
    if normalize:
        nsq = state.norm_squared
        if nsq == 0.0:
            raise ZeroStateError("all amplitudes cancelled; nothing to normalize")
        return PureState(dims, state.amplitudes * (1.0 / math.sqrt(nsq)))
    return state


def parse_state(text: str, normalize: bool = False) -> PureState:
    """Convenience wrapper: evaluate(parse(text))."""
    return evaluate(parse(text), normalize=normalize)


def _format_real(value: float) -> str:
    return repr(float(value))


def _format_coefficient(z: complex) -> tuple[str, str]:
    """Render one coefficient; returns (sign, magnitude text)."""
    re, im = z.real, z.imag
    if im == 0.0:
        return ("-" if re < 0 else "+"), _format_real(abs(re))
    if re == 0.0:
        return ("-" if im < 0 else "+"), _format_real(abs(im)) + "i"
    inner_sign = "-" if im < 0 else "+"
    return "+", f"({_format_real(re)} {inner_sign} {_format_real(abs(im))}i)"


def format_state(state: PureState, threshold: float = 0.0) -> str:
    """Render a state as a sum of coefficient-ket terms with digit labels.

    Amplitudes with modulus <= threshold are dropped; an empty sum renders as
    "0". Re-parsing the output reproduces the thresholded state.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if any(d > 10 for d in state.dims):
        raise ValueError("digit labels support subsystem dimensions up to 10")
    pieces = []
    for index, amplitude in enumerate(state.amplitudes):
        if abs(amplitude) <= threshold:
            continue
        label = []
        remainder = index
        for d in reversed(state.dims.dims):
            label.append(str(remainder % d))
            remainder //= d
        label.reverse()
        sign, body = _format_coefficient(complex(amplitude))
        pieces.append((sign, f"{body}|{''.join(label)}>"))
    if not pieces:
        return "0"
    sign, body = pieces[0]
    parts = [("-" if sign == "-" else "") + body]
    for sign, body in pieces[1:]:
        parts.append(f" {sign} {body}")
    return "".join(parts)
