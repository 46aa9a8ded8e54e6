"""
Parser for one-variable expressions such as ``2*x^2+2`` or ``-sin(pi*x)``.

Grammar (recursive descent, ``^`` right-associative and tighter than unary minus):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | 'x' | constant | func '(' expr ')' | '(' expr ')'
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import special

from core.exceptions import ExpressionDomainError, ExpressionSyntaxError

logger = logging.getLogger(__name__)

FUNCTIONS: Dict[str, Callable[[float], float]] = {
    'sin': np.sin,
    'cos': np.cos,
    'tan': np.tan,
    'exp': np.exp,
    'log': np.log,
    'sqrt': np.sqrt,
    'sinh': np.sinh,
    'cosh': np.cosh,
    'tanh': np.tanh,
    'abs': np.abs,
    'erf': special.erf,
}

CONSTANTS: Dict[str, float] = {
    'pi': math.pi,
    'e': math.e,
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


class Node:
    """Expression tree node"""

    def evaluate(self, x: float) -> float:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Node):
    value: float

    def evaluate(self, x: float) -> float:
        return self.value

    def render(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Variable(Node):
    def evaluate(self, x: float) -> float:
        return x

    def render(self) -> str:
        return 'x'


@dataclass(frozen=True)
class Constant(Node):
    name: str

    def evaluate(self, x: float) -> float:
        return CONSTANTS[self.name]

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class Negate(Node):
    operand: Node

    def evaluate(self, x: float) -> float:
        return -self.operand.evaluate(x)

    def render(self) -> str:
        return f"(-{self.operand.render()})"


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x: float) -> float:
        lhs = self.left.evaluate(x)
        rhs = self.right.evaluate(x)
        if self.op == '+':
            result = lhs + rhs
        elif self.op == '-':
            result = lhs - rhs
        elif self.op == '*':
            result = lhs * rhs
        elif self.op == '/':
            if rhs == 0.0:
                raise ExpressionDomainError("division by zero", self.render())
            result = lhs / rhs
        else:
            if lhs < 0.0 and not float(rhs).is_integer():
                raise ExpressionDomainError("negative base with non-integer exponent", self.render())
            if lhs == 0.0 and rhs < 0.0:
                raise ExpressionDomainError("zero raised to a negative power", self.render())
            with np.errstate(over='ignore'):
                result = float(np.power(lhs, rhs))
        return _finite(result, self)

    def render(self) -> str:
        return f"({self.left.render()} {self.op} {self.right.render()})"


@dataclass(frozen=True)
class Call(Node):
    name: str
    argument: Node

    def evaluate(self, x: float) -> float:
        value = self.argument.evaluate(x)
        if self.name == 'log' and value <= 0.0:
            raise ExpressionDomainError("log of a non-positive value", self.render())
        if self.name == 'sqrt' and value < 0.0:
            raise ExpressionDomainError("sqrt of a negative value", self.render())
        with np.errstate(over='ignore', invalid='ignore'):
            result = float(FUNCTIONS[self.name](value))
        return _finite(result, self)

    def render(self) -> str:
        return f"{self.name}({self.argument.render()})"


def _finite(value: float, node: Node) -> float:
    if not math.isfinite(value):
        raise ExpressionDomainError("non-finite result", node.render())
    return float(value)


class Expression:
    """A parsed expression; calling it evaluates at x"""

    def __init__(self, root: Node, source: str):
        self.root = root
        self.source = source

    def evaluate(self, x: float) -> float:
        return self.root.evaluate(float(x))

    def __call__(self, x: float) -> float:
        return self.evaluate(x)

    def to_string(self) -> str:
        """Fully parenthesized form that parses back to the same tree"""
        return self.root.render()

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"


class ExpressionParser:
    """Tokenizer and recursive-descent parser for the grammar above"""

    def __init__(self):
        self.token_pattern = re.compile(
            r'(?P<space>\s+)'
            r'|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
            r'|(?P<name>[A-Za-z_]\w*)'
            r'|(?P<op>[-+*/^()−])'
        )
        self.tokens: List[Token] = []
        self.index = 0
        self.length = 0

    def tokenize(self, source: str) -> List[Token]:
        tokens = []
        position = 0
        while position < len(source):
            match = self.token_pattern.match(source, position)
            if not match:
                raise ExpressionSyntaxError(f"unexpected character '{source[position]}'", position)
            kind = match.lastgroup
            text = match.group()
            if kind != 'space':
                if text == '−':
                    text = '-'
                tokens.append(Token(kind, text, position))
            position = match.end()
        return tokens

    def parse(self, source: str) -> Expression:
        if source is None or not source.strip():
            raise ExpressionSyntaxError("empty expression", 0)
        self.tokens = self.tokenize(source)
        self.index = 0
        self.length = len(source)
        root = self._expr()
        token = self._peek()
        if token is not None:
            raise ExpressionSyntaxError(f"unexpected token '{token.text}'", token.position)
        logger.debug(f"Parsed expression {source!r} as {root.render()}")
        return Expression(root, source)

    def _peek(self) -> Optional[Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _accept(self, *texts: str) -> Optional[Token]:
        token = self._peek()
        if token is not None and token.kind == 'op' and token.text in texts:
            self.index += 1
            return token
        return None

    def _expect(self, text: str) -> Token:
        token = self._accept(text)
        if token is None:
            found = self._peek()
            position = found.position if found is not None else self.length
            raise ExpressionSyntaxError(f"expected '{text}'", position)
        return token

    def _expr(self) -> Node:
        node = self._term()
        while True:
            token = self._accept('+', '-')
            if token is None:
                return node
            node = Binary(token.text, node, self._term())

    def _term(self) -> Node:
        node = self._factor()
        while True:
            token = self._accept('*', '/')
            if token is None:
                return node
            node = Binary(token.text, node, self._factor())

    def _factor(self) -> Node:
        if self._accept('-'):
            return Negate(self._factor())
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self._accept('^'):
            return Binary('^', base, self._factor())
        return base

    def _atom(self) -> Node:
        token = self._peek()
        if token is None:
            raise ExpressionSyntaxError("unexpected end of expression", self.length)
        if token.kind == 'number':
            self.index += 1
            return Number(float(token.text))
        if token.kind == 'name':
            self.index += 1
            if token.text == 'x':
                return Variable()
            if token.text in CONSTANTS:
                return Constant(token.text)
            if token.text in FUNCTIONS:
                self._expect('(')
                argument = self._expr()
                self._expect(')')
                return Call(token.text, argument)
            raise ExpressionSyntaxError(f"unknown identifier '{token.text}'", token.position)
        if self._accept('('):
            node = self._expr()
            self._expect(')')
            return node
        raise ExpressionSyntaxError(f"unexpected token '{token.text}'", token.position)


def parse(source: str) -> Expression:
    return ExpressionParser().parse(source)


def evaluate(expression: Expression, x: float) -> float:
    return expression.evaluate(x)


def parse_function_list(text: str, separator: str = ';') -> List[Expression]:
    """Split ``p0;p1;...`` and parse every entry"""
    if text is None or not text.strip():
        raise ExpressionSyntaxError("empty function list", 0)
    expressions = []
    offset = 0
    for part in text.split(separator):
        if not part.strip():
            raise ExpressionSyntaxError("empty entry in function list", offset)
        try:
            expressions.append(parse(part))
        except ExpressionSyntaxError as e:
            raise ExpressionSyntaxError(str(e.message).rsplit(' at offset', 1)[0],
                                        offset + e.position) from e
        offset += len(part) + len(separator)
    return expressions


def _uses_variable(node: Node) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, Negate):
        return _uses_variable(node.operand)
    if isinstance(node, Binary):
        return _uses_variable(node.left) or _uses_variable(node.right)
    if isinstance(node, Call):
        return _uses_variable(node.argument)
    return False


def parse_number_list(text: str, separator: str = ',') -> Tuple[float, ...]:
    """Separated reals, each an expression without x (``pi/2`` is fine)"""
    values = []
    for expression in parse_function_list(text, separator):
        if _uses_variable(expression.root):
            raise ExpressionSyntaxError(f"numeric value expected, got '{expression.source.strip()}'", 0)
        values.append(expression.evaluate(0.0))
    return tuple(values)
