"""
Prepotential expression language.

Grammar (whitespace insignificant; precedence ^ > unary - > * / > + -):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' integer)? | '-' factor
    atom   := number | 'i' | var | func '(' expr ')' | '(' expr ')'
    var    := 'w' integer          (1..n)
    func   := 'exp' | 'log' | 'sqrt'
"""

from dataclasses import dataclass, field
import logging
import re

from . import jets
from .exceptions import ArityError, DomainError, ExpressionSyntaxError, UnknownVariableError

logger = logging.getLogger(__name__)

FUNCTIONS = ('exp', 'log', 'sqrt')

_TOKEN_RE = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float

    def evaluate(self, args):
        return self.value

    def to_text(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class ImaginaryUnit:

    def evaluate(self, args):
        return 1j

    def to_text(self):
        return 'i'


@dataclass(frozen=True)
class Variable:
    index: int  # 1-based

    def evaluate(self, args):
        return args[self.index - 1]

    def to_text(self):
        return f'w{self.index}'


@dataclass(frozen=True)
class Negate:
    operand: object

    def evaluate(self, args):
        return -self.operand.evaluate(args)

    def to_text(self):
        return f'(-{self.operand.to_text()})'


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: object
    right: object

    def evaluate(self, args):
        a = self.left.evaluate(args)
        b = self.right.evaluate(args)
        if self.op == '+':
            return a + b
        if self.op == '-':
            return a - b
        if self.op == '*':
            return a * b
        if isinstance(a, jets.Jet3) or isinstance(b, jets.Jet3):
            return a / b
        if b == 0:
            raise DomainError("division by zero")
        return a / b

    def to_text(self):
        return f'({self.left.to_text()} {self.op} {self.right.to_text()})'


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int

    def evaluate(self, args):
        base = self.base.evaluate(args)
        if isinstance(base, jets.Jet3):
            return base ** self.exponent
        if base == 0 and self.exponent < 0:
            raise DomainError("negative power of zero")
        return base ** self.exponent

    def to_text(self):
        base = self.base.to_text()
        if isinstance(self.base, Power):
            base = f'({base})'
        return f'{base}^{self.exponent}'


@dataclass(frozen=True)
class Call:
    func: str
    argument: object

    def evaluate(self, args):
        return getattr(jets, self.func)(self.argument.evaluate(args))

    def to_text(self):
        return f'{self.func}({self.argument.to_text()})'


@dataclass(frozen=True)
class PrepotentialExpr:
    """Parsed holomorphic function of w_1..w_n."""

    ast: object
    n: int
    source: str = field(default="", compare=False)

    def evaluate(self, args):
        if len(args) != self.n:
            raise ArityError(f"expression takes {self.n} variables, got {len(args)}")
        return self.ast.evaluate(args)

    def to_text(self):
        return self.ast.to_text()

    def __str__(self):
        return self.to_text()


# -- parser -------------------------------------------------------------------

def tokenize(text):
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise ExpressionSyntaxError(f"unexpected character {text[position]!r}", position,
                                        {'number', 'name', 'operator'})
        kind = match.lastgroup
        if kind != 'space':
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class Parser:
    """Recursive-descent parser producing a PrepotentialExpr."""

    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def advance(self):
        token = self.current
        self.position += 1
        return token

    def fail(self, expected):
        token = self.current
        found = 'end of input' if token.kind == 'end' else repr(token.text)
        raise ExpressionSyntaxError(f"unexpected {found}", token.offset, expected)

    def expect(self, text):
        if self.current.text != text or self.current.kind == 'end':
            self.fail({text})
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.current.kind != 'end':
            self.fail({'+', '-', '*', '/', 'end of input'})
        return PrepotentialExpr(node, self.n, self.text)

    def expr(self):
        node = self.term()
        while self.current.kind == 'op' and self.current.text in '+-':
            op = self.advance().text
            node = BinaryOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.current.kind == 'op' and self.current.text in '*/':
            op = self.advance().text
            node = BinaryOp(op, node, self.factor())
        return node

    def factor(self):
        if self.current.kind == 'op' and self.current.text == '-':
            self.advance()
            return Negate(self.factor())
        node = self.atom()
        if self.current.kind == 'op' and self.current.text == '^':
            self.advance()
            token = self.current
            if token.kind != 'number' or not token.text.isdigit():
                self.fail({'integer'})
            self.advance()
            node = Power(node, int(token.text))
        return node

    def atom(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Number(float(token.text))
        if token.kind == 'op' and token.text == '(':
            self.advance()
            node = self.expr()
            self.expect(')')
            return node
        if token.kind == 'name':
            return self.name()
        self.fail({'number', 'i', 'variable', 'function', '('})

    def name(self):
        token = self.advance()
        text = token.text
        if text == 'i':
            return ImaginaryUnit()
        if text in FUNCTIONS:
            self.expect('(')
            argument = self.expr()
            if self.current.text == ',':
                raise ArityError(f"{text}() takes exactly one argument (offset {self.current.offset})")
            self.expect(')')
            return Call(text, argument)
        match = re.fullmatch(r'w(\d+)', text)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= self.n:
                raise UnknownVariableError(
                    f"variable {text} at offset {token.offset} is outside w1..w{self.n}")
            return Variable(index)
        raise ExpressionSyntaxError(f"unknown name {text!r}", token.offset,
                                    {'i', 'variable', *FUNCTIONS})


def parse(text, n):
    """Parse `text` into a PrepotentialExpr in the variables w1..wn."""
    if n < 1:
        raise ArityError("a prepotential needs at least one variable")
    expr = Parser(text, n).parse()
    logger.debug(f"parsed {text!r} as {expr.to_text()}")
    return expr
