"""Parser and deterministic printer for the expression grammar.

Grammar::

    expr       := ['-'] term (('+'|'-') term)*
    term       := coeff ('*' factor)* | factor ('*' factor)*
    coeff      := integer ('/' positive-integer)?
    factor     := var ('^' positive-integer)?
    var        := ident '[' index-list? (';' multiindex)? ']' | ident
    multiindex := '(' (integer (',' integer)*)? ')'
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, NoReturn, Optional

from ..errors import ExpressionSyntaxError, IndexRangeError, UnknownFamilyError
from ..utils.logger import get_logger
from .bundle import BundleSpec, CoordId, FamilyRole
from .expr import Expr, JetVariable, variable_key
from .indices import SymMultiIndex, format_multiindex

_TOKEN_RE = re.compile(
    r"(?:(?P<number>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<symbol>[-+*/^\[\]();,]))"
)


class Token(NamedTuple):
    kind: str  # "number", "ident", "symbol" or "end"
    text: str
    position: int


def tokenize(text: str) -> Iterator[Token]:
    """Split expression text into tokens, ending with an ``end`` token."""
    pos = 0
    length = len(text)
    while True:
        while pos < length and text[pos].isspace():
            pos += 1
        if pos >= length:
            break
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ExpressionSyntaxError(f"Unexpected character {text[pos]!r}", text, pos)
        kind = match.lastgroup or "symbol"
        yield Token(kind, match.group(kind), pos)
        pos = match.end()
    yield Token("end", "", length)


@dataclass
class ParseResult:
    """Result of parsing expression text."""

    expr: Expr
    warnings: list[str] = field(default_factory=list)


class VariableRef(NamedTuple):
    """A variable as written: family, raw indices and jet, before resolution."""

    family: str
    indices: tuple[int, ...]
    jet: tuple[int, ...]
    position: int


class ExpressionParser:
    """Recursive-descent parser for expressions over one BundleSpec."""

    def __init__(self, spec: BundleSpec):
        """Initialize parser.

        Args:
            spec: BundleSpec that family names and index ranges resolve against
        """
        self.spec = spec
        self._logger = get_logger("algebra.parser")
        self._text = ""
        self._tokens: list[Token] = []
        self._pos = 0
        self._warnings: list[str] = []

    def parse(self, text: str) -> ParseResult:
        """Parse expression text into a canonical Expr.

        Args:
            text: Expression text

        Returns:
            ParseResult with the expression and any warnings

        Raises:
            ExpressionSyntaxError: Malformed text (with line/column)
            UnknownFamilyError: Undeclared family name
            IndexRangeError: Wrong arity or index out of range
        """
        self._start(text)
        expr = self._expression()
        self._expect_end()
        for warning in self._warnings:
            self._logger.warning(warning)
        return ParseResult(expr=expr, warnings=list(self._warnings))

    def parse_variable_ref(self, text: str) -> VariableRef:
        """Parse a single variable reference (``name``, ``name[i,j]``, ``name[i;(l)]``)."""
        self._start(text)
        ref = self._variable_ref()
        self._expect_end()
        return ref

    def parse_coordinate(self, text: str) -> Optional[tuple[CoordId, int]]:
        """Parse a coordinate reference without jet.

        Returns:
            ``(coord, sign)`` or None for a repeated antisymmetric index
        """
        ref = self.parse_variable_ref(text)
        if ref.jet:
            raise ExpressionSyntaxError("Coordinate reference may not carry a jet", text, ref.position)
        return self._resolve(ref)

    # token plumbing

    def _start(self, text: str) -> None:
        self._text = text
        self._tokens = list(tokenize(text))
        self._pos = 0
        self._warnings = []

    def _peek(self) -> Token:
        return self._tokens[self._pos]

    def _advance(self) -> Token:
        token = self._tokens[self._pos]
        if token.kind != "end":
            self._pos += 1
        return token

    def _accept(self, symbol: str) -> bool:
        token = self._peek()
        if token.kind == "symbol" and token.text == symbol:
            self._pos += 1
            return True
        return False

    def _expect(self, symbol: str) -> Token:
        token = self._peek()
        if token.kind != "symbol" or token.text != symbol:
            self._fail(f"Expected '{symbol}'", token)
        return self._advance()

    def _expect_end(self) -> None:
        token = self._peek()
        if token.kind != "end":
            self._fail(f"Unexpected token {token.text!r}", token)

    def _fail(self, message: str, token: Token) -> NoReturn:
        raise ExpressionSyntaxError(message, self._text, token.position)

    def _integer(self) -> int:
        token = self._peek()
        if token.kind != "number":
            self._fail("Expected an integer", token)
        self._advance()
        return int(token.text)

    # grammar rules

    def _expression(self) -> Expr:
        negate = self._accept("-")
        result = self._term()
        if negate:
            result = -result
        while True:
            if self._accept("+"):
                result = result + self._term()
            elif self._accept("-"):
                result = result - self._term()
            else:
                return result

    def _term(self) -> Expr:
        token = self._peek()
        if token.kind == "number":
            numerator = self._integer()
            denominator = 1
            if self._accept("/"):
                denom_token = self._peek()
                denominator = self._integer()
                if denominator == 0:
                    self._fail("Denominator must be positive", denom_token)
            result = Expr.constant(self.spec, Fraction(numerator, denominator))
        elif token.kind == "ident":
            result = self._factor()
        else:
            self._fail("Expected a coefficient or a variable", token)
        while self._accept("*"):
            result = result * self._factor()
        return result

    def _factor(self) -> Expr:
        base = self._variable()
        if self._accept("^"):
            token = self._peek()
            exponent = self._integer()
            if exponent < 1:
                self._fail("Exponent must be a positive integer", token)
            return base ** exponent
        return base

    def _variable(self) -> Expr:
        ref = self._variable_ref()
        resolved = self._resolve(ref)
        if resolved is None:
            self._warnings.append(
                f"Repeated antisymmetric index in {ref.family}{list(ref.indices)}; term is zero"
            )
            return Expr.zero(self.spec)
        coord, sign = resolved
        var = JetVariable(coord, SymMultiIndex(ref.jet))
        return Expr.variable(self.spec, var).scale(sign)

    def _variable_ref(self) -> VariableRef:
        token = self._peek()
        if token.kind != "ident":
            self._fail("Expected a variable name", token)
        self._advance()
        indices: list[int] = []
        jet: list[int] = []
        if self._accept("["):
            if self._peek().kind == "number":
                indices.append(self._integer())
                while self._accept(","):
                    indices.append(self._integer())
            if self._accept(";"):
                self._expect("(")
                if self._peek().kind == "number":
                    jet.append(self._integer())
                    while self._accept(","):
                        jet.append(self._integer())
                self._expect(")")
            self._expect("]")
        return VariableRef(token.text, tuple(indices), tuple(jet), token.position)

    def _resolve(self, ref: VariableRef) -> Optional[tuple[CoordId, int]]:
        where = f" at column {ref.position + 1}"
        try:
            resolved = self.spec.resolve(ref.family, ref.indices)
        except UnknownFamilyError as e:
            raise UnknownFamilyError(f"{e}{where}") from None
        except IndexRangeError as e:
            raise IndexRangeError(f"{e}{where}") from None
        family = self.spec.family(ref.family)
        if ref.jet and family.role is FamilyRole.BASE:
            raise IndexRangeError(f"Base coordinate '{ref.family}' carries no jet{where}")
        for index in ref.jet:
            if not 0 <= index < self.spec.base_dim:
                raise IndexRangeError(
                    f"Jet index {index} out of range 0..{self.spec.base_dim - 1}{where}"
                )
        return resolved


def parse_expr(spec: BundleSpec, text: str) -> Expr:
    """Parse expression text, logging (not raising) repeated-index warnings."""
    return ExpressionParser(spec).parse(text).expr


def format_variable(var: JetVariable) -> str:
    """Textual form of a jet variable: ``y``, ``a[1,2]``, ``a[1,0;(2)]``, ``y[;(0,0)]``."""
    inside = ",".join(str(i) for i in var.component)
    if var.jet:
        inside += ";" + format_multiindex(var.jet)
    if not inside:
        return var.family
    return f"{var.family}[{inside}]"


def format_coordinate(coord: CoordId) -> str:
    """Coordinate reference without jet."""
    return format_variable(JetVariable(coord))


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_expr(expr: Expr, max_terms: Optional[int] = None) -> str:
    """Deterministic printing in the graded lexicographic term order.

    Args:
        expr: Expression to print
        max_terms: Truncate after this many terms, appending a term count

    Returns:
        Expression text; ``parse`` of it reproduces ``expr`` when not truncated
    """
    if expr.is_zero():
        return "0"
    terms = expr.sorted_terms()
    shown = terms if max_terms is None else terms[:max_terms]
    pieces: list[str] = []
    for position, (mono, coeff) in enumerate(shown):
        magnitude = abs(coeff) if position else coeff
        factors = [
            format_variable(var) if exp == 1 else f"{format_variable(var)}^{exp}"
            for var, exp in sorted(mono, key=lambda item: variable_key(expr.spec, item[0]))
        ]
        text = "*".join([format_fraction(magnitude)] + factors)
        if position:
            pieces.append(("- " if coeff < 0 else "+ ") + text)
        else:
            pieces.append(text)
    result = " ".join(pieces)
    if len(shown) < len(terms):
        result += f" + ... ({len(terms)} terms total)"
    return result
