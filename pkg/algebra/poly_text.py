# algebra/poly_text.py
"""
Plain-text syntax for polynomials and polynomial forms.

Polynomials:  (3/2+1/2i) z1^2 zb2 - 1/3i z1 + 4
  - terms separated by '+' / '-', coefficient first, factors separated by
    spaces (an optional '*' is accepted), zbK denotes conj(z_K)
  - '#' starts a comment; input may span several lines

Forms: one component per line, `<basis> : <polynomial>`, where the basis
is `1` or a '^'-joined list of eK / dzbK generators in increasing order,
e.g. `e1^e2^dzb1 : zb1`.

format_poly / parse_poly round-trip exactly.
"""

import re
from fractions import Fraction

from loguru import logger

from algebra.symbolic import PolyExpr
from utils.error_handler import PolyParseError

_ZERO_FORM = re.compile(r"#\s*zero \((\d+),(\d+)\)-form")
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<var>zb?\d+)|(?P<num>\d+)|(?P<imag>i)|(?P<op>[-+*/^()])"
)


# ========== PRINTING ==========

def _rational(q):
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _monomial(exps, n):
    factors = []
    for prefix, offset in (("z", 0), ("zb", n)):
        for j in range(n):
            k = exps[offset + j]
            if k == 1:
                factors.append(f"{prefix}{j + 1}")
            elif k > 1:
                factors.append(f"{prefix}{j + 1}^{k}")
    return " ".join(factors)


def _signed_term(exps, re_part, im_part, n):
    """Return (negative, body) for one term."""
    mono = _monomial(exps, n)
    if im_part == 0:
        negative, coef, unit = re_part < 0, _rational(abs(re_part)), abs(re_part) == 1
    elif re_part == 0:
        negative, coef, unit = im_part < 0, _rational(abs(im_part)) + "i", False
    else:
        sign = "+" if im_part > 0 else "-"
        negative, unit = False, False
        coef = f"({_rational(re_part)}{sign}{_rational(abs(im_part))}i)"

    if not mono:
        return negative, coef
    if unit:
        return negative, mono
    return negative, f"{coef} {mono}"


def format_poly(p: PolyExpr) -> str:
    """Canonical text of a polynomial ("0" for the zero polynomial)."""
    terms = p.terms()
    if not terms:
        return "0"
    pieces = []
    for k, (exps, (re_part, im_part)) in enumerate(terms):
        negative, body = _signed_term(exps, re_part, im_part, p.n)
        if k == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


# ========== PARSING ==========

class _Token:
    __slots__ = ('kind', 'text', 'line', 'column')

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column


def _tokenize(text):
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise PolyParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'nl':
            line += 1
            line_start = match.end()
        elif kind not in ('ws', 'comment'):
            tokens.append(_Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(_Token('end', '', line, pos - line_start + 1))
    return tokens


class _PolyParser:
    """Recursive-descent parser over the token stream."""

    def __init__(self, text, n):
        self.n = n
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def _fail(self, message, token=None):
        token = token or self.current
        raise PolyParseError(message, token.line, token.column)

    def _take(self, kind, text=None):
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            expected = text or kind
            found = token.text or 'end of input'
            self._fail(f"expected {expected!r}, found {found!r}")
        self.pos += 1
        return token

    def _at(self, kind, text=None):
        token = self.current
        return token.kind == kind and (text is None or token.text == text)

    def parse(self):
        terms = {}
        if self._at('end'):
            self._fail("empty polynomial")
        negative = False
        if self._at('op', '+') or self._at('op', '-'):
            negative = self._take('op').text == '-'
        while True:
            exps, (re_part, im_part) = self._term()
            if negative:
                re_part, im_part = -re_part, -im_part
            old_re, old_im = terms.get(exps, (Fraction(0), Fraction(0)))
            terms[exps] = (old_re + re_part, old_im + im_part)
            if self._at('end'):
                break
            if not (self._at('op', '+') or self._at('op', '-')):
                self._fail(f"expected '+' or '-' between terms, found {self.current.text!r}")
            negative = self._take('op').text == '-'
        return PolyExpr.from_terms(self.n, terms)

    def _rational(self):
        numerator = int(self._take('num').text)
        if self._at('op', '/'):
            self._take('op', '/')
            token = self.current
            denominator = int(self._take('num').text)
            if denominator == 0:
                self._fail("zero denominator", token)
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    def _real_or_imag(self):
        """A rational optionally followed by 'i', or a bare 'i'."""
        if self._at('imag'):
            self._take('imag')
            return Fraction(0), Fraction(1)
        value = self._rational()
        if self._at('imag'):
            self._take('imag')
            return Fraction(0), value
        return value, Fraction(0)

    def _complex(self):
        self._take('op', '(')
        re_part, im_part = Fraction(0), Fraction(0)
        sign = 1
        if self._at('op', '+') or self._at('op', '-'):
            sign = -1 if self._take('op').text == '-' else 1
        while True:
            a, b = self._real_or_imag()
            re_part += sign * a
            im_part += sign * b
            if self._at('op', ')'):
                break
            if not (self._at('op', '+') or self._at('op', '-')):
                self._fail("expected '+', '-' or ')' inside complex coefficient")
            sign = -1 if self._take('op').text == '-' else 1
        self._take('op', ')')
        return re_part, im_part

    def _term(self):
        coefficient = None
        if self._at('op', '('):
            coefficient = self._complex()
        elif self._at('num') or self._at('imag'):
            coefficient = self._real_or_imag()

        exps = [0] * (2 * self.n)
        seen_factor = False
        while True:
            if self._at('op', '*'):
                self._take('op', '*')
                if not self._at('var'):
                    self._fail("expected a variable after '*'")
            if not self._at('var'):
                break
            self._factor(exps)
            seen_factor = True

        if coefficient is None and not seen_factor:
            self._fail(f"expected a term, found {self.current.text or 'end of input'!r}")
        if coefficient is None:
            coefficient = (Fraction(1), Fraction(0))
        return tuple(exps), coefficient

    def _factor(self, exps):
        token = self._take('var')
        conj = token.text.startswith('zb')
        index = int(token.text[2:] if conj else token.text[1:])
        if not 1 <= index <= self.n:
            self._fail(f"variable {token.text} outside z1..z{self.n}", token)
        power = 1
        if self._at('op', '^'):
            self._take('op', '^')
            power = int(self._take('num').text)
        exps[(self.n if conj else 0) + index - 1] += power


def parse_poly(text: str, n: int) -> PolyExpr:
    """
    Parse polynomial text.

    Args:
        text (str): Polynomial in the syntax above
        n (int): Ambient dimension

    Returns:
        PolyExpr

    Raises:
        PolyParseError: with line and column of the offending token
    """
    return _PolyParser(text, n).parse()


# ========== FORMS ==========

def parse_basis(key, n, line):
    from algebra.exterior import ConjIndex, ExteriorIndex

    key = key.strip()
    if key == '1':
        return ExteriorIndex(), ConjIndex()
    e_part, k_part = [], []
    for generator in key.split('^'):
        generator = generator.strip()
        match = re.fullmatch(r"(e|dzb)(\d+)", generator)
        if match is None:
            raise PolyParseError(f"bad basis generator {generator!r}", line, 1)
        index = int(match.group(2))
        if not 1 <= index <= n:
            raise PolyParseError(f"index {index} outside 1..{n}", line, 1)
        if match.group(1) == 'e':
            if k_part:
                raise PolyParseError("e-generators must precede dzb-generators", line, 1)
            e_part.append(index)
        else:
            k_part.append(index)
    for part in (e_part, k_part):
        if any(b <= a for a, b in zip(part, part[1:])):
            raise PolyParseError(f"basis {key!r} is not strictly increasing", line, 1)
    return ExteriorIndex(tuple(e_part)), ConjIndex(tuple(k_part))


def parse_form(text: str, n: int, r=None, s=None):
    """
    Parse a polynomial KoszulForm, one `<basis> : <polynomial>` per line.

    Degrees are read from the first component. An empty form needs r and s,
    either as arguments or from a `# zero (r,s)-form` line as written by
    format_form. Repeated bases are summed.
    """
    from algebra.exterior import KoszulForm

    header = _ZERO_FORM.search(text)
    if r is None and header is not None:
        r, s = int(header.group(1)), int(header.group(2))
    components = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split('#', 1)[0].strip()
        if not body:
            continue
        if ':' not in body:
            raise PolyParseError("expected '<basis> : <polynomial>'", line_no, 1)
        key, poly_text = body.split(':', 1)
        J, K = parse_basis(key, n, line_no)
        try:
            poly = parse_poly(poly_text, n)
        except PolyParseError as e:
            raise PolyParseError(f"in component {key.strip()}: {e}", line_no, e.column + len(key) + 1)
        if r is None:
            r, s = J.degree, K.degree
        if (J.degree, K.degree) != (r, s):
            raise PolyParseError(f"component degree ({J.degree},{K.degree}) differs from ({r},{s})", line_no, 1)
        components[(J, K)] = components[(J, K)] + poly if (J, K) in components else poly

    if r is None:
        raise PolyParseError("form has no components and no declared degree", 1, 1)
    logger.debug(f"parsed ({r},{s})-form with {len(components)} components")
    return KoszulForm(n, r, s, components)


def format_basis(J, K):
    generators = [f"e{j}" for j in J.indices] + [f"dzb{k}" for k in K.indices]
    return "^".join(generators) if generators else "1"


def format_form(form) -> str:
    """Text of a polynomial form; the zero form prints as a comment line with its degree."""
    if form.is_zero():
        return f"# zero ({form.r},{form.s})-form"
    lines = [f"{format_basis(J, K)} : {format_poly(w)}" for (J, K), w in form.items()]
    return "\n".join(lines)
