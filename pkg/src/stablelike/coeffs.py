"""Symbol-coefficient expressions and the validated symbol triple.

A symbol is described by three coefficient functions of the state variable
``x``: the stability index ``alpha(x)``, the drift ``beta(x)`` and the scale
``gamma(x)``.  This module parses them from a small expression grammar,
evaluates them on floats or numpy arrays, validates the boundedness
requirements (alpha inside (0,2), gamma positive, beta bounded), and
computes the jump-intensity normalization c(x).

Grammar (LL(1), standard precedence ``^`` > unary ``-`` > ``* /`` > ``+ -``):

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := '-' factor | power
    power    := atom ('^' factor)?          # right associative
    atom     := NUMBER | 'x' | '(' expr ')' | NAME '(' expr (',' expr)* ')'

Functions: sin, cos, tanh, exp, ln, abs, sgn, min, max and the blended
two-sided construct ``piece(threshold, left, right[, width])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun

__all__ = [
    "ParseError",
    "EvalDomainError",
    "CoefficientExpr",
    "SymbolTriple",
    "SymbolBounds",
    "ValidationReport",
    "ValidationGrid",
    "parse_coefficient",
    "eval_coefficient",
    "validate_triple",
    "c_of_x",
    "load_symbol_file",
]

_FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "tanh": 1,
    "exp": 1,
    "ln": 1,
    "abs": 1,
    "sgn": 1,
    "min": 2,
    "max": 2,
    "piece": (3, 4),
}

SQRT_PI = math.sqrt(math.pi)


class ParseError(ValueError):
    """Syntax error with byte offset and the expected-token set."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at offset {offset}"
                         + (f" (expected one of: {', '.join(expected)})" if expected else ""))
        self.offset = offset
        self.expected = expected


class EvalDomainError(ArithmeticError):
    """Coefficient evaluation left its domain (log of non-positive value,
    division by zero) at a reported state x."""

    def __init__(self, message: str, x):
        super().__init__(f"{message} at x={x}")
        self.x = x


# ---------------------------------------------------------------------------
# expression nodes


class CoefficientExpr:
    """Immutable expression tree over the coefficient grammar."""

    def eval(self, x):
        raise NotImplementedError

    def to_source(self) -> str:
        raise NotImplementedError

    def contains_piece(self) -> bool:
        return any(child.contains_piece() for child in self._children())

    def _children(self) -> tuple["CoefficientExpr", ...]:
        return ()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_source()!r})"

    def __eq__(self, other):
        return (type(self) is type(other)
                and self._key() == other._key())

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Num(CoefficientExpr):
    value: float

    def eval(self, x):
        if isinstance(x, np.ndarray):
            return np.full(x.shape, self.value)
        return self.value

    def to_source(self):
        return repr(self.value)

    def _key(self):
        return (self.value,)


@dataclass(frozen=True, eq=False)
class Var(CoefficientExpr):
    def eval(self, x):
        return x

    def to_source(self):
        return "x"

    def _key(self):
        return ()


@dataclass(frozen=True, eq=False)
class Neg(CoefficientExpr):
    operand: CoefficientExpr

    def eval(self, x):
        return -self.operand.eval(x)

    def to_source(self):
        return f"(-{self.operand.to_source()})"

    def _children(self):
        return (self.operand,)

    def _key(self):
        return (self.operand,)


@dataclass(frozen=True, eq=False)
class BinOp(CoefficientExpr):
    op: str
    left: CoefficientExpr
    right: CoefficientExpr

    def eval(self, x):
        a = self.left.eval(x)
        b = self.right.eval(x)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if isinstance(b, np.ndarray):
                if np.any(b == 0.0):
                    bad = np.asarray(x)[np.nonzero(b == 0.0)].flat[0]
                    raise EvalDomainError("division by zero", bad)
            elif b == 0.0:
                raise EvalDomainError("division by zero", x)
            return a / b
        if self.op == "^":
            with np.errstate(invalid="raise", divide="raise"):
                try:
                    return a ** b
                except FloatingPointError:
                    raise EvalDomainError("invalid power", x) from None
        raise AssertionError(self.op)

    def to_source(self):
        return f"({self.left.to_source()} {self.op} {self.right.to_source()})"

    def _children(self):
        return (self.left, self.right)

    def _key(self):
        return (self.op, self.left, self.right)


@dataclass(frozen=True, eq=False)
class Call(CoefficientExpr):
    name: str
    args: tuple[CoefficientExpr, ...]

    def eval(self, x):
        vals = [a.eval(x) for a in self.args]
        n = self.name
        if n == "sin":
            return np.sin(vals[0]) if isinstance(vals[0], np.ndarray) else math.sin(vals[0])
        if n == "cos":
            return np.cos(vals[0]) if isinstance(vals[0], np.ndarray) else math.cos(vals[0])
        if n == "tanh":
            return np.tanh(vals[0]) if isinstance(vals[0], np.ndarray) else math.tanh(vals[0])
        if n == "exp":
            return np.exp(vals[0]) if isinstance(vals[0], np.ndarray) else math.exp(vals[0])
        if n == "ln":
            v = vals[0]
            if isinstance(v, np.ndarray):
                if np.any(v <= 0.0):
                    bad = np.asarray(x)[np.nonzero(v <= 0.0)].flat[0]
                    raise EvalDomainError("ln of non-positive value", bad)
                return np.log(v)
            if v <= 0.0:
                raise EvalDomainError("ln of non-positive value", x)
            return math.log(v)
        if n == "abs":
            return np.abs(vals[0]) if isinstance(vals[0], np.ndarray) else abs(vals[0])
        if n == "sgn":
            # sgn(0) = 0 by convention
            return np.sign(vals[0]) if isinstance(vals[0], np.ndarray) else float(np.sign(vals[0]))
        if n == "min":
            return np.minimum(vals[0], vals[1])
        if n == "max":
            return np.maximum(vals[0], vals[1])
        if n == "piece":
            thr, left, right = vals[0], vals[1], vals[2]
            width = vals[3] if len(vals) > 3 else 1.0
            xs = x if not isinstance(x, np.ndarray) else x
            s = np.clip((np.asarray(xs) - thr) / width + 0.5, 0.0, 1.0)
            blend = s * s * (3.0 - 2.0 * s)
            out = left * (1.0 - blend) + right * blend
            if not isinstance(x, np.ndarray):
                return float(out)
            return out
        raise AssertionError(n)

    def to_source(self):
        return f"{self.name}({', '.join(a.to_source() for a in self.args)})"

    def contains_piece(self):
        return self.name == "piece" or super().contains_piece()

    def _children(self):
        return self.args

    def _key(self):
        return (self.name, self.args)


# ---------------------------------------------------------------------------
# tokenizer and recursive-descent parser


@dataclass
class _Token:
    kind: str  # NUMBER | NAME | X | OP | LPAREN | RPAREN | COMMA | END
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            tokens.append(_Token("NUMBER", src[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            text = src[i:j]
            tokens.append(_Token("X" if text == "x" else "NAME", text, i))
            i = j
            continue
        if ch in "+-*/^":
            tokens.append(_Token("OP", ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append(_Token("LPAREN", ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append(_Token("RPAREN", ch, i))
            i += 1
            continue
        if ch == ",":
            tokens.append(_Token("COMMA", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("END", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"unexpected token {t.text or '<end>'!r}", t.offset, expected)
        return self.advance()

    def parse(self) -> CoefficientExpr:
        e = self.expr()
        t = self.peek()
        if t.kind != "END":
            raise ParseError(f"trailing input {t.text!r}", t.offset, ("operator", "end of input"))
        return e

    def expr(self) -> CoefficientExpr:
        node = self.term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> CoefficientExpr:
        node = self.factor()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> CoefficientExpr:
        t = self.peek()
        if t.kind == "OP" and t.text == "-":
            self.advance()
            return Neg(self.factor())
        if t.kind == "OP" and t.text == "+":
            self.advance()
            return self.factor()
        return self.power()

    def power(self) -> CoefficientExpr:
        base = self.atom()
        t = self.peek()
        if t.kind == "OP" and t.text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> CoefficientExpr:
        t = self.peek()
        if t.kind == "NUMBER":
            self.advance()
            return Num(float(t.text))
        if t.kind == "X":
            self.advance()
            return Var()
        if t.kind == "LPAREN":
            self.advance()
            e = self.expr()
            self.expect("RPAREN", (")",))
            return e
        if t.kind == "NAME":
            self.advance()
            name = t.text
            if name not in _FUNCTIONS:
                raise ParseError(f"unknown function {name!r}", t.offset, tuple(sorted(_FUNCTIONS)))
            self.expect("LPAREN", ("(",))
            args = [self.expr()]
            while self.peek().kind == "COMMA":
                self.advance()
                args.append(self.expr())
            self.expect("RPAREN", (")", ","))
            arity = _FUNCTIONS[name]
            ok = len(args) in arity if isinstance(arity, tuple) else len(args) == arity
            if not ok:
                raise ParseError(f"{name} expects {arity} argument(s), got {len(args)}", t.offset)
            return Call(name, tuple(args))
        raise ParseError(f"unexpected token {t.text or '<end>'!r}", t.offset,
                         ("number", "x", "(", "function"))


def parse_coefficient(src: str) -> CoefficientExpr:
    """Parse a coefficient expression; raises ParseError with the byte offset
    and expected-token set on malformed input."""
    if not src or not src.strip():
        raise ParseError("empty expression", 0, ("number", "x", "(", "function"))
    return _Parser(src).parse()


def eval_coefficient(expr: CoefficientExpr, x):
    """Evaluate a parsed coefficient at a float or numpy array of states."""
    out = expr.eval(x)
    if isinstance(x, np.ndarray):
        out = np.asarray(out, dtype=float)
        if out.shape != np.shape(x):
            out = np.broadcast_to(out, np.shape(x)).copy()
        if not np.all(np.isfinite(out)):
            bad = np.asarray(x)[~np.isfinite(out)].flat[0]
            raise EvalDomainError("non-finite coefficient value", bad)
        return out
    out = float(out)
    if not math.isfinite(out):
        raise EvalDomainError("non-finite coefficient value", x)
    return out


# ---------------------------------------------------------------------------
# symbol triple


@dataclass
class SymbolBounds:
    alpha_inf: float
    alpha_sup: float
    gamma_inf: float
    beta_sup_abs: float


@dataclass
class ValidationGrid:
    xmax: float = 1e4
    points: int = 20001

    def __post_init__(self):
        if self.xmax < 1e4:
            raise ValueError("validation grid must reach at least |x| = 1e4")
        if self.points < 10**4:
            raise ValueError("validation grid needs at least 1e4 points")

    def states(self) -> np.ndarray:
        return np.linspace(-self.xmax, self.xmax, self.points)


@dataclass
class ValidationReport:
    passed: bool
    grid: ValidationGrid
    ranges: dict
    failures: list
    warnings: list


@dataclass
class SymbolTriple:
    """The coefficient functions (alpha, beta, gamma) with validated bounds."""

    alpha: CoefficientExpr
    beta: CoefficientExpr
    gamma: CoefficientExpr
    bounds: SymbolBounds | None = None
    report: ValidationReport | None = field(default=None, repr=False)

    @classmethod
    def from_sources(cls, alpha: str, beta: str, gamma: str) -> "SymbolTriple":
        return cls(parse_coefficient(alpha), parse_coefficient(beta), parse_coefficient(gamma))

    def alpha_at(self, x):
        return eval_coefficient(self.alpha, x)

    def beta_at(self, x):
        return eval_coefficient(self.beta, x)

    def gamma_at(self, x):
        return eval_coefficient(self.gamma, x)

    @property
    def validated(self) -> bool:
        return self.bounds is not None and self.report is not None and self.report.passed

    def require_validated(self):
        if not self.validated:
            raise ValueError("symbol triple has not passed validation; run validate_triple first")

    def contains_piece(self) -> bool:
        return any(e.contains_piece() for e in (self.alpha, self.beta, self.gamma))


def _jump_warning(values: np.ndarray) -> bool:
    d = np.abs(np.diff(values))
    if d.size == 0:
        return False
    big = float(d.max())
    med = float(np.median(d))
    return big > 0.2 and big > 50.0 * (med + 1e-15)


def validate_triple(triple: SymbolTriple, grid: ValidationGrid | None = None) -> ValidationReport:
    """Sample the three coefficients on a dense grid, check the boundedness
    requirements and fill triple.bounds.  Failure conditions: sampled alpha
    leaves (0, 2) by margin 1e-6, sampled gamma <= 1e-9, or sampled |beta|
    above 1e6.  A first-difference heuristic flags apparent jumps."""
    grid = grid or ValidationGrid()
    xs = grid.states()
    a = triple.alpha_at(xs)
    b = triple.beta_at(xs)
    g = triple.gamma_at(xs)
    ranges = {
        "alpha": (float(a.min()), float(a.max())),
        "beta": (float(b.min()), float(b.max())),
        "gamma": (float(g.min()), float(g.max())),
    }
    failures = []
    if a.min() <= 1e-6 or a.max() >= 2.0 - 1e-6:
        failures.append(f"alpha range {ranges['alpha']} leaves (0, 2)")
    if g.min() <= 1e-9:
        failures.append(f"gamma minimum {g.min():.3e} not positive")
    if np.abs(b).max() > 1e6:
        failures.append(f"|beta| maximum {np.abs(b).max():.3e} above 1e6")
    warnings = []
    for name, vals in (("alpha", a), ("beta", b), ("gamma", g)):
        if _jump_warning(vals):
            warnings.append(f"{name} shows a jump-like first difference; "
                            "consider a piece(...) blend")
    report = ValidationReport(passed=not failures, grid=grid, ranges=ranges,
                              failures=failures, warnings=warnings)
    triple.report = report
    if report.passed:
        triple.bounds = SymbolBounds(
            alpha_inf=float(a.min()),
            alpha_sup=float(a.max()),
            gamma_inf=float(g.min()),
            beta_sup_abs=float(np.abs(b).max()),
        )
    return report


def c_of_x(triple: SymbolTriple, x: float) -> float:
    """Jump-intensity normalization

        c(x) = gamma(x) * alpha(x) * 2^(alpha(x)-1) * Gamma((alpha(x)+1)/2)
               / (sqrt(pi) * Gamma(1 - alpha(x)/2)),

    strictly positive for alpha(x) in (0, 2)."""
    a = triple.alpha_at(x)
    g = triple.gamma_at(x)
    return c_from_values(a, g)


def c_from_values(alpha: float, gamma: float) -> float:
    """c(x) from already-evaluated coefficient values."""
    return (gamma * alpha * 2.0 ** (alpha - 1.0)
            * specfun.gamma_fn((alpha + 1.0) / 2.0)
            / (SQRT_PI * specfun.gamma_fn(1.0 - alpha / 2.0)))


# ---------------------------------------------------------------------------
# symbol files


def load_symbol_file(path: str) -> tuple[SymbolTriple, dict]:
    """Read a key=value symbol file.

    Recognized keys: alpha, beta, gamma (expression strings, optionally
    quoted), grid.xmax, grid.points, blend_width.  Lines starting with '#'
    and blank lines are ignored.  Returns the parsed (unvalidated) triple and
    a dict of the extra settings."""
    settings: dict = {}
    exprs: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if value[:1] in "\"'" and value[-1:] == value[:1]:
                value = value[1:-1]
            if key in ("alpha", "beta", "gamma"):
                exprs[key] = value
            elif key == "grid.xmax":
                settings["grid.xmax"] = float(value)
            elif key == "grid.points":
                settings["grid.points"] = int(float(value))
            elif key == "blend_width":
                settings["blend_width"] = float(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    missing = [k for k in ("alpha", "beta", "gamma") if k not in exprs]
    if missing:
        raise ValueError(f"{path}: missing required key(s): {', '.join(missing)}")
    try:
        triple = SymbolTriple.from_sources(exprs["alpha"], exprs["beta"], exprs["gamma"])
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}", exc.offset, exc.expected) from exc
    return triple, settings
