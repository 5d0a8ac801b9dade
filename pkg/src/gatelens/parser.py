"""Recursive-descent parser for the canonical RA grammar.

The grammar (whitespace insignificant between tokens):

    expr     := unary | binary | IDENT
    unary    := ("select"|"σ")  "[" pred "]" "(" expr ")"
              | ("project"|"π") "[" cols "]" "(" expr ")"
              | ("rename"|"ρ")  "[" ren ("," ren)* "]" "(" expr ")"
              | "distinct" "(" expr ")"
              | "sort" "[" skey ("," skey)* "]" "(" expr ")"
              | "limit" "[" INT "]" "(" expr ")"
              | ("groupby"|"γ") "[" cols? ";" agg ("," agg)* "]" "(" expr ")"
    binary   := ("union"|"minus"|"intersect"|"times"|"divide") "(" expr "," expr ")"
              | "join" "[" pred "]" "(" expr "," expr ")"
    ren      := IDENT "->" IDENT
    skey     := IDENT ("asc"|"desc")?
    agg      := ("count" "(" ("*"|IDENT) ")" | ("sum"|"avg"|"min"|"max") "(" IDENT ")") "as" IDENT
    pred     := and-chain ("or" and-chain)*
    and-chain:= not-term ("and" not-term)*
    not-term := "not" not-term | atom
    atom     := "(" pred ")" | compare
    compare  := term OP term | IDENT "in" "[" literal ("," literal)* "]"
              | "contains" "(" term "," STRING ")"
    term     := IDENT | literal | "lower" "(" term ")"
    literal  := STRING | NUMBER | "true" | "false" | "null"

Keywords are reserved lowercase; Greek aliases σ π ρ γ map to select, project,
rename, groupby. parse() is pure and total: any input string yields either an
RaExpr or a ParseError, never a crash.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .errors import ParseError

KEYWORDS = frozenset({
    "select", "project", "rename", "distinct", "sort", "limit", "groupby",
    "union", "minus", "intersect", "times", "divide", "join",
    "and", "or", "not", "in", "contains", "lower",
    "true", "false", "null", "asc", "desc", "as",
    "count", "sum", "avg", "min", "max",
})

GREEK_ALIASES = {"σ": "select", "π": "project", "ρ": "rename", "γ": "groupby"}

_COMPARE_OPS = frozenset(ast.COMPARE_OPS)

_MAX_DEPTH = 150


@dataclass(frozen=True)
class Token:
    type: str   # ident | number | string | keyword | op | eof
    value: object
    line: int
    column: int

    def describe(self) -> str:
        if self.type == "eof":
            return "end of input"
        if self.type == "keyword":
            return f"keyword '{self.value}'"
        if self.type == "op":
            return f"'{self.value}'"
        return self.type


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"  # ASCII only; str.isdigit admits superscripts


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or _is_digit(ch)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def err(message: str, at_line: int, at_col: int) -> ParseError:
        return ParseError(message, at_line, at_col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        start_line, start_col = line, col

        if ch in GREEK_ALIASES:
            tokens.append(Token("keyword", GREEK_ALIASES[ch], start_line, start_col))
            i += 1
            col += 1
            continue

        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue

        if _is_digit(ch) or (ch in "+-" and i + 1 < n and _is_digit(text[i + 1])):
            j = i + 1 if ch in "+-" else i
            while j < n and _is_digit(text[j]):
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and _is_digit(text[j + 1]):
                is_float = True
                j += 1
                while j < n and _is_digit(text[j]):
                    j += 1
            raw = text[i:j]
            value: object = float(raw) if is_float else int(raw)
            tokens.append(Token("number", value, start_line, start_col))
            col += j - i
            i = j
            continue

        if ch == '"':
            j = i + 1
            buf: list[str] = []
            while True:
                if j >= n:
                    raise err("unterminated string literal", start_line, start_col)
                c = text[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in ('"', "\\"):
                        raise err(
                            "invalid string escape (only \\\" and \\\\ allowed)",
                            line, col + (j - i),
                        )
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if c == "\n":
                    raise err("unterminated string literal", start_line, start_col)
                buf.append(c)
                j += 1
            tokens.append(Token("string", "".join(buf), start_line, start_col))
            col += j - i
            i = j
            continue

        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("op", "->", start_line, start_col))
            i += 2
            col += 2
            continue

        if ch in "<>=!":
            if i + 1 < n and text[i + 1] == "=":
                op = ch + "="
                if op in ("<=", ">=", "==", "!="):
                    tokens.append(Token("op", op, start_line, start_col))
                    i += 2
                    col += 2
                    continue
            if ch in "<>":
                tokens.append(Token("op", ch, start_line, start_col))
                i += 1
                col += 1
                continue
            raise err(f"unexpected character {ch!r}", start_line, start_col)

        if ch in "[](),;*":
            tokens.append(Token("op", ch, start_line, start_col))
            i += 1
            col += 1
            continue

        raise err(f"unexpected character {ch!r}", start_line, start_col)

    tokens.append(Token("eof", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0

    # --- token plumbing ---

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: set[str], tok: Token | None = None):
        tok = tok or self.peek()
        wanted = ", ".join(sorted(expected))
        raise ParseError(
            f"expected {wanted}, found {tok.describe()}",
            tok.line, tok.column,
            expected=frozenset(expected), found=tok.describe(),
        )

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if tok.type == "op" and tok.value == op:
            return self.advance()
        self.fail({f"'{op}'"})

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.type == "keyword" and tok.value == word:
            return self.advance()
        self.fail({f"keyword '{word}'"})

    def expect_ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.type == "ident":
            self.advance()
            return tok.value
        self.fail({what})

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.type == "keyword" and tok.value in words

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.type == "op" and tok.value == op

    def _enter(self):
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            tok = self.peek()
            raise ParseError("expression nesting too deep", tok.line, tok.column)

    def _leave(self):
        self.depth -= 1

    # --- expressions ---

    def parse_expr(self) -> ast.RaExpr:
        self._enter()
        try:
            tok = self.peek()
            if tok.type == "ident":
                self.advance()
                return ast.Scan(tok.value)
            if tok.type == "keyword":
                handler = getattr(self, f"_parse_{tok.value}", None)
                if handler is not None:
                    return handler()
            self.fail({"expression"})
        finally:
            self._leave()

    def _paren_expr(self) -> ast.RaExpr:
        self.expect_op("(")
        expr = self.parse_expr()
        self.expect_op(")")
        return expr

    def _paren_pair(self) -> tuple[ast.RaExpr, ast.RaExpr]:
        self.expect_op("(")
        left = self.parse_expr()
        self.expect_op(",")
        right = self.parse_expr()
        self.expect_op(")")
        return left, right

    def _parse_select(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        pred = self.parse_predicate()
        self.expect_op("]")
        return ast.Select(pred, self._paren_expr())

    def _parse_project(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        cols = [self.expect_ident("column name")]
        while self.at_op(","):
            self.advance()
            cols.append(self.expect_ident("column name"))
        self.expect_op("]")
        return ast.Project(tuple(cols), self._paren_expr())

    def _parse_rename(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        pairs = [self._rename_pair()]
        while self.at_op(","):
            self.advance()
            pairs.append(self._rename_pair())
        self.expect_op("]")
        return ast.Rename(tuple(pairs), self._paren_expr())

    def _rename_pair(self) -> tuple[str, str]:
        old = self.expect_ident("column name")
        self.expect_op("->")
        new = self.expect_ident("new column name")
        return old, new

    def _parse_distinct(self) -> ast.RaExpr:
        self.advance()
        return ast.Distinct(self._paren_expr())

    def _parse_sort(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        keys = [self._sort_key()]
        while self.at_op(","):
            self.advance()
            keys.append(self._sort_key())
        self.expect_op("]")
        return ast.Sort(tuple(keys), self._paren_expr())

    def _sort_key(self) -> ast.SortKey:
        col = self.expect_ident("column name")
        descending = False
        if self.at_keyword("asc", "desc"):
            descending = self.advance().value == "desc"
        return ast.SortKey(col, descending)

    def _parse_limit(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        tok = self.peek()
        if tok.type != "number" or isinstance(tok.value, float) or tok.value < 0:
            self.fail({"non-negative integer"})
        self.advance()
        self.expect_op("]")
        return ast.Limit(int(tok.value), self._paren_expr())

    def _parse_groupby(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        keys: list[str] = []
        if not self.at_op(";"):
            keys.append(self.expect_ident("grouping column"))
            while self.at_op(","):
                self.advance()
                keys.append(self.expect_ident("grouping column"))
        self.expect_op(";")
        aggs = [self._aggregate()]
        while self.at_op(","):
            self.advance()
            aggs.append(self._aggregate())
        self.expect_op("]")
        return ast.GroupBy(tuple(keys), tuple(aggs), self._paren_expr())

    def _aggregate(self) -> ast.Aggregate:
        tok = self.peek()
        if not (tok.type == "keyword" and tok.value in ("count", "sum", "avg", "min", "max")):
            self.fail({"aggregate function"})
        fn = self.advance().value
        self.expect_op("(")
        if fn == "count" and self.at_op("*"):
            self.advance()
            fn, column = "count_star", None
        else:
            column = self.expect_ident("column name")
        self.expect_op(")")
        self.expect_keyword("as")
        name = self.expect_ident("output name")
        return ast.Aggregate(fn, column, name)

    def _parse_union(self) -> ast.RaExpr:
        self.advance()
        return ast.Union_(*self._paren_pair())

    def _parse_minus(self) -> ast.RaExpr:
        self.advance()
        return ast.Minus(*self._paren_pair())

    def _parse_intersect(self) -> ast.RaExpr:
        self.advance()
        return ast.Intersect(*self._paren_pair())

    def _parse_times(self) -> ast.RaExpr:
        self.advance()
        return ast.Times(*self._paren_pair())

    def _parse_divide(self) -> ast.RaExpr:
        self.advance()
        return ast.Divide(*self._paren_pair())

    def _parse_join(self) -> ast.RaExpr:
        self.advance()
        self.expect_op("[")
        pred = self.parse_predicate()
        self.expect_op("]")
        return ast.Join(pred, *self._paren_pair())

    # --- predicates ---

    def parse_predicate(self) -> ast.Predicate:
        self._enter()
        try:
            pred = self._and_chain()
            while self.at_keyword("or"):
                self.advance()
                pred = ast.Or(pred, self._and_chain())
            return pred
        finally:
            self._leave()

    def _and_chain(self) -> ast.Predicate:
        pred = self._not_term()
        while self.at_keyword("and"):
            self.advance()
            pred = ast.And(pred, self._not_term())
        return pred

    def _not_term(self) -> ast.Predicate:
        self._enter()
        try:
            if self.at_keyword("not"):
                self.advance()
                return ast.Not(self._not_term())
            return self._atom()
        finally:
            self._leave()

    def _atom(self) -> ast.Predicate:
        if self.at_op("("):
            self.advance()
            pred = self.parse_predicate()
            self.expect_op(")")
            return pred
        if self.at_keyword("contains"):
            self.advance()
            self.expect_op("(")
            term = self._term()
            self.expect_op(",")
            tok = self.peek()
            if tok.type != "string":
                self.fail({"string literal"})
            needle = self.advance().value
            self.expect_op(")")
            return ast.Contains(term, needle)

        start = self.peek()
        term = self._term()
        if self.at_keyword("in"):
            if not isinstance(term, ast.ColumnRef):
                raise ParseError(
                    "membership test requires a plain column on the left",
                    start.line, start.column,
                )
            self.advance()
            self.expect_op("[")
            values = [self._literal()]
            while self.at_op(","):
                self.advance()
                values.append(self._literal())
            self.expect_op("]")
            return ast.InList(term.name, tuple(values))

        tok = self.peek()
        if tok.type == "op" and tok.value in _COMPARE_OPS:
            self.advance()
            return ast.Comparison(tok.value, term, self._term())
        self.fail({"comparison operator", "keyword 'in'"})

    def _term(self) -> ast.Term:
        self._enter()
        try:
            tok = self.peek()
            if tok.type == "ident":
                self.advance()
                return ast.ColumnRef(tok.value)
            if self.at_keyword("lower"):
                self.advance()
                self.expect_op("(")
                inner = self._term()
                self.expect_op(")")
                return ast.Lower(inner)
            if tok.type in ("string", "number") or self.at_keyword("true", "false", "null"):
                return ast.Literal(self._literal())
            self.fail({"column name", "literal", "keyword 'lower'"})
        finally:
            self._leave()

    def _literal(self):
        tok = self.peek()
        if tok.type in ("string", "number"):
            self.advance()
            return tok.value
        if tok.type == "keyword" and tok.value in ("true", "false", "null"):
            self.advance()
            return {"true": True, "false": False, "null": None}[tok.value]
        self.fail({"literal"})


def parse(text: str) -> ast.RaExpr:
    """Parse canonical RA text into an expression tree.

    Raises ParseError with a 1-based position on any malformed input.
    Structural rules that need a catalog (union compatibility, division
    column subsets, ...) are left to infer_schema.
    """
    parser = _Parser(tokenize(text))
    expr = parser.parse_expr()
    tok = parser.peek()
    if tok.type != "eof":
        parser.fail({"end of input"}, tok)
    return expr
