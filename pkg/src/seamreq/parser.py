"""Recursive-descent parser for ``.sreq`` sources.

Grammar sketch (Eiffel subset)::

    unit     := class*
    class    := [note entry*] [deferred | frozen] class NAME [inherit NAME]
                (feature feature_decl*)* end
    routine  := NAME [(params)] [: TYPE] comment* [require clause*]
                (do stmt* | deferred) [ensure clause*] end
    clause   := modify (NAME, ...) | [LABEL :] expr

Assertion clauses are separated by newlines.  A clause may span several
lines; a line starting with ``+`` or ``-`` outside parentheses begins a new
clause.  Operator precedence, loosest first: ``implies`` (right-assoc),
``or``, ``and``, comparisons, ``+``/``-``, then the prefix operators ``not``,
unary ``-`` and ``old``.
"""

from __future__ import annotations

from . import syntax as S
from .lexer import Token, lex
from .syntax import Location

CMP_OPS = ("=", "/=", "<", "<=", ">", ">=")
_ROUTINE_START = ("require", "do", "ensure", "deferred")
_CLAUSE_END = ("do", "ensure", "end", "deferred", "require", "feature", "eof")
_STMT_END = ("end", "else", "elseif", "ensure", "eof")


class ParseError(Exception):
    def __init__(self, expected: str, found: Token, loc: Location):
        found_text = "end of input" if found.kind == "eof" else repr(found.text)
        super().__init__(f"{loc}: expected {expected}, found {found_text}")
        self.code = "SyntaxError"
        self.expected = expected
        self.found = found.text
        self.loc = loc
        self.message = f"expected {expected}, found {found_text}"


def _join_comments(tokens) -> str:
    return " ".join(" ".join(t.text.split()) for t in tokens if t.text.strip())


class Parser:
    def __init__(self, tokens: list[Token], path: str = "<input>"):
        last_line = tokens[-1].line + 1 if tokens else 1
        self.toks = list(tokens) + [Token("eof", "", last_line, 1)]
        self.path = path
        self.i = 0
        self.pending: list[Token] = []
        self.trivia: list[str] = []
        self.last: Token | None = None
        self.depth = 0
        self.clause_mode = False

    # -- token plumbing ------------------------------------------------------

    def _skip_comments(self):
        while self.toks[self.i].kind == "comment":
            self.pending.append(self.toks[self.i])
            self.i += 1

    def peek(self, k: int = 0) -> Token:
        self._skip_comments()
        j = self.i
        while True:
            if self.toks[j].kind != "comment":
                if k == 0:
                    return self.toks[j]
                k -= 1
            j += 1

    def advance(self) -> Token:
        self._skip_comments()
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        self.last = tok
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(what or repr(kind), tok, self.loc(tok))
        return self.advance()

    def loc(self, tok: Token) -> Location:
        return Location(self.path, tok.line, tok.column)

    def take_comments(self) -> list[Token]:
        self._skip_comments()
        out, self.pending = self.pending, []
        return out

    def flush_trivia(self):
        self.trivia.extend(t.text for t in self.take_comments())

    # -- classes -------------------------------------------------------------

    def parse_unit(self) -> list[S.ClassDecl]:
        classes = []
        while not self.at("eof"):
            classes.append(self.parse_class())
        self.flush_trivia()
        return classes

    def parse_class(self) -> S.ClassDecl:
        self.trivia = []
        notes = []
        if self.at("note"):
            self.advance()
            while self.at("ident"):
                key = self.advance().text
                self.expect(":", "':' in note entry")
                values = [self.advance().text]
                while self.at(","):
                    self.advance()
                    values.append(self.advance().text)
                notes.append((key, ", ".join(values)))
        self.flush_trivia()
        deferred = frozen = False
        if self.at("deferred"):
            self.advance()
            deferred = True
        elif self.at("frozen"):
            self.advance()
            frozen = True
        start = self.expect("class", "'class'")
        name = self.expect("ident", "class name").text
        description = _join_comments(self.take_comments())
        parent = None
        parent_loc = S.NOWHERE
        if self.at("inherit"):
            self.advance()
            tok = self.expect("ident", "parent class name")
            parent, parent_loc = tok.text, self.loc(tok)
            description = " ".join(filter(None, [description, _join_comments(self.take_comments())]))
        features = []
        first_header = ""
        while self.at("feature"):
            self.advance()
            header = _join_comments(self.take_comments())
            first_header = first_header or header
            while not self.at("feature", "end", "eof"):
                features.extend(self.parse_feature(header))
        self.expect("end", "'feature' or 'end'")
        # comments trailing the final 'end' on its own line
        self._skip_comments()
        return S.ClassDecl(
            name=name,
            deferred=deferred,
            frozen=frozen,
            parent=parent,
            notes=tuple(notes),
            description=description,
            header=first_header,
            features=tuple(features),
            loc=self.loc(start),
            parent_loc=parent_loc,
            trivia=tuple(self.trivia + [t.text for t in self.take_comments()]),
        )

    def parse_feature(self, header: str):
        self.flush_trivia()
        first = self.expect("ident", "feature name")
        names = [first]
        while self.at(","):
            self.advance()
            names.append(self.expect("ident", "feature name"))
        if len(names) > 1:
            self.expect(":", "':' after attribute names")
            typ = self.expect("ident", "type name").text
            return [S.AttributeDecl(tuple(t.text for t in names), typ, header, self.loc(first))]
        params: list[S.Param] = []
        has_params = False
        if self.at("("):
            has_params = True
            params = self.parse_params()
        result_type = None
        if self.at(":"):
            self.advance()
            result_type = self.expect("ident", "type name").text
            if not has_params and not self.at(*_ROUTINE_START):
                return [S.AttributeDecl((first.text,), result_type, header, self.loc(first))]
        return [self.parse_routine(first, tuple(params), result_type, header)]

    def parse_params(self) -> list[S.Param]:
        self.expect("(")
        params = []
        while True:
            group = [self.expect("ident", "argument name")]
            while self.at(","):
                self.advance()
                group.append(self.expect("ident", "argument name"))
            self.expect(":", "':' after argument names")
            typ = self.expect("ident", "type name").text
            params.extend(S.Param(t.text, typ, self.loc(t)) for t in group)
            if self.at(";"):
                self.advance()
                continue
            break
        self.expect(")", "')' or ';'")
        return params

    def parse_routine(self, name_tok, params, result_type, header) -> S.RoutineDecl:
        routine_trivia_start = len(self.trivia)
        # only comments on lines after the signature form the routine comment
        comment_toks = self.take_comments()
        same_line = [t for t in comment_toks if self.last and t.line == self.last.line]
        self.trivia.extend(t.text for t in same_line)
        comment = _join_comments([t for t in comment_toks if t not in same_line])
        require: list = []
        if self.at("require"):
            self.advance()
            require = self.parse_clauses()
        body: tuple | None = ()
        deferred = False
        if self.at("deferred"):
            self.advance()
            body = None
            deferred = True
        elif self.at("do"):
            self.advance()
            body_start = len(self.trivia)
            stmts = self.parse_stmts()
            self.flush_trivia()
            hidden = any("hidden implementation" in c.lower() for c in self.trivia[body_start:])
            body = None if (not stmts and hidden) else tuple(stmts)
        else:
            body = None
        ensure: list = []
        if self.at("ensure"):
            self.advance()
            ensure = self.parse_clauses()
        self.expect("end", "'end' of routine")
        return S.RoutineDecl(
            name=name_tok.text,
            params=params,
            result_type=result_type,
            comment=comment,
            header=header,
            require=tuple(require),
            body=body,
            ensure=tuple(ensure),
            deferred=deferred,
            loc=self.loc(name_tok),
            trivia=tuple(self.trivia[routine_trivia_start:]),
        )

    # -- clauses and statements ---------------------------------------------

    def parse_clauses(self) -> list:
        clauses = []
        while not self.at(*_CLAUSE_END):
            self.flush_trivia()
            tok = self.peek()
            if tok.kind == "modify":
                self.advance()
                self.expect("(", "'(' after modify")
                names = [self.expect("ident", "object name").text]
                while self.at(","):
                    self.advance()
                    names.append(self.expect("ident", "object name").text)
                self.expect(")")
                clauses.append(S.ModifyClause(tuple(names), self.loc(tok)))
                continue
            label = None
            if tok.kind == "ident" and self.peek(1).kind == ":":
                label = self.advance().text
                self.advance()
            expr = self.parse_clause_expr()
            clauses.append(S.Clause(expr, label, self.loc(tok)))
        self.flush_trivia()
        return clauses

    def parse_clause_expr(self):
        saved = self.clause_mode, self.depth
        self.clause_mode, self.depth = True, 0
        try:
            return self.parse_expr()
        finally:
            self.clause_mode, self.depth = saved

    def parse_stmts(self) -> list:
        stmts = []
        while not self.at(*_STMT_END):
            self.flush_trivia()
            if self.at(";"):
                self.advance()
                continue
            stmts.append(self.parse_stmt())
        return stmts

    def parse_stmt(self):
        tok = self.peek()
        if tok.kind == "if":
            self.advance()
            branches = []
            cond = self.parse_expr()
            self.expect("then", "'then'")
            branches.append((cond, tuple(self.parse_stmts())))
            while self.at("elseif"):
                self.advance()
                cond = self.parse_expr()
                self.expect("then", "'then'")
                branches.append((cond, tuple(self.parse_stmts())))
            else_body = None
            if self.at("else"):
                self.advance()
                else_body = tuple(self.parse_stmts())
            self.expect("end", "'end' of if")
            return S.IfStmt(tuple(branches), else_body, self.loc(tok))
        if tok.kind == "check":
            self.advance()
            clauses = self.parse_clauses()
            self.expect("end", "'end' of check")
            return S.CheckStmt(tuple(clauses), self.loc(tok))
        if tok.kind in ("ident", "Result") and self.peek(1).kind == ":=":
            self.advance()
            self.advance()
            value = self.parse_clause_expr()
            return S.AssignStmt(tok.text, value, self.loc(tok))
        expr = self.parse_postfix()
        if not isinstance(expr, S.Access):
            raise ParseError("instruction", tok, self.loc(tok))
        return S.CallStmt(expr, self.loc(tok))

    # -- expressions ---------------------------------------------------------

    def parse_expr(self):
        return self.parse_implies()

    def parse_implies(self):
        left = self.parse_or()
        if self.at("implies"):
            tok = self.advance()
            right = self.parse_implies()
            return S.Binary("implies", left, right, self.loc(tok))
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.at("or"):
            tok = self.advance()
            left = S.Binary("or", left, self.parse_and(), self.loc(tok))
        return left

    def parse_and(self):
        left = self.parse_cmp()
        while self.at("and"):
            tok = self.advance()
            left = S.Binary("and", left, self.parse_cmp(), self.loc(tok))
        return left

    def parse_cmp(self):
        left = self.parse_add()
        if self.at(*CMP_OPS):
            tok = self.advance()
            left = S.Binary(tok.kind, left, self.parse_add(), self.loc(tok))
        return left

    def _new_line_here(self) -> bool:
        tok = self.peek()
        return self.last is not None and tok.line > self.last.line

    def parse_add(self):
        left = self.parse_unary()
        while self.at("+", "-"):
            if self.clause_mode and self.depth == 0 and self._new_line_here():
                break
            tok = self.advance()
            left = S.Binary(tok.kind, left, self.parse_unary(), self.loc(tok))
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok.kind in ("not", "-"):
            self.advance()
            return S.Unary(tok.kind, self.parse_unary(), self.loc(tok))
        if tok.kind == "old":
            self.advance()
            return S.Old(self.parse_unary(), self.loc(tok))
        return self.parse_postfix()

    def parse_postfix(self):
        expr = self.parse_primary()
        while self.at("."):
            self.advance()
            name = self.expect("ident", "feature name")
            args = self.parse_args()
            expr = S.Access(expr, name.text, args, self.loc(name))
        return expr

    def parse_args(self):
        if not self.at("(") or self._new_line_here():
            return None
        self.advance()
        self.depth += 1
        args = [self.parse_expr()]
        while self.at(","):
            self.advance()
            args.append(self.parse_expr())
        self.expect(")", "')' or ','")
        self.depth -= 1
        return tuple(args)

    def parse_primary(self):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return S.IntLit(int(tok.text), self.loc(tok))
        if tok.kind in ("true", "false"):
            self.advance()
            return S.BoolLit(tok.kind == "true", self.loc(tok))
        if tok.kind == "Result":
            self.advance()
            return S.ResultRef(self.loc(tok))
        if tok.kind == "Current":
            self.advance()
            return S.CurrentRef(self.loc(tok))
        if tok.kind == "ident":
            self.advance()
            return S.Access(None, tok.text, self.parse_args(), self.loc(tok))
        if tok.kind == "(":
            self.advance()
            self.depth += 1
            expr = self.parse_expr()
            self.expect(")", "')'")
            self.depth -= 1
            return expr
        raise ParseError("expression", tok, self.loc(tok))


def parse_unit(text: str, path: str = "<input>") -> list[S.ClassDecl]:
    """Parse every class of a source unit."""
    return Parser(lex(text, path), path).parse_unit()


def parse_class(tokens: list[Token], path: str = "<input>") -> S.ClassDecl:
    """Parse exactly one class from a token sequence."""
    p = Parser(tokens, path)
    cls = p.parse_class()
    if not p.at("eof"):
        tok = p.peek()
        raise ParseError("end of input", tok, p.loc(tok))
    return cls


def extract_comment(decl) -> str:
    """Natural-language comment of a routine or class declaration.

    For a routine this is the comment right after its signature; for a class
    it is the feature-clause header (e.g. ``A clock tick:``).
    """
    if isinstance(decl, S.ClassDecl):
        return decl.header
    return decl.comment


def requirement_text(routine: S.RoutineDecl) -> str:
    """Header and routine comment joined into one sentence."""
    head = routine.header.rstrip().rstrip(":").strip()
    if not head:
        return routine.comment
    if not routine.comment:
        return routine.header
    return f"{head} {routine.comment}"
