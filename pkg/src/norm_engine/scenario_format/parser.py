"""Tokenizer and parser for the scenario file format.

The format is line oriented: one statement per line, except that a line
ending in ':' (an update-function header) continues over the indented lines
that follow. '#' starts a comment. The parser never raises on malformed
input; every problem becomes a located diagnostic and parsing resumes at the
next logical line, so a single run reports as many errors as possible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .source import (ActionStmt, ActorStmt, AifStmt, CalibrateStmt, CbStmt,
                     CssmStmt, CultureStmt, Diagnostic, EdgeStmt, ERROR,
                     EvidenceStmt, ParamStmt, QuestionStmt, ScenarioSource,
                     ScenarioStmt, SrcExpr, SrcFactor, SrcNum, SrcNumAtom,
                     SrcVar, StateStmt, VariantStmt, sort_diagnostics)

_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
# ASCII only: str.isdigit also accepts code points float() cannot parse
_DIGITS = set("0123456789")
_NAME_CONT = _NAME_START | _DIGITS
_PUNCT = {"(", ")", ",", "=", ":", "*", "+", "-", "|", "@", "->"}


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "number", "string", a punctuation literal, or "eol"
    value: str | float
    line: int
    col: int

    @property
    def text(self) -> str:
        return self.value if isinstance(self.value, str) else repr(self.value)


class _Abort(Exception):
    """Internal: unwind to the logical-line boundary after a diagnostic."""


def tokenize_line(text: str, line_no: int, file: str,
                  diags: list[Diagnostic]) -> list[Token]:
    """Tokenize one physical line; malformed pieces become diagnostics."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        col = i + 1
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "#":
            break
        if ch == '"':
            i += 1
            parts: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\\" and i + 1 < n and text[i + 1] in ('"', "\\"):
                    parts.append(text[i + 1])
                    i += 2
                    continue
                if c == '"':
                    closed = True
                    i += 1
                    break
                parts.append(c)
                i += 1
            if not closed:
                diags.append(Diagnostic(ERROR, "SYNTAX", "unterminated string",
                                        line_no, col, file))
            tokens.append(Token("string", "".join(parts), line_no, col))
            continue
        if ch in _NAME_START:
            j = i + 1
            while j < n:
                if text[j] in _NAME_CONT:
                    j += 1
                # a hyphen continues a name only when a letter follows, so
                # subtraction like "t - 5" or "-25" still lexes as operators
                elif text[j] == "-" and j + 1 < n and text[j + 1] in _NAME_START:
                    j += 2
                else:
                    break
            tokens.append(Token("name", text[i:j], line_no, col))
            i = j
            continue
        if ch in _DIGITS:
            j = i + 1
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1] in _DIGITS:
                j += 2
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in _DIGITS:
                    j = k + 1
                    while j < n and text[j] in _DIGITS:
                        j += 1
            tokens.append(Token("number", float(text[i:j]), line_no, col))
            i = j
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("->", "->", line_no, col))
            i += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, line_no, col))
            i += 1
            continue
        diags.append(Diagnostic(ERROR, "SYNTAX", f"unrecognized character {ch!r}",
                                line_no, col, file))
        i += 1
    return tokens


def _logical_lines(text: str, file: str, diags: list[Diagnostic]) -> list[list[Token]]:
    lines: list[list[Token]] = []
    current: list[Token] | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            current = None  # a blank line ends any continuation
            continue
        tokens = tokenize_line(raw, line_no, file, diags)
        if not tokens:
            continue
        continuation = raw[0] in " \t"
        if continuation and current is not None:
            current.extend(tokens)
        else:
            if continuation:
                diags.append(Diagnostic(ERROR, "SYNTAX",
                                        "continuation line without a statement",
                                        line_no, tokens[0].col, file))
                continue
            current = tokens
            lines.append(current)
    return lines


class Parser:
    """Parses one logical line's token list into a statement."""

    def __init__(self, tokens: list[Token], file: str, diags: list[Diagnostic]):
        self.tokens = tokens
        self.file = file
        self.diags = diags
        self.pos = 0

    # --- cursor helpers ---

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    @property
    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("SYNTAX", "unexpected end of statement")
        self.pos += 1
        return tok

    def error(self, code: str, message: str, tok: Token | None = None):
        where = tok or self.peek() or self.tokens[-1]
        self.diags.append(Diagnostic(ERROR, code, message, where.line, where.col, self.file))
        raise _Abort()

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of statement" if tok is None else f"{tok.text!r}"
            self.error("SYNTAX", f"expected {what or kind}, found {found}")
        self.pos += 1
        return tok

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind and (value is None or tok.value == value):
            self.pos += 1
            return tok
        return None

    def expect_name(self, what: str = "a name") -> Token:
        return self.expect("name", what)

    def expect_number(self, what: str = "a number") -> float:
        sign = 1.0
        if self.accept("-"):
            sign = -1.0
        tok = self.expect("number", what)
        return sign * tok.value

    def expect_done(self):
        tok = self.peek()
        if tok is not None:
            self.error("SYNTAX", f"unexpected {tok.text!r} after statement")

    # --- shared pieces ---

    def name_list(self) -> tuple[str, ...]:
        names = [self.expect_name().value]
        while self.accept("|"):
            names.append(self.expect_name().value)
        return tuple(names)

    def mass_pair(self) -> tuple[float, float]:
        self.expect("(")
        m_true = self.expect_number("a mass value")
        self.expect(",")
        m_false = self.expect_number("a mass value")
        self.expect(")")
        return m_true, m_false

    def attrs(self, spec: dict[str, str], flags: set[str]) -> dict:
        """Parse trailing `key=value` attributes, bare flags, and one string.

        spec maps attribute names to value kinds: name, names, number, int,
        mass, params. Returns the collected values; flags map to True.
        """
        out: dict = {}
        while not self.at_end:
            tok = self.peek()
            if tok.kind == "string":
                self.advance()
                if "display" in out:
                    self.error("SYNTAX", "more than one description string", tok)
                out["display"] = tok.value
                continue
            if tok.kind != "name":
                self.error("SYNTAX", f"expected an attribute, found {tok.text!r}")
            name = tok.value
            self.advance()
            if name in flags:
                if self.peek() is not None and self.peek().kind == "=":
                    self.error("SYNTAX", f"{name} is a flag and takes no value")
                if name in out:
                    self.error("SYNTAX", f"duplicate flag {name}", tok)
                out[name] = True
                continue
            if name not in spec:
                self.error("SYNTAX", f"unknown attribute {name!r}", tok)
            if name in out:
                self.error("SYNTAX", f"duplicate attribute {name}", tok)
            self.expect("=")
            kind = spec[name]
            if kind == "name":
                out[name] = self.expect_name().value
            elif kind == "names":
                out[name] = self.name_list()
            elif kind == "number":
                out[name] = self.expect_number()
            elif kind == "int":
                value = self.expect_number()
                if value != int(value):
                    self.error("SYNTAX", f"{name} must be an integer", tok)
                out[name] = int(value)
            elif kind == "mass":
                out[name] = self.mass_pair()
            elif kind == "params":
                out[name] = self.param_decls()
            else:  # pragma: no cover - spec typo guard
                raise AssertionError(kind)
        return out

    def param_decls(self) -> tuple[ParamStmt, ...]:
        self.expect("(")
        params: list[ParamStmt] = []
        while True:
            tok = self.expect_name("a parameter name")
            self.expect(":")
            domain = self.expect_name("a parameter domain").value
            ladder = None
            if self.accept("@"):
                ladder = self.expect_name("a ladder name").value
            params.append(ParamStmt(tok.value, domain, ladder, tok.line, tok.col))
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(params)

    def key_ref(self, kind: str) -> tuple[tuple[str, ...], Token]:
        """Parse cssm(...)/cb(...) after the 'cssm'/'cb' name was consumed."""
        head = self.tokens[self.pos - 1]
        self.expect("(")
        parts = [self.expect_name().value]
        while self.accept(","):
            if kind == "cb" and self.peek() is not None and self.peek().kind == "*":
                self.advance()
                parts.append("*")
                continue
            parts.append(self.expect_name().value)
        self.expect(")")
        want = 5 if kind == "cssm" else 3
        if len(parts) != want:
            self.error("SYNTAX", f"{kind}(...) takes {want} comma-separated parts", head)
        return tuple(parts), head

    # --- expression grammar ---
    # expr   := term ('+' term)*
    # term   := factor ('*' factor)*
    # factor := 'L' '(' var ',' num ',' num ',' num ')'
    # var    := '1' | 'param' NAME | 'cssm' '(' ... ')' | 'cb' '(' ... ')'
    # num    := ['-'] atom (('+'|'-') atom)*
    # atom   := NUMBER | NAME

    def aif_expr(self) -> SrcExpr:
        terms = [self.aif_term()]
        while self.accept("+"):
            terms.append(self.aif_term())
        self.expect_done()
        return tuple(terms)

    def aif_term(self) -> tuple[SrcFactor, ...]:
        factors = [self.aif_factor()]
        while self.accept("*"):
            factors.append(self.aif_factor())
        return tuple(factors)

    def aif_factor(self) -> SrcFactor:
        tok = self.peek()
        if tok is None or tok.kind != "name" or tok.value != "L":
            found = "end of statement" if tok is None else f"{tok.text!r}"
            self.error("SYNTAX", f"expected a logistic component L(...), found {found}")
        self.advance()
        self.expect("(")
        var = self.aif_var()
        self.expect(",")
        K = self.num_expr()
        self.expect(",")
        M = self.num_expr()
        self.expect(",")
        B = self.num_expr()
        self.expect(")")
        return SrcFactor(var, K, M, B, tok.line, tok.col)

    def aif_var(self) -> SrcVar:
        tok = self.peek()
        if tok is None:
            self.error("SYNTAX", "expected a variable")
        if tok.kind == "number":
            self.advance()
            if tok.value != 1.0:
                self.error("SYNTAX", "the only literal variable is the constant 1", tok)
            return SrcVar("one", (), tok.line, tok.col)
        if tok.kind == "name" and tok.value == "param":
            self.advance()
            name = self.expect_name("a parameter name")
            return SrcVar("param", (name.value,), tok.line, tok.col)
        if tok.kind == "name" and tok.value in ("cssm", "cb"):
            self.advance()
            parts, head = self.key_ref(tok.value)
            if "*" in parts:
                self.error("SYNTAX", "wildcards are not allowed in variables", head)
            return SrcVar(tok.value, parts, tok.line, tok.col)
        self.error("SYNTAX", f"expected a variable, found {tok.text!r}")

    def num_expr(self) -> SrcNum:
        first = self.peek()
        atoms = [self.num_atom(lead=True)]
        while True:
            if self.accept("+"):
                atoms.append(self.num_atom(sign=1))
            elif self.accept("-"):
                atoms.append(self.num_atom(sign=-1))
            else:
                break
        return SrcNum(tuple(atoms), first.line, first.col)

    def num_atom(self, sign: int = 1, lead: bool = False) -> SrcNumAtom:
        if lead and self.accept("-"):
            sign = -sign
        tok = self.peek()
        if tok is None:
            self.error("SYNTAX", "expected a number or parameter name")
        if tok.kind == "number":
            self.advance()
            return SrcNumAtom(sign, tok.value, None, tok.line, tok.col)
        if tok.kind == "name":
            self.advance()
            return SrcNumAtom(sign, None, tok.value, tok.line, tok.col)
        self.error("SYNTAX", f"expected a number or parameter name, found {tok.text!r}")


def parse(text: str, file: str = "<scenario>") -> tuple[ScenarioSource | None, list[Diagnostic]]:
    """Parse scenario source text.

    Returns (source, diagnostics). source is None whenever any diagnostic is
    an error, so callers never see a partially parsed scenario.
    """
    diags: list[Diagnostic] = []
    src = ScenarioSource(file=file)
    seen_ids: dict[tuple[str, str], Token] = {}

    def check_dup(kind: str, code: str, tok: Token):
        key = (kind, tok.value)
        if key in seen_ids:
            first = seen_ids[key]
            diags.append(Diagnostic(
                ERROR, code,
                f"duplicate {kind} id {tok.value!r} (first declared at line {first.line})",
                tok.line, tok.col, file))
        else:
            seen_ids[key] = tok

    for tokens in _logical_lines(text, file, diags):
        p = Parser(tokens, file, diags)
        head = p.advance()
        try:
            if head.kind != "name":
                p.error("SYNTAX", f"expected a statement keyword, found {head.text!r}", head)
            keyword = head.value
            if keyword == "scenario":
                tok = p.expect_name("a scenario id")
                p.expect_done()
                if src.scenario is not None:
                    diags.append(Diagnostic(ERROR, "DUP_SCENARIO",
                                            "more than one scenario statement",
                                            head.line, head.col, file))
                else:
                    src.scenario = ScenarioStmt(tok.value, head.line, head.col)
            elif keyword == "variant":
                tok = p.expect_name("a variant id")
                out = p.attrs({}, {"default"})
                check_dup("variant", "DUP_VARIANT", tok)
                src.variants.append(VariantStmt(tok.value, out.get("default", False),
                                                head.line, head.col))
            elif keyword == "culture":
                tok = p.expect_name("a culture id")
                out = p.attrs({}, set())
                check_dup("culture", "DUP_CULTURE", tok)
                src.cultures.append(CultureStmt(tok.value, out.get("display"),
                                                head.line, head.col))
            elif keyword == "actor":
                tok = p.expect_name("an actor id")
                out = p.attrs({"kind": "name", "size": "int", "cultures": "names",
                               "only": "names"}, set())
                check_dup("actor", "DUP_ACTOR", tok)
                kind = out.get("kind", "individual")
                if kind not in ("individual", "group"):
                    p.error("SYNTAX", f"actor kind must be individual or group, got {kind!r}", tok)
                size = out.get("size", 100 if kind == "group" else 1)
                src.actors.append(ActorStmt(tok.value, kind, size,
                                            out.get("cultures", ()), out.get("only", ()),
                                            out.get("display"), head.line, head.col))
            elif keyword == "question":
                tok = p.expect_name("a question id")
                text_tok = p.expect("string", "the question text")
                p.expect_done()
                check_dup("question", "DUP_QUESTION", tok)
                src.questions.append(QuestionStmt(tok.value, text_tok.value,
                                                  head.line, head.col))
            elif keyword == "action":
                tok = p.expect_name("an action id")
                out = p.attrs({"performer": "name", "params": "params"}, {"terminal"})
                check_dup("action", "DUP_ACTION", tok)
                if "performer" not in out:
                    p.error("SYNTAX", "action needs performer=<actor>", tok)
                src.actions.append(ActionStmt(tok.value, out["performer"],
                                              out.get("params", ()),
                                              out.get("terminal", False),
                                              out.get("display"), head.line, head.col))
            elif keyword == "state":
                tok = p.expect_name("a state id")
                out = p.attrs({}, {"start", "terminal", "unverified"})
                check_dup("state", "DUP_STATE", tok)
                src.states.append(StateStmt(tok.value, out.get("start", False),
                                            out.get("terminal", False),
                                            not out.get("unverified", False),
                                            head.line, head.col))
            elif keyword == "edge":
                state = p.expect_name("a state id")
                actor = p.expect_name("an actor id")
                action = p.expect_name("an action id")
                p.expect("->", "'->'")
                succ = p.expect_name("a successor state id")
                out = p.attrs({}, {"unverified"})
                src.edges.append(EdgeStmt(state.value, actor.value, action.value,
                                          succ.value, not out.get("unverified", False),
                                          head.line, head.col))
            elif keyword == "cssm":
                culture = p.expect_name("a culture id")
                metric = p.expect_name("a metric name")
                subject = p.expect_name("the subject actor")
                perspective = p.expect_name("the perspective actor")
                estimator = p.expect_name("the estimator actor")
                out = p.attrs({"scale": "name", "init": "number", "only": "names"}, set())
                if "scale" not in out or "init" not in out:
                    p.error("SYNTAX", "cssm needs scale= and init=", culture)
                src.cssms.append(CssmStmt(culture.value, metric.value, subject.value,
                                          perspective.value, estimator.value,
                                          out["scale"], out["init"], out.get("only", ()),
                                          head.line, head.col))
            elif keyword == "cb":
                belief = p.expect_name("a question id")
                perspective = p.expect_name("the perspective actor")
                estimator = p.expect_name("the estimator actor")
                out = p.attrs({"init": "mass", "only": "names"}, {"frozen"})
                if "init" not in out:
                    p.error("SYNTAX", "cb needs init=(m_true, m_false)", belief)
                m_true, m_false = out["init"]
                src.cbs.append(CbStmt(belief.value, perspective.value, estimator.value,
                                      m_true, m_false, out.get("frozen", False),
                                      out.get("only", ()), head.line, head.col))
            elif keyword == "aif":
                on_tok = p.expect_name("'on'")
                if on_tok.value != "on":
                    p.error("SYNTAX", "aif starts with: aif on <action>", on_tok)
                action = p.expect_name("an action id")
                target_kw = p.expect_name("target=cssm(...)")
                if target_kw.value != "target":
                    p.error("SYNTAX", "expected target=cssm(...)", target_kw)
                p.expect("=")
                kind_tok = p.expect_name("cssm(...)")
                if kind_tok.value != "cssm":
                    p.error("SYNTAX", "an update function targets a cssm(...) key", kind_tok)
                parts, _ = p.key_ref("cssm")
                mode = "replace"
                calibrated = False
                only: tuple[str, ...] = ()
                # remaining header attributes up to the ':' that opens the body
                while p.peek() is not None and p.peek().kind != ":":
                    attr = p.expect_name("an attribute")
                    if attr.value == "mode":
                        p.expect("=")
                        mode_tok = p.expect_name("delta or replace")
                        mode = mode_tok.value
                        if mode not in ("delta", "replace"):
                            p.error("SYNTAX", "mode is delta or replace", mode_tok)
                    elif attr.value == "only":
                        p.expect("=")
                        only = p.name_list()
                    elif attr.value == "calibrated":
                        calibrated = True
                    elif attr.value == "unverified":
                        pass  # tolerated on any declaration, meaningful on edges/states
                    else:
                        p.error("SYNTAX", f"unknown attribute {attr.value!r}", attr)
                p.expect(":", "':' before the expression")
                expr = p.aif_expr()
                src.aifs.append(AifStmt(action.value, tuple(parts), mode, expr,
                                        calibrated, only, head.line, head.col,
                                        kind_tok.line, kind_tok.col))
            elif keyword == "evidence":
                on_tok = p.expect_name("'on'")
                if on_tok.value != "on":
                    p.error("SYNTAX", "evidence starts with: evidence on <action>", on_tok)
                action = p.expect_name("an action id")
                target_kw = p.expect_name("target=cb(...)")
                if target_kw.value != "target":
                    p.error("SYNTAX", "expected target=cb(...)", target_kw)
                p.expect("=")
                kind_tok = p.expect_name("cb(...)")
                if kind_tok.value != "cb":
                    p.error("SYNTAX", "evidence targets a cb(...) key", kind_tok)
                parts, _ = p.key_ref("cb")
                out = p.attrs({"mass": "mass", "only": "names"},
                              {"per_second", "calibrated"})
                if "mass" not in out:
                    p.error("SYNTAX", "evidence needs mass=(m_true, m_false)", kind_tok)
                m_true, m_false = out["mass"]
                src.evidence.append(EvidenceStmt(action.value, parts[0], parts[1], parts[2],
                                                 m_true, m_false,
                                                 out.get("per_second", False),
                                                 out.get("calibrated", False),
                                                 out.get("only", ()), head.line, head.col,
                                                 kind_tok.line, kind_tok.col))
            elif keyword == "calibrate":
                ladder = p.expect_name("a ladder name")
                value = p.expect_number("a grid value")
                word = p.expect("string", "the keyword")
                p.expect_done()
                key = ("calibration", f"{ladder.value}:{value}")
                if key in seen_ids:
                    diags.append(Diagnostic(ERROR, "DUP_CALIBRATION",
                                            f"duplicate calibration for {ladder.value} at {value:g}",
                                            head.line, head.col, file))
                else:
                    seen_ids[key] = ladder
                src.calibrations.append(CalibrateStmt(ladder.value, value, word.value,
                                                      head.line, head.col))
            else:
                p.error("SYNTAX", f"unknown statement {keyword!r}", head)
        except _Abort:
            continue
    diags = sort_diagnostics(diags)
    if any(d.severity == ERROR for d in diags):
        return None, diags
    return src, diags
