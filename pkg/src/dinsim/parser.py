"""Parser and printer for the supported rule-language subset.

Grammar (one declaration per line, ``//`` comments, whitespace-insensitive
between tokens):

    %agent: Name(site{state ...}, ...)
    'rule name' side -> side @ rate
    %init: count side
    %obs: 'name' [coeff] |side| + [coeff] |side| ...

A side is a comma-separated list of agents ``Name(site ...)`` or ``.``
placeholders (rule sides only: a left ``.`` means the right agent at that
position is created, a right ``.`` means deletion). A site carries an
optional ``{state}`` and an optional link ``[.]`` (free), ``[n]`` (bond n),
``[_]`` (bound to anything) or ``[#]`` (don't care); both default to
"don't care" in patterns. In ``%init`` expressions omitted links are free
and omitted states take the first declared state.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    LINK_ANY,
    LINK_BOUND_ANY,
    LINK_FREE,
    AgentPattern,
    AgentSignature,
    InitDecl,
    Model,
    Observable,
    ObsTerm,
    Pattern,
    Rule,
    SitePattern,
    SiteSignature,
)
from .symmetry import rule_symmetry

CATEGORIES = (
    "syntax",
    "unknown-agent",
    "unknown-site",
    "unknown-state",
    "dangling-bond",
    "duplicate-name",
    "negative-rate",
    "underspecified-init",
)


class ParseError(Exception):
    """Model-file rejection with position, offending token and category."""

    def __init__(self, message: str, line: int, col: int, token: str = "", category: str = "syntax"):
        assert category in CATEGORIES
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.token = token
        self.category = category


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//.*)
  | (?P<decl>%agent:|%init:|%obs:)
  | (?P<qname>'[^']*')
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<sym>[(){}\[\],.@+|#_*-])
    """,
    re.VERBOSE,
)


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1, line[pos])
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), lineno, pos + 1))  # type: ignore[arg-type]
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], lineno: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            col = (last.col + len(last.value)) if last else 1
            raise ParseError("unexpected end of line", self.lineno, col)
        self.i += 1
        return t

    def expect(self, value: str) -> _Tok:
        t = self.next()
        if t.value != value:
            raise ParseError(f"expected {value!r}, got {t.value!r}", t.line, t.col, t.value)
        return t

    def at(self, value: str) -> bool:
        t = self.peek()
        return t is not None and t.value == value

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def fail(self, message: str, category: str = "syntax") -> ParseError:
        t = self.peek() or (self.toks[-1] if self.toks else None)
        if t is None:
            return ParseError(message, self.lineno, 1, "", category)
        return ParseError(message, t.line, t.col, t.value, category)


def _parse_site(cur: _Cursor, free_default: bool = False) -> SitePattern:
    name = cur.next()
    if name.kind != "name":
        raise ParseError(f"expected site name, got {name.value!r}", name.line, name.col, name.value)
    internal: str | None = None
    # In %init expressions an omitted link means "free"; explicit [#]/[_]
    # survive so validation can reject them as underspecified.
    link: int | str = LINK_FREE if free_default else LINK_ANY
    seen_state = seen_link = False
    while cur.at("{") or cur.at("["):
        if cur.at("{"):
            if seen_state:
                raise cur.fail("duplicate internal state on site")
            seen_state = True
            cur.expect("{")
            st = cur.next()
            if st.kind not in ("name", "number") or "." in st.value or "e" in st.value or "E" in st.value:
                raise ParseError(f"expected state name, got {st.value!r}", st.line, st.col, st.value)
            internal = st.value
            cur.expect("}")
        else:
            if seen_link:
                raise cur.fail("duplicate link state on site")
            seen_link = True
            cur.expect("[")
            t = cur.next()
            if t.value == ".":
                link = LINK_FREE
            elif t.value == "_":
                link = LINK_BOUND_ANY
            elif t.value == "#":
                link = LINK_ANY
            elif t.kind == "number" and t.value.isdigit():
                link = int(t.value)
            else:
                raise ParseError(f"expected link state, got {t.value!r}", t.line, t.col, t.value)
            cur.expect("]")
    return SitePattern(name.value, internal, link)


def _parse_agent(cur: _Cursor, free_default: bool = False) -> AgentPattern:
    name = cur.next()
    if name.kind != "name":
        raise ParseError(f"expected agent name, got {name.value!r}", name.line, name.col, name.value)
    cur.expect("(")
    sites = []
    while not cur.at(")"):
        sites.append(_parse_site(cur, free_default))
        if cur.at(","):
            cur.next()
    cur.expect(")")
    return AgentPattern(name.value, tuple(sites))


def _parse_side(
    cur: _Cursor, stop: tuple[str, ...], allow_placeholder: bool, free_default: bool = False
) -> Pattern:
    agents: list[AgentPattern | None] = []
    while True:
        if cur.at("."):
            if not allow_placeholder:
                raise cur.fail("placeholder '.' not allowed here")
            cur.next()
            agents.append(None)
        else:
            agents.append(_parse_agent(cur, free_default))
        t = cur.peek()
        if t is not None and t.value == ",":
            cur.next()
            continue
        if t is None or t.value in stop:
            break
    return Pattern(tuple(agents))


def _parse_number(cur: _Cursor) -> tuple[float, _Tok, bool]:
    """Returns (value, first token, negated)."""
    neg = False
    first = cur.peek()
    if cur.at("-"):
        neg = True
        cur.next()
    t = cur.next()
    if t.kind != "number":
        raise ParseError(f"expected number, got {t.value!r}", t.line, t.col, t.value)
    v = float(t.value)
    return (-v if neg else v), first or t, neg


def parse_model(source: str) -> Model:
    """Parse and validate model text; raises :class:`ParseError` on rejection."""
    model = _parse(source)
    _validate(model)
    rules = tuple(Rule(r.name, r.lhs, r.rhs, r.rate, rule_symmetry(r)) for r in model.rules)
    return Model(model.signatures, rules, model.init, model.observables)


def _parse(source: str) -> Model:
    signatures: list[AgentSignature] = []
    rules: list[Rule] = []
    init: list[InitDecl] = []
    observables: list[Observable] = []

    for lineno, line in enumerate(source.splitlines(), start=1):
        toks = _tokenize(line, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno)
        head = toks[0]
        if head.value == "%agent:":
            cur.next()
            signatures.append(_parse_signature(cur))
        elif head.value == "%init:":
            cur.next()
            t = cur.next()
            if t.kind != "number" or not t.value.isdigit():
                raise ParseError(f"expected nonnegative integer count, got {t.value!r}", t.line, t.col, t.value)
            pat = _parse_side(cur, stop=(), allow_placeholder=False, free_default=True)
            init.append(InitDecl(int(t.value), pat))
        elif head.value == "%obs:":
            cur.next()
            observables.append(_parse_obs(cur))
        elif head.kind == "qname":
            rules.append(_parse_rule(cur))
        else:
            raise ParseError(f"expected declaration, got {head.value!r}", head.line, head.col, head.value)
        if not cur.done():
            t = cur.peek()
            assert t is not None
            raise ParseError(f"trailing input {t.value!r}", t.line, t.col, t.value)

    return Model(tuple(signatures), tuple(rules), tuple(init), tuple(observables))


def _parse_signature(cur: _Cursor) -> AgentSignature:
    name = cur.next()
    if name.kind != "name":
        raise ParseError(f"expected agent name, got {name.value!r}", name.line, name.col, name.value)
    cur.expect("(")
    sites = []
    while not cur.at(")"):
        sname = cur.next()
        if sname.kind != "name":
            raise ParseError(f"expected site name, got {sname.value!r}", sname.line, sname.col, sname.value)
        states: list[str] = []
        if cur.at("{"):
            cur.next()
            while not cur.at("}"):
                st = cur.next()
                if st.kind not in ("name", "number") or not re.fullmatch(r"[A-Za-z0-9_]+", st.value):
                    raise ParseError(f"expected state name, got {st.value!r}", st.line, st.col, st.value)
                states.append(st.value)
                if cur.at(","):
                    cur.next()
            cur.expect("}")
        sites.append(SiteSignature(sname.value, tuple(states)))
        if cur.at(","):
            cur.next()
    cur.expect(")")
    return AgentSignature(name.value, tuple(sites))


def _parse_rule(cur: _Cursor) -> Rule:
    name = cur.next()
    lhs = _parse_side(cur, stop=("->",), allow_placeholder=True)
    cur.expect("->")
    rhs = _parse_side(cur, stop=("@",), allow_placeholder=True)
    cur.expect("@")
    rate, tok, neg = _parse_number(cur)
    if neg:
        raise ParseError(f"rule rate must be nonnegative, got {rate}", tok.line, tok.col, tok.value, "negative-rate")
    return Rule(name.value[1:-1], lhs, rhs, rate)


def _parse_obs(cur: _Cursor) -> Observable:
    name = cur.next()
    if name.kind != "qname":
        raise ParseError(f"expected quoted observable name, got {name.value!r}", name.line, name.col, name.value)
    terms = []
    bare = True
    while True:
        coeff = 1.0
        if not cur.at("|"):
            bare = False
            coeff, _, _ = _parse_number(cur)
            if cur.at("*"):
                cur.next()
        cur.expect("|")
        pat = _parse_side(cur, stop=("|",), allow_placeholder=False)
        cur.expect("|")
        terms.append(ObsTerm(coeff, pat))
        if cur.at("+"):
            cur.next()
            continue
        break
    is_count = bare and len(terms) == 1
    return Observable(name.value[1:-1], tuple(terms), is_count)


# --- validation -------------------------------------------------------------

_LEGAL_LINK_CHANGES = {
    (LINK_ANY, LINK_ANY),
    (LINK_FREE, LINK_FREE),
    (LINK_BOUND_ANY, LINK_BOUND_ANY),
    ("bond", "bond"),
    (LINK_FREE, "bond"),
    ("bond", LINK_FREE),
}


def _err(message: str, category: str) -> ParseError:
    # Validation runs on the built tree; positions point at the declaration.
    return ParseError(message, 0, 0, "", category)


def _check_pattern(pat: Pattern, sigs: dict[str, AgentSignature], where: str) -> None:
    labels: dict[int, int] = {}
    for ag in pat.agents:
        if ag is None:
            continue
        sig = sigs.get(ag.name)
        if sig is None:
            raise _err(f"unknown agent {ag.name!r} in {where}", "unknown-agent")
        seen = set()
        for sp in ag.sites:
            ssig = sig.site_named(sp.site)
            if ssig is None:
                raise _err(f"unknown site {ag.name}.{sp.site} in {where}", "unknown-site")
            if sp.site in seen:
                raise _err(f"site {ag.name}.{sp.site} mentioned twice in {where}", "duplicate-name")
            seen.add(sp.site)
            if sp.internal is not None and sp.internal not in ssig.states:
                raise _err(
                    f"unknown state {sp.internal!r} for {ag.name}.{sp.site} in {where}", "unknown-state"
                )
            if isinstance(sp.link, int):
                labels[sp.link] = labels.get(sp.link, 0) + 1
    for label, n in labels.items():
        if n != 2:
            raise _err(f"bond label {label} appears {n} time(s) in {where}", "dangling-bond")


def _check_rule(rule: Rule, sigs: dict[str, AgentSignature]) -> None:
    where = f"rule {rule.name!r}"
    _check_pattern(rule.lhs, sigs, where)
    _check_pattern(rule.rhs, sigs, where)
    if len(rule.lhs.agents) != len(rule.rhs.agents):
        raise _err(f"{where}: sides have different agent counts", "syntax")
    for i, (la, ra) in enumerate(zip(rule.lhs.agents, rule.rhs.agents)):
        if la is None and ra is None:
            raise _err(f"{where}: position {i} is a placeholder on both sides", "syntax")
        if la is None:
            _check_created(ra, i, where, sigs)
            continue
        if ra is None:
            continue  # deletion: any valid left pattern is fine
        if la.name != ra.name:
            raise _err(f"{where}: position {i} changes agent type {la.name} -> {ra.name}", "syntax")
        lsites = {sp.site: sp for sp in la.sites}
        rsites = {sp.site: sp for sp in ra.sites}
        if set(lsites) != set(rsites):
            raise _err(f"{where}: position {i} mentions different sites on each side", "syntax")
        for sname, ls in lsites.items():
            rs = rsites[sname]
            if ls.internal is not None and rs.internal is None:
                raise _err(f"{where}: {la.name}.{sname} drops its state on the right side", "syntax")
            lkind = "bond" if isinstance(ls.link, int) else ls.link
            rkind = "bond" if isinstance(rs.link, int) else rs.link
            if (lkind, rkind) not in _LEGAL_LINK_CHANGES:
                raise _err(f"{where}: unsupported link change on {la.name}.{sname}", "syntax")


def _check_created(ag: AgentPattern, pos: int, where: str, sigs: dict[str, AgentSignature]) -> None:
    for sp in ag.sites:
        if sp.link in (LINK_ANY, LINK_BOUND_ANY):
            raise _err(
                f"{where}: created agent at position {pos} has an unspecified link on {sp.site}", "syntax"
            )


def _check_init(decl: InitDecl, sigs: dict[str, AgentSignature]) -> None:
    _check_pattern(decl.pattern, sigs, "%init")
    for ag in decl.pattern.agents:
        assert ag is not None
        for sp in ag.sites:
            if sp.link in (LINK_ANY, LINK_BOUND_ANY):
                raise _err(
                    f"%init: link of {ag.name}.{sp.site} must be free or a bond", "underspecified-init"
                )


def _validate(model: Model) -> None:
    sigs: dict[str, AgentSignature] = {}
    for sig in model.signatures:
        if sig.name in sigs:
            raise _err(f"agent {sig.name!r} declared twice", "duplicate-name")
        sigs[sig.name] = sig
        seen_sites = set()
        for s in sig.sites:
            if s.name in seen_sites:
                raise _err(f"site {sig.name}.{s.name} declared twice", "duplicate-name")
            seen_sites.add(s.name)
            if len(set(s.states)) != len(s.states):
                raise _err(f"duplicate state on {sig.name}.{s.name}", "duplicate-name")
    rule_names = set()
    for rule in model.rules:
        if rule.name in rule_names:
            raise _err(f"rule {rule.name!r} declared twice", "duplicate-name")
        rule_names.add(rule.name)
        _check_rule(rule, sigs)
    for decl in model.init:
        _check_init(decl, sigs)
    obs_names = set()
    for obs in model.observables:
        if obs.name in obs_names:
            raise _err(f"observable {obs.name!r} declared twice", "duplicate-name")
        obs_names.add(obs.name)
        for term in obs.terms:
            _check_pattern(term.pattern, sigs, f"observable {obs.name!r}")


# --- printing ---------------------------------------------------------------


def _format_site(sp: SitePattern) -> str:
    out = sp.site
    if sp.internal is not None:
        out += "{" + sp.internal + "}"
    if sp.link != LINK_ANY:
        out += f"[{sp.link}]"
    return out


def _format_agent(ag: AgentPattern | None) -> str:
    if ag is None:
        return "."
    return f"{ag.name}({', '.join(_format_site(s) for s in ag.sites)})"


def format_pattern(pat: Pattern) -> str:
    return ", ".join(_format_agent(a) for a in pat.agents)


def _format_number(x: float) -> str:
    return repr(float(x))


def format_model(model: Model) -> str:
    """Canonical text that re-parses to a structurally equal model."""
    lines = []
    for sig in model.signatures:
        sites = []
        for s in sig.sites:
            sites.append(s.name + ("{" + " ".join(s.states) + "}" if s.states else ""))
        lines.append(f"%agent: {sig.name}({', '.join(sites)})")
    for rule in model.rules:
        lines.append(
            f"'{rule.name}' {format_pattern(rule.lhs)} -> {format_pattern(rule.rhs)}"
            f" @ {_format_number(rule.rate)}"
        )
    for decl in model.init:
        lines.append(f"%init: {decl.count} {format_pattern(decl.pattern)}")
    for obs in model.observables:
        if obs.is_count:
            body = f"|{format_pattern(obs.terms[0].pattern)}|"
        else:
            body = " + ".join(
                f"{_format_number(t.coeff)} |{format_pattern(t.pattern)}|" for t in obs.terms
            )
        lines.append(f"%obs: '{obs.name}' {body}")
    return "\n".join(lines) + "\n"
