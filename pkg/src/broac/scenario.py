"""Line-oriented scenario files: world construction plus queries.

One directive per line, ``#`` starts a comment, double quotes group words::

    type Transcript extends TextDocument item_abilities="view Transcript.grade"
    agent alice
    collection students type=Group
    item t1 type=Transcript creator=alice
    member students alice
    enable students alice false as=alice
    permit group:students item:t1 "view TextDocument.body" deny
    permit-global all "create Collection" allow
    check alice t1 "view TextDocument.body" expect=allow level=1
    filter alice "view Item.name"
    explain alice t1 "view TextDocument.body"
    lint alice t1 "view TextDocument.body"

Mutations without ``as=`` run as the system; with ``as=AGENT`` the metalevel
guards apply to that agent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import BroacError, ScenarioSyntaxError
from .resolver import CLOSED_WORLD, GLOBAL_OVERRIDE, Decision, LoopholeReport
from .store import ALL_SPEC, ONE, SOME, Permission, Spec
from .world import World

IDENT = re.compile(r"^\w+$", re.ASCII)
TOKEN = re.compile(r'\s*(?:(?P<comment>#.*)|(?P<word>(?:[^\s"#]|"[^"]*")+)|(?P<bad>"))')


# directives

@dataclass(frozen=True)
class TypeDef:
    name: str
    parents: tuple[str, ...] = ()
    item_abilities: tuple[str, ...] = ()
    global_abilities: tuple[str, ...] = ()
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        out = f"type {self.name}"
        if self.parents:
            out += f" extends {','.join(self.parents)}"
        if self.item_abilities:
            out += f' item_abilities="{";".join(self.item_abilities)}"'
        if self.global_abilities:
            out += f' global_abilities="{";".join(self.global_abilities)}"'
        return out


@dataclass(frozen=True)
class AgentDef:
    id: str
    type: str = "Agent"
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f"agent {self.id}" + (f" type={self.type}" if self.type != "Agent" else "")


@dataclass(frozen=True)
class ItemDef:
    id: str
    type: str
    creator: str | None = None
    nodefault: bool = False
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f"item {self.id} type={self.type}" + _creation_options(self)


@dataclass(frozen=True)
class CollectionDef:
    id: str
    type: str = "Collection"
    creator: str | None = None
    nodefault: bool = False
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        kind = f" type={self.type}" if self.type != "Collection" else ""
        return f"collection {self.id}{kind}" + _creation_options(self)


def _creation_options(d: ItemDef | CollectionDef) -> str:
    out = ""
    if d.creator is not None:
        out += f" creator={d.creator}"
    if d.nodefault:
        out += " nodefault"
    return out + _as(d.actor)


def _as(actor: str | None) -> str:
    return f" as={actor}" if actor is not None else ""


@dataclass(frozen=True)
class MemberDef:
    collection: str
    member: str
    enabled: bool = True
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        flag = "" if self.enabled else " enabled=false"
        return f"member {self.collection} {self.member}{flag}{_as(self.actor)}"


@dataclass(frozen=True)
class Enable:
    collection: str
    member: str
    value: bool
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f"enable {self.collection} {self.member} {str(self.value).lower()}{_as(self.actor)}"


@dataclass(frozen=True)
class Permit:
    subject: Spec
    object: Spec
    ability: str
    allowed: bool
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return (
            f"permit {format_subject(self.subject)} {format_object(self.object)} "
            f'"{self.ability}" {_sign(self.allowed)}{_as(self.actor)}'
        )


@dataclass(frozen=True)
class PermitGlobal:
    subject: Spec
    ability: str
    allowed: bool
    actor: str | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return (
            f'permit-global {format_subject(self.subject)} "{self.ability}" '
            f"{_sign(self.allowed)}{_as(self.actor)}"
        )


@dataclass(frozen=True)
class Check:
    agent: str
    item: str
    ability: str
    expect: bool | None = None
    expect_level: int | None = None
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        out = f'check {self.agent} {self.item} "{self.ability}"'
        if self.expect is not None:
            out += f" expect={_sign(self.expect)}"
        if self.expect_level is not None:
            out += f" level={self.expect_level}"
        return out


@dataclass(frozen=True)
class Filter:
    agent: str
    ability: str
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f'filter {self.agent} "{self.ability}"'


@dataclass(frozen=True)
class Explain:
    agent: str
    item: str
    ability: str
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f'explain {self.agent} {self.item} "{self.ability}"'


@dataclass(frozen=True)
class Lint:
    agent: str
    item: str
    ability: str
    line: int = field(default=0, compare=False)

    def format(self) -> str:
        return f'lint {self.agent} {self.item} "{self.ability}"'


Directive = Union[
    TypeDef, AgentDef, ItemDef, CollectionDef, MemberDef, Enable,
    Permit, PermitGlobal, Check, Filter, Explain, Lint,
]
QUERIES = (Check, Filter, Explain, Lint)


def _sign(allowed: bool) -> str:
    return "allow" if allowed else "deny"


def format_subject(spec: Spec) -> str:
    if spec.shape == ONE:
        return f"agent:{spec.target}"
    if spec.shape == SOME:
        return f"group:{spec.target}"
    return "all"


def format_object(spec: Spec) -> str:
    if spec.shape == ONE:
        return f"item:{spec.target}"
    if spec.shape == SOME:
        return f"collection:{spec.target}"
    return "all"


# parsing

@dataclass(frozen=True)
class Token:
    text: str
    column: int
    raw: str = ""


def tokenize(text: str, line: int) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group("comment") is not None:
            break
        if m.group("bad") is not None:
            raise ScenarioSyntaxError("unterminated quote", line, m.start("bad") + 1)
        word = m.group("word")
        tokens.append(Token(word.replace('"', ""), m.start("word") + 1, word))
        pos = m.end()
    return tokens


class _Line:
    """Cursor over one line's tokens with error reporting."""

    def __init__(self, tokens: list[Token], number: int, end_column: int):
        self.keyword = tokens[0]
        self.positional = []
        self.options: dict[str, Token] = {}
        self.flags: dict[str, Token] = {}
        self.number = number
        self.end_column = end_column
        for tok in tokens[1:]:
            key, eq, value = tok.raw.partition("=")
            if eq and IDENT.match(key):
                if key in self.options:
                    self.fail(f"duplicate option {key}", tok)
                self.options[key] = Token(value.replace('"', ""), tok.column + len(key) + 1, value)
            else:
                self.positional.append(tok)

    def fail(self, message: str, tok: Token | None = None):
        column = tok.column if tok is not None else self.end_column
        raise ScenarioSyntaxError(message, self.number, column)

    def take(self, what: str, count: int) -> list[Token]:
        if len(self.positional) < count:
            self.fail(f"{self.keyword.text}: expected {what}")
        return self.positional[:count]

    def ident(self, tok: Token) -> str:
        if not IDENT.match(tok.text):
            self.fail(f"invalid identifier {tok.text!r}", tok)
        return tok.text

    def option(self, name: str) -> str | None:
        tok = self.options.pop(name, None)
        return None if tok is None else tok.text

    def ident_option(self, name: str) -> str | None:
        tok = self.options.pop(name, None)
        return None if tok is None else self.ident(tok)

    def bool_option(self, name: str, default: bool) -> bool:
        tok = self.options.pop(name, None)
        return default if tok is None else self.boolean(tok)

    def boolean(self, tok: Token) -> bool:
        if tok.text not in ("true", "false"):
            self.fail(f"expected true or false, got {tok.text!r}", tok)
        return tok.text == "true"

    def sign(self, tok: Token) -> bool:
        if tok.text not in ("allow", "deny"):
            self.fail(f"expected allow or deny, got {tok.text!r}", tok)
        return tok.text == "allow"

    def flag(self, name: str) -> bool:
        for i, tok in enumerate(self.positional):
            if tok.text == name:
                del self.positional[i]
                return True
        return False

    def done(self, used: int) -> None:
        if len(self.positional) > used:
            self.fail(f"unexpected {self.positional[used].text!r}", self.positional[used])
        if self.options:
            tok = next(iter(self.options.values()))
            name = next(iter(self.options))
            self.fail(f"unknown option {name}", Token(name, tok.column - len(name) - 1))

    def subject(self, tok: Token) -> Spec:
        return self._spec(tok, {"agent": ONE, "group": SOME})

    def object(self, tok: Token) -> Spec:
        return self._spec(tok, {"item": ONE, "collection": SOME})

    def _spec(self, tok: Token, prefixes: dict[str, int]) -> Spec:
        if tok.text == "all":
            return ALL_SPEC
        prefix, colon, target = tok.text.partition(":")
        if not colon or prefix not in prefixes or not IDENT.match(target):
            allowed = ", ".join(f"{p}:ID" for p in prefixes) + ", all"
            self.fail(f"malformed spec {tok.text!r} (expected {allowed})", tok)
        return Spec(prefixes[prefix], target)


def _parse_line(tokens: list[Token], number: int, end_column: int) -> Directive:
    ln = _Line(tokens, number, end_column)
    keyword = ln.keyword.text

    if keyword == "type":
        (name,) = ln.take("NAME", 1)
        parents: tuple[str, ...] = ()
        used = 1
        if len(ln.positional) > 1 and ln.positional[1].text == "extends":
            if len(ln.positional) < 3:
                ln.fail("extends needs a parent list")
            parents = tuple(p for p in ln.positional[2].text.split(",") if p)
            for p in parents:
                if not IDENT.match(p):
                    ln.fail(f"invalid parent {p!r}", ln.positional[2])
            used = 3
        item_ab = ln.option("item_abilities")
        global_ab = ln.option("global_abilities")
        ln.done(used)
        return TypeDef(
            ln.ident(name), parents, _split_abilities(item_ab), _split_abilities(global_ab), number
        )

    if keyword == "agent":
        (ident,) = ln.take("ID", 1)
        kind = ln.ident_option("type") or "Agent"
        ln.done(1)
        return AgentDef(ln.ident(ident), kind, number)

    if keyword in ("item", "collection"):
        (ident,) = ln.take("ID", 1)
        nodefault = ln.flag("nodefault")
        kind = ln.ident_option("type")
        if kind is None:
            if keyword == "item":
                ln.fail("item needs type=TYPE")
            kind = "Collection"
        creator = ln.ident_option("creator")
        actor = ln.ident_option("as")
        ln.done(1)
        cls = ItemDef if keyword == "item" else CollectionDef
        return cls(ln.ident(ident), kind, creator, nodefault, actor, number)

    if keyword == "member":
        coll, member = ln.take("COLLECTION MEMBER", 2)
        enabled = ln.bool_option("enabled", True)
        actor = ln.ident_option("as")
        ln.done(2)
        return MemberDef(ln.ident(coll), ln.ident(member), enabled, actor, number)

    if keyword == "enable":
        coll, member, value = ln.take("COLLECTION MEMBER true|false", 3)
        actor = ln.ident_option("as")
        ln.done(3)
        return Enable(ln.ident(coll), ln.ident(member), ln.boolean(value), actor, number)

    if keyword == "permit":
        subj, obj, ability, sign = ln.take('SUBJECT OBJECT "ABILITY" allow|deny', 4)
        actor = ln.ident_option("as")
        ln.done(4)
        return Permit(
            ln.subject(subj), ln.object(obj), _ability(ln, ability), ln.sign(sign), actor, number
        )

    if keyword == "permit-global":
        subj, ability, sign = ln.take('SUBJECT "ABILITY" allow|deny', 3)
        actor = ln.ident_option("as")
        ln.done(3)
        return PermitGlobal(ln.subject(subj), _ability(ln, ability), ln.sign(sign), actor, number)

    if keyword == "check":
        agent, item, ability = ln.take('AGENT ITEM "ABILITY"', 3)
        expect_tok = ln.options.pop("expect", None)
        expect = None if expect_tok is None else ln.sign(expect_tok)
        level_tok = ln.options.pop("level", None)
        level = None
        if level_tok is not None:
            if not level_tok.text.isdigit() or not 1 <= int(level_tok.text) <= 9:
                ln.fail(f"level must be 1-9, got {level_tok.text!r}", level_tok)
            level = int(level_tok.text)
        ln.done(3)
        return Check(ln.ident(agent), ln.ident(item), _ability(ln, ability), expect, level, number)

    if keyword == "filter":
        agent, ability = ln.take('AGENT "ABILITY"', 2)
        ln.done(2)
        return Filter(ln.ident(agent), _ability(ln, ability), number)

    if keyword in ("explain", "lint"):
        agent, item, ability = ln.take('AGENT ITEM "ABILITY"', 3)
        ln.done(3)
        cls = Explain if keyword == "explain" else Lint
        return cls(ln.ident(agent), ln.ident(item), _ability(ln, ability), number)

    ln.fail(f"unknown directive {keyword!r}", ln.keyword)
    raise AssertionError("unreachable")


def _ability(ln: _Line, tok: Token) -> str:
    if not tok.text.strip():
        ln.fail("empty ability", tok)
    return tok.text


def _split_abilities(value: str | None) -> tuple[str, ...]:
    if not value:
        return ()
    return tuple(a.strip() for a in value.split(";") if a.strip())


def parse_scenario(text: str) -> list[Directive]:
    directives = []
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize(raw, number)
        if tokens:
            directives.append(_parse_line(tokens, number, len(raw.rstrip()) + 1))
    return directives


def format_directive(directive: Directive) -> str:
    return directive.format()


# execution

class ScenarioError(BroacError):
    """An engine error raised while executing the directive on ``line``."""

    def __init__(self, line: int, cause: BroacError):
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}: {cause}")


@dataclass(frozen=True)
class Output:
    directive: Directive
    text: str
    decision: Decision | None = None
    items: tuple[str, ...] | None = None
    report: LoopholeReport | None = None
    matched: bool = True

    @property
    def line(self) -> int:
        return self.directive.line


def format_decision(decision: Decision) -> str:
    verdict = "ALLOWED" if decision.allowed else "DENIED"
    if decision.reason in (CLOSED_WORLD, GLOBAL_OVERRIDE):
        return f"{verdict} level=- reason={decision.reason}"
    via = []
    for c in decision.deciding():
        tag = f"{c.permission.kind}({_sign(c.allowed)})"
        if tag not in via:
            via.append(tag)
    return f"{verdict} level={decision.winning_level} reason={decision.reason} via={','.join(via)}"


def format_permission(permission: Permission) -> str:
    return Permit(permission.subject, permission.object, permission.ability, permission.allowed).format()


def apply(world: World, d: Directive) -> Output | None:
    """Run one directive against ``world``; queries return an output record."""
    if isinstance(d, TypeDef):
        world.define_type(d.name, d.parents or ("Item",), d.item_abilities, d.global_abilities)
    elif isinstance(d, AgentDef):
        world.create_entity(d.type, id=d.id, default_permission=False)
    elif isinstance(d, (ItemDef, CollectionDef)):
        world.create_entity(
            d.type, d.actor, id=d.id, creator=d.creator, default_permission=not d.nodefault
        )
    elif isinstance(d, MemberDef):
        world.add_membership(d.collection, d.member, d.actor, enabled=d.enabled)
    elif isinstance(d, Enable):
        world.set_permission_enabled(d.collection, d.member, d.value, d.actor)
    elif isinstance(d, Permit):
        world.set_permission(d.subject, d.object, d.ability, d.allowed, d.actor)
    elif isinstance(d, PermitGlobal):
        world.set_global_permission(d.subject, d.ability, d.allowed, d.actor)
    elif isinstance(d, Check):
        decision = world.check(d.agent, d.item, d.ability)
        text = f"{d.format()} -> {format_decision(decision)}"
        matched = (d.expect is None or d.expect == decision.allowed) and (
            d.expect_level is None or d.expect_level == decision.winning_level
        )
        if not matched:
            text += "  !! expectation not met"
        return Output(d, text, decision=decision, matched=matched)
    elif isinstance(d, Filter):
        items = tuple(sorted(world.filter_items(d.agent, d.ability)))
        return Output(d, f"{d.format()} -> {' '.join(items) or '(none)'}", items=items)
    elif isinstance(d, Explain):
        decision = world.explain(d.agent, d.item, d.ability)
        lines = [f"{d.format()} -> {format_decision(decision)}"]
        lines += [f"    [{c.level}] {format_permission(c.permission)}" for c in decision.candidates]
        return Output(d, "\n".join(lines), decision=decision)
    elif isinstance(d, Lint):
        report = world.lint(d.agent, d.item, d.ability)
        return Output(d, f"{d.format()} -> {format_lint(report)}", report=report)
    else:
        raise TypeError(f"not a directive: {d!r}")
    return None


def format_lint(report: LoopholeReport) -> str:
    if not report.flagged:
        return "ok"
    return (
        f"LOOPHOLE {report.agent}: {format_decision(report.agent_decision)}"
        f" | anonymous: {format_decision(report.anonymous_decision)}"
    )


def iter_execute(directives: list[Directive], world: World | None = None) -> Iterator[Output]:
    """Apply directives in order, yielding one output per query.

    Stops at the first failing directive by raising :class:`ScenarioError`.
    """
    world = world if world is not None else World()
    for d in directives:
        try:
            out = apply(world, d)
        except BroacError as exc:
            raise ScenarioError(d.line, exc) from exc
        if out is not None:
            yield out


def execute(directives: list[Directive], world: World | None = None) -> list[Output]:
    return list(iter_execute(directives, world))


def run_text(text: str, world: World | None = None) -> tuple[World, list[Output]]:
    """Parse and execute ``text``; returns the final world and the outputs."""
    world = world if world is not None else World()
    return world, execute(parse_scenario(text), world)

