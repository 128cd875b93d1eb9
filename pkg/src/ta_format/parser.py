"""
Parser for the line-based automaton format.

    automaton NAME
    clocks x y ...
    inputs a b ...
    outputs c d ...
    location NAME [initial] [invariant EXPR]
    switch SRC -> DST [when EXPR] [via ?a|!a|tau] [reset x y ...]

EXPR is a conjunction (`&`) of atoms `clock REL integer`; `#` starts a comment.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from src.errors import ModelSemanticError, ModelSyntaxError
from src.model import (
    TAU,
    TAU_NAME,
    TIOA,
    ActionLabel,
    AtomicConstraint,
    ClockConstraint,
    Relation,
    Switch,
    input_label,
    make_clocks,
    output_label,
)

logger = logging.getLogger(__name__)

TA_GRAMMAR = r"""
    start: _item*
    _item: _decl? _NL

    _decl: automaton | clocks | inputs | outputs | location | switch

    automaton: "automaton" NAME
    clocks: "clocks" NAME*
    inputs: "inputs" NAME*
    outputs: "outputs" NAME*
    location: "location" NAME [INITIAL] [invariant]
    invariant: "invariant" expr
    switch: "switch" NAME "->" NAME [when] [via] [reset]
    when: "when" expr
    via: "via" ACTION
    reset: "reset" NAME+

    expr: atom ("&" atom)*
    atom: NAME REL NUMBER              -> simple
        | NAME "-" NAME REL NUMBER     -> diagonal

    INITIAL: "initial"
    ACTION.2: /[?!][A-Za-z_][A-Za-z0-9_.']*/ | "tau"
    REL: "<=" | ">=" | "==" | "<" | ">"
    NUMBER: /\d+(\.\d+)?/
    NAME: /[A-Za-z_][A-Za-z0-9_.']*/
    COMMENT: /#[^\n]*/
    _NL: /\r?\n/

    %import common.WS_INLINE
    %ignore WS_INLINE
    %ignore COMMENT
"""

_parser = Lark(TA_GRAMMAR, parser="lalr")


# ------------------------------------ Parse tree -> AST ---------------------------------

@dataclass
class _Atom:
    clock: Token
    relation: Token
    bound: Token
    other: Optional[Token] = None


@dataclass
class _Decl:
    kind: str
    line: int
    items: List = field(default_factory=list)


class _ToDecls(Transformer):
    """Flattens the tree into one `_Decl` per declaration line."""

    def start(self, children):
        return list(children)

    def _names(self, kind, children):
        line = children[0].line if children else None
        return _Decl(kind, line, list(children))

    def automaton(self, children):
        return _Decl("automaton", children[0].line, children)

    def clocks(self, children):
        return self._names("clocks", children)

    def inputs(self, children):
        return self._names("inputs", children)

    def outputs(self, children):
        return self._names("outputs", children)

    def location(self, children):
        name, initial, invariant = children
        return _Decl("location", name.line, [name, initial is not None, invariant])

    def invariant(self, children):
        return children[0]

    def switch(self, children):
        source, target, when, via, reset = children
        return _Decl("switch", source.line, [source, target, when, via, reset or []])

    def when(self, children):
        return children[0]

    def via(self, children):
        return children[0]

    def reset(self, children):
        return list(children)

    def expr(self, children):
        return list(children)

    def simple(self, children):
        return _Atom(*children)

    def diagonal(self, children):
        clock, other, relation, bound = children
        return _Atom(clock, relation, bound, other)


# ---------------------------------------- Builder ---------------------------------------

class _Builder:
    def __init__(self):
        self.name: Optional[str] = None
        self.clock_names: List[str] = []
        self.inputs: List[str] = []
        self.outputs: List[str] = []
        self.locations: List[str] = []
        self.initial: Optional[str] = None
        self.invariants: Dict[str, ClockConstraint] = {}
        self.location_decls: List[_Decl] = []
        self.switches: List[Tuple[int, list]] = []

    def _constraint(self, atoms: Optional[List[_Atom]]) -> ClockConstraint:
        if not atoms:
            return ClockConstraint()
        result = []
        for at in atoms:
            if at.other is not None:
                raise ModelSemanticError(
                    f"diagonal constraint {at.clock} - {at.other} {at.relation} {at.bound} is not supported",
                    at.clock.line,
                )
            if at.clock not in self.clock_names:
                raise ModelSemanticError(f"undeclared clock {str(at.clock)!r}", at.clock.line)
            if "." in at.bound:
                raise ModelSemanticError(
                    f"constant {at.bound} is not an integer (scale the model first)", at.bound.line
                )
            result.append(AtomicConstraint(str(at.clock), Relation(str(at.relation)), int(at.bound)))
        return ClockConstraint(tuple(result))

    def _action(self, token: Optional[Token], line: int) -> ActionLabel:
        if token is None or token == TAU_NAME:
            return TAU
        name = token[1:]
        if token.startswith("?"):
            if name not in self.inputs:
                raise ModelSemanticError(f"undeclared input {name!r}", line)
            return input_label(name)
        if name not in self.outputs:
            raise ModelSemanticError(f"undeclared output {name!r}", line)
        return output_label(name)

    def add(self, decl: _Decl):
        if decl.kind == "automaton":
            if self.name is not None:
                raise ModelSemanticError("more than one automaton declaration", decl.line)
            self.name = str(decl.items[0])
        elif decl.kind == "clocks":
            self.clock_names.extend(str(t) for t in decl.items)
        elif decl.kind == "inputs":
            self.inputs.extend(str(t) for t in decl.items)
        elif decl.kind == "outputs":
            self.outputs.extend(str(t) for t in decl.items)
        elif decl.kind == "location":
            self.location_decls.append(decl)
        else:
            self.switches.append((decl.line, decl.items))

    def _add_location(self, decl: _Decl):
        name, initial, invariant = decl.items
        if name in self.locations:
            raise ModelSemanticError(f"location {str(name)!r} declared twice", decl.line)
        self.locations.append(str(name))
        if initial:
            if self.initial is not None:
                raise ModelSemanticError("more than one initial location", decl.line)
            self.initial = str(name)
        inv = self._constraint(invariant)
        if not inv.is_true:
            self.invariants[str(name)] = inv

    def build(self) -> TIOA:
        if self.name is None:
            raise ModelSemanticError("missing 'automaton NAME' declaration")
        for decl in self.location_decls:
            self._add_location(decl)
        if self.initial is None:
            raise ModelSemanticError("no initial location")
        for names, what in ((self.clock_names, "clock"), (self.inputs + self.outputs, "action")):
            dup = next((n for n in names if names.count(n) > 1), None)
            if dup is not None:
                raise ModelSemanticError(f"{what} {dup!r} declared twice")
        switches = []
        for line, (source, target, when, via, reset) in self.switches:
            for end in (source, target):
                if end not in self.locations:
                    raise ModelSemanticError(f"undeclared location {str(end)!r}", line)
            for clock in reset:
                if clock not in self.clock_names:
                    raise ModelSemanticError(f"reset of undeclared clock {str(clock)!r}", line)
            switches.append(Switch(
                source=str(source),
                guard=self._constraint(when),
                action=self._action(via, line),
                resets=frozenset(str(c) for c in reset),
                target=str(target),
            ))
        return TIOA(
            name=self.name,
            locations=tuple(self.locations),
            initial=self.initial,
            clocks=make_clocks(*self.clock_names),
            inputs=frozenset(self.inputs),
            outputs=frozenset(self.outputs),
            switches=tuple(switches),
            invariants=self.invariants,
        )


def _syntax_error(e: UnexpectedInput) -> ModelSyntaxError:
    if isinstance(e, UnexpectedCharacters):
        message = f"unexpected character {e.char!r}"
    elif isinstance(e, UnexpectedToken):
        message = "unexpected end of line" if e.token.type == "_NL" else f"unexpected {str(e.token)!r}"
    elif isinstance(e, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        message = "syntax error"
    line = e.line if e.line and e.line > 0 else 0
    column = e.column if e.column and e.column > 0 else 0
    return ModelSyntaxError(message, line, column)


def parse_model(text: str) -> TIOA:
    """Parse one automaton; raises ModelSyntaxError or ModelSemanticError."""
    if not text.endswith("\n"):
        text += "\n"
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_error(e) from None
    builder = _Builder()
    for decl in _ToDecls().transform(tree):
        builder.add(decl)
    a = builder.build()
    logger.debug(f"Parsed {a.name}: {len(a.locations)} locations, {len(a.switches)} switches")
    return a


def load_model(path: str) -> TIOA:
    with open(path, encoding="utf-8") as f:
        return parse_model(f.read())
