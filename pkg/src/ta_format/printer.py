"""Render an automaton back into the line-based format read by `parse_model`."""
from typing import List

from src.model import TIOA, ClockConstraint


def _expr(c: ClockConstraint) -> str:
    return " & ".join(at.render() for at in c.conjuncts)


def render(a: TIOA) -> str:
    lines: List[str] = [f"automaton {a.name}"]
    if a.clocks:
        lines.append("clocks " + " ".join(a.clock_names))
    if a.inputs:
        lines.append("inputs " + " ".join(sorted(a.inputs)))
    if a.outputs:
        lines.append("outputs " + " ".join(sorted(a.outputs)))
    for loc in a.locations:
        line = f"location {loc}"
        if loc == a.initial:
            line += " initial"
        inv = a.invariant(loc)
        if not inv.is_true:
            line += f" invariant {_expr(inv)}"
        lines.append(line)
    for sw in a.switches:
        line = f"switch {sw.source} -> {sw.target}"
        if not sw.guard.is_true:
            line += f" when {_expr(sw.guard)}"
        line += f" via {sw.action.render()}"
        if sw.resets:
            # keep declaration order so the output is stable
            line += " reset " + " ".join(c for c in a.clock_names if c in sw.resets)
        lines.append(line)
    return "\n".join(lines) + "\n"
