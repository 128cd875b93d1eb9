"""
Random small automata for property tests.

Invariants are upper bounds `x <= c`. Guards are equalities `x == c`, so every
visible step fires at a single delay from the previous one; with `intervals`,
visible switches get closed interval guards `x >= a & x <= b` (or one side of
it) instead. Tau switches keep equality guards and only lead to a location with
a higher index, so tau moves never form a cycle.

Run as a script to write a batch of models:

    python -m src.scripts.random_models OUT_DIR [COUNT] [SEED]
"""
import os
import random
import sys

from dotenv import load_dotenv

from src.model import TAU, TIOA, TRUE, ClockConstraint, Switch, atom, conj, input_label, make_clocks, output_label
from src.ta_format import render

load_dotenv()

INPUTS = ("a",)
OUTPUTS = ("o",)


def _interval_guard(rng: random.Random, clock: str, max_constant: int) -> ClockConstraint:
    lo = rng.randint(0, max_constant)
    hi = rng.randint(lo, max_constant)
    shape = rng.random()
    if shape < 0.25:
        return conj(atom(clock, ">=", lo))
    if shape < 0.5:
        return conj(atom(clock, "<=", hi))
    return conj(atom(clock, ">=", lo), atom(clock, "<=", hi))


def generate_model(rng: random.Random, name: str, tau: bool = True, enabled: bool = False,
                   progress: bool = False, intervals: bool = False, max_locations: int = 3,
                   max_clocks: int = 2, max_constant: int = 4) -> TIOA:
    """
    Args:
        rng: seeded source of randomness.
        name: automaton name.
        tau: allow internal switches.
        enabled: add an input self-loop to every location (input-enabled).
        progress: leave out invariants, so that every state can wait forever.
        intervals: give visible switches interval guards.
    """
    locations = [f"l{i}" for i in range(rng.randint(1, max_locations))]
    clocks = ["x", "y"][:rng.randint(1, max_clocks)]

    invariants = {}
    if not progress:
        for loc in locations:
            if rng.random() < 0.4:
                invariants[loc] = conj(atom(rng.choice(clocks), "<=", rng.randint(0, max_constant)))

    labels = [input_label(i) for i in INPUTS] + [output_label(o) for o in OUTPUTS]
    if tau:
        labels.append(TAU)
    switches = []
    for _ in range(rng.randint(1, 4)):
        src = rng.randrange(len(locations))
        label = rng.choice(labels)
        if label.is_tau:
            if src == len(locations) - 1:
                continue
            dst = rng.randrange(src + 1, len(locations))
        else:
            dst = rng.randrange(len(locations))
        clock = rng.choice(clocks)
        if intervals and not label.is_tau:
            guard = _interval_guard(rng, clock, max_constant)
        else:
            guard = conj(atom(clock, "==", rng.randint(0, max_constant)))
        resets = frozenset(c for c in clocks if rng.random() < 0.4)
        switches.append(Switch(locations[src], guard, label, resets, locations[dst]))
    if enabled:
        for loc in locations:
            for i in INPUTS:
                switches.append(Switch(loc, TRUE, input_label(i), frozenset(), loc))

    return TIOA(
        name=name,
        locations=tuple(locations),
        initial=locations[0],
        clocks=make_clocks(*clocks),
        inputs=frozenset(INPUTS),
        outputs=frozenset(OUTPUTS),
        switches=tuple(switches),
        invariants=invariants,
    )


def generate_population(seed: int, count: int, **kwargs):
    rng = random.Random(seed)
    return [generate_model(rng, f"r{i}", **kwargs) for i in range(count)]


if __name__ == "__main__":
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.getenv("LTIOCO_RANDOM_DIR", "random_models")
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 20
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    os.makedirs(out_dir, exist_ok=True)
    for a in generate_population(seed, count):
        with open(os.path.join(out_dir, f"{a.name}.ta"), "w", encoding="utf-8") as f:
            f.write(render(a))
    print(f"Wrote {count} models to {out_dir}")
