"""Boolean circuits over Γ^t with Γ = {0,1}^u.

Wire numbering: wires ``0 .. t*u - 1`` are the input bits (symbol k occupies
bits ``k*u .. k*u + u - 1``), and gate g drives wire ``t*u + g``. Gates may
only read lower-numbered wires, so the gate list is a topological order. The
last gate is the output.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

OPS = {"AND", "OR", "NOT", "XOR", "CONST"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    op: str
    inputs: tuple = ()
    value: int | None = None  # only for CONST


@dataclass(frozen=True)
class Circuit:
    t: int
    u: int
    gates: tuple

    def __post_init__(self):
        if self.t < 1 or self.u < 1:
            raise CircuitError("need t >= 1 and u >= 1")
        if not self.gates:
            raise CircuitError("circuit has no gates")
        n_in = self.t * self.u
        for g, gate in enumerate(self.gates):
            if gate.op not in OPS:
                raise CircuitError(f"gate {g}: unknown op {gate.op!r}")
            if gate.op == "CONST":
                if gate.inputs or gate.value not in (0, 1):
                    raise CircuitError(f"gate {g}: CONST takes no inputs and a 0/1 value")
            elif gate.op == "NOT" and len(gate.inputs) != 1:
                raise CircuitError(f"gate {g}: NOT takes one input")
            elif gate.op != "NOT" and len(gate.inputs) < 1:
                raise CircuitError(f"gate {g}: {gate.op} needs inputs")
            for w in gate.inputs:
                if not 0 <= w < n_in + g:
                    raise CircuitError(f"gate {g}: wire {w} is not an input or an earlier gate")

    @property
    def n_inputs(self) -> int:
        return self.t * self.u

    @property
    def size(self) -> int:
        return len(self.gates)


def flatten(x, t: int, u: int) -> tuple:
    """Γ^t (tuples of u bits) or a flat bit string of length t*u -> flat bits."""
    x = tuple(x)
    if len(x) == t and all(isinstance(s, (tuple, list)) for s in x):
        bits = tuple(b for s in x for b in s)
        if any(len(s) != u for s in x):
            raise CircuitError(f"each symbol must have {u} bits")
    else:
        bits = x
    if len(bits) != t * u:
        raise CircuitError(f"input has {len(bits)} bits, circuit expects {t * u}")
    if any(b not in (0, 1) for b in bits):
        raise CircuitError("input bits must be 0 or 1")
    return bits


def symbols(bits, u: int) -> tuple:
    return tuple(tuple(bits[i : i + u]) for i in range(0, len(bits), u))


def eval_circuit(phi: Circuit, x) -> int:
    wires = list(flatten(x, phi.t, phi.u))
    for gate in phi.gates:
        op = gate.op
        if op == "CONST":
            v = gate.value
        elif op == "NOT":
            v = 1 - wires[gate.inputs[0]]
        elif op == "AND":
            v = int(all(wires[w] for w in gate.inputs))
        elif op == "OR":
            v = int(any(wires[w] for w in gate.inputs))
        else:
            v = 0
            for w in gate.inputs:
                v ^= wires[w]
        wires.append(v)
    return wires[-1]


def all_inputs(phi: Circuit):
    return itertools.product((0, 1), repeat=phi.n_inputs)


def satisfying_assignments(phi: Circuit, budget: int = 1 << 20) -> list[tuple]:
    """All x in Γ^t with φ(x) = 1, as tuples of u-bit symbols."""
    if 2**phi.n_inputs > budget:
        raise CircuitError(f"2^{phi.n_inputs} inputs exceed the enumeration budget {budget}")
    return [symbols(b, phi.u) for b in all_inputs(phi) if eval_circuit(phi, b)]


# ------------------------------------------------------------------ builders

def const_circuit(t: int, u: int, value: int) -> Circuit:
    return Circuit(t, u, (Gate("CONST", (), value),))


def xor_circuit(t: int, u: int = 1) -> Circuit:
    return Circuit(t, u, (Gate("XOR", tuple(range(t * u))),))


def random_circuit(t: int, u: int, n_gates: int, rng) -> Circuit:
    n_in = t * u
    gates = []
    for g in range(n_gates):
        op = ("AND", "OR", "XOR", "NOT")[int(rng.integers(0, 4))]
        avail = n_in + g
        if op == "NOT":
            ins = (int(rng.integers(0, avail)),)
        else:
            k = min(avail, 2 + int(rng.integers(0, 2)))
            ins = tuple(int(w) for w in rng.choice(avail, size=k, replace=False))
        gates.append(Gate(op, ins))
    return Circuit(t, u, tuple(gates))


def random_satisfiable_circuit(t: int, u: int, n_gates: int, rng) -> tuple[Circuit, tuple]:
    """Random circuit made satisfiable at a planted x by negating the output if needed."""
    phi = random_circuit(t, u, n_gates, rng)
    bits = tuple(int(b) for b in rng.integers(0, 2, size=t * u))
    if not eval_circuit(phi, bits):
        out = phi.n_inputs + phi.size - 1
        phi = Circuit(t, u, phi.gates + (Gate("NOT", (out,)),))
    return phi, symbols(bits, u)


# ---------------------------------------------------------------------- JSON

def circuit_to_json(phi: Circuit) -> dict:
    gates = []
    for g in phi.gates:
        d = {"op": g.op, "inputs": list(g.inputs)}
        if g.op == "CONST":
            d["value"] = g.value
        gates.append(d)
    return {"t": phi.t, "u": phi.u, "gates": gates}


def circuit_from_json(obj) -> Circuit:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        gates = tuple(Gate(g["op"], tuple(g.get("inputs", ())), g.get("value")) for g in obj["gates"])
        return Circuit(int(obj["t"]), int(obj.get("u", 1)), gates)
    except (KeyError, TypeError) as exc:
        raise CircuitError(f"malformed circuit: {exc}") from None
