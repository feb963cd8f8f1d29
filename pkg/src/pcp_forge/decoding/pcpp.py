"""A toy PCPP verifier and the PCPP -> uniquely decodable PCP transformation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .circuit import Circuit, eval_circuit, flatten, symbols


@dataclass
class PCPPVerifier:
    """Oracle access to x ∘ π; ``queries(ω)`` indexes that concatenation (0-based)."""

    phi: Circuit
    r: int
    q: int
    ell: int
    s: int
    rho: Fraction
    queries_fn: Callable[[int], tuple]
    decide_fn: Callable[[int, tuple], bool]

    @property
    def n(self) -> int:
        return self.phi.n_inputs

    def queries(self, omega: int) -> tuple:
        return self.queries_fn(omega)

    def decide(self, omega: int, answers) -> bool:
        return self.decide_fn(omega, tuple(answers))

    def params(self) -> dict:
        return {"r": self.r, "q": self.q, "ell": self.ell, "s": self.s, "rho": str(self.rho)}

    def reject_probability(self, x, proof=()) -> Fraction:
        word = flatten(x, self.phi.t, self.phi.u) + tuple(proof)
        bad = 0
        for omega in range(2**self.r):
            if not self.decide(omega, [word[i] for i in self.queries(omega)]):
                bad += 1
        return Fraction(bad, 2**self.r)


def toy_pcpp(phi: Circuit) -> PCPPVerifier:
    """Reads all of x and evaluates φ: no randomness, no proof, rejection ratio 1."""
    n = phi.n_inputs
    return PCPPVerifier(
        phi=phi,
        r=0,
        q=n,
        ell=0,
        s=phi.size,
        rho=Fraction(1),
        queries_fn=lambda omega: tuple(range(n)),
        decide_fn=lambda omega, ans: eval_circuit(phi, ans) == 1,
    )


def relative_distance_to_sat(phi: Circuit, x, sat: list) -> Fraction:
    """Fraction of Γ-symbols in which x differs from the nearest satisfying assignment."""
    xs = symbols(flatten(x, phi.t, phi.u), phi.u)
    best = min(sum(a != b for a, b in zip(xs, y)) for y in sat)
    return Fraction(best, phi.t)


@dataclass
class PCPDecoder:
    """Randomness ω in ``range(R)``, index k in ``range(t)``; ψ returns a Γ-symbol or None (⊥)."""

    t: int
    u: int
    R: int
    q: int
    ell: int
    rho: Fraction
    queries_fn: Callable[[int, int], tuple]
    decode_fn: Callable[[int, int, tuple], object]

    @property
    def r(self) -> int:
        return math.ceil(math.log2(self.R)) if self.R > 1 else 0

    def queries(self, omega: int, k: int) -> tuple:
        return self.queries_fn(omega, k)

    def decode(self, omega: int, k: int, answers):
        return self.decode_fn(omega, k, tuple(answers))

    def params(self) -> dict:
        return {"t": self.t, "u": self.u, "R": self.R, "r": self.r, "q": self.q, "ell": self.ell, "rho": str(self.rho)}

    def stats(self, proof, x) -> tuple[Fraction, Fraction]:
        """(decoding error, ⊥ rate) for uniform k and ω."""
        err = rej = 0
        for k in range(self.t):
            for omega in range(self.R):
                out = self.decode(omega, k, [proof[i] for i in self.queries(omega, k)])
                if out is None:
                    rej += 1
                elif out != tuple(x[k]):
                    err += 1
        tot = self.t * self.R
        return Fraction(err, tot), Fraction(rej, tot)


def pcpp_to_udpcp(V: PCPPVerifier, u: int) -> PCPDecoder:
    """Run V on x ∘ π, then read the u bits of symbol k; ⊥ if V rejects."""
    if V.n % u:
        raise ValueError(f"input length {V.n} is not a multiple of u = {u}")
    t = V.n // u
    qV = V.q

    def queries(omega, k):
        return tuple(V.queries(omega)) + tuple(range(u * k, u * k + u))

    def decode(omega, k, ans):
        if not V.decide(omega, ans[:qV]):
            return None
        return tuple(ans[qV:])

    return PCPDecoder(t, u, 2**V.r, qV + u, V.n + V.ell, V.rho / u, queries, decode)


def honest_proof(V: PCPPVerifier, x, pcpp_proof=()) -> tuple:
    """The decoder's proof x ∘ π_x (the toy verifier needs no π)."""
    return flatten(x, V.phi.t, V.phi.u) + tuple(pcpp_proof)
