"""Quick oracle-equivalence checks run by ``leibniz-hierarchy selftest``."""
from __future__ import annotations

import random
from typing import Callable

from .algebra import FiniteAlgebra, Matrix, MatrixFamily, Operation
from .classify import classify
from .filters import designation_matrix, fast_filters, naive_filters
from .free import generate_free_algebra
from .leibniz import is_reduced, leibniz_bruteforce, leibniz_congruence, reduce_matrix
from .reductions import build_flat, build_natural, clone_member, random_instance


def random_matrix(rng: random.Random, max_size: int = 4, max_arity: int = 3, max_ops: int = 3) -> Matrix:
    n = rng.randint(1, max_size)
    ops = []
    for j in range(rng.randint(0, max_ops)):
        k = rng.randint(0, max_arity)
        ops.append(Operation(f"o{j}", k, tuple(rng.randrange(n) for _ in range(n**k))))
    designated = frozenset(a for a in range(n) if rng.random() < 0.5)
    return Matrix(FiniteAlgebra(n, tuple(ops)), designated)


def check_leibniz(seed: int, samples: int = 60) -> tuple[bool, str]:
    rng = random.Random(seed)
    for i in range(samples):
        m = random_matrix(rng)
        if leibniz_congruence(m).partition != leibniz_bruteforce(m):
            return False, f"sample {i} differs"
    return True, f"{samples} matrices"


def check_filters(seed: int, samples: int = 20) -> tuple[bool, str]:
    rng = random.Random(seed)
    done = 0
    while done < samples:
        m = random_matrix(rng, max_size=3, max_arity=2)
        free1 = generate_free_algebra(MatrixFamily((m,)), 1)
        if len(free1) > 12:
            continue
        D = designation_matrix(free1)
        if fast_filters(D) != naive_filters(D):
            return False, f"sample {done} differs"
        done += 1
    return True, f"{samples} instances"


def check_reductions(seed: int, samples: int = 4) -> tuple[bool, str]:
    for s in range(seed, seed + samples):
        inst = random_instance(s, max_size=2)
        member = clone_member(inst)
        nat = build_natural(inst).matrix
        flat = build_flat(inst).matrix
        if not (is_reduced(nat) and is_reduced(flat)):
            return False, f"seed {s}: construction not reduced"
        v = classify(MatrixFamily((nat,))).vector()
        if v[:4] != (member,) * 4:
            return False, f"seed {s}: natural verdicts {v[:4]} vs clone membership {member}"
        if classify(MatrixFamily((flat,))).vector()[4] != member:
            return False, f"seed {s}: flat truth-equationality vs clone membership {member}"
    return True, f"{samples} instances"


def check_coherence(seed: int, samples: int = 40) -> tuple[bool, str]:
    rng = random.Random(seed)
    for i in range(samples):
        m = reduce_matrix(random_matrix(rng, max_size=3, max_arity=2))
        p, e, w, a, t = classify(MatrixFamily((m,))).vector()
        implications = [(a, e), (a, w), (w, p), (w, t), (e, p)]
        if any(x is True and y is False for x, y in implications):
            return False, f"sample {i}: {(p, e, w, a, t)}"
        if None not in (p, t, w) and w != (p and t):
            return False, f"sample {i}: weak algebraizability mismatch"
    return True, f"{samples} matrices"


CHECKS: dict[str, Callable[[int], tuple[bool, str]]] = {
    "leibniz-vs-bruteforce": check_leibniz,
    "fast-vs-naive-filters": check_filters,
    "reductions-vs-clone-oracle": check_reductions,
    "hierarchy-coherence": check_coherence,
}


def run(seed: int = 0) -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS.items():
        ok, detail = fn(seed)
        out.append((name, ok, detail))
    return out
