"""Breadth-first closure of tuples inside a power of a finite algebra.

Elements are rows of length ``P`` (the *key* coordinates) and are identified
by those rows alone.  Optional *shadow* coordinates are carried along and
evaluated for each element, without taking part in deduplication, so a search
can inspect values on more points than it pays for.

Operations of arity two or more are curried: for a fixed choice of all
arguments but one, the operation restricted to each coordinate is a unary
map, and only the distinct tuples of such maps are kept.  Every new element
records the operation and argument indices that produced it, and argument
indices are always smaller than the element index.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded
from .terms import App, Term, Var

_CHUNK = 1 << 21


class _Grow:
    """Append-only 2-d array with amortised doubling."""

    def __init__(self, width: int, dtype):
        self.data = np.zeros((16, max(width, 0)), dtype=dtype)
        self.n = 0

    def extend(self, rows: np.ndarray) -> None:
        k = len(rows)
        if self.n + k > len(self.data):
            cap = max(2 * len(self.data), self.n + k)
            new = np.zeros((cap, self.data.shape[1]), dtype=self.data.dtype)
            new[: self.n] = self.data[: self.n]
            self.data = new
        self.data[self.n : self.n + k] = rows
        self.n += k

    def view(self) -> np.ndarray:
        return self.data[: self.n]


class RowKeyer:
    """Exact hashable keys for integer rows with entries below ``base``."""

    def __init__(self, base: int, width: int):
        self.width = width
        self.exact = width == 0 or base**width < 2**62
        if self.exact:
            self.powers = np.array([base ** (width - 1 - c) for c in range(width)], dtype=np.int64)
        else:
            self.dtype = np.uint8 if base <= 256 else (np.uint16 if base <= 65536 else np.uint32)

    def codes(self, rows: np.ndarray) -> np.ndarray:
        if self.exact:
            if self.width == 0:
                return np.zeros(len(rows), dtype=np.int64)
            return np.asarray(rows, dtype=np.int64) @ self.powers
        arr = np.ascontiguousarray(np.asarray(rows).astype(self.dtype))
        return arr.view(np.dtype((np.void, arr.dtype.itemsize * self.width))).reshape(-1)

    def key(self, code):
        return int(code) if self.exact else code.tobytes()

    def first_unique(self, rows: np.ndarray) -> tuple[list, np.ndarray]:
        """Keys of distinct rows and their first positions, in order of appearance."""
        codes = self.codes(rows)
        _, first = np.unique(codes, return_index=True)
        first.sort()
        return [self.key(c) for c in codes[first]], first


class ClosureBudgetExceeded(BudgetExceeded):
    pass


class SubpowerClosure:
    """Subalgebra of a power generated by given tuples.

    ``ops`` lists ``(arity, table)`` with flat tables over the universe
    ``0..n-1`` (first argument most significant).  ``constants`` maps the
    index of each nullary operation to its ``(key_row, shadow_row)``.
    ``stop(closure, lo, hi)`` is called after each batch of new elements
    ``lo..hi-1``; a non-``None`` return value ends the run early.
    """

    def __init__(
        self,
        n: int,
        ops: Sequence[tuple[int, np.ndarray]],
        gens: np.ndarray,
        *,
        shadow: np.ndarray | None = None,
        constants: dict | None = None,
        budget: int | None = None,
        tuple_budget: int | None = None,
        stop: Callable | None = None,
    ):
        self.n = n
        self.ops = [(k, np.asarray(t, dtype=np.int64)) for k, t in ops]
        gens = np.asarray(gens, dtype=np.int64)
        if gens.ndim != 2:
            raise ValueError("generators must be a 2-d array")
        self.P = gens.shape[1]
        self.Q = 0 if shadow is None else np.asarray(shadow).shape[1]
        self.keyer = RowKeyer(n, self.P)
        self.budget = budget
        self.tuple_budget = tuple_budget
        self.stop = stop
        self.found = None
        self.maxk = max([k for k, _ in self.ops] + [1])
        self.index: dict = {}
        self._rows = _Grow(self.P, np.int32)
        self._shadow = _Grow(self.Q, np.int32)
        self._op = _Grow(1, np.int32)
        self._args = _Grow(self.maxk, np.int64)
        self._curried = [self._prepare(k, t) for k, t in self.ops]
        self._term_cache: dict[int, Term] = {}
        self.rounds: list[int] = []
        self._lo = 0
        sh = None if shadow is None else np.asarray(shadow, dtype=np.int64)
        for g in range(len(gens)):
            self._add(gens[g : g + 1], -1, [np.array([g])], None if sh is None else sh[g : g + 1])
        for oi, (k, _) in enumerate(self.ops):
            if k == 0:
                key_row, shadow_row = constants[oi]
                self._add(
                    np.asarray(key_row, dtype=np.int64)[None, :],
                    oi,
                    [],
                    None if shadow is None else np.asarray(shadow_row, dtype=np.int64)[None, :],
                )
        self.rounds.append(len(self))

    def __len__(self) -> int:
        return self._rows.n

    @property
    def rows(self) -> np.ndarray:
        return self._rows.view()

    @property
    def shadow(self) -> np.ndarray:
        return self._shadow.view()

    def origin(self, i: int) -> tuple[int, tuple[int, ...]]:
        op = int(self._op.data[i, 0])
        if op == -1:
            return -1, (int(self._args.data[i, 0]),)
        k = self.ops[op][0]
        return op, tuple(int(a) for a in self._args.data[i, :k])

    def find(self, row) -> int | None:
        key = self.keyer.key(self.keyer.codes(np.asarray(row, dtype=np.int64)[None, :])[0])
        return self.index.get(key)

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Element indices of rows known to lie in the closure."""
        codes = self.keyer.codes(rows)
        if self.keyer.exact:
            if getattr(self, "_sorted_for", None) != len(self):
                all_codes = self.keyer.codes(self.rows)
                self._order = np.argsort(all_codes)
                self._sorted = all_codes[self._order]
                self._sorted_for = len(self)
            pos = np.searchsorted(self._sorted, codes)
            pos = np.minimum(pos, len(self._sorted) - 1)
            if not np.array_equal(self._sorted[pos], codes):
                raise KeyError("row outside the closure")
            return self._order[pos]
        out = np.empty(len(rows), dtype=np.int64)
        for i, c in enumerate(codes):
            out[i] = self.index[self.keyer.key(c)]
        return out

    def _prepare(self, k: int, table: np.ndarray):
        if k < 2:
            return None
        T = table.reshape((self.n,) * k)
        best = None
        for j in range(k):
            maps = np.moveaxis(T, j, -1).reshape(-1, self.n)
            uniq, inv = np.unique(maps, axis=0, return_inverse=True)
            if best is None or len(uniq) < len(best[1]):
                best = (j, uniq, inv.reshape(-1))
        j, uniq, inv = best
        return {
            "free": j,
            "maps": uniq,
            "inv": inv,
            "keyer": RowKeyer(len(uniq), self.P),
            "index": {},
            "mids": _Grow(self.P, np.int64),
            "args": _Grow(k - 1, np.int64),
        }

    def _add(self, rows, op: int, args: list[np.ndarray], shadow=None) -> int:
        if len(args) > 1 and len(rows) > 1:
            # ties go to the lexicographically smallest argument list
            order = np.lexsort(args[::-1])
            rows = rows[order]
            args = [a[order] for a in args]
        keys, first = self.keyer.first_unique(rows)
        sel = []
        start = len(self)
        for key, pos in zip(keys, first):
            if key not in self.index:
                self.index[key] = start + len(sel)
                sel.append(pos)
        if not sel:
            return 0
        sel = np.asarray(sel)
        self._rows.extend(rows[sel])
        argmat = np.full((len(sel), self.maxk), -1, dtype=np.int64)
        for j, a in enumerate(args):
            argmat[:, j] = a[sel]
        self._args.extend(argmat)
        self._op.extend(np.full((len(sel), 1), op, dtype=np.int32))
        if self.Q:
            if shadow is None:
                k, table = self.ops[op]
                S = self._shadow.view()
                flat = np.zeros((len(sel), self.Q), dtype=np.int64)
                for j in range(k):
                    flat = flat * self.n + S[argmat[:, j]]
                shadow_rows = table[flat]
            else:
                shadow_rows = shadow[sel]
            self._shadow.extend(shadow_rows)
        end = len(self)
        if self.budget is not None and end > self.budget:
            raise ClosureBudgetExceeded(f"closure exceeded {self.budget} elements", reached=end)
        if self.stop is not None and self.found is None:
            res = self.stop(self, start, end)
            if res is not None:
                self.found = res
        return end - start

    def run(self) -> "SubpowerClosure":
        while self._lo < len(self) and self.found is None:
            lo, hi = self._lo, len(self)
            for oi, (k, table) in enumerate(self.ops):
                if self.found is not None:
                    return self
                if k == 1:
                    E = self.rows
                    for s in range(lo, hi, max(1, _CHUNK // max(1, self.P))):
                        e = min(hi, s + max(1, _CHUNK // max(1, self.P)))
                        self._add(table[E[s:e]], oi, [np.arange(s, e)])
                        if self.found is not None:
                            return self
                elif k >= 2:
                    self._round_curried(oi, lo, hi)
            self._lo = hi
            self.rounds.append(len(self))
        return self

    def _round_curried(self, oi: int, lo: int, hi: int) -> None:
        k, table = self.ops[oi]
        cur = self._curried[oi]
        j, maps, inv = cur["free"], cur["maps"], cur["inv"]
        E = self.rows.astype(np.int64)
        n_before = cur["mids"].n
        # curried tuples over side-argument tuples containing at least one new element
        m = k - 1
        for first_new in range(m):
            ranges = [(0, lo)] * first_new + [(lo, hi)] + [(0, hi)] * (m - 1 - first_new)
            if any(b <= a for a, b in ranges):
                continue
            rest = int(np.prod([b - a for a, b in ranges[1:]])) if m > 1 else 1
            a0, b0 = ranges[0]
            step = max(1, _CHUNK // max(1, rest * max(1, self.P)))
            for s0 in range(a0, b0, step):
                rr = [(s0, min(b0, s0 + step))] + ranges[1:]
                grids = np.meshgrid(*[np.arange(a, b) for a, b in rr], indexing="ij")
                side = [g.reshape(-1) for g in grids]
                flat = np.zeros((len(side[0]), self.P), dtype=np.int64)
                for col in side:
                    flat = flat * self.n + E[col]
                mids = inv[flat]
                keys, first = cur["keyer"].first_unique(mids)
                sel = []
                for key, pos in zip(keys, first):
                    if key not in cur["index"]:
                        cur["index"][key] = cur["mids"].n + len(sel)
                        sel.append(pos)
                if sel:
                    sel = np.asarray(sel)
                    cur["mids"].extend(mids[sel])
                    cur["args"].extend(np.stack([c[sel] for c in side], axis=1))
                    if self.tuple_budget is not None and cur["mids"].n > self.tuple_budget:
                        raise ClosureBudgetExceeded(
                            f"curried tuple store exceeded {self.tuple_budget}", reached=len(self)
                        )
        mids_all = cur["mids"].view()
        args_all = cur["args"].view()
        total = len(mids_all)
        # all curried tuples against new free values, new tuples against old free values
        for g0, g1, fa, fb in ((0, total, lo, hi), (n_before, total, 0, lo)):
            if g1 <= g0 or fb <= fa:
                continue
            nf = fb - fa
            step = max(1, _CHUNK // max(1, nf * max(1, self.P)))
            free_vals = E[fa:fb]
            for s in range(g0, g1, step):
                e = min(g1, s + step)
                G = mids_all[s:e]
                res = maps[G[:, None, :], free_vals[None, :, :]].reshape(-1, self.P)
                gi = np.repeat(np.arange(s, e), nf)
                fi = np.tile(np.arange(fa, fb), e - s)
                args = [args_all[gi, c] for c in range(m)]
                args.insert(j, fi)
                self._add(res, oi, args)
                if self.found is not None:
                    return

    def term(self, i: int, names: Sequence[str], variables: Sequence[Term] | None = None) -> Term:
        """Representative term of element ``i``; generator ``g`` becomes ``variables[g]``."""
        if variables is not getattr(self, "_term_vars", None):
            self._term_cache = {}
            self._term_vars = variables
        cache = self._term_cache
        stack = [i]
        while stack:
            e = stack[-1]
            if e in cache:
                stack.pop()
                continue
            op, args = self.origin(e)
            if op == -1:
                g = args[0]
                cache[e] = variables[g] if variables is not None else Var(g)
                stack.pop()
                continue
            missing = [a for a in args if a not in cache]
            if missing:
                stack.extend(missing)
                continue
            cache[e] = App(names[op], tuple(cache[a] for a in args))
            stack.pop()
        return cache[i]
