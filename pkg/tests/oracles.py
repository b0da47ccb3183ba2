"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's algorithms: matrices are plain tuples
``(n, ops, F)`` with ``ops`` a list of ``(name, arity, table)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass


def cell(n, args):
    i = 0
    for a in args:
        i = i * n + a
    return i


def apply(n, table, args):
    return table[cell(n, args)]


# Leibniz congruence by pair marking ------------------------------------------------


def translations(n, ops, universe=None):
    """All one-step translations restricted to ``universe`` (a list), as dicts."""
    U = list(range(n)) if universe is None else list(universe)
    out = []
    for _, k, table in ops:
        for j in range(k):
            for side in itertools.product(U, repeat=k - 1):
                def p(x, side=side, j=j, table=table):
                    args = list(side[:j]) + [x] + list(side[j:])
                    return apply(n, table, args)
                out.append(p)
    return out


def leibniz_pairs(n, ops, F, universe=None):
    """Class id per element of ``universe``: the coarsest compatible congruence."""
    U = list(range(n)) if universe is None else list(universe)
    trans = translations(n, ops, U)
    marked = set()
    for a, b in itertools.combinations(U, 2):
        if (a in F) != (b in F):
            marked.add((a, b))
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(U, 2):
            if (a, b) in marked:
                continue
            for p in trans:
                x, y = p(a), p(b)
                if x != y and (min(x, y), max(x, y)) in marked:
                    marked.add((a, b))
                    changed = True
                    break
    cls = {}
    labels = {}
    for a in U:
        for b in U:
            if b in labels and (min(a, b), max(a, b)) not in marked and a != b:
                labels[a] = labels[b]
                break
        else:
            labels[a] = cls.setdefault(a, len(cls))
    return labels


def normalised(labels, U):
    seen = {}
    return tuple(seen.setdefault(labels[a], len(seen)) for a in U)


def reduce(n, ops, F):
    lab = leibniz_pairs(n, ops, F)
    classes = sorted(set(lab.values()), key=lambda c: min(a for a in range(n) if lab[a] == c))
    idx = {c: i for i, c in enumerate(classes)}
    rep = [min(a for a in range(n) if lab[a] == c) for c in classes]
    m = len(classes)
    new_ops = []
    for name, k, table in ops:
        t = [idx[lab[apply(n, table, [rep[x] for x in args])]] for args in itertools.product(range(m), repeat=k)]
        new_ops.append((name, k, t))
    return m, new_ops, {idx[lab[a]] for a in F}


# subuniverses ------------------------------------------------------------------


def closure(n, ops, seed):
    S = set(seed)
    changed = True
    while changed:
        changed = False
        for _, k, table in ops:
            for args in itertools.product(sorted(S), repeat=k):
                v = apply(n, table, args)
                if v not in S:
                    S.add(v)
                    changed = True
    return frozenset(S)


def subuniverses(n, ops):
    out = set()
    for r in range(1, n + 1):
        for seed in itertools.combinations(range(n), r):
            out.add(closure(n, ops, seed))
    return sorted((tuple(sorted(s)) for s in out), key=lambda s: (len(s), s))


# free algebras -------------------------------------------------------------------


def free(members, k, cap=4000):
    """Term functions in ``k`` variables over all members, as tuples of tuples; None past ``cap``."""
    points = [list(itertools.product(range(n), repeat=k)) for n, _, _ in members]
    ops = members[0][1]
    proj = [tuple(tuple(p[j] for p in pts) for pts in points) for j in range(k)]
    elems = list(dict.fromkeys(proj))
    known = set(elems)
    for oi, (_, ar, _) in enumerate(ops):
        if ar == 0:
            c = tuple(tuple([members[i][1][oi][2][0]] * len(points[i])) for i in range(len(members)))
            if c not in known:
                known.add(c)
                elems.append(c)
    changed = True
    while changed:
        changed = False
        for oi, (_, ar, _) in enumerate(ops):
            if ar == 0:
                continue
            for combo in itertools.product(list(elems), repeat=ar):
                val = tuple(
                    tuple(
                        apply(members[i][0], members[i][1][oi][2], [e[i][q] for e in combo])
                        for q in range(len(points[i]))
                    )
                    for i in range(len(members))
                )
                if val not in known:
                    known.add(val)
                    elems.append(val)
                    changed = True
                    if len(elems) > cap:
                        return None
    return elems


def unary_clone(n, ops, cap=100000):
    """All unary term operations of an algebra as tuples."""
    ident = tuple(range(n))
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for _, k, table in ops:
            for combo in itertools.product(sorted(elems), repeat=k):
                if not any(c in frontier for c in combo):
                    continue
                v = tuple(apply(n, table, [c[a] for c in combo]) for a in range(n))
                if v not in elems:
                    elems.add(v)
                    new.append(v)
        frontier = new
        if len(elems) > cap:
            raise RuntimeError("cap")
    return elems


# classification ----------------------------------------------------------------------


@dataclass
class OracleVerdicts:
    protoalgebraic: bool
    equivalential: bool
    weakly_algebraizable: bool
    algebraizable: bool
    truth_equational: bool
    delta_size: int
    tau_size: int
    filters: list

    def vector(self):
        return (
            self.protoalgebraic,
            self.equivalential,
            self.weakly_algebraizable,
            self.algebraizable,
            self.truth_equational,
        )


def one_variable_filters(T1, members):
    pts = [(i, a) for i, (n, _, _) in enumerate(members) for a in range(n)]
    S = len(T1)
    sat = [[T1[t][i][a] in members[i][2] for (i, a) in pts] for t in range(S)]
    out = []
    for mask in range(1 << S):
        G = [t for t in range(S) if mask >> t & 1]
        good = [q for q in range(len(pts)) if all(sat[t][q] for t in G)]
        cons = [t for t in range(S) if all(sat[t][q] for q in good)]
        if cons == G:
            out.append(tuple(G))
    return sorted(out, key=lambda g: (len(g), g))


def classify(members, cap=4000, filter_cap=14):
    """Literal maximal-candidate classification of a family of reduced matrices.

    Returns None when a free algebra or the subset enumeration is too large.
    """
    T2 = free(members, 2, cap)
    T1 = free(members, 1, cap)
    if T2 is None or T1 is None or len(T1) > filter_cap:
        return None
    delta = []
    for t in T2:
        if all(t[i][cell(n, (a, a))] in F for i, (n, _, F) in enumerate(members) for a in range(n)):
            delta.append(t)
    R = []
    for i, (n, _, F) in enumerate(members):
        R.append({(a, b) for a in range(n) for b in range(n) if all(t[i][cell(n, (a, b))] in F for t in delta)})
    proto = all(not ((a, b) in R[i] and a in F and b not in F) for i, (n, _, F) in enumerate(members) for a in range(n) for b in range(n))
    closed = True
    for i, (n, ops, _) in enumerate(members):
        for _, k, table in ops:
            for pairs in itertools.product(sorted(R[i]), repeat=k):
                x = apply(n, table, [p[0] for p in pairs])
                y = apply(n, table, [p[1] for p in pairs])
                if (x, y) not in R[i]:
                    closed = False
    equiv = proto and closed
    groups = {}
    for t, e in enumerate(T1):
        key = tuple(e[i][a] for i, (n, _, F) in enumerate(members) for a in sorted(F))
        groups.setdefault(key, []).append(t)
    tau = [(x, y) for g in groups.values() for x in g for y in g]
    sub_ok = True
    for i, (n, ops, F) in enumerate(members):
        for B in subuniverses(n, ops):
            lab = leibniz_pairs(n, ops, F & set(B), B)
            for b in B:
                solved = all(lab[T1[x][i][b]] == lab[T1[y][i][b]] for x, y in tau)
                if solved != (b in F):
                    sub_ok = False
    # filters on Tm(x)
    S = len(T1)
    index = {e: t for t, e in enumerate(T1)}
    nm = len(members)

    def op_on_T1(oi, args):
        return index[
            tuple(
                tuple(
                    apply(members[i][0], members[i][1][oi][2], [T1[t][i][a] for t in args])
                    for a in range(members[i][0])
                )
                for i in range(nm)
            )
        ]

    ops = members[0][1]
    t1_ops = []
    for oi, (name, k, _) in enumerate(ops):
        t1_ops.append((name, k, [op_on_T1(oi, args) for args in itertools.product(range(S), repeat=k)]))

    def compose(e, phi):
        return index[tuple(tuple(T1[e][i][T1[phi][i][a]] for a in range(members[i][0])) for i in range(nm))]

    filters = one_variable_filters(T1, members)
    te = True
    for G in filters:
        lab = leibniz_pairs(S, t1_ops, set(G))
        for phi in range(S):
            solved = all(lab[compose(x, phi)] == lab[compose(y, phi)] for x, y in tau)
            if solved != (phi in G):
                te = False
    tau_count = sum(len(g) * (len(g) + 1) // 2 for g in groups.values())
    return OracleVerdicts(proto, equiv, proto and sub_ok, equiv and sub_ok, te, len(delta), tau_count, filters)
