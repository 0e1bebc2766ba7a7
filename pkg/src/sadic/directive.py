"""Directive sequences, limit-word prefixes and finite witnesses for PRICE.

A ``DirectiveSequence`` evaluates sigma_n lazily.  Terms are memoized in an
append-only list under a lock, so concurrent readers always see the same
value for the same index.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import cf
from .words import (Matrix, Substitution, apply, balance_constant, factors_of,
                    is_irreducible_charpoly, is_positive, mat_identity, mat_mul)

TOKENS: dict[str, Substitution] = {}
for _s in cf.ar_substitutions() + cf.brun_substitutions() + cf.brun_sigma_substitutions():
    TOKENS[_s.name] = _s


class DirectiveSequence:
    """Lazily evaluated sequence (sigma_n)_{n >= 0}.

    ``rule(n)`` must be deterministic, or the sequence must be built from an
    ``extend`` callback that appends terms in order (used for expansions and
    random sequences, whose n-th term depends on the previous ones).
    """

    def __init__(self, rule: Callable[[int], Substitution] | None = None, *,
                 extend: Callable[[list], None] | None = None,
                 length: int | None = None, spec: str | None = None):
        if (rule is None) == (extend is None):
            raise ValueError("give exactly one of rule / extend")
        self._rule = rule
        self._extend = extend
        self.length = length            # None = infinite
        self.spec = spec
        self._terms: list[Substitution] = []
        self._prefix: list[Matrix] = []  # M_[0,n) for n = 0..len-1
        self._chain: list[int] = []
        self._lock = threading.Lock()

    # -- constructors
    @classmethod
    def periodic(cls, period: Sequence[Substitution]):
        period = list(period)
        return cls(lambda n: period[n % len(period)],
                   spec="periodic: " + " ".join(_name(s) for s in period))

    @classmethod
    def eventually_periodic(cls, prefix: Sequence[Substitution], period: Sequence[Substitution]):
        prefix, period = list(prefix), list(period)
        k = len(prefix)
        return cls(lambda n: prefix[n] if n < k else period[(n - k) % len(period)],
                   spec=" ".join(_name(s) for s in prefix) + " periodic: "
                   + " ".join(_name(s) for s in period))

    @classmethod
    def finite(cls, terms: Sequence[Substitution]):
        terms = list(terms)
        return cls(lambda n: terms[n], length=len(terms),
                   spec=" ".join(_name(s) for s in terms))

    @classmethod
    def brun(cls, point: Sequence[float]):
        """Sequence beta_{i_1} beta_{i_2} ... of the Brun expansion of point."""
        beta = cf.brun_substitutions()
        state = {"x": tuple(float(c) for c in point)}

        def extend(terms):
            x = state["x"]
            if x[1] == 0:
                raise ValueError("Brun expansion terminated (x2 = 0)")
            b, state["x"] = cf.brun_step(x)
            terms.append(beta[b - 1])

        return cls(extend=extend, spec=f"brun:{float(point[0])!r},{float(point[1])!r}")

    @classmethod
    def ar(cls, vector: Sequence[float]):
        alpha = cf.ar_substitutions()
        state = {"v": tuple(float(c) for c in vector)}

        def extend(terms):
            r = cf.ar_step(state["v"])
            if r is None:
                raise ValueError("AR expansion left the domain of the algorithm")
            i, state["v"] = r
            terms.append(alpha[i - 1])

        return cls(extend=extend, spec="ar:" + ",".join(repr(float(c)) for c in vector))

    @classmethod
    def random(cls, choices: Sequence[Substitution], seed: int, max_run: int | None = None):
        """i.i.d. uniform choices, optionally never repeating a term more than
        max_run times in a row (terms generated in order from one seeded stream)."""
        choices = list(choices)
        rng = np.random.default_rng(seed)

        def extend(terms):
            while True:
                s = choices[int(rng.integers(len(choices)))]
                if max_run is None or len(terms) < max_run or \
                        any(t != s for t in terms[-max_run:]):
                    terms.append(s)
                    return

        return cls(extend=extend, spec=f"random:seed={seed},max_run={max_run}")

    @classmethod
    def parse(cls, text: str) -> "DirectiveSequence":
        """Parse ``a1 a2 periodic: b3 b2``, ``periodic: a1 a2 a3``, ``brun:x1,x2``
        or ``ar:v1,v2,v3``."""
        text = text.strip()
        low = text.lower()
        if low.startswith("brun:"):
            x1, x2 = (float(c) for c in text[5:].split(","))
            return cls.brun((x1, x2))
        if low.startswith("ar:"):
            return cls.ar([float(c) for c in text[3:].split(",")])
        head, sep, tail = text.partition("periodic:")

        def toks(s):
            try:
                return [TOKENS[t] for t in s.split()]
            except KeyError as e:
                raise ValueError(f"unknown substitution token {e.args[0]!r}") from None

        pre = toks(head)
        if sep:
            per = toks(tail)
            if not per:
                raise ValueError("empty periodic part")
            return cls.eventually_periodic(pre, per) if pre else cls.periodic(per)
        if not pre:
            raise ValueError("empty directive sequence")
        return cls.finite(pre)

    def __str__(self):
        return self.spec or "<directive sequence>"

    # -- evaluation
    def _fill(self, n: int) -> None:
        if self.length is not None and n >= self.length:
            raise IndexError(f"finite directive sequence has {self.length} terms")
        if n < len(self._terms):
            return
        with self._lock:
            while len(self._terms) <= n:
                if self._rule is not None:
                    self._terms.append(self._rule(len(self._terms)))
                else:
                    self._extend(self._terms)

    def term(self, n: int) -> Substitution:
        self._fill(n)
        return self._terms[n]

    __getitem__ = term

    def terms(self, k: int, l: int) -> list[Substitution]:
        return [self.term(n) for n in range(k, l)]

    def available(self, n: int) -> bool:
        return self.length is None or n < self.length

    def matrix(self, n: int) -> Matrix:
        return self.term(n).matrix

    def prefix_matrix(self, n: int) -> Matrix:
        """M_[0,n), memoized."""
        if n < len(self._prefix):
            return self._prefix[n]
        if n > 0:
            self._fill(n - 1)
        with self._lock:
            if not self._prefix:
                self._prefix.append(mat_identity(self._terms[0].d if self._terms else 3))
            while len(self._prefix) <= n:
                k = len(self._prefix)
                self._prefix.append(mat_mul(self._prefix[-1], self._terms[k - 1].matrix))
        return self._prefix[n]

    def shifted(self, k: int) -> "DirectiveSequence":
        return DirectiveSequence(lambda n: self.term(n + k),
                                 length=None if self.length is None else self.length - k,
                                 spec=f"shift({self.spec},{k})")

    # -- letter chain for limit words
    def letter_chain(self, n: int, horizon: int = 48) -> list[int]:
        """Letters i_0, i_1, ..., i_n with f_k(i_{k+1}) = i_k for the first-letter
        maps f_k(j) = first letter of sigma_k(j).

        Chosen forward: i_0 is the smallest letter in the image of f_[0,H)
        and each next letter the smallest preimage that still lies in the
        image of f_[k+1,H), H = n + horizon.  Memoized, so chains of
        different lengths are prefixes of one another.
        """
        with self._lock:
            chain = self._chain
        if len(chain) > n:
            return chain[:n + 1]
        H = n + horizon
        if self.length is not None:
            H = min(H, self.length)
        maps = [self.term(k).first_letters for k in range(H)]
        d = self.term(0).d
        # images[k] = image of f_k o ... o f_{H-1}
        images = [None] * (H + 1)
        images[H] = set(range(1, d + 1))
        for k in range(H - 1, -1, -1):
            images[k] = {maps[k][j - 1] for j in images[k + 1]}
        with self._lock:
            chain = self._chain
            if not chain:
                chain.append(min(images[0]))
            while len(chain) <= n:
                k = len(chain) - 1
                if k >= H:
                    raise ValueError("directive sequence too short for the requested chain")
                cands = [j for j in range(1, d + 1) if maps[k][j - 1] == chain[k]]
                good = [j for j in cands if j in images[k + 1]]
                if not (good or cands):
                    raise RuntimeError("letter chain dead end; increase horizon")
                chain.append(min(good or cands))
            return chain[:n + 1]


def _name(s: Substitution) -> str:
    """Token name of s, or its ``i:word`` text in braces when it has none
    (such specs are descriptive only and do not parse back)."""
    if s.name and s.name in TOKENS and TOKENS[s.name] == s:
        return s.name
    for k, v in TOKENS.items():
        if v == s:
            return k
    return "{" + ",".join(s.to_text().split()) + "}"


# ---------------------------------------------------------------- products

def product_matrix(seq: DirectiveSequence, k: int, l: int) -> Matrix:
    """M_[k,l) = M_k M_{k+1} ... M_{l-1} (exact)."""
    if k > l:
        raise ValueError("need k <= l")
    d = seq.term(0).d
    out = mat_identity(d)
    for n in range(k, l):
        out = mat_mul(out, seq.matrix(n))
    return out


def product_substitution(seq: DirectiveSequence, k: int, l: int) -> Substitution:
    from .words import compose_all
    return compose_all(seq.terms(k, l), d=seq.term(0).d)


def image_word(seq: DirectiveSequence, k: int, l: int, w: str) -> str:
    """sigma_[k,l)(w), applied innermost first."""
    for n in range(l - 1, k - 1, -1):
        w = apply(seq.term(n), w)
    return w


def is_primitive_window(seq: DirectiveSequence, k: int, l_max: int) -> int | None:
    if l_max <= k:
        raise ValueError("need l_max > k")
    m = mat_identity(seq.term(k).d)
    for l in range(k + 1, l_max + 1):
        if not seq.available(l - 1):
            return None
        m = mat_mul(m, seq.matrix(l - 1))
        if is_positive(m):
            return l
    return None


# ---------------------------------------------------------------- limit words

def limit_word_prefix(seq: DirectiveSequence, depth: int, min_len: int, level: int = 0) -> str:
    """sigma_[level,N)(i_N) for the smallest N <= depth reaching length min_len.

    The letters i_N come from ``seq.letter_chain``, so outputs for increasing
    N are prefixes of each other and of one limit word.  With level > 0 this
    is a prefix of the limit word omega^(level) with
    sigma_[0,level)(omega^(level)) = omega.
    """
    chain = seq.letter_chain(depth)
    m = mat_identity(seq.term(0).d)
    N = level
    # column sums of M_[level,N) are the image lengths |sigma_[level,N)(j)|
    while sum(row[chain[N] - 1] for row in m) < min_len:
        if N >= depth:
            raise ValueError(f"min_len {min_len} not reached within depth {depth}")
        m = mat_mul(m, seq.matrix(N))
        N += 1
    return image_word(seq, level, N, str(chain[N]))


def language_factors(seq: DirectiveSequence, m: int, max_len: int, depth: int) -> set[str]:
    """Factors of length 1..max_len of sigma_[m,depth)(i) over all letters i."""
    if depth < m:
        raise ValueError("need depth >= m")
    d = seq.term(0).d
    words = [image_word(seq, m, depth, str(i)) for i in range(1, d + 1)]
    return factors_of(words, max_len)


def find_recurrence_window(seq: DirectiveSequence, l: int, search_max: int) -> int | None:
    if l < 1:
        raise ValueError("need l >= 1")
    if not seq.available(l - 1):
        return None
    head = seq.terms(0, l)
    for n in range(1, search_max + 1):
        if not seq.available(n + l - 1):
            return None
        if seq.terms(n, n + l) == head:
            return n
    return None


# ---------------------------------------------------------------- PRICE

@dataclass
class PriceReport:
    primitivity_window: int | None
    recurrence_witnesses: list[tuple[int, int]] = field(default_factory=list)
    irreducibility_checks: list[tuple[int, int, bool]] = field(default_factory=list)
    balance_lower_bounds: list[tuple[int, int]] = field(default_factory=list)
    joint_witnesses: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"primitivity_window": self.primitivity_window,
                "recurrence_witnesses": [list(t) for t in self.recurrence_witnesses],
                "irreducibility_checks": [list(t) for t in self.irreducibility_checks],
                "balance_lower_bounds": [list(t) for t in self.balance_lower_bounds],
                "joint_witnesses": [list(t) for t in self.joint_witnesses]}


def price_report(seq: DirectiveSequence, depth: int, l_list: Sequence[int],
                 factor_len: int, balance_depth: int = 8) -> PriceReport:
    """Finite witnesses for primitivity (P), recurrence (R), irreducibility (I)
    and balance (C).  Never claims the infinite properties.

    Balance at level m is measured on images sigma_[m, m+balance_depth)(i).
    A recurrence witness (l, n) is listed as joint when M_[0,l) is positive,
    i.e. the recurring block ends with a positive matrix.
    """
    rep = PriceReport(is_primitive_window(seq, 0, depth) if depth > 0 else None)
    for l in l_list:
        if depth - l < 1:
            continue
        n = find_recurrence_window(seq, l, depth - l)
        if n is None:
            continue
        rep.recurrence_witnesses.append((l, n))
        d = seq.term(0).d
        if d == 3:
            rep.irreducibility_checks.append((0, l, is_irreducible_charpoly(product_matrix(seq, 0, l))))
            rep.irreducibility_checks.append((n, n + l, is_irreducible_charpoly(product_matrix(seq, n, n + l))))
        lvl = n + l
        facs = language_factors(seq, lvl, factor_len, lvl + balance_depth)
        rep.balance_lower_bounds.append((lvl, balance_constant(facs, d)))
        if is_positive(product_matrix(seq, 0, l)):
            rep.joint_witnesses.append((l, n))
    return rep
