"""Words, substitutions and exact integer matrices over the alphabet {1..d}.

Words are plain ``str`` objects whose characters are the digits ``'1'..'d'``
(so d <= 9).  This keeps substitution application at C speed through
``str.translate`` while staying readable in tests and file formats.

Matrices are tuples of tuples of Python ints (arbitrary precision, hashable).
"""
from __future__ import annotations

from functools import cached_property
from itertools import product as _iproduct
from typing import Iterable, Mapping, Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]

MAX_ALPHABET = 9


def _check_word(w: str, d: int) -> None:
    for c in set(w):
        if not ("1" <= c <= str(d)):
            raise ValueError(f"letter {c!r} outside alphabet 1..{d}")


class Substitution:
    """Non-erasing substitution given by the images of the letters 1..d."""

    def __init__(self, images: Sequence[str] | Mapping[int, str], name: str | None = None):
        if isinstance(images, Mapping):
            d = len(images)
            if sorted(images) != list(range(1, d + 1)):
                raise ValueError("image map must be keyed by 1..d")
            images = [images[i] for i in range(1, d + 1)]
        images = tuple(str(w) for w in images)
        d = len(images)
        if not 1 <= d <= MAX_ALPHABET:
            raise ValueError(f"alphabet size must be in 1..{MAX_ALPHABET}")
        for w in images:
            if not w:
                raise ValueError("substitution must be non-erasing")
            _check_word(w, d)
        self.images = images
        self.d = d
        self.name = name

    def __call__(self, w: str) -> str:
        return apply(self, w)

    def image(self, i: int) -> str:
        return self.images[i - 1]

    @cached_property
    def table(self) -> dict[int, str]:
        return {ord(str(i + 1)): w for i, w in enumerate(self.images)}

    @cached_property
    def matrix(self) -> Matrix:
        return incidence(self)

    @cached_property
    def inverse_matrix(self) -> Matrix:
        return inverse_unimodular(self.matrix)

    @cached_property
    def first_letters(self) -> tuple[int, ...]:
        return tuple(int(w[0]) for w in self.images)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        body = ", ".join(f"{i + 1}->{w}" for i, w in enumerate(self.images))
        return f"Substitution({self.name + ': ' if self.name else ''}{body})"

    def to_text(self) -> str:
        return "".join(f"{i + 1}:{w}\n" for i, w in enumerate(self.images))

    @classmethod
    def from_text(cls, text: str) -> "Substitution":
        images = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, w = line.partition(":")
            images[int(k)] = w.strip()
        return cls(images)


def identity(d: int = 3) -> Substitution:
    return Substitution([str(i) for i in range(1, d + 1)], name="id")


def permutation(perm: Sequence[int], name: str | None = None) -> Substitution:
    """Letter-to-letter substitution i -> perm[i-1]."""
    return Substitution([str(p) for p in perm], name=name)


def apply(sigma: Substitution, w: str) -> str:
    return w.translate(sigma.table)


def abelianize(w: str, d: int = 3) -> Vector:
    return tuple(w.count(str(i)) for i in range(1, d + 1))


def incidence(sigma: Substitution) -> Matrix:
    cols = [abelianize(w, sigma.d) for w in sigma.images]
    return tuple(tuple(cols[j][i] for j in range(sigma.d)) for i in range(sigma.d))


def compose(sigma: Substitution, tau: Substitution) -> Substitution:
    """The substitution i -> sigma(tau(i))."""
    if sigma.d != tau.d:
        raise ValueError("alphabet mismatch")
    return Substitution([apply(sigma, w) for w in tau.images])


def compose_all(subs: Iterable[Substitution], d: int = 3) -> Substitution:
    """sigma_0 sigma_1 ... sigma_{n-1}, evaluated right to left."""
    subs = list(subs)
    out = identity(subs[0].d if subs else d)
    for s in reversed(subs):
        out = compose(s, out)
    return out


# ---------------------------------------------------------------- matrices

def mat_identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def det(a: Matrix) -> int:
    """Bareiss fraction-free elimination, exact for integer input."""
    n = len(a)
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def _minor(a: Matrix, i: int, j: int) -> Matrix:
    return tuple(tuple(r[:j] + r[j + 1:]) for k, r in enumerate(a) if k != i)


def adjugate(a: Matrix) -> Matrix:
    n = len(a)
    if n == 1:
        return ((1,),)
    cof = [[(-1) ** (i + j) * det(_minor(a, i, j)) for j in range(n)] for i in range(n)]
    return transpose(tuple(tuple(r) for r in cof))


def inverse_unimodular(a: Matrix) -> Matrix:
    dt = det(a)
    if abs(dt) != 1:
        raise ValueError(f"matrix is not unimodular (det = {dt})")
    return tuple(tuple(dt * x for x in row) for row in adjugate(a))


def is_positive(a: Matrix) -> bool:
    return all(x > 0 for row in a for x in row)


def is_unimodular(sigma: Substitution) -> bool:
    return abs(det(sigma.matrix)) == 1


def charpoly3(a: Matrix) -> tuple[int, int, int, int]:
    """Coefficients (1, c2, c1, c0) of det(xI - a) for a 3x3 matrix."""
    if len(a) != 3:
        raise ValueError("only d = 3 is supported")
    tr = a[0][0] + a[1][1] + a[2][2]
    m2 = (a[0][0] * a[1][1] - a[0][1] * a[1][0]
          + a[0][0] * a[2][2] - a[0][2] * a[2][0]
          + a[1][1] * a[2][2] - a[1][2] * a[2][1])
    return (1, -tr, m2, -det(a))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def is_irreducible_charpoly(a: Matrix) -> bool:
    """Irreducibility over Q of the characteristic polynomial of a 3x3 matrix.

    A monic integer cubic is reducible iff it has an integer root, and such a
    root divides the constant term.
    """
    if len(a) != 3:
        raise ValueError("irreducibility test implemented for d = 3 only")
    _, c2, c1, c0 = charpoly3(a)
    if c0 == 0:
        return False
    for r in _divisors(c0):
        for s in (r, -r):
            if s ** 3 + c2 * s * s + c1 * s + c0 == 0:
                return False
    return True


def matrix_to_csv(a: Matrix) -> str:
    return "".join(",".join(str(x) for x in row) + "\n" for row in a)


def matrix_from_csv(text: str) -> Matrix:
    return tuple(tuple(int(x) for x in line.split(","))
                 for line in text.splitlines() if line.strip())


# ---------------------------------------------------------------- balance

def balance_constant(factors: Iterable[str], d: int = 3) -> int:
    """Max of | |u|_j - |v|_j | over equal-length pairs u, v of the given set."""
    lo: dict[int, list[int]] = {}
    hi: dict[int, list[int]] = {}
    for w in factors:
        n = len(w)
        ab = abelianize(w, d)
        if n not in lo:
            lo[n], hi[n] = list(ab), list(ab)
        else:
            lo[n] = [min(a, b) for a, b in zip(lo[n], ab)]
            hi[n] = [max(a, b) for a, b in zip(hi[n], ab)]
    return max((h - l for n in lo for l, h in zip(lo[n], hi[n])), default=0)


def factors_of(words: Iterable[str], max_len: int) -> set[str]:
    out = set()
    for w in words:
        for n in range(1, min(max_len, len(w)) + 1):
            out.update(w[k:k + n] for k in range(len(w) - n + 1))
    return out


def all_words(d: int, n: int) -> Iterable[str]:
    for t in _iproduct(range(1, d + 1), repeat=n):
        yield "".join(map(str, t))
