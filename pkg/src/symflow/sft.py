"""Subshifts of finite type and locally constant observables.

An SFT is the set of bi-infinite symbol sequences over {0, ..., k-1} whose
consecutive pairs are allowed by a 0/1 transition matrix A.  Everything
downstream (pressure, spectra, horseshoes) reduces to finite linear algebra
on A or on a block recoding of it, so this module also carries the shared
Perron-root power iteration and the word enumeration with its budget guard.
"""

from __future__ import annotations

import numpy as np

from . import graphs
from .errors import DomainError, InputError

__all__ = [
    "Sft",
    "LocallyConstantFunction",
    "BlockRecoding",
    "validate_and_trim",
    "is_irreducible",
    "topological_entropy",
    "admissible_words",
    "block_recode",
    "perron_root",
    "ENUMERATION_BUDGET",
]

ENUMERATION_BUDGET = 2**24

Word = tuple  # words are plain tuples of ints throughout


class Sft:
    """Subshift of finite type with transition matrix ``A``.

    A sequence x is admissible when ``A[x_n, x_{n+1}] == 1`` for every n.
    Instances are immutable in spirit; ``A`` is kept read-only and word
    enumerations are cached on the instance.
    """

    def __init__(self, A):
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise InputError("transition matrix must be square and non-empty")
        if not np.isin(A, (0, 1)).all():
            raise InputError("transition matrix entries must be 0 or 1")
        self.A = A.astype(np.int8)
        self.A.setflags(write=False)
        self._word_cache: dict[int, list[Word]] = {}

    @property
    def k(self) -> int:
        return self.A.shape[0]

    def successors(self, a: int) -> np.ndarray:
        return np.flatnonzero(self.A[a])

    def is_admissible(self, word) -> bool:
        word = tuple(word)
        if not all(0 <= a < self.k for a in word):
            return False
        return all(self.A[word[i], word[i + 1]] for i in range(len(word) - 1))

    def __eq__(self, other):
        return isinstance(other, Sft) and self.A.shape == other.A.shape and (self.A == other.A).all()

    def __hash__(self):
        return hash((self.k, self.A.tobytes()))

    def __repr__(self):
        return f"Sft(k={self.k}, edges={int(self.A.sum())})"

    def to_json(self) -> dict:
        return {"k": self.k, "A": self.A.astype(int).tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "Sft":
        if not isinstance(doc, dict) or "A" not in doc:
            raise InputError("SFT document must be an object with an 'A' matrix")
        sft = cls(doc["A"])
        if "k" in doc and int(doc["k"]) != sft.k:
            raise InputError(f"declared k={doc['k']} does not match A of size {sft.k}")
        return sft


def validate_and_trim(sft: Sft) -> tuple[Sft, np.ndarray]:
    """Remove symbols that no bi-infinite sequence can visit.

    Iterates dropping symbols with no successor or no predecessor until a
    fixpoint and returns the trimmed SFT plus the kept symbol indices.
    """
    A = sft.A.astype(int)
    keep = np.arange(sft.k)
    while True:
        alive = (A.sum(axis=1) > 0) & (A.sum(axis=0) > 0)
        if alive.all():
            break
        A = A[np.ix_(alive, alive)]
        keep = keep[alive]
        if A.size == 0:
            raise DomainError("degenerate SFT: every symbol is stranded", name="degenerate_sft")
    return Sft(A), keep


def is_irreducible(sft: Sft) -> bool:
    """True when the transition graph is strongly connected (and has edges)."""
    if sft.A.sum(axis=1).min() < 1 or sft.A.sum(axis=0).min() < 1:
        return False
    return graphs.is_strongly_connected(sft.A)


def _require_irreducible(sft: Sft):
    if not is_irreducible(sft):
        raise DomainError("transition matrix is reducible; trim or restrict first", name="reducible")


def perron_root(B, tol: float = 1e-12, maxiter: int = 10**6, rng=None):
    """Perron root and positive left/right eigenvectors of an irreducible
    nonnegative matrix.

    Power iteration on a diagonally shifted copy (the shift kills
    periodicity without moving the eigenvectors); Collatz-Wielandt ratio
    bounds supply the stopping test, so the root comes back with relative
    error <= tol.  Vectors are normalised to sum 1.

    Parameters
    ----------
    B : array_like, nonnegative, irreducible
    tol : relative tolerance on the root
    maxiter : iteration cap
    rng : optional numpy Generator; randomises the starting vector (used to
        check that results do not depend on initialisation)
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    c = B.sum(axis=1).max()
    if c <= 0:
        raise DomainError("matrix has no positive entries", name="degenerate")
    M = B + c * np.eye(n)

    def start():
        if rng is None:
            return np.full(n, 1.0 / n)
        v = rng.uniform(0.5, 1.5, size=n)
        return v / v.sum()

    def iterate(M):
        v = start()
        for _ in range(maxiter):
            Mv = M @ v
            ratios = Mv / v
            lo, hi = float(ratios.min()), float(ratios.max())
            v = Mv / Mv.sum()
            if hi - lo <= tol * lo:
                return 0.5 * (lo + hi), v
        raise DomainError(
            f"power iteration did not converge within {maxiter} iterations", name="iteration_cap"
        )

    lam_r, right = iterate(M)
    _, left = iterate(M.T)
    return lam_r - c, right, left


def topological_entropy(sft: Sft, tol: float = 1e-12) -> float:
    """log of the Perron root of A; requires an irreducible SFT."""
    _require_irreducible(sft)
    lam, _, _ = perron_root(sft.A, tol=tol)
    return float(np.log(lam))


def _word_count(sft: Sft, n: int) -> float:
    if n == 1:
        return float(sft.k)
    return float(np.linalg.matrix_power(sft.A.astype(float), n - 1).sum())


def admissible_words(sft: Sft, n: int, budget: int = ENUMERATION_BUDGET) -> list[Word]:
    """All admissible words of length n in lexicographic order."""
    if n < 1:
        raise InputError("word length must be >= 1")
    if n in sft._word_cache:
        return sft._word_cache[n]
    if _word_count(sft, n) > budget:
        raise DomainError(
            f"enumeration too large: {int(_word_count(sft, n))} words of length {n} "
            f"exceed the budget of {budget}",
            name="enumeration_too_large",
        )
    words = [(a,) for a in range(sft.k)]
    succ = [sft.successors(a).tolist() for a in range(sft.k)]
    for _ in range(n - 1):
        words = [w + (b,) for w in words for b in succ[w[-1]]]
    if len(words) <= 2**18:
        sft._word_cache[n] = words
    return words


class BlockRecoding:
    """Recoding of an SFT onto its admissible m-words.

    ``sft`` is the recoded system, ``words[i]`` the m-word behind symbol i,
    and ``index`` the inverse map.  Edges i -> j exist exactly when the two
    words overlap in m-1 symbols and the joined (m+1)-word is admissible,
    so entropy is preserved.
    """

    def __init__(self, base: Sft, m: int, budget: int = ENUMERATION_BUDGET):
        words = admissible_words(base, m, budget=budget)
        N = len(words)
        index = {w: i for i, w in enumerate(words)}
        A = np.zeros((N, N), dtype=np.int8)
        for i, w in enumerate(words):
            for j, w2 in enumerate(words):
                if w[1:] == w2[:-1] and base.A[w[-1], w2[-1]]:
                    A[i, j] = 1
        self.base = base
        self.m = m
        self.words = words
        self.index = index
        self.sft = Sft(A)

    def edge_word(self, i: int, j: int) -> Word:
        """The (m+1)-word spelled out by traversing edge i -> j."""
        return self.words[i] + (self.words[j][-1],)

    def project_cycle(self, cycle: list[int]) -> Word:
        """Ambient periodic word read off a cycle of recoded symbols."""
        return tuple(self.words[i][0] for i in cycle)


def block_recode(sft: Sft, m: int, budget: int = ENUMERATION_BUDGET) -> BlockRecoding:
    if m < 1:
        raise InputError("block length must be >= 1")
    return BlockRecoding(sft, m, budget=budget)


def _word_key(word: Word, k: int) -> str:
    if k <= 10:
        return "".join(str(a) for a in word)
    return ",".join(str(a) for a in word)


def _parse_word_key(key: str) -> Word:
    if "," in key:
        return tuple(int(p) for p in key.split(","))
    return tuple(int(ch) for ch in key)


class LocallyConstantFunction:
    """Observable depending on finitely many coordinates:
    g(x) = table[(x_0, ..., x_{m-1})].

    The table must cover exactly the admissible m-words.  Arithmetic lifts
    operands to a common memory, so potentials like beta*g - s*rho can be
    assembled without bookkeeping at the call sites.
    """

    def __init__(self, sft: Sft, memory: int, table: dict):
        if memory < 1:
            raise InputError("memory must be >= 1")
        words = admissible_words(sft, memory)
        table = {tuple(w): float(v) for w, v in table.items()}
        missing = [w for w in words if w not in table]
        if missing:
            raise InputError(f"table missing {len(missing)} admissible {memory}-words, e.g. {missing[0]}")
        extra = set(table) - set(words)
        if extra:
            raise InputError(f"table has {len(extra)} entries off the admissible set, e.g. {sorted(extra)[0]}")
        self.sft = sft
        self.memory = memory
        self.table = table

    @classmethod
    def from_callable(cls, sft: Sft, memory: int, fn) -> "LocallyConstantFunction":
        return cls(sft, memory, {w: fn(w) for w in admissible_words(sft, memory)})

    @classmethod
    def constant(cls, sft: Sft, value: float) -> "LocallyConstantFunction":
        return cls(sft, 1, {(a,): value for a in range(sft.k)})

    @classmethod
    def indicator(cls, sft: Sft, word) -> "LocallyConstantFunction":
        """Indicator of the cylinder [word]."""
        word = tuple(word)
        if not sft.is_admissible(word) or not word:
            raise InputError(f"cylinder word {word} is not admissible")
        m = len(word)
        return cls.from_callable(sft, m, lambda w: 1.0 if w == word else 0.0)

    def __call__(self, word) -> float:
        w = tuple(word[: self.memory])
        try:
            return self.table[w]
        except KeyError:
            raise InputError(f"word {w} is not admissible") from None

    def lift(self, memory: int) -> "LocallyConstantFunction":
        if memory < self.memory:
            raise InputError("can only lift to larger memory")
        if memory == self.memory:
            return self
        return LocallyConstantFunction.from_callable(self.sft, memory, self.__call__)

    def _binary(self, other, op):
        if not isinstance(other, LocallyConstantFunction):
            raise InputError("operands must both be locally constant functions")
        if other.sft != self.sft:
            raise InputError("operands live on different SFTs")
        m = max(self.memory, other.memory)
        a, b = self.lift(m), other.lift(m)
        return LocallyConstantFunction(self.sft, m, {w: op(a.table[w], b.table[w]) for w in a.table})

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __mul__(self, scalar):
        s = float(scalar)
        return LocallyConstantFunction(self.sft, self.memory, {w: s * v for w, v in self.table.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def bounds(self) -> tuple[float, float]:
        vals = list(self.table.values())
        return min(vals), max(vals)

    def values(self, words) -> np.ndarray:
        return np.array([self(w) for w in words])

    def to_json(self) -> dict:
        keys = sorted(self.table)
        return {"memory": self.memory, "table": {_word_key(w, self.sft.k): self.table[w] for w in keys}}

    @classmethod
    def from_json(cls, sft: Sft, doc: dict) -> "LocallyConstantFunction":
        if not isinstance(doc, dict) or "memory" not in doc or "table" not in doc:
            raise InputError("function document needs 'memory' and 'table'")
        table = {_parse_word_key(key): float(v) for key, v in doc["table"].items()}
        return cls(sft, int(doc["memory"]), table)
