"""Partitions in a k x (n-k) box, 01-words, and Grassmannian permutations.

The three indexings of the Schubert basis and the bijections between them:

  partition  lam = (lam_1 >= ... >= lam_k),  lam_1 <= n-k
  word       n letters, zeros at positions lam_i + k - i + 1
  perm       w(i) = lam_{k+1-i} + i for i <= k, remaining values ascending

Example
-------
>>> p = BoxPartition(5, 10, (5, 3, 3, 1, 1))
>>> p.word()
(1, 0, 0, 1, 1, 0, 0, 1, 1, 0)
>>> p.perm()
(2, 3, 6, 7, 10, 1, 4, 5, 8, 9)
"""

from itertools import combinations


class BoxPartition:
    """Partition fitting in the k x (n-k) box; trailing zeros trimmed."""

    __slots__ = ("k", "n", "parts")

    def __init__(self, k, n, parts=()):
        if not (0 <= k <= n):
            raise ValueError("need 0 <= k <= n")
        parts = tuple(int(p) for p in parts if p)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError("parts must be weakly decreasing")
        if len(parts) > k:
            raise ValueError("more than k parts")
        if parts and (parts[0] > n - k or parts[-1] < 0):
            raise ValueError("parts outside the box")
        self.k = k
        self.n = n
        self.parts = parts

    def __eq__(self, other):
        return (isinstance(other, BoxPartition)
                and (self.k, self.n, self.parts)
                == (other.k, other.n, other.parts))

    def __hash__(self):
        return hash((self.k, self.n, self.parts))

    def __repr__(self):
        return "BoxPartition(%d, %d, %s)" % (self.k, self.n, self.parts)

    def __len__(self):
        return len(self.parts)

    def size(self):
        return sum(self.parts)

    def padded(self):
        """Parts padded with zeros to length k."""
        return self.parts + (0,) * (self.k - len(self.parts))

    def part(self, i):
        """1-indexed part, zero beyond the last row."""
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def contains(self, other):
        """Containment of Young diagrams (other inside self)."""
        return all(o <= s for s, o in zip(self.padded(), other.padded()))

    def is_full_box(self):
        return self.parts == (self.n - self.k,) * self.k if self.k else True

    # -- the three indexings -------------------------------------------

    def word(self):
        """01-word of length n with zeros at lam_i + k - i + 1."""
        w = [1] * self.n
        lam = self.padded()
        for i in range(1, self.k + 1):
            w[lam[i - 1] + self.k - i] = 0
        return tuple(w)

    def perm(self):
        """Grassmannian permutation: w(i) = lam_{k+1-i} + i, rest ascending."""
        lam = self.padded()
        head = [lam[self.k - i] + i for i in range(1, self.k + 1)]
        rest = sorted(set(range(1, self.n + 1)) - set(head))
        return tuple(head + rest)

    def epsilon_index(self):
        """Increasing k-subset (lam_k+1, lam_{k-1}+2, .., lam_1+k) of 1..n."""
        lam = self.padded()
        return tuple(lam[self.k - i] + i for i in range(1, self.k + 1))

    # -- dualities ---------------------------------------------------------

    def transpose(self):
        """Conjugate diagram, living in the (n-k) x k box."""
        lam = self.parts
        cols = lam[0] if lam else 0
        t = tuple(sum(1 for p in lam if p >= j) for j in range(1, cols + 1))
        return BoxPartition(self.n - self.k, self.n, t)

    def complement(self):
        """180-degree rotation of the box complement, same box."""
        m = self.n - self.k
        lam = self.padded()
        return BoxPartition(self.k, self.n,
                            tuple(m - lam[self.k - i] for i in range(1, self.k + 1)))

    # -- curve-shift operations ---------------------------------------------

    def shift(self, d, mode="both"):
        """Delete the first d rows, columns, or both from the diagram."""
        if d < 0:
            raise ValueError("negative shift")
        lam = list(self.padded())
        if mode in ("row", "both"):
            lam = lam[d:]
        if mode in ("col", "both"):
            lam = [max(p - d, 0) for p in lam]
        if mode not in ("row", "col", "both"):
            raise ValueError("mode must be row, col, or both")
        return BoxPartition(self.k, self.n, lam)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {"k": self.k, "n": self.n, "parts": list(self.parts)}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["k"], doc["n"], doc["parts"])


class BitWord:
    """A 01-word of length n with exactly k zeros."""

    __slots__ = ("letters",)

    def __init__(self, letters):
        letters = tuple(int(b) for b in letters)
        if any(b not in (0, 1) for b in letters):
            raise ValueError("letters must be 0 or 1")
        self.letters = letters

    @property
    def n(self):
        return len(self.letters)

    @property
    def k(self):
        return self.letters.count(0)

    def __eq__(self, other):
        return isinstance(other, BitWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return "BitWord(%s)" % "".join(str(b) for b in self.letters)

    def partition(self):
        """Inverse of BoxPartition.word."""
        zeros = [i + 1 for i, b in enumerate(self.letters) if b == 0]
        k = len(zeros)
        lam = [zeros[k - j] - (k + 1 - j) for j in range(1, k + 1)]
        return BoxPartition(k, self.n, lam)


class GrassPerm:
    """Permutation of 1..n whose only descent, if any, sits at position k."""

    __slots__ = ("w", "k")

    def __init__(self, w, k):
        w = tuple(w)
        if sorted(w) != list(range(1, len(w) + 1)):
            raise ValueError("not a permutation of 1..n")
        for i in range(1, len(w)):
            if w[i - 1] > w[i] and i != k:
                raise ValueError("descent away from position k")
        self.w = w
        self.k = k

    @property
    def n(self):
        return len(self.w)

    def __eq__(self, other):
        return (isinstance(other, GrassPerm)
                and (self.w, self.k) == (other.w, other.k))

    def __hash__(self):
        return hash((self.w, self.k))

    def __repr__(self):
        return "GrassPerm(%s, k=%d)" % (list(self.w), self.k)

    def partition(self):
        """Inverse of BoxPartition.perm."""
        lam = [self.w[self.k - j] - (self.k + 1 - j)
               for j in range(1, self.k + 1)]
        return BoxPartition(self.k, self.n, lam)


# -- module-level entry points -------------------------------------------

def word_from_partition(lam):
    return BitWord(lam.word())


def partition_from_word(word):
    if not isinstance(word, BitWord):
        word = BitWord(word)
    return word.partition()


def perm_from_partition(lam):
    return GrassPerm(lam.perm(), lam.k)


def partition_from_perm(perm):
    return perm.partition()


def curve_ops(lam, d, mode="both"):
    return lam.shift(d, mode)


def box_duals(lam):
    """(transpose, complement) of the diagram."""
    return lam.transpose(), lam.complement()


def epsilon_index(lam):
    return lam.epsilon_index()


def partition_from_index(index, k, n):
    """Inverse of epsilon_index: increasing k-subset of 1..n -> partition."""
    index = tuple(sorted(index))
    if len(index) != k:
        raise ValueError("index size must be k")
    lam = [index[k - j] - (k + 1 - j) for j in range(1, k + 1)]
    return BoxPartition(k, n, lam)


def all_partitions(k, n):
    """Every partition in the k x (n-k) box, graded-lex by (size, parts)."""
    out = [partition_from_index(c, k, n)
           for c in combinations(range(1, n + 1), k)]
    out.sort(key=lambda p: (p.size(), p.parts))
    return out


# -- permutation utilities (symmetric group S_n, one-line tuples) ----------

def identity_perm(n):
    return tuple(range(1, n + 1))


def long_element(n):
    return tuple(range(n, 0, -1))


def perm_multiply(u, v):
    """(u v)(i) = u(v(i))."""
    return tuple(u[v[i] - 1] for i in range(len(v)))


def perm_inverse(u):
    inv = [0] * len(u)
    for i, x in enumerate(u):
        inv[x - 1] = i + 1
    return tuple(inv)


def apply_simple_right(w, i):
    """w s_i: swap positions i, i+1 of the one-line notation (1-indexed)."""
    w = list(w)
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def apply_simple_left(w, i):
    """s_i w: swap the values i and i+1."""
    return tuple(i + 1 if x == i else i if x == i + 1 else x for x in w)


def inversions(w):
    n = len(w)
    return sum(1 for a in range(n) for b in range(a + 1, n)
               if w[a] > w[b])


def reduced_word(w):
    """A reduced word for w: indices i with w = s_{i1} ... s_{il}.

    Built by stripping descents on the right, so applying the letters
    left-to-right to the identity (on the right) reproduces w.
    """
    w = tuple(w)
    word = []
    while True:
        for i in range(1, len(w)):
            if w[i - 1] > w[i]:
                word.append(i)
                w = apply_simple_right(w, i)
                break
        else:
            break
    word.reverse()
    return word


def act_on_subset(w, subset):
    """Image of a set of integers under the permutation."""
    return tuple(sorted(w[a - 1] for a in subset))


def weyl_orbit_partition(w, lam):
    """The partition whose fixed-point index is w(epsilon_index(lam))."""
    return partition_from_index(act_on_subset(w, lam.epsilon_index()),
                                lam.k, lam.n)
