"""Group law in exponential coordinates via the truncated Dynkin series.

For a step-s algebra the series terminates exactly at order s, so the group
law is a polynomial map.  Two evaluation paths are kept deliberately
separate: `bch_series` evaluates nested brackets term by term, while
`CompiledGroupLaw` expands the same series once into exact per-coordinate
monomial tables (Fraction coefficients) and evaluates those.  Tests pin the
two paths against each other.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import NonpositiveScale


# ----------------------------------------------------------------------
# Dynkin words

def _pair_sequences(n, budget):
    """All length-n sequences of pairs (r, s) != (0, 0) with total <= budget."""
    if n == 0:
        yield ()
        return
    for r in range(budget + 1):
        for s in range(budget - r + 1):
            if r == 0 and s == 0:
                continue
            rest_budget = budget - r - s
            if rest_budget < n - 1:
                continue
            for rest in _pair_sequences(n - 1, rest_budget):
                yield ((r, s),) + rest


@lru_cache(maxsize=None)
def dynkin_words(step):
    """Merged Dynkin series up to total order `step`.

    Returns a tuple of (coef, word) with coef a Fraction and word a tuple
    over {0, 1} (0 for x, 1 for y).  The word w_1 ... w_L stands for the
    right-nested commutator [w_1, [w_2, [..., w_L]]].  Words whose last two
    letters agree are dropped since the innermost bracket vanishes.
    """
    acc = {}
    for n in range(1, step + 1):
        sign = Fraction((-1) ** (n - 1), n)
        for seq in _pair_sequences(n, step):
            total = sum(r + s for r, s in seq)
            denom = total
            for r, s in seq:
                denom *= factorial(r) * factorial(s)
            coef = sign / denom
            word = []
            for r, s in seq:
                word.extend([0] * r + [1] * s)
            word = tuple(word)
            acc[word] = acc.get(word, Fraction(0)) + coef

    out = []
    for word, coef in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0])):
        if coef == 0:
            continue
        if len(word) >= 2 and word[-1] == word[-2]:
            continue
        out.append((coef, word))
    return tuple(out)


def bch_series(alg, x, y):
    """log(exp x exp y) by direct nested-bracket evaluation.

    Broadcasts over leading axes of x and y.
    """
    x = alg.check_coords(x)
    y = alg.check_coords(y)
    x, y = np.broadcast_arrays(x, y)
    z = np.zeros(x.shape)
    vecs = (x, y)
    for coef, word in dynkin_words(alg.step):
        v = vecs[word[-1]]
        for letter in word[-2::-1]:
            v = alg.bracket(vecs[letter], v)
        z = z + float(coef) * v
    return z


# ----------------------------------------------------------------------
# compiled polynomial law (exact)

def _poly_mul_add(out, p, q_, coef):
    """out += coef * p * q_ for monomial dicts keyed by (xexp, yexp)."""
    for (xe1, ye1), c1 in p.items():
        for (xe2, ye2), c2 in q_.items():
            key = (
                tuple(a + b for a, b in zip(xe1, xe2)),
                tuple(a + b for a, b in zip(ye1, ye2)),
            )
            v = out.get(key, Fraction(0)) + coef * c1 * c2
            if v:
                out[key] = v
            elif key in out:
                del out[key]


def _poly_bracket(alg, P, Q):
    """Bracket of vector-valued polynomials, exact coefficients."""
    out = [dict() for _ in range(alg.q)]
    for (i, j), row in alg.brackets_exact.items():
        if not P[i] or not Q[j]:
            continue
        for m, c in row.items():
            _poly_mul_add(out[m], P[i], Q[j], c)
    return out


class CompiledGroupLaw:
    """Per-coordinate monomial tables for the truncated BCH product.

    Each output coordinate of weight w is a polynomial whose monomials all
    have weighted degree exactly w; that invariant is checked at build time.
    """

    def __init__(self, alg):
        self.alg = alg
        q = alg.q
        zero = (0,) * q

        def unit(i, which):
            xe = [0] * q
            xe[i] = 1
            xe = tuple(xe)
            return {(xe, zero) if which == 0 else (zero, xe): Fraction(1)}

        X = [unit(i, 0) for i in range(q)]
        Y = [unit(i, 1) for i in range(q)]
        vecs = (X, Y)

        acc = [dict() for _ in range(q)]
        for coef, word in dynkin_words(alg.step):
            v = vecs[word[-1]]
            for letter in word[-2::-1]:
                v = _poly_bracket(alg, vecs[letter], v)
            for m in range(q):
                for key, c in v[m].items():
                    val = acc[m].get(key, Fraction(0)) + coef * c
                    if val:
                        acc[m][key] = val
                    elif key in acc[m]:
                        del acc[m][key]

        w = alg.weights
        for m in range(q):
            for xe, ye in acc[m]:
                deg = sum(e * w[i] for i, e in enumerate(xe))
                deg += sum(e * w[i] for i, e in enumerate(ye))
                if deg != w[m]:
                    raise AssertionError(
                        f"monomial of weighted degree {deg} in coordinate "
                        f"{m + 1} of weight {w[m]}"
                    )

        self.terms = [
            sorted(acc[m].items(), key=lambda kv: kv[0]) for m in range(q)
        ]
        # flat float form: (m, coef, ((idx, exp) on x, ...), ((idx, exp) on y, ...))
        flat = []
        for m in range(q):
            for (xe, ye), c in self.terms[m]:
                xf = tuple((i, e) for i, e in enumerate(xe) if e)
                yf = tuple((i, e) for i, e in enumerate(ye) if e)
                flat.append((m, float(c), xf, yf))
        self._flat = tuple(flat)

    @property
    def n_terms(self):
        return len(self._flat)

    def evaluate(self, x, y):
        """Evaluate the tables; broadcasts over leading axes."""
        x = self.alg.check_coords(x)
        y = self.alg.check_coords(y)
        x, y = np.broadcast_arrays(x, y)
        out = np.zeros(x.shape)
        for m, c, xf, yf in self._flat:
            val = None
            for i, e in xf:
                f = x[..., i] if e == 1 else x[..., i] ** e
                val = f if val is None else val * f
            for i, e in yf:
                f = y[..., i] if e == 1 else y[..., i] ** e
                val = f if val is None else val * f
            out[..., m] += c * val
        return out

    def evaluate_exact(self, x, y):
        """Evaluate with Fraction arithmetic on rational coordinate lists."""
        x = [Fraction(v) for v in x]
        y = [Fraction(v) for v in y]
        if len(x) != self.alg.q or len(y) != self.alg.q:
            raise ValueError("coordinate length mismatch")
        out = []
        for m in range(self.alg.q):
            s = Fraction(0)
            for (xe, ye), c in self.terms[m]:
                v = c
                for i, e in enumerate(xe):
                    if e:
                        v *= x[i] ** e
                for i, e in enumerate(ye):
                    if e:
                        v *= y[i] ** e
                s += v
            out.append(s)
        return out


def compile_group_law(alg):
    """Build (once) and return the compiled polynomial law for `alg`."""
    if alg._compiled is None:
        alg._compiled = CompiledGroupLaw(alg)
    return alg._compiled


# ----------------------------------------------------------------------
# group operations

def multiply(alg, x, y):
    """Group product via the compiled law (same values as `bch_series`)."""
    return compile_group_law(alg).evaluate(x, y)


def inverse(x):
    """Group inverse; in exponential coordinates this is negation."""
    return -np.asarray(x, dtype=float)


def dilate(alg, r, x):
    """Intrinsic dilation delta_r, scaling layer j by r**j.

    `r` may be a positive scalar or an array broadcastable against the
    leading axes of x.
    """
    x = alg.check_coords(x)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise NonpositiveScale(f"dilation factor must be positive, got {r}")
    return x * r[..., None] ** alg.weights


def conjugate(alg, g, x):
    """g x g^-1."""
    return multiply(alg, multiply(alg, g, x), inverse(g))
