"""Graded nilpotent Lie algebras given by rational structure constants.

An algebra is described by its layer dimensions (m_1, ..., m_s) and a sparse
bracket table [e_i, e_j] = sum_m c(i,j,m) e_m.  Coefficients are kept as exact
Fractions so that the structural checks (antisymmetry, grading, Jacobi) are
decided exactly, with a float copy of the table for numerical work.
"""

import json
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    GradingViolation,
    JacobiViolation,
)


class GradedAlgebra:
    """Graded nilpotent Lie algebra in a fixed homogeneous basis.

    Attributes
    ----------
    name : str
    step : int
        Number of layers; all brackets of total weight above it vanish.
    layer_dims : tuple of int
    q : int
        Total dimension.
    weights : (q,) int array, weight of each basis vector.
    hom_dim : int
        Homogeneous dimension sum_j j * m_j.
    structure : (q, q, q) float array, structure[i, j, m] = c(i,j,m).
    norm_spec : dict or None
        Default homogeneous norm recorded in the group file.
    """

    def __init__(self, name, layer_dims, brackets, norm_spec=None):
        self.name = str(name)
        self.layer_dims = tuple(int(m) for m in layer_dims)
        if not self.layer_dims or any(m <= 0 for m in self.layer_dims):
            raise DimensionMismatch(f"bad layer dimensions {layer_dims!r}")
        self.step = len(self.layer_dims)
        self.q = sum(self.layer_dims)
        self.norm_spec = dict(norm_spec) if norm_spec else None

        weights = []
        for j, m in enumerate(self.layer_dims, start=1):
            weights.extend([j] * m)
        self.weights = np.array(weights, dtype=int)
        self.hom_dim = int(self.weights.sum())

        offsets = np.concatenate([[0], np.cumsum(self.layer_dims)])
        self._layer_slices = [
            slice(int(offsets[j]), int(offsets[j + 1])) for j in range(self.step)
        ]

        self.brackets_exact = self._canonical_table(brackets)
        self._validate_grading()
        self._validate_jacobi()

        self.structure = np.zeros((self.q, self.q, self.q))
        for (i, j), row in self.brackets_exact.items():
            for m, c in row.items():
                self.structure[i, j, m] = float(c)
        self.structure.setflags(write=False)

        self._compiled = None  # filled lazily by bch.compile_group_law

    # ------------------------------------------------------------------
    # validation

    def _canonical_table(self, brackets):
        """Fill the antisymmetric closure of the input table, checking
        consistency where both orders are supplied."""
        table = {}
        for (i, j), row in brackets.items():
            i, j = int(i), int(j)
            if not (0 <= i < self.q and 0 <= j < self.q):
                raise DimensionMismatch(f"bracket index ({i},{j}) out of range")
            clean = {}
            for m, c in row.items():
                m = int(m)
                if not 0 <= m < self.q:
                    raise DimensionMismatch(f"bracket target {m} out of range")
                c = Fraction(c)
                if c != 0:
                    clean[m] = clean.get(m, Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c != 0}
            if i == j and clean:
                raise AntisymmetryViolation(f"[e{i + 1}, e{i + 1}] must vanish")
            if not clean:
                continue
            if (i, j) in table and table[(i, j)] != clean:
                raise AntisymmetryViolation(
                    f"conflicting entries for bracket ({i + 1},{j + 1})"
                )
            table[(i, j)] = clean

        full = {}
        for (i, j), row in table.items():
            neg = {m: -c for m, c in row.items()}
            if (j, i) in table:
                if table[(j, i)] != neg:
                    raise AntisymmetryViolation(
                        f"c({i + 1},{j + 1}) != -c({j + 1},{i + 1})"
                    )
            full[(i, j)] = dict(row)
            full[(j, i)] = neg
        return full

    def _validate_grading(self):
        w = self.weights
        for (i, j), row in self.brackets_exact.items():
            for m, c in row.items():
                if c != 0 and w[m] != w[i] + w[j]:
                    raise GradingViolation(
                        f"c({i + 1},{j + 1} -> {m + 1}) nonzero but "
                        f"weights {w[i]}+{w[j]} != {w[m]}"
                    )
        # nilpotency is implied: any target of weight > step does not exist

    def _bracket_exact_basis(self, i, j):
        return self.brackets_exact.get((i, j), {})

    def _bracket_exact_vec(self, i, vec):
        """[e_i, vec] for vec a dict {index: Fraction}."""
        out = {}
        for j, a in vec.items():
            for m, c in self._bracket_exact_basis(i, j).items():
                out[m] = out.get(m, Fraction(0)) + c * a
        return {m: c for m, c in out.items() if c != 0}

    def _validate_jacobi(self):
        q = self.q
        for i in range(q):
            for j in range(i + 1, q):
                for l in range(j + 1, q):
                    acc = {}
                    for a, b, c in ((i, j, l), (j, l, i), (l, i, j)):
                        inner = self._bracket_exact_basis(b, c)
                        for m, coef in self._bracket_exact_vec(a, inner).items():
                            acc[m] = acc.get(m, Fraction(0)) + coef
                    if any(v != 0 for v in acc.values()):
                        raise JacobiViolation(
                            f"Jacobi fails on basis triple "
                            f"({i + 1},{j + 1},{l + 1})"
                        )

    def validate(self):
        """Re-run all structural checks (they already ran in __init__)."""
        self._validate_grading()
        self._validate_jacobi()
        return True

    # ------------------------------------------------------------------
    # basic operations

    def layer_slice(self, j):
        """Slice of coordinates for layer j (1-based)."""
        if not 1 <= j <= self.step:
            raise DimensionMismatch(f"layer {j} of a step-{self.step} algebra")
        return self._layer_slices[j - 1]

    @property
    def first_layer_dim(self):
        return self.layer_dims[0]

    def check_coords(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.q:
            raise DimensionMismatch(
                f"expected coordinate length {self.q}, got {x.shape[-1]}"
            )
        return x

    def bracket(self, x, y):
        """[x, y], bilinear extension of the table; broadcasts over leading axes."""
        x = self.check_coords(x)
        y = self.check_coords(y)
        return np.einsum("...i,...j,ijm->...m", x, y, self.structure)

    def layer_norms(self, x):
        """Euclidean norm of each layer block, shape (..., step)."""
        x = self.check_coords(x)
        cols = [
            np.linalg.norm(x[..., sl], axis=-1) for sl in self._layer_slices
        ]
        return np.stack(cols, axis=-1)

    def spec_dict(self):
        """Serializable description (1-based indices, exact coefficients)."""
        entries = []
        for (i, j), row in sorted(self.brackets_exact.items()):
            if i < j:
                for m, c in sorted(row.items()):
                    entries.append([i + 1, j + 1, m + 1, str(c)])
        out = {
            "name": self.name,
            "step": self.step,
            "layers": list(self.layer_dims),
            "brackets": entries,
        }
        if self.norm_spec:
            out["norm"] = self.norm_spec
        return out

    def __repr__(self):
        return (
            f"GradedAlgebra({self.name!r}, layers={self.layer_dims}, "
            f"q={self.q}, step={self.step})"
        )


# ----------------------------------------------------------------------
# loading

def _algebra_from_spec(spec):
    try:
        name = spec["name"]
        layers = spec["layers"]
        raw = spec.get("brackets", [])
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed group spec: {exc}") from exc

    table = {}
    for entry in raw:
        if len(entry) != 4:
            raise DimensionMismatch(f"bracket entry {entry!r} not [i, j, m, coef]")
        i, j, m, coef = entry
        key = (int(i) - 1, int(j) - 1)
        row = table.setdefault(key, {})
        m0 = int(m) - 1
        row[m0] = row.get(m0, Fraction(0)) + Fraction(str(coef))

    alg = GradedAlgebra(name, layers, table, norm_spec=spec.get("norm"))
    declared = spec.get("step")
    if declared is not None and int(declared) != alg.step:
        raise GradingViolation(
            f"declared step {declared} but layers give {alg.step}"
        )
    return alg


def load_group(source):
    """Load a group definition from a JSON file path or a JSON string.

    Number coefficients are re-read as decimal strings so that e.g. "0.1"
    becomes Fraction(1, 10) exactly.
    """
    text = None
    if hasattr(source, "read"):
        text = source.read()
    else:
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        else:
            with open(s, "r", encoding="utf-8") as fh:
                text = fh.read()
    spec = json.loads(text, parse_float=str, parse_int=int)
    return _algebra_from_spec(spec)


_BUILTIN_CACHE = {}


def builtin_group(name):
    """Load one of the shipped group files by name."""
    if name not in _BUILTIN_CACHE:
        ref = resources.files("nilgeom.data").joinpath(f"{name}.json")
        try:
            text = ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise DimensionMismatch(f"no builtin group named {name!r}") from None
        _BUILTIN_CACHE[name] = load_group(text)
    return _BUILTIN_CACHE[name]


def builtin_group_names():
    out = []
    for item in resources.files("nilgeom.data").iterdir():
        if item.name.endswith(".json"):
            out.append(item.name[: -len(".json")])
    return sorted(out)
