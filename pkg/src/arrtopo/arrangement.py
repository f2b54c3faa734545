"""Central arrangements: exact representation, file format, essentiality."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from arrtopo import linalg


class ArrangementError(ValueError):
    """Invalid arrangement input. `line` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point coefficients are not accepted; use int or Fraction")
    return Fraction(x)


@dataclass(frozen=True)
class CentralArrangement:
    """d pairwise non-proportional linear forms in `ambient_dim` variables.

    `multiplicities` attaches an exponent to each form (the non-reduced product
    prod l_i^m_i); the forms themselves always stay reduced.
    """

    ambient_dim: int
    forms: tuple[tuple[Fraction, ...], ...]
    multiplicities: tuple[int, ...] = field(default=())

    def __post_init__(self):
        forms = tuple(tuple(_as_fraction(c) for c in f) for f in self.forms)
        object.__setattr__(self, "forms", forms)
        mult = tuple(self.multiplicities) or (1,) * len(forms)
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in mult))
        if self.ambient_dim < 1:
            raise ArrangementError("ambient dimension must be at least 1")
        if not forms:
            raise ArrangementError("an arrangement needs at least one form")
        if len(self.multiplicities) != len(forms):
            raise ArrangementError("multiplicity vector length differs from number of forms")
        for i, f in enumerate(forms, 1):
            if len(f) != self.ambient_dim:
                raise ArrangementError(f"form {i} has {len(f)} coefficients, expected {self.ambient_dim}")
            if all(c == 0 for c in f):
                raise ArrangementError(f"form {i} is zero")
        for i, m in enumerate(self.multiplicities, 1):
            if m < 1:
                raise ArrangementError(f"multiplicity of form {i} must be >= 1, got {m}")
        keys = {}
        for i, f in enumerate(forms, 1):
            k = linalg.normalize_form(f)
            if k in keys:
                raise ArrangementError(f"forms {keys[k]} and {i} are proportional")
            keys[k] = i

    @property
    def d(self) -> int:
        return len(self.forms)

    @property
    def n(self) -> int:
        """Projective dimension: the arrangement lives in P^n."""
        return self.ambient_dim - 1

    def with_multiplicities(self, m: Sequence[int]) -> "CentralArrangement":
        return CentralArrangement(self.ambient_dim, self.forms, tuple(m))

    def without(self, i: int) -> "CentralArrangement":
        keep = [j for j in range(self.d) if j != i]
        return CentralArrangement(
            self.ambient_dim,
            tuple(self.forms[j] for j in keep),
            tuple(self.multiplicities[j] for j in keep),
        )

    def digest(self) -> str:
        return hashlib.sha256(serialize_arrangement(self).encode()).hexdigest()[:16]


def from_rows(rows: Iterable[Sequence], multiplicities: Sequence[int] = ()) -> CentralArrangement:
    rows = [tuple(_as_fraction(c) for c in r) for r in rows]
    if not rows:
        raise ArrangementError("an arrangement needs at least one form")
    return CentralArrangement(len(rows[0]), tuple(rows), tuple(multiplicities))


def _parse_rational(tok: str, line: int) -> Fraction:
    try:
        if tok.count("/") > 1 or any(ch in tok for ch in ".eE"):
            raise ValueError
        value = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ArrangementError(f"malformed rational {tok!r}", line) from None
    return value


def parse_arrangement(text: str) -> CentralArrangement:
    """Parse the text format: header `<ambient_dim> <d>`, then d rows `c_0 ... c_n [| m]`."""
    lines = [
        (no, raw.strip())
        for no, raw in enumerate(text.splitlines(), 1)
        if raw.strip() and not raw.strip().startswith("#")
    ]
    if not lines:
        raise ArrangementError("empty arrangement file")
    head_no, head = lines[0]
    try:
        ambient_dim, d = (int(t) for t in head.split())
    except ValueError:
        raise ArrangementError(f"header must be '<ambient_dim> <d>', got {head!r}", head_no) from None
    if ambient_dim < 2:
        raise ArrangementError("ambient dimension must be at least 2", head_no)
    if d < 1:
        raise ArrangementError("number of forms must be at least 1", head_no)
    body = lines[1:]
    if len(body) != d:
        raise ArrangementError(f"header announces {d} forms, found {len(body)}", head_no)

    forms, mult, seen = [], [], {}
    for idx, (no, row) in enumerate(body, 1):
        coeff_part, _, mult_part = row.partition("|")
        toks = coeff_part.split()
        if len(toks) != ambient_dim:
            raise ArrangementError(f"row has {len(toks)} entries, expected {ambient_dim}", no)
        form = tuple(_parse_rational(t, no) for t in toks)
        if all(c == 0 for c in form):
            raise ArrangementError(f"form {idx} is zero", no)
        key = linalg.normalize_form(form)
        if key in seen:
            raise ArrangementError(f"forms {seen[key]} and {idx} are proportional", no)
        seen[key] = idx
        m = 1
        if mult_part.strip():
            try:
                m = int(mult_part.strip())
            except ValueError:
                raise ArrangementError(f"malformed multiplicity {mult_part.strip()!r}", no) from None
            if m < 1:
                raise ArrangementError(f"multiplicity must be >= 1, got {m}", no)
        forms.append(form)
        mult.append(m)
    return CentralArrangement(ambient_dim, tuple(forms), tuple(mult))


def serialize_arrangement(A: CentralArrangement) -> str:
    out = [f"{A.ambient_dim} {A.d}"]
    for f, m in zip(A.forms, A.multiplicities):
        row = " ".join(str(c) for c in f)
        out.append(row if m == 1 else f"{row} | {m}")
    return "\n".join(out) + "\n"


def essential_rank(A: CentralArrangement) -> tuple[int, bool]:
    """Rank of the coefficient matrix and whether the hyperplanes meet only at 0."""
    r = linalg.rank(A.forms, A.ambient_dim)
    return r, r == A.ambient_dim
