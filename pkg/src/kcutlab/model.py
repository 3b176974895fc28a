"""Solver-agnostic formulation IR with LP and sparse SDPA text exporters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HasPsdBlock, HasQuadraticObjective, KcutError, NoPsdBlock
from .graph import _fmt_number
from .linalg import is_psd

SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float = 0.0
    ub: float = 1.0
    discrete: bool = False  # integral model: value restricted to {lb, ub}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    name: str = ""


@dataclass(frozen=True, eq=False)
class PsdBlock:
    """Affine matrix ``constant + sum_i x_i * coeffs[i]`` required PSD."""

    constant: np.ndarray
    coeffs: tuple[tuple[int, np.ndarray], ...]

    @property
    def order(self) -> int:
        return self.constant.shape[0]

    def evaluate(self, values) -> np.ndarray:
        M = self.constant.copy()
        for i, A in self.coeffs:
            M += values[i] * A
        return M


@dataclass(frozen=True, eq=False)
class Model:
    name: str
    variables: tuple[Variable, ...]
    objective_constant: float
    linear: tuple[tuple[int, float], ...]
    quadratic: tuple[tuple[int, int, float], ...]
    constraints: tuple[Constraint, ...]
    psd_blocks: tuple[PsdBlock, ...] = ()
    sense: str = "max"

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def var_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def objective_value(self, values) -> float:
        values = np.asarray(values, dtype=float)
        total = self.objective_constant
        total += sum(c * values[i] for i, c in self.linear)
        total += sum(c * values[i] * values[j] for i, j, c in self.quadratic)
        return float(total)

    def max_violation(self, values, integral: bool = False) -> float:
        """Largest violation of bounds, rows and PSD blocks at ``values``.

        A PSD block contributes ``max(0, -lambda_min)``. With ``integral`` set,
        discrete variables are also checked to sit on one of their bounds.
        """
        values = np.asarray(values, dtype=float)
        worst = 0.0
        for i, v in enumerate(self.variables):
            worst = max(worst, v.lb - values[i], values[i] - v.ub)
            if integral and v.discrete:
                worst = max(worst, min(abs(values[i] - v.lb), abs(values[i] - v.ub)))
        for con in self.constraints:
            lhs = sum(c * values[i] for i, c in con.coeffs)
            if con.sense == "<=":
                worst = max(worst, lhs - con.rhs)
            elif con.sense == ">=":
                worst = max(worst, con.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - con.rhs))
        for block in self.psd_blocks:
            worst = max(worst, -is_psd(block.evaluate(values), tol=0.0).min_eigenvalue)
        return float(worst)


@dataclass
class ModelBuilder:
    name: str
    variables: list = field(default_factory=list)
    objective_constant: float = 0.0
    linear: dict = field(default_factory=dict)
    quadratic: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    psd_blocks: list = field(default_factory=list)

    def add_var(self, name, lb=0.0, ub=1.0, discrete=False) -> int:
        self.variables.append(Variable(name, float(lb), float(ub), discrete))
        return len(self.variables) - 1

    def add_linear(self, i, coef):
        self.linear[i] = self.linear.get(i, 0.0) + coef

    def add_quadratic(self, i, j, coef):
        key = (i, j) if i <= j else (j, i)
        self.quadratic[key] = self.quadratic.get(key, 0.0) + coef

    def add_constraint(self, coeffs, sense, rhs, name=""):
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        merged = {}
        for i, c in coeffs:
            if not 0 <= i < len(self.variables):
                raise KcutError(f"constraint references undeclared variable {i}")
            merged[i] = merged.get(i, 0.0) + float(c)
        row = tuple(sorted((i, c) for i, c in merged.items() if c != 0.0))
        self.constraints.append(Constraint(row, sense, float(rhs), name))

    def add_psd_block(self, constant, coeffs):
        constant = np.array(constant, dtype=float)
        if constant.ndim != 2 or constant.shape[0] != constant.shape[1]:
            raise ValueError("PSD block must be square")
        mats = []
        for i, A in coeffs:
            A = np.array(A, dtype=float)
            if A.shape != constant.shape or not np.array_equal(A, A.T):
                raise ValueError("PSD coefficient matrices must be square, symmetric, same order")
            A.setflags(write=False)
            mats.append((i, A))
        if not np.array_equal(constant, constant.T):
            raise ValueError("PSD constant matrix must be symmetric")
        constant.setflags(write=False)
        self.psd_blocks.append(PsdBlock(constant, tuple(mats)))

    def build(self) -> Model:
        return Model(
            name=self.name,
            variables=tuple(self.variables),
            objective_constant=float(self.objective_constant),
            linear=tuple(sorted((i, c) for i, c in self.linear.items() if c != 0.0)),
            quadratic=tuple(sorted((i, j, c) for (i, j), c in self.quadratic.items() if c != 0.0)),
            constraints=tuple(self.constraints),
            psd_blocks=tuple(self.psd_blocks),
        )


def _signed_terms(terms) -> str:
    """Render ``[(coef, text), ...]`` as ``a x + b y - c z``."""
    out = []
    for coef, text in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = text if mag == 1.0 else f"{_fmt_number(mag)} {text}"
        if not out:
            out.append(body if sign == "+" else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    return " ".join(out)


def _wrap(prefix: str, body: str, width: int = 78) -> list[str]:
    # LP readers cap line length; break only between tokens
    lines, cur = [], prefix
    for tok in body.split(" "):
        if len(cur) + 1 + len(tok) > width and cur.strip():
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return lines


def export_lp_format(m: Model) -> str:
    """CPLEX-style LP text. Quadratic objective terms go in ``[ ... ] / 2``."""
    if m.psd_blocks:
        raise HasPsdBlock(f"model {m.name!r} has PSD blocks; LP format cannot express them")
    names = [v.name for v in m.variables]
    lines = [f"\\ {m.name}", "Maximize" if m.sense == "max" else "Minimize"]

    obj = [(c, names[i]) for i, c in m.linear]
    body = _signed_terms(obj)
    if m.quadratic:
        quad = []
        for i, j, c in m.quadratic:
            quad.append((2.0 * c, f"{names[i]} ^ 2" if i == j else f"{names[i]} * {names[j]}"))
        qtxt = _signed_terms(quad)
        body = f"{body} + [ {qtxt} ] / 2" if body else f"[ {qtxt} ] / 2"
    if m.objective_constant != 0.0:
        if not body:
            body = _fmt_number(m.objective_constant)
        else:
            sign = "-" if m.objective_constant < 0 else "+"
            body = f"{body} {sign} {_fmt_number(abs(m.objective_constant))}"
    lines += _wrap(" obj:", body or "0")

    lines.append("Subject To")
    for r, con in enumerate(m.constraints):
        label = con.name or f"c{r}"
        lhs = _signed_terms([(c, names[i]) for i, c in con.coeffs]) or "0"
        lines += _wrap(f" {label}:", f"{lhs} {con.sense} {_fmt_number(con.rhs)}")

    lines.append("Bounds")
    for v in m.variables:
        if v.discrete and v.lb == 0.0 and v.ub == 1.0:
            continue
        if np.isinf(v.lb) and np.isinf(v.ub):
            lines.append(f" {v.name} free")
        elif np.isinf(v.lb):
            lines.append(f" -inf <= {v.name} <= {_fmt_number(v.ub)}")
        elif np.isinf(v.ub):
            lines.append(f" {v.name} >= {_fmt_number(v.lb)}")
        else:
            lines.append(f" {_fmt_number(v.lb)} <= {v.name} <= {_fmt_number(v.ub)}")

    binaries = [v.name for v in m.variables if v.discrete and v.lb == 0.0 and v.ub == 1.0]
    other = [v for v in m.variables if v.discrete and not (v.lb == 0.0 and v.ub == 1.0)]
    if other:
        raise KcutError(f"variables {[v.name for v in other]} are two-valued but not binary")
    if binaries:
        lines.append("Binary")
        lines += _wrap("", " ".join(binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_sdpa_format(m: Model) -> str:
    """Sparse SDPA (.dat-s) text for the continuous relaxation of ``m``.

    SDPA minimizes ``c^T x`` subject to ``sum_i F_i x_i - F_0 >= 0``, so the
    objective is negated. Blocks: each PSD block, then one diagonal block
    holding linear constraints and finite variable bounds.
    """
    if m.quadratic:
        raise HasQuadraticObjective(f"model {m.name!r} has a quadratic objective")
    if not m.psd_blocks:
        raise NoPsdBlock(f"model {m.name!r} has no PSD block")
    nvar = m.num_vars

    # diagonal block rows as (g_0, {i: g_i}) meaning g_0 + sum g_i x_i >= 0
    diag_rows = []
    for con in m.constraints:
        coeffs = dict(con.coeffs)
        if con.sense in ("<=", "="):
            diag_rows.append((con.rhs, {i: -c for i, c in coeffs.items()}))
        if con.sense in (">=", "="):
            diag_rows.append((-con.rhs, dict(coeffs)))
    for i, v in enumerate(m.variables):
        if np.isfinite(v.lb):
            diag_rows.append((-v.lb, {i: 1.0}))
        if np.isfinite(v.ub):
            diag_rows.append((v.ub, {i: -1.0}))

    entries = []  # (matno, blkno, i, j, value)
    for b, block in enumerate(m.psd_blocks, start=1):
        for (r, c) in zip(*np.triu_indices(block.order)):
            if block.constant[r, c] != 0.0:
                entries.append((0, b, r + 1, c + 1, -block.constant[r, c]))
        for i, A in block.coeffs:
            for (r, c) in zip(*np.triu_indices(block.order)):
                if A[r, c] != 0.0:
                    entries.append((i + 1, b, r + 1, c + 1, A[r, c]))
    dblk = len(m.psd_blocks) + 1
    for pos, (g0, g) in enumerate(diag_rows, start=1):
        if g0 != 0.0:
            entries.append((0, dblk, pos, pos, -g0))
        for i, gi in g.items():
            if gi != 0.0:
                entries.append((i + 1, dblk, pos, pos, gi))
    entries.sort(key=lambda e: e[:4])

    cvec = np.zeros(nvar)
    for i, c in m.linear:
        cvec[i] = -c
    struct = [str(b.order) for b in m.psd_blocks]
    if diag_rows:
        struct.append(str(-len(diag_rows)))
    lines = [
        f'"{m.name}: maximize objective = {_fmt_number(m.objective_constant)} - (SDPA objective)',
        f'"variables: {" ".join(v.name for v in m.variables)}',
        str(nvar),
        str(len(struct)),
        " ".join(struct),
        " ".join(_fmt_number(c + 0.0) for c in cvec),
    ]
    lines += [f"{mat} {blk} {i} {j} {_fmt_number(val)}" for mat, blk, i, j, val in entries]
    return "\n".join(lines) + "\n"
