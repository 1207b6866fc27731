"""Decision making units and their input/output factor matrices.

CSV layout: first header cell is ``dmu``, every other header is prefixed
``I:`` (input) or ``O:`` (output). Values use a decimal point regardless of
locale. No quoting is supported.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class IssueCode(str, enum.Enum):
    NEGATIVE_VALUE = "NEGATIVE_VALUE"
    ALL_ZERO_INPUTS = "ALL_ZERO_INPUTS"
    ALL_ZERO_OUTPUTS = "ALL_ZERO_OUTPUTS"
    RAGGED_ROW = "RAGGED_ROW"
    EMPTY = "EMPTY"


@dataclass(frozen=True)
class ValidationIssue:
    code: IssueCode
    message: str
    dmu_index: int | None = None
    factor_index: int | None = None


class DatasetError(ValueError):
    """Raised when a CSV document cannot be turned into a Dataset.

    ``code`` is set when the failure maps onto a validation issue kind;
    malformed headers, non-numeric cells and duplicate names leave it ``None``.
    ``row`` and ``column`` are 1-based positions in the document when known.
    """

    def __init__(self, message, code=None, row=None, column=None):
        super().__init__(message)
        self.code = code
        self.row = row
        self.column = column


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """n DMUs with an n x m input matrix and an n x p output matrix.

    Construction checks shapes only; use :func:`validate_dataset` for the
    nonnegativity and nonzero-row conditions.
    """

    dmu_names: tuple[str, ...]
    inputs: np.ndarray
    outputs: np.ndarray
    input_names: tuple[str, ...] = field(default=())
    output_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        x = _frozen(self.inputs)
        y = _frozen(self.outputs)
        if x.ndim != 2 or y.ndim != 2:
            raise ValueError("inputs and outputs must be 2-D")
        n = len(self.dmu_names)
        if x.shape[0] != n or y.shape[0] != n:
            raise ValueError(
                f"row count mismatch: {n} names, {x.shape[0]} input rows, {y.shape[0]} output rows"
            )
        in_names = tuple(self.input_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        out_names = tuple(self.output_names) or tuple(f"y{k + 1}" for k in range(y.shape[1]))
        if len(in_names) != x.shape[1] or len(out_names) != y.shape[1]:
            raise ValueError("factor name count does not match matrix width")
        object.__setattr__(self, "dmu_names", tuple(self.dmu_names))
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "outputs", y)
        object.__setattr__(self, "input_names", in_names)
        object.__setattr__(self, "output_names", out_names)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def m(self) -> int:
        return self.inputs.shape[1]

    @property
    def p(self) -> int:
        return self.outputs.shape[1]

    def index(self, name: str) -> int:
        return self.dmu_names.index(name)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.dmu_names == other.dmu_names
            and self.input_names == other.input_names
            and self.output_names == other.output_names
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.outputs, other.outputs)
        )

    def __hash__(self):
        return hash((self.dmu_names, self.inputs.tobytes(), self.outputs.tobytes()))

    def with_dmu(self, name: str, x: Sequence[float], y: Sequence[float]) -> "Dataset":
        """Return a copy with one extra DMU appended."""
        return Dataset(
            self.dmu_names + (name,),
            np.vstack([self.inputs, np.asarray(x, dtype=float)[None, :]]),
            np.vstack([self.outputs, np.asarray(y, dtype=float)[None, :]]),
            self.input_names,
            self.output_names,
        )


_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


def _parse_float(cell: str, row: int, col: int, header: str) -> float:
    text = cell.strip()
    if not _NUMBER.fullmatch(text):
        raise DatasetError(
            f"row {row}, column {col} ({header}): non-numeric value {cell!r}", row=row, column=col
        )
    value = float(text)
    if not math.isfinite(value):
        raise DatasetError(
            f"row {row}, column {col} ({header}): value {cell!r} overflows", row=row, column=col
        )
    if value < 0:
        raise DatasetError(
            f"row {row}, column {col} ({header}): negative value {cell!r}",
            code=IssueCode.NEGATIVE_VALUE,
            row=row,
            column=col,
        )
    return value


def parse_header(line: str) -> tuple[list[int], list[str], list[int], list[str]]:
    """Split a header line into input/output column positions and names."""
    cells = [c.strip() for c in line.split(",")]
    if cells[0] != "dmu":
        raise DatasetError(f"header column 1 must be 'dmu', got {cells[0]!r}", row=1, column=1)
    in_cols, in_names, out_cols, out_names = [], [], [], []
    for col, cell in enumerate(cells[1:], start=2):
        if cell.startswith("I:") and len(cell) > 2:
            in_cols.append(col - 1)
            in_names.append(cell[2:])
        elif cell.startswith("O:") and len(cell) > 2:
            out_cols.append(col - 1)
            out_names.append(cell[2:])
        else:
            raise DatasetError(
                f"header column {col}: expected 'I:<name>' or 'O:<name>', got {cell!r}",
                row=1,
                column=col,
            )
    if not in_cols or not out_cols:
        raise DatasetError("header needs at least one I: and one O: column", row=1)
    return in_cols, in_names, out_cols, out_names


def parse_dataset(text: str) -> Dataset:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DatasetError("empty document", code=IssueCode.EMPTY)
    in_cols, in_names, out_cols, out_names = parse_header(lines[0])
    width = 1 + len(in_cols) + len(out_cols)
    headers = [c.strip() for c in lines[0].split(",")]

    names: list[str] = []
    seen: set[str] = set()
    xs: list[list[float]] = []
    ys: list[list[float]] = []
    for row, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise DatasetError(
                f"row {row}: expected {width} cells, got {len(cells)}",
                code=IssueCode.RAGGED_ROW,
                row=row,
            )
        name = cells[0].strip()
        if not name:
            raise DatasetError(f"row {row}: empty DMU name", row=row, column=1)
        if name in seen:
            raise DatasetError(f"row {row}: duplicate DMU name {name!r}", row=row, column=1)
        seen.add(name)
        names.append(name)
        xs.append([_parse_float(cells[c], row, c + 1, headers[c]) for c in in_cols])
        ys.append([_parse_float(cells[c], row, c + 1, headers[c]) for c in out_cols])

    if not names:
        raise DatasetError("document has a header but no DMU rows", code=IssueCode.EMPTY)
    return Dataset(
        tuple(names),
        np.array(xs).reshape(len(names), len(in_cols)),
        np.array(ys).reshape(len(names), len(out_cols)),
        tuple(in_names),
        tuple(out_names),
    )


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh.read())


def dataset_to_csv(d: Dataset) -> str:
    """Serialize with shortest round-trip float formatting."""
    header = ["dmu"] + [f"I:{s}" for s in d.input_names] + [f"O:{s}" for s in d.output_names]
    out = [",".join(header)]
    for i, name in enumerate(d.dmu_names):
        vals = [repr(float(v)) for v in d.inputs[i]] + [repr(float(v)) for v in d.outputs[i]]
        out.append(",".join([name] + vals))
    return "\n".join(out) + "\n"


def validate_dataset(d: Dataset) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    if d.n == 0 or d.m == 0 or d.p == 0:
        issues.append(ValidationIssue(IssueCode.EMPTY, f"need n, m, p >= 1 (got {d.n}, {d.m}, {d.p})"))
        return issues
    # factor_index counts within the factor's own class (inputs or outputs)
    for label, mat, names in (
        ("input", d.inputs, d.input_names),
        ("output", d.outputs, d.output_names),
    ):
        for i, j in zip(*np.nonzero(~(mat >= 0))):
            issues.append(
                ValidationIssue(
                    IssueCode.NEGATIVE_VALUE,
                    f"DMU {d.dmu_names[i]!r}: {label} {names[j]!r} is {mat[i, j]!r}",
                    int(i),
                    int(j),
                )
            )
    for i, name in enumerate(d.dmu_names):
        if not np.any(d.inputs[i] > 0):
            issues.append(
                ValidationIssue(IssueCode.ALL_ZERO_INPUTS, f"DMU {name!r}: all inputs are zero", i)
            )
        if not np.any(d.outputs[i] > 0):
            issues.append(
                ValidationIssue(IssueCode.ALL_ZERO_OUTPUTS, f"DMU {name!r}: all outputs are zero", i)
            )
    return issues
