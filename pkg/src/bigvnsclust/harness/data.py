"""Dataset ingestion, synthetic Gaussian mixtures, and the key-value spec format.

Spec files are flat ``key = value`` text, one entry per line; ``#`` starts a
comment. See README.md for the recognised keys.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import as_data_matrix
from ..errors import IngestionError

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def load_csv(path, skip_header: bool = False, delimiter: str = ",") -> np.ndarray:
    """Read a numeric CSV file into an ``(m, n)`` float64 matrix."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 and skip_header:
                continue
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise IngestionError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
            values = []
            for col, cell in enumerate(row, start=1):
                cell = cell.strip()
                if not _NUMBER.match(cell):
                    raise IngestionError(f"{path}: row {lineno}, column {col}: not a number: {cell!r}")
                values.append(float(cell))
            rows.append(values)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    return as_data_matrix(rows)


def save_csv(path, X, header: list[str] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(header)
        for row in np.asarray(X):
            writer.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic Gaussian mixture: component ``i`` has ``counts[i]`` points around ``means[i]``."""

    means: tuple[tuple[float, ...], ...]
    stds: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.means) == len(self.stds) == len(self.counts)) or not self.means:
            raise ValueError("means, stds and counts must be nonempty and of equal length")
        if len({len(mu) for mu in self.means}) != 1:
            raise ValueError("all means must have the same dimension")
        if any(c < 1 for c in self.counts):
            raise ValueError("component counts must be >= 1")
        if any(not sd > 0 for sd in self.stds):
            raise ValueError("standard deviations must be positive")

    @property
    def m(self) -> int:
        return sum(self.counts)


# Three-blob dataset used for the local-minimum escape experiment.
X1_SPEC = MixtureSpec(
    means=((0.2, 0.5), (0.7, 0.8), (0.5, 1.0)),
    stds=(0.15, 0.08, 0.1),
    counts=(3000, 1500, 1500),
)
X1_ADVERSARIAL_INIT = ((0.1, 0.2), (0.1, 0.15), (0.5, 1.0))

BUILTIN_MIXTURES = {"x1": X1_SPEC}


def generate_gaussian_mixture(spec: MixtureSpec, seed: int | None) -> np.ndarray:
    """Rows are grouped by component, in the order the components are listed."""
    rng = np.random.default_rng(seed)
    blocks = [
        rng.normal(loc=mu, scale=sd, size=(count, len(mu)))
        for mu, sd, count in zip(spec.means, spec.stds, spec.counts)
    ]
    return as_data_matrix(np.vstack(blocks))


def random_mixture_spec(n_components: int, n_features: int, m: int, seed: int, spread: float = 1.0) -> MixtureSpec:
    """Mixture with random means in ``[0, spread]^n``, uneven sizes and stds."""
    rng = np.random.default_rng(seed)
    means = rng.uniform(0.0, spread, size=(n_components, n_features))
    stds = rng.uniform(0.02, 0.08, size=n_components) * spread
    weights = rng.uniform(0.5, 2.0, size=n_components)
    counts = np.maximum(1, np.floor(m * weights / weights.sum())).astype(int)
    counts[0] += m - counts.sum()
    return MixtureSpec(
        means=tuple(tuple(float(v) for v in mu) for mu in means),
        stds=tuple(float(v) for v in stds),
        counts=tuple(int(c) for c in counts),
    )


def parse_kv(text: str, source: str = "<spec>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"{source}:{lineno}: empty key")
        if key in entries:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _floats(value: str) -> list[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def _ints(value: str) -> list[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def parse_mixture_spec(text: str, source: str = "<mixture>") -> MixtureSpec:
    """Parse ``component.<i>.mean|std|count`` entries (components ordered by ``i``)."""
    entries = parse_kv(text, source)
    comps: dict[int, dict[str, str]] = {}
    for key, value in entries.items():
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "component" or parts[2] not in ("mean", "std", "count"):
            raise ValueError(f"{source}: unknown key {key!r}")
        comps.setdefault(int(parts[1]), {})[parts[2]] = value
    means, stds, counts = [], [], []
    for idx in sorted(comps):
        comp = comps[idx]
        missing = {"mean", "std", "count"} - comp.keys()
        if missing:
            raise ValueError(f"{source}: component {idx} is missing {sorted(missing)}")
        means.append(tuple(_floats(comp["mean"])))
        stds.append(float(comp["std"]))
        counts.append(int(comp["count"]))
    return MixtureSpec(tuple(means), tuple(stds), tuple(counts))


def format_mixture_spec(spec: MixtureSpec) -> str:
    lines = []
    for i, (mu, sd, count) in enumerate(zip(spec.means, spec.stds, spec.counts), start=1):
        lines.append(f"component.{i}.mean = {','.join(repr(v) for v in mu)}")
        lines.append(f"component.{i}.std = {sd!r}")
        lines.append(f"component.{i}.count = {count}")
    return "\n".join(lines) + "\n"


def load_mixture(name_or_path: str) -> MixtureSpec:
    if name_or_path in BUILTIN_MIXTURES:
        return BUILTIN_MIXTURES[name_or_path]
    path = Path(name_or_path)
    return parse_mixture_spec(path.read_text(), str(path))


@dataclass
class DatasetSpec:
    """Where a dataset comes from, plus optional best-known objectives per k.

    ``source`` is ``file:<path>`` or ``synthetic:<builtin name or mixture file>``.
    """

    name: str
    source: str
    n_features: int | None = None
    f_star: dict[int, float] = field(default_factory=dict)
    skip_header: bool = False
    seed: int = 0

    def __post_init__(self):
        for k, value in self.f_star.items():
            if not value > 0:
                raise ValueError(f"dataset {self.name}: best-known objective for k={k} must be > 0")
        kind, _, target = self.source.partition(":")
        if kind not in ("file", "synthetic") or not target:
            raise ValueError(f"dataset {self.name}: source must be 'file:<path>' or 'synthetic:<mixture>'")

    def load(self, base_dir: Path | None = None) -> np.ndarray:
        kind, _, target = self.source.partition(":")
        if kind == "file":
            path = Path(target)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            X = load_csv(path, skip_header=self.skip_header)
        else:
            if target not in BUILTIN_MIXTURES and base_dir is not None and not Path(target).is_absolute():
                target = str(base_dir / target)
            X = generate_gaussian_mixture(load_mixture(target), self.seed)
        if self.n_features is not None and X.shape[1] != self.n_features:
            raise IngestionError(f"dataset {self.name}: expected {self.n_features} features, got {X.shape[1]}")
        return X


ALGORITHMS = ("bigvns", "bigmeans", "kmeans")
PARAM_KEYS = ("sample_size", "time_limit", "p_max", "max_iters", "lloyd_max_iters", "rel_tol", "candidates")


@dataclass
class ExperimentSpec:
    datasets: list[DatasetSpec]
    k_values: list[int] = field(default_factory=lambda: [2, 3, 5, 10, 15, 20, 25])
    n_exec: int = 15
    algorithms: list[str] = field(default_factory=lambda: ["bigvns", "bigmeans"])
    params: dict[str, dict[str, float]] = field(default_factory=dict)
    base_seed: int = 0
    fstar_starts: int = 20
    base_dir: Path | None = None

    def __post_init__(self):
        if self.n_exec < 1:
            raise ValueError("n_exec must be >= 1")
        if not self.k_values:
            raise ValueError("k_values must be nonempty")
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ValueError("dataset names must be unique")
        for algo in self.algorithms:
            if algo.split("@")[0] not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")

    def algo_params(self, algo: str) -> dict[str, float]:
        params = dict(self.params.get(algo.split("@")[0], {}))
        params.update(self.params.get(algo, {}))
        return params


def parse_experiment_spec(text: str, source: str = "<experiment>", base_dir: Path | None = None) -> ExperimentSpec:
    entries = parse_kv(text, source)
    datasets: dict[str, dict] = {}
    params: dict[str, dict[str, float]] = {}
    top: dict[str, str] = {}
    for key, value in entries.items():
        parts = key.split(".")
        if parts[0] == "dataset" and len(parts) >= 2:
            ds = datasets.setdefault(parts[1], {"name": parts[1], "f_star": {}})
            if len(parts) == 2:
                ds["source"] = value
            elif parts[2] == "fstar" and len(parts) == 4:
                ds["f_star"][int(parts[3])] = float(value)
            elif len(parts) == 3 and parts[2] == "n_features":
                ds["n_features"] = int(value)
            elif len(parts) == 3 and parts[2] == "skip_header":
                ds["skip_header"] = value.lower() in ("1", "true", "yes")
            elif len(parts) == 3 and parts[2] == "seed":
                ds["seed"] = int(value)
            else:
                raise ValueError(f"{source}: unknown dataset key {key!r}")
        elif len(parts) == 2 and parts[0].split("@")[0] in ALGORITHMS:
            if parts[1] not in PARAM_KEYS:
                raise ValueError(f"{source}: unknown parameter {key!r}")
            params.setdefault(parts[0], {})[parts[1]] = float(value)
        elif len(parts) == 1:
            top[key] = value
        else:
            raise ValueError(f"{source}: unknown key {key!r}")

    unknown = set(top) - {"k_values", "n_exec", "algorithms", "base_seed", "fstar_starts", "name"}
    if unknown:
        raise ValueError(f"{source}: unknown keys {sorted(unknown)}")
    for name, ds in datasets.items():
        if "source" not in ds:
            raise ValueError(f"{source}: dataset {name!r} has no source")
    kwargs = {}
    if "k_values" in top:
        kwargs["k_values"] = _ints(top["k_values"])
    if "n_exec" in top:
        kwargs["n_exec"] = int(top["n_exec"])
    if "algorithms" in top:
        kwargs["algorithms"] = [a.strip() for a in top["algorithms"].split(",") if a.strip()]
    if "base_seed" in top:
        kwargs["base_seed"] = int(top["base_seed"])
    if "fstar_starts" in top:
        kwargs["fstar_starts"] = int(top["fstar_starts"])
    return ExperimentSpec(
        datasets=[DatasetSpec(**ds) for ds in datasets.values()],
        params=params,
        base_dir=base_dir,
        **kwargs,
    )


def load_experiment_spec(path) -> ExperimentSpec:
    path = Path(path)
    return parse_experiment_spec(path.read_text(), str(path), base_dir=path.parent)
