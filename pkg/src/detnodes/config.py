"""Flat key=value run configuration.

One key per line, comma-separated lists, full-line # comments.  Unknown
keys, duplicate keys and out-of-range values are rejected with their line
numbers; defaults for every absent key are applied and echoed into the run
summary so emitted artifacts pin the full effective configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field


class ConfigError(ValueError):
    pass


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_floats(raw: str) -> tuple:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip() != "")


def _parse_mode_triples(raw: str) -> tuple:
    """Comma-flattened (j, k, amplitude) triples, e.g. '1,1,0.1,2,1,0.05'."""
    toks = [tok for tok in raw.split(",") if tok.strip() != ""]
    if len(toks) % 3 != 0:
        raise ValueError("mode list length must be a multiple of 3 (j,k,amp triples)")
    out = []
    for i in range(0, len(toks), 3):
        j, k = int(toks[i]), int(toks[i + 1])
        amp = float(toks[i + 2])
        if j < 1 or k < 1:
            raise ValueError("mode indices must be >= 1")
        out.append((j, k, amp))
    return tuple(out)


def _parse_int_pair(raw: str) -> tuple:
    toks = [tok for tok in raw.split(",") if tok.strip() != ""]
    if len(toks) != 2:
        raise ValueError("expected two comma-separated integers")
    return (int(toks[0]), int(toks[1]))


@dataclass(frozen=True)
class _Key:
    parse: object
    default: object
    check: object = None
    message: str = ""


def _positive(v) -> bool:
    return v > 0


def _nonnegative(v) -> bool:
    return v >= 0


KEY_SPECS: dict[str, _Key] = {
    # domain / grid
    "lx": _Key(float, 1.0, _positive, "lx must be positive"),
    "ly": _Key(float, 1.0, _positive, "ly must be positive"),
    "nx": _Key(int, 127, lambda v: v >= 3, "nx must be at least 3"),
    "ny": _Key(int, 127, lambda v: v >= 3, "ny must be at least 3"),
    # solver
    "k": _Key(float, 1.0, _positive, "k must be positive"),
    "p": _Key(float, 3.0, lambda v: v > 1, "p must exceed 1"),
    "dt": _Key(float, 1e-3, _positive, "dt must be positive"),
    "horizon": _Key(float, 1.0, _positive, "horizon must be positive"),
    "t0": _Key(float, 0.0, _nonnegative, "t0 must be nonnegative"),
    "nonlinearity": _Key(_parse_bool, True),
    "sample_every": _Key(int, 10, lambda v: v >= 1, "sample_every must be >= 1"),
    "snapshots": _Key(_parse_bool, False),
    # forcing for the primary trajectory and (optionally) the partner
    "forcing": _Key(str, "zero", lambda v: v in ("zero", "constant", "converging", "pair_difference", "manufactured"), "unknown forcing kind"),
    "forcing_amp": _Key(float, 1.0),
    "forcing_mode": _Key(_parse_int_pair, (1, 1)),
    "forcing_rate": _Key(float, 1.0, _positive, "forcing_rate must be positive"),
    "forcing_g_amp": _Key(float, 0.0),
    "forcing_g_mode": _Key(_parse_int_pair, (1, 1)),
    "forcing_partner": _Key(str, "same", lambda v: v in ("same", "zero", "constant", "converging", "pair_difference", "manufactured"), "unknown partner forcing kind"),
    # initial data as sine-mode sums
    "u0_modes": _Key(_parse_mode_triples, ((1, 1, 0.1),)),
    "v0_modes": _Key(_parse_mode_triples, ((1, 1, -0.1),)),
    # node placement
    "nodes_density": _Key(float, 0.3, _positive, "nodes_density must be positive"),
    "nodes_count": _Key(int, 0, _nonnegative, "nodes_count must be nonnegative"),
    # constants and their estimation
    "constants": _Key(str, "estimated", lambda v: v in ("assumed", "estimated"), "constants must be 'assumed' or 'estimated'"),
    "family_j": _Key(int, 16, lambda v: v >= 1, "family_j must be >= 1"),
    "family_count": _Key(int, 100, lambda v: v >= 1, "family_count must be >= 1"),
    "family_seed": _Key(int, 2024),
    "est_densities": _Key(_parse_floats, (0.35, 0.18, 0.09)),
    "c_b": _Key(float, 0.0, _nonnegative, "c_b must be nonnegative"),
    "c1": _Key(float, 0.0, _nonnegative, "c1 must be nonnegative"),
    "c2": _Key(float, 0.0, _nonnegative, "c2 must be nonnegative"),
    "c3": _Key(float, 0.0, _nonnegative, "c3 must be nonnegative"),
    "c4": _Key(float, 0.0, _nonnegative, "c4 must be nonnegative"),
    "c5": _Key(float, 0.0, _nonnegative, "c5 must be nonnegative"),
    "a1": _Key(float, 0.0, _nonnegative, "a1 must be nonnegative"),
    "a4": _Key(float, 0.0, _nonnegative, "a4 must be nonnegative"),
    # threshold inputs (the `thresholds` subcommand is a pure calculator)
    "m_fbar": _Key(float, 1.0, _positive, "m_fbar must be positive"),
    "m_traj": _Key(float, 1.0, _positive, "m_traj must be positive"),
    "m_f": _Key(float, 1.0, _positive, "m_f must be positive"),
    "m_g": _Key(float, 1.0, _positive, "m_g must be positive"),
    # experiment tolerances
    "tol": _Key(float, 1e-3, _positive, "tol must be positive"),
    "newton_tol": _Key(float, 1e-8, _positive, "newton_tol must be positive"),
    "tol_eta": _Key(float, 1e-4, _positive, "tol_eta must be positive"),
    "tol_v": _Key(float, 1e-3, _positive, "tol_v must be positive"),
    "tol_c": _Key(float, 1e-2, _positive, "tol_c must be positive"),
    "tol_cauchy": _Key(float, 1e-6, _positive, "tol_cauchy must be positive"),
    "energy_tol": _Key(float, 0.05, _positive, "energy_tol must be positive"),
    "shift_fraction": _Key(float, 0.1, lambda v: 0 < v < 1, "shift_fraction must be in (0, 1)"),
    "steady_guess_amp": _Key(float, 0.9),
    # sweep
    "densities": _Key(_parse_floats, (0.7, 0.35, 0.18, 0.09)),
    # misc
    "seed": _Key(int, 0),
    "figures": _Key(_parse_bool, True),
}


@dataclass
class RunConfig:
    values: dict
    provided: set = dc_field(default_factory=set)

    def __getitem__(self, key: str):
        return self.values[key]

    def echo(self) -> dict:
        """Full effective configuration (defaults filled in), for summaries."""
        return dict(sorted(self.values.items()))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat key=value document."""
    values = {name: spec.default for name, spec in KEY_SPECS.items()}
    seen_lines: dict[str, int] = {}
    provided: set = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value' (line {lineno})")
        key, _, raw_val = line.partition("=")
        key = key.strip()
        raw_val = raw_val.strip()
        if key not in KEY_SPECS:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        if key in seen_lines:
            raise ConfigError(
                f"duplicate key {key!r} (lines {seen_lines[key]} and {lineno})"
            )
        seen_lines[key] = lineno
        spec = KEY_SPECS[key]
        try:
            val = spec.parse(raw_val)
        except ValueError as exc:
            raise ConfigError(f"invalid value for {key!r}: {exc} (line {lineno})") from exc
        if spec.check is not None and not spec.check(val):
            raise ConfigError(f"{spec.message} (line {lineno})")
        values[key] = val
        provided.add(key)

    return RunConfig(values=values, provided=provided)


def format_value(v) -> str:
    """Deterministic text form for summary files."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        flat = []
        for item in v:
            if isinstance(item, tuple):
                flat.extend(item)
            else:
                flat.append(item)
        return ",".join(format_value(x) for x in flat)
    return str(v)
