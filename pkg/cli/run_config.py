# cli/run_config.py
"""
Run configuration: settings defaults < `key = value` config file < flags.
"""

import os
from dataclasses import dataclass, field, fields
from typing import List, Optional, Tuple

from loguru import logger

from config.settings import DEFAULT_M, DEFAULT_R_IN, DEFAULT_R_OUT, DEFAULT_RHO
from utils.error_handler import ConfigError

COMMANDS = ('decompose', 'laws', 'dbar', 'converge')


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(' ', '').split(',') if v]


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(' ', '').split(',') if v]


def _complex_list(text):
    if isinstance(text, (list, tuple)):
        return [complex(v) for v in text]
    return [complex(v) for v in str(text).replace(' ', '').split(',') if v]


def _flag(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """
    Parameters of one CLI command.

    Attributes:
        command (str): decompose | laws | dbar | converge
        n (int): Dimension, 1..3
        M (list): Grid sizes (converge uses all, other commands the first)
        rho (float): Interior factor
        centers (list): Disc centres (default origin)
        radii (list): Disc radii (default 1)
        r_in, r_out (float): Cutoff radii relative to the polydisc radii
        fn (str): Registry function name
        poly_file (str): Polynomial input file (instead of fn)
        alpha (list): Basepoint
        seed, trials (int): Law suite parameters
        out (str): JSON report / CSV table path (stdout when None)
        fields_out (str): CSV field dump path
        tol_id, tol_hol (float): Absolute tolerance overrides
        norm (str): 'sup' or 'l2' holomorphy gate
        inject_sign_error (bool): Law suite self-test
        form_file, potential_file, field_file (str): dbar inputs
        method (str): 'fft' or 'direct'
        orders (bool): decompose also runs M/2 for order estimates
    """

    command: str
    n: int = 2
    M: List[int] = field(default_factory=lambda: [DEFAULT_M])
    rho: float = DEFAULT_RHO
    centers: Optional[List[complex]] = None
    radii: Optional[List[float]] = None
    r_in: float = DEFAULT_R_IN
    r_out: float = DEFAULT_R_OUT
    fn: Optional[str] = None
    poly_file: Optional[str] = None
    alpha: Optional[List[complex]] = None
    seed: int = 1
    trials: int = 200
    out: Optional[str] = None
    fields_out: Optional[str] = None
    tol_id: Optional[float] = None
    tol_hol: Optional[float] = None
    norm: str = 'sup'
    inject_sign_error: bool = False
    form_file: Optional[str] = None
    potential_file: Optional[str] = None
    field_file: Optional[str] = None
    method: str = 'fft'
    orders: bool = True

    @property
    def basepoint(self) -> Tuple[complex, ...]:
        return tuple(self.alpha) if self.alpha else (0j,) * self.n

    def validate(self):
        """
        Raises:
            ConfigError: on any parameter outside its domain or a missing file
        """
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != 'laws' and not 1 <= self.n <= 3:
            raise ConfigError(f"n must be 1, 2 or 3, got {self.n}")
        if not self.M or any(m < 4 for m in self.M):
            raise ConfigError(f"every M must be at least 4, got {self.M}")
        if self.command == 'converge':
            if len(self.M) < 2:
                raise ConfigError("converge needs at least two grid levels (e.g. --M 16,32)")
            if any(b <= a for a, b in zip(self.M, self.M[1:])):
                raise ConfigError(f"--M must be strictly ascending, got {self.M}")
        if not 0 < self.rho <= 1:
            raise ConfigError(f"rho must lie in (0,1], got {self.rho}")
        if not 0 < self.r_in < self.r_out < 1:
            raise ConfigError(f"need 0 < r_in < r_out < 1, got {self.r_in}, {self.r_out}")
        for name in ('centers', 'radii', 'alpha'):
            value = getattr(self, name)
            if value is not None and len(value) != self.n:
                raise ConfigError(f"--{name} has {len(value)} entries, n={self.n}")
        if self.radii is not None and any(r <= 0 for r in self.radii):
            raise ConfigError(f"radii must be positive, got {self.radii}")
        if self.norm not in ('sup', 'l2'):
            raise ConfigError(f"--norm must be 'sup' or 'l2', got {self.norm!r}")
        if self.method not in ('fft', 'direct'):
            raise ConfigError(f"--method must be 'fft' or 'direct', got {self.method!r}")
        if self.trials < 0:
            raise ConfigError(f"--trials must be non-negative, got {self.trials}")
        if self.command in ('decompose', 'converge') and (self.fn is None) == (self.poly_file is None):
            raise ConfigError("give exactly one of --fn or --poly-file")
        if self.command == 'dbar':
            given = [f for f in (self.form_file, self.potential_file, self.field_file) if f is not None]
            if len(given) != 1:
                raise ConfigError("dbar needs exactly one of --form-file, --potential-file, --field-file")
        for name in ('poly_file', 'form_file', 'potential_file', 'field_file'):
            path = getattr(self, name)
            if path is not None and not os.path.isfile(path):
                raise ConfigError(f"--{name.replace('_', '-')}: no such file {path!r}")
        return self


_CONVERTERS = {
    'n': int, 'M': _int_list, 'rho': float, 'centers': _complex_list, 'radii': _float_list,
    'r_in': float, 'r_out': float, 'fn': str, 'poly_file': str, 'alpha': _complex_list,
    'seed': int, 'trials': int, 'out': str, 'fields_out': str, 'tol_id': float, 'tol_hol': float,
    'norm': str, 'inject_sign_error': _flag, 'form_file': str, 'potential_file': str,
    'field_file': str, 'method': str, 'orders': _flag,
}


def _convert(key, value, where):
    try:
        return _CONVERTERS[key](value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: bad value for {key}: {value!r} ({exc})") from exc


def load_config_file(path):
    """
    Read `key = value` lines; `#` starts a comment, dashes in keys become underscores.

    Returns:
        dict: key -> converted value

    Raises:
        ConfigError: for a missing file, a malformed line or an unknown key
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split('=', 1))
            key = key.replace('-', '_')
            if key not in _CONVERTERS:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = _convert(key, value, f"{path}:{line_no}")
    logger.debug(f"config file {path}: {sorted(values)}")
    return values


def build_run_config(command, flags: dict, config_file=None) -> RunConfig:
    """
    Layer the configuration and validate it.

    Args:
        command (str): Subcommand
        flags (dict): Parsed flags; None means "not given"
        config_file (str): Optional `key = value` file

    Returns:
        RunConfig
    """
    merged = {}
    if config_file:
        merged.update(load_config_file(config_file))
    known = {f.name for f in fields(RunConfig)} - {'command'}
    for key, value in flags.items():
        if key in known and value is not None:
            merged[key] = _convert(key, value, f"--{key.replace('_', '-')}")
    return RunConfig(command=command, **merged).validate()
