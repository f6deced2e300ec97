# run_config.py
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace

from app_config import Config, load_json_config
from errors import ConfigError

COMMANDS = ('levels', 'inversion', 'components', 'envelopes', 'power', 'peaks', 'validate')
TIME_DOMAIN_COMMANDS = ('inversion', 'components', 'envelopes', 'power', 'peaks')
SPECTRAL_COMMANDS = ('power', 'peaks')
BACKENDS = ('rwa', 'crwa', 'exact')
FORMATS = ('csv', 'json', 'svg')


@dataclass(frozen=True)
class RunConfig:
    command: str
    g: float = 0.06
    alpha_sq: float = 10.0
    backends: tuple = BACKENDS
    tau_max: float = None
    n_points: int = field(default_factory=lambda: Config.N_POINTS)
    n_cut: int = field(default_factory=lambda: Config.N_CUT)
    tail_tol: float = field(default_factory=lambda: Config.TAIL_TOL)
    output: str = None
    format: str = 'csv'
    n_max: int = field(default_factory=lambda: Config.LEVELS_N_MAX)
    spectrum_bin: float = field(default_factory=lambda: Config.SPECTRUM_BIN)
    freq_max: float = field(default_factory=lambda: Config.SPECTRUM_FREQ_MAX)
    min_prominence: float = field(default_factory=lambda: Config.PEAK_PROMINENCE)
    quick: bool = False

    def __post_init__(self):
        if isinstance(self.backends, str):
            object.__setattr__(self, 'backends', parse_backends(self.backends))
        else:
            object.__setattr__(self, 'backends', tuple(self.backends))
        if self.tau_max is None:
            default_tau = (2.0 * math.pi / self.spectrum_bin
                           if self.command in SPECTRAL_COMMANDS and self.spectrum_bin and self.spectrum_bin > 0
                           else Config.TAU_MAX)
            object.__setattr__(self, 'tau_max', default_tau)
        if self.output is None:
            object.__setattr__(self, 'output', os.path.join(Config.OUTPUT_DIR, self.command))
        self.validate()

    @property
    def alpha(self):
        return math.sqrt(self.alpha_sq)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'; expected one of {', '.join(COMMANDS)}")
        if not math.isfinite(self.g) or self.g < 0:
            raise ConfigError(f"g must be a non-negative number, got {self.g}")
        if self.command in TIME_DOMAIN_COMMANDS and self.g == 0:
            raise ConfigError(f"'{self.command}' uses reduced time tau = 2gt and needs g > 0")
        if not math.isfinite(self.alpha_sq) or self.alpha_sq < 0:
            raise ConfigError(f"alpha_sq must be non-negative, got {self.alpha_sq}")
        unknown = [b for b in self.backends if b not in BACKENDS]
        if unknown or not self.backends:
            raise ConfigError(f"Backends must be a non-empty subset of {', '.join(BACKENDS)}, got {', '.join(self.backends)}")
        if not self.tau_max > 0:
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"n_points must be an integer >= 2, got {self.n_points}")
        if self.n_cut is not None and (int(self.n_cut) != self.n_cut or self.n_cut < 0):
            raise ConfigError(f"n_cut must be a non-negative integer, got {self.n_cut}")
        if not self.tail_tol > 0:
            raise ConfigError(f"tail_tol must be positive, got {self.tail_tol}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format}")
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ConfigError(f"n_max must be a non-negative integer, got {self.n_max}")
        if not self.spectrum_bin > 0:
            raise ConfigError(f"spectrum_bin must be positive, got {self.spectrum_bin}")
        if not self.freq_max > 0:
            raise ConfigError(f"freq_max must be positive, got {self.freq_max}")
        if not 0 < self.min_prominence < 1:
            raise ConfigError(f"min_prominence must lie in (0, 1), got {self.min_prominence}")

    def artifact_path(self, suffix, extension):
        stem = self.output
        for known in ('.csv', '.json', '.svg'):
            if stem.endswith(known):
                stem = stem[:-len(known)]
        name = f"{stem}_{suffix}" if suffix else stem
        return f"{name}.{extension}"

    def as_metadata(self):
        metadata = asdict(self)
        metadata['backends'] = list(self.backends)
        return metadata

    def with_overrides(self, **overrides):
        return replace(self, **overrides)


def parse_backends(text):
    return tuple(part.strip() for part in text.split(',') if part.strip())


def field_names():
    return {f.name for f in fields(RunConfig)}


def build_run_config(command, flags, config_file=None):
    """
    Merge sources with precedence flags > JSON config file > Config defaults.

    flags holds only the options given on the command line (None means unset).
    """
    merged = {}
    if config_file:
        from_file = load_json_config(config_file)
        unknown = set(from_file) - field_names() - {'command'}
        if unknown:
            raise ConfigError(f"Unknown keys in {config_file}: {', '.join(sorted(unknown))}")
        merged.update({key: value for key, value in from_file.items() if key != 'command'})
    merged.update({key: value for key, value in flags.items() if value is not None})
    try:
        return RunConfig(command=command, **merged)
    except TypeError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
