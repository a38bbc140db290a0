"""Chain configuration: one flat key=value file drives every subcommand."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..errors import ConfigError
from ..ldpc import LiftedLdpcCode, build_code, choose_base_graph, select_lifting
from ..scramble import ScramblingIdentity

DEFAULT_CONFIG_NAME = "default"


@dataclass(frozen=True)
class ChainConfig:
    """Per-run parameters for the encode/decode chain and simulators.

    The defaults are the benchmark operating point: one 8448-bit block,
    rate 2/3, QPSK, 12672 rate-matched bits, 10 dB Es/N0.
    """

    k_prime: int = 8448
    target_rate: float = 2 / 3
    e_r: int = 12672
    q_m: int = 2
    rv_schedule: tuple[int, ...] = (0, 2, 3, 1)
    rnti: int = 42
    q: int = 0
    cell_id: int = 1
    harq_process: int = 0
    blocks: int = 1
    snr_db: float = 10.0
    seed: int = 2025

    def __post_init__(self):
        if not self.rv_schedule:
            raise ConfigError("rv schedule must be nonempty")
        if self.blocks < 1:
            raise ConfigError("blocks must be >= 1")
        if self.e_r % self.q_m:
            raise ConfigError("E_r must be a multiple of Q_m")

    @property
    def G(self) -> int:
        """Total rate-matched bits across all blocks."""
        return self.e_r * self.blocks

    @property
    def sigma2(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def identity(self) -> ScramblingIdentity:
        return ScramblingIdentity(rnti=self.rnti, q=self.q, cell_id=self.cell_id)

    def code(self) -> tuple[LiftedLdpcCode, int]:
        """The lifted code and filler count this configuration selects."""
        bg = choose_base_graph(self.k_prime, self.target_rate)
        Zc, _, K, F = select_lifting(bg, self.k_prime)
        return build_code(bg, Zc), F

    def echo(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["rv_schedule"] = ",".join(str(r) for r in self.rv_schedule)
        out["G"] = self.G
        return out


_INT_KEYS = {"k_prime", "e_r", "q_m", "rnti", "q", "cell_id",
             "harq_process", "blocks", "seed"}
_FLOAT_KEYS = {"target_rate", "snr_db"}


def parse_config_text(text: str) -> ChainConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key == "rv_schedule":
            values[key] = tuple(int(v) for v in val.split(",") if v)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    try:
        return ChainConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ChainConfig:
    """Read a config file; the name ``default`` selects the defaults."""
    if path == DEFAULT_CONFIG_NAME:
        return ChainConfig()
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def with_overrides(cfg: ChainConfig, **overrides) -> ChainConfig:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides) if overrides else cfg
