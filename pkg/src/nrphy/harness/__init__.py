"""Chain assembly, link simulators, throughput benchmark, and the CLI."""

from .bench import run_throughput_bench
from .chain import (
    DecodeOutput,
    EncodeOutput,
    decode_chain,
    decode_chain_from_llrs,
    encode_chain,
)
from .config import ChainConfig, load_config, parse_config_text
from .report import RunReport
from .sim import HarqLinkResult, run_bler_sweep, run_harq_link, run_harq_sim
