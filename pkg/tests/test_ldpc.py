"""LDPC module tests: graph structure, encoding, and the min-sum decoder."""

import numpy as np
import pytest

from nrphy.errors import ConfigError
from nrphy.ldpc import (
    LIFTING_SETS,
    BaseGraphId,
    InfoBlock,
    TerminationReason,
    build_code,
    check_node_update,
    choose_base_graph,
    ldpc_decode,
    ldpc_encode,
    parity_check,
    select_lifting,
)


def random_codeword(code, rng, filler=0):
    bits = np.zeros(code.K, dtype=np.uint8)
    bits[: code.K - filler] = rng.integers(0, 2, code.K - filler)
    return InfoBlock(bits, filler), ldpc_encode(code, InfoBlock(bits, filler))


def max_conf_llrs(bits):
    return np.where(np.asarray(bits) == 1, 31, -31).astype(np.int8)


class TestBaseGraphSelection:
    def test_benchmark_block_uses_bg1(self):
        assert choose_base_graph(8448, 2 / 3) is BaseGraphId.BG1

    def test_short_block_uses_bg2(self):
        assert choose_base_graph(100, 1 / 2) is BaseGraphId.BG2

    def test_midsize_boundary(self):
        assert choose_base_graph(3824, 0.67) is BaseGraphId.BG2
        assert choose_base_graph(3825, 0.67) is BaseGraphId.BG1

    def test_low_rate_prefers_bg2(self):
        assert choose_base_graph(8000, 0.25) is BaseGraphId.BG2

    def test_rejects_empty_payload(self):
        with pytest.raises(ConfigError):
            choose_base_graph(0, 0.5)


class TestSelectLifting:
    def test_largest_bg1_block(self):
        Zc, _, K, F = select_lifting(BaseGraphId.BG1, 8448)
        assert (Zc, K, F) == (384, 8448, 0)

    def test_minimum_lifting(self):
        Zc, _, K, F = select_lifting(BaseGraphId.BG2, 10)
        assert (Zc, K, F) == (2, 20, 10)

    def test_exact_fit(self):
        Zc, _, K, F = select_lifting(BaseGraphId.BG2, 100)
        assert (Zc, K, F) == (10, 100, 0)

    def test_smallest_valid_zc_scan(self):
        # Oracle: scan the whole lifting table directly.
        for k_prime in (24, 100, 263, 1000, 3840):
            Zc, _, K, _ = select_lifting(BaseGraphId.BG2, k_prime)
            candidates = [z for zs in LIFTING_SETS for z in zs if 10 * z >= k_prime]
            assert Zc == min(candidates)
            assert K == 10 * Zc

    def test_oversized_block_rejected(self):
        with pytest.raises(ConfigError):
            select_lifting(BaseGraphId.BG1, 8449)
        with pytest.raises(ConfigError):
            select_lifting(BaseGraphId.BG2, 3841)


class TestBuildCode:
    def test_bg1_benchmark_dimensions(self):
        code = build_code(BaseGraphId.BG1, 384)
        assert (code.K, code.N_cb, code.N_full) == (8448, 25344, 26112)

    def test_bg2_smallest_instance(self):
        code = build_code(BaseGraphId.BG2, 2)
        assert (code.K, code.N_cb, code.N_full) == (20, 100, 104)

    def test_all_shifts_below_zc(self):
        for bg in BaseGraphId:
            for Zc in (2, 13, 15, 208, 384):
                try:
                    code = build_code(bg, Zc)
                except ConfigError:
                    continue
                assert all(0 <= s < Zc for row in code.rows for _, s in row)

    def test_dimension_relation_across_sets(self):
        for bg, kb, nb in ((BaseGraphId.BG1, 22, 66), (BaseGraphId.BG2, 10, 50)):
            for zs in LIFTING_SETS:
                code = build_code(bg, zs[0])
                assert code.K == kb * zs[0]
                assert code.N_cb == nb * zs[0]
                assert code.N_full == code.N_cb + 2 * zs[0]

    def test_invalid_zc_rejected(self):
        with pytest.raises(ConfigError):
            build_code(BaseGraphId.BG1, 17)


class TestDataDirOverride:
    def test_env_var_redirects_table_loading(self, tmp_path, monkeypatch):
        import shutil

        import nrphy.ldpc as ldpc_mod

        packaged = build_code(BaseGraphId.BG2, 8)
        src = ldpc_mod.resources.files("nrphy") / "data"
        for name in ("bg1.txt", "bg2.txt"):
            shutil.copy(str(src / name), tmp_path / name)

        ldpc_mod._base_table.cache_clear()
        build_code.cache_clear()
        monkeypatch.setenv(ldpc_mod.DATA_DIR_ENV, str(tmp_path))
        try:
            redirected = build_code(BaseGraphId.BG2, 8)
            assert redirected.rows == packaged.rows

            (tmp_path / "bg2.txt").write_text("0 0 1 1 1 1\n")
            ldpc_mod._base_table.cache_clear()
            build_code.cache_clear()
            with pytest.raises(ConfigError):
                build_code(BaseGraphId.BG2, 8)
        finally:
            monkeypatch.delenv(ldpc_mod.DATA_DIR_ENV)
            ldpc_mod._base_table.cache_clear()
            build_code.cache_clear()


class TestEncoder:
    def test_zero_maps_to_zero(self):
        code = build_code(BaseGraphId.BG2, 10)
        cw = ldpc_encode(code, InfoBlock(np.zeros(code.K, np.uint8), 0))
        assert not cw.bits.any()

    def test_random_words_satisfy_parity(self):
        rng = np.random.default_rng(3)
        for bg, Zc in ((BaseGraphId.BG1, 8), (BaseGraphId.BG2, 36), (BaseGraphId.BG1, 384)):
            code = build_code(bg, Zc)
            for _ in range(5):
                info, cw = random_codeword(code, rng)
                assert parity_check(code, cw.bits)
                assert np.array_equal(cw.bits[: code.K], info.bits)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        code = build_code(BaseGraphId.BG2, 20)
        _, cw1 = random_codeword(code, rng)
        _, cw2 = random_codeword(code, rng)
        both = cw1.bits ^ cw2.bits
        assert parity_check(code, both)

    def test_every_lifting_set_encodable(self):
        rng = np.random.default_rng(5)
        for bg in BaseGraphId:
            for zs in LIFTING_SETS:
                for Zc in (zs[0], zs[-1]):
                    code = build_code(bg, Zc)
                    _, cw = random_codeword(code, rng)
                    assert parity_check(code, cw.bits), f"{bg} Zc={Zc}"

    def test_wrong_length_rejected(self):
        code = build_code(BaseGraphId.BG2, 2)
        with pytest.raises(ValueError):
            ldpc_encode(code, InfoBlock(np.zeros(code.K + 1, np.uint8), 0))


class TestParityCheck:
    def test_all_zero_passes(self):
        code = build_code(BaseGraphId.BG2, 4)
        assert parity_check(code, np.zeros(code.N_full, np.uint8))

    def test_every_single_bit_flip_detected(self):
        rng = np.random.default_rng(6)
        code = build_code(BaseGraphId.BG2, 3)
        _, cw = random_codeword(code, rng)
        for i in range(code.N_full):
            mutated = cw.bits.copy()
            mutated[i] ^= 1
            assert not parity_check(code, mutated), f"flip at {i} undetected"


def brute_force_check_node(raws, offset_raw=2):
    """Definition-level re-implementation used as the oracle."""
    raws = list(int(v) for v in raws)
    out = []
    for i in range(len(raws)):
        others = raws[:i] + raws[i + 1:]
        mag = max(0, min(abs(v) for v in others) - offset_raw)
        sign = 1
        for v in others:
            if v < 0:
                sign = -sign
        out.append(sign * mag)
    return np.array(out, dtype=np.int8)


class TestCheckNodeUpdate:
    def test_worked_example(self):
        # magnitudes 2.0, 0.75, 3.0 (raw 8, 3, 12), all positive
        out = check_node_update(np.array([8, 3, 12], np.int8))
        assert list(out) == [1, 6, 1]  # +0.25, +1.5, +0.25

    def test_zero_input_clamps_others(self):
        out = check_node_update(np.array([0, 20, -17], np.int8))
        assert out[1] == 0 and out[2] == 0

    def test_sign_products(self):
        out = check_node_update(np.array([8, -8, 8], np.int8))
        assert np.sign(out).tolist() == [-1, 1, -1]

    def test_against_brute_force_1000(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            deg = int(rng.integers(2, 20))
            raws = rng.integers(-31, 32, deg).astype(np.int8)
            assert np.array_equal(check_node_update(raws), brute_force_check_node(raws))


class TestDecoder:
    def test_noiseless_early_termination(self):
        rng = np.random.default_rng(8)
        code = build_code(BaseGraphId.BG2, 16)
        info, cw = random_codeword(code, rng)
        res = ldpc_decode(code, max_conf_llrs(cw.bits))
        assert res.parity_ok
        assert res.iterations_used <= 2
        assert res.termination_reason is TerminationReason.PARITY_SATISFIED
        assert np.array_equal(res.hard_bits, info.bits)

    def test_all_zero_llrs_degenerate(self):
        code = build_code(BaseGraphId.BG2, 4)
        res = ldpc_decode(code, np.zeros(code.N_full, np.int8))
        assert res.termination_reason in (
            TerminationReason.DECISIONS_STABLE, TerminationReason.MAX_ITERATIONS)
        assert not res.parity_ok

    def test_corrects_flipped_sign(self):
        rng = np.random.default_rng(9)
        code = build_code(BaseGraphId.BG2, 32)  # rate 10/52 < 1/2 over N_full
        info, cw = random_codeword(code, rng)
        llr = max_conf_llrs(cw.bits)
        llr[code.Zc * 2 + 5] *= -1
        res = ldpc_decode(code, llr)
        assert res.parity_ok
        assert np.array_equal(res.hard_bits, info.bits)

    def test_never_exceeds_max_iterations(self):
        rng = np.random.default_rng(10)
        code = build_code(BaseGraphId.BG2, 6)
        noise = rng.integers(-5, 6, code.N_full).astype(np.int8)
        res = ldpc_decode(code, noise)
        assert 1 <= res.iterations_used <= 8

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        code = build_code(BaseGraphId.BG2, 8)
        llr = rng.integers(-31, 32, code.N_full).astype(np.int8)
        a = ldpc_decode(code, llr)
        b = ldpc_decode(code, llr)
        assert np.array_equal(a.hard_bits, b.hard_bits)
        assert (a.iterations_used, a.parity_ok, a.termination_reason) == \
               (b.iterations_used, b.parity_ok, b.termination_reason)

    def test_encode_decode_identity_all_sets(self):
        rng = np.random.default_rng(12)
        trials = 0
        for bg in BaseGraphId:
            for zs in LIFTING_SETS:
                for Zc in (zs[0], zs[-1]):
                    code = build_code(bg, Zc)
                    for _ in range(4):
                        info, cw = random_codeword(code, rng)
                        res = ldpc_decode(code, max_conf_llrs(cw.bits))
                        assert res.parity_ok
                        assert np.array_equal(res.hard_bits, info.bits)
                        trials += 1
        assert trials >= 100
