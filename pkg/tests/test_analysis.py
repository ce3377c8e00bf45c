import mpmath
import numpy as np
import pytest

from relaysim.analysis import (
    ComplexityModel,
    PepInputs,
    mmd_metric_count,
    mmd_op_count,
    mmd_vs_qn_pep,
    pep_worst_case,
    q_function,
    qn_op_count,
)
from relaysim.channel import ChannelMatrix, CSIModel, LinkEstimate, SlotChannels, draw_slot_channels
from relaysim.constellation import build_constellation, difference_set, enumerate_candidates
from relaysim.errors import UsageError
from relaysim.selection import EvaluationCounter, d_min

BPSK2 = enumerate_candidates(build_constellation("bpsk"), 2)


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert q_function(1.0) == pytest.approx(0.15865525393145705, rel=1e-14)
    assert q_function(-8.0) == pytest.approx(1.0, abs=1e-15)


def test_q_function_against_mpmath():
    mpmath.mp.dps = 40
    for x in np.linspace(0.0, 8.0, 161):
        ref = float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)
        assert abs(q_function(x) - ref) <= 1e-12 * ref
    xs = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(q_function(-xs), 1 - q_function(xs), atol=1e-15)


def test_pep_zero_distance():
    assert pep_worst_case(PepInputs(0.0, 1.0, 1.0, 2, "direct")) == 0.5
    assert pep_worst_case(PepInputs(0.0, 1.0, 1.0, 2, "cooperative")) == 0.75


def test_pep_input_validation():
    with pytest.raises(UsageError):
        PepInputs(-1.0, 1.0, 1.0, 2, "direct")
    with pytest.raises(UsageError):
        PepInputs(1.0, 1.0, 1.0, 2, "relay")


def test_pep_monotone_grid():
    snrs = np.linspace(0.1, 100, 40)
    dps = np.linspace(0.0, 10, 40)
    for mode in ("direct", "cooperative"):
        over_snr = [pep_worst_case(PepInputs(2.0, e, 1.0, 2, mode)) for e in snrs]
        over_d = [pep_worst_case(PepInputs(d, 3.0, 1.0, 2, mode)) for d in dps]
        assert np.all(np.diff(over_snr) < 0)
        assert np.all(np.diff(over_d) < 0)
    assert pep_worst_case(PepInputs(2.0, 1e4, 1.0, 2, "direct")) < 1e-100


def test_cooperative_pep_at_least_direct():
    for d in np.linspace(0, 20, 50):
        for e in (0.5, 1.0, 4.0, 16.0):
            direct = pep_worst_case(PepInputs(d, e, 1.0, 2, "direct"))
            coop = pep_worst_case(PepInputs(d, e, 1.0, 2, "cooperative"))
            assert coop >= direct
            assert coop == pytest.approx(2 * direct - direct ** 2, rel=1e-12)


def test_mmd_vs_qn_single_relay_equal():
    rng = np.random.default_rng(0)
    for _ in range(50):
        ch = draw_slot_channels(rng, 1, 2, CSIModel.perfect(), 2.0)
        a, b = mmd_vs_qn_pep(ch, BPSK2, 2.0, 1.0, occupancy=[0], capacity=4)
        assert a == b


def test_mmd_vs_qn_identical_links_equal():
    H = np.array([[0.3 + 0.1j, -0.8], [0.5j, 1.1]])
    m = ChannelMatrix(H, "SR")
    link = LinkEstimate(m, m, 0.0)
    ch = SlotChannels((link,) * 3, (link,) * 3, link)
    a, b = mmd_vs_qn_pep(ch, BPSK2, 2.0, 1.0)
    assert a == b


def test_mmd_vs_qn_dominance():
    rng = np.random.default_rng(1)
    for _ in range(10_000 // 10):
        ch = draw_slot_channels(rng, 3, 2, CSIModel.perfect(), 4.0)
        a, b = mmd_vs_qn_pep(ch, BPSK2, 4.0, 1.0)
        assert a <= b


def test_complexity_values():
    assert mmd_metric_count(2, 1) == 4
    assert mmd_metric_count(1, 1) == 1
    assert mmd_op_count(ComplexityModel(3, 2, 1)) == (4, 36, 48)
    assert qn_op_count(3, 2) == (18, 24)
    assert qn_op_count(5, 1)[0] == 0
    assert qn_op_count(1, 3) == (16, 18)
    with pytest.raises(UsageError):
        ComplexityModel(0, 2, 1)


@pytest.mark.parametrize("kind,M", [("bpsk", 1), ("bpsk", 2), ("bpsk", 3), ("qpsk", 1), ("qpsk", 2)])
def test_instrumented_count_matches_formula(kind, M):
    c = build_constellation(kind)
    cs = enumerate_candidates(c, M)
    ctr = EvaluationCounter()
    d_min(np.eye(M), cs, 1.0, ctr)
    assert ctr.evaluations == mmd_metric_count(M, difference_set(c).W)
