import math

import pytest

from relaysim.errors import ConfigurationError, UsageError
from relaysim.experiment import (
    BerRecord,
    ExperimentConfig,
    emit_csv,
    emit_plot_data,
    load_config,
    read_csv,
    run_campaign,
    run_cell,
    run_pep_campaign,
    wilson_interval,
)

SMALL = dict(N=3, M=2, J=4, packets=60, symbols_per_packet=20, snr_db=[0.0, 6.0])


def small(**kw):
    return ExperimentConfig.from_mapping({**SMALL, **kw})


@pytest.mark.parametrize("bad", [dict(J=3), dict(snr_db=[]), dict(packets=0),
                                 dict(variants=["max-snr"]), dict(csi="partial"),
                                 dict(constellation="16qam"), dict(csi="imperfect", alpha=2.0)])
def test_config_validation(bad):
    with pytest.raises(ConfigurationError):
        small(**bad)


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_mapping({"N": 3, "relays": 3})


def test_load_config(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("N: 3\nM: 2\nJ: 4\nconstellation: qpsk\nsnr_db: [0, 4]\nvariants: [mimo-direct]\n")
    cfg = load_config(p)
    assert cfg.constellation == "qpsk" and cfg.snr_db == (0.0, 4.0)
    assert cfg.variants == ("mimo-direct",)
    p.write_text("N: 3\nnested: {a: 1}\n")
    with pytest.raises(ConfigurationError):
        load_config(p)


@pytest.mark.parametrize("variant", ["mmd-switched", "mmd-maxlink", "qn-maxlink", "mimo-direct"])
def test_high_snr_zero_ber(variant):
    rec = run_cell(small(), variant, 60.0)
    assert rec.errors == 0 and rec.bits > 0


def test_direct_variant_counts():
    rec = run_cell(small(), "mimo-direct", 3.0)
    assert rec.n_rx == rec.n_tx == 0
    assert rec.n_direct == rec.slots == 30
    assert rec.bits == 60 * 20


def test_maxlink_balance_and_budget():
    cfg = small(packets=400)
    for variant in ("mmd-maxlink", "qn-maxlink", "mmd-switched"):
        rec = run_cell(cfg, variant, 4.0)
        assert abs(rec.n_rx - rec.n_tx) <= cfg.N * math.ceil(cfg.J / cfg.M)
        assert (rec.n_rx + rec.n_direct) * cfg.M == cfg.packets
        assert rec.slots == rec.n_direct + rec.n_rx + rec.n_tx
    assert run_cell(cfg, "mmd-maxlink", 4.0).n_direct == 0


def test_variants_share_channels_but_not_results():
    cfg = small()
    a = run_cell(cfg, "mmd-maxlink", 2.0)
    b = run_cell(cfg, "mmd-maxlink", 2.0)
    assert a == b
    assert run_cell(cfg, "qn-maxlink", 2.0) != a


def test_worker_count_does_not_change_output(tmp_path):
    cfg = small(variants=["mmd-switched", "qn-maxlink"])
    one = emit_csv(run_campaign(cfg, workers=1), tmp_path / "one.csv")
    two = emit_csv(run_campaign(cfg, workers=2), tmp_path / "two.csv")
    assert one.read_bytes() == two.read_bytes()


def test_csv_round_trip(tmp_path):
    recs = [BerRecord("mmd-switched", 4.0, 2000, 13, 1500, 300, 600, 600),
            BerRecord("mimo-direct", 12.5, 4000, 0, 20, 20, 0, 0)]
    path = emit_csv(recs[:1], tmp_path / "a.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == "variant,snr_db,bits,errors,ber,ci_lo,ci_hi,slots,n_direct,n_rx,n_tx"
    assert lines[1].startswith("mmd-switched,4,2000,13,0.0065,")
    emit_csv(recs, tmp_path / "b.csv")
    assert read_csv(tmp_path / "b.csv") == recs


def test_emit_csv_empty():
    with pytest.raises(UsageError):
        emit_csv([], "unused.csv")


def test_wilson_contains_ber():
    for e, n in [(0, 100), (1, 100), (50, 100), (100, 100), (13, 200000)]:
        lo, hi = wilson_interval(e, n)
        assert lo <= e / n <= hi
    assert wilson_interval(0, 100)[0] == 0.0


def test_plot_data(tmp_path):
    recs = [BerRecord("mimo-direct", s, 100, e, 1, 1, 0, 0) for s, e in [(2.0, 5), (0.0, 9)]]
    paths = emit_plot_data(recs, tmp_path / "plots")
    assert [p.name for p in paths] == ["ber_mimo-direct.dat"]
    rows = paths[0].read_text().splitlines()
    assert rows[1:] == ["0 0.09", "2 0.05"]


def test_pep_campaign_small():
    recs = run_pep_campaign([2, 3], [0.0, 10.0], slots=200)
    assert len(recs) == 2 * 2 * 2
    for r in recs:
        assert 0.0 <= r.mean_pep <= 1.0 and r.ci_lo <= r.mean_pep <= r.ci_hi
    by = {(r.criterion, r.N, r.snr_db): r.mean_pep for r in recs}
    for n in (2, 3):
        assert by[("mmd", n, 10.0)] < by[("mmd", n, 0.0)]
        assert by[("mmd", n, 10.0)] <= by[("qn", n, 10.0)]
