import io

import numpy as np
import pytest

from relaylab.experiments import (
    CSV_HEADER,
    ConfigError,
    SweepConfig,
    SweepKind,
    SweepRow,
    emit_plot_script,
    fig8_config,
    fig9_config,
    parse_sweep_config,
    read_csv,
    run_sweep,
    sweep_inter_relay_gain,
    sweep_relay_power,
    write_csv,
)
from relaylab.model import ChannelGains

ONES = ChannelGains(1, 1, 1, 1, 1)


def _row(scheme="dpc", x=0.0, rate=1.0):
    return SweepRow("s-000", x, ONES, (0.0, 0.0, 0.0), scheme, rate, (0.5, 0.5, 0.0, 0.0), {"t1": 0.5, "t2": 0.5})


@pytest.fixture(scope="module")
def small_power_sweep():
    cfg = fig8_config(5.0, axis_start=0.0, axis_stop=4.0, axis_step=2.0,
                      schemes=("dpc", "ddf", "bme-succ", "bme-back"), bounds=())
    return cfg, sweep_relay_power(cfg)


def test_row_count_and_order(small_power_sweep):
    cfg, rows = small_power_sweep
    assert len(rows) == 12
    assert [r.axis_value for r in rows] == [0.0] * 4 + [2.0] * 4 + [4.0] * 4
    assert [r.scheme for r in rows[:4]] == ["dpc", "ddf", "bme-succ", "bme-back"]
    assert rows[0].powers_db == (5.0, 0.0, 0.0)


def test_sweep_is_byte_reproducible(small_power_sweep):
    cfg, rows = small_power_sweep
    a, b = io.StringIO(), io.StringIO()
    write_csv(rows, a)
    write_csv(sweep_relay_power(cfg), b)
    assert a.getvalue() == b.getvalue()


def test_rates_below_bound_in_each_point():
    cfg = fig8_config(0.0, axis_start=-10.0, axis_stop=20.0, axis_step=15.0)
    rows = run_sweep(cfg)
    assert len(rows) == 3 * 4
    for x in (-10.0, 5.0, 20.0):
        pt = {r.scheme: r.rate_bpcu for r in rows if r.axis_value == x}
        for s in ("dpc", "ddf", "ssrd"):
            assert pt[s] <= pt["cutset-full"] + 5e-3
        assert abs(pt["ssrd"] - max(pt["dpc"], pt["ddf"])) <= 1e-2


def test_inter_relay_gain_sweep():
    cfg = fig9_config(axis_points=4, schemes=("dpc", "bme-succ", "bme-dpc"))
    rows = sweep_inter_relay_gain(cfg)
    assert len(rows) == 4 * 4
    np.testing.assert_allclose(sorted({r.axis_value for r in rows}), np.geomspace(0.1, 10, 4))
    assert len({r.rate_bpcu for r in rows if r.scheme == "dpc"}) == 1
    for x in {r.axis_value for r in rows}:
        pt = {r.scheme: r.rate_bpcu for r in rows if r.axis_value == x}
        assert pt["bme-dpc"] >= pt["bme-succ"] - 1e-3
        assert pt["bme-succ"] <= pt["cutset-successive"] + 5e-3


def test_wrong_sweep_kind():
    with pytest.raises(ConfigError):
        sweep_relay_power(fig9_config())
    with pytest.raises(ConfigError):
        sweep_inter_relay_gain(fig8_config(0.0))


@pytest.mark.parametrize("kw", [
    dict(axis_step=0.0), dict(axis_step=-1.0), dict(axis_stop=-20.0), dict(kind="bogus"),
    dict(schemes=(), bounds=()), dict(schemes=("nope",)), dict(bounds=("low-snr-linear",)),
    dict(axis_scale="log", axis_points=None), dict(axis_scale="cubic"),
])
def test_config_validation(kw):
    base = dict(kind=SweepKind.RELAY_POWER, gains=ONES, axis_start=-10.0, axis_stop=30.0, axis_step=2.0)
    base.update(kw)
    with pytest.raises(ConfigError):
        SweepConfig(**base)


def test_default_axes():
    np.testing.assert_allclose(fig8_config(10).axis(), np.arange(-10, 31, 2))
    ax = fig9_config().axis()
    assert len(ax) == 21 and ax[0] == pytest.approx(0.1) and ax[-1] == pytest.approx(10)


def test_csv_header_only():
    buf = io.StringIO()
    n = write_csv([], buf)
    assert buf.getvalue() == ",".join(CSV_HEADER) + "\n"
    assert n == len(buf.getvalue().encode())


def test_csv_line_count_and_format(tmp_path):
    path = tmp_path / "r.csv"
    n = write_csv([_row(), _row("ddf", 1.0, 0.5)], path)
    data = path.read_bytes()
    assert n == len(data) and b"\r" not in data
    lines = data.decode().splitlines()
    assert len(lines) == 3
    assert lines[0] == "scenario_id,axis_value,h01,h02,h12,h13,h23,p0_db,p1_db,p2_db,scheme,rate_bpcu,t1,t2,t3,t4,alloc_params"
    assert lines[1].endswith(",t1=0.500000000;t2=0.500000000")


def test_csv_round_trip():
    rng = np.random.default_rng(0)
    rows = [_row("dpc", float(i), float(r)) for i, r in enumerate(rng.uniform(0, 20, 50))]
    buf = io.StringIO()
    write_csv(rows, buf)
    back = read_csv(io.StringIO(buf.getvalue()))
    assert len(back) == 50
    for r, b in zip(rows, back):
        assert abs(b["rate_bpcu"] - r.rate_bpcu) <= 1e-9
        assert b["alloc_params"] == {"t1": 0.5, "t2": 0.5}


def test_plot_one_series():
    buf = io.StringIO()
    emit_plot_script([_row(x=0.0, rate=1.0), _row(x=2.0, rate=1.5)], buf)
    assert buf.getvalue() == "# series dpc\n0.000000000 1.000000000\n2.000000000 1.500000000\n"


def test_plot_series_per_scheme():
    rows = [_row(s, x) for x in (0.0, 1.0) for s in ("a", "b", "c", "d")]
    buf = io.StringIO()
    n = emit_plot_script(rows, buf)
    text = buf.getvalue()
    assert n == len(text.encode())
    assert text.count("# series ") == 4
    assert len(text.split("\n\n")) == 4


def test_plot_empty_rows():
    with pytest.raises(ValueError, match="no rows"):
        emit_plot_script([], io.StringIO())


def test_parse_sweep_config():
    cfg = parse_sweep_config("""
        kind = inter-relay-gain
        axis_start = 0.1
        axis_stop = 10
        axis_points = 5
        axis_scale = log
        p0_db = 10
        schemes = dpc, bme-back
        bounds = successive
        grid = 5
        seed = 3
    """)
    assert cfg.kind is SweepKind.INTER_RELAY_GAIN and len(cfg.axis()) == 5
    assert [s.value for s in cfg.schemes] == ["dpc", "bme-back"]
    assert cfg.powers_db == (10.0, 10.0, 10.0)
    assert cfg.optimizer.grid_points_per_dim == 5 and cfg.optimizer.seed == 3


@pytest.mark.parametrize("text, msg", [
    ("axis_start = 0\naxis_stop = 1\naxis_step = 1\n", "kind missing"),
    ("kind = relay-power\naxis_stop = 1\naxis_step = 1\n", "axis_start missing"),
    ("kind = relay-power\nfoo = 1\n", "unknown key"),
    ("kind = relay-power\nkind = relay-power\n", "duplicate"),
    ("kind = relay-power\naxis_start = x\n", "not a number"),
    ("kind = relay-power\njunk\n", "expected"),
])
def test_parse_sweep_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_sweep_config(text)
