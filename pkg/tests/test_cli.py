import json
import subprocess
import sys

import numpy as np
import pytest

from staircase import streamfile
from staircase.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def csv_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_count_exact(capsys):
    status, out, _ = run(capsys, "count", "--K", "6", "--L", "6", "--eps", "18", "--t", "2", "--exact")
    assert status == 0
    assert csv_rows(out) == [{"eps": "18", "n_exact": "297200"}]


def test_count_all_weights_and_kinds(capsys):
    _, out, _ = run(capsys, "count", "--K", "4", "--L", "4", "--t", "2")
    assert [r["n_exact"] for r in csv_rows(out)] == ["24", "96", "72", "16", "1"]
    _, out, _ = run(capsys, "count", "--eps", "18", "--tilde")
    assert csv_rows(out)[0]["n_tilde"] == "64000000"
    _, out, _ = run(capsys, "count", "--eps", "18", "--hat")
    assert csv_rows(out)[0]["n_hat"] == "64000000"


def test_count_gamma_needs_seed(capsys):
    status, out, err = run(capsys, "count", "--eps", "20", "--gamma", "100")
    assert status == 2 and "--seed" in err and out == ""
    status, out, _ = run(capsys, "count", "--eps", "20", "--gamma", "100", "--seed", "3")
    assert status == 0 and "# seed=3" in out


def test_sampler_defaults_are_per_command(capsys):
    base = ["--eps", "20", "--gamma", "10", "--seed", "1"]
    _, out, _ = run(capsys, "count", *base)
    assert "# sampler=uniform" in out
    _, out, _ = run(capsys, "fig4", "--gamma", "10", "--seed", "1")
    assert "# sampler=recipe" in out
    _, out, _ = run(capsys, "count", *base, "--sampler", "recipe")
    assert "# sampler=recipe" in out


def test_capacity(capsys):
    status, out, _ = run(capsys, "capacity", "--rate", "236/255")
    assert status == 0 and out.strip() == "0.009062"
    _, out, _ = run(capsys, "capacity", "--rate", "0.5", "--format", "json")
    doc = json.loads(out)
    assert doc["rows"][0]["p_star"] == pytest.approx(0.110028, abs=1e-6)


def test_fig4_is_deterministic(capsys, tmp_path):
    argv = ["fig4", "--t", "2", "--K", "6", "--L", "6", "--gamma", "1000", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert "# seed=7" in first
    rows = csv_rows(first)
    assert list(rows[0]) == ["eps", "n_hat", "n_tilde", "n_exact", "gamma_n", "binom_floor"]
    assert len(rows) == 19
    assert rows[0]["n_exact"] == "297200" and rows[-1]["n_exact"] == "1"
    assert {r["binom_floor"] for r in rows} == {"64000000"}


def test_fig4_without_gamma_is_exact_only(capsys):
    status, out, _ = run(capsys, "fig4", "--format", "json")
    doc = json.loads(out)
    assert status == 0 and "seed" not in doc
    assert doc["rows"][2]["n_tilde"] == 655_200_000
    assert doc["rows"][0]["gamma_n"] is None


def test_errors_exit_nonzero(capsys):
    status, _, err = run(capsys, "count", "--K", "2", "--L", "2", "--t", "2")
    assert status == 2 and err.startswith("staircase count:")
    with pytest.raises(SystemExit) as exc:
        main(["count", "--bogus"])
    assert exc.value.code == 2
    status, _, err = run(capsys, "floor", "--pmin", "0.01", "--pmax", "0.001")
    assert status == 2


def test_encode_channel_decode_round_trip(capsys, tmp_path):
    sent = tmp_path / "sent.strc"
    noisy = tmp_path / "noisy.strc"
    clean = tmp_path / "clean.strc"
    common = ["--q", "5", "--t", "2", "--shorten", "0"]
    status, out, _ = run(capsys, "encode", *common, "--blocks", "14", "--seed", "1", "--output", str(sent))
    assert status == 0 and "# seed=1" in out
    status, out, _ = run(capsys, "bsc", "--p", "0.004", "--seed", "2", "--input", str(sent), "--output", str(noisy))
    assert status == 0 and int(csv_rows(out)[0]["flipped"]) > 0
    status, out, _ = run(capsys, "decode", "--input", str(noisy), "--reference", str(sent),
                         "--improved", "--output", str(clean), "--format", "json")
    assert status == 0
    assert json.loads(out)["rows"][0]["bit_errors"] == 0
    assert np.array_equal(streamfile.read(clean).blocks, streamfile.read(sent).blocks)


def test_encode_payload_file(capsys, tmp_path):
    payload = tmp_path / "payload.bin"
    payload.write_bytes(bytes(range(200)))
    out_file = tmp_path / "s.strc"
    status, _, _ = run(capsys, "encode", "--q", "5", "--t", "2", "--shorten", "0",
                       "--input", str(payload), "--output", str(out_file))
    assert status == 0
    stream = streamfile.read(out_file)
    bits = np.unpackbits(np.frombuffer(bytes(range(200)), np.uint8), bitorder="little")
    assert np.array_equal(stream.payload()[: bits.size], bits)


def test_decode_checks_header_flags(capsys, tmp_path):
    path = tmp_path / "s.strc"
    run(capsys, "encode", "--q", "5", "--t", "2", "--shorten", "0", "--blocks", "8", "--seed", "1", "--output", str(path))
    status, _, err = run(capsys, "decode", "--input", str(path), "--q", "9")
    assert status == 2 and "conflicts" in err


def test_table1_printed_fractions(capsys):
    status, out, _ = run(capsys, "table1", "--printed", "--shapes", "3,4,12;6,6,18")
    assert status == 0
    rows = csv_rows(out)
    assert [(r["K"], r["L"], r["eps"]) for r in rows] == [("3", "4", "12"), ("6", "6", "18")]
    assert float(rows[0]["p_floor"]) == pytest.approx(0.49 * float(rows[0]["pc_new"]), rel=1e-3)


def test_table1_small_campaign(capsys):
    status, out, err = run(capsys, "table1", "--shapes", "3,3,9", "--trials", "3", "--seed", "5")
    assert status == 0 and "# seed=5" in out and "3/3" in err
    assert float(csv_rows(out)[0]["solved"]) == 1.0
    status, _, err = run(capsys, "table1", "--shapes", "3,3,9", "--trials", "3")
    assert status == 2


def test_floor_curve(capsys):
    _, out, _ = run(capsys, "floor", "--pmin", "5e-3", "--pmax", "5e-3", "--points", "1")
    row = csv_rows(out)[0]
    assert 1e-10 <= float(row["ber_regular"]) <= 4e-10
    assert 4.5e-15 <= float(row["ber_improved"]) <= 1.8e-14


def test_console_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "staircase.cli", "capacity", "--rate", "236/255"],
        capture_output=True, text=True, check=True,
    )
    assert result.stdout.strip() == "0.009062"
