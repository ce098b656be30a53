"""CLI: argument handling, exit codes, byte-identical output with HTTP."""

import json
import socket
import subprocess
import sys

import numpy as np
import pytest
from fastapi.testclient import TestClient

from clusterlens.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, main
from clusterlens.service import create_app
from conftest import csv_bytes


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(120, 4))
    X[:40, 2] += 5.0
    path = tmp_path_factory.mktemp("cli") / "points.csv"
    path.write_bytes(csv_bytes(X, names=["a", "b", "c", "d"]))
    return path


@pytest.fixture(scope="module")
def select_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "sel.txt"
    path.write_text("\n".join(str(i) for i in range(40)) + "\n")
    return path


class TestExplainCommand:
    def test_explain_to_stdout(self, data_csv, select_file, capsysbinary):
        code = main([
            "explain", "--data", str(data_csv), "--select", str(select_file),
            "--seed", "5",
        ])
        assert code == EXIT_OK
        out = capsysbinary.readouterr().out
        assert not out.endswith(b"\n")  # canonical bytes, nothing appended
        doc = json.loads(out)
        assert doc["mode"] == "one-vs-rest"
        assert doc["ranked"][0]["name"] == "c"
        assert doc["meta"]["seed"] == 5

    def test_select_ids_inline(self, data_csv, capsysbinary):
        ids = ",".join(str(i) for i in range(40))
        code = main([
            "explain", "--data", str(data_csv), "--select-ids", ids, "--seed", "5",
        ])
        assert code == EXIT_OK
        doc = json.loads(capsysbinary.readouterr().out)
        assert doc["meta"]["n_pos"] == 40

    def test_matches_http_bytes(self, data_csv, select_file, capsysbinary):
        """Same dataset, selection, and seed through the CLI and the HTTP
        service must produce byte-identical reports."""
        code = main([
            "explain", "--data", str(data_csv), "--select", str(select_file),
            "--seed", "42",
        ])
        assert code == EXIT_OK
        cli_bytes = capsysbinary.readouterr().out

        with TestClient(create_app(data_dir=data_csv.parent / "srvdata")) as client:
            upload = client.post(
                "/datasets",
                files={"file": (data_csv.name, data_csv.read_bytes(), "text/csv")},
            )
            resp = client.post(
                "/explain",
                json={
                    "dataset_id": upload.json()["dataset_id"],
                    "selection": list(range(40)),
                    "seed": 42,
                },
            )
        assert resp.content == cli_bytes

    def test_out_file(self, data_csv, select_file, tmp_path, capsysbinary):
        out = tmp_path / "report.json"
        code = main([
            "explain", "--data", str(data_csv), "--select", str(select_file),
            "--seed", "5", "--out", str(out),
        ])
        assert code == EXIT_OK
        assert capsysbinary.readouterr().out == b""  # stdout stays clean
        doc = json.loads(out.read_bytes())
        assert doc["ranked"][0]["name"] == "c"

    def test_config_file_with_seed_override(self, data_csv, select_file, tmp_path, capsysbinary):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sweeps": 7, "seed": 1}))
        code = main([
            "explain", "--data", str(data_csv), "--select", str(select_file),
            "--config", str(cfg), "--seed", "9",
        ])
        assert code == EXIT_OK
        doc = json.loads(capsysbinary.readouterr().out)
        assert doc["meta"]["config"]["sweeps"] == 7
        assert doc["meta"]["seed"] == 9  # flag wins over file


class TestExplainErrors:
    def test_empty_selection_file_exit_3(self, data_csv, tmp_path, capsys):
        empty = tmp_path / "empty.txt"
        empty.write_text("\n\n")
        code = main(["explain", "--data", str(data_csv), "--select", str(empty)])
        assert code == EXIT_DEGENERATE
        assert "error:" in capsys.readouterr().err

    def test_full_selection_exit_3(self, data_csv, capsys):
        ids = ",".join(str(i) for i in range(120))
        code = main(["explain", "--data", str(data_csv), "--select-ids", ids])
        assert code == EXIT_DEGENERATE

    def test_missing_data_file_exit_2(self, tmp_path, capsys):
        code = main([
            "explain", "--data", str(tmp_path / "nope.csv"), "--select-ids", "1,2",
        ])
        assert code == EXIT_INPUT
        assert "no such file" in capsys.readouterr().err

    def test_bad_id_line_exit_2(self, data_csv, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("1\n2\nseven\n")
        code = main(["explain", "--data", str(data_csv), "--select", str(bad)])
        assert code == EXIT_INPUT
        err = capsys.readouterr().err
        assert "bad.txt:3" in err and "seven" in err

    def test_select_and_ids_conflict_exit_2(self, data_csv, select_file, capsys):
        code = main([
            "explain", "--data", str(data_csv), "--select", str(select_file),
            "--select-ids", "1,2",
        ])
        assert code == EXIT_INPUT

    def test_no_selection_exit_2(self, data_csv, capsys):
        code = main(["explain", "--data", str(data_csv)])
        assert code == EXIT_INPUT

    def test_bad_config_exit_2(self, data_csv, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"sweeps": "many"}')
        code = main([
            "explain", "--data", str(data_csv), "--select-ids", "1,2",
            "--config", str(cfg),
        ])
        assert code == EXIT_INPUT

    def test_unparseable_csv_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n3,oops\n")
        code = main(["explain", "--data", str(bad), "--select-ids", "0"])
        assert code == EXIT_INPUT


class TestCompareCommand:
    def test_compare_and_swap_symmetry(self, data_csv, capsysbinary):
        a = ",".join(str(i) for i in range(40))
        b = ",".join(str(i) for i in range(40, 80))
        base = ["compare", "--data", str(data_csv), "--seed", "3"]
        assert main(base + ["--select-ids-a", a, "--select-ids-b", b]) == EXIT_OK
        ab = json.loads(capsysbinary.readouterr().out)
        assert main(base + ["--select-ids-a", b, "--select-ids-b", a]) == EXIT_OK
        ba = json.loads(capsysbinary.readouterr().out)
        assert ab["mode"] == "comparison"
        assert [e["name"] for e in ab["ranked"]] == [e["name"] for e in ba["ranked"]]
        for name, shape in ab["shapes"].items():
            np.testing.assert_allclose(
                np.array(shape["contributions"]),
                -np.array(ba["shapes"][name]["contributions"]),
                atol=1e-12,
            )

    def test_overlap_exit_3(self, data_csv, capsys):
        code = main([
            "compare", "--data", str(data_csv),
            "--select-ids-a", "1,2,3", "--select-ids-b", "3,4,5",
        ])
        assert code == EXIT_DEGENERATE

    def test_missing_side_exit_2(self, data_csv, capsys):
        code = main([
            "compare", "--data", str(data_csv), "--select-ids-a", "1,2",
        ])
        assert code == EXIT_INPUT


class TestServeCommand:
    def test_bad_listen_exit_2(self, capsys):
        assert main(["serve", "--listen", "nohost"]) == EXIT_INPUT

    def test_occupied_port_exit_2(self, tmp_path):
        """Port already bound: serve must fail fast with exit 2 (run as a
        subprocess so a successful bind can't hijack the test runner)."""
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "clusterlens.cli", "serve",
                 "--listen", f"127.0.0.1:{port}",
                 "--data-dir", str(tmp_path / "data")],
                capture_output=True, timeout=30, text=True,
            )
        finally:
            blocker.close()
        assert proc.returncode == EXIT_INPUT
        assert "cannot listen" in proc.stderr

    def test_serve_starts_and_answers(self, tmp_path):
        """End-to-end: spawn the real server, hit it over TCP, shut down."""
        import time
        import urllib.request

        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()

        proc = subprocess.Popen(
            [sys.executable, "-m", "clusterlens.cli", "serve",
             "--listen", f"127.0.0.1:{port}",
             "--data-dir", str(tmp_path / "data")],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        try:
            deadline = time.time() + 30
            last_err = None
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/reports/none", timeout=2
                    ) as resp:  # pragma: no cover - 404 raises
                        pass
                    break
                except urllib.error.HTTPError as exc:
                    assert exc.code == 404
                    body = json.loads(exc.read())
                    assert body["error"]["code"] == "not_found"
                    break
                except OSError as exc:
                    last_err = exc
                    time.sleep(0.2)
            else:
                pytest.fail(f"server never came up: {last_err}")
            assert (tmp_path / "data").is_dir()  # --data-dir honored
        finally:
            proc.terminate()
            proc.wait(timeout=10)
