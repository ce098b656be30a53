"""Acceptance gate: one test per core guarantee, each printing a
PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to see
them). Tolerances here are the product's contract — do not loosen.
"""

import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from clusterlens.cli import main as cli_main
from clusterlens.data import Dataset, FeatureColumn, load_csv
from clusterlens.errors import (
    ClusterLensError,
    DegenerateLabelsError,
    DegenerateSelectionError,
    SelectionOverlapError,
)
from clusterlens.explain import (
    ClusterSelection,
    compare_selections,
    explain_selection,
    labels_from_selection,
)
from clusterlens.kernels import warm_up
from clusterlens.model import (
    EbmModel,
    TermFunction,
    finalize_centering,
    predict_score,
    predict_scores,
)
from clusterlens.projection import pca_project
from clusterlens.service import create_app
from clusterlens.training import TrainingConfig, cyclic_boost, train_bagged
from conftest import csv_bytes


def _verdict(name: str, ok: bool):
    print(f"[ACCEPT] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, name


class TestAcceptance:
    def test_additivity_bitwise(self, blob_dataset, blob_report):
        """predict_score == intercept + sum of term contributions,
        bitwise, for 1000 random rows of a trained model."""
        model = blob_report.model
        X = blob_dataset.matrix()
        rng = np.random.default_rng(123)
        rows = rng.integers(0, X.shape[0], size=1000)
        ok = True
        for i in rows:
            row = X[i]
            total = model.intercept
            for t in model.terms:
                total += t.value_at(row[t.feature_index])
            ok = ok and (total == predict_score(model, row))
        _verdict("additivity-bitwise-1000-rows", ok)

    def test_centering_weighted_sum_and_idempotence(self, blob_dataset, blob_report):
        """Count-weighted sum of every centered term <= 1e-12 * n, and a
        second finalize_centering is a no-op."""
        model = blob_report.model
        binned = blob_dataset.binned(32)
        counts = [
            np.bincount(binned.bin_matrix()[j], minlength=t.n_bins).astype(np.float64)
            for j, t in enumerate(model.terms)
        ]
        n = binned.n_rows
        ok = all(
            abs(float(t.contributions @ counts[j])) <= 1e-12 * n
            for j, t in enumerate(model.terms)
        )
        again = finalize_centering(model, counts)
        ok = ok and again.intercept == model.intercept
        for t1, t2 in zip(model.terms, again.terms):
            ok = ok and bool(np.array_equal(t1.contributions, t2.contributions))
        _verdict("centering-weighted-sum-and-idempotence", ok)

    def test_one_sweep_oracle(self, four_row_dataset, four_row_labels):
        """4-row fixture, eta=0.1, one sweep, one bag: term equals the
        hand-computed [+0.05, -0.05, 0] within 1e-15 per bin."""
        cfg = TrainingConfig(
            learning_rate=0.1, sweeps=1, outer_bags=1, identity_bags=True, seed=0
        )
        model = cyclic_boost(four_row_dataset, four_row_labels, cfg)
        expected = np.array([0.05, -0.05, 0.0])
        got = model.terms[0].contributions
        ok = bool(np.all(np.abs(got - expected) <= 1e-15)) and abs(model.intercept) <= 1e-15
        _verdict("one-sweep-hand-oracle", ok)

    def test_label_flip_antisymmetry(self, blob_dataset):
        """Training on flipped labels negates every row's score within
        1e-12."""
        binned = blob_dataset.binned(32)
        y = np.zeros(binned.n_rows)
        y[:1000] = 1.0
        cfg = TrainingConfig(sweeps=60, outer_bags=2, seed=17)
        pos = train_bagged(binned, y, cfg)
        neg = train_bagged(binned, 1.0 - y, cfg)
        X = binned.matrix()
        diff = np.abs(predict_scores(neg, X) + predict_scores(pos, X))
        ok = float(diff.max()) <= 1e-12
        _verdict("label-flip-antisymmetry", ok)

    def test_separable_fixture_rank_share_auc_time(self, blob_dataset, blob_selection):
        """f3-blob (n=2000, d=10, 6-sigma): f3 ranked #1, share >= 0.6,
        AUC >= 0.99, and the default-config run finishes in < 5 s."""
        warm_up()  # JIT compile outside the timed window
        t0 = time.perf_counter()
        report = explain_selection(blob_dataset, blob_selection, TrainingConfig(seed=42))
        elapsed = time.perf_counter() - t0
        name, _, share = report.ranked[0]
        ok = (
            name == "f3"
            and share >= 0.6
            and report.meta["auc"] >= 0.99
            and elapsed < 5.0
        )
        print(
            f"[accept-detail] top={name} share={share:.4f} "
            f"auc={report.meta['auc']:.6f} wall={elapsed:.3f}s"
        )
        _verdict("separable-fixture-rank-share-auc-time", ok)

    def test_comparison_antisymmetry(self, blob_dataset):
        """compare(A,B) vs compare(B,A): identical ranking name arrays,
        shapes negated within 1e-12."""
        a = ClusterSelection(tuple(range(0, 500)))
        b = ClusterSelection(tuple(range(1000, 1500)))
        cfg = TrainingConfig(seed=9, sweeps=80)
        ab = compare_selections(blob_dataset, a, b, cfg)
        ba = compare_selections(blob_dataset, b, a, cfg)
        ok = [n for n, _, _ in ab.ranked] == [n for n, _, _ in ba.ranked]
        for name, shape in ab.shapes.items():
            delta = np.abs(
                np.array(shape["contributions"])
                + np.array(ba.shapes[name]["contributions"])
            )
            ok = ok and float(delta.max()) <= 1e-12
        _verdict("comparison-antisymmetry", ok)

    def test_cli_http_byte_identical(self, tmp_path, blob_csv, capsysbinary):
        """Identical inputs + seed through the CLI and the HTTP service
        produce byte-identical report JSON."""
        data_path = tmp_path / "blob.csv"
        data_path.write_bytes(blob_csv)
        sel_path = tmp_path / "sel.txt"
        sel_path.write_text("\n".join(str(i) for i in range(1000)))
        code = cli_main([
            "explain", "--data", str(data_path), "--select", str(sel_path),
            "--seed", "42",
        ])
        cli_bytes = capsysbinary.readouterr().out
        with TestClient(create_app(data_dir=tmp_path / "data")) as client:
            upload = client.post(
                "/datasets", files={"file": ("blob.csv", blob_csv, "text/csv")}
            )
            resp = client.post(
                "/explain",
                json={
                    "dataset_id": upload.json()["dataset_id"],
                    "selection": list(range(1000)),
                    "seed": 42,
                },
            )
        ok = code == 0 and resp.status_code == 200 and resp.content == cli_bytes
        _verdict("cli-http-byte-identical", ok)

    def test_pca_fallback(self):
        """Orthonormality within 1e-8; axis-aligned recovery up to the
        sign convention; isotropic PC1 variance ratio in [0.4, 0.6]."""
        # orthonormality: recover components from coords of unit vectors
        rng = np.random.default_rng(2)
        X = rng.normal(size=(400, 6)) @ rng.normal(size=(6, 6))
        ds = load_csv(csv_bytes(X))
        proj = pca_project(ds)
        Xc = X - X.mean(axis=0)
        # solve for the 6x2 projection matrix actually applied
        W, *_ = np.linalg.lstsq(Xc, proj.coords, rcond=None)
        gram = W.T @ W
        ok = bool(np.all(np.abs(gram - np.eye(2)) <= 1e-8))

        # axis-aligned: varying column + constant column
        v = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
        ds2 = load_csv(csv_bytes(np.column_stack([v, np.full(5, 7.0)])))
        p2 = pca_project(ds2)
        ok = ok and bool(np.all(np.abs(p2.coords[:, 0] - (v - v.mean())) <= 1e-12))
        ok = ok and bool(np.all(np.abs(p2.coords[:, 1]) <= 1e-12))

        # isotropic: no dominant direction
        iso = np.random.default_rng(11).normal(size=(5000, 2))
        p3 = pca_project(load_csv(csv_bytes(iso)))
        var = p3.coords.var(axis=0, ddof=1)
        ratio = float(var[0] / var.sum())
        ok = ok and 0.4 <= ratio <= 0.6
        print(f"[accept-detail] isotropic PC1 ratio = {ratio:.4f}")
        _verdict("pca-fallback", ok)

    def test_degenerate_input_suite(self, blob_dataset):
        """Empty/full/overlapping selections, single-class labels,
        all-missing feature, constant feature: typed errors or
        zero-importance results, never a crash."""
        ok = True
        cfg = TrainingConfig(seed=0, sweeps=10)

        # empty / full selections -> typed degenerate-selection errors
        try:
            labels_from_selection(10, ClusterSelection(()))
            ok = False
        except DegenerateSelectionError as exc:
            ok = ok and exc.kind == "empty"
        try:
            labels_from_selection(3, ClusterSelection((0, 1, 2)))
            ok = False
        except DegenerateSelectionError as exc:
            ok = ok and exc.kind == "full"

        # overlapping comparison -> typed overlap error naming the ids
        try:
            compare_selections(
                blob_dataset, ClusterSelection((1, 2)), ClusterSelection((2, 3)), cfg
            )
            ok = False
        except SelectionOverlapError as exc:
            ok = ok and exc.ids == [2]

        # single-class labels -> typed label error
        try:
            cyclic_boost(blob_dataset.binned(8), np.ones(blob_dataset.n_rows), cfg)
            ok = False
        except DegenerateLabelsError:
            pass

        # all-missing feature and constant feature -> zero importance,
        # no crash
        rng = np.random.default_rng(0)
        signal = rng.normal(size=60)
        signal[:30] += 4.0
        cols = (
            FeatureColumn("signal", signal),
            FeatureColumn("allmiss", np.full(60, np.nan)),
            FeatureColumn("const", np.full(60, 2.0)),
        )
        ds = Dataset(cols, "degenerate")
        try:
            report = explain_selection(
                ds, ClusterSelection(tuple(range(30))), TrainingConfig(seed=0, sweeps=30)
            )
        except ClusterLensError:
            ok = False
        else:
            imps = {n: imp for n, imp, _ in report.ranked}
            ok = ok and imps["allmiss"] == 0.0 and imps["const"] == 0.0
            ok = ok and report.ranked[0][0] == "signal"
            ok = ok and json.loads(json.dumps(report.to_json_dict())) is not None
        _verdict("degenerate-input-suite", ok)
