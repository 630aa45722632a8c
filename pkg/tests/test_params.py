"""Parameter store, Adam update, and the checkpoint container."""

import json
import struct

import numpy as np
import pytest

from gimtp.errors import ContractError
from gimtp.nn.checkpoint import load_checkpoint, restore_into, save_checkpoint
from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor


def make_store():
    store = ParameterStore(seed=42)
    store.glorot("layer.w", (4, 3))
    store.zeros("layer.b", (3,))
    return store


class TestParameterStore:
    def test_duplicate_name_rejected(self):
        store = make_store()
        with pytest.raises(ContractError, match="layer.w"):
            store.glorot("layer.w", (2, 2))

    def test_glorot_bounds(self):
        store = ParameterStore(seed=0)
        w = store.glorot("w", (100, 50))
        limit = np.sqrt(6.0 / 150.0)
        assert np.abs(w.data).max() <= limit

    def test_seeded_init_reproducible(self):
        a = make_store()
        b = make_store()
        np.testing.assert_array_equal(a["layer.w"].data, b["layer.w"].data)


class TestAdam:
    def test_first_step_magnitude(self):
        # one step with g=1 moves the parameter by ~lr regardless of scale
        store = ParameterStore(seed=0)
        p = store.zeros("p", ())
        p.grad = np.asarray(1.0)
        store.adam_step(lr=0.01)
        expected = -0.01 * 1.0 / (1.0 + 1e-8)
        assert p.data == pytest.approx(expected, abs=1e-15)
        assert store.step == 1

    def test_zero_gradient_leaves_parameters(self):
        store = make_store()
        before = store["layer.w"].data.copy()
        for t in store.tensors():
            t.grad = np.zeros_like(t.data)
        store.adam_step(lr=0.1)
        np.testing.assert_array_equal(store["layer.w"].data, before)

    def test_parameters_update_independently(self):
        store = ParameterStore(seed=0)
        a = store.zeros("a", ())
        b = store.zeros("b", ())
        a.grad = np.asarray(1.0)
        b.grad = np.asarray(0.0)
        store.adam_step(lr=0.01)
        assert a.data != 0.0
        assert b.data == 0.0

    def test_missing_gradient_names_parameter(self):
        store = make_store()
        store["layer.w"].grad = np.zeros((4, 3))
        with pytest.raises(ContractError, match="layer.b"):
            store.adam_step(lr=0.01)

    def test_two_steps_match_hand_rollout(self):
        store = ParameterStore(seed=0)
        p = store.zeros("p", ())
        m = v = 0.0
        x = 0.0
        for t in (1, 2):
            g = float(t)  # gradient 1 then 2
            p.grad = np.asarray(g)
            store.adam_step(lr=0.05)
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            x -= 0.05 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
        assert p.data == pytest.approx(x, rel=1e-12)


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        store = make_store()
        for t in store.tensors():
            t.grad = np.ones_like(t.data)
        store.adam_step(lr=0.01)
        path = tmp_path / "model.ckpt"
        save_checkpoint(store, path, meta={"note": "round-trip"})

        fresh = make_store()
        ckpt = load_checkpoint(path)
        restore_into(fresh, ckpt)
        assert fresh.step == 1
        assert ckpt.meta == {"note": "round-trip"}
        # float32 serialization bounds the round-trip error
        np.testing.assert_allclose(
            fresh["layer.w"].data, store["layer.w"].data, rtol=1e-6, atol=1e-7
        )

    def test_version_leads_manifest(self, tmp_path):
        store = make_store()
        path = tmp_path / "m.ckpt"
        save_checkpoint(store, path)
        raw = path.read_bytes()
        (mlen,) = struct.unpack("<Q", raw[:8])
        manifest = raw[8 : 8 + mlen].decode()
        assert manifest.startswith('{"format_version":')
        parsed = json.loads(manifest)
        assert list(parsed)[0] == "format_version"

    def test_payload_is_float32_little_endian(self, tmp_path):
        store = ParameterStore(seed=0)
        p = store.zeros("p", (2,))
        p.data = np.array([1.5, -2.0])
        path = tmp_path / "m.ckpt"
        save_checkpoint(store, path)
        ckpt = load_checkpoint(path)
        np.testing.assert_array_equal(ckpt.arrays["param/p"], [1.5, -2.0])
        raw = path.read_bytes()
        (mlen,) = struct.unpack("<Q", raw[:8])
        offset = json.loads(raw[8 : 8 + mlen])["arrays"][0]["offset"]
        vals = np.frombuffer(raw, dtype="<f4", count=2, offset=8 + mlen + offset)
        np.testing.assert_array_equal(vals, np.array([1.5, -2.0], dtype="<f4"))

    def test_save_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        save_checkpoint(make_store(), a)
        save_checkpoint(make_store(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_resume_continues_step_counter(self, tmp_path):
        store = make_store()
        for t in store.tensors():
            t.grad = np.ones_like(t.data)
        store.adam_step(lr=0.01)
        store.adam_step(lr=0.01)
        path = tmp_path / "m.ckpt"
        save_checkpoint(store, path)
        fresh = make_store()
        restore_into(fresh, load_checkpoint(path))
        for t in fresh.tensors():
            t.grad = np.ones_like(t.data)
        fresh.adam_step(lr=0.01)
        assert fresh.step == 3

    def test_shape_mismatch_rejected(self, tmp_path):
        store = make_store()
        path = tmp_path / "m.ckpt"
        save_checkpoint(store, path)
        other = ParameterStore(seed=0)
        other.glorot("layer.w", (2, 2))
        other.zeros("layer.b", (3,))
        with pytest.raises(ContractError, match="layer.w"):
            restore_into(other, load_checkpoint(path))


class TestLayerGradients:
    def test_dense_and_gru_backward(self):
        from gimtp.nn.layers import Dense, GruCell, run_gru

        store = ParameterStore(seed=1)
        dense = Dense(store, "d", 3, 4)
        cell = GruCell(store, "gru", 4, 4)
        x = Tensor(np.random.default_rng(2).normal(size=(2, 5, 3)))
        h0 = Tensor(np.zeros((2, 4)))
        out = run_gru(cell, dense(x), h0)
        loss = (out * out).sum()
        loss.backward()
        for name, p in store.items():
            assert p.grad is not None, name
            assert np.isfinite(p.grad).all(), name
