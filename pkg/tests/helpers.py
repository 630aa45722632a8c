"""Shared test utilities: finite-difference oracles and random fixtures."""

from __future__ import annotations

import numpy as np

from gimtp.nn.tensor import Tensor


def central_difference(fn, arrays, eps: float = 1e-5):
    """Central finite-difference gradients of a scalar-valued ``fn``.

    ``fn`` maps a list of float64 arrays to a python float; a full gradient
    array is returned per input.  Independent of the autodiff tape.
    """
    grads = []
    for k, arr in enumerate(arrays):
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = fn(arrays)
            flat[i] = orig - eps
            lo = fn(arrays)
            flat[i] = orig
            gflat[i] = (hi - lo) / (2.0 * eps)
        grads.append(g)
    return grads


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    num = np.abs(a - b)
    den = np.maximum(np.abs(a) + np.abs(b), 1e-8)
    return float((num / den).max())


def random_group_arrays(rng, t_len: int = 3, n_slots: int = 9, min_occupied: int = 1):
    """Random (pos, vel, mass, mask) arrays shaped like a group window."""
    pos = np.zeros((t_len, n_slots, 2))
    pos[:, :, 0] = rng.uniform(-90.0, 90.0, size=(t_len, n_slots))
    pos[:, :, 1] = rng.uniform(-7.0, 7.0, size=(t_len, n_slots))
    vel = np.zeros((t_len, n_slots, 2))
    vel[:, :, 0] = rng.uniform(0.0, 35.0, size=(t_len, n_slots))
    vel[:, :, 1] = rng.uniform(-2.0, 2.0, size=(t_len, n_slots))
    mass = rng.uniform(0.5, 3.0, size=(t_len, n_slots))
    mask = rng.random((t_len, n_slots)) < 0.6
    mask[:, 0] = True
    while mask.sum(axis=1).min() < min_occupied:
        mask |= rng.random((t_len, n_slots)) < 0.3
        mask[:, 0] = True
    pos[~mask] = 0.0
    vel[~mask] = 0.0
    return pos, vel, mass, mask


def check_gradients(build_loss, arrays, eps: float = 1e-5, tol: float = 1e-5):
    """Compare tape gradients of ``build_loss`` against central differences.

    ``build_loss`` takes a list of Tensors and returns a scalar Tensor.
    Returns the worst relative error observed.
    """
    tensors = [Tensor(a.copy(), requires_grad=True) for a in arrays]
    loss = build_loss(tensors)
    loss.backward()
    analytic = [t.grad.copy() for t in tensors]

    def numeric_fn(arrs):
        ts = [Tensor(a) for a in arrs]
        return build_loss(ts).item()

    numeric = central_difference(numeric_fn, [a.copy() for a in arrays], eps=eps)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        worst = max(worst, relative_error(a, n))
    assert worst < tol, f"gradient mismatch: worst relative error {worst:.3e}"
    return worst
