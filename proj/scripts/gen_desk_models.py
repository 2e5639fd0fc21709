#!/usr/bin/env python3
# Copyright 2026 The photosim Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the desk-scale models under models/.

mlp_desk is trained on synthetic Gaussian clusters and ships with a held-out
evaluation set (mlp_desk_eval.json). The CNNs get random weights; they exist
for performance runs.
"""

import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "models"
SEED = 20260115

FEATURES = 16
HIDDEN = 32
CLASSES = 4


def clusters(rng, centers, count, spread):
    labels = rng.integers(0, len(centers), size=count)
    x = centers[labels] + spread * rng.standard_normal((count, centers.shape[1]))
    return x.astype(np.float32), labels


def train_mlp(rng, x, y, epochs=400, lr=0.1):
    w1 = (rng.standard_normal((HIDDEN, FEATURES)) / np.sqrt(FEATURES)).astype(np.float64)
    b1 = np.zeros(HIDDEN)
    w2 = (rng.standard_normal((CLASSES, HIDDEN)) / np.sqrt(HIDDEN)).astype(np.float64)
    b2 = np.zeros(CLASSES)
    onehot = np.eye(CLASSES)[y]
    n = len(x)
    for _ in range(epochs):
        h = np.maximum(0.0, x @ w1.T + b1)
        z = h @ w2.T + b2
        z -= z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        dz = (p - onehot) / n
        dw2 = dz.T @ h
        db2 = dz.sum(axis=0)
        dh = (dz @ w2) * (h > 0)
        dw1 = dh.T @ x
        db1 = dh.sum(axis=0)
        w1 -= lr * dw1
        b1 -= lr * db1
        w2 -= lr * dw2
        b2 -= lr * db2
    return w1, b1, w2, b2


def write_f32(path, arrays):
    flat = np.concatenate([np.asarray(a, dtype="<f4").ravel() for a in arrays])
    path.write_bytes(flat.tobytes())


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n")


def mlp(rng):
    centers = 0.6 * rng.standard_normal((CLASSES, FEATURES))
    x_train, y_train = clusters(rng, centers, 2000, 0.45)
    x_eval, y_eval = clusters(rng, centers, 400, 0.45)
    w1, b1, w2, b2 = train_mlp(rng, x_train.astype(np.float64), y_train)

    write_f32(OUT / "mlp_desk.bin", [w1, b1, w2, b2])
    write_json(
        OUT / "mlp_desk.json",
        {
            "name": "mlp_desk",
            "input_shape": [FEATURES],
            "weights": "mlp_desk.bin",
            "layers": [
                {"type": "fc", "out_features": HIDDEN, "bias": True},
                {"type": "fc", "out_features": CLASSES, "bias": True},
            ],
        },
    )
    write_json(
        OUT / "mlp_desk_eval.json",
        {
            "features": FEATURES,
            "inputs": [[float(v) for v in row] for row in x_eval],
            "labels": [int(v) for v in y_eval],
        },
    )
    h = np.maximum(0.0, x_eval.astype(np.float32) @ w1.T.astype(np.float32) + b1.astype(np.float32))
    acc = float(((h @ w2.T.astype(np.float32) + b2.astype(np.float32)).argmax(axis=1) == y_eval).mean())
    print(f"mlp_desk float accuracy on eval set: {acc:.4f}")


def random_weights(rng, shapes):
    return [(0.2 * rng.standard_normal(s)).astype(np.float32) for s in shapes]


def cnn4(rng):
    layers = [
        {"type": "conv", "kernel": 3, "out_channels": 8, "stride": 1, "bias": True},
        {"type": "pool", "kernel": 2},
        {"type": "conv", "kernel": 2, "out_channels": 16, "stride": 1, "bias": True},
        {"type": "pool", "kernel": 2},
        {"type": "fc", "out_features": 64, "bias": True},
        {"type": "fc", "out_features": 10, "bias": True},
    ]
    shapes = [(8, 3, 3, 3), (8,), (16, 8, 2, 2), (16,), (64, 144), (64,), (10, 64), (10,)]
    write_f32(OUT / "cnn4_desk.bin", random_weights(rng, shapes))
    write_json(OUT / "cnn4_desk.json",
               {"name": "cnn4_desk", "input_shape": [3, 16, 16], "weights": "cnn4_desk.bin", "layers": layers})


def lenet(rng):
    layers = [
        {"type": "conv", "kernel": 5, "out_channels": 6, "stride": 1, "bias": True},
        {"type": "pool", "kernel": 2},
        {"type": "conv", "kernel": 5, "out_channels": 16, "stride": 1, "bias": True},
        {"type": "pool", "kernel": 2},
        {"type": "fc", "out_features": 84, "bias": True},
        {"type": "fc", "out_features": 10, "bias": True},
    ]
    shapes = [(6, 1, 5, 5), (6,), (16, 6, 5, 5), (16,), (84, 256), (84,), (10, 84), (10,)]
    write_f32(OUT / "lenet_desk.bin", random_weights(rng, shapes))
    write_json(OUT / "lenet_desk.json",
               {"name": "lenet_desk", "input_shape": [1, 28, 28], "weights": "lenet_desk.bin", "layers": layers})


def main():
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(SEED)
    mlp(rng)
    cnn4(rng)
    lenet(rng)


if __name__ == "__main__":
    main()
