# Copyright 2026 The Hopper Lab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent numpy oracle for the policy weights format and forward pass.

Writes probe.hopw (random weights in the container format) and probe.json
(inputs and float64 reference outputs) into --out.
"""

import argparse
import json
import os
import struct
import zlib

import numpy as np

OBS = 17
HISTORY = 5
LATENT = 16


def elu(x):
    return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))


def make_layer(rng, tensors, name, n_in, n_out):
    bound = 1.0 / np.sqrt(n_in)
    tensors[name + ".weight"] = rng.uniform(-bound, bound, (n_out, n_in)).astype(np.float32)
    tensors[name + ".bias"] = rng.uniform(-0.1, 0.1, (n_out,)).astype(np.float32)


def make_chain(rng, tensors, net, n_in, sizes):
    for i, n_out in enumerate(sizes):
        make_layer(rng, tensors, f"{net}.{i}", n_in, n_out)
        n_in = n_out
    return n_in


def serialize(tensors, activations):
    data = b""
    entries = []
    for name in sorted(tensors):
        t = np.ascontiguousarray(tensors[name], dtype="<f4")
        entries.append({"name": name, "shape": list(t.shape), "dtype": "float32",
                        "offset": len(data), "nbytes": t.nbytes})
        data += t.tobytes()
    manifest = json.dumps({"format": "hopper-policy", "layout": "row-major",
                           "activations": activations,
                           "tensors": entries}).encode()
    crc = zlib.crc32(manifest + data) & 0xFFFFFFFF
    return b"HOPW" + struct.pack("<IIQ", 1, crc, len(manifest)) + manifest + data


def mlp(tensors, net, x, activate_last):
    i = 0
    while f"{net}.{i}.weight" in tensors:
        i += 1
    for k in range(i):
        w = tensors[f"{net}.{k}.weight"].astype(np.float64)
        b = tensors[f"{net}.{k}.bias"].astype(np.float64)
        x = w @ x + b
        if k + 1 < i or activate_last:
            x = elu(x)
    return x


def linear(tensors, name, x):
    return (tensors[name + ".weight"].astype(np.float64) @ x
            + tensors[name + ".bias"].astype(np.float64))


def forward(tensors, history, obs):
    h = mlp(tensors, "encoder.trunk", history, activate_last=True)
    mu = linear(tensors, "encoder.mu", h)
    log_sigma = linear(tensors, "encoder.log_sigma", h)
    velocity = linear(tensors, "encoder.velocity", h)
    contact = 1.0 / (1.0 + np.exp(-linear(tensors, "encoder.contact", h)[0]))
    action = mlp(tensors, "actor", np.concatenate([obs, mu, velocity]),
                 activate_last=False)
    return {"action": action.tolist(), "velocity": velocity.tolist(),
            "contact": float(contact), "mu": mu.tolist(),
            "log_sigma": log_sigma.tolist()}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--samples", type=int, default=100)
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    rng = np.random.default_rng(args.seed)
    tensors = {}
    feature = make_chain(rng, tensors, "encoder.trunk", HISTORY * OBS, [128, 64])
    make_layer(rng, tensors, "encoder.mu", feature, LATENT)
    make_layer(rng, tensors, "encoder.log_sigma", feature, LATENT)
    make_layer(rng, tensors, "encoder.velocity", feature, 3)
    make_layer(rng, tensors, "encoder.contact", feature, 1)
    make_chain(rng, tensors, "decoder", LATENT, [64, OBS])
    make_chain(rng, tensors, "actor", OBS + LATENT + 3, [256, 128, 64, 3])
    activations = {"encoder.trunk": "elu", "decoder": "elu", "actor": "elu"}

    with open(os.path.join(args.out, "probe.hopw"), "wb") as f:
        f.write(serialize(tensors, activations))

    samples = []
    for _ in range(args.samples):
        history = rng.normal(0.0, 1.0, HISTORY * OBS)
        obs = rng.normal(0.0, 1.0, OBS)
        sample = {"history": history.tolist(), "obs": obs.tolist()}
        sample.update(forward(tensors, history, obs))
        samples.append(sample)
    with open(os.path.join(args.out, "probe.json"), "w") as f:
        json.dump({"samples": samples}, f)


if __name__ == "__main__":
    main()
