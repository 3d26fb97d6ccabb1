"""
Checking backpropagation against finite differences
===================================================

The analytic gradient is compared with central differences on a small
sigmoid network. Agreement to about 1e-8 relative is what double
precision allows at this step size.
"""

import numpy as np

from exportcast import Network, backward, forward

rng = np.random.default_rng(7)
net = Network([rng.normal(size=(3, 5)), rng.normal(size=(5, 1))],
              [rng.normal(size=5), rng.normal(size=1)], "sigmoid")
x, target = rng.normal(size=3), 0.3


def loss(n):
    out, _ = forward(n, x)
    return 0.5 * (out - target) ** 2


_, cache = forward(net, x)
analytic = backward(net, cache, target).params()

h = 1e-6
numeric = []
for arr in net.params():
    g = np.zeros_like(arr)
    for idx in np.ndindex(arr.shape):
        keep = arr[idx]
        arr[idx] = keep + h
        up = loss(net)
        arr[idx] = keep - h
        down = loss(net)
        arr[idx] = keep
        g[idx] = (up - down) / (2 * h)
    numeric.append(g)

for i, (a, n) in enumerate(zip(analytic, numeric)):
    err = np.max(np.abs(a - n) / np.maximum(np.abs(n), 1e-4))
    print(f"parameter block {i} shape {a.shape}: max relative error {err:.2e}")
