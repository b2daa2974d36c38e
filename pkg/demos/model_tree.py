# Fit a model tree on two line segments, then on noisy data, and print the rules.

import numpy as np

from mteba.modeltree import ModelTree, TrainingMatrix, TreeParams

x = np.linspace(0, 1, 100)
y = np.where(x <= 0.5, 2 * x, -x + 3)
tree = ModelTree.fit(TrainingMatrix(x[:, None], y, ("x",)))
print(tree.dump())

# raw leaf output vs the smoothed blend with ancestor models
raw = ModelTree.fit(TrainingMatrix(x[:, None], y, ("x",)), TreeParams(smoothing_k=0.0))
for v in (0.25, 0.49, 0.51, 0.75):
    print(f"x={v:.2f}  raw {raw.predict([v]):.4f}  smoothed {tree.predict([v]):.4f}")

rng = np.random.default_rng(0)
X = rng.random((200, 3))
y = np.where(X[:, 0] < 0.3, 5 * X[:, 1], 10 - 4 * X[:, 2]) + rng.normal(0, 0.1, 200)
# the c side keeps a few extra splits: small leaves fit the noise, and their
# adjusted errors land just under the parent model's
noisy = ModelTree.fit(TrainingMatrix(X, y, ("a", "b", "c")))
print(noisy.dump())
print("leaves:", noisy.n_leaves)
