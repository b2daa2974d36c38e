# Retrieval walk-through: mixed distance, similarity, nearest analogies.

import numpy as np

from mteba import synthetic
from mteba.dataset import apply_normalizer, fit_normalizer
from mteba.neighbors import distance, distances, nearest_neighbors, similarity

d = synthetic.make_dataset(20, seed=3)
d = apply_normalizer(fit_normalizer(d), d)  # numeric columns now in [0, 1]

target, pool = d[0], d.subset(range(1, len(d)))
print("target", target.id, target.features)

# one pair by hand: squared numeric gaps plus 1 per categorical mismatch
q = pool[0]
print("d(target, %s) = %.4f  sim = %.4f" % (q.id, distance(target, q, d.schema), similarity(distance(target, q, d.schema))))

# whole pool at once; same numbers as the scalar loop
dist = distances(target, pool, d.schema)
print("closest five distances", np.sort(dist)[:5].round(4))

for nb in nearest_neighbors(target, pool, d.schema, 3):
    p = pool[nb.index]
    print(f"  {p.id:>3}  dist {nb.distance:.4f}  sim {nb.similarity:.4f}  effort {p.effort:.0f}")
