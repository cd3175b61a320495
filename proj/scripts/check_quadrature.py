#!/usr/bin/env python3
"""Verify candidate triangle quadrature rules against exact monomial integrals."""

from math import factorial

# rules as (degree, [(l1, l2, l3, w), ...]) in barycentric coords,
# weights normalized to sum to 1 (reference area factor 1/2 applied separately)
rules = {}

rules[1] = [(1/3, 1/3, 1/3, 1.0)]

rules[2] = [(2/3, 1/6, 1/6, 1/3), (1/6, 2/3, 1/6, 1/3), (1/6, 1/6, 2/3, 1/3)]

rules[3] = [(1/3, 1/3, 1/3, -9/16),
            (3/5, 1/5, 1/5, 25/48), (1/5, 3/5, 1/5, 25/48), (1/5, 1/5, 3/5, 25/48)]

a4a, w4a = 0.445948490915965, 0.223381589678011
a4b, w4b = 0.091576213509771, 0.109951743655322
rules[4] = []
for a, w in ((a4a, w4a), (a4b, w4b)):
    rules[4] += [(1-2*a, a, a, w), (a, 1-2*a, a, w), (a, a, 1-2*a, w)]

a5a, w5a = 0.470142064105115, 0.132394152788506
a5b, w5b = 0.101286507323456, 0.125939180544827
rules[5] = [(1/3, 1/3, 1/3, 0.225)]
for a, w in ((a5a, w5a), (a5b, w5b)):
    rules[5] += [(1-2*a, a, a, w), (a, 1-2*a, a, w), (a, a, 1-2*a, w)]

a6a, w6a = 0.063089014491502, 0.050844906370207
a6b, w6b = 0.249286745170910, 0.116786275726379
a6c, b6c, w6c = 0.310352451033785, 0.053145049844816, 0.082851075618374
rules[6] = []
for a, w in ((a6a, w6a), (a6b, w6b)):
    rules[6] += [(1-2*a, a, a, w), (a, 1-2*a, a, w), (a, a, 1-2*a, w)]
c = 1 - a6c - b6c
for (l1, l2, l3) in [(a6c, b6c, c), (b6c, c, a6c), (c, a6c, b6c),
                     (b6c, a6c, c), (c, b6c, a6c), (a6c, c, b6c)]:
    rules[6].append((l1, l2, l3, w6c))


def exact(p, q):
    return factorial(p) * factorial(q) / factorial(p + q + 2)


for deg, pts in sorted(rules.items()):
    wsum = sum(w for *_, w in pts)
    worst = 0.0
    for p in range(deg + 1):
        for q in range(deg + 1 - p):
            approx = 0.5 * sum(w * (l2 ** p) * (l3 ** q) for l1, l2, l3, w in pts)
            err = abs(approx - exact(p, q))
            worst = max(worst, err)
    print(f"degree {deg}: {len(pts):2d} points, weight sum = {wsum:.15f}, "
          f"worst monomial error = {worst:.3e}")
