"""The generalized tangent bundle: pairing bracket, locality operator,
and admissibility as exact metric compatibility.
"""

import random

from algebroids import (
    Connection,
    Section,
    bracket,
    check_admissible,
    classify,
    make_example,
    non_metricity,
    parse_scalar,
    scalar_to_text,
    solve_koszul,
    solve_torsion_free,
)
from algebroids.fixtures import random_scalar

bundle = make_example("courant_standard", n=2)
A = bundle.algebroid
eta = bundle.metric
names = A.coords
s = lambda text: parse_scalar(text, names)

print("rank:", A.rank, " structural flags:", classify(A))

# frame order: chart vector fields first, then the coframe slots
u = Section((A.zero(), A.zero(), s("x2"), A.zero()))  # x2 dx1
v = Section.frame(A, 0)  # d1
w = bracket(A, u, v)
print("[x2 dx1, d1] =", [scalar_to_text(c, names) for c in w.comp], "(the dx2 slot)")

print("\nadmissibility <-> vanishing non-metricity on 6 random connections:")
rng = random.Random(0)
for k in range(6):
    coeff = {
        (rng.randrange(4), rng.randrange(4), rng.randrange(4)): random_scalar(rng, 2, 2)
        for _ in range(3)
    }
    conn = Connection.of(4, coeff)
    admissible = check_admissible(A, conn).passed
    compatible = not non_metricity(A, conn, eta)
    print(f"  sample {k}: admissible={admissible} metric-compatible={compatible}")
    assert admissible == compatible

space = solve_koszul(A, eta)
print("\ncompatibility system:", space.status,
      "(the zero connection is the solution here)")
tf = solve_torsion_free(A)
print("torsion-free family:", tf.status, "with", tf.dim, "free parameters")
