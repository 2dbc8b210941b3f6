"""
Upper shells from a budget constraint
=====================================

With objectives and a constraint that all increase strictly in every
coordinate, flipping one unused item into an efficient knapsack pushes it
over capacity while improving every profit.  The results form an upper
shell, confirmed here against the exhaustive 2^15 enumeration.
"""

from paretoshells.monotone import construct_upper_shell_budget, probe_problem
from paretoshells.oracle import grid_enumerate
from paretoshells.problem import evaluate
from paretoshells.problems import knapsack_problem, load_bundled
from paretoshells.shells import check_upper_shell_oracle

p = load_bundled("knapsack_n15_s0")

# %%
# The monotonicity flags are declared in the problem and then probed.
for name, v in probe_problem(p).items():
    print(name, "declared", v.declared, "violations", v.violation_count)

# %%
oracle = grid_enumerate(p)
S_U = construct_upper_shell_budget(p, oracle.efficient_set)
report = check_upper_shell_oracle(S_U, oracle, p, tol=0.0)
print(len(oracle.front), "efficient packs,", len(S_U), "upper-shell packs")
print(report)

# %%
# The seeds must be efficient.  Items A and C are worth (1, 1), item B is
# worth (10, 10), each weighs 1 and the capacity is 1.  {A, C} lies above
# the feasible pack {A} and is over capacity, yet {B} dominates it.
small = knapsack_problem([[1, 1, 1]], [[1, 1, 10], [1, 1, 10]], [1])
small_oracle = grid_enumerate(small)
A_and_C = evaluate(small, [1, 1, 0])
print(check_upper_shell_oracle([A_and_C], small_oracle, small, tol=0.0))
