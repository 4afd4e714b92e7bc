"""Cost of robustness on one P1 instance.

Solves the linearised robust model for Gamma = 0..4 and checks each optimum
against the exact worst-case coverage.
"""
from robust_cover import RobustConfig
from robust_cover.generator import generate, table1_config
from robust_cover.milp import build_rutlcscp_la_rc
from robust_cover.oracle import verify
from robust_cover.solver import solve

inst = generate(table1_config("P1", seed=42), name="P1.1")
print(f"{inst.name}: m={inst.m}, n1={inst.n1}, n2={inst.n2}")
for gamma in range(5):
    config = RobustConfig(alpha=0.85, gamma_budget=gamma)
    sol = solve(build_rutlcscp_la_rc(inst, config))
    rep = verify(inst, sol, config)
    worst = rep.coverage.min() if sol.status == "optimal" else float("nan")
    print(f"Gamma={gamma}: cost {sol.objective:8.2f}  {sol.wall_time_s:5.2f} s  {sol.nodes:3d} nodes  "
          f"lowest coverage {worst:.4f}  -> {rep.classification}")
