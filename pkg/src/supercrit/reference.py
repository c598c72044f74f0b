"""Published reference values for the library cases.

All at r_max = 20, dr = 4e-4, dt = 1.25e-4, with p = 6 in d = 3 and p = 2 in
d = 5. Drift is max over t in [0, 15] of |E(t) - E(0)| / E(0).
"""

PAPER_RESOLUTION = {"r_max": 20.0, "dr": 4e-4, "dt": 1.25e-4, "t_final": 15.0}
DESK_RESOLUTION = {"r_max": 20.0, "dr": 2e-3, "dt": 5e-4, "t_final": 15.0}
DEFAULT_POWER = {3: 6.0, 5: 2.0}

# (case, d) -> (E(0), relative drift)
ENERGY_TABLE = {
    (1, 3): (164.184, 1.6468e-5),
    (2, 3): (1980.14, 2.0506e-5),
    (3, 3): (1996.30, 1.9631e-5),
    (4, 3): (424.502, 3.0777e-5),
    (5, 3): (436.317, 2.7890e-5),
    (1, 5): (6.02927, 2.3386e-7),
    (2, 5): (86.1537, 1.7213e-7),
    (3, 5): (128.380, 1.7939e-7),
    (4, 5): (11.8951, 1.9420e-7),
    (5, 5): (22.3556, 2.9567e-7),
}

# Case 1, d = 3: t -> (u(t, 0), u(t, 19), max u), printed to six decimals;
# identical for r_max in {20, 30, 50}.
SOLUTION_TABLE = {
    5.0: (0.004171, 0.0, 0.309926),
    10.0: (0.000088, 0.0, 0.158648),
    15.0: (0.000009, 0.0, 0.106591),
}

# l2 error at t = 2 for dr = 0.0098 (20/2048), dt = dr/4
CONVERGENCE_POINT = {"dr": 20 / 2048, 3: 2.54e-4, 5: 9.38e-7}
