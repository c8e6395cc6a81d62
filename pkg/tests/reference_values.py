"""Gamma-fit reference values for the active link, keyed by (P_max_dBm, N).

Columns follow P_T_GRID_DBM. Each entry is (k values, nu values).
"""

P_T_GRID_DBM = (-10, -5, 0, 5, 10, 15, 20, 25, 30)

GAMMA_TABLE = {
    (10, 64): (
        (44.8922, 44.7180, 44.7905, 44.7109, 44.8358, 44.8963, 48.0934, 58.6428, 58.7049),
        (0.000405, 0.001287, 0.004063, 0.012868, 0.040595, 0.128166, 0.375257, 0.329909, 0.329483),
    ),
    (10, 256): (
        (178.8281, 178.8481, 179.1008, 178.2996, 233.7027, 234.8395, 234.5761, 233.9432, 234.3112),
        (0.006486, 0.020508, 0.064762, 0.205720, 0.330019, 0.328426, 0.328834, 0.329725, 0.329212),
    ),
    (20, 64): (
        (44.8284, 44.7199, 44.7593, 44.84389, 44.8633, 44.7232, 44.7599, 44.7586, 47.9274),
        (0.000406, 0.001286, 0.004066, 0.012835, 0.040551, 0.128680, 0.406483, 1.285651, 3.765564),
    ),
    (20, 256): (
        (178.2811, 178.9068, 178.4629, 178.8242, 178.8931, 178.6688, 234.2556, 234.8709, 233.5700),
        (0.006505, 0.020503, 0.064994, 0.205099, 0.648377, 2.052960, 3.292076, 3.283723, 3.302386),
    ),
}


def cell(P_max_dBm, N, P_t_dBm):
    ks, nus = GAMMA_TABLE[(P_max_dBm, N)]
    i = P_T_GRID_DBM.index(P_t_dBm)
    return ks[i], nus[i]


def all_cells():
    for (P_max, N), (ks, nus) in GAMMA_TABLE.items():
        for P_t, k, nu in zip(P_T_GRID_DBM, ks, nus):
            yield P_max, N, P_t, k, nu
