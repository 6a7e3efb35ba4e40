"""Frozen Monte Carlo calibration targets.

Regenerate with ``python tools/calibrate.py`` (fixed seeds; reruns
reproduce these numbers bit-for-bit on the same numpy/BLAS stack, and to
well inside the asserted bands anywhere else).
"""

# independent Uniform(0,1) pair, n=2000, degree 1, 3 knots, seeds 0..199
MC_NULL_UNIFORM_MEAN = 0.00355255
MC_NULL_UNIFORM_SD = 0.00170448
MC_NULL_UNIFORM_MAX = 0.0117246

# independent standard normal pair, n=500, default smoother, seeds 1000..1099
ACE_NULL_MEAN = 0.237821
ACE_NULL_SD = 0.0238072
ACE_NULL_MAX = 0.289275

# independent standard normal pair, n=1000, seeds 2000..2199
SIS_NULL_MEAN = 0.0244375
SIS_NULL_SD = 0.0187209
SIS_NULL_MAX = 0.0872915
NIS_NULL_MEAN = 0.00307378
NIS_NULL_SD = 0.00250812
NIS_NULL_MAX = 0.0134866
DCOR_NULL_MEAN = 0.0556515
DCOR_NULL_SD = 0.0107267
DCOR_NULL_MAX = 0.105084

# max top-eigenvalue score over p=100 independent normal columns, default
# cubic basis rule, seeds 3000..3199; threshold = observed max * 1.1
SCREEN_NULL_MAXLAM_MEAN_N400 = 0.175031
SCREEN_NULL_MAXLAM_MAX_N400 = 0.654782
SCREEN_NULL_THRESHOLD_N400 = 0.72026
SCREEN_NULL_MAXLAM_MEAN_N800 = 0.0833068
SCREEN_NULL_MAXLAM_MAX_N800 = 0.332489
SCREEN_NULL_THRESHOLD_N800 = 0.365737
