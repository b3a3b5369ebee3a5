"""Published benchmark values the reproduction harness compares against.

Keys follow the original table layouts:
  * TABLE1: monotonicity size study on design I, keyed (n, c0, xi, k_factor)
    with rejection rates at 10/5/1% and the average selected dimension at 5%.
  * TABLE2: linearity size study on design I, keyed (n, xi, k_factor),
    5% level only.
  * SUPP_C: monotone-increasing size study on design II, keyed
    (n, c_a, xi, k_factor), 5% level.
  * SUPP_D: parametric-null comparison of the structural-space (K=4J) and
    instrument-space tests, keyed (n, design, xi), 5% level.

All studies behind these numbers used 5000 Monte Carlo replications; the
desk-scale reproductions run fewer and compare within binomial noise.
"""

from __future__ import annotations

TABLE1 = {
    # n=500
    (500, 0.01, 0.3, 2): {"r10": 0.029, "r05": 0.008, "r01": 0.000, "jhat": 3.00},
    (500, 0.01, 0.3, 4): {"r10": 0.053, "r05": 0.021, "r01": 0.002, "jhat": 3.02},
    (500, 0.01, 0.5, 2): {"r10": 0.043, "r05": 0.014, "r01": 0.000, "jhat": 3.31},
    (500, 0.01, 0.5, 4): {"r10": 0.049, "r05": 0.019, "r01": 0.002, "jhat": 3.35},
    (500, 0.01, 0.7, 2): {"r10": 0.047, "r05": 0.021, "r01": 0.003, "jhat": 3.56},
    (500, 0.01, 0.7, 4): {"r10": 0.049, "r05": 0.024, "r01": 0.006, "jhat": 3.57},
    (500, 0.1, 0.3, 2): {"r10": 0.024, "r05": 0.005, "r01": 0.000, "jhat": 3.00},
    (500, 0.1, 0.3, 4): {"r10": 0.045, "r05": 0.015, "r01": 0.001, "jhat": 3.03},
    (500, 0.1, 0.5, 2): {"r10": 0.033, "r05": 0.007, "r01": 0.000, "jhat": 3.34},
    (500, 0.1, 0.5, 4): {"r10": 0.036, "r05": 0.012, "r01": 0.001, "jhat": 3.38},
    (500, 0.1, 0.7, 2): {"r10": 0.033, "r05": 0.014, "r01": 0.001, "jhat": 3.65},
    (500, 0.1, 0.7, 4): {"r10": 0.035, "r05": 0.016, "r01": 0.003, "jhat": 3.63},
    (500, 1.0, 0.3, 2): {"r10": 0.017, "r05": 0.004, "r01": 0.000, "jhat": 3.00},
    (500, 1.0, 0.3, 4): {"r10": 0.031, "r05": 0.008, "r01": 0.000, "jhat": 3.03},
    (500, 1.0, 0.5, 2): {"r10": 0.019, "r05": 0.004, "r01": 0.000, "jhat": 3.38},
    (500, 1.0, 0.5, 4): {"r10": 0.020, "r05": 0.006, "r01": 0.000, "jhat": 3.41},
    (500, 1.0, 0.7, 2): {"r10": 0.015, "r05": 0.005, "r01": 0.000, "jhat": 3.76},
    (500, 1.0, 0.7, 4): {"r10": 0.017, "r05": 0.007, "r01": 0.001, "jhat": 3.74},
    # n=1000
    (1000, 0.01, 0.3, 2): {"r10": 0.034, "r05": 0.009, "r01": 0.000, "jhat": 3.01},
    (1000, 0.01, 0.3, 4): {"r10": 0.051, "r05": 0.018, "r01": 0.001, "jhat": 3.06},
    (1000, 0.01, 0.5, 2): {"r10": 0.034, "r05": 0.013, "r01": 0.001, "jhat": 3.49},
    (1000, 0.01, 0.5, 4): {"r10": 0.043, "r05": 0.016, "r01": 0.002, "jhat": 3.44},
    (1000, 0.01, 0.7, 2): {"r10": 0.049, "r05": 0.021, "r01": 0.003, "jhat": 3.84},
    (1000, 0.01, 0.7, 4): {"r10": 0.052, "r05": 0.025, "r01": 0.003, "jhat": 3.94},
    (1000, 0.1, 0.3, 2): {"r10": 0.029, "r05": 0.007, "r01": 0.000, "jhat": 3.01},
    (1000, 0.1, 0.3, 4): {"r10": 0.042, "r05": 0.014, "r01": 0.001, "jhat": 3.07},
    (1000, 0.1, 0.5, 2): {"r10": 0.024, "r05": 0.009, "r01": 0.000, "jhat": 3.55},
    (1000, 0.1, 0.5, 4): {"r10": 0.031, "r05": 0.011, "r01": 0.001, "jhat": 3.48},
    (1000, 0.1, 0.7, 2): {"r10": 0.031, "r05": 0.014, "r01": 0.002, "jhat": 3.99},
    (1000, 0.1, 0.7, 4): {"r10": 0.037, "r05": 0.016, "r01": 0.003, "jhat": 4.08},
    (1000, 1.0, 0.3, 2): {"r10": 0.020, "r05": 0.004, "r01": 0.000, "jhat": 3.02},
    (1000, 1.0, 0.3, 4): {"r10": 0.027, "r05": 0.006, "r01": 0.000, "jhat": 3.07},
    (1000, 1.0, 0.5, 2): {"r10": 0.012, "r05": 0.002, "r01": 0.000, "jhat": 3.63},
    (1000, 1.0, 0.5, 4): {"r10": 0.015, "r05": 0.004, "r01": 0.000, "jhat": 3.54},
    (1000, 1.0, 0.7, 2): {"r10": 0.013, "r05": 0.005, "r01": 0.001, "jhat": 4.19},
    (1000, 1.0, 0.7, 4): {"r10": 0.015, "r05": 0.006, "r01": 0.001, "jhat": 4.28},
    # n=5000
    (5000, 0.01, 0.3, 2): {"r10": 0.035, "r05": 0.012, "r01": 0.001, "jhat": 3.38},
    (5000, 0.01, 0.3, 4): {"r10": 0.041, "r05": 0.015, "r01": 0.001, "jhat": 3.38},
    (5000, 0.01, 0.5, 2): {"r10": 0.056, "r05": 0.023, "r01": 0.003, "jhat": 3.53},
    (5000, 0.01, 0.5, 4): {"r10": 0.058, "r05": 0.024, "r01": 0.005, "jhat": 3.62},
    (5000, 0.01, 0.7, 2): {"r10": 0.053, "r05": 0.029, "r01": 0.006, "jhat": 4.09},
    (5000, 0.01, 0.7, 4): {"r10": 0.058, "r05": 0.032, "r01": 0.005, "jhat": 4.16},
    (5000, 0.1, 0.3, 2): {"r10": 0.028, "r05": 0.008, "r01": 0.001, "jhat": 3.40},
    (5000, 0.1, 0.3, 4): {"r10": 0.033, "r05": 0.012, "r01": 0.001, "jhat": 3.39},
    (5000, 0.1, 0.5, 2): {"r10": 0.035, "r05": 0.012, "r01": 0.001, "jhat": 3.67},
    (5000, 0.1, 0.5, 4): {"r10": 0.036, "r05": 0.014, "r01": 0.002, "jhat": 3.75},
    (5000, 0.1, 0.7, 2): {"r10": 0.040, "r05": 0.018, "r01": 0.005, "jhat": 4.41},
    (5000, 0.1, 0.7, 4): {"r10": 0.036, "r05": 0.018, "r01": 0.004, "jhat": 4.44},
    (5000, 1.0, 0.3, 2): {"r10": 0.015, "r05": 0.004, "r01": 0.000, "jhat": 3.48},
    (5000, 1.0, 0.3, 4): {"r10": 0.017, "r05": 0.006, "r01": 0.000, "jhat": 3.40},
    (5000, 1.0, 0.5, 2): {"r10": 0.012, "r05": 0.003, "r01": 0.000, "jhat": 3.88},
    (5000, 1.0, 0.5, 4): {"r10": 0.012, "r05": 0.005, "r01": 0.001, "jhat": 3.93},
    (5000, 1.0, 0.7, 2): {"r10": 0.012, "r05": 0.006, "r01": 0.001, "jhat": 4.77},
    (5000, 1.0, 0.7, 4): {"r10": 0.010, "r05": 0.004, "r01": 0.001, "jhat": 4.77},
}

TABLE2 = {
    (500, 0.3, 2): {"r05": 0.010, "jhat": 3.00},
    (500, 0.3, 4): {"r05": 0.023, "jhat": 3.03},
    (500, 0.5, 2): {"r05": 0.023, "jhat": 3.34},
    (500, 0.5, 4): {"r05": 0.030, "jhat": 3.50},
    (500, 0.7, 2): {"r05": 0.030, "jhat": 3.61},
    (500, 0.7, 4): {"r05": 0.032, "jhat": 3.63},
    (1000, 0.3, 2): {"r05": 0.013, "jhat": 3.01},
    (1000, 0.3, 4): {"r05": 0.023, "jhat": 3.07},
    (1000, 0.5, 2): {"r05": 0.020, "jhat": 3.52},
    (1000, 0.5, 4): {"r05": 0.030, "jhat": 3.50},
    (1000, 0.7, 2): {"r05": 0.036, "jhat": 3.91},
    (1000, 0.7, 4): {"r05": 0.039, "jhat": 4.00},
    (5000, 0.3, 2): {"r05": 0.022, "jhat": 3.38},
    (5000, 0.3, 4): {"r05": 0.028, "jhat": 3.41},
    (5000, 0.5, 2): {"r05": 0.039, "jhat": 3.59},
    (5000, 0.5, 4): {"r05": 0.042, "jhat": 3.64},
    (5000, 0.7, 2): {"r05": 0.045, "jhat": 4.18},
    (5000, 0.7, 4): {"r05": 0.048, "jhat": 4.18},
}

SUPP_C = {
    (500, 0.0, 0.3, 2): {"r05": 0.001, "jhat": 3.00},
    (500, 0.0, 0.3, 4): {"r05": 0.003, "jhat": 3.02},
    (500, 0.0, 0.5, 2): {"r05": 0.004, "jhat": 3.40},
    (500, 0.0, 0.5, 4): {"r05": 0.004, "jhat": 3.38},
    (500, 0.0, 0.7, 2): {"r05": 0.002, "jhat": 3.75},
    (500, 0.0, 0.7, 4): {"r05": 0.002, "jhat": 3.72},
    (500, 0.1, 0.3, 2): {"r05": 0.001, "jhat": 3.00},
    (500, 0.1, 0.3, 4): {"r05": 0.005, "jhat": 3.03},
    (500, 0.1, 0.5, 2): {"r05": 0.008, "jhat": 3.39},
    (500, 0.1, 0.5, 4): {"r05": 0.008, "jhat": 3.38},
    (500, 0.1, 0.7, 2): {"r05": 0.007, "jhat": 3.69},
    (500, 0.1, 0.7, 4): {"r05": 0.008, "jhat": 3.65},
    (1000, 0.0, 0.3, 2): {"r05": 0.003, "jhat": 3.02},
    (1000, 0.0, 0.3, 4): {"r05": 0.005, "jhat": 3.06},
    (1000, 0.0, 0.5, 2): {"r05": 0.004, "jhat": 3.67},
    (1000, 0.0, 0.5, 4): {"r05": 0.004, "jhat": 3.50},
    (1000, 0.0, 0.7, 2): {"r05": 0.003, "jhat": 4.24},
    (1000, 0.0, 0.7, 4): {"r05": 0.002, "jhat": 4.32},
    (1000, 0.1, 0.3, 2): {"r05": 0.004, "jhat": 3.02},
    (1000, 0.1, 0.3, 4): {"r05": 0.007, "jhat": 3.06},
    (1000, 0.1, 0.5, 2): {"r05": 0.007, "jhat": 3.62},
    (1000, 0.1, 0.5, 4): {"r05": 0.007, "jhat": 3.48},
    (1000, 0.1, 0.7, 2): {"r05": 0.007, "jhat": 4.12},
    (1000, 0.1, 0.7, 4): {"r05": 0.005, "jhat": 4.18},
    (5000, 0.0, 0.3, 2): {"r05": 0.006, "jhat": 3.45},
    (5000, 0.0, 0.3, 4): {"r05": 0.005, "jhat": 3.36},
    (5000, 0.0, 0.5, 2): {"r05": 0.003, "jhat": 3.84},
    (5000, 0.0, 0.5, 4): {"r05": 0.003, "jhat": 3.90},
    (5000, 0.0, 0.7, 2): {"r05": 0.001, "jhat": 4.75},
    (5000, 0.0, 0.7, 4): {"r05": 0.001, "jhat": 4.73},
    (5000, 0.1, 0.3, 2): {"r05": 0.009, "jhat": 3.44},
    (5000, 0.1, 0.3, 4): {"r05": 0.007, "jhat": 3.35},
    (5000, 0.1, 0.5, 2): {"r05": 0.010, "jhat": 3.73},
    (5000, 0.1, 0.5, 4): {"r05": 0.009, "jhat": 3.78},
    (5000, 0.1, 0.7, 2): {"r05": 0.005, "jhat": 4.53},
    (5000, 0.1, 0.7, 4): {"r05": 0.004, "jhat": 4.50},
}

SUPP_D = {
    (500, "I", 0.3): {"struct": 0.023, "jhat": 3.12, "it": 0.051, "khat": 4.44},
    (500, "I", 0.5): {"struct": 0.030, "jhat": 3.46, "it": 0.050, "khat": 4.44},
    (500, "I", 0.7): {"struct": 0.032, "jhat": 3.87, "it": 0.051, "khat": 4.42},
    (500, "multivariate", 0.3): {"struct": 0.035, "jhat": 3.46, "it": 0.038, "khat": 8.99},
    (500, "multivariate", 0.5): {"struct": 0.039, "jhat": 3.49, "it": 0.042, "khat": 8.97},
    (500, "multivariate", 0.7): {"struct": 0.039, "jhat": 3.88, "it": 0.037, "khat": 8.89},
    (1000, "I", 0.3): {"struct": 0.023, "jhat": 3.17, "it": 0.045, "khat": 4.40},
    (1000, "I", 0.5): {"struct": 0.030, "jhat": 3.51, "it": 0.051, "khat": 4.39},
    (1000, "I", 0.7): {"struct": 0.039, "jhat": 4.09, "it": 0.052, "khat": 4.40},
    (1000, "multivariate", 0.3): {"struct": 0.037, "jhat": 3.49, "it": 0.035, "khat": 9.03},
    (1000, "multivariate", 0.5): {"struct": 0.042, "jhat": 3.57, "it": 0.042, "khat": 8.91},
    (1000, "multivariate", 0.7): {"struct": 0.041, "jhat": 4.07, "it": 0.043, "khat": 8.96},
    (5000, "I", 0.3): {"struct": 0.028, "jhat": 3.41, "it": 0.053, "khat": 5.10},
    (5000, "I", 0.5): {"struct": 0.042, "jhat": 3.64, "it": 0.055, "khat": 5.10},
    (5000, "I", 0.7): {"struct": 0.048, "jhat": 4.18, "it": 0.053, "khat": 5.10},
    (5000, "multivariate", 0.3): {"struct": 0.050, "jhat": 3.84, "it": 0.045, "khat": 10.17},
    (5000, "multivariate", 0.5): {"struct": 0.054, "jhat": 4.00, "it": 0.049, "khat": 10.14},
    (5000, "multivariate", 0.7): {"struct": 0.055, "jhat": 4.15, "it": 0.054, "khat": 10.14},
}
