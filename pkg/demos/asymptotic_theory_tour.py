#!/usr/bin/env python3
"""What happens to the peri-null Bayes factor as n grows.

Unlike the point-null Bayes factor, the peri-null Bayes factor does not go to
0 or infinity: it converges in probability to the ratio of the two prior
densities evaluated at the true effect size. This script evaluates that limit,
the asymptotic sampling distribution around it, and the finite-n bias term
built from the closed-form correction constants.
"""

import math

import perinull as pn

SIGMA, KAPPA0, KAPPA1 = 1.0, 0.05, 1.0

print("limits v(theta) = log prior-density ratio at the true parameter")
for mu in (0.0, 0.167, 0.182):
    v = pn.limit_log_bf(mu, SIGMA, KAPPA0, KAPPA1)
    print(f"  mu = {mu:5.3f}: v = {v:+.3f}   (BF -> {math.exp(v):8.3f})")

print("""
Under mu = 0 the limit is negative but finite: no matter how much data favor
the null, the peri-null Bayes factor can never report more support than
exp(v). Under mu != 0 the limit is an upper bound approached from below.
""")

# The sampling distribution switches regime at mu = 0, where the gradient of
# v vanishes: normal fluctuations elsewhere, a shifted-scaled chi-square(1)
# at the null.
for mu in (0.167, 0.0):
    summary = pn.summarize(mu, SIGMA, KAPPA0, KAPPA1, n=1000)
    print(f"mu = {mu}: regime = {summary.regime.value}")
    print(f"  C-constants: alt ({summary.c1_alt:9.3f}, {summary.c2_alt:10.2f})   "
          f"peri ({summary.c1_peri:9.3f}, {summary.c2_peri:10.2f})")

# The bias term E(theta, n) shifts the finite-n mean. Its defining brackets
# 1 + C1/n + C2/n^2 must be positive; with kappa0 = 0.05 the peri bracket
# only turns positive at n = 184, so theoretical curves start there.
bias = pn.bias_term(0.0, SIGMA, KAPPA0, KAPPA1, 100)
print(f"\nbias at n = 100: valid={bias.valid} (failed: {bias.failed_bracket}); "
      f"curves start at n = {bias.min_valid_n}")

print(f"\n{'n':>7} {'mean':>8} {'q2.5%':>8} {'q97.5%':>8}    (mu = 0.167, normal regime)")
limit = pn.limit_log_bf(0.167, SIGMA, KAPPA0, KAPPA1)
for n in (200, 500, 1000, 5000, 20000, 100000):
    dist = pn.sampling_distribution(0.167, SIGMA, KAPPA0, KAPPA1, n)
    print(f"{n:7d} {dist.mean():8.3f} {dist.quantile(0.025):8.3f} "
          f"{dist.quantile(0.975):8.3f}")
print(f"{'limit':>7} {limit:8.3f}   <- log(10) is {math.log(10):.3f}")

print(f"\n{'n':>7} {'mean':>8} {'q2.5%':>8} {'q97.5%':>8}    (mu = 0, chi-square regime)")
for n in (184, 250, 500, 2000, 20000):
    dist = pn.sampling_distribution(0.0, SIGMA, KAPPA0, KAPPA1, n)
    print(f"{n:7d} {dist.mean():8.3f} {dist.quantile(0.025):8.3f} "
          f"{dist.quantile(0.975):8.3f}")
print(f"{'limit':>7} {pn.limit_log_bf(0.0, SIGMA, KAPPA0, KAPPA1):8.3f}")
