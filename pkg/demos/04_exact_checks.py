"""How good is the Gaussian moment picture?

The QND coupling is diagonal in F_z, so for each projection m the light
leaves the interferometer as a coherent state with a known phase. Summing
exactly over the binomial m distribution gives the light variance without
any linearization. Balanced detection of coherent light is a difference of
Poisson counts, so a full Bayes update over m gives the conditional atomic
variance directly.
"""

from qndsqueeze.oracle import (coupling_for_kappa2, exact_output_variance, exact_two_colour_variance,
                               posterior_conditional_variance, two_colour_coupling_for_kappa2)

n_at, n_ph = 100, 1e4
print("single probe, N_at = 100, N_ph = 1e4")
for kappa2 in (0.05, 0.25, 1.0):
    k = coupling_for_kappa2(kappa2, n_at, n_ph)
    exact = exact_output_variance(n_at, n_ph, k)
    gauss = n_ph / 4 * (1 + kappa2)
    print(f"  kappa^2 = {kappa2:4.2f}: exact {exact:10.3f}  moments {gauss:10.3f}  rel {exact / gauss - 1:+.2e}")

print("two colours, N_at = 100, N_ph,4 = 1e4")
for kappa2 in (0.25, 1.0):
    k = two_colour_coupling_for_kappa2(kappa2, n_at, n_ph)
    exact = exact_two_colour_variance(n_at, n_ph, k)
    gauss = 2 * n_ph * (1 + 2 * kappa2 * (1 + n_at / (2 * n_ph)))
    print(f"  kappa^2 = {kappa2:4.2f}: exact {exact:10.3f}  moments {gauss:10.3f}  rel {exact / gauss - 1:+.2e}")

n_at, n_ph = 10_000, 1e6
print("conditional variance after one readout, N_at = 1e4")
for kappa2 in (0.5, 1.0, 2.0):
    k = coupling_for_kappa2(kappa2, n_at, n_ph)
    bayes = posterior_conditional_variance(n_at, n_ph, k)
    gauss = n_at / 4 / (1 + kappa2)
    print(f"  kappa^2 = {kappa2:3.1f}: Bayes {bayes:9.3f}  moments {gauss:9.3f}  rel {bayes / gauss - 1:+.2e}")
