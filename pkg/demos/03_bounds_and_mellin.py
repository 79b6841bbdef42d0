"""Analytic bounds: the isolated fraction, its Mellin asymptotic and the drone factor."""
from hyperdrones import BoundParams, drone_series_factor, isolated_fraction_bound_sum, isolation_exponent, mellin_f

params = BoundParams.from_dimensions(d_F=3.0, d_r=3.0, theta=1.0)
print(f"isolated fraction decays like n^{isolation_exponent(params):.4f}")

for n in (400, 3200, 10 ** 5, 10 ** 8):
    bound = isolated_fraction_bound_sum(n, params).value
    factor = drone_series_factor(n, params).value
    print(f"n={n:>9}: isolated fraction <= {bound:.4f}, drones per isolated node <= {factor:.3f}")

# The level sum f(y) against its leading Mellin term.
# The leftover error is a small log-periodic oscillation.
for y in (1e2, 1e4, 1e6, 1e8):
    m = mellin_f(y, params)
    print(f"y={y:.0e}: f={m.direct_sum:.6e}, leading={m.asymptotic:.6e}, "
          f"relative error {m.relative_error:.2e}, with oscillation {m.corrected_error:.1e}")
