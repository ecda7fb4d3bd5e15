"""
Window-frequency bounds
=======================

For a (v,k)-persistent episode the window frequency has a lower bound;
every episode that is not persistent stays below an upper bound. With a
separated top-k, the number of wrong entries in the reported window
top-k is bounded too.
"""

from fractions import Fraction

from streamepi.thresholds import bounds, margin, threshold

k, m, delta, phi, eps = 25, 10, Fraction(4), Fraction(22), Fraction(1, 10)
fk = [200] * m

print(f"{'v':>3} {'f_L':>6} {'f_U':>6} {'valid':>6} {'max errors':>11}")
for v in range(1, m + 1):
    b = bounds(k, m, v, delta, phi, eps, fk)
    print(f"{v:3d} {str(b.f_lower):>6} {str(b.f_upper):>6} {str(b.valid):>6} {float(b.max_errors):11.3f}")

# closed forms for v = 1, v = m and v = (m+1)//2
for v in (1, m, (m + 1) // 2):
    print(v, bounds(k, m, v, delta, phi, eps, fk).corollary)

# thresholds each policy would use at f_k = 200
for policy in ("next_batch", "persistent", "heuristic", "exact"):
    print(f"{policy:>10}: margin {margin(policy, m, 5, 4.0):5.1f}  f_min {threshold(policy, 200, m, 5, 4.0)}")
