"""
Counting non-overlapped occurrences
===================================

A serial episode occurs when its event types appear at strictly
increasing times. Its frequency is the largest number of occurrences
that do not interleave.
"""

from streamepi.counting import brute_force_max_nonoverlapped, count_many, count_nonoverlapped, occurrences
from streamepi.events import Event

# A B A C B C, one event per second
events = [Event(x, float(t)) for t, x in enumerate([0, 1, 0, 2, 1, 2], start=1)]
a_b_c = (0, 1, 2)

# every occurrence as a tuple of event positions
print("occurrences of A->B->C:", occurrences(a_b_c, events))

# the greedy scan agrees with the exhaustive search
print("greedy:", count_nonoverlapped(a_b_c, events))
print("oracle:", brute_force_max_nonoverlapped(a_b_c, events))

# same-time events never chain: A and B at t=1 do not form A->B
tied = [Event(0, 1.0), Event(1, 1.0), Event(1, 2.0)]
print("A->B with a tie:", count_nonoverlapped((0, 1), tied))

# one pass over the events counts many episodes at once
print(count_many([(0,), (0, 1), (1, 0), (0, 0), (2, 2)], events))
