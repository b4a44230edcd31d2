"""Frozen pilot constants for the pair-correlation cancellation assertions.

The implied constant in the O(sqrt(q)) pair-correlation bound is not
numeric, so assertions are calibrated empirically once and then frozen.
The pilot grid below was evaluated with

    expsumlab paircorr sweep --family {kummer,kl2} --trials 300 --seed 20260810

(equivalently pair_sweep_tuples/evaluate_sweep_row with the same arguments)
over the listed primes, non-degenerate tuples only.  Assertions require
|sum_v Z conj(Z')| / sqrt(q) <= RATIO_CEILING = 2 x the pilot maximum; the
observed medians are recorded alongside for drift diagnostics.
"""

from __future__ import annotations

PILOT_SEED = 20260810
PILOT_TRIALS = 300
PILOT_PRIMES: tuple[int, ...] = (101, 151, 199, 251, 307, 353, 397, 449, 499)
PILOT_FAMILIES: tuple[str, ...] = ("kummer", "kl2")

# Observed over the pilot grid (300 tuples per family):
PILOT_MAX_RATIO: dict[str, float] = {
    "kummer": 2.432518,
    "kl2": 2.747315,
}
PILOT_MEDIAN_RATIO: dict[str, float] = {
    "kummer": 0.851571,
    "kl2": 0.838674,
}

RATIO_CEILING: dict[str, float] = {fam: 2.0 * mx for fam, mx in PILOT_MAX_RATIO.items()}

# Degenerate verification threshold from the modulus-one main term:
# | |sum| / q - 1 | <= DEGENERATE_DEVIATION / sqrt(q).  Observed pilot
# maximum of the left side times sqrt(q) was 0.21 across both families.
DEGENERATE_DEVIATION = 5.0

# Main-term presence detector threshold on |sum| / q.
DETECTOR_THRESHOLD = 0.5
