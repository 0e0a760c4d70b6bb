"""Shared random generators for the test suite.

Two flavors: seeded `random.Random` loops for the fixed-count batteries
(so a failure reproduces from the seed alone), and hypothesis strategies
for the shrinking property tests.
"""

from fractions import Fraction

from hypothesis import strategies as st

from gausscalc.poly import MultiIndex, Polynomial


def random_multi_index(rng, max_vars=4, max_degree=8):
    alpha = {}
    budget = rng.randint(0, max_degree)
    while budget > 0 and rng.random() < 0.75:
        var = rng.randint(1, max_vars)
        step = rng.randint(1, budget)
        alpha[var] = alpha.get(var, 0) + step
        budget -= step
    return MultiIndex(alpha)


def random_polynomial(rng, max_vars=4, max_degree=8, max_terms=6, coeff_bound=9):
    pairs = []
    for _ in range(rng.randint(1, max_terms)):
        num = rng.randint(-coeff_bound, coeff_bound)
        if num:
            pairs.append(
                (random_multi_index(rng, max_vars, max_degree), Fraction(num, rng.randint(1, 4)))
            )
    return Polynomial(pairs)


def random_nonzero_polynomial(rng, **kwargs):
    while True:
        f = random_polynomial(rng, **kwargs)
        if not f.is_zero:
            return f


small_fractions = st.fractions(
    min_value=Fraction(-8), max_value=Fraction(8), max_denominator=6
)


@st.composite
def multi_indices(draw, max_vars=3, max_exponent=4):
    exponents = draw(
        st.dictionaries(
            st.integers(min_value=1, max_value=max_vars),
            st.integers(min_value=1, max_value=max_exponent),
            max_size=max_vars,
        )
    )
    return MultiIndex(exponents)


@st.composite
def polynomials(draw, max_vars=3, max_exponent=4, max_terms=5):
    pairs = draw(
        st.lists(
            st.tuples(multi_indices(max_vars, max_exponent), small_fractions),
            max_size=max_terms,
        )
    )
    return Polynomial(pairs)
