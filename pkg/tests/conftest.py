import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from offeropt import OfferCatalog, OfferType, Subscriber

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def subscriber_lists(draw, min_size=0, max_size=12):
    params = draw(
        st.lists(
            st.tuples(
                st.floats(0.0, 500.0),
                st.floats(0.0, 1.0),
                st.floats(0.0, 2.0),
            ),
            min_size=min_size,
            max_size=max_size,
        )
    )
    return [Subscriber(i, p, alpha, gamma) for i, (p, alpha, gamma) in enumerate(params)]


@st.composite
def catalogs(draw, max_k=5, max_count=6, min_count=0):
    offers = draw(
        st.lists(
            st.tuples(st.floats(0.5, 100.0), st.integers(min_count, max_count)),
            min_size=1,
            max_size=max_k,
        )
    )
    return OfferCatalog(OfferType(value, count) for value, count in offers)
