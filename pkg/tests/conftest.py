import pytest

from cosmicrng import catalog, extract, photonsim, randtest

# One acquisition feeds the heavy end-to-end checks: >= 1e7 detections at a
# megahertz rate (within the detector's linear mode), fixed seed.
PIPELINE_SEED = 20170113
PIPELINE_CONFIG = photonsim.SimConfig(
    signal_rate_hz=1_000_000.0,
    background_rate_hz=0.0,
    duration_s=10.8,
    seed=PIPELINE_SEED,
)

# Battery scale for desk runs: 100 sequences of 1e5 bits with the matching
# NIST parameter choices (m < log2(n) - 2 for serial, m < log2(n) - 5 for
# approximate entropy).
BATTERY_SEQUENCES = 100
BATTERY_SEQ_LEN = 100_000
BATTERY_PARAMS = dict(m_block=128, m_serial=13, m_apen=7)


@pytest.fixture(scope="session")
def builtin_cat():
    return catalog.builtin_catalog()


@pytest.fixture(scope="session")
def bell_pair(builtin_cat):
    return (
        catalog.select_latest(builtin_cat, "HIP 55892"),
        catalog.select_latest(builtin_cat, "HIP 117928"),
    )


@pytest.fixture(scope="session")
def pipeline_series():
    return photonsim.simulate_stream(PIPELINE_CONFIG)


@pytest.fixture(scope="session")
def pipeline_record(pipeline_series):
    return extract.extract_bits(pipeline_series)


@pytest.fixture(scope="session")
def pipeline_histogram(pipeline_record):
    return extract.histogram(pipeline_record)


@pytest.fixture(scope="session")
def pipeline_battery(pipeline_record):
    bits = extract.unpack_bits_msb(pipeline_record.bytes)
    sequences = randtest.split_sequences(bits, BATTERY_SEQUENCES, BATTERY_SEQ_LEN)
    return randtest.run_battery(sequences, **BATTERY_PARAMS)
