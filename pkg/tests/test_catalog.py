import json

import pytest

from xpuperf import load_catalog, save_catalog
from xpuperf.catalog import MemType, Parallelism, bundled_catalog_path, parse_catalog
from xpuperf.errors import NotFoundError, ParseError, ValidationError

# Published single-accelerator figures the bundled catalog must match exactly:
# (peak FLOP/s, memory type, capacity bytes, bandwidth bytes/s)
REFERENCE_TABLE = {
    "A100": (624e12, "DRAM", 80e9, 1.935e12),
    "H100": (1979e12, "DRAM", 80e9, 3.35e12),
    "MI300": (2614e12, "DRAM", 192e9, 5.3e12),
    "CS-3": (125000e12, "SRAM", 44e9, 2.1e16),
    "SN-40": (638e12, "DRAM", 64e9, 2.0e12),
    "Groq": (188e12, "SRAM", 0.23e9, 8.0e13),
    "Gaudi1": (144e12, "DRAM", 32e9, 1.0e12),
    "TPUv5e": (197e12, "DRAM", 16e9, 819e9),
}


def test_bundled_catalog_shape(catalog):
    assert len(catalog.platforms) == 8
    assert len(catalog.models) >= 4


@pytest.mark.parametrize("name", sorted(REFERENCE_TABLE))
def test_reference_values_exact(catalog, name):
    peak, mem_type, cap, bw = REFERENCE_TABLE[name]
    p = catalog.get_platform(name)
    assert p.peak_flops == peak
    assert p.mem_type == MemType(mem_type)
    assert p.mem_capacity_bytes == cap
    assert p.mem_bw_bytes_per_s == bw


def test_h100_lookup_values(catalog):
    p = catalog.get_platform("H100")
    assert p.peak_flops == 1.979e15
    assert p.mem_bw_bytes_per_s == 3.35e12
    assert p.mem_capacity_bytes == 80e9


def test_groq_lookup_values(catalog):
    p = catalog.get_platform("Groq")
    assert p.mem_type is MemType.SRAM
    assert p.mem_capacity_bytes == 0.23e9
    assert p.mem_bw_bytes_per_s == 8.0e13
    assert p.allocation_quantum == 72


def test_near_miss_lookup_suggests(catalog):
    with pytest.raises(NotFoundError) as exc:
        catalog.get_platform("H101")
    assert "H100" in exc.value.suggestions


def test_model_near_miss(catalog):
    with pytest.raises(NotFoundError):
        catalog.get_model("Llama-3.1-8C")


def test_supported_parallelisms(catalog):
    assert catalog.get_platform("CS-3").supported_parallelisms == (Parallelism.PP,)
    for name in ("Groq", "SN-40", "A100", "H100", "MI300", "Gaudi1", "TPUv5e"):
        p = catalog.get_platform(name)
        assert p.supports(Parallelism.TP) and p.supports(Parallelism.PP)


def test_idle_fractions_match_published(catalog):
    expected = {
        "A100": 0.20,
        "H100": 0.20,
        "MI300": 0.20,
        "Gaudi1": 0.30,
        "SN-40": 0.40,
        "CS-3": 0.80,
    }
    for name, frac in expected.items():
        assert catalog.get_platform(name).idle_fraction == frac


def test_round_trip(catalog, tmp_path):
    out = tmp_path / "catalog.json"
    save_catalog(catalog, out)
    again = load_catalog(out)
    assert again.platforms == catalog.platforms
    assert again.models == catalog.models


def _payload():
    return json.loads(bundled_catalog_path().read_text())


def test_empty_platform_list_rejected():
    payload = _payload()
    payload["platforms"] = []
    with pytest.raises(ValidationError, match="empty"):
        parse_catalog(payload)


def test_power_fraction_invariant_rejected():
    payload = _payload()
    payload["platforms"][0]["decode_power_fraction"] = 1.2
    with pytest.raises(ValidationError, match="decode_power_fraction"):
        parse_catalog(payload)


def test_unknown_field_rejected():
    payload = _payload()
    payload["platforms"][0]["price_usd"] = 10
    with pytest.raises(ValidationError, match="unknown fields"):
        parse_catalog(payload)


def test_duplicate_names_rejected():
    payload = _payload()
    payload["platforms"].append(dict(payload["platforms"][0]))
    with pytest.raises(ValidationError, match="duplicate"):
        parse_catalog(payload)


def test_param_count_invariant_rejected():
    payload = _payload()
    payload["models"][0]["n_params"] = 10**12
    with pytest.raises(ValidationError, match="n_params"):
        parse_catalog(payload)


def test_malformed_file_is_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_catalog(bad)
