import pytest

from ndn_hns.errors import DuplicateCode, InvalidCode, UnknownCode
from ndn_hns.registry import AppCategory, Registry, default_registry, is_valid_code, load_registry, lookup, register


def test_default_registry_has_fourteen_categories():
    reg = default_registry()
    assert len(reg) == 14
    assert "SBC" in reg
    assert lookup(reg, "SBC").title == "Smart Buildings (Campus)"


def test_lookup_unknown_code():
    with pytest.raises(UnknownCode):
        lookup(default_registry(), "ZZZ")


def test_register_returns_new_registry():
    reg = default_registry()
    bigger = register(reg, AppCategory("SLB", "Smart Library"))
    assert len(bigger) == 15 and len(reg) == 14
    with pytest.raises(DuplicateCode):
        register(bigger, AppCategory("SLB", "Again"))


@pytest.mark.parametrize("code", ["", "sbc", "TOOLONGCODE", "S1", "S B"])
def test_invalid_codes(code):
    assert not is_valid_code(code)
    with pytest.raises(InvalidCode):
        AppCategory(code, "x")


def test_tsv_roundtrip(tmp_path):
    reg = default_registry()
    path = tmp_path / "reg.tsv"
    path.write_text(reg.to_tsv(), encoding="utf-8")
    assert load_registry(path) == reg


def test_tsv_rejects_bad_rows():
    with pytest.raises(InvalidCode):
        Registry.from_tsv("SBC\n")
    with pytest.raises(DuplicateCode):
        Registry.from_tsv("SBC\tA\nSBC\tB\n")


def test_lookup_is_case_sensitive():
    with pytest.raises(UnknownCode):
        lookup(default_registry(), "sbc")


def test_register_into_empty_then_lookup():
    reg = register(Registry(), AppCategory("SBC", "Smart Buildings (Campus)"))
    assert lookup(reg, "SBC").title == "Smart Buildings (Campus)"
    reg = register(default_registry(), AppCategory("XQ", "Custom"))
    assert lookup(reg, "XQ").title == "Custom"


def test_every_default_code_resolves():
    reg = default_registry()
    for code in reg.codes():
        assert lookup(reg, code).code == code
