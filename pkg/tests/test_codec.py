import pytest
from hypothesis import given, settings

from conftest import WORKED_TEXT, X, names, worked_hc
from ndn_hns import AttributesComponent, FreshnessSpec, HierarchicalComponent, Name, RootPrefix, parse, serialize
from ndn_hns.codec import escape, parse_prefix
from ndn_hns.errors import BadDigest, NameParseError, NameSyntaxError, UnknownScheme
from ndn_hns.name import Encoding
from ndn_hns.security import with_fc


def test_worked_example_serializes(example_name):
    assert serialize(example_name) == WORKED_TEXT
    assert parse(WORKED_TEXT) == example_name


def test_hc_only_has_no_trailing_separator(hc):
    text = serialize(Name(RootPrefix("SBC"), hc))
    assert text == X
    assert not text.endswith(":")


def test_escaping_table():
    assert escape("a/b:c%d") == "a%2Fb%3Ac%25d"
    assert escape("a b\n") == "a%20b%0A"


@pytest.mark.parametrize(
    "text, exc",
    [
        ("IoT://SBC:UET%20Taxila/CPED", NameSyntaxError),
        ("NDN://SBC:a/b/c/d/e/f/g", UnknownScheme),
        ("IoT://sbc:a/b/c/d/e/f/g", NameSyntaxError),
        ("IoT://SBC:a/b/c/d/e/f/g%2", NameSyntaxError),
        ("IoT://SBC:a/b/c/d/e/f/g:", NameSyntaxError),
        ("IoT://SBC:a/b/c/d/e/f/g:/x", NameSyntaxError),
        ("IoT://SBC:a/b/c/d/e/f/g::x", NameSyntaxError),
        ("IoT://SBC:a/b/c/d/e/f/g:k/v:abc:/def:/0a1", BadDigest),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse(text)


def test_parse_error_offset_is_byte_offset():
    with pytest.raises(NameParseError) as info:
        parse("IoT://SBC:only/two")
    assert info.value.offset == 18
    with pytest.raises(NameParseError) as info:
        parse("IoT://SBC:ü/two")
    assert info.value.offset == len("IoT://SBC:ü/two".encode())


def test_truncated_digests_need_lenient():
    text = X + ":968cbab1de...:/e95e2bf0247...:/0ac8b624229a..."
    with pytest.raises(NameParseError):
        parse(text)
    name = parse(text, lenient=True)
    assert [d.hex for d in name.fc.digests] == ["968cbab1de", "e95e2bf0247", "0ac8b624229a"]
    assert serialize(name) == text


def test_published_fc_form():
    # the published example writes the second separator as a bare '/'
    name = parse(X + ":968cbab1de...:/e95e2bf0247.../0ac8b624229a...:/", lenient=True)
    assert name.fc.truncated
    assert name.fc.sub_type_digest.hex == "0ac8b624229a"


def test_reserved_words_roundtrip(hc):
    ac = AttributesComponent((("ts", "1"), ("sense", "x"), ("action", "y")), None, 1)
    name = Name(RootPrefix("SBC"), hc, ac)
    text = serialize(name)
    assert ".xls:%74s/1:/%73ense/x:/%61ction/y" in text and text.endswith(":/%31")
    assert parse(text) == name


def test_popularity_after_freshness(hc):
    ac = AttributesComponent((), FreshnessSpec.oldest(), 0)
    name = Name(RootPrefix("SBC"), hc, ac)
    assert serialize(name).endswith(":1:/0")
    assert parse(serialize(name)) == name


def test_trailing_terminator_is_lenient_only():
    with pytest.raises(NameSyntaxError):
        parse(X + ":/")
    assert parse(X + ":/", lenient=True) == parse(X)


def test_single_bare_integer_is_attributes_not_flat(hc):
    name = parse(X + ":0")
    assert name.ac.freshness == FreshnessSpec.latest()
    assert name.fc is None


def test_base64_fc_roundtrip(hc):
    name = with_fc(Name(RootPrefix("SBC"), hc), Encoding.BASE64)
    text = serialize(name)
    assert "Csi2JCKab335baSzrL0%2FUo2OT%2F43jaBYjBOcYJyql0w=" in text
    assert parse(text) == name


def test_schema_maps_positional_attributes(example_name):
    # the compact published form 14/01-Jan/13:30/1 with the keys supplied out of band
    schema = ("session", "date", "time", "ver")
    name = parse(X + ":14/01-Jan/13%3A30/1:/0:/5:/sense/Temperature", schema=schema)
    assert name == example_name
    assert parse(X + ":a/b", schema=schema).attributes == (("a", "b"),)


def test_parse_prefix():
    p = parse_prefix("IoT://SBC:UET%20Taxila/CPED")
    assert p.portions == ("UET Taxila", "CPED")
    with pytest.raises(NameParseError):
        parse_prefix("IoT://SBC:a:0")


def test_unicode_portions(hc):
    name = Name(RootPrefix("SBC"), HierarchicalComponent("جامعة", "漢字", "€", "ü", "a b", "c:d", "e/f"))
    assert parse(serialize(name)) == name


@settings(max_examples=400, deadline=None)
@given(names())
def test_roundtrip_property(name):
    text = serialize(name)
    assert parse(text) == name
    assert serialize(parse(text)) == text


@settings(max_examples=200, deadline=None)
@given(names(), names())
def test_serialize_is_injective(a, b):
    if a != b:
        assert serialize(a) != serialize(b)


def test_worked_hc_matches_fixture():
    assert worked_hc().originator_id == "14F-UET-PhD-CP-43"
