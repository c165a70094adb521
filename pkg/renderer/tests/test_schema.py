"""Schema enforcement: every gap is reported with the full expected layout."""

import pytest

from obsent_render import (
    FigureSpec,
    HashMismatchError,
    RenderError,
    SchemaError,
    TEMPLATES,
    read_table,
    render,
)
from obsent_render.templates import validate

from conftest import GOLDEN_DIR, GOLDEN_FOR


def rewrite(src, dst, drop_column=None, drop_meta=None, max_rows=None):
    """Copy a golden CSV with one surgical change applied."""
    lines = src.read_text().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    if drop_meta is not None:
        meta = [ln for ln in meta if not ln.startswith(f"# {drop_meta}=")]
    header = body[0].split(",")
    rows = body[1:]
    if drop_column is not None:
        keep = [i for i, name in enumerate(header) if name != drop_column]
        header = [header[i] for i in keep]
        rows = [",".join(r.split(",")[i] for i in keep) for r in rows]
    if max_rows is not None:
        rows = rows[:max_rows]
    dst.write_text("\n".join(meta + [",".join(header)] + rows) + "\n")
    return dst


@pytest.mark.parametrize("template_id", sorted(TEMPLATES))
def test_goldens_satisfy_their_templates(template_id):
    table = read_table(GOLDEN_DIR / GOLDEN_FOR[template_id])
    validate(TEMPLATES[template_id], table)


@pytest.mark.parametrize("template_id,column", [
    ("fig2", "s_pos"),
    ("fig4", "s_xe"),
    ("fig6", "s_diag"),
    ("fig7", "s_f_ps"),
    ("fig9", "s_f_micro"),
])
def test_missing_column_is_named_and_schema_listed(tmp_path, template_id,
                                                   column):
    mangled = rewrite(GOLDEN_DIR / GOLDEN_FOR[template_id],
                      tmp_path / "mangled.csv", drop_column=column)
    with pytest.raises(SchemaError) as err:
        validate(TEMPLATES[template_id], read_table(mangled))
    message = str(err.value)
    assert f"missing columns: {column}" in message
    assert "Expected columns:" in message
    assert "Expected metadata:" in message


def test_missing_metadata_key_is_named(tmp_path):
    mangled = rewrite(GOLDEN_DIR / "pure_thermal.csv",
                      tmp_path / "mangled.csv", drop_meta="switch_time")
    with pytest.raises(SchemaError, match="switch_time"):
        validate(TEMPLATES["fig6"], read_table(mangled))


def test_empty_time_series_is_an_error_not_an_empty_image(tmp_path):
    mangled = rewrite(GOLDEN_DIR / "expansion.csv",
                      tmp_path / "empty.csv", max_rows=0)
    with pytest.raises(SchemaError, match="no data rows"):
        render(FigureSpec("fig2", (mangled,), tmp_path / "out.svg"))
    assert not (tmp_path / "out.svg").exists()


def test_binned_template_requires_the_column_family(tmp_path):
    src = GOLDEN_DIR / "s_ex_bins.csv"
    table = read_table(src)
    mangled = src
    for col in [c for c in table.columns if c.startswith("s_ex_m")]:
        mangled = rewrite(mangled, tmp_path / f"drop_{col}.csv",
                          drop_column=col)
    with pytest.raises(SchemaError, match=r"no column matching"):
        validate(TEMPLATES["fig8"], read_table(mangled))


def test_mismatched_config_hashes_are_refused(tmp_path):
    spec = FigureSpec(
        "fig7",
        (GOLDEN_DIR / "entropy_vs_energy.csv", GOLDEN_DIR / "expansion.csv"),
        tmp_path / "out.svg")
    with pytest.raises(HashMismatchError, match="config_hash differs"):
        render(spec)


def test_duplicate_inputs_with_equal_hashes_pass(tmp_path):
    src = GOLDEN_DIR / "entropy_vs_energy.csv"
    out = render(FigureSpec("fig7", (src, src), tmp_path / "out.svg"))
    assert out.stat().st_size > 0


def test_unknown_template_lists_the_known_ones(tmp_path):
    with pytest.raises(RenderError, match="fig2.*fig9"):
        render(FigureSpec("fig0", (GOLDEN_DIR / "expansion.csv",),
                          tmp_path / "out.svg"))


def test_unsupported_output_format(tmp_path):
    with pytest.raises(RenderError, match="use .svg or .png"):
        render(FigureSpec("fig2", (GOLDEN_DIR / "expansion.csv",),
                          tmp_path / "out.pdf"))
