from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from qid_lab.catalog import catalog_spec
from qid_lab.dist_model import (
    AbsContPart,
    DiscretePart,
    DistributionSpec,
    LatticeHint,
    SingularPart,
    continuous_mix,
    infer_lattice_hint,
    load_spec,
    require_valid,
    spec_from_dict,
    spec_to_dict,
    validate,
)
from qid_lab.errors import SpecError, SpecFormatError
from qid_lab.families import Gaussian, Laplace


def _discrete(atoms: list[tuple[float, float]]) -> DistributionSpec:
    return DistributionSpec(c_d=1.0, c_a=0.0, c_s=0.0, discrete=DiscretePart(atoms=tuple(atoms)))


def test_validate_bernoulli_infers_lattice() -> None:
    result = validate(_discrete([(0.0, 0.5), (1.0, 0.5)]))

    assert result.ok is True
    assert result.violations == []
    assert result.lattice_hint == LatticeHint(offset=0.0, span=1.0)
    assert result.spec is not None and result.spec.is_lattice


def test_validate_reports_mass_sum() -> None:
    result = validate(_discrete([(0.0, 0.6), (1.0, 0.6)]))

    assert result.ok is False
    messages = [violation.message for violation in result.violations]
    assert "masses sum to 1.2" in messages
    with pytest.raises(SpecError, match="masses sum to 1.2"):
        require_valid(_discrete([(0.0, 0.6), (1.0, 0.6)]))


def test_validate_nonlattice_has_no_hint() -> None:
    result = validate(_discrete([(0.0, 0.5), (1.0, 0.3), (math.sqrt(2.0), 0.2)]))

    assert result.ok is True
    assert result.lattice_hint is None
    assert result.spec is not None and not result.spec.is_lattice


def test_validate_rejects_tiny_and_unsorted_atoms() -> None:
    tiny = validate(_discrete([(0.0, 1.0), (1.0, 1e-16)]))
    unsorted = validate(_discrete([(1.0, 0.5), (0.0, 0.5)]))

    assert not tiny.ok
    assert any("not strictly positive" in v.message for v in tiny.violations)
    assert not unsorted.ok
    assert any("strictly increasing" in v.message for v in unsorted.violations)


def test_validate_flags_part_coefficient_mismatch() -> None:
    spec = DistributionSpec(
        c_d=1.0,
        c_a=0.0,
        c_s=0.0,
        discrete=DiscretePart(atoms=((0.0, 1.0),)),
        singular=SingularPart(),
    )

    result = validate(spec)

    assert not result.ok
    assert [v.location for v in result.violations] == ["singular"]


def test_validate_checks_family_parameters() -> None:
    spec = DistributionSpec(c_d=0.0, c_a=1.0, c_s=0.0, abscont=AbsContPart(components=((Gaussian(0.0, -1.0), 1.0),)))

    result = validate(spec)

    assert not result.ok
    assert "gaussian: variance must be > 0" in result.violations[0].message


def test_validate_checks_supplied_lattice_hint() -> None:
    part = DiscretePart(atoms=((0.0, 0.5), (1.0, 0.5)), lattice_hint=LatticeHint(offset=0.0, span=0.75))

    result = validate(DistributionSpec(c_d=1.0, c_a=0.0, c_s=0.0, discrete=part))

    assert not result.ok
    assert result.violations[0].location == "discrete.lattice_hint"


def test_infer_lattice_hint() -> None:
    assert infer_lattice_hint([0.5, 1.0, 2.0]) == LatticeHint(offset=0.5, span=0.5)
    assert infer_lattice_hint([3.0]) == LatticeHint(offset=3.0, span=1.0)
    assert infer_lattice_hint([-1.0, 0.0, 1.0]) == LatticeHint(offset=-1.0, span=1.0)
    assert infer_lattice_hint([0.0, 1.0, math.pi]) is None


def test_lattice_hint_is_stable_under_revalidation() -> None:
    first = require_valid(catalog_spec("three_point_lattice"))
    second = require_valid(first)

    assert first.discrete is not None and second.discrete is not None
    assert first.discrete.lattice_hint == second.discrete.lattice_hint
    assert first.discrete.lattice_hint.period == pytest.approx(2.0 * math.pi)


def test_continuous_mix_renormalizes() -> None:
    spec = DistributionSpec(
        c_d=0.2,
        c_a=0.4,
        c_s=0.4,
        discrete=DiscretePart(atoms=((0.0, 1.0),)),
        abscont=AbsContPart(components=((Laplace(), 1.0),)),
        singular=SingularPart(),
    )

    mix = continuous_mix(spec)

    assert mix.weight == pytest.approx(0.8)
    assert mix.abscont_weight == pytest.approx(0.5)
    assert mix.singular_weight == pytest.approx(0.5)
    with pytest.raises(SpecError):
        continuous_mix(catalog_spec("bernoulli_025"))


def test_spec_dict_round_trip() -> None:
    for name in ("mixed_bernoulli_gaussian", "dominated_cantor", "cantor_plus_exponential"):
        spec = catalog_spec(name)

        assert spec_from_dict(spec_to_dict(spec)) == spec


def test_spec_from_dict_component_layout() -> None:
    spec = spec_from_dict(
        {
            "c_d": 0.6,
            "c_a": 0.4,
            "c_s": 0.0,
            "discrete": {"atoms": [[0, 0.75], [1, 0.25]]},
            "abscont": {"components": [{"kind": "gaussian", "mean": 0, "variance": 1, "weight": 1}]},
        }
    )

    assert spec.abscont is not None
    assert spec.abscont.components == ((Gaussian(0.0, 1.0), 1.0),)
    assert validate(spec).ok


@pytest.mark.parametrize(
    "payload",
    [
        [],
        {"c_d": 1.0, "c_a": 0.0},
        {"c_d": "1", "c_a": 0.0, "c_s": 0.0},
        {"c_d": 1.0, "c_a": 0.0, "c_s": 0.0, "discrete": {"atoms": [[0.0]]}},
        {"c_d": 0.0, "c_a": 1.0, "c_s": 0.0, "abscont": {"components": [{"kind": "cauchy", "weight": 1}]}},
    ],
)
def test_spec_from_dict_rejects_malformed(payload: object) -> None:
    with pytest.raises(SpecFormatError):
        spec_from_dict(payload)  # type: ignore[arg-type]


def test_load_spec_errors(tmp_path: Path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")

    with pytest.raises(SpecFormatError, match="Malformed JSON"):
        load_spec(broken)
    with pytest.raises(SpecFormatError, match="not found"):
        load_spec(tmp_path / "missing.json")


def test_load_spec_reads_file(tmp_path: Path) -> None:
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec_to_dict(catalog_spec("bernoulli_025"))), encoding="utf-8")

    assert load_spec(path) == catalog_spec("bernoulli_025")
