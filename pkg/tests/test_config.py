import pytest

from src.gaugelab.config import LabConfig


def test_defaults_validate():
    """Test the default settings are consistent."""
    settings = LabConfig()

    settings.validate()
    assert 0 < settings.NODE_FLOOR <= 1e-6
    assert settings.WORKERS >= 1


@pytest.mark.parametrize("field,value", [
    ("WORKERS", 0),
    ("NODE_FLOOR", 0.0),
    ("NODE_FLOOR", 1e-3),
    ("MAX_DENSITY_MATRIX_POINTS", 4),
    ("BLOWUP_NORM_GROWTH", 1.0),
    ("BLOWUP_AMPLITUDE", -1.0),
])
def test_invalid_settings(field, value):
    """Test out-of-range settings are rejected."""
    settings = LabConfig(**{field: value})

    with pytest.raises(ValueError):
        settings.validate()
