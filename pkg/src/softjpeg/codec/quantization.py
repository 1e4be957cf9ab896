"""IJG quality-factor scaling of the Annex K tables."""

from __future__ import annotations

import numpy as np

from softjpeg.codec.tables import BASE_CHROMINANCE, BASE_LUMINANCE
from softjpeg.exceptions import InvalidQualityError
from softjpeg.models.images import QuantTable


def quality_scale(qf: int) -> int:
    if not isinstance(qf, (int, np.integer)) or not 1 <= qf <= 100:
        raise InvalidQualityError(f"Quality factor must be an integer in [1, 100], got {qf!r}")
    return 5000 // int(qf) if qf < 50 else 200 - 2 * int(qf)


def scale_quant_table(base: np.ndarray, qf: int, table_id: int = 0) -> QuantTable:
    """q = clamp((base * scale + 50) // 100, 1, 255), integer arithmetic."""
    scale = quality_scale(qf)
    scaled = (np.asarray(base, dtype=np.int64) * scale + 50) // 100
    return QuantTable.from_natural(np.clip(scaled, 1, 255), table_id=table_id)


def luminance_table(qf: int) -> QuantTable:
    return scale_quant_table(BASE_LUMINANCE, qf, table_id=0)


def chrominance_table(qf: int) -> QuantTable:
    return scale_quant_table(BASE_CHROMINANCE, qf, table_id=1)
