import logging

from celery import shared_task

logger = logging.getLogger(__name__)


@shared_task
def min_gap_profile_task(alpha_text, D, checkpoints, precision_bits=None, workers=None):
    """Celery task computing a delta_min profile; returns serialized rows"""
    from arithmetic.qfield import QuadElem
    from .serializers import ProfileRowSerializer
    from .services import min_gap_profile, weyl_ratio

    alpha = QuadElem.parse(alpha_text, D)
    logger.info(f"Gap profile for {alpha} at checkpoints {checkpoints}")
    rows = min_gap_profile(alpha, checkpoints, precision_bits, workers)
    last = rows[-1]
    return {
        'rows': [dict(ProfileRowSerializer(ProfileRowSerializer.flatten(row)).data) for row in rows],
        'weyl_ratio': weyl_ratio(alpha, last.gap.upper, last.N) if last.gap is not None else None,
    }
