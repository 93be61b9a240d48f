import logging

from celery import shared_task

logger = logging.getLogger(__name__)


@shared_task
def build_certificate_task(alpha_text, D, eps, mode='symmetric', norm=1):
    """Celery task to build and self-verify a certificate; returns its JSON form"""
    from arithmetic.qfield import QuadElem
    from .construct import construct
    from .serializers import CertificateSerializer

    alpha = QuadElem.parse(alpha_text, D)
    logger.info(f"Building {mode} certificate for {alpha} with eps={eps}")
    cert = construct(alpha, eps, mode, norm)
    return dict(CertificateSerializer(cert).data)


@shared_task
def strong_sequence_task(alpha_text, D, n_from, n_to, norm=1):
    """Celery task for a run of strong certificates; returns their JSON forms"""
    from arithmetic.qfield import QuadElem
    from .construct import strong_sequence
    from .serializers import CertificateSerializer

    alpha = QuadElem.parse(alpha_text, D)
    certificates = strong_sequence(alpha, n_from, n_to, norm)
    return [dict(CertificateSerializer(cert).data) for cert in certificates]
