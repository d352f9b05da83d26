from .mixins.helpers import HelpersMixin
from .mixins.commands import CommandsMixin
from .mixins.publish import PublishMixin
from .base import Base


class LipCert(
    HelpersMixin,
    CommandsMixin,
    PublishMixin,
    Base,
):
    pass
