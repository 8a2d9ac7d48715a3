import logging

from log_service import LogService, get_logger


def test_log_service_is_a_singleton():
    assert LogService() is LogService()


def test_configuration_happens_once():
    service = LogService()
    handlers = list(logging.getLogger().handlers)
    LogService()
    get_logger("Other")
    assert service.root_logger is logging.getLogger()
    assert [h for h in logging.getLogger().handlers if h in handlers] == handlers


def test_named_loggers():
    assert get_logger("Connector") is logging.getLogger("Connector")
    assert LogService().get_logger("Connector").name == "Connector"
