"""PrivAR Privacy Pipeline

Configuration Test Suite

Layered YAML settings, PRIVAR_* overrides and logging setup.

Author: PrivAR Team
License: MIT"""

import json
import logging
import unittest

import pytest

from src.common import config as config_module
from src.common.config import LoggingSettings, Settings, config_dir, default_rules_path, load_settings
from src.common.exceptions import ConfigurationError
from src.common.logging_setup import configure_logging


class TestLoadSettings(unittest.TestCase):
    def test_defaults_match_models(self):
        settings = load_settings(environ={})
        self.assertEqual(settings, Settings())
        self.assertEqual(settings.pipeline.quality, 75)
        self.assertEqual(settings.pipeline.sigma, 5.0)
        self.assertEqual(settings.services.cloud_url, 'http://127.0.0.1:8800')
        self.assertEqual(settings.warnings.total_s, 6.0)

    def test_environment_layer(self):
        settings = load_settings(environ={'PRIVAR_ENV': 'development'})
        self.assertEqual(settings.services.max_concurrency, 2)
        self.assertEqual(settings.logging.level, 'DEBUG')
        self.assertEqual(settings.pipeline.quality, 75)

    def test_unknown_environment_layer_is_ignored(self):
        settings = load_settings(environ={'PRIVAR_ENV': 'staging'})
        self.assertEqual(settings.services.max_concurrency, 8)

    def test_variable_overrides(self):
        settings = load_settings(environ={
            'PRIVAR_SIGMA': '2.5',
            'PRIVAR_PAD': '0',
            'PRIVAR_CLOUD_ADDR': 'https://cloud.example:9443/',
            'PRIVAR_BACKEND': 'remote',
            'PRIVAR_VLM_KEY': 'secret',
            'PRIVAR_BETA': '',
        })
        self.assertEqual(settings.pipeline.sigma, 2.5)
        self.assertEqual(settings.pipeline.pad, 0)
        self.assertEqual(settings.pipeline.beta, 40.0)
        self.assertEqual(settings.services.cloud_url, 'https://cloud.example:9443')
        self.assertEqual(settings.backend.kind, 'remote')
        self.assertNotIn('secret', repr(settings.backend))

    def test_overrides_win(self):
        settings = load_settings(
            overrides={'pipeline': {'sigma': 9.0}},
            environ={'PRIVAR_SIGMA': '2.5'},
        )
        self.assertEqual(settings.pipeline.sigma, 9.0)

    def test_invalid_values(self):
        for environ in (
            {'PRIVAR_QUALITY': '0'},
            {'PRIVAR_QUALITY': '101'},
            {'PRIVAR_SIGMA': '-1'},
            {'PRIVAR_DETECTOR': 'tesseract'},
            {'PRIVAR_BACKEND': 'oracle'},
        ):
            with self.assertRaises(ConfigurationError, msg=str(environ)):
                load_settings(environ=environ)

    def test_aspect_bounds(self):
        with self.assertRaises(ConfigurationError):
            load_settings(overrides={'detector': {'min_aspect': 30}}, environ={})


def test_explicit_file(tmp_path):
    path = tmp_path / 'site.yml'
    path.write_text("pipeline:\n  quality: 60\nservices:\n  edge_addr: '10.0.0.5:8700'\n")
    settings = load_settings(path, environ={})
    assert settings.pipeline.quality == 60
    assert settings.pipeline.sigma == 5.0
    assert settings.services.edge_url == 'http://10.0.0.5:8700'

    from_env = load_settings(environ={'PRIVAR_CONFIG': str(path)})
    assert from_env.pipeline.quality == 60


def test_bad_files(tmp_path):
    listing = tmp_path / 'list.yml'
    listing.write_text('- a\n- b\n')
    broken = tmp_path / 'broken.yml'
    broken.write_text('pipeline: [unclosed\n')
    for path in (listing, broken, tmp_path / 'missing.yml'):
        with pytest.raises(ConfigurationError):
            load_settings(path, environ={})


def test_config_dir_from_environment(tmp_path):
    (tmp_path / 'default.yml').write_text('pipeline:\n  quality: 55\n')
    (tmp_path / 'production.yml').write_text('pipeline:\n  pad: 9\n')
    environ = {'PRIVAR_CONFIG_DIR': str(tmp_path), 'PRIVAR_ENV': 'production'}

    assert config_dir(environ) == tmp_path
    assert default_rules_path(environ) == tmp_path / 'pattern_rules.json'
    settings = load_settings(environ=environ)
    assert (settings.pipeline.quality, settings.pipeline.pad) == (55, 9)


def test_installed_package_reads_working_directory(tmp_path, monkeypatch):
    (tmp_path / 'config').mkdir()
    (tmp_path / 'config' / 'default.yml').write_text('pipeline:\n  sigma: 3.0\n')
    monkeypatch.setattr(config_module, 'CONFIG_DIR', tmp_path / 'site-packages' / 'config')
    monkeypatch.chdir(tmp_path)

    assert config_dir({}) == tmp_path / 'config'
    assert load_settings(environ={}).pipeline.sigma == 3.0


def test_json_file_logging(tmp_path):
    log_file = tmp_path / 'privar.log'
    configure_logging(LoggingSettings(level='info', json=True, file=str(log_file)))
    logging.getLogger('src.services.edge').info('frame accepted')
    for handler in logging.getLogger().handlers:
        handler.flush()

    records = [json.loads(line) for line in log_file.read_text().splitlines()]
    accepted = [r for r in records if r['message'] == 'frame accepted']
    assert accepted and accepted[0]['levelname'] == 'INFO'
    assert accepted[0]['name'] == 'src.services.edge'


def test_plain_logging_level():
    configure_logging(LoggingSettings(level='warning'))
    assert logging.getLogger().level == logging.WARNING
