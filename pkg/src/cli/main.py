"""
PrivAR Privacy Pipeline
Command Line Module

`privar` entry point: every pipeline stage as a subcommand, the two
services, end-to-end runs over a directory, evaluation and warning
rendering. Exit codes: 0 success, 1 operational error, 2 usage error.

Author: PrivAR Team
License: MIT
"""

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src import __version__
from src.common.config import Settings, load_settings
from src.common.exceptions import ParameterError, PrivARError
from src.common.logging_setup import configure_logging
from src.imaging.codec import compress, load_image, mask_to_png, save_png
from src.imaging.image import BoundingBox, ObfuscationParams, frame_seed
from src.imaging.obfuscation import build_mask, obfuscate
from src.risk_assessment.assessor import RiskAssessment
from src.risk_assessment.backends import create_backend
from src.text_detection.sources import create_detector

from .warnings import FlashSchedule, WarningMode, render_sequence

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = ('.png', '.jpg', '.jpeg')
METHODS = ('privar', 'rule-based', 'object-recognition', 'scene-captioning')
MODES = ('privar', 'oracle-guided', 'no-obfuscation')


class _UsageError(Exception):
    """Invalid flag combination detected after parsing."""


def _non_negative_float(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value}")
    if number < 0 or number != number:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return number


def _non_negative_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value}")
    if number < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return number


def _quality(value: str) -> int:
    number = _non_negative_int(value)
    if not 1 <= number <= 100:
        raise argparse.ArgumentTypeError(f"quality must be in 1..100, got {value}")
    return number


def _positive_int(value: str) -> int:
    number = _non_negative_int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return number


def _positive_float(value: str) -> float:
    number = _non_negative_float(value)
    if number == 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return number


def _add_obfuscation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--sigma', type=_non_negative_float, help='Gaussian blur sigma (default 5)')
    parser.add_argument('--beta', type=_non_negative_float, help='Elastic warp magnitude in px (default 40)')
    parser.add_argument('--pad', type=_non_negative_int, help='Mask dilation in px (default 4)')


def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--detector', choices=['heuristic', 'annotation', 'external'])
    parser.add_argument('--text-boxes', dest='sidecar_path', help='Detection sidecar CSV for --detector external')
    parser.add_argument('--manifest', dest='manifest_path', help='Dataset manifest')


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--backend', choices=['mock', 'remote'])
    parser.add_argument('--scenario-table', help='Mock scenario table JSON')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='privar',
        description='Privacy risk detection for AR frames with edge-side text obfuscation.',
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--config', help='Extra YAML configuration file')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--json-logs', action='store_true', help='JSON-lines log output')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('obfuscate', help='Obfuscate the text regions of one image')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--out', required=True, help='Output image (.png, or .jpg at --quality)')
    p.add_argument('--boxes', help='JSON list of {x, y, w, h}; detected when omitted')
    p.add_argument('--seed', type=_non_negative_int, help='Warp seed (default: derived from the file stem)')
    p.add_argument('--quality', type=_quality)
    p.add_argument('--mask-out', help='Also write the applied mask as PNG')
    _add_obfuscation_flags(p)
    _add_detector_flags(p)

    p = sub.add_parser('detect', help='Detect text boxes in one image')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--out', help='Write boxes JSON here instead of stdout')
    _add_detector_flags(p)

    p = sub.add_parser('assess', help='Run one image through the local edge and cloud pipeline')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--frame-id', help='Defaults to the file stem')
    p.add_argument('--quality', type=_quality)
    p.add_argument('--out', help='Write the response JSON here instead of stdout')
    _add_obfuscation_flags(p)
    _add_detector_flags(p)
    _add_backend_flags(p)

    p = sub.add_parser('serve-edge', help='Serve the edge tier over HTTP')
    p.add_argument('--addr', dest='edge_addr', help='host:port (default PRIVAR_EDGE_ADDR)')
    p.add_argument('--cloud-addr', help='Cloud service host:port or URL')
    _add_obfuscation_flags(p)
    _add_detector_flags(p)

    p = sub.add_parser('serve-cloud', help='Serve the cloud tier over HTTP')
    p.add_argument('--addr', dest='cloud_addr', help='host:port (default PRIVAR_CLOUD_ADDR)')
    _add_backend_flags(p)

    p = sub.add_parser('run', help='End-to-end over a directory of images')
    p.add_argument('--in-dir', required=True)
    p.add_argument('--out', required=True, help='Results JSON file')
    p.add_argument('--edge-url', help='Submit to a running edge instead of in-process services')
    p.add_argument('--quality', type=_quality)
    p.add_argument('--workers', type=_positive_int, default=1)
    p.add_argument('--warnings-dir', help='Render a warning episode per risky frame here')
    p.add_argument('--warning-mode', choices=[m.value for m in WarningMode], default='region-overlay')
    _add_obfuscation_flags(p)
    _add_detector_flags(p)
    _add_backend_flags(p)

    p = sub.add_parser('evaluate', help='Evaluate classifiers over a dataset manifest')
    p.add_argument('--manifest', dest='manifest_path', required=True)
    p.add_argument('--out', required=True, help='Report directory')
    p.add_argument('--method', action='append', choices=METHODS, help='Repeatable (default privar)')
    p.add_argument('--mode', action='append', choices=MODES, help='Repeatable (default privar)')
    p.add_argument('--detector', choices=['heuristic', 'annotation', 'external'])
    p.add_argument('--text-boxes', dest='sidecar_path', help='Detection sidecar CSV for --detector external')
    p.add_argument('--ocr', help='Recorded OCR sidecar CSV (CER and rule-based input)')
    p.add_argument('--detections', help='Recorded object detections CSV')
    p.add_argument('--rules', help='Pattern rules JSON for rule-based')
    p.add_argument('--leakage', action='store_true', help='Extract sensitive items for PLR')
    p.add_argument('--quality', type=_quality)
    p.add_argument('--workers', type=_positive_int)
    p.add_argument('--progress', action='store_true')
    _add_obfuscation_flags(p)
    _add_backend_flags(p)

    p = sub.add_parser('render-warnings', help='Render a warning episode for an assessed frame')
    p.add_argument('--frame', required=True, help='Frame image')
    p.add_argument('--assessment', required=True, help='Assessment or response JSON')
    p.add_argument('--mode', choices=[m.value for m in WarningMode], required=True)
    p.add_argument('--fps', type=_positive_float)
    p.add_argument('--out', required=True, help='Output directory')

    p = sub.add_parser('make-fixture', help='Write the synthetic 12-frame mini-fixture')
    p.add_argument('--out', required=True)
    p.add_argument('--quality', type=_quality)
    _add_obfuscation_flags(p)

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """CLI flags as a settings overlay; unset flags leave configuration alone."""
    mapping = {
        'sigma': ('pipeline', 'sigma'),
        'beta': ('pipeline', 'beta'),
        'pad': ('pipeline', 'pad'),
        'quality': ('pipeline', 'quality'),
        'detector': ('detector', 'kind'),
        'sidecar_path': ('detector', 'sidecar_path'),
        'manifest_path': ('detector', 'manifest_path'),
        'backend': ('backend', 'kind'),
        'scenario_table': ('backend', 'scenario_table'),
        'edge_addr': ('services', 'edge_addr'),
        'cloud_addr': ('services', 'cloud_addr'),
        'rules': ('evaluation', 'rules_path'),
        'log_level': ('logging', 'level'),
    }
    overrides: Dict[str, Dict[str, Any]] = {}
    for attr, (section, key) in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides.setdefault(section, {})[key] = value
    if getattr(args, 'json_logs', False):
        overrides.setdefault('logging', {})['json'] = True
    if getattr(args, 'workers', None) is not None and args.command == 'evaluate':
        overrides.setdefault('evaluation', {})['workers'] = args.workers
    return overrides


def _params(settings: Settings, seed: int = 0) -> ObfuscationParams:
    pipeline = settings.pipeline
    return ObfuscationParams(
        sigma=pipeline.sigma, beta=pipeline.beta, pad=pipeline.pad,
        seed=seed, field_sigma=pipeline.field_sigma,
    )


def _write_json(data: Any, out: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text + '\n')
    else:
        print(text)


def _split_addr(addr: str) -> Tuple[str, int]:
    host, _, port = addr.rpartition(':')
    if not host or not port.isdigit():
        raise PrivARError(f"address must be host:port, got '{addr}'")
    return host, int(port)


def _read_boxes(path: str) -> List[BoundingBox]:
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
            return [BoundingBox.from_dict(entry) for entry in data]
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ParameterError(f"malformed boxes file {path}: {e!r}") from e


def _cmd_obfuscate(args: argparse.Namespace, settings: Settings) -> int:
    source = Path(args.input)
    image = load_image(source)
    if args.boxes:
        boxes = _read_boxes(args.boxes)
    else:
        detector = create_detector(settings.detector.kind, settings.detector)
        boxes = detector.detect(image, source.stem).boxes

    seed = args.seed if args.seed is not None else frame_seed(source.stem)
    params = _params(settings, seed)
    protected = obfuscate(image, boxes, params)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix.lower() in ('.jpg', '.jpeg'):
        out.write_bytes(compress(protected, settings.pipeline.quality))
    else:
        save_png(protected, out)
    if args.mask_out:
        mask_to_png(build_mask(boxes, image.width, image.height, params.pad), args.mask_out)
    logger.info(f"Obfuscated {len(boxes)} regions of {source} into {out}")
    return 0


def _cmd_detect(args: argparse.Namespace, settings: Settings) -> int:
    source = Path(args.input)
    detector = create_detector(settings.detector.kind, settings.detector)
    result = detector.detect(load_image(source), source.stem)
    _write_json(
        {
            'frame_id': source.stem,
            'source': {'kind': result.source.kind, 'provenance': result.source.provenance},
            'boxes': [box.to_dict() for box in result.boxes],
        },
        args.out,
    )
    return 0


def _local_edge(settings: Settings):
    """Edge and cloud services wired in-process."""
    from src.services.cloud import build_cloud_service
    from src.services.edge import InProcessCloudLink, build_edge_service

    cloud = build_cloud_service(settings)
    return build_edge_service(settings, InProcessCloudLink(cloud))


def _cmd_assess(args: argparse.Namespace, settings: Settings) -> int:
    from src.services.device import build_envelope

    source = Path(args.input)
    edge = _local_edge(settings)
    envelope = build_envelope(load_image(source), args.frame_id or source.stem, settings.pipeline.quality)
    response = edge.handle_frame(envelope)
    _write_json(response.model_dump(mode='json'), args.out)
    return 0


def _cmd_serve_edge(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    from src.services.edge import build_edge_service, create_edge_app

    host, port = _split_addr(settings.services.edge_addr)
    app = create_edge_app(build_edge_service(settings))
    logger.info(f"Edge serving on {host}:{port}, cloud at {settings.services.cloud_url}")
    uvicorn.run(app, host=host, port=port, log_config=None)
    return 0


def _cmd_serve_cloud(args: argparse.Namespace, settings: Settings) -> int:
    import uvicorn

    from src.services.cloud import build_cloud_service, create_cloud_app

    host, port = _split_addr(settings.services.cloud_addr)
    app = create_cloud_app(build_cloud_service(settings))
    logger.info(f"Cloud serving on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_config=None)
    return 0


def _image_files(directory: Path) -> List[Path]:
    return sorted(
        path for path in directory.iterdir()
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES
    )


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    from src.services.device import build_envelope, device_submit

    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        raise PrivARError(f"input directory {in_dir} does not exist")
    files = _image_files(in_dir)
    quality = settings.pipeline.quality
    edge = None if args.edge_url else _local_edge(settings)

    def process(path: Path) -> Dict[str, Any]:
        try:
            if edge is None:
                response = device_submit(
                    path, args.edge_url, quality,
                    timeout_s=settings.services.edge_timeout_s, frame_id=path.stem,
                )
            else:
                response = edge.handle_frame(build_envelope(load_image(path), path.stem, quality))
        except PrivARError as e:
            logger.error(f"Frame {path.stem}: {e}")
            return {'frame_id': path.stem, 'error': str(e)}
        return {'frame_id': path.stem, 'assessment': response.assessment.model_dump(mode='json')}

    with ThreadPoolExecutor(max_workers=args.workers) as executor:
        results = list(executor.map(process, files))
    results.sort(key=lambda entry: entry['frame_id'])
    _write_json(results, args.out)

    if args.warnings_dir:
        schedule = FlashSchedule.from_settings(settings.warnings)
        by_id = {entry['frame_id']: entry for entry in results}
        for path in files:
            assessment = by_id[path.stem].get('assessment')
            if assessment and assessment['risk']:
                render_sequence(
                    load_image(path), RiskAssessment.from_dict(assessment), args.warning_mode,
                    Path(args.warnings_dir) / path.stem, settings.warnings.fps, schedule,
                    settings.warnings.outline_px,
                )

    failures = [entry for entry in results if 'error' in entry]
    risky = sum(1 for entry in results if entry.get('assessment', {}).get('risk'))
    logger.info(f"Processed {len(results)} frames: {risky} risky, {len(failures)} failed")
    return 1 if failures else 0


def _cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    from src.baselines.object_recognition import ObjectRecognitionClassifier, load_recorded_detections
    from src.baselines.rule_based import RuleBasedClassifier, load_rules
    from src.baselines.scene_captioning import SceneCaptioningClassifier
    from src.baselines.text_extraction import RecordedOcrSource, TranscriptOcrSource
    from src.evaluation.harness import EvaluationConfig, PrivARClassifier, run_evaluation
    from src.evaluation.manifest import load_manifest
    from src.evaluation.report import write_report

    methods = args.method or ['privar']
    modes = args.mode or ['privar']
    if 'object-recognition' in methods and not args.detections:
        raise _UsageError("--method object-recognition requires --detections")

    manifest = load_manifest(args.manifest_path)
    items = manifest.by_id()
    recorded_ocr = RecordedOcrSource.from_file(args.ocr) if args.ocr else None
    if recorded_ocr is None and any(item.transcript or item.region_texts() for item in manifest.items):
        logger.info("Transcripts present but no --ocr sidecar; CER needs text read from the protected frames")

    needs_backend = bool({'privar', 'scene-captioning'} & set(methods)) or args.leakage
    backend = create_backend(settings.backend) if needs_backend else None

    classifiers = []
    for method in methods:
        if method == 'privar':
            classifiers.append(PrivARClassifier(backend))
        elif method == 'rule-based':
            rules = load_rules(settings.evaluation.rules_path)
            classifiers.append(RuleBasedClassifier(recorded_ocr or TranscriptOcrSource(), rules))
        elif method == 'object-recognition':
            classifiers.append(ObjectRecognitionClassifier(
                load_recorded_detections(args.detections),
                settings.evaluation.sensitive_classes,
                settings.evaluation.confidence_threshold,
            ))
        else:
            classifiers.append(SceneCaptioningClassifier(backend))

    config = EvaluationConfig(
        params=_params(settings),
        quality=settings.pipeline.quality,
        workers=settings.evaluation.workers,
        detector=create_detector(settings.detector.kind, settings.detector, items=items),
        cer_source=recorded_ocr,
        leakage_backend=backend if args.leakage else None,
        progress=args.progress,
    )

    reports = [
        run_evaluation(manifest, classifier, mode, config)
        for classifier in classifiers
        for mode in modes
    ]
    write_report(reports, args.out)
    for report in reports:
        if report.metrics is not None:
            logger.info(
                f"{report.method}/{report.mode.value}: acc={report.metrics.accuracy:.2f} "
                f"prec={report.metrics.precision:.2f} rec={report.metrics.recall:.2f} "
                f"f1={report.metrics.f1:.2f}"
            )
    return 0


def _cmd_render_warnings(args: argparse.Namespace, settings: Settings) -> int:
    with open(args.assessment, 'r', encoding='utf-8') as f:
        data = json.load(f)
    if isinstance(data, dict) and 'assessment' in data:
        data = data['assessment']
    assessment = RiskAssessment.from_dict(data)
    fps = args.fps or settings.warnings.fps
    render_sequence(
        load_image(args.frame), assessment, args.mode, args.out, fps,
        FlashSchedule.from_settings(settings.warnings), settings.warnings.outline_px,
    )
    return 0


def _cmd_make_fixture(args: argparse.Namespace, settings: Settings) -> int:
    from src.evaluation.synthetic import generate_mini_fixture

    fixture = generate_mini_fixture(args.out, settings.pipeline.quality, _params(settings))
    print(f"Wrote {len(fixture.images)} frames to {fixture.root}")
    return 0


COMMANDS = {
    'obfuscate': _cmd_obfuscate,
    'detect': _cmd_detect,
    'assess': _cmd_assess,
    'serve-edge': _cmd_serve_edge,
    'serve-cloud': _cmd_serve_cloud,
    'run': _cmd_run,
    'evaluate': _cmd_evaluate,
    'render-warnings': _cmd_render_warnings,
    'make-fixture': _cmd_make_fixture,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and dispatch a subcommand.

    Returns:
        0 on success, 1 on an operational error, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings(args.config, _overrides(args))
        configure_logging(settings.logging)
        return COMMANDS[args.command](args, settings)
    except _UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"privar: error: {e}", file=sys.stderr)
        return 2
    except (PrivARError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"privar: {args.command} failed: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
