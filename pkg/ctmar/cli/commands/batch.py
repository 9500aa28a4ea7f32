"""Case-level parallel execution shared by the batch subcommands."""
from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn

from ctmar.errors import DataError
from ctmar.io.case_store import MANIFEST_NAME, ManifestEntry, ManifestWriter, RunManifest
from ctmar.models.enums import CaseStatus
from ctmar.models.run_config import RunConfig

logger = logging.getLogger(__name__)

stderr_console = Console(stderr=True)


def run_cases[T](
    command: str,
    items: Sequence[tuple[str, T]],
    fn: Callable[[str, T], ManifestEntry],
    config: RunConfig,
    out_dir: Path,
    manifest_name: str = MANIFEST_NAME,
) -> RunManifest:
    """Process (case_id, item) pairs on config.workers threads and write the manifest.

    A DataError fails only its own case; anything else aborts the run.
    """
    writer = ManifestWriter(command, config.config_hash(), config.model_dump(mode="json", exclude={"out", "workers"}))

    def guarded(pair: tuple[str, T]) -> ManifestEntry:
        case_id, item = pair
        try:
            entry = fn(case_id, item)
        except DataError as exc:
            logger.error("[case %s] failed: %s", case_id, exc)
            entry = ManifestEntry(case_id=case_id, status=CaseStatus.FAILED, error=str(exc))
        writer.record(entry)
        return entry

    with Progress(TextColumn(f"[cyan]{command}"), BarColumn(), MofNCompleteColumn(),
                  console=stderr_console, transient=True) as progress:
        task = progress.add_task(command, total=len(items))
        with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
            for _ in pool.map(guarded, items):
                progress.advance(task)

    manifest = writer.write(out_dir, manifest_name)
    if manifest.failed:
        logger.warning("%s of %s case(s) failed", len(manifest.failed), len(manifest.cases))
    return manifest


def exit_code(manifest: RunManifest) -> int:
    return DataError.exit_code if manifest.failed else 0
