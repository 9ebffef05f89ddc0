"""Concurrent verifier running model check suites."""

import asyncio
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

from ..errors import NoetherError
from ..models.base import Model
from ..models.factory import create_model, resolve_selectors
from ..theory.report import CheckResult, VerificationReport
from ..utils.logger import get_logger
from .suites import NamedCheck, SuiteSettings, build_suite


class Verifier:
    """Runs the named checks of a model as asyncio tasks on a worker pool."""

    def __init__(self, settings: Optional[SuiteSettings] = None, workers: int = 4):
        """Initialize the verifier.

        Args:
            settings: Oracle and residual settings shared by all checks
            workers: Size of the thread pool the checks run on
        """
        if workers < 1:
            raise ValueError(f"workers must be positive, got {workers}")
        self.settings = settings or SuiteSettings()
        self.workers = workers
        self._logger = get_logger("runner.verifier")
        self._executor: Optional[ThreadPoolExecutor] = None

    async def __aenter__(self) -> "Verifier":
        self._executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="noether-check")
        return self

    async def __aexit__(self, *exc_info) -> None:
        if self._executor:
            self._executor.shutdown(wait=True)
            self._executor = None

    def _timed(self, check: NamedCheck) -> list[CheckResult]:
        """Run one check in a worker thread; checks never raise into the loop."""
        start = time.perf_counter()
        try:
            results = check.run()
        except NoetherError as e:
            self._logger.error(f"Check {check.name} raised: {e}")
            results = [CheckResult.failed(check.name, f"{type(e).__name__}: {e}")]
        millis = (time.perf_counter() - start) * 1000
        for result in results:
            result.millis = millis
        self._logger.debug(f"Check {check.name} finished in {millis:.1f} ms")
        return results

    async def run_checks(self, name: str, checks: Iterable[NamedCheck]) -> VerificationReport:
        """Run checks concurrently; the report orders them by name."""
        loop = asyncio.get_running_loop()
        tasks = [loop.run_in_executor(self._executor, self._timed, check) for check in checks]
        report = VerificationReport(name)
        for results in await asyncio.gather(*tasks):
            report.extend(results)
        return report

    async def verify_model(self, model: Model) -> VerificationReport:
        self._logger.info(f"Verifying model: {model.name}")
        loop = asyncio.get_running_loop()
        # Building the suite computes the Euler-Lagrange expressions
        checks = await loop.run_in_executor(self._executor, build_suite, model, self.settings)
        report = await self.run_checks(model.name, checks)
        self._logger.info(f"Model {model.name}: {report.counts()}")
        return report

    async def verify(self, selector: str) -> list[VerificationReport]:
        """Verify one selector, or every default configuration for ``all``.

        Raises:
            ModelParameterError: Unknown selector or invalid parameters
        """
        models = [create_model(s) for s in resolve_selectors(selector)]
        return list(await asyncio.gather(*(self.verify_model(m) for m in models)))


async def verify_selector(
    selector: str,
    settings: Optional[SuiteSettings] = None,
    workers: int = 4,
) -> list[VerificationReport]:
    """One-shot verification with a fresh worker pool."""
    async with Verifier(settings, workers) as verifier:
        return await verifier.verify(selector)
