#!/usr/bin/env python3
"""
dirac-kit Regression Test Runner

Runs catalog analyses and acceptance criteria listed in config/regression.yaml and
writes a JSON summary to results/.
"""

import sys
import json
import time
import argparse
from pathlib import Path
from datetime import datetime
from typing import Dict, List, Any, Optional

import yaml
from loguru import logger

# 项目根目录
PROJECT_ROOT = Path(__file__).resolve().parent.parent
RESULTS_DIR = PROJECT_ROOT / "results"
sys.path.insert(0, str(PROJECT_ROOT))

from dirac_kit import systems_catalog  # noqa: E402
from dirac_kit.analysis import AnalysisRunner, report_failed  # noqa: E402
from dirac_kit.errors import DiracKitError  # noqa: E402
from dirac_kit.log_setup import setup_logging  # noqa: E402
from dirac_kit.settings import load_settings  # noqa: E402
from dirac_kit.verification import AcceptanceVerifier  # noqa: E402


class TestResult:
    """测试结果类"""
    def __init__(self, name: str, status: str, duration: float,
                 details: Optional[Dict[str, Any]] = None):
        self.name = name
        self.status = status  # PASS, FAIL, ERROR
        self.duration = duration
        self.details = details or {}
        self.timestamp = datetime.now()


class RegressionRunner:
    """回归测试运行器"""

    def __init__(self, config_file: Optional[str] = None, verbose: bool = False):
        self.config = self._load_config(config_file)
        self.settings = load_settings(overrides={"samples": self.config.get("samples"),
                                                 "seed": self.config.get("seed")})
        self.results: List[TestResult] = []
        self.acceptance: Optional[AcceptanceVerifier] = None
        self.start_time = None
        self.end_time = None

        # 确保结果目录存在
        RESULTS_DIR.mkdir(parents=True, exist_ok=True)
        setup_logging(RESULTS_DIR, verbose)

    def _load_config(self, config_file: Optional[str]) -> Dict[str, Any]:
        """加载配置文件"""
        if config_file is None:
            config_file = PROJECT_ROOT / "config" / "regression.yaml"

        if not Path(config_file).exists():
            # 默认配置
            return {
                "samples": 32,
                "suites": {
                    "catalog": [{"system": entry["name"], "action": action}
                                for entry in systems_catalog.entries() for action in entry["actions"]],
                },
            }

        with open(config_file, 'r') as f:
            return yaml.safe_load(f)

    def _run_single_test(self, case: Dict[str, Any]) -> TestResult:
        """运行单个测试"""
        if "criterion" in case:
            return self._run_criterion(case["criterion"])
        name = f"{case['system']}/{case['action']}"
        if case.get("params"):
            name += "[" + ",".join(f"{k}={v}" for k, v in sorted(case["params"].items())) + "]"
        settings = dict(self.settings)
        settings.update({k: case[k] for k in ("samples", "seed", "tol") if k in case})
        start = time.time()
        try:
            setup = systems_catalog.load(case["system"], case.get("params"),
                                         momentum_box=settings["momentum_box"], tol=settings["tol"])
            report = AnalysisRunner(setup, case["action"], settings).run()
        except DiracKitError as e:
            logger.error(f"{name}: {type(e).__name__}: {e}")
            return TestResult(name, "ERROR", time.time() - start, {"error": str(e)})
        duration = time.time() - start
        failed = [c["name"] for c in report["checks"] if c["status"] == "fail"]
        status = "FAIL" if report_failed(report) else "PASS"
        logger.info(f"{name}: {status} ({duration:.2f}s)")
        return TestResult(name, status, duration, {"summary": report["summary"], "failed_checks": failed})

    def _run_criterion(self, criterion: str) -> TestResult:
        start = time.time()
        verifier = self._verifier()
        try:
            summary = verifier.run_all(criterion)
        except DiracKitError as e:
            logger.error(f"{criterion}: {e}")
            return TestResult(f"acceptance/{criterion}", "ERROR", time.time() - start, {"error": str(e)})
        result = summary["criteria"][0]
        status = "PASS" if result["status"] == "pass" else "FAIL"
        failed = [d for d in result["details"] if not d["ok"]]
        return TestResult(f"acceptance/{criterion}", status, time.time() - start, {"failed": failed})

    def _verifier(self) -> AcceptanceVerifier:
        # shared so the acceptance criteria reuse cached analyses
        if self.acceptance is None:
            self.acceptance = AcceptanceVerifier(self.settings)
        return self.acceptance

    def run_suite(self, suite: str) -> List[TestResult]:
        """运行一个测试集"""
        logger.info(f"Running {suite} tests...")
        cases = self.config["suites"].get(suite)
        if cases is None:
            raise KeyError(f"unknown suite {suite!r} (available: {list(self.config['suites'])})")
        return [self._run_single_test(case) for case in cases]

    def run_all_tests(self, suites: Optional[List[str]] = None) -> Dict[str, Any]:
        """运行所有测试"""
        logger.info("Starting regression test suite...")
        self.start_time = datetime.now()

        for suite in suites or list(self.config["suites"]):
            self.results.extend(self.run_suite(suite))

        self.end_time = datetime.now()

        summary = self._generate_summary()
        self._generate_detailed_report(summary)
        return summary

    def _generate_summary(self) -> Dict[str, Any]:
        """生成测试摘要"""
        total_tests = len(self.results)
        passed = sum(1 for r in self.results if r.status == "PASS")
        failed = sum(1 for r in self.results if r.status == "FAIL")
        errors = sum(1 for r in self.results if r.status == "ERROR")

        start, end = self.start_time or datetime.now(), self.end_time or datetime.now()
        summary = {
            "total_tests": total_tests,
            "passed": passed,
            "failed": failed,
            "errors": errors,
            "pass_rate": passed / total_tests * 100 if total_tests > 0 else 0,
            "duration": (end - start).total_seconds(),
            "start_time": start.isoformat(),
            "end_time": end.isoformat(),
        }

        logger.info("=" * 60)
        logger.info("REGRESSION TEST SUMMARY")
        logger.info("=" * 60)
        logger.info(f"Total Tests: {total_tests}")
        logger.info(f"Passed: {passed}")
        logger.info(f"Failed: {failed}")
        logger.info(f"Errors: {errors}")
        logger.info(f"Pass Rate: {summary['pass_rate']:.1f}%")
        logger.info(f"Duration: {summary['duration']:.1f} seconds")
        logger.info("=" * 60)

        return summary

    def _generate_detailed_report(self, summary: Dict[str, Any]):
        """生成详细报告"""
        report = {
            "summary": summary,
            "test_results": [
                {
                    "name": r.name,
                    "status": r.status,
                    "duration": r.duration,
                    "timestamp": r.timestamp.isoformat(),
                    "details": r.details,
                }
                for r in self.results
            ],
            "configuration": self.config,
        }

        report_file = RESULTS_DIR / f"regression_report_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
        with open(report_file, 'w') as f:
            json.dump(report, f, indent=2)

        logger.info(f"Detailed report saved to {report_file}")


def main():
    """主函数"""
    parser = argparse.ArgumentParser(description="dirac-kit Regression Test Runner")
    parser.add_argument("--config", help="Configuration file path")
    parser.add_argument("--suite", nargs="+", help="Suites to run (default: all)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose output")

    args = parser.parse_args()

    # 创建运行器
    runner = RegressionRunner(args.config, args.verbose)

    # 运行测试
    summary = runner.run_all_tests(args.suite)

    # 输出结果
    if summary["failed"] > 0 or summary["errors"] > 0:
        sys.exit(1)
    else:
        sys.exit(0)


if __name__ == "__main__":
    main()
