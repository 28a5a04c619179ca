import logging
import sys
import time
import json
from datetime import datetime
from typing import Dict, Any, Optional
from functools import wraps

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def configure_logging(level: str = "INFO", log_file: Optional[str] = None):
    """Configure logging; diagnostics go to stderr so stdout stays machine-readable"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


class MetricsCollector:
    """Collect and store check metrics"""

    def __init__(self):
        self.reset()

    def reset(self):
        self.metrics = {
            'checks_total': 0,
            'checks_by_name': {},
            'check_results': [],
            'response_times': [],
            'errors': [],
        }

    def increment_check(self, name: str):
        """Increment check counter"""
        self.metrics['checks_total'] += 1
        if name not in self.metrics['checks_by_name']:
            self.metrics['checks_by_name'][name] = 0
        self.metrics['checks_by_name'][name] += 1

    def record_response_time(self, name: str, duration: float):
        self.metrics['response_times'].append({
            'check': name,
            'duration': duration,
            'timestamp': datetime.now().isoformat()
        })

    def record_error(self, name: str, error: str, kind: str):
        """Record error"""
        self.metrics['errors'].append({
            'check': name,
            'error': error,
            'kind': kind,
            'timestamp': datetime.now().isoformat()
        })

    def record_suite_result(self, suite: str, passed: int, failed: int):
        """Record a suite outcome for pass-rate tracking"""
        self.metrics['check_results'].append({
            'suite': suite,
            'passed': passed,
            'failed': failed,
            'timestamp': datetime.now().isoformat()
        })

    def get_metrics(self) -> Dict[str, Any]:
        return self.metrics.copy()

    def get_summary(self) -> Dict[str, Any]:
        """Get metrics summary"""
        response_times = [rt['duration'] for rt in self.metrics['response_times']]
        avg_response_time = sum(response_times) / len(response_times) if response_times else 0
        passed = sum(r['passed'] for r in self.metrics['check_results'])
        failed = sum(r['failed'] for r in self.metrics['check_results'])

        return {
            'total_checks': self.metrics['checks_total'],
            'checks_by_name': self.metrics['checks_by_name'],
            'average_response_time': round(avg_response_time, 3),
            'total_errors': len(self.metrics['errors']),
            'suite_checks_passed': passed,
            'suite_checks_failed': failed,
        }


# Global metrics collector
metrics_collector = MetricsCollector()


def monitor_check(name: str):
    """Decorator to time a check and count its errors"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.time()

            try:
                metrics_collector.increment_check(name)
                result = func(*args, **kwargs)

                duration = time.time() - start_time
                metrics_collector.record_response_time(name, duration)

                logger.info(f"Check {name} completed in {duration:.3f}s")
                return result

            except Exception as e:
                duration = time.time() - start_time
                metrics_collector.record_error(name, str(e), type(e).__name__)
                logger.error(f"Check {name} failed after {duration:.3f}s: {e}")
                raise

        return wrapper
    return decorator


def log_suite_report(report: Dict[str, Any]):
    """Log a suite report for the audit trail"""
    log_entry = {
        'timestamp': datetime.now().isoformat(),
        'suite': report.get('suite'),
        'checks_passed': report.get('checks_passed', 0),
        'checks_failed': report.get('checks_failed', 0),
        'witnesses': len(report.get('witnesses', [])),
    }
    logger.info(f"Suite logged: {json.dumps(log_entry)}")
    metrics_collector.record_suite_result(
        log_entry['suite'], log_entry['checks_passed'], log_entry['checks_failed']
    )


def get_health_status() -> Dict[str, Any]:
    """Get comprehensive health status"""
    return {
        'status': 'healthy',
        'timestamp': datetime.now().isoformat(),
        'metrics': metrics_collector.get_summary(),
    }
