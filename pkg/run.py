#!/usr/bin/env python3
"""
Main entry point for stokes-summa
Sets up logging and signal handling, then dispatches to the command-line front end
"""

import os
import sys
import gc
import signal
import logging

import psutil

from settings import configure_logging, thread_limit, VERSION

logger = logging.getLogger("run")


def _memory_mb():
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


# Define signal handlers for graceful shutdown
def handle_sigterm(signum, frame):
    """Handle SIGTERM signal for graceful shutdown"""
    logger.info("Received SIGTERM, shutting down gracefully")
    sys.exit(0)


def handle_sigint(signum, frame):
    """Handle SIGINT signal for graceful shutdown"""
    logger.info("Received SIGINT, shutting down gracefully")
    sys.exit(130)


def handle_sigusr1(signum, frame):
    """Handle SIGUSR1 signal: drop kernel tables and collect garbage"""
    logger.warning("Received SIGUSR1 - clearing kernel caches")
    import kernels
    for builder in (kernels.kernel_closed_form, kernels._case1_kernel, kernels._case2_kernel):
        builder.cache_clear()
    gc.collect()
    logger.info(f"Memory usage after collection: {_memory_mb():.2f} MB")


def handle_sigusr2(signum, frame):
    """Handle SIGUSR2 signal for stats reporting"""
    logger.info("Received SIGUSR2 - producing stats report")
    import kernels
    for name, builder in (("closed", kernels.kernel_closed_form), ("case1", kernels._case1_kernel),
                          ("case2", kernels._case2_kernel)):
        logger.info(f"Kernel cache {name}: {builder.cache_info()}")
    process = psutil.Process(os.getpid())
    logger.info(f"Memory usage: {_memory_mb():.2f} MB")
    logger.info(f"Threads: {process.num_threads()}")


def install_signal_handlers():
    signal.signal(signal.SIGTERM, handle_sigterm)
    signal.signal(signal.SIGINT, handle_sigint)
    # not available on every platform
    if hasattr(signal, 'SIGUSR1'):
        signal.signal(signal.SIGUSR1, handle_sigusr1)
        signal.signal(signal.SIGUSR2, handle_sigusr2)


def run_cli(argv=None):
    """Run one command and return its exit status"""
    configure_logging()
    install_signal_handlers()

    logger.info(f"Starting stokes-summa {VERSION} with PID {os.getpid()}")
    logger.info(f"Python version: {sys.version.split()[0]}, worker threads: {thread_limit()}")

    import cli
    status = cli.main(argv)

    logger.info(f"Finished with status {status}; peak memory {_memory_mb():.2f} MB")
    return status


if __name__ == "__main__":
    sys.exit(run_cli())
