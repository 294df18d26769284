from typing import Callable

from mpire import WorkerPool


class SolveHandler:
    """Runs independent solves in worker processes, preserving input order."""

    def __init__(self, n_workers: int = 1):
        self.n_workers = max(1, n_workers)
        # a single worker runs inline; no pool is spawned
        self.worker_pool = WorkerPool(n_jobs=self.n_workers) if self.n_workers > 1 else None

    def execute_batch(self, func: Callable, args_list: list) -> list:
        """Execute func once per argument tuple; results follow args_list order"""
        if self.worker_pool is None:
            return [func(*args) for args in args_list]
        return list(
            self.worker_pool.map(func, args_list, iterable_len=len(args_list))
        )

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def close(self):
        if self.worker_pool is not None:
            self.worker_pool.terminate()
            self.worker_pool = None
