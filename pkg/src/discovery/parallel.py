"""Order-preserving worker pool for per-object passes."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    desc: Optional[str] = None,
    progress: bool = False,
) -> List[R]:
    """
    Apply `fn` to every item, returning results in input order.

    With `threads` > 1 the calls run on a thread pool; callers merge the
    results sequentially, so the outcome is identical for any thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, leave=False, disable=not progress)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(
            tqdm(
                pool.map(fn, items),
                total=len(items),
                desc=desc,
                leave=False,
                disable=not progress,
            )
        )
