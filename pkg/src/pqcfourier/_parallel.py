from concurrent.futures import ThreadPoolExecutor


def map_ordered(fn, items, workers: int = 1) -> list:
    """``[fn(i) for i in items]`` on up to ``workers`` threads, results in
    input order whatever the completion order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
