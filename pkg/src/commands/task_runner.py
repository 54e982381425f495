from concurrent.futures import ThreadPoolExecutor
import logging

logger = logging.getLogger(__name__)


class TaskRunner:
    """
    독립적인 작업들을 스레드 풀에서 실행합니다.

    결과는 입력 순서대로 돌려주며, 작업 중 하나라도 예외가 나면
    로그를 남긴 뒤 같은 예외를 다시 발생시킵니다.
    """

    def __init__(self, workers=1):
        self.workers = max(1, int(workers))

    def _wrap(self, task):
        def run(item):
            try:
                return task(item)
            except Exception as e:
                logger.error("task failed for %r: %s", item, e)
                raise
        return run

    def map(self, task, items):
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [self._wrap(task)(item) for item in items]
        # 작업 스레드 실행
        with ThreadPoolExecutor(max_workers=min(self.workers, len(items))) as pool:
            return list(pool.map(self._wrap(task), items))

    @staticmethod
    def run(task, items, workers=1):
        return TaskRunner(workers).map(task, items)
