"""
搜索模型异常体系

输入校验类错误同时继承 ValueError，运行期失败同时继承 RuntimeError，
调用方既可以按具体类型捕获，也可以按标准库类型捕获。
"""


class SearchModelError(Exception):
    """所有搜索模型异常的基类"""


class InvalidCameraError(SearchModelError, ValueError):
    """相机参数越界：高度非正或视场角不在 (0, π) 内"""


class InvalidAreaError(SearchModelError, ValueError):
    """搜索区域尺寸或重叠率非法"""


class InvalidDistributionError(SearchModelError, ValueError):
    """目标先验分布定义非法"""


class DegeneratePosteriorError(SearchModelError, RuntimeError):
    """贝叶斯更新的归一化因子为 0，观测与概率图互相矛盾"""


class DivergentExpectationError(SearchModelError, ValueError):
    """e_d = 1 时期望检测时间发散"""


class PlannerStuckError(SearchModelError, RuntimeError):
    """规划器没有任何合法的下一格"""


class InvalidSpeedError(SearchModelError, ValueError):
    """速度为负"""


class InvalidTrajectoryError(SearchModelError, ValueError):
    """轨迹定义非法（如路径长度非零但速度为 0）"""
