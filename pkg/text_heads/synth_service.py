"""
Service component generating a synthetic court-record style corpus

label 1 texts carry planted illegal-behavior markers amid neutral filler,
label 0 texts are built from the same filler alone
"""
import logging
from pathlib import Path
from typing import List, Union

from .autograd import Rng
from .constants import LABEL_ILLEGAL, LABEL_LEGAL
from .exceptions import SizeError
from .pipeline_service import PipelineService
from .schemes import Dataset, Example


__all__ = ['SynthService']


logger = logging.getLogger(__name__)


MIN_SYNTH_SIZE = 10

ILLEGAL_MARKERS = ('诈骗', '盗窃', '抢劫', '贩毒', '赌博', '走私', '勒索', '伪造')

# none of these share a character with the markers
SUBJECTS = ('被告人某某', '原告某某', '当事人某某', '某公司', '某某夫妇', '员工某某')
PLACES = ('在本市某区', '在某小区', '在某商场', '在某村', '在办公室', '在某街道')
FILLER = (
    '签订合同', '购买房屋', '租赁店面', '借款三万元', '按时归还', '达成协议',
    '双方协商', '经法院审理', '查明事实', '支付工资', '调解邻里纠纷', '履行义务',
    '正常经营', '开设商店', '出售蔬菜水果', '驾驶车辆回家', '参加会议', '办理手续',
    '提交材料', '缴纳费用', '申请登记', '出具收据', '共同生活', '照顾老人'
)
DATES = ('2018年3月', '2019年7月', '2020年1月', '2021年5月', '2022年9月', '2023年11月')


class SynthService:

    @classmethod
    def generate(cls, size: int, seed: int) -> Dataset:
        """
        balanced labels (50/50, odd sizes off by one), deterministic per seed
        """
        if size < MIN_SYNTH_SIZE:
            raise SizeError(f'Synthetic corpus needs at least {MIN_SYNTH_SIZE} examples, got {size}')
        rng = Rng(seed)
        labels = rng.shuffle([LABEL_ILLEGAL if idx % 2 else LABEL_LEGAL for idx in range(size)])
        return [Example(label=label, text=cls._text(label, rng)) for label in labels]

    @classmethod
    def gen_synth(cls, size: int, seed: int, out: Union[str, Path]) -> Dataset:
        dataset = cls.generate(size, seed)
        PipelineService.write_dataset(out, dataset)
        logger.info(f'Wrote {size} synthetic examples to {out}')
        return dataset

    @classmethod
    def _text(cls, label: int, rng: Rng) -> str:
        clauses: List[str] = [rng.choice(FILLER) for _ in range(rng.integers(2, 5))]
        if label == LABEL_ILLEGAL:
            for _ in range(rng.integers(1, 3)):
                marker = rng.choice(ILLEGAL_MARKERS)
                clauses.insert(rng.integers(0, len(clauses) + 1), f'涉嫌{marker}')
        return f'{rng.choice(SUBJECTS)}于{rng.choice(DATES)}{rng.choice(PLACES)}{"，".join(clauses)}。'
