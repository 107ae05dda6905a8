"""
训练与迁移学习
Training and Transfer Learning

L1 损失 + Adam；去噪默认单周期学习率，超分辨率默认恒定学习率。
网络输入按输入立方体最大值归一化（目标使用同一缩放系数），
训练结果为验证 L1 最低的检查点。所有随机性来自种子派生的独立随机流：
划分、打乱、增强、mixup 各一条，因此同一种子得到逐位相同的结果。
另提供留一图像交叉验证。
"""

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from augment import AugmentPolicy, TrainingPair, augment_pair, mixup, sample_mixup_lambda, worker_rng
from utils.exceptions import ConfigError, DataError, ParamError
from . import functional as F
from .checkpoint import Checkpoint
from .models import BaseModel, ModelFactory
from .optim import Adam, one_cycle_lr
from .tensor import Tensor, no_grad

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ['epoch', 'train_l1', 'val_l1', 'lr']
SCHEDULERS = ('one_cycle', 'constant')
DEFAULT_MAX_LR = {'denoise': 5e-4, 'sr': 1e-4}
DEFAULT_SCHEDULER = {'denoise': 'one_cycle', 'sr': 'constant'}
CV_COLUMNS = ['fold', 'held_out', 'best_epoch', 'val_l1']


@dataclass(frozen=True)
class TrainConfig:
    """训练配置（Adam β1=0.9, β2=0.999, ε=1e-8，L1 损失）"""

    epochs: int = 20
    batch_size: int = 64
    max_lr: float = 5e-4
    scheduler: str = 'one_cycle'
    seed: int = 0
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.epochs < 0:
            raise ParamError("训练轮数必须 ≥ 0", {'epochs': self.epochs})
        if self.batch_size < 1:
            raise ParamError("批大小必须 ≥ 1", {'batch_size': self.batch_size})
        if not self.max_lr > 0:
            raise ParamError("最大学习率必须为正", {'max_lr': self.max_lr})
        if self.scheduler not in SCHEDULERS:
            raise ParamError("不支持的学习率调度", {'scheduler': self.scheduler})
        if not 0.0 <= self.val_fraction < 1.0:
            raise ParamError("验证集比例必须在 [0, 1)", {'val_fraction': self.val_fraction})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainResult:
    """最佳验证检查点与逐轮损失记录"""

    checkpoint: Checkpoint
    history: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=HISTORY_COLUMNS))

    @property
    def best_val_l1(self) -> float:
        if self.history.empty:
            return float('nan')
        return float(self.history['val_l1'].min())


def leave_one_out_folds(n: int) -> List[Tuple[List[int], List[int]]]:
    """
    留一图像交叉验证划分

    Raises:
        DataError: n < 2
    """
    if n < 2:
        raise DataError("留一交叉验证至少需要 2 幅图像", {'n': n})
    return [([j for j in range(n) if j != i], [i]) for i in range(n)]


def split_train_val(pairs: Sequence[TrainingPair], val_fraction: float,
                    rng: np.random.Generator) -> Tuple[List[TrainingPair], List[TrainingPair]]:
    """按比例随机划分训练/验证集；只有一个样本时以训练集兼作验证集"""
    n = len(pairs)
    if n < 2 or val_fraction == 0:
        return list(pairs), list(pairs)
    n_val = min(n - 1, max(1, int(round(val_fraction * n))))
    order = rng.permutation(n)
    val = [pairs[i] for i in sorted(order[:n_val])]
    train = [pairs[i] for i in sorted(order[n_val:])]
    return train, val


def _scale_of(pair: TrainingPair) -> float:
    peak = float(np.max(pair.inp.data))
    return peak if peak > 0 else 1.0


def _denoise_arrays(pairs: Sequence[TrainingPair]) -> Tuple[np.ndarray, np.ndarray]:
    inputs, targets = [], []
    for pair in pairs:
        scale = _scale_of(pair)
        inputs.append(pair.inp.pixels() / scale)
        targets.append(pair.target.pixels() / scale)
    return np.concatenate(inputs), np.concatenate(targets)


def _sr_arrays(pairs: Sequence[TrainingPair]) -> Tuple[np.ndarray, np.ndarray]:
    shapes = {pair.shape for pair in pairs}
    if len(shapes) != 1:
        raise ParamError("超分辨率批内样本尺寸不一致，请设置 crop_size", {'shapes': sorted(map(str, shapes))})
    inputs = np.stack([pair.inp.data.transpose(2, 0, 1) / _scale_of(pair) for pair in pairs])
    targets = np.stack([pair.target.data.transpose(2, 0, 1) / _scale_of(pair) for pair in pairs])
    return inputs, targets


def _crop_to(pred, targets: np.ndarray):
    """超分辨率输出 s·n 裁到目标尺寸（目标可能因增强或非整除尺寸而更小）"""
    height, width = targets.shape[-2:]
    if pred.shape[-2:] == (height, width):
        return pred
    return pred[:, :, :height, :width]


def _check_dataset(model: BaseModel, pairs: Sequence[TrainingPair]) -> None:
    for pair in pairs:
        if pair.inp.bands != model.bands():
            raise ConfigError("数据波段数与网络不一致", {'data': pair.inp.bands, 'model': model.bands()})
        if model.task == 'sr' and pair.scale != model.config.scale:
            raise ConfigError("数据放大倍数与网络不一致", {'data': pair.scale, 'model': model.config.scale})
        if model.task == 'denoise' and pair.scale != 1:
            raise ConfigError("去噪网络需要同尺寸样本对", {'scale': pair.scale})


class _Batches:
    """每轮的增强、mixup、打乱与分批"""

    def __init__(self, model: BaseModel, cfg: TrainConfig, policy: AugmentPolicy):
        self.task = model.task
        self.cfg = cfg
        self.policy = policy
        self.shuffle_rng = worker_rng(cfg.seed, 1)
        self.augment_rng = worker_rng(cfg.seed, 2)
        self.mixup_rng = worker_rng(cfg.seed, 3)

    def epoch_pairs(self, pairs: Sequence[TrainingPair]) -> List[TrainingPair]:
        augmented = [augment_pair(pair, self.policy, self.augment_rng) for pair in pairs]
        mixed = []
        for pair in augmented:
            use_mixup = self.mixup_rng.random() < self.policy.p_mixup
            partner = augmented[int(self.mixup_rng.integers(len(augmented)))]
            lam = sample_mixup_lambda(self.mixup_rng, self.policy.mixup_alpha)
            if use_mixup and partner.shape == pair.shape:
                pair = mixup(pair, partner, lam)
            mixed.append(pair)
        return mixed

    def batches(self, pairs: Sequence[TrainingPair]):
        if self.task == 'denoise':
            inputs, targets = _denoise_arrays(pairs)
        else:
            inputs, targets = _sr_arrays(pairs)
        order = self.shuffle_rng.permutation(len(inputs))
        for start in range(0, len(order), self.cfg.batch_size):
            index = order[start:start + self.cfg.batch_size]
            yield inputs[index], targets[index]

    def steps_per_epoch(self, pairs: Sequence[TrainingPair]) -> int:
        n = sum(pair.inp.height * pair.inp.width for pair in pairs) if self.task == 'denoise' else len(pairs)
        return -(-n // self.cfg.batch_size)


def evaluate_l1(model: BaseModel, pairs: Sequence[TrainingPair], batch_size: int = 256) -> float:
    """评估模式下的平均 L1（按样本数加权）"""
    arrays = _denoise_arrays(pairs) if model.task == 'denoise' else None
    total, count = 0.0, 0
    if arrays is not None:
        inputs, targets = arrays
        for start in range(0, len(inputs), batch_size):
            pred = model.predict(inputs[start:start + batch_size])
            total += float(np.abs(pred - targets[start:start + batch_size]).sum())
            count += pred.size
    else:
        for pair in pairs:
            inputs, targets = _sr_arrays([pair])
            pred = _crop_to(model.predict(inputs), targets)
            total += float(np.abs(pred - targets).sum())
            count += pred.size
    return total / count


def train(model: BaseModel, dataset: Sequence[TrainingPair], cfg: TrainConfig,
          policy: Optional[AugmentPolicy] = None, val: Optional[Sequence[TrainingPair]] = None,
          provenance: Optional[Dict[str, Any]] = None) -> TrainResult:
    """
    训练网络

    Args:
        model: 待训练网络（初始权重即 epochs = 0 时的结果）
        dataset: 训练样本对
        cfg: 训练配置
        policy: 增强策略，None 表示不增强
        val: 验证集，None 时按 cfg.val_fraction 自动划分
        provenance: 写入检查点的来源信息

    Returns:
        TrainResult: 最佳验证检查点与逐轮损失

    Raises:
        DataError: 数据集为空
        ConfigError: 数据与网络结构不一致
    """
    if not dataset:
        raise DataError("训练数据集为空")
    _check_dataset(model, dataset)
    policy = policy or AugmentPolicy.identity()

    if val is None:
        train_pairs, val_pairs = split_train_val(dataset, cfg.val_fraction, worker_rng(cfg.seed, 0))
    else:
        train_pairs, val_pairs = list(dataset), list(val)
        _check_dataset(model, val_pairs)

    provenance = dict(provenance or {})
    provenance.update({'train': cfg.to_dict(), 'n_train': len(train_pairs), 'n_val': len(val_pairs)})
    optimizer = Adam(model)
    best = Checkpoint.from_model(model, optimizer.state_dict(), 0, 0, provenance)
    history = pd.DataFrame(columns=HISTORY_COLUMNS)
    if cfg.epochs == 0:
        logger.info("训练轮数为 0，返回初始化权重")
        return TrainResult(best, history)

    batches = _Batches(model, cfg, policy)
    total_steps = cfg.epochs * batches.steps_per_epoch(train_pairs)
    logger.info(f"开始训练 {model.arch}：{len(train_pairs)} 个训练样本，{len(val_pairs)} 个验证样本，"
                f"共 {total_steps} 步")
    start_time = time.time()

    rows = []
    best_val = float('inf')
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        loss_sum, loss_count, lr = 0.0, 0, cfg.max_lr
        for inputs, targets in batches.batches(batches.epoch_pairs(train_pairs)):
            lr = one_cycle_lr(min(step, total_steps - 1), total_steps, cfg.max_lr) \
                if cfg.scheduler == 'one_cycle' else cfg.max_lr
            pred = model(Tensor(inputs.astype(model.dtype)))
            if model.task == 'sr':
                pred = _crop_to(pred, targets)
            loss = F.l1_loss(pred, Tensor(targets.astype(model.dtype)))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step(lr)
            loss_sum += loss.item() * len(inputs)
            loss_count += len(inputs)
            step += 1

        train_l1 = loss_sum / loss_count
        with no_grad():
            val_l1 = evaluate_l1(model, val_pairs)
        rows.append({'epoch': epoch, 'train_l1': train_l1, 'val_l1': val_l1, 'lr': lr})
        logger.info(f"epoch {epoch}/{cfg.epochs} train_l1={train_l1:.6f} val_l1={val_l1:.6f} lr={lr:.3e}")
        if val_l1 < best_val:
            best_val = val_l1
            best = Checkpoint.from_model(model, optimizer.state_dict(), optimizer.t, epoch, provenance)

    history = pd.DataFrame(rows, columns=HISTORY_COLUMNS)
    logger.info(f"训练完成，耗时 {time.time() - start_time:.2f} 秒，最佳验证 L1 {best_val:.6f}（epoch {best.epoch}）")
    return TrainResult(best, history)


def fine_tune(ckpt: Checkpoint, dataset: Sequence[TrainingPair], cfg: TrainConfig,
              policy: Optional[AugmentPolicy] = None,
              val: Optional[Sequence[TrainingPair]] = None) -> TrainResult:
    """
    从已有检查点继续训练全部权重（优化器矩重置）

    Raises:
        ConfigError: 检查点结构与数据的波段数或放大倍数不一致
    """
    model = ckpt.build_model()
    if dataset:
        _check_dataset(model, dataset)
    provenance = {
        'parent_sha256': ckpt.sha256(),
        'parent_epoch': ckpt.epoch,
        'optimizer_moments': 'reset'
    }
    logger.info(f"迁移学习：父检查点 {provenance['parent_sha256'][:12]}")
    return train(model.train(), dataset, cfg, policy, val, provenance)


def cross_validate(make_model: Callable[[], BaseModel], pairs: Sequence[TrainingPair], cfg: TrainConfig,
                   policy: Optional[AugmentPolicy] = None) -> pd.DataFrame:
    """
    留一图像交叉验证：每折用其余图像训练新网络，以留出图像作验证集

    Args:
        make_model: 每折调用一次，返回初始化后的网络
        pairs: 全部样本对（每个元素对应一幅图像）
        cfg: 训练配置
        policy: 增强策略

    Returns:
        pd.DataFrame: 每折一行（fold, held_out, best_epoch, val_l1）

    Raises:
        DataError: 样本对少于 2 个
    """
    rows = []
    for fold, (train_idx, val_idx) in enumerate(leave_one_out_folds(len(pairs))):
        held = [pairs[i] for i in val_idx]
        result = train(make_model(), [pairs[i] for i in train_idx], cfg, policy, held,
                       {'cv_fold': fold, 'held_out': val_idx[0]})
        with no_grad():
            val_l1 = evaluate_l1(result.checkpoint.build_model(), held)
        rows.append({'fold': fold, 'held_out': val_idx[0], 'best_epoch': result.checkpoint.epoch, 'val_l1': val_l1})
        logger.info(f"交叉验证第 {fold + 1}/{len(pairs)} 折：val_l1={val_l1:.6f}")
    return pd.DataFrame(rows, columns=CV_COLUMNS)


def build_model(task: str, bands: int, scale: int = 2, **arch_params) -> BaseModel:
    """按任务构建默认结构（arch_params 覆盖结构配置字段）"""
    arch = ModelFactory.arch_for_task(task)
    config = {'in_len': bands} if task == 'denoise' else {'bands': bands, 'scale': scale}
    config.update(arch_params)
    return ModelFactory.create_model(arch, config)
