"""Command-line interface: pretrain, advtrain, eval and inspect-negatives"""

import argparse
from pathlib import Path
from typing import Any, Callable

import numpy as np
from loguru import logger

from kgecore import __version__
from kgecore.adversarial.generator import generator_distribution
from kgecore.adversarial.trainer import adversarial_train, reward
from kgecore.core.config_manager import ConfigManager
from kgecore.core.event_bus import get_event_bus
from kgecore.core.model_registry import build_model, require_role
from kgecore.data.filter_index import build_filter_index
from kgecore.data.loader import SPLITS, Triple, TripleStore, load_dataset
from kgecore.data.sampling import Side, compute_bern_stats, sample_candidates
from kgecore.evaluation.ranking import EvalReport, evaluate
from kgecore.exceptions import ConfigError, KGECoreError
from kgecore.models.kinds import ModelKind
from kgecore.schemas.config import PRESETS, RunConfig
from kgecore.storage.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from kgecore.storage.curves import CurveWriter, write_generated
from kgecore.storage.logger import LogConfig
from kgecore.training.pretrain import pretrain

CURVE_FILE = "curve.tsv"
BEST_FILE = "best.kge"
FINAL_FILE = "final.kge"
GENERATOR_FILE = "generator.kge"
GENERATED_FILE = "generated_negatives.tsv"

# 写入预训练检查点、对抗阶段沿用的 TrainConfig 字段
FROZEN_TRAIN_KEYS = ("gamma",)

# 命令行参数名 -> TrainConfig 字段；--epochs / --eval-every 依子命令映射到不同阶段
_TRAIN_FLAGS = {
    "k": "k",
    "gamma": "gamma",
    "norm": "norm",
    "reg_lambda": "reg_lambda",
    "ns": "ns",
    "ns_pretrain": "ns_pretrain",
    "batches_per_epoch": "batches_per_epoch",
    "seed": "seed",
    "precision": "precision",
    "valid_sample": "valid_sample",
}
_STAGE_FLAGS = {
    "pretrain": {"epochs": "pretrain_epochs", "eval_every": "eval_every_pretrain"},
    "advtrain": {"epochs": "adv_epochs", "eval_every": "eval_every_adv"},
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML 配置文件路径")
    p.add_argument("--dataset", help="数据集目录（含 train.txt / valid.txt / test.txt）")
    p.add_argument("--seed", type=int, help="随机种子")
    p.add_argument("--debug", action="store_true", help="输出调试日志")


def _add_training(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help=f"超参数预设，可选: {', '.join(sorted(PRESETS))}")
    p.add_argument("--model", help="模型类型: TransE / TransD / DistMult / ComplEx")
    p.add_argument("--k", type=int, help="嵌入维度")
    p.add_argument("--gamma", type=float, help="间隔 γ")
    p.add_argument("--norm", choices=["l1", "l2"], help="平移模型距离范数")
    p.add_argument("--lambda", dest="reg_lambda", type=float, help="L2 正则权重 λ")
    p.add_argument("--ns", type=int, help="对抗阶段候选负样本数")
    p.add_argument("--ns-pretrain", type=int, help="log-softmax 预训练负样本数")
    p.add_argument("--epochs", type=int, help="训练轮数")
    p.add_argument("--batches-per-epoch", type=int, help="每轮 mini-batch 数")
    p.add_argument("--eval-every", type=int, help="验证间隔（轮）")
    p.add_argument("--valid-sample", type=int, help="早停使用的验证三元组上限")
    p.add_argument("--precision", choices=["f32", "f64"], help="参数浮点精度")
    p.add_argument("--out", help="输出目录")


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="kgecore", description="KGECore - 知识图谱嵌入预训练与对抗负采样训练"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pretrain", help="预训练一个嵌入模型")
    _add_common(p)
    _add_training(p)

    p = sub.add_parser("advtrain", help="用生成器提供的负样本对抗训练判别器")
    _add_common(p)
    _add_training(p)
    p.add_argument("--generator", help="生成器类型（须与 --gen-ckpt 一致）")
    p.add_argument("--gen-ckpt", required=True, help="预训练生成器检查点")
    p.add_argument("--dis-ckpt", required=True, help="预训练判别器检查点")

    p = sub.add_parser("eval", help="在过滤设置下评估检查点")
    _add_common(p)
    p.add_argument("--ckpt", required=True, help="检查点文件")
    p.add_argument("--split", choices=list(SPLITS), default="test", help="评估划分")

    p = sub.add_parser("inspect-negatives", help="对比均匀候选与生成器偏好的负样本")
    _add_common(p)
    p.add_argument("--gen-ckpt", required=True, help="生成器检查点")
    p.add_argument("--dis-ckpt", help="判别器检查点（可选，用于给出奖励）")
    p.add_argument("--n-examples", type=int, default=10, help="展示的正样本数")
    p.add_argument("--ns", type=int, default=20, help="每个正样本的候选数")
    p.add_argument("--top", type=int, default=5, help="每列展示的实体数")
    return parser


def collect_overrides(args: argparse.Namespace, stage: str | None = None) -> dict[str, Any]:
    """把命令行中显式给出的参数转换为嵌套配置字典（未给出的不出现）"""
    overrides: dict[str, Any] = {}
    for key in ("dataset", "preset", "model", "generator", "gen_ckpt", "dis_ckpt", "out"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value

    train: dict[str, Any] = {}
    for flag, field_name in _TRAIN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            train[field_name] = value
    for flag, field_name in _STAGE_FLAGS.get(stage, {}).items():
        value = getattr(args, flag, None)
        if value is not None:
            train[field_name] = value
    if train:
        overrides["train"] = train
    if getattr(args, "debug", False):
        overrides["logging"] = {"level": "DEBUG"}
    return overrides


def _load_config(
    args: argparse.Namespace, stage: str | None = None, inherited: dict[str, Any] | None = None
) -> ConfigManager:
    """
    加载配置

    Args:
        inherited: 从预训练检查点继承的训练超参数，优先于预设与 YAML，低于命令行
    """
    overrides = collect_overrides(args, stage)
    if inherited:
        overrides["train"] = {**inherited, **overrides.get("train", {})}
    manager = ConfigManager(args.config)
    manager.load(overrides)
    return manager


def pretrain_hyperparameters(ckpt: Checkpoint) -> dict[str, Any]:
    """预训练检查点中记录的、对抗阶段沿用的超参数（旧检查点可能没有）"""
    meta = ckpt.header.metadata
    return {key: meta[key] for key in FROZEN_TRAIN_KEYS if key in meta}


def _require_dataset(config: RunConfig) -> Path:
    if config.dataset is None:
        raise ConfigError("No dataset given; use --dataset or set dataset in the config file")
    return config.dataset


def _prepare_out_dir(manager: ConfigManager) -> Path:
    """创建输出目录、把日志写入其中并写出配置回显"""
    config = manager.config
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    LogConfig(
        log_dir=out,
        level=config.logging.level,
        file_name=config.logging.file,
        rotation=config.logging.rotation,
        retention=config.logging.retention,
    ).setup()
    manager.write_echo(out)
    return out


def _print_report(report: EvalReport | None, label: str) -> None:
    if report is None:
        return
    for line in report.summary_lines(label):
        print(line)


def cmd_pretrain(args: argparse.Namespace) -> int:
    """预训练：写出 best.kge、final.kge 与 curve.tsv"""
    manager = _load_config(args, "pretrain")
    config = manager.config
    if config.model is None:
        raise ConfigError("No model given; use --model or --preset")
    data = load_dataset(_require_dataset(config))

    out = _prepare_out_dir(manager)
    cfg = config.train
    bus = get_event_bus()
    curve = CurveWriter(out / CURVE_FILE)
    bus.on("train:eval", curve.on_eval)
    try:
        result = pretrain(
            config.model, data, cfg, np.random.default_rng(cfg.seed), event_bus=bus
        )
    finally:
        bus.off("train:eval", curve.on_eval)

    meta = {
        "stage": "pretrain",
        "seed": cfg.seed,
        "best_epoch": result.report.best_epoch,
        **{key: getattr(cfg, key) for key in FROZEN_TRAIN_KEYS},
    }
    save_checkpoint(out / BEST_FILE, result.best, data.vocab, meta)
    save_checkpoint(out / FINAL_FILE, result.final, data.vocab, {**meta, "epoch": cfg.pretrain_epochs})
    _print_report(result.test_report, "test")
    return 0


def _check_kind(expected: ModelKind | None, actual: ModelKind, flag: str) -> None:
    if expected is not None and expected != actual:
        raise ConfigError(f"{flag} says {expected.value} but the checkpoint holds {actual.value}")


def cmd_advtrain(args: argparse.Namespace) -> int:
    """对抗训练：额外写出 generator.kge 与 generated_negatives.tsv

    γ 默认沿用判别器预训练时的取值，只有显式给出 --gamma 才会改变。
    """
    gen_ckpt = load_checkpoint(args.gen_ckpt)
    dis_ckpt = load_checkpoint(args.dis_ckpt)
    require_role(gen_ckpt.kind, "generator")
    require_role(dis_ckpt.kind, "discriminator")

    inherited = pretrain_hyperparameters(dis_ckpt)
    manager = _load_config(args, "advtrain", inherited)
    config = manager.config
    dataset = _require_dataset(config)
    if inherited:
        logger.info(f"Hyperparameters from the discriminator checkpoint: {inherited}")
    _check_kind(config.generator, gen_ckpt.kind, "--generator")
    _check_kind(config.model, dis_ckpt.kind, "--model")
    gen_ckpt.vocab.check_same(dis_ckpt.vocab, "generator vs discriminator checkpoint")
    data = load_dataset(dataset, vocab=dis_ckpt.vocab, frozen=True)

    out = _prepare_out_dir(manager)
    cfg = config.train
    bus = get_event_bus()
    curve = CurveWriter(out / CURVE_FILE)
    bus.on("train:eval", curve.on_eval)
    try:
        result = adversarial_train(
            gen_ckpt, dis_ckpt, data, cfg, np.random.default_rng(cfg.seed), event_bus=bus
        )
    finally:
        bus.off("train:eval", curve.on_eval)

    meta = {
        "stage": "adversarial",
        "seed": cfg.seed,
        "generator": gen_ckpt.kind.value,
        "best_epoch": result.report.best_epoch,
        **{key: getattr(cfg, key) for key in FROZEN_TRAIN_KEYS},
    }
    save_checkpoint(out / BEST_FILE, result.best, data.vocab, meta)
    save_checkpoint(out / FINAL_FILE, result.final, data.vocab, {**meta, "epoch": cfg.adv_epochs})
    save_checkpoint(out / GENERATOR_FILE, result.generator, data.vocab, {"stage": "adversarial-generator"})
    write_generated(out / GENERATED_FILE, result.generated, data.vocab)
    _print_report(result.test_report, "test")
    return 0


def _load_for_checkpoint(ckpt: Checkpoint, dataset: Path) -> TripleStore:
    """按检查点词表加载数据集，出现词表外名称即报错"""
    return load_dataset(dataset, vocab=ckpt.vocab, frozen=True)


def cmd_eval(args: argparse.Namespace) -> int:
    """评估检查点，结果以 key: value 行输出到标准输出"""
    manager = _load_config(args)
    ckpt = load_checkpoint(args.ckpt)
    data = _load_for_checkpoint(ckpt, _require_dataset(manager.config))
    report = evaluate(ckpt.params, data.split(args.split), build_filter_index(data))
    label = f"{args.split} (diagnostic)" if args.split == "train" else args.split
    print(f"model: {ckpt.kind.value}")
    _print_report(report, label)
    return 0


def format_negatives_table(
    ckpt: Checkpoint,
    data: TripleStore,
    n_examples: int,
    ns: int,
    top: int,
    rng: np.random.Generator,
    dis: Checkpoint | None = None,
) -> list[str]:
    """
    生成负样本对比表：每个正样本一行均匀候选、一行生成器概率最高的候选

    Returns:
        表格文本行（首行为表头）
    """
    vocab = data.vocab
    gen = build_model(ckpt.params)
    dis_model = build_model(dis.params) if dis is not None else None
    bern = compute_bern_stats(
        data.train, num_entities=data.num_entities, num_relations=data.num_relations
    )
    lines = ["positive\tside\tuniform\tgenerated"]
    n = min(n_examples, len(data.train))
    if n <= 0:
        return lines
    picks = rng.choice(len(data.train), size=n, replace=False)
    for i in picks:
        positive = Triple(*(int(x) for x in data.train[i]))
        cands = sample_candidates(positive, ns, bern, rng)
        dist = generator_distribution(gen, cands)
        entities = cands.replacements
        uniform = [vocab.entity_name(int(e)) for e in entities[:top]]
        order = np.argsort(-dist.probs, kind="stable")[:top]
        generated = []
        for j in order:
            item = f"{vocab.entity_name(int(entities[j]))} ({dist.probs[j]:.3f}"
            if dis_model is not None:
                item += f", r={reward(dis_model, Triple(*cands.candidates[j])):.3f}"
            generated.append(item + ")")
        h, r, t = positive
        side = "head" if cands.side is Side.HEAD else "tail"
        lines.append(
            f"{vocab.entity_name(h)} {vocab.relation_name(r)} {vocab.entity_name(t)}\t{side}\t"
            f"{', '.join(uniform)}\t{', '.join(generated)}"
        )
    return lines


def cmd_inspect_negatives(args: argparse.Namespace) -> int:
    """输出负样本对比表"""
    manager = _load_config(args)
    ckpt = load_checkpoint(args.gen_ckpt)
    require_role(ckpt.kind, "generator")
    dis = None
    if args.dis_ckpt:
        dis = load_checkpoint(args.dis_ckpt)
        require_role(dis.kind, "discriminator")
        ckpt.vocab.check_same(dis.vocab, "generator vs discriminator checkpoint")
    data = _load_for_checkpoint(ckpt, _require_dataset(manager.config))
    if args.n_examples < 0 or args.ns < 1 or args.top < 1:
        raise ConfigError("--n-examples must be >= 0, --ns and --top must be >= 1")

    seed = manager.config.train.seed
    lines = format_negatives_table(
        ckpt, data, args.n_examples, args.ns, args.top, np.random.default_rng(seed), dis
    )
    for line in lines:
        print(line)
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "pretrain": cmd_pretrain,
    "advtrain": cmd_advtrain,
    "eval": cmd_eval,
    "inspect-negatives": cmd_inspect_negatives,
}


def main(argv: list[str] | None = None) -> int:
    """
    命令行入口

    Returns:
        退出码：成功 0，业务错误 1（参数用法错误由 argparse 以 2 退出）
    """
    args = build_parser().parse_args(argv)
    LogConfig(level="DEBUG" if args.debug else "INFO").setup()
    try:
        return COMMANDS[args.command](args)
    except KGECoreError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


__all__ = [
    "build_parser",
    "collect_overrides",
    "pretrain_hyperparameters",
    "cmd_pretrain",
    "cmd_advtrain",
    "cmd_eval",
    "cmd_inspect_negatives",
    "format_negatives_table",
    "main",
]
