"""Command-line interface.

Exit codes: 0 success, 2 config/parse error, 3 infeasible input,
4 ambiguous lift (non-thin evidence), 5 resource limit.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from fractions import Fraction

from . import cones, directive, measures, oracle
from .config import AnalysisConfig, ConfigError, load_config, parse_morphism_block, preset_config
from .errors import InfeasibleError, InvalidArgumentError, NotApplicableError, ResourceLimitError
from .morphisms import compose, count_occurrences
from .presets import PRESETS

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_AMBIGUOUS, EXIT_RESOURCE = 0, 2, 3, 4, 5


class Ambiguous(Exception):
    def __init__(self, report: measures.AmbiguityReport):
        super().__init__(report.reason)
        self.report = report


class Report:
    """Line-oriented output.  ``text`` rounds to 10 significant digits;
    ``structured`` emits ``[section]`` headers and ``key=value`` lines with
    exact rationals where available."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def section(self, name: str):
        if self.fmt == "structured":
            self.lines.append(f"[{name}]")
        else:
            if self.lines:
                self.lines.append("")
            self.lines.append(f"{name}:")

    def kv(self, key: str, value):
        if self.fmt == "structured":
            self._structured(key, value)
        else:
            self.lines.append(f"  {key}: {self._human(value)}")

    def text(self, line: str):
        if self.fmt == "text":
            self.lines.append(f"  {line}")

    @staticmethod
    def _human(value) -> str:
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, (Fraction, float)):
            return f"{float(value):.10g}"
        if isinstance(value, (list, tuple)):
            return "(" + ", ".join(Report._human(v) for v in value) + ")"
        if value is None:
            return "-"
        return str(value)

    @staticmethod
    def _exact(value) -> str:
        if isinstance(value, Fraction):
            return f"{value.numerator}/{value.denominator}"
        if isinstance(value, bool):
            return str(value).lower()
        if isinstance(value, float):
            return repr(value)
        if value is None:
            return "none"
        return str(value)

    def _structured(self, key, value):
        if isinstance(value, (list, tuple)):
            self.lines.append(f"{key}=" + ",".join(self._exact(v) for v in value))
            if any(isinstance(v, Fraction) for v in value):
                self.lines.append(f"{key}.decimal=" + ",".join(repr(float(v)) for v in value))
        else:
            self.lines.append(f"{key}={self._exact(value)}")
            if isinstance(value, Fraction):
                self.lines.append(f"{key}.decimal={float(value)!r}")

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def _describe_sequence(cfg: AnalysisConfig, rep: Report):
    seq = cfg.sequence
    rep.section("sequence")
    rep.kv("name", cfg.name)
    rep.kv("generator", seq.generator)
    for k, sigma in enumerate(seq.prefix):
        rep.kv(f"prefix.{k}", str(sigma))
    for k, sigma in enumerate(seq.cycle):
        rep.kv(f"cycle.{k}", str(sigma))
    rep.kv("alphabet_0", " ".join(seq.alphabet(0).letters))
    rep.kv("depth", cfg.depth)
    rep.kv("eps", cfg.eps)


def cmd_analyze(cfg: AnalysisConfig) -> str:
    seq = cfg.sequence
    rep = Report(cfg.format)
    _describe_sequence(cfg, rep)

    growth = directive.check_everywhere_growing(seq, cfg.depth, cfg.growth_threshold)
    rep.section("growth")
    rep.kv("status", growth.status)
    for key in sorted(growth.witness):
        rep.kv(f"witness.{key}", growth.witness[key])
    rep.kv("beta", growth.beta_values)

    inv = directive.check_invertible_levels(seq, cfg.depth)
    rep.section("invertibility")
    all_inv = all(x.invertible for x in inv)
    dets = sorted({x.determinant for x in inv if x.determinant is not None})
    rep.kv("all_invertible", all_inv)
    rep.kv("determinants", dets)
    if cfg.format == "structured":
        for x in inv:
            rep.kv(f"level.{x.level}", f"det={x.determinant if x.determinant is not None else 'none'} "
                                       f"invertible={str(x.invertible).lower()}"
                                       + (f" reason={x.reason}" if x.reason else ""))
    if all_inv:
        inv_summary = "all levels invertible (det " + ", ".join(map(str, dets)) + ")"
    elif any(x.reason == "non-square" for x in inv):
        inv_summary = "some levels non-square"
    else:
        inv_summary = "levels singular (det " + ", ".join(map(str, dets)) + ")"

    summary = [growth.status, inv_summary]
    rep.section("cones")
    if growth.status == directive.NOT_GROWING:
        rep.kv("skipped", True)
        rep.kv("reason", "sequence is not everywhere growing; letter-cone estimates do not describe its measures")
        summary.append("analysis of cones skipped")
    else:
        report = cones.check_thin(seq, cfg.depth, cfg.eps, cfg.window)
        cvals = sorted({lv.c_estimate for lv in report.levels})
        rep.kv("thin", report.thin)
        rep.kv("witness", None if report.witness is None else list(report.witness))
        rep.kv("stabilization_level", report.stabilization_level)
        rep.kv("e_bounds", list(report.e_bounds))
        if report.thin != cones.THIN and cfg.format == "text":
            rep.text("note: verdicts are finite-depth evidence, not proof")
        for lv in report.levels:
            rep.section(f"level {lv.n}")
            rep.kv("n", lv.n)
            rep.kv("c_n", lv.c_estimate)
            rep.kv("converged", lv.converged)
            for i, ray in enumerate(lv.extreme_rays):
                rep.kv(f"ray.{i}", list(ray))
        c_txt = f"c_n ≡ {cvals[0]}" if len(cvals) == 1 else "c_n = " + ",".join(
            str(lv.c_estimate) for lv in report.levels)
        summary += [c_txt, report.thin]
        if report.stabilization_level is not None:
            summary.append(f"n₀ = {report.stabilization_level}")
        summary.append(f"e(X) ∈ [{report.e_bounds[0]}, {report.e_bounds[1]}]")
    rep.section("summary")
    rep.kv("summary", "; ".join(summary))
    return rep.render()


def _lookahead(cfg: AnalysisConfig, factor: int = 1) -> int:
    return max(factor * cfg.depth, cones.MIN_LOOKAHEAD)


def _level0_estimate(cfg: AnalysisConfig, lookahead: int) -> cones.LevelEstimate:
    seq = cfg.sequence
    top = lookahead if seq.depth is None else min(lookahead, seq.depth)
    return cones.estimate_cone_dim(seq, 0, top, cfg.eps, cfg.window)


def cmd_letters(cfg: AnalysisConfig) -> str:
    est = _level0_estimate(cfg, _lookahead(cfg))
    rep = Report(cfg.format)
    _describe_sequence(cfg, rep)
    rep.section("letters")
    rep.kv("c_0", est.c_estimate)
    rep.kv("converged", est.converged)
    rep.kv("rays", len(est.extreme_rays))
    letters = cfg.sequence.alphabet(0).letters
    rep.kv("coordinates", " ".join(letters))
    for i, (ray, src) in enumerate(zip(est.extreme_rays, est.ray_letters)):
        rep.section(f"ray {i}")
        rep.kv("decimal", [float(x) for x in ray])
        rep.kv("exact", [f"{x.numerator}/{x.denominator}" for x in ray])
        rep.kv("source", f"column {src} of M(sigma_[0,{est.depth}))")
    return rep.render()


def _parse_v0(text: str | None, cfg: AnalysisConfig):
    if text is None:
        return None
    try:
        vals = [Fraction(x.strip()) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"--v0: cannot parse {text!r} as comma-separated numbers") from None
    if len(vals) != cfg.sequence.alphabet(0).size:
        raise ConfigError(f"--v0: expected {cfg.sequence.alphabet(0).size} entries, got {len(vals)}")
    return vals


def _default_v0(cfg: AnalysisConfig):
    est = _level0_estimate(cfg, _lookahead(cfg, 2))
    if est.c_estimate != 1 or len(est.extreme_rays) != 1:
        raise ConfigError(f"c_0 estimate is {est.c_estimate}; pass --v0 to choose a letter vector")
    return list(est.extreme_rays[0])


def _tower(cfg: AnalysisConfig, v0, depth: int) -> measures.MeasureTower:
    if v0 is None:
        v0 = _default_v0(cfg)
    result = measures.unique_tower_from_letters(cfg.sequence, v0, depth, cfg.eps,
                                                lookahead=_lookahead(cfg, 2), window=cfg.window)
    if isinstance(result, measures.AmbiguityReport):
        raise Ambiguous(result)
    return result


def _oracle_level(cfg: AnalysisConfig, letter_index: int = 0) -> int:
    seq = cfg.sequence
    n = 0
    while n < cfg.depth and seq.matrix(0, n + 1).column_sums()[letter_index] <= cfg.budget:
        n += 1
    return n


def cmd_cylinder(cfg: AnalysisConfig, word: str, v0=None) -> str:
    seq = cfg.sequence
    try:
        w = seq.alphabet(0).word(word)
    except InvalidArgumentError as exc:
        raise ConfigError(f"word {word!r}: {exc}") from None
    if len(w) == 0:
        raise ConfigError("word must be nonempty")
    t = _tower(cfg, _parse_v0(v0, cfg), cfg.depth)
    rep = Report(cfg.format)
    _describe_sequence(cfg, rep)
    rep.section("cylinder")
    rep.kv("word", str(w))
    rep.kv("v0", list(measures.zeta(t, 0)))
    rep.kv("mass", measures.total_mass(t))
    rows = 0
    for n in range(cfg.depth + 1):
        try:
            est = measures.cylinder_measure(t, w, n, cfg.budget)
        except ResourceLimitError:
            rep.kv("stopped", f"level {n} expansion exceeds budget {cfg.budget}")
            break
        rep.section(f"depth {n}")
        rep.kv("n", n)
        rep.kv("lower", est.lower)
        rep.kv("point", est.point)
        rep.kv("upper", est.upper)
        rep.kv("error_bound", est.error_bound)
        rows += 1
    n_or = _oracle_level(cfg)
    a = seq.alphabet(n_or).letters[0]
    big = oracle.expand(seq, n_or, a, oracle.ExpansionBudget(cfg.budget))
    rep.section("oracle")
    rep.kv("level", n_or)
    rep.kv("letter", a)
    rep.kv("length", len(big))
    if len(big) >= len(w):
        freq = oracle.empirical_frequency(big, w)
        rep.kv("frequency", freq)
        rep.kv("frequency_scaled_to_mass", freq * measures.total_mass(t))
    else:
        rep.kv("frequency", None)
    return rep.render()


def cmd_pushforward(cfg: AnalysisConfig, files: list[str], v0=None) -> str:
    sigmas = []
    for path in files:
        try:
            with open(path, encoding="utf-8") as fh:
                sigmas.append(parse_morphism_block(fh.read(), path))
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
    for path, s in zip(files, sigmas):
        if not s.non_erasing:
            raise ConfigError(f"{path}: morphism is erasing; pushforward requires every letter image "
                              "to be non-trivial")
    seq = cfg.sequence
    depth = min(cfg.depth, 10)
    t = _tower(cfg, _parse_v0(v0, cfg), depth)
    # sigmas[0] o sigmas[1] o ... : apply the last one first
    step = t
    for s in reversed(sigmas):
        try:
            step = measures.pushforward(s, step)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from None
    rep = Report(cfg.format)
    _describe_sequence(cfg, rep)
    rep.section("pushforward")
    for i, s in enumerate(sigmas):
        rep.kv(f"morphism.{i}", str(s))
    old_mass, new_mass = measures.total_mass(t), measures.total_mass(step)
    rep.kv("old_letters", " ".join(seq.alphabet(0).letters))
    rep.kv("old_vector", list(measures.zeta(t, 0)))
    rep.kv("new_letters", " ".join(step.seq.alphabet(0).letters))
    rep.kv("new_vector", list(measures.zeta(step, 0)))
    rep.kv("old_mass", old_mass)
    rep.kv("new_mass", new_mass)
    if old_mass == 1 and new_mass != 1:
        rep.kv("caveat", "the image of a probability measure need not be a probability measure")
    if len(sigmas) >= 2:
        composed = sigmas[0]
        for s in sigmas[1:]:
            composed = compose(composed, s)
        direct = measures.pushforward(composed, t)
        ok = _same_measure(direct, step, shift=len(sigmas) - 1, budget=cfg.budget)
        rep.kv("functoriality", "(σσ')_ℳ = σ_ℳ σ'_ℳ: " + ("OK" if ok else "FAILED"))
    return rep.render()


def _same_measure(direct, nested, shift: int, budget: int, max_len: int = 2) -> bool:
    """Compare a composed pushforward with the nested one: level-0 vectors,
    the shared upper levels, and cylinder points of short words."""
    if measures.zeta(direct, 0) != measures.zeta(nested, 0):
        return False
    if direct.vectors[1:] != nested.vectors[1 + shift:]:
        return False
    letters = direct.seq.alphabet(0).letters
    for k in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=k):
            try:
                a = measures.cylinder_measure(direct, list(w), 1, budget)
                b = measures.cylinder_measure(nested, list(w), 1 + shift, budget)
            except ResourceLimitError:
                return True
            if (a.point, a.upper) != (b.point, b.upper):
                return False
    return True


def cmd_frequencies(cfg: AnalysisConfig, word: str) -> str:
    seq = cfg.sequence
    try:
        w = seq.alphabet(0).word(word)
    except InvalidArgumentError as exc:
        raise ConfigError(f"word {word!r}: {exc}") from None
    if len(w) == 0:
        raise ConfigError("word must be nonempty")
    n = _oracle_level(cfg)
    a = seq.alphabet(n).letters[0]
    big = oracle.expand(seq, n, a, oracle.ExpansionBudget(cfg.budget))
    if len(big) < len(w):
        raise ResourceLimitError(f"budget {cfg.budget} allows an expansion of only {len(big)} symbols, "
                                 f"shorter than {str(w)!r}", predicted=len(w), limit=cfg.budget)
    rep = Report(cfg.format)
    _describe_sequence(cfg, rep)
    rep.section("frequencies")
    rep.kv("word", str(w))
    rep.kv("level", n)
    rep.kv("letter", a)
    rep.kv("length", len(big))
    rep.kv("occurrences", count_occurrences(big, w))
    rep.kv("frequency", oracle.empirical_frequency(big, w))
    if seq.cycle and not seq.prefix:
        try:
            pf = oracle.perron_frequencies(seq.matrix(0, len(seq.cycle)))
            rep.kv("perron_letter_frequencies", [float(x) for x in pf])
        except (NotApplicableError, InvalidArgumentError):
            rep.kv("perron_letter_frequencies", None)
    return rep.render()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=PRESETS, help="use a built-in sequence instead of a config file")
    common.add_argument("--depth", type=int)
    common.add_argument("--eps", type=float)
    common.add_argument("--growth-threshold", type=int, dest="growth_threshold")
    common.add_argument("--budget", type=float, help="expansion budget in symbols")
    common.add_argument("--window", type=int, help="convergence window for cone estimates")
    common.add_argument("--format", choices=("text", "structured"))

    parser = argparse.ArgumentParser(prog="sadic", description="Invariant-measure data for S-adic subshifts.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="growth, invertibility, cone dimensions, thinness")
    p.add_argument("config", nargs="?")
    p = sub.add_parser("letters", parents=[common], help="extreme rays of the level-0 letter cone")
    p.add_argument("config", nargs="?")
    p = sub.add_parser("cylinder", parents=[common], help="certified intervals for mu([W])")
    p.add_argument("word")
    p.add_argument("config", nargs="?")
    p.add_argument("--v0", help="comma-separated letter values (rationals allowed)")
    p = sub.add_parser("pushforward", parents=[common], help="push a measure forward under morphisms")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--config", dest="config")
    p.add_argument("--v0")
    p = sub.add_parser("frequencies", parents=[common], help="oracle frequency of W in a long expansion")
    p.add_argument("word")
    p.add_argument("config", nargs="?")
    return parser


def _config(args) -> AnalysisConfig:
    if args.config and args.preset:
        raise ConfigError("give either a config file or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset_config(args.preset)
    else:
        raise ConfigError("a config file or --preset is required")
    for key in ("depth", "eps", "growth_threshold", "window", "format"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    if args.budget is not None:
        cfg.budget = int(args.budget)
    return cfg.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "analyze":
            out = cmd_analyze(cfg)
        elif args.command == "letters":
            out = cmd_letters(cfg)
        elif args.command == "cylinder":
            out = cmd_cylinder(cfg, args.word, args.v0)
        elif args.command == "pushforward":
            out = cmd_pushforward(cfg, args.files, args.v0)
        else:
            out = cmd_frequencies(cfg, args.word)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Ambiguous as exc:
        r = exc.report
        print(f"ambiguous: level {r.level}, solution set dimension {r.dimension}: {r.reason}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
