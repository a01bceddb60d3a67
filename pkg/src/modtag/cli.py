"""Command-line surface: harvest, aggregate, train, tag, eval, cv, search,
experiment.

Options resolve as: built-in defaults, then the config file (INI sections
named after the command, plus [global]), then explicit flags. Every run
writes a manifest JSON (resolved options, input digests, outputs) so the run
can be reproduced from the manifest alone. Exit codes: 0 success, 1 when an
evaluation yields no defined overall F, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

from . import __version__
from .annotation import aggregate_corpus, read_annotation_sets, to_training
from .corpus import (
    Corpus,
    Sentence,
    Token,
    parse_column_file,
    parse_column_string,
    parse_prediction_string,
    render_column_file,
    render_prediction_file,
    tokenize_raw,
    write_column_file,
)
from .errors import ModtagError
from .evaluation import (
    TEST_AGR3,
    TEST_ALL,
    confidence_experiment,
    cross_validate,
    feature_search,
    kfold_plan,
    score,
)
from .features import TEMPLATES, FeatureConfig
from .kernels import LINEAR, KernelParams
from .lemma import EMPTY_LEMMAS, load_lemma_table
from .svm import TrainParams, load_model, save_model
from .tags import MODALITIES
from .tagger import TaggerModel, TrainingSetup, tag_corpus, train
from .triggers import EMPTY_FILTERS, load_filters, load_lexicon, select_candidates
from .util import atomic_write_json, atomic_write_text, sha256_file

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DEFAULT_LEXICON = os.path.join(_DATA_DIR, "lexicon.tsv")
DEFAULT_FILTERS = os.path.join(_DATA_DIR, "filters.tsv")

_KERNELS = {"quadratic": KernelParams(), "linear": KernelParams(kind=LINEAR)}

DEFAULTS = {
    "harvest": {"raw": False, "lexicon": DEFAULT_LEXICON, "filters": DEFAULT_FILTERS,
                "stem_match": False, "cap": 50, "seed": 42},
    "aggregate": {},
    "train": {"features": "wordStem,POS,whichModal", "width": 2, "dynamic_tags": True,
              "setup": "Tr23", "cost_agr2": None, "cost_agr3": None, "c_value": 1.0,
              "kernel": "quadratic", "kkt_tolerance": 1e-3, "max_passes": 0,
              "lemmas": None, "seed": 42},
    "tag": {"lemmas": None, "jobs": 1},
    "eval": {"report": None},
    "cv": {"features": "wordStem,POS,whichModal", "width": 2, "dynamic_tags": True,
           "setup": "Tr23", "cost_agr2": None, "cost_agr3": None, "c_value": 1.0,
           "kernel": "quadratic", "kkt_tolerance": 1e-3, "max_passes": 0,
           "lemmas": None, "k": 4, "seed": 42, "test_filter": TEST_ALL, "report": None},
    "search": {"templates": ",".join(TEMPLATES), "widths": "1,2,3,4,5",
               "strategy": "greedy-prune", "setup": "Tr23", "c_value": 1.0,
               "kernel": "quadratic", "kkt_tolerance": 1e-3, "max_passes": 0,
               "dynamic_tags": True, "lemmas": None, "k": 4, "seed": 42,
               "top": 20, "report": None},
    "experiment": {"features": "wordStem,POS,whichModal", "width": 2, "dynamic_tags": True,
                   "cost_agr2": None, "cost_agr3": None, "c_value": 1.0,
                   "kernel": "quadratic", "kkt_tolerance": 1e-3, "max_passes": 0,
                   "lemmas": None, "k": 4, "seed": 42, "gold": None},
}


def _add_train_flags(sub, with_setup=True, with_features=True):
    if with_features:
        sub.add_argument("--features", help="comma-separated feature templates")
        sub.add_argument("--width", type=int, help="context width (1-5)")
    sub.add_argument("--no-dynamic-tags", dest="dynamic_tags", action="store_false",
                     default=None, help="disable previous-tag dynamic features")
    if with_setup:
        sub.add_argument("--setup", choices=["Tr23", "Tr2", "Tr3", "Tr23_W"])
        sub.add_argument("--cost-agr2", dest="cost_agr2", type=float)
        sub.add_argument("--cost-agr3", dest="cost_agr3", type=float)
    sub.add_argument("--C", dest="c_value", type=float, help="SVM C value")
    sub.add_argument("--kernel", choices=sorted(_KERNELS))
    sub.add_argument("--kkt-tolerance", dest="kkt_tolerance", type=float)
    sub.add_argument("--max-passes", dest="max_passes", type=int)
    sub.add_argument("--lemmas", help="lemma dictionary TSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modtag",
        description="Modality tagging pipeline: harvest triggers, aggregate "
                    "annotations, train/tag/evaluate a windowed SVM sequence tagger.",
    )
    parser.add_argument("--version", action="version", version=f"modtag {__version__}")
    parser.add_argument("--config", help="INI config file; flags override it")
    parser.add_argument("--manifest", help="run manifest path")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("harvest", help="first-pass trigger tagging + capped candidate harvest")
    sub.add_argument("input", help="column corpus file, or raw text with --raw ('-' = stdin)")
    sub.add_argument("--raw", action="store_true", default=None,
                     help="input is raw text, one sentence per line")
    sub.add_argument("--lexicon")
    sub.add_argument("--filters")
    sub.add_argument("--stem-match", dest="stem_match", action="store_true",
                     default=None, help="match triggers on Porter stems too")
    sub.add_argument("--cap", type=int, help="max sentences per (modality, trigger)")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out-dir", dest="out_dir", required=True)

    sub = subs.add_parser("aggregate", help="aggregate annotator judgments into training data")
    sub.add_argument("--annotations", required=True, help="JSON-lines annotation sets")
    sub.add_argument("--sentences", required=True, help="column corpus the annotations refer to")
    sub.add_argument("--out", required=True, help="training column file ('-' = stdout)")
    sub.add_argument("--stats", help="stats JSON path (default: <out>.stats.json)")

    sub = subs.add_parser("train", help="train the sequence tagger")
    sub.add_argument("input", help="gold training corpus ('-' = stdin)")
    sub.add_argument("--model", required=True, help="model file to write")
    _add_train_flags(sub)
    sub.add_argument("--seed", type=int)

    sub = subs.add_parser("tag", help="tag a corpus with a trained model")
    sub.add_argument("input", help="column corpus ('-' = stdin)")
    sub.add_argument("--model", required=True)
    sub.add_argument("--out", required=True, help="4-column prediction file ('-' = stdout)")
    sub.add_argument("--lemmas")
    sub.add_argument("--jobs", type=int)

    sub = subs.add_parser("eval", help="score predictions against gold")
    sub.add_argument("--gold", required=True)
    sub.add_argument("--pred", required=True, help="3- or 4-column predictions ('-' = stdin)")
    sub.add_argument("--report", help="report JSON path")

    sub = subs.add_parser("cv", help="k-fold cross-validation")
    sub.add_argument("input")
    sub.add_argument("--k", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--test-filter", dest="test_filter", choices=[TEST_ALL, TEST_AGR3])
    sub.add_argument("--report", help="report JSON path")
    _add_train_flags(sub)

    sub = subs.add_parser("search", help="feature-set / context-width search")
    sub.add_argument("input")
    sub.add_argument("--k", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--templates", help="comma-separated candidate templates")
    sub.add_argument("--widths", help="comma-separated context widths")
    sub.add_argument("--strategy", choices=["exhaustive", "greedy-prune"])
    sub.add_argument("--top", type=int, help="rows to print")
    sub.add_argument("--report", help="full ranking JSON path")
    _add_train_flags(sub, with_setup=True, with_features=False)

    sub = subs.add_parser("experiment", help="annotator-confidence experiment grid")
    sub.add_argument("input")
    sub.add_argument("--k", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--gold", help="external gold corpus")
    sub.add_argument("--out-dir", dest="out_dir", required=True)
    _add_train_flags(sub, with_setup=False)
    sub.add_argument("--cost-agr2", dest="cost_agr2", type=float,
                     help="Tr23_W cost for Agr2 sentences")
    sub.add_argument("--cost-agr3", dest="cost_agr3", type=float,
                     help="Tr23_W cost for Agr3 sentences")

    return parser


def _resolve_options(args: argparse.Namespace) -> dict:
    command = args.command
    resolved = dict(DEFAULTS.get(command, {}))
    config_path = getattr(args, "config", None)
    if config_path:
        ini = configparser.ConfigParser()
        with open(config_path, encoding="utf-8") as fh:
            ini.read_file(fh)
        for section in ("global", command):
            if ini.has_section(section):
                for key, value in ini.items(section):
                    resolved[key.replace("-", "_")] = value
    for key, value in vars(args).items():
        if key in ("command", "config", "manifest") or value is None:
            continue
        resolved[key] = value
    return resolved


def _coerce(resolved: dict, key, kind):
    value = resolved.get(key)
    if value is None or isinstance(value, kind):
        return value
    if kind is bool:
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    return kind(value)


def _feature_config(resolved) -> FeatureConfig:
    names = [t.strip() for t in str(resolved["features"]).split(",") if t.strip()]
    return FeatureConfig(
        active=tuple(names),
        context_width=_coerce(resolved, "width", int),
        use_dynamic_tags=_coerce(resolved, "dynamic_tags", bool),
    )


def _train_params(resolved) -> TrainParams:
    kernel_name = str(resolved["kernel"])
    if kernel_name not in _KERNELS:
        raise ValueError(f"unknown kernel {kernel_name!r}")
    return TrainParams(
        C=_coerce(resolved, "c_value", float),
        kernel=_KERNELS[kernel_name],
        kkt_tolerance=_coerce(resolved, "kkt_tolerance", float),
        max_passes=_coerce(resolved, "max_passes", int),
    )


def _setup(resolved) -> TrainingSetup:
    return TrainingSetup.make(
        str(resolved.get("setup", "Tr23")),
        _coerce(resolved, "cost_agr2", float),
        _coerce(resolved, "cost_agr3", float),
    )


def _lemmas(resolved):
    path = resolved.get("lemmas")
    return load_lemma_table(path) if path else EMPTY_LEMMAS


def _read_corpus(path: str) -> Corpus:
    if path == "-":
        return parse_column_string(sys.stdin.read(), "<stdin>")
    return parse_column_file(path)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_raw_corpus(path: str) -> Corpus:
    text = _read_text(path)
    sentences = []
    n = 0
    for line in text.split("\n"):
        surfaces = tokenize_raw(line)
        if not surfaces:
            continue
        n += 1
        tokens = tuple(Token(s, "UNK") for s in surfaces)
        sentences.append(Sentence(f"s{n:04d}", tokens))
    if not sentences:
        raise ValueError(f"{path}: no sentences")
    return Corpus(tuple(sentences))


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _manifest(args, resolved, inputs, outputs, default_anchor: str | None):
    path = getattr(args, "manifest", None)
    if path is None and default_anchor and default_anchor != "-":
        path = default_anchor + ".manifest.json"
    if path is None:
        return
    payload = {
        "tool": {"name": "modtag", "version": __version__},
        "command": args.command,
        "options": {k: v for k, v in sorted(resolved.items())},
        "inputs": {p: sha256_file(p) for p in inputs if p and p != "-" and os.path.exists(p)},
        "outputs": sorted(o for o in outputs if o and o != "-"),
    }
    atomic_write_json(path, payload)


def _cmd_harvest(args, resolved) -> int:
    corpus = _read_raw_corpus(args.input) if _coerce(resolved, "raw", bool) else _read_corpus(args.input)
    lexicon = load_lexicon(resolved["lexicon"], match_stems=_coerce(resolved, "stem_match", bool))
    filters = load_filters(resolved["filters"], lexicon) if resolved.get("filters") else EMPTY_FILTERS
    cap = _coerce(resolved, "cap", int)
    seed = _coerce(resolved, "seed", int)
    selected = select_candidates(corpus, lexicon, filters, cap=cap, seed=seed)

    os.makedirs(resolved["out_dir"], exist_ok=True)
    outputs = []
    summary = {"counts": {}, "per_trigger": {}}
    print(f"{'Modality':<10} {'Sentences':>9}   Triggers")
    for modality in MODALITIES:
        pairs = selected.get(modality, [])
        seen: dict[str, Sentence] = {}
        per_trigger: dict[str, int] = {}
        for sentence, match in pairs:
            seen.setdefault(sentence.id, sentence)
            per_trigger[match.trigger] = per_trigger.get(match.trigger, 0) + 1
        summary["counts"][modality] = len(seen)
        summary["per_trigger"][modality] = dict(sorted(per_trigger.items()))
        trigger_list = ", ".join(f"{t}:{n}" for t, n in sorted(per_trigger.items()))
        print(f"{modality:<10} {len(seen):>9}   {trigger_list}")
        if seen:
            out_path = os.path.join(resolved["out_dir"], f"candidates_{modality}.col")
            write_column_file(Corpus(tuple(seen.values())), out_path)
            outputs.append(out_path)
    summary_path = os.path.join(resolved["out_dir"], "summary.json")
    atomic_write_json(summary_path, summary)
    outputs.append(summary_path)
    _manifest(args, resolved, [args.input, resolved["lexicon"], resolved.get("filters")],
              outputs, summary_path)
    return 0


def _cmd_aggregate(args, resolved) -> int:
    annotation_sets = read_annotation_sets(args.annotations)
    corpus = _read_corpus(args.sentences)
    by_id = corpus.by_id()
    unknown = sorted({a.sentence_id for a in annotation_sets} - set(by_id))
    if unknown:
        raise ValueError(f"annotations reference unknown sentence ids: {', '.join(unknown)}")
    examples, stats = aggregate_corpus(annotation_sets)
    projected = {e.sentence_id: to_training(e, by_id[e.sentence_id]) for e in examples}
    training = [projected[s.id] for s in corpus if s.id in projected]
    text = render_column_file(Corpus(tuple(training))) if training else ""
    _write_text(args.out, text)
    stats_path = resolved.get("stats")
    if stats_path is None and args.out != "-":
        stats_path = args.out + ".stats.json"
    if stats_path:
        atomic_write_json(stats_path, stats.to_json_dict())
    print(f"accepted={stats.accepted} agr2={stats.agr2} agr3={stats.agr3} "
          f"rejected={sum(stats.rejected.values())} total={stats.total}")
    _manifest(args, resolved, [args.annotations, args.sentences],
              [args.out, stats_path], args.out)
    return 0


def _cmd_train(args, resolved) -> int:
    corpus = _read_corpus(args.input)
    model = train(corpus, _feature_config(resolved), _train_params(resolved),
                  _setup(resolved), _lemmas(resolved))
    save_model(model.svm, args.model)
    print(f"trained on {len(corpus)} sentences -> {args.model}")
    _manifest(args, resolved, [args.input, resolved.get("lemmas")], [args.model], args.model)
    return 0


def _cmd_tag(args, resolved) -> int:
    corpus = _read_corpus(args.input)
    model = TaggerModel(load_model(args.model), _lemmas(resolved))
    tagged = tag_corpus(corpus, model, jobs=_coerce(resolved, "jobs", int))
    _write_text(args.out, render_prediction_file(tagged))
    _manifest(args, resolved, [args.input, args.model, resolved.get("lemmas")],
              [args.out], args.out)
    return 0


def _read_predictions(path: str) -> Corpus:
    text = _read_text(path)
    name = "<stdin>" if path == "-" else path
    widths = {len(l.split("\t")) for l in text.split("\n")
              if l.strip() and not l.startswith("#")}
    if 4 in widths:
        return parse_prediction_string(text, name)
    return parse_column_string(text, name)


def _finish_report(report, resolved, args, inputs, anchor) -> int:
    print(report.format_table())
    report_path = resolved.get("report")
    if report_path:
        atomic_write_json(report_path, report.to_json_dict())
    _manifest(args, resolved, inputs, [report_path], anchor or report_path)
    return 0 if report.overall_f1() is not None else 1


def _cmd_eval(args, resolved) -> int:
    gold = _read_corpus(args.gold)
    predicted = _read_predictions(args.pred)
    report = score(gold, predicted)
    return _finish_report(report, resolved, args, [args.gold, args.pred], resolved.get("report"))


def _cmd_cv(args, resolved) -> int:
    corpus = _read_corpus(args.input)
    plan = kfold_plan(corpus, _coerce(resolved, "k", int), _coerce(resolved, "seed", int))
    report = cross_validate(corpus, plan, _feature_config(resolved), _train_params(resolved),
                            _setup(resolved), resolved.get("test_filter", TEST_ALL),
                            _lemmas(resolved))
    return _finish_report(report, resolved, args, [args.input], resolved.get("report"))


def _cmd_search(args, resolved) -> int:
    corpus = _read_corpus(args.input)
    plan = kfold_plan(corpus, _coerce(resolved, "k", int), _coerce(resolved, "seed", int))
    templates = tuple(t.strip() for t in str(resolved["templates"]).split(",") if t.strip())
    widths = tuple(int(w) for w in str(resolved["widths"]).split(",") if w.strip())
    ranked = feature_search(
        corpus, plan, templates, widths, _train_params(resolved), _setup(resolved),
        strategy=str(resolved["strategy"]), lemmas=_lemmas(resolved),
        use_dynamic_tags=_coerce(resolved, "dynamic_tags", bool),
    )
    top = _coerce(resolved, "top", int)
    print(f"{'rank':<5} {'overall F':>9}  {'w':>2}  templates")
    for rank, (config, f_value) in enumerate(ranked[:top], start=1):
        shown = "NA" if f_value is None else f"{f_value:9.1f}"
        print(f"{rank:<5} {shown:>9}  {config.context_width:>2}  {','.join(config.active)}")
    report_path = resolved.get("report")
    if report_path:
        atomic_write_json(report_path, [
            {"templates": list(c.active), "width": c.context_width,
             "overall_f": None if f is None else round(f, 4)}
            for c, f in ranked
        ])
    _manifest(args, resolved, [args.input], [report_path], report_path)
    return 0


def _cmd_experiment(args, resolved) -> int:
    corpus = _read_corpus(args.input)
    plan = kfold_plan(corpus, _coerce(resolved, "k", int), _coerce(resolved, "seed", int))
    gold = _read_corpus(resolved["gold"]) if resolved.get("gold") else None
    overrides = {}
    if resolved.get("cost_agr2") is not None or resolved.get("cost_agr3") is not None:
        overrides["Tr23_W"] = (_coerce(resolved, "cost_agr2", float),
                               _coerce(resolved, "cost_agr3", float))
    result = confidence_experiment(corpus, plan, _feature_config(resolved),
                                   _train_params(resolved), gold,
                                   lemmas=_lemmas(resolved), setup_costs=overrides)
    table = result.format_table()
    print(table)
    os.makedirs(resolved["out_dir"], exist_ok=True)
    outputs = []
    for (setup, cond), report in sorted(result.cells.items()):
        cell_path = os.path.join(resolved["out_dir"], f"cell_{setup}_{cond}.json")
        atomic_write_json(cell_path, report.to_json_dict())
        outputs.append(cell_path)
    summary_path = os.path.join(resolved["out_dir"], "summary.txt")
    atomic_write_text(summary_path, table + "\n")
    outputs.append(summary_path)
    _manifest(args, resolved, [args.input, resolved.get("gold")], outputs, summary_path)
    return 0


_COMMANDS = {
    "harvest": _cmd_harvest,
    "aggregate": _cmd_aggregate,
    "train": _cmd_train,
    "tag": _cmd_tag,
    "eval": _cmd_eval,
    "cv": _cmd_cv,
    "search": _cmd_search,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = _resolve_options(args)
        return _COMMANDS[args.command](args, resolved)
    except (ModtagError, ValueError, OSError) as exc:
        print(f"modtag {args.command}: error: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())
