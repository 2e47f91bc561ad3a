"""``narrative-net`` command-line entry point."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .alignment import best_match
from .community import partition_rows
from .errors import MalformedOutput, NoMatches, StatsError
from .extraction import HttpClient, MockClient, TokenBudget, extract_corpus
from .io import (
    FormatError,
    read_corpus,
    read_metadata,
    read_networks,
    write_csv,
    write_networks,
)
from .metrics import compute_metrics, metric_columns
from .plots import histogram_svg
from .stats import decade_trend, group_compare
from .taxonomy import dedupe_corpus, dedupe_network, repair_network
from .validation import score_corpus

log = logging.getLogger("narrative_net")

COMPARISON_HEADER = ["metric", "fiction_mean", "nonfiction_mean", "t", "df", "p", "n_fiction", "n_nonfiction"]
TREND_HEADER = ["metric", "group", "r", "p", "n_decades"]
VALIDATION_HEADER = ["volume_id", "attribute", "matched", "correct", "accuracy", "kappa",
                     "unmatched_gold", "unmatched_pred"]
MATCH_HEADER = ["volume_id", "catalog_id", "title_similarity", "author_similarity"]
REJECT_HEADER = ["volume_id", "reason", "detail"]
DEFAULT_SVG_METRICS = [
    "community_count_overall",
    "community_counts_by_type_social",
    "community_counts_by_type_professional",
    "community_counts_by_type_familial",
]


class ConfigError(Exception):
    pass


def _digest(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()


def _write_manifest(path, command: str, inputs: dict, outputs: dict, config: dict, counts: dict,
                    **extra) -> dict:
    manifest = {
        "command": command,
        "version": __version__,
        "inputs": {k: str(v) for k, v in inputs.items() if v is not None},
        "outputs": {k: str(v) for k, v in outputs.items() if v is not None},
        "config_digest": _digest(config),
        "counts": counts,
        **extra,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _resolve(flag, env: str, file_cfg: dict, key: str, default=None):
    """flags > environment > config file > default."""
    if flag is not None:
        return flag
    if env and os.environ.get(env):
        return os.environ[env]
    return file_cfg.get(key, default)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return cfg


# extract


def cmd_extract(args) -> int:
    file_cfg = _load_config(args.config)
    max_ctx = int(_resolve(args.max_context_tokens, "NARRATIVE_NET_MAX_CONTEXT_TOKENS", file_cfg,
                           "max_context_tokens", 1_000_000))
    max_out = int(_resolve(args.max_output_tokens, "NARRATIVE_NET_MAX_OUTPUT_TOKENS", file_cfg,
                           "max_output_tokens", 8_000))
    workers = int(_resolve(args.workers, "", file_cfg, "workers", 4))
    try:
        budget = TokenBudget(max_ctx, max_out)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = {"backend": args.backend, "max_context_tokens": max_ctx, "max_output_tokens": max_out}

    if args.backend == "mock":
        fixtures = _resolve(args.fixtures, "", file_cfg, "fixtures")
        if not fixtures:
            raise ConfigError("--fixtures is required for the mock backend")
        try:
            client = MockClient.from_file(fixtures)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read fixtures {fixtures}: {exc}") from exc
        config["fixtures"] = str(fixtures)
    else:
        url = _resolve(args.api_url, "NARRATIVE_NET_API_URL", file_cfg, "api_url")
        key = _resolve(None, "NARRATIVE_NET_API_KEY", file_cfg, "api_key")
        model = _resolve(args.model, "NARRATIVE_NET_MODEL", file_cfg, "model")
        if not url:
            raise ConfigError("HTTP backend needs NARRATIVE_NET_API_URL, --api-url or api_url in --config")
        client = HttpClient(url, key, model)
        # the key is deliberately left out of the digest
        config.update(api_url=url, model=model)

    try:
        volumes = read_corpus(args.corpus, args.manifest)
    except (OSError, FormatError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    outcomes = extract_corpus(volumes, client, budget, workers=workers)
    networks = [o.network for o in outcomes if o.ok]
    rejects = [(o.volume_id, o.failure.reason, str(o.failure)) for o in outcomes if not o.ok]
    write_networks(args.out, networks)
    rejects_path = args.rejects or Path(str(args.out) + ".rejects.csv")
    write_csv(rejects_path, REJECT_HEADER, rejects)

    counts = {
        "input_volumes": len(volumes),
        "processed": len(networks),
        "rejected": len(rejects),
        "rejected_by_reason": dict(sorted(Counter(r[1] for r in rejects).items())),
        "truncated": sum(o.truncated for o in outcomes if o.ok),
        "malformed_records_dropped": sum(o.malformed_records_dropped for o in outcomes if o.ok),
        "repaired_records": sum(o.repaired_records for o in outcomes if o.ok),
        "duplicate_pairs_dropped": sum(o.duplicate_pairs_dropped for o in outcomes if o.ok),
    }
    _write_manifest(
        args.run_manifest or Path(str(args.out) + ".manifest.json"), "extract",
        {"corpus": args.corpus, "manifest": args.manifest},
        {"networks": args.out, "rejects": rejects_path}, config, counts,
        truncated_volumes=[o.volume_id for o in outcomes if o.ok and o.truncated],
    )
    print(f"extracted {counts['processed']} networks, rejected {counts['rejected']} "
          f"of {counts['input_volumes']} volumes", file=sys.stderr)
    return 0


# clean


def clean_networks(nets):
    """repair -> pair dedup -> corpus dedup; returns (networks, counts)."""
    repaired = dropped = 0
    cleaned = []
    for net in nets:
        net, r = repair_network(net)
        net, d = dedupe_network(net)
        repaired += r
        dropped += d
        cleaned.append(net)
    survivors = dedupe_corpus(cleaned)
    return survivors, {
        "repaired_records": repaired,
        "duplicate_records_dropped": dropped,
        "dropped_networks": len(cleaned) - len(survivors),
    }


def cmd_clean(args) -> int:
    try:
        nets, malformed, bad = read_networks(args.inp)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not nets and bad:
        print(f"error: none of the lines in {args.inp} parse", file=sys.stderr)
        return 1
    survivors, counts = clean_networks(nets)
    write_networks(args.out, survivors)
    counts = {
        "input_networks": len(nets),
        "bad_lines": len(bad),
        "malformed_records_dropped": malformed,
        **counts,
        "output_networks": len(survivors),
    }
    counts["dropped_records"] = counts["malformed_records_dropped"] + counts["duplicate_records_dropped"]
    _write_manifest(args.run_manifest or Path(str(args.out) + ".manifest.json"), "clean",
                    {"networks": args.inp}, {"networks": args.out}, {}, counts,
                    bad_lines=[{"line": n, "error": e} for n, e in bad])
    print(f"cleaned {counts['output_networks']} networks "
          f"(repaired {counts['repaired_records']} records, dropped {counts['dropped_records']} records "
          f"and {counts['dropped_networks']} networks)", file=sys.stderr)
    return 0


# analyze


def _analyze_one(net):
    return compute_metrics(net).flat(), partition_rows(net)


def _numeric_metrics() -> list[str]:
    return [c for c in metric_columns() if c not in ("volume_id", "eigenvector_converged")]


def cmd_analyze(args) -> int:
    try:
        nets, _, bad = read_networks(args.networks)
        meta = {m.volume_id: m for m in read_metadata(args.metadata)} if args.metadata else {}
    except (OSError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_analyze_one, nets, chunksize=16))
    else:
        results = [_analyze_one(n) for n in nets]

    metric_rows = [r for r, _ in results]
    write_csv(out_dir / "metrics.csv", metric_columns(), metric_rows)
    write_csv(out_dir / "communities.csv", ["volume_id", "node", "community_id", "graph_scope"],
              (row for _, rows in results for row in rows))

    joined = []
    for row in metric_rows:
        m = meta.get(row["volume_id"])
        if m is not None and m.is_fiction is not None:
            joined.append({**row, "is_fiction": m.is_fiction, "decade": m.decade})

    notices: list[str] = []
    if not joined:
        notices.append("no networks have fiction/nonfiction metadata; comparisons and trends skipped")
    comparison, trends = [], []
    metrics = _numeric_metrics()
    for metric in metrics if joined else []:
        try:
            res = group_compare(joined, metric)
            comparison.append([metric, res.mean_x, res.mean_y, res.t_statistic, res.degrees_of_freedom,
                               res.p_value, res.n_x, res.n_y])
        except StatsError as exc:
            notices.append(f"comparison {metric}: {type(exc).__name__}: {exc}")
        for group, flag in (("fiction", True), ("nonfiction", False)):
            try:
                res = decade_trend(joined, metric, flag)
                trends.append([metric, group, res.r, res.p_value, res.n])
            except StatsError as exc:
                notices.append(f"trend {metric}/{group}: {type(exc).__name__}: {exc}")
    write_csv(out_dir / "comparison.csv", COMPARISON_HEADER, comparison)
    write_csv(out_dir / "trends.csv", TREND_HEADER, trends)

    svgs = []
    if args.svg:
        hist_dir = out_dir / "histograms"
        hist_dir.mkdir(exist_ok=True)
        for metric in args.svg_metrics or DEFAULT_SVG_METRICS:
            groups = {"fiction": [], "nonfiction": []}
            for row in joined:
                if row.get(metric) is not None:
                    groups["fiction" if row["is_fiction"] else "nonfiction"].append(float(row[metric]))
            path = hist_dir / f"{metric}.svg"
            path.write_text(histogram_svg(groups, metric, bins=args.bins), encoding="utf-8")
            svgs.append(str(path))

    with open(out_dir / "notices.txt", "w", encoding="utf-8") as fh:
        fh.writelines(n + "\n" for n in notices)
    for n in notices:
        log.info(n)
    _write_manifest(
        out_dir / "analyze.manifest.json", "analyze",
        {"networks": args.networks, "metadata": args.metadata},
        {"out_dir": out_dir}, {"bins": args.bins, "svg": args.svg}, {
            "networks": len(nets),
            "bad_lines": len(bad),
            "with_metadata": len(joined),
            "comparisons": len(comparison),
            "trends": len(trends),
        }, notices=notices, histograms=svgs,
    )
    print(f"analyzed {len(nets)} networks into {out_dir}", file=sys.stderr)
    return 0


# validate


def cmd_validate(args) -> int:
    try:
        gold, _, _ = read_networks(args.gold)
        pred, _, _ = read_networks(args.pred)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        per_volume, aggregate = score_corpus(gold, pred, fuzzy=args.fuzzy_pairs)
    except NoMatches:
        print("error: gold and pred share no volume_ids", file=sys.stderr)
        return 1
    rows = []
    for vid, scores in list(per_volume.items()) + [("ALL", aggregate)]:
        for s in scores:
            rows.append([vid, s.attribute, s.matched, s.correct, s.accuracy, s.kappa,
                         s.unmatched_gold, s.unmatched_pred])
    write_csv(args.out, VALIDATION_HEADER, rows)
    for s in aggregate:
        acc = "n/a" if s.accuracy is None else f"{s.accuracy:.4f}"
        print(f"{s.attribute}: accuracy {acc} over {s.matched} pairs", file=sys.stderr)
    return 0


# align


def cmd_align(args) -> int:
    required = ("volume_id", "title", "author")
    try:
        left = read_metadata(args.left, required)
        right = read_metadata(args.right, required)
    except (OSError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows, unmatched = [], []
    for vol in left:
        cand = best_match(vol, right, args.threshold)
        if cand is None:
            unmatched.append([vol.volume_id, vol.title, vol.author])
        else:
            rows.append([vol.volume_id, cand.catalog_id, cand.title_similarity, cand.author_similarity])
    write_csv(args.out, MATCH_HEADER, rows)
    unmatched_path = args.unmatched or Path(str(args.out) + ".unmatched.csv")
    write_csv(unmatched_path, ["volume_id", "title", "author"], unmatched)
    print(f"matched {len(rows)} of {len(left)} volumes; {len(unmatched)} unmatched listed in "
          f"{unmatched_path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="narrative-net", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract character networks with a structured-output backend")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="directory of plain-text volumes (filename stem = volume_id)")
    src.add_argument("--manifest", help="CSV with volume_id,path columns")
    p.add_argument("--backend", choices=["mock", "http"], default="mock")
    p.add_argument("--fixtures", help="mock backend script (JSON: volume_id -> response)")
    p.add_argument("--api-url")
    p.add_argument("--model")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--max-context-tokens", type=int)
    p.add_argument("--max-output-tokens", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--rejects")
    p.add_argument("--run-manifest")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("clean", help="repair coarse labels and drop duplicate pairs and networks")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--run-manifest")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("analyze", help="metrics, communities, group comparisons and trends")
    p.add_argument("--networks", required=True)
    p.add_argument("--metadata")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--svg", action="store_true", help="write grouped histogram SVGs")
    p.add_argument("--svg-metrics", nargs="+")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="score predicted annotations against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fuzzy-pairs", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("align", help="match volumes to a catalog by title/author similarity")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--out", required=True)
    p.add_argument("--unmatched")
    p.set_defaults(func=cmd_align)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
