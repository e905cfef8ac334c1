"""Command-line interface: census, sample, summarize, measures, maxent,
bounds, learn-bootstrap, compare, and verify-appendix-b.

File formats: JSON for reports (with an embedded run manifest), JSONL for
graph streams, CSV for plot-ready tables. Floats are serialised with
full round-trip precision (repr, up to 17 significant digits), so a given
manifest always produces bit-identical output.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 input-format error, 4 infeasible request.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import numbers
import os
import sys
import time

import numpy as np

from . import __version__, census, measures
from .edgedist import fit_bernoulli, fit_trinomial
from .errors import FormatError, InfeasibleError
from .graphs import read_jsonl, write_jsonl
from .learning import Dataset, LearnerSpec, bootstrap
from .sampling import McmcConfig, sample_uniform_dags, sample_uniform_ugs
from .spectral import FAMILY_BERNOULLI, FAMILY_TRINOMIAL, eigenvalues_symmetric, simplex_position

# Golden values for the verify command: per n,
# (p_arrow, p_zero, variance, shared |cov|), printed to 6 digits or exact.
_GOLDEN_DAG_CENSUS = {
    3: (0.32, 0.36, 0.64, 0.08),
    4: (0.309392, 0.381215, 0.618784, 0.081031),
    5: (0.301082, 0.397834, 0.602165, 0.081691),
}
_GOLDEN_TOL = 1e-6


# ---------------------------------------------------------------------------
# JSON serialisation with stable float formatting


def _format_json(value, indent=0):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{pad}  {json.dumps(str(key))}: {_format_json(val, indent + 1)}"
            for key, val in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in value)
        if flat:
            return "[" + ", ".join(_format_json(v) for v in value) + "]"
        items = ",\n".join(f"{pad}  {_format_json(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return "true" if value is True else ("false" if value is False else "null")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        x = float(value)
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError("non-finite float in report")
        return repr(x)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_format_json(payload))
        fh.write("\n")


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _manifest(command, args, seed=None, inputs=()):
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return {
        "command": command,
        "arguments": {key: val for key, val in sorted(vars(args).items()) if key != "func"},
        "seed": seed,
        "version": __version__,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", stamp),
    }


def _default_seed(value):
    if value is not None:
        return value
    env = os.environ.get("GE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise FormatError(f"GE_SEED is not an integer: {env!r}") from None
    return 0


# ---------------------------------------------------------------------------
# subcommands


def _cmd_census(args):
    threads = args.threads or os.cpu_count() or 1
    if args.undirected:
        acc = census.census_ugs(args.nodes)
        summary = acc.to_bernoulli_summary()
        family = FAMILY_BERNOULLI
    else:
        acc = census.census_dags(args.nodes, threads=threads, allow_huge=args.allow_huge)
        summary = acc.to_trinomial_summary()
        family = FAMILY_TRINOMIAL
    spectrum = eigenvalues_symmetric(summary.sigma, family=family)
    payload = {
        "schema": "graphvar/census.v1",
        "manifest": _manifest("census", args),
        "family": family,
        "n": acc.n,
        "k": acc.k,
        "graph_count": acc.graph_count,
        "average_arc_count": acc.average_arc_count,
        "marginal_counts": acc.marginal_counts.tolist(),
        "marginals": acc.marginal_frequencies.tolist(),
        "pair_joint_counts": acc.pair_joint_counts.tolist(),
        "sigma": summary.sigma.tolist(),
        "eigenvalues": spectrum.eigenvalues.tolist(),
    }
    _write_json(args.out, payload)
    print(f"census n={acc.n}: {acc.graph_count} graphs -> {args.out}")
    return 0


def _cmd_sample(args):
    seed = _default_seed(args.seed)
    if args.undirected:
        graphs = sample_uniform_ugs(args.nodes, args.samples, seed=seed)
    else:
        cfg = McmcConfig(
            n=args.nodes, sample_count=args.samples, seed=seed,
            burn_in=args.burn_in, thin=args.thin, chains=args.chains,
        )
        graphs = sample_uniform_dags(cfg, threads=args.threads or os.cpu_count() or 1)
    count = write_jsonl(graphs, args.out)
    print(f"sampled {count} graphs -> {args.out}")
    return 0


def _read_weights(path):
    weights = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                weights.append(float(line))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not weights:
        raise FormatError(f"{path}: no weights found")
    return np.asarray(weights)


def _cmd_summarize(args):
    inputs = [args.infile] + ([args.weights] if args.weights else [])
    weights = _read_weights(args.weights) if args.weights else None
    graphs = []
    for g in read_jsonl(args.infile):
        graphs.append(g)
    if not graphs:
        raise FormatError(f"{args.infile}: no graph records")
    directed = graphs[0].directed
    try:
        if directed:
            summary = fit_trinomial(graphs, weights=weights)
            family = FAMILY_TRINOMIAL
            marginals = summary.marginals.tolist()
        else:
            summary = fit_bernoulli(graphs, weights=weights)
            family = FAMILY_BERNOULLI
            marginals = summary.p.tolist()
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    spectrum = eigenvalues_symmetric(summary.sigma, family=family)
    payload = {
        "schema": "graphvar/summary.v1",
        "manifest": _manifest("summarize", args, seed=args.seed, inputs=inputs),
        "family": family,
        "n": summary.n,
        "k": summary.k,
        "records": len(graphs),
        "weight_total": summary.weight_total,
        "seed": args.seed,
        "marginals": marginals,
        "mean": (summary.mean if directed else summary.p).tolist(),
        "sigma": summary.sigma.tolist(),
        "eigenvalues": spectrum.eigenvalues.tolist(),
    }
    _write_json(args.out, payload)
    print(f"summarized {len(graphs)} graphs ({family}) -> {args.out}")
    return 0


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg})") from None


def _cmd_measures(args):
    data = _load_json(args.summary)
    for field in ("family", "n", "k", "sigma"):
        if field not in data:
            raise FormatError(f"{args.summary}: missing field {field!r}")
    family = data["family"] if args.family == "auto" else args.family
    if family not in (FAMILY_BERNOULLI, FAMILY_TRINOMIAL):
        raise FormatError(f"unknown family {family!r}")
    n = data["n"]
    sigma = np.asarray(data["sigma"], dtype=np.float64)
    source = "exact" if args.target == "exact" else "approximate"
    ref = measures.maxent_reference(n, family, source=source)
    report = measures.variability_report(
        sigma, family, n=n, target_variance=ref.arc_variance,
        gv_drop_below=args.gv_drop,
    )
    spectrum = eigenvalues_symmetric(sigma, family=family)
    position = simplex_position(spectrum, family=family, maxent_variance=ref.arc_variance)
    payload = {
        "schema": "graphvar/measures.v1",
        "manifest": _manifest("measures", args, inputs=[args.summary]),
        "family": family,
        "n": n,
        "k": report.k,
        "k_reduced": report.k_reduced,
        "var_t": report.var_t,
        "var_g": report.var_g,
        "var_f": report.var_f,
        "target_description": report.target_description,
        "normalized": {
            "vt": report.normalized[0],
            "vg": report.normalized[1],
            "vf": report.normalized[2],
        },
        "bounds_used": report.bounds_used,
        "simplex": {
            "coordinate": position.coordinate,
            "distance_to_origin": position.distance_to_origin,
            "distance_to_maxent": position.distance_to_maxent,
        },
        "maxent": {
            "source": ref.source,
            "arc_variance": ref.arc_variance,
            "cov_bound": ref.cov_bound,
            "cor_bound": ref.cor_bound,
        },
    }
    _write_json(args.out, payload)
    vt, vg, vf = report.normalized
    print(f"measures ({family}, k={report.k}): vt={vt:.6f} vg={vg:.6f} vf={vf:.6f} -> {args.out}")
    return 0


def _cmd_maxent(args):
    source = "exact" if args.source == "exact" else "approximate"
    ref = measures.maxent_reference(args.nodes, args.family, source=source)
    payload = {
        "schema": "graphvar/maxent.v1",
        "manifest": _manifest("maxent", args),
        "n": ref.n,
        "k": ref.k,
        "family": ref.family,
        "source": ref.source,
        "marginals": list(ref.marginals),
        "arc_variance": ref.arc_variance,
        "cov_bound": ref.cov_bound,
        "cor_bound": ref.cor_bound,
        "sigma_ref": np.asarray(ref.sigma_ref).tolist(),
    }
    _write_json(args.out, payload)
    print(f"maxent reference n={ref.n} ({ref.family}, {ref.source}) -> {args.out}")
    return 0


def _parse_node_range(text):
    if ".." in text:
        lo, _, hi = text.partition("..")
    else:
        lo = hi = text
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise FormatError(f"invalid node range {text!r} (use N or N..M)") from None
    if lo < 2 or hi < lo:
        raise FormatError(f"invalid node range {text!r}")
    return lo, hi


def _cmd_bounds(args):
    lo, hi = _parse_node_range(args.nodes)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("n,cov_bound,cor_bound,p_arrow,p_zero\n")
        for n in range(lo, hi + 1):
            bound = measures.fmg_covariance_bound(n)
            _, p_zero, p_arrow = measures.approx_maxent_marginals(n)
            fh.write(f"{n},{bound.cov_bound!r},{bound.cor_bound!r},{p_arrow!r},{p_zero!r}\n")
    print(f"bounds for n={lo}..{hi} -> {args.out}")
    return 0


def _parse_learner(text):
    head, _, rest = text.partition(":")
    if head == "mi":
        try:
            threshold = float(rest) if rest else 0.01
        except ValueError:
            raise FormatError(f"invalid MI threshold {rest!r}") from None
        return LearnerSpec(kind="mi_skeleton", threshold=threshold)
    if head == "hc":
        kwargs = {}
        if rest:
            for part in rest.split(","):
                key, _, val = part.partition("=")
                if key not in ("max_iter", "restarts"):
                    raise FormatError(f"unknown hc option {key!r}")
                try:
                    kwargs[key] = int(val)
                except ValueError:
                    raise FormatError(f"invalid hc option value {val!r}") from None
        return LearnerSpec(kind="hc_bic", **kwargs)
    raise FormatError(f"unknown learner {text!r} (use mi:<threshold> or hc[:opts])")


def _cmd_learn_bootstrap(args):
    seed = _default_seed(args.seed)
    spec = _parse_learner(args.learner)
    data = Dataset.from_csv(args.data)
    run = bootstrap(data, spec, args.replicates, seed=seed)
    report = run.report
    payload = {
        "schema": "graphvar/run.v1",
        "manifest": _manifest("learn-bootstrap", args, seed=seed, inputs=[args.data]),
        "learner": run.learner,
        "family": run.family,
        "n": data.n_cols,
        "k": report.k,
        "replicates": run.replicates,
        "seed": seed,
        "var_t": report.var_t,
        "var_g": report.var_g,
        "var_f": report.var_f,
        "normalized": {
            "vt": report.normalized[0],
            "vg": report.normalized[1],
            "vf": report.normalized[2],
        },
        "bounds_used": report.bounds_used,
        "sigma": np.asarray(run.summary.sigma).tolist(),
        "eigenvalues": run.spectral.eigenvalues.tolist(),
    }
    _write_json(args.out, payload)
    vt = report.normalized[0]
    print(f"bootstrap {run.learner} R={run.replicates}: vt={vt:.6f} -> {args.out}")
    return 0


def _cmd_compare(args):
    loaded = []
    for path in args.runs:
        data = _load_json(path)
        for field in ("family", "normalized", "learner"):
            if field not in data:
                raise FormatError(f"{path}: missing field {field!r}")
        loaded.append((path, data))
    families = {data["family"] for _, data in loaded}
    if len(families) > 1:
        raise ValueError("cannot compare runs across graph families")
    values = [data["normalized"][args.criterion] for _, data in loaded]
    best = min(values)
    index = values.index(best)
    for rank, (path, data) in enumerate(loaded):
        marker = "*" if rank == index else " "
        print(f"{marker} {data['normalized'][args.criterion]:.6f}  {data['learner']}  ({path})")
    tied = values.count(best) > 1
    print(f"selected: index={index} learner={loaded[index][1]['learner']} "
          f"criterion={args.criterion} value={best!r} tied={str(tied).lower()}")
    return 0


def _cmd_verify_appendix_b(args):
    failures = 0
    for n, (p_arrow, p_zero, variance, cov) in sorted(_GOLDEN_DAG_CENSUS.items()):
        summary = census.census_dags(n).to_trinomial_summary()
        got_arrow = float(summary.marginals[0, 2])
        got_zero = float(summary.marginals[0, 1])
        got_var = float(summary.variances[0])
        off = np.abs(summary.sigma - np.diag(np.diag(summary.sigma)))
        got_cov = float(off.max())
        for label, got, want in (
            ("p(arrow)", got_arrow, p_arrow),
            ("p(none)", got_zero, p_zero),
            ("VAR", got_var, variance),
            ("|COV|", got_cov, cov),
        ):
            ok = abs(got - want) < _GOLDEN_TOL
            failures += 0 if ok else 1
            print(f"{'PASS' if ok else 'FAIL'} n={n} {label}: got {got!r}, expected {want}")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="graphvar",
        description="Edge-level distributions and structural variability of graph structures.",
    )
    parser.add_argument("--version", action="version", version=f"graphvar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="exact enumeration census")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--allow-huge", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("sample", help="uniform random graph sampling")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("summarize", help="fit the edge distribution of a graph stream")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--seed", type=int, default=None, help="recorded as provenance only")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("measures", help="variability statistics of a summary")
    p.add_argument("--summary", required=True)
    p.add_argument("--family", choices=["auto", FAMILY_BERNOULLI, FAMILY_TRINOMIAL],
                   default="auto")
    p.add_argument("--target", choices=["approx", "exact"], default="approx")
    p.add_argument("--gv-drop", type=float, default=measures.DEFAULT_GV_DROP)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_measures)

    p = sub.add_parser("maxent", help="maximum-entropy reference values")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--family", choices=[FAMILY_BERNOULLI, FAMILY_TRINOMIAL], required=True)
    p.add_argument("--source", choices=["approx", "exact"], default="approx")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_maxent)

    p = sub.add_parser("bounds", help="arc covariance/correlation bounds table")
    p.add_argument("--nodes", required=True, help="N or N..M")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("learn-bootstrap", help="bootstrap a structure learner")
    p.add_argument("--data", required=True)
    p.add_argument("--learner", required=True, help="mi:<threshold> or hc[:max_iter=..,restarts=..]")
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_learn_bootstrap)

    p = sub.add_parser("compare", help="rank bootstrap runs by a criterion")
    p.add_argument("--runs", nargs="+", required=True)
    p.add_argument("--criterion", choices=["vt", "vg", "vf"], default="vt")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("verify-appendix-b", help="diff the small censuses against golden values")
    p.set_defaults(func=_cmd_verify_appendix_b)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: input-format: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: input-format: missing file: {exc.filename}", file=sys.stderr)
        return 3
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
