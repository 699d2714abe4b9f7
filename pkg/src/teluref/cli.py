"""Command-line entry points for every pipeline stage.

Exit codes: 0 success, 1 I/O failure, 2 validation failure. Every command is
deterministic given its flags; all randomness flows from explicit seeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import (
    Conversation,
    Mention,
    Utterance,
    corpus_stats,
    load_conversation,
    save_conversation,
)
from .embeddings import OovPolicy, load_embeddings, save_embeddings
from .errors import TelurefError, ValidationError
from .evaluate import format_report_table, report_rows_to_json, resolve_antecedents
from .mlp import MlpConfig, load_model, save_model
from .pipeline import (
    ExperimentConfig,
    evaluate_on_conversations,
    load_corpus_dir,
    run_ablation,
    train_on_conversations,
)
from .sampling import imbalance_curve_csv
from .service import AnnotationStore, ServiceState, make_server
from .ssf import extract_mention_candidates, parse_ssf_document
from .synthetic import SyntheticCorpusConfig, generate_synthetic_corpus


def _read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_bytes(path, data: bytes) -> None:
    Path(path).write_bytes(data)


def _ablate_blocks(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return ()
    return tuple(b.strip() for b in raw.split(",") if b.strip())


def _load_table(args):
    return load_embeddings(
        Path(args.embeddings).read_bytes(), oov_policy=OovPolicy(args.oov)
    )


def _add_embeddings_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--embeddings", required=True, help="word2vec text file")
    parser.add_argument(
        "--oov", choices=[p.value for p in OovPolicy], default=OovPolicy.HASHED.value,
        help="out-of-vocabulary policy (default: deterministic hashed unit vectors)",
    )


def _experiment_config(args, sampling=None) -> ExperimentConfig:
    mlp = MlpConfig(
        hidden1=args.hidden1,
        hidden2=args.hidden2,
        dropout_prob=args.dropout,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
    )
    return ExperimentConfig(
        sampling=sampling if sampling is not None else args.sampling,
        k_neighbors=args.k_neighbors,
        test_fraction=getattr(args, "test_fraction", 0.2),
        threshold=getattr(args, "threshold", 0.5),
        seed=args.seed,
        mlp=mlp,
    )


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    _add_embeddings_flags(parser)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=100)
    parser.add_argument("--lr", type=float, default=0.001)
    parser.add_argument("--batch-size", type=int, default=128)
    parser.add_argument("--dropout", type=float, default=0.5)
    parser.add_argument("--hidden1", type=int, default=512)
    parser.add_argument("--hidden2", type=int, default=128)
    parser.add_argument("--k-neighbors", type=int, default=5)


# --- commands ---------------------------------------------------------------

def cmd_parse_ssf(args) -> int:
    text = _read_text(args.input)
    sentences = parse_ssf_document(text, strict=args.strict)
    speakers = [s.strip() for s in args.speakers.split(",")] if args.speakers else ["A", "B"]
    utterances = []
    mentions = []
    for i, sentence in enumerate(sentences):
        utterances.append(
            Utterance(
                speaker=speakers[i % len(speakers)],
                text=" ".join(t.form for t in sentence),
                tokens=tuple(sentence),
            )
        )
        for candidate in extract_mention_candidates(sentence):
            mentions.append(
                Mention(
                    id=f"m{len(mentions) + 1}",
                    utterance_index=i,
                    token_span=(candidate.start, candidate.end),
                    head=candidate.head,
                    morph=candidate.morph,
                )
            )
    conv = Conversation(
        id=args.id or Path(args.input).stem,
        speakers=speakers,
        utterances=utterances,
        mentions=mentions,
        chains=[],
    )
    payload = save_conversation(conv)
    if args.output:
        _write_bytes(args.output, payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return 0


def cmd_synth(args) -> int:
    cfg = SyntheticCorpusConfig(
        n_conversations=args.conversations, seed=args.seed, dim=args.dim
    )
    conversations, table = generate_synthetic_corpus(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for conv in conversations:
        (out_dir / f"{conv.id}.json").write_bytes(save_conversation(conv))
    if args.embeddings_out:
        _write_bytes(args.embeddings_out, save_embeddings(table))
    print(f"wrote {len(conversations)} conversations to {out_dir}")
    return 0


def cmd_stats(args) -> int:
    stats = corpus_stats(load_corpus_dir(args.corpus_dir))
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    conversations = load_corpus_dir(args.corpus_dir)
    table = _load_table(args)
    cfg = _experiment_config(args)
    ablate = _ablate_blocks(args.ablate)
    model, report, n_pairs = train_on_conversations(
        conversations, table, cfg, ablate=ablate
    )
    print(f"train pairs: {n_pairs}")
    for i, (loss, acc) in enumerate(zip(report.epoch_losses, report.epoch_accuracies), 1):
        print(f"epoch {i}: loss {loss:.6f} acc {acc:.4f}")
    _write_bytes(args.out, save_model(model))
    print(f"model written to {args.out}")
    if args.report:
        _write_bytes(
            args.report,
            (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8"),
        )
    return 0


def cmd_eval(args) -> int:
    model = load_model(Path(args.model).read_bytes())
    conversations = load_corpus_dir(args.corpus_dir)
    table = _load_table(args)
    report = evaluate_on_conversations(
        model, conversations, table,
        threshold=args.threshold, ablate=_ablate_blocks(args.ablate),
    )
    rows = [("eval", report)]
    sys.stdout.write(format_report_table(rows))
    if args.json:
        _write_bytes(args.json, report_rows_to_json(rows).encode("utf-8"))
    return 0


def cmd_resolve(args) -> int:
    model = load_model(Path(args.model).read_bytes())
    conv = load_conversation(Path(args.conversation).read_bytes())
    table = _load_table(args)
    result = resolve_antecedents(conv, model, table, threshold=args.threshold)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_curve(args) -> int:
    csv = imbalance_curve_csv(args.mentions)
    if args.output:
        _write_bytes(args.output, csv.encode("utf-8"))
    else:
        sys.stdout.write(csv)
    return 0


def cmd_ablation(args) -> int:
    conversations = load_corpus_dir(args.corpus_dir)
    table = _load_table(args)
    cfg = _experiment_config(args)
    blocks = _ablate_blocks(args.blocks) or ("gender", "number", "person", "pop")
    rows = run_ablation(conversations, table, feature_blocks=blocks, cfg=cfg)
    sys.stdout.write(format_report_table(rows, title_col="Features"))
    if args.json:
        _write_bytes(args.json, report_rows_to_json(rows).encode("utf-8"))
    return 0


def cmd_serve(args) -> int:
    corpus_dir = args.corpus or os.environ.get("TELUREF_DATA")
    if not corpus_dir:
        raise ValidationError("no corpus dir: pass --corpus or set TELUREF_DATA")
    conversations = load_corpus_dir(corpus_dir)
    store = AnnotationStore(args.annotations)
    model = table = None
    if args.model and args.embeddings:
        model = load_model(Path(args.model).read_bytes())
        table = _load_table(args)
    state = ServiceState(conversations, store, model=model, table=table)
    server = make_server(
        state, host=args.host, port=args.port, ui_dir=args.ui_dir, quiet=False
    )
    host, port = server.server_address[:2]
    print(
        f"serving {len(state.conversations)} conversations on http://{host}:{port}",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teluref",
        description="Mention-pair anaphora resolution pipeline for dialogue corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-ssf", help="parse shallow-parser SSF output into corpus JSON")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="corpus JSON path (default stdout)")
    p.add_argument("--strict", action="store_true", help="abort on malformed lines")
    p.add_argument("--id", help="conversation id (default: input filename stem)")
    p.add_argument("--speakers", help="comma-separated speaker labels cycled per sentence")
    p.set_defaults(handler=cmd_parse_ssf)

    p = sub.add_parser("synth", help="generate a synthetic corpus and embeddings")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--embeddings-out", help="write a word2vec text file here")
    p.add_argument("-n", "--conversations", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=100)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("stats", help="corpus counts: conversations, mentions, pairs")
    p.add_argument("corpus_dir")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("train", help="train the pair classifier on a corpus directory")
    p.add_argument("corpus_dir")
    _add_train_flags(p)
    p.add_argument("--sampling", choices=["over", "under", "none"], default="over")
    p.add_argument("--ablate", help="comma-separated feature blocks to zero out")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--report", help="write the training report JSON here")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model over a corpus directory")
    p.add_argument("model")
    p.add_argument("corpus_dir")
    _add_embeddings_flags(p)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--ablate", help="feature blocks to zero out (mirror training)")
    p.add_argument("--json", help="write the report JSON here")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("resolve", help="pick an antecedent for every anaphor")
    p.add_argument("model")
    p.add_argument("conversation", help="conversation JSON file")
    _add_embeddings_flags(p)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(handler=cmd_resolve)

    p = sub.add_parser("curve", help="true/false pair counts for k = 0..n as CSV")
    p.add_argument("mentions", type=int, help="number of mentions n")
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    p.set_defaults(handler=cmd_curve)

    p = sub.add_parser("ablation", help="baseline vs one-feature-at-a-time comparison")
    p.add_argument("corpus_dir")
    _add_train_flags(p)
    p.add_argument("--sampling", choices=["over", "under", "none"], default="over")
    p.add_argument("--blocks", help="comma-separated blocks (default gender,number,person,pop)")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--json", help="write the report JSON here")
    p.set_defaults(handler=cmd_ablation)

    p = sub.add_parser("serve", help="run the annotation REST service")
    p.add_argument("--corpus", help="corpus directory (default: env TELUREF_DATA)")
    p.add_argument("--annotations", required=True, help="append-only JSON-lines log path")
    p.add_argument("--model", help="optional model for the suggestions endpoint")
    p.add_argument("--embeddings", help="embeddings for the suggestions endpoint")
    p.add_argument(
        "--oov", choices=[pol.value for pol in OovPolicy],
        default=OovPolicy.HASHED.value,
        help="out-of-vocabulary policy for the suggestions endpoint",
    )
    p.add_argument("--ui-dir", help="directory of built annotator UI assets")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TelurefError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
