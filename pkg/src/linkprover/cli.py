"""Command line entry points: serve the API, replay and check traces,
inspect linkage candidates, and run the finite-model check on a problem.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path as FsPath

from .oracle import ResourceLimit, entails
from .parser import parse_problem
from .state import InvalidAction, Trace, action_to_json, initial_state


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(persist_dir=args.persist)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_check(args) -> int:
    trace = Trace.from_json(FsPath(args.trace).read_text())
    try:
        state = initial_state(trace.problem)
    except Exception as err:
        print(f"problem: error: {err}")
        return 2
    for number, action in enumerate(trace.actions, start=1):
        data = action_to_json(action)
        try:
            state.apply(action)
        except InvalidAction as err:
            print(f"action {number} ({data['type']}): failed: {err}")
            return 2
        print(f"action {number} ({data['type']}): ok")
    goals = len(state.goals)
    if trace.expected_goals is not None and goals != trace.expected_goals:
        print(f"final goals: {goals}, expected {trace.expected_goals}: MISMATCH")
        return 1
    print(f"final goals: {goals}" + (" (as expected)" if trace.expected_goals is not None else ""))
    return 0


def cmd_run(args) -> int:
    problem_text = FsPath(args.problem).read_text()
    state = initial_state(problem_text)
    if args.script:
        trace = Trace.from_json(FsPath(args.script).read_text())
        for action in trace.actions:
            state.apply(action)
    print(state.render(), end="")
    return 0


def _parse_path(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p != "")


def cmd_candidates(args) -> int:
    state = initial_state(FsPath(args.problem).read_text())
    goal = state.goals[0]
    try:
        found = state.candidates(goal.id, args.src_item, _parse_path(args.src_path),
                                 args.dst_item)
    except InvalidAction as err:
        print(f"error: {err}")
        return 2
    for path, kind in found:
        print(f"path={list(path)} kind={kind}")
    if not found:
        print("no valid linkages")
    return 0


def cmd_oracle(args) -> int:
    problem = parse_problem(FsPath(args.problem).read_text())
    try:
        holds = entails(list(problem.hypotheses), problem.conclusion,
                        max_domain=args.max_domain)
    except ResourceLimit as err:
        print(f"skipped: {err}")
        return 3
    print("entailed" if holds else "not entailed")
    return 0 if holds else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="linkprover",
        description="proof-by-linking engine: serve the UI API or work with traces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="start the HTTP session service")
    p_serve.add_argument("--port", type=int, default=int(os.environ.get("PORT", "8000")))
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--persist", default=None, metavar="DIR",
                         help="snapshot sessions as trace JSON in DIR")
    p_serve.set_defaults(fn=cmd_serve)

    p_check = sub.add_parser("check", help="replay a trace and verify it")
    p_check.add_argument("trace")
    p_check.set_defaults(fn=cmd_check)

    p_run = sub.add_parser("run", help="replay actions against a problem file")
    p_run.add_argument("problem")
    p_run.add_argument("--script", default=None, metavar="TRACE")
    p_run.set_defaults(fn=cmd_run)

    p_cand = sub.add_parser("candidates", help="list valid drop targets (debugging)")
    p_cand.add_argument("problem")
    p_cand.add_argument("--src-item", type=int, required=True)
    p_cand.add_argument("--src-path", default="", metavar="I,J,...")
    p_cand.add_argument("--dst-item", type=int, required=True)
    p_cand.set_defaults(fn=cmd_candidates)

    p_oracle = sub.add_parser("oracle", help="finite-model entailment check")
    p_oracle.add_argument("problem")
    p_oracle.add_argument("--max-domain", type=int, default=2)
    p_oracle.set_defaults(fn=cmd_oracle)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
