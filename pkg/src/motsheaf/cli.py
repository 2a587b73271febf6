"""Command line entry point: ``motsheaf VERB [options]``.

Exit codes: 0 success, 1 engine error, 2 scene error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .runner import EngineError, Report, ResultCache, Session, UnknownSuite, default_cache_dir, run
from .scene import Command, RingMismatch, Scene, SceneError, UnresolvedReference, parse_scene
from .suites import SUITES

OK, ENGINE, SCENE, VERIFY = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, scene_optional=False):
    if scene_optional:
        p.add_argument("scene", nargs="?", help="scene file (omit for built-in fixtures only)")
    else:
        p.add_argument("scene", help="scene file")
    p.add_argument("--ring", choices=("Z", "Q"))
    p.add_argument("--filtration", help="default filtration name for direct images")
    p.add_argument("--unroll-depth", type=int, default=2)
    p.add_argument("--cache-dir", help="result cache directory (default: $MOTSHEAF_CACHE_DIR or ~/.cache/motsheaf)")
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")
    p.add_argument("--emit", choices=("text", "structured"), default="text")
    p.add_argument("--timing", action="store_true", help="add wall-clock seconds to each result")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motsheaf", description="Motivic sheaves on simplicial bases.")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("parse", help="validate a scene and print its summary")
    _common(p)
    p = sub.add_parser("run", help="run every command of a scene")
    _common(p)
    p = sub.add_parser("verify", help="run a property suite over a scene and built-in fixtures")
    _common(p, scene_optional=True)
    p.add_argument("--suite", required=True, help=", ".join(sorted(SUITES)))

    p = sub.add_parser("pushforward", help="K complex and r^j of one vertex along a map")
    _common(p)
    p.add_argument("fragment")
    p.add_argument("pair")
    p.add_argument("map")
    p = sub.add_parser("tensor", help="tensor a fragment vertex with a cellular pair")
    _common(p)
    p.add_argument("fragment")
    p.add_argument("left")
    p.add_argument("pair")
    p = sub.add_parser("twist", help="Tate twist of a vertex in the localized category")
    _common(p)
    p.add_argument("fragment")
    p.add_argument("pair")
    p.add_argument("weight", type=int)
    p = sub.add_parser("realize", help="realization of a vertex as a cellular sheaf")
    _common(p)
    p.add_argument("fragment")
    p.add_argument("pair")

    p = sub.add_parser("report", help="re-render a saved structured report")
    p.add_argument("path")
    p.add_argument("--emit", choices=("text", "structured"), default="text")
    return ap


def _load(args) -> Scene:
    if getattr(args, "scene", None) is None:
        scene = Scene()
    else:
        scene = parse_scene(args.scene)
    if args.ring:
        if scene.ring_declared and scene.ring != args.ring:
            raise RingMismatch([(0, f"--ring {args.ring} conflicts with scene ring {scene.ring}")])
        scene.ring = args.ring
    if args.filtration and args.filtration not in scene.filtrations:
        raise SceneError([(0, f"unknown filtration {args.filtration!r}")])
    return scene


def _session(args, scene: Scene) -> Session:
    if args.no_cache:
        cache = ResultCache(None)
    else:
        cache = ResultCache(args.cache_dir or default_cache_dir())
    return Session(scene, args.ring, args.unroll_depth, args.filtration, cache, args.timing)


def verify(scene: Scene, suite: str, session: Session | None = None) -> Report:
    if suite not in SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES))}")
    checks = SUITES[suite](session if scene.declarations else None)
    rep = Report(dict(scene.summary(), suite=suite))
    rep.results = [c.as_dict() for c in checks]
    rep.failures = sum(not c.passed for c in checks)
    return rep


def _single(args, scene: Scene) -> Scene:
    """A copy of the scene whose only command is the one given on the command line."""
    verb = args.verb
    names = {"pushforward": ("fragment", "pair", "map"), "tensor": ("fragment", "left", "pair"),
             "twist": ("fragment", "pair", "weight"), "realize": ("fragment", "pair")}[verb]
    argv = tuple(str(getattr(args, n)) for n in names)
    opts = {"filtration": args.filtration} if verb == "pushforward" and args.filtration else {}
    out = Scene(**{k: getattr(scene, k) for k in scene.__dataclass_fields__})
    out.commands = [Command(verb, argv, opts, 0)]
    missing = [n for n, table in zip(argv, _tables(verb, scene)) if table is not None and n not in table]
    if missing:
        raise UnresolvedReference([(0, f"unknown name {n!r}") for n in missing])
    return out


def _tables(verb, s: Scene):
    return {
        "pushforward": (s.fragments, s.pairs, s.maps),
        "tensor": (s.fragments, s.pairs, s.pairs),
        "twist": (s.fragments, s.pairs, None),
        "realize": (s.fragments, s.pairs),
    }[verb]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.verb == "report":
            data = json.loads(open(args.path, encoding="utf-8").read())
            rep = Report(data["scene"], data["results"], data["failures"])
            out.write(rep.emit(args.emit))
            return VERIFY if rep.failures else OK
        scene = _load(args)
        if args.verb == "parse":
            out.write(Report(scene.summary()).emit(args.emit))
            return OK
        session = _session(args, scene)
        if args.verb == "verify":
            rep = verify(scene, args.suite, session)
            out.write(rep.emit(args.emit))
            return VERIFY if rep.failures else OK
        if args.verb != "run":
            scene = _single(args, scene)
            session.scene = scene
        rep = run(scene, session)
        out.write(rep.emit(args.emit))
        return OK
    except SceneError as e:
        print(f"scene error ({type(e).__name__}):\n{e}", file=sys.stderr)
        return SCENE
    except UnknownSuite as e:
        print(f"error: {e}", file=sys.stderr)
        return SCENE
    except EngineError as e:
        print(f"engine error: {e}", file=sys.stderr)
        return ENGINE
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ENGINE


if __name__ == "__main__":
    sys.exit(main())
