#!/usr/bin/env python3
"""
Main entry point for the dipole-removal toolkit
"""

import argparse
import asyncio
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

# Add the project directory to path
sys.path.append(str(Path(__file__).parent))

from dual import dualize
from exceptions import DipoleError, MalformedInput
from forms import VertexFunction
from lattice import (
    LatticeDomain,
    Relaxer,
    constant_boundary,
    discretize,
    domain_from_spec,
    energy,
    lift_boundary,
    profile_from_spec,
    star_boundary,
    vorticity,
)
from logger import logger, setup_logging
from oracles import run_verification
from pipeline import DipolePipeline
from scenario import Scenario, load_complex, load_lattice, load_scenario, save_scenario, write_json, write_table
from settings import Settings, get_settings

USAGE_EXIT_CODE = 64

PSI = {
    "identity": lambda t: t,
    "smoothstep": lambda t: t * t * (3.0 - 2.0 * t),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Dipole removal for discrete vortex and dislocation energies")
    parser.add_argument("--config", type=str, default="config.json", help="Path to configuration file")
    parser.add_argument("--tolerance", type=float, help="Integrality tolerance (default 1e-9)")
    parser.add_argument("--log-level", type=str, help="Logging level")
    parser.add_argument("--seed", type=int, help="Seed for random choices")
    commands = parser.add_subparsers(dest="command", required=True)

    lattice = commands.add_parser("lattice", help="Lattice discretizations")
    lattice_cmd = lattice.add_subparsers(dest="action", required=True)
    gen = lattice_cmd.add_parser("gen", help="Discretize a domain")
    gen.add_argument("--domain", type=str, default="square:1", help="square:h | square:x0,x1,y0,y1 | disk:cx,cy,r | polygon:x,y;x,y;...")
    gen.add_argument("--epsilon", type=str, help="Lattice spacing (exact decimal or fraction)")
    gen.add_argument("--output", type=str, required=True, help="Lattice JSON file")

    boundary = commands.add_parser("boundary", help="Boundary data on a lattice")
    boundary.add_argument("kind", choices=["star", "lift", "const"])
    boundary.add_argument("--input", type=str, required=True, help="Lattice or scenario JSON")
    boundary.add_argument("--psi", choices=sorted(PSI), default="identity", help="Profile of the star datum")
    boundary.add_argument("--field", choices=["radial"], default="radial", help="Unit-modulus field to lift")
    boundary.add_argument("--lipschitz", type=float, help="Lipschitz constant of the lifted field, checked at ε")
    boundary.add_argument("--value", type=float, default=0.0, help="Constant boundary value")
    boundary.add_argument("--fill", choices=["zero", "angle", "random"], default="zero", help="Interior initialization")
    boundary.add_argument("--output", type=str, required=True, help="Scenario JSON file")

    relax = commands.add_parser("relax", help="Lower the energy by coordinate descent")
    relax.add_argument("--input", type=str, required=True)
    relax.add_argument("--profile", type=str, default="sd", help="sd | xy | custom:<file>")
    relax.add_argument("--sweeps", type=int)
    relax.add_argument("--output", type=str, required=True)

    pipeline = commands.add_parser("pipeline", help="Dipole-removal pipeline")
    pipeline_cmd = pipeline.add_subparsers(dest="action", required=True)
    run = pipeline_cmd.add_parser("run", help="Run on one or more scenarios")
    run.add_argument("--input", type=str, nargs="+", required=True)
    run.add_argument("--profile", type=str, action="append", default=[], help="Extra profile to report")
    run.add_argument("--workers", type=int, help="Scenarios processed concurrently")
    run.add_argument("--output-dir", type=str, default="output")

    energy_cmd = commands.add_parser("energy", help="Energy of a scenario")
    energy_cmd.add_argument("--input", type=str, required=True)
    energy_cmd.add_argument("--profile", type=str, action="append", help="sd | xy | custom:<file> (repeatable)")

    vort = commands.add_parser("vorticity", help="Vortex charges of a scenario")
    vort.add_argument("--input", type=str, required=True)
    vort.add_argument("--output", type=str, help="charges.csv or charges.json")

    dual = commands.add_parser("dualize", help="Dual graph of a complex")
    dual.add_argument("--input", type=str, required=True)
    dual.add_argument("--output", type=str, required=True)

    verify = commands.add_parser("verify", help="Run the oracle suite")
    verify.add_argument("--quick", action="store_true", help="Reduced instance counts")
    verify.add_argument("--output", type=str, help="Write the table to CSV or JSON")
    return parser


def interior_fill(lattice: LatticeDomain, u0: VertexFunction, how: str, seed: Optional[int]) -> VertexFunction:
    values = dict(u0.values)
    rng = np.random.default_rng(seed)
    for v in lattice.interior_vertices:
        if how == "zero":
            values[v] = 0.0
        elif how == "angle":
            x, y = lattice.coordinates(v)
            values[v] = 0.0 if x == 0 and y == 0 else (math.atan2(y, x) / (2 * math.pi)) % 1.0
        else:
            values[v] = float(rng.uniform(0.0, 1.0))
    return VertexFunction(values)


def make_boundary(args: argparse.Namespace, settings: Settings) -> Scenario:
    lattice = load_lattice(args.input)
    if args.kind == "star":
        u0 = star_boundary(PSI[args.psi], lattice, rays=settings.lattice.star_rays)
    elif args.kind == "lift":
        modulus = (lambda t: args.lipschitz * t) if args.lipschitz is not None else None
        u0 = lift_boundary(lambda x, y: complex(x, y), lattice, modulus)
    else:
        u0 = constant_boundary(lattice, args.value)
    return Scenario(u=interior_fill(lattice, u0, args.fill, args.seed), lattice=lattice)


def run_scenario(
    path: str, settings: Settings, profiles: List[str], output_dir: Path, seed: Optional[int]
) -> Tuple[str, int, str]:
    """One pipeline run; returns (scenario, exit code, summary)"""
    try:
        scenario = load_scenario(path)
        names = list(profiles) + ([scenario.profile] if scenario.profile else [])
        u_tilde, report = DipolePipeline(settings, seed=seed).solve(
            scenario.complex, scenario.u, [profile_from_spec(p) for p in names]
        )
        save_scenario(scenario.with_u(u_tilde), output_dir / f"{scenario.name}.out.json")
        write_json(report.to_dict(), output_dir / f"{scenario.name}.report.json")
        return scenario.name, 0, (
            f"{report.certificate['method']}, total vorticity {report.total_vorticity}, "
            f"max ratio {report.max_ratio:.6g}"
        )
    except DipoleError as e:
        logger.error(f"Scenario {path} failed: {e}")
        return Path(path).stem, e.exit_code, f"{type(e).__name__}: {e}"
    except Exception as e:
        logger.critical(f"Scenario {path} crashed: {e}", exc_info=True)
        return Path(path).stem, 1, f"{type(e).__name__}: {e}"


async def run_pipelines(args: argparse.Namespace, settings: Settings) -> int:
    output_dir = Path(args.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    semaphore = asyncio.Semaphore(max(1, args.workers or settings.workers))

    async def one(path: str) -> Tuple[str, int, str]:
        async with semaphore:
            return await asyncio.to_thread(run_scenario, path, settings, args.profile, output_dir, args.seed)

    results = await asyncio.gather(*(one(path) for path in args.input))
    for name, code, summary in results:
        print(f"{'OK ' if code == 0 else 'ERR'} {name}: {summary}")
    return max(code for _, code, _ in results)


async def main(argv: Optional[List[str]] = None) -> int:
    """Main function; returns the process exit code"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2, which already means a violated hypothesis
        return USAGE_EXIT_CODE if e.code else 0

    overrides = {}
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    if args.log_level:
        overrides["log_level"] = args.log_level
    settings = get_settings(args.config, **overrides)
    setup_logging(settings.logging.level, settings.logging.file)
    logger.debug(f"Command: {args.command}")

    try:
        if args.command == "lattice":
            epsilon = args.epsilon or str(settings.lattice.epsilon)
            lattice = discretize(domain_from_spec(args.domain), epsilon)
            write_json(lattice.to_dict(), args.output)
            print(f"{len(lattice.cells)} cells, {lattice.num_vertices} points → {args.output}")

        elif args.command == "boundary":
            scenario = make_boundary(args, settings)
            save_scenario(scenario, args.output)
            print(f"Boundary datum on {len(scenario.lattice.boundary_vertices)} points → {args.output}")

        elif args.command == "relax":
            scenario = load_scenario(args.input)
            if scenario.lattice is None:
                raise MalformedInput("Relaxation needs a lattice scenario")
            relaxer = Relaxer(settings)
            u = relaxer.solve(scenario.u, scenario.lattice, profile_from_spec(args.profile), args.sweeps)
            save_scenario(scenario.with_u(u), args.output)
            print(f"Energy {relaxer.history[0]:.10g} → {relaxer.history[-1]:.10g} in {len(relaxer.history) - 1} sweep(s)")

        elif args.command == "pipeline":
            return await run_pipelines(args, settings)

        elif args.command == "energy":
            scenario = load_scenario(args.input)
            if scenario.lattice is None:
                raise MalformedInput("Energy needs a lattice scenario")
            names = args.profile or ([scenario.profile] if scenario.profile else ["sd", "xy"])
            rows = [{"profile": p, "energy": energy(scenario.u, scenario.lattice, profile_from_spec(p))} for p in names]
            print(pd.DataFrame(rows).to_string(index=False))

        elif args.command == "vorticity":
            scenario = load_scenario(args.input)
            if scenario.lattice is None:
                raise MalformedInput("Vorticity needs a lattice scenario")
            frame = vorticity(scenario.u, scenario.lattice, settings.tolerances.integrality).to_frame()
            if args.output:
                write_table(frame, args.output)
            print(frame.to_string(index=False) if len(frame) else "No vortices")
            print(f"Total vorticity: {int(frame['charge'].sum()) if len(frame) else 0}")

        elif args.command == "dualize":
            dual = dualize(load_complex(args.input))
            write_json(dual.to_dict(), args.output)
            print(f"{len(dual.interior)} face vertices, {len(dual.boundary)} boundary vertices → {args.output}")

        elif args.command == "verify":
            table = run_verification(settings, quick=args.quick, seed=args.seed)
            print(table.to_string(index=False))
            if args.output:
                write_table(table, args.output)
            return 0 if bool(table["passed"].all()) else 1

    except DipoleError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.critical(f"Failed to run command: {e}", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
