"""Command-line client for the reflector design service.

Every subcommand issues HTTP requests against the service API.  By default
the app is mounted in-process (no network, no server to start); pass
--server URL to talk to a running instance instead.  Lengths on the command
line are millimeters; mask files keep meters.

Exit codes: 0 success, 1 validation/domain error, 2 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _client(args: argparse.Namespace) -> httpx.Client:
    if args.server:
        return httpx.Client(base_url=args.server, timeout=600.0)
    # Mount the app in-process: TestClient is a sync httpx.Client speaking
    # ASGI directly, so no server or network is involved.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from starlette.testclient import TestClient

    from .service import app

    return TestClient(app, raise_server_exceptions=False)


def _request(client: httpx.Client, method: str, path: str, **kwargs) -> httpx.Response:
    resp = client.request(method, path, **kwargs)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise CliError(f"error: {detail}", EXIT_VALIDATION)
    return resp


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _write_bytes(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _load_mask_doc(path: str) -> dict:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"error: {path} is not valid JSON: {exc}", EXIT_VALIDATION) from exc


def _mask_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _targets_payload(args: argparse.Namespace) -> list[dict]:
    weights = args.weight or []
    if weights and len(weights) != len(args.target):
        raise CliError(
            "error: --weight must be given once per --target or not at all",
            EXIT_VALIDATION,
        )
    payload = []
    for i, angle in enumerate(args.target):
        w = complex(weights[i]) if weights else 1.0 + 0j
        payload.append({"theta_deg": angle, "weight_re": w.real, "weight_im": w.imag})
    return payload


def cmd_design_mask(args: argparse.Namespace) -> int:
    body = {
        "theta_i_deg": args.theta_i,
        "targets": _targets_payload(args),
        "m": args.m,
        "d0_mm": args.d0_mm,
        "lambda_mm": args.lambda_mm,
        "psi_rad": args.psi,
        "auto_psi": args.auto_psi,
        "psi_grid": args.psi_grid,
    }
    with _client(args) as client:
        out = _request(client, "POST", "/design/mask", json=body).json()
    _write_text(args.out, _mask_json(out["mask"]))
    print(f"wrote {args.out}")
    print(f"thinning ratio: {out['thinning_ratio']:.4f}")
    print(f"psi: {out['psi_rad']:.6f} rad")
    if out.get("psi_score_db") is not None:
        print(f"min-target gain at psi: {out['psi_score_db']:.2f} dB")
    return EXIT_OK


def cmd_design_period(args: argparse.Namespace) -> int:
    body = {
        "theta_i_deg": args.theta_i,
        "theta_t_deg": args.target,
        "lambda_mm": args.lambda_mm,
        "order": args.order,
        "d0_mm": args.d0_mm,
        "wells_per_row": args.wells,
    }
    with _client(args) as client:
        out = _request(client, "POST", "/design/period", json=body).json()
    print(f"period: {out['delta_mm']:.4f} mm (order n={out['order']})")
    print(f"visible orders n in [{out['n_min']}, {out['n_max']}]:")
    for entry in out["orders"]:
        print(f"  n={entry['n']:+d}  theta={entry['theta_deg']:+8.3f} deg")
    snapped = out.get("snapped")
    if snapped:
        print(
            f"snapped: stride {snapped['stride']} wells "
            f"({snapped['delta_actual_mm']:.4f} mm), "
            f"{snapped['m_active']} active columns"
        )
    if args.out:
        if not out.get("mask"):
            raise CliError(
                "error: --out requires --d0-mm and --wells (a snapped design)",
                EXIT_VALIDATION,
            )
        _write_text(args.out, _mask_json(out["mask"]))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    body = {
        "mask": _load_mask_doc(args.mask),
        "grid": {"start": args.start, "stop": args.stop, "step": args.step},
    }
    with _client(args) as client:
        csv_text = _request(client, "POST", "/simulate", json=body).text
    _write_text(args.out, csv_text)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify_bounds(args: argparse.Namespace) -> int:
    body = {
        "trials": args.trials,
        "m_min": args.m_min,
        "m_max": args.m_max,
        "seed": args.seed,
    }
    with _client(args) as client:
        out = _request(client, "POST", "/verify/bounds", json=body).json()
    print(f"trials:              {out['trials']}")
    print(f"bound:               {out['bound']:.6f}")
    print(f"min gamma*:          {out['min_gamma_star']:.6f}")
    print(f"violations:          {out['violations']}")
    print(f"rotation average:    {out['rotation_mean_amplitude']:.6f}")
    if args.out:
        _write_text(args.out, json.dumps(out, indent=2) + "\n")
        print(f"wrote {args.out}")
    return EXIT_OK if out["violations"] == 0 else EXIT_VALIDATION


def cmd_thinning(args: argparse.Namespace) -> int:
    try:
        m_values = [int(v) for v in args.m_values.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(f"error: bad --m-values: {exc}", EXIT_VALIDATION) from exc
    body = {
        "theta_i_deg": args.theta_i,
        "theta_t_deg": args.theta_t,
        "d0_mm": args.d0_mm,
        "lambda_mm": args.lambda_mm,
        "m_values": m_values,
    }
    with _client(args) as client:
        out = _request(client, "POST", "/analysis/thinning", json=body).json()
    print("M,eta")
    for point in out["points"]:
        print(f"{point['m']},{point['eta']:.6f}")
    if args.out:
        lines = ["M,eta"] + [f"{p['m']},{p['eta']:.6f}" for p in out["points"]]
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_export_stl(args: argparse.Namespace) -> int:
    mask = _load_mask_doc(args.mask)
    with _client(args) as client:
        for solid in ("base", "pads", "stencil"):
            resp = _request(
                client,
                "POST",
                "/export/stl",
                json={"mask": mask, "rows": args.rows, "solid": solid},
            )
            path = f"{args.out_prefix}_{solid}.stl"
            _write_bytes(path, resp.content)
            print(f"wrote {path} ({resp.headers.get('X-Triangle-Count', '?')} triangles)")
        report = _request(
            client,
            "POST",
            "/export/report",
            json={"mask": mask, "rows": args.rows},
        ).json()
    print(report["report"], end="")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    body = {
        "measured_csv": _read_text(args.measured),
        "mount_csv": _read_text(args.mount) if args.mount else None,
        "mask": _load_mask_doc(args.mask),
        "targets": args.target,
        "floor_db": args.floor_db,
    }
    with _client(args) as client:
        out = _request(client, "POST", "/measurement/compare", json=body).json()
    for t in out["targets"]:
        if t["found"]:
            print(
                f"target {t['theta']:+8.2f} deg: angle error "
                f"{t['angle_err_deg']:+.2f} deg, level error "
                f"{t['level_err_db']:+.2f} dB"
            )
        else:
            print(f"target {t['theta']:+8.2f} deg: no peak found")
    print(f"rms error: {out['rms_db']:.2f} dB (floor {out['floor_db']:.0f} dB)")
    if args.out:
        report = {k: out[k] for k in ("targets", "rms_db", "floor_db")}
        _write_text(args.out, json.dumps(report, indent=2) + "\n")
        print(f"wrote {args.out}")
    if args.normalized_out:
        _write_text(args.normalized_out, out["normalized_csv"])
        print(f"wrote {args.normalized_out}")
    return EXIT_OK


def cmd_reproduce_figure(args: argparse.Namespace) -> int:
    with _client(args) as client:
        out = _request(client, "GET", f"/figures/{args.figure}").json()
    import os

    try:
        os.makedirs(args.out_dir, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {args.out_dir}: {exc}", EXIT_IO) from exc
    for name, csv_text in sorted(out["curves"].items()):
        path = os.path.join(args.out_dir, f"{args.figure}_{name}.csv")
        _write_text(path, csv_text)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reflectkit",
        description="Design, verify and export fully passive binary-coded reflectors.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs the service in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-mask", help="synthesize a 1-bit ON/OFF mask")
    p.add_argument("--theta-i", type=float, required=True, help="incidence angle (deg)")
    p.add_argument(
        "--target",
        type=float,
        action="append",
        required=True,
        help="target departure angle (deg); repeat for multi-beam",
    )
    p.add_argument(
        "--weight",
        action="append",
        help="complex weight per target, e.g. '1' or '0.5+0.5j'",
    )
    p.add_argument("--m", type=int, default=35, help="elements per row")
    p.add_argument("--d0-mm", type=float, default=2.5, help="element pitch (mm)")
    p.add_argument("--lambda-mm", type=float, default=5.0, help="wavelength (mm)")
    p.add_argument("--psi", type=float, default=0.0, help="threshold rotation (rad)")
    p.add_argument(
        "--auto-psi", action="store_true", help="grid-search psi for best min-target gain"
    )
    p.add_argument("--psi-grid", type=int, default=64, help="psi grid size")
    p.add_argument("--out", required=True, help="output mask JSON path")
    p.set_defaults(func=cmd_design_mask)

    p = sub.add_parser("design-period", help="uniform-period diffraction design")
    p.add_argument("--theta-i", type=float, required=True)
    p.add_argument("--target", type=float, required=True, help="target angle (deg)")
    p.add_argument("--lambda-mm", type=float, default=5.0)
    p.add_argument("--order", type=int, default=1, help="diffraction order n")
    p.add_argument("--d0-mm", type=float, default=None, help="scaffold pitch (mm)")
    p.add_argument("--wells", type=int, default=None, help="wells per row")
    p.add_argument("--out", default=None, help="mask JSON path (snapped designs only)")
    p.set_defaults(func=cmd_design_period)

    p = sub.add_parser("simulate", help="angular pattern of a mask file")
    p.add_argument("--mask", required=True, help="mask JSON path")
    p.add_argument("--start", type=float, default=-90.0)
    p.add_argument("--stop", type=float, default=90.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-bounds", help="randomized gain-bound certification")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--m-min", type=int, default=8)
    p.add_argument("--m-max", type=int, default=14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report JSON path")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("thinning", help="ON fraction vs aperture size")
    p.add_argument("--theta-i", type=float, required=True)
    p.add_argument("--theta-t", type=float, required=True)
    p.add_argument("--d0-mm", type=float, default=2.5)
    p.add_argument("--lambda-mm", type=float, default=5.0)
    p.add_argument("--m-values", required=True, help="comma-separated sizes, e.g. 35,100,1000")
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_thinning)

    p = sub.add_parser("export-stl", help="printable geometry for a mask file")
    p.add_argument("--mask", required=True, help="mask JSON path")
    p.add_argument("--rows", type=int, default=35)
    p.add_argument("--out-prefix", required=True, help="writes PREFIX_{base,pads,stencil}.stl")
    p.set_defaults(func=cmd_export_stl)

    p = sub.add_parser("compare", help="score a measured scan against theory")
    p.add_argument("--measured", required=True, help="measured scan CSV (theta_deg,power_dbm)")
    p.add_argument("--mount", default=None, help="mount-only background scan CSV")
    p.add_argument("--mask", required=True, help="mask JSON path")
    p.add_argument(
        "--target", type=float, action="append", required=True, help="expected beam angle (deg)"
    )
    p.add_argument("--floor-db", type=float, default=-60.0)
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--normalized-out", default=None, help="normalized measurement CSV path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce-figure", help="CSV curves for a pinned figure id")
    p.add_argument("figure", help="one of fig3, fig5, fig6, fig7a, fig7b")
    p.add_argument("--out-dir", default=".", help="directory for the CSV files")
    p.set_defaults(func=cmd_reproduce_figure)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
