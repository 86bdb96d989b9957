"""Command line front end. Exit codes: 0 pass, 1 verification failure, 2 bad input."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import errors
from .cohomology import build_algebra, poincare_pairing_matrix
from .connection import (birkhoff_extract, compare_quantum_rings, connection_data, flatness_report,
                         pairing_report, qmatrix_to_json, qmatrix_to_text, residue_nilpotency)
from .fan import (FanoType, classify_fano, exact_sequence, mori_nef_cones, normalized_volume,
                  primitive_relations, semigroup_report, validate_fan)
from .gkz import (AMBIENT_VARIANTS, ambient_box_operators, batyrev_quantum_ring, euler_operator,
                  principal_symbol, reduced_box_operator)
from .hypergeometric import (build_I, build_I_tilde, check_annihilation, log_free_part, mirror_map,
                             non_effective_vanishing, substitute_log_free)
from .io import FIXTURES, basis_labels, dumps, jsonable, load_fixture, parse_fan_file

COMMANDS = ("check-fan", "classify", "exact-seq", "mori", "cohomology", "gkz-ops", "qring",
            "ifunction", "mirror-map", "connection", "verify")


@dataclass(frozen=True)
class RunConfig:
    input: str
    command: str
    q_order: int = 4
    bound: int = 4
    output_format: str = "json"
    fixture: bool = False

    def __post_init__(self):
        if self.q_order < 1 or self.bound < 1:
            raise errors.SchemaError("--order and --bound must be at least 1")


class _Pipeline:
    """Lazily computed stages shared by the commands."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        src = load_fixture(cfg.input) if cfg.fixture else parse_fan_file(cfg.input)
        self.fan = src.fan
        self.nef_basis = src.nef_basis
        self._cache: dict = {}

    def get(self, name):
        if name not in self._cache:
            self._cache[name] = getattr(self, "_" + name)()
        return self._cache[name]

    def _report(self):
        return validate_fan(self.fan)

    def _fano(self):
        self.get("report")
        return classify_fano(self.fan)

    def _esd(self):
        self.get("report")
        return exact_sequence(self.fan, self.nef_basis)

    def _prels(self):
        return primitive_relations(self.fan, self.get("esd"))

    def _ga(self):
        return build_algebra(self.get("esd"), self.get("prels"))

    def _qring(self):
        fano = self.get("fano")
        mode = "graded_exact" if fano == FanoType.FANO else "q_truncated"
        return batyrev_quantum_ring(self.get("esd"), self.get("prels"), self.get("ga").basis,
                                    mode=mode, N=self.cfg.q_order, fano_type=fano)

    def _G(self):
        return log_free_part(self.get("esd"), self.get("ga"), self.cfg.q_order)

    def _mirror(self):
        return mirror_map(self.get("esd"), self.get("ga"), self.cfg.q_order, self.get("G"))

    def _GJ(self):
        return substitute_log_free(self.get("G"), self.get("mirror"), self.get("ga"))

    def _extraction(self):
        return birkhoff_extract(self.get("ga"), self.get("esd"), self.get("GJ"))

    def _cd(self):
        return connection_data(self.get("ga"), self.get("esd"), self.get("extraction"))


def _series_table(s, ga):
    labels = basis_labels(ga)
    rows = []
    for (e, j, al, b), v in s.items():
        value = {lab: c for lab, c in zip(labels, v.coeffs) if c} if hasattr(v, "coeffs") else v
        rows.append({"q": list(e), "z": j, "log_q": list(al), "log_z": b, "value": value})
    return rows


def _scalar_table(s):
    return [{"q": list(e), "value": c} for (e, _, _, _), c in s.items()]


# ---------------------------------------------------------------- commands

def cmd_check_fan(p: _Pipeline) -> dict:
    rep = p.get("report")
    return {"smooth": rep.smooth, "complete": rep.complete, "projective": rep.projective,
            "diagnostics": rep.diagnostics, "n": p.fan.n, "m": p.fan.m}


def cmd_classify(p: _Pipeline) -> dict:
    return {"fano_type": p.get("fano").value}


def cmd_exact_seq(p: _Pipeline) -> dict:
    esd = p.get("esd")
    return {"A": esd.A, "M": esd.M, "G": esd.G, "rho": esd.rho, "euler_weights": esd.euler_weights}


def cmd_mori(p: _Pipeline) -> dict:
    esd = p.get("esd")
    cones = mori_nef_cones(p.fan, esd)
    semi = semigroup_report(p.fan, p.cfg.bound)
    return {
        "primitive_relations": [
            {"collection": [i + 1 for i in pr.collection], "relation": pr.relation,
             "nef_degrees": pr.nef_degrees, "anticanonical_degree": pr.anticanonical_degree}
            for pr in p.get("prels")],
        "mori_generators": cones.mori_generators,
        "nef_generators": cones.nef_generators,
        "double_dual": cones.double_dual,
        "semigroup": {"positive": semi.positive, "normal": semi.normal_up_to_K,
                      "gorenstein": semi.gorenstein_up_to_K, "bound": semi.bound,
                      "counterexamples": semi.counterexamples},
        "normalized_volume": normalized_volume(p.fan),
    }


def cmd_cohomology(p: _Pipeline) -> dict:
    ga = p.get("ga")
    labels = basis_labels(ga)
    table = {f"{labels[i]}*{labels[j]}": ga.multiply(ga.basis_element(i), ga.basis_element(j))
             for i in range(ga.dim) for j in range(i, ga.dim)}
    return {"basis": labels, "dims_by_degree": ga.dims_by_degree(), "mult_table": table,
            "pairing": poincare_pairing_matrix(ga)}


def cmd_gkz_ops(p: _Pipeline) -> dict:
    esd = p.get("esd")
    text = p.cfg.output_format == "text"

    def render(op):
        return op.to_text() if text else op.to_json()

    boxes = []
    for pr in p.get("prels"):
        op = reduced_box_operator(esd, pr.relation)
        boxes.append({"relation": pr.relation, "operator": render(op),
                      "symbol": principal_symbol(op).to_text()})
    ambient = {}
    for variant in AMBIENT_VARIANTS:
        system = ambient_box_operators(esd, variant=variant)
        ambient[variant] = {"boxes": [render(b) for b in system.boxes],
                            "Z": [render(z) for z in system.Z], "E": render(system.E)}
    return {"reduced_boxes": boxes,
            "euler": render(euler_operator(esd)),
            "euler_lattice": render(euler_operator(esd, lattice_form=True)),
            "ambient": ambient}


def cmd_qring(p: _Pipeline) -> dict:
    ring = p.get("qring")
    return {"mode": ring.mode, "basis": basis_labels(p.get("ga")), "relations": ring.relation_text(),
            "M": [qmatrix_to_text(Ma) if p.cfg.output_format == "text" else qmatrix_to_json(Ma)
                  for Ma in ring.M]}


def cmd_ifunction(p: _Pipeline) -> dict:
    esd, ga, N = p.get("esd"), p.get("ga"), p.cfg.q_order
    return {"order": N, "I": _series_table(build_I(esd, ga, N), ga)}


def cmd_mirror_map(p: _Pipeline) -> dict:
    mm = p.get("mirror")
    return {"order": p.cfg.q_order, "identity": mm.is_identity,
            "gamma_prime": [_scalar_table(g) for g in mm.gamma_prime],
            "kappa": [_scalar_table(k) for k in mm.kappa]}


def cmd_connection(p: _Pipeline) -> dict:
    cd = p.get("cd")
    fmt = qmatrix_to_text if p.cfg.output_format == "text" else qmatrix_to_json
    return {"basis": cd.basis_labels, "A0": cd.A0, "Ainf": cd.Ainf,
            "Omega": [fmt(Om) for Om in cd.Omega], "pairing": cd.pairing}


def cmd_verify(p: _Pipeline) -> dict:
    stages: list[dict] = []
    current = ["validate"]

    def stage(name: str, ok: bool, **detail):
        stages.append({"stage": name, "passed": bool(ok), **detail})
        if not ok:
            raise _StageFailed(name, detail)

    def begin(name: str):
        current[0] = name

    try:
        p.get("report")
        stage("validate", True)
        begin("classify")
        fano = p.get("fano")
        if fano == FanoType.NEITHER:
            raise errors.NotWeakFano("anticanonical class is not nef",
                                     witness={"fano_type": fano.value})
        stage("classify", True, fano_type=fano.value)
        begin("exact_sequence")
        esd = p.get("esd")
        stage("exact_sequence", True)
        begin("primitive_relations")
        prels = p.get("prels")
        stage("primitive_relations", True, count=len(prels))
        begin("cohomology")
        ga = p.get("ga")
        stage("cohomology", ga.dim == normalized_volume(p.fan), dim=ga.dim)
        begin("batyrev_ring")
        ring = p.get("qring")
        stage("batyrev_ring", all(ring.matrix_at_zero(a) == ga.cup_matrix(ga.generator(a))
                                  for a in range(esd.r)), mode=ring.mode)
        begin("log_free")
        N = p.cfg.q_order
        I = build_I(esd, ga, N)
        G = p.get("G")
        stage("log_free", G.is_log_free() and (G.z_range() or (0, 0))[1] <= 0)
        begin("non_effective_vanishing")
        cones = mori_nef_cones(p.fan, esd)
        bad = non_effective_vanishing(esd, ga, cones.nef_generators, min(N, 2))
        stage("non_effective_vanishing", not bad, witness=bad)
        begin("annihilation")
        tilde = build_I_tilde(esd, ga, N)
        for pr in prels:
            res = check_annihilation(reduced_box_operator(esd, pr.relation), tilde)
            stage(f"box_{'_'.join(map(str, pr.relation))}", res.passed,
                  safe_q_order=res.safe_q_order, residual=res.residual)
            res = check_annihilation(reduced_box_operator(esd, pr.relation), I)
            stage(f"box_I_{'_'.join(map(str, pr.relation))}", res.passed, residual=res.residual)
        res = check_annihilation(euler_operator(esd), tilde)
        stage("euler", res.passed, residual=res.residual)
        begin("mirror_map")
        mm = p.get("mirror")
        stage("mirror_map", True, identity=mm.is_identity)
        begin("flat_coordinate")
        GJ = p.get("GJ")
        stage("flat_coordinate", GJ.z_coefficient(-1).is_zero())
        begin("birkhoff")
        ex = p.get("extraction")
        stage("birkhoff", ex.z_free)
        begin("flatness")
        cd = p.get("cd")
        flat = flatness_report(cd, esd)
        stage("flatness", flat.passed, **flat.checks, witness=flat.witnesses)
        begin("pairing")
        pair = pairing_report(ga, cd)
        stage("pairing", pair.passed, **pair.checks, witness=pair.witnesses)
        stage("residue_nilpotency", residue_nilpotency(cd))
        begin("compare_quantum_rings")
        cmp = compare_quantum_rings(ring, ex.Omega, esd.r, N, mm)
        stage("compare_quantum_rings", cmp.match, witness=cmp.witness)
    except _StageFailed as exc:
        return {"passed": False, "failed_stage": exc.stage, "stages": stages}
    except errors.VerificationError as exc:
        stages.append({"stage": current[0], "passed": False, "error": type(exc).__name__,
                       "message": str(exc), "witness": exc.witness})
        return {"passed": False, "failed_stage": current[0], "error": type(exc).__name__,
                "stages": stages}
    return {"passed": True, "stages": stages}


class _StageFailed(Exception):
    def __init__(self, stage, detail):
        super().__init__(stage)
        self.stage = stage
        self.detail = detail


HANDLERS = {
    "check-fan": cmd_check_fan, "classify": cmd_classify, "exact-seq": cmd_exact_seq,
    "mori": cmd_mori, "cohomology": cmd_cohomology, "gkz-ops": cmd_gkz_ops, "qring": cmd_qring,
    "ifunction": cmd_ifunction, "mirror-map": cmd_mirror_map, "connection": cmd_connection,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- rendering

def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(obj))
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)
    return False


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    if isinstance(v, str) and "/" in v:
        num, den = v.split("/", 1)
        if den == "1" and num.lstrip("-").isdigit():
            return num
    return str(v)


def dispatch(cfg: RunConfig) -> tuple[int, str]:
    try:
        pipeline = _Pipeline(cfg)
        report = HANDLERS[cfg.command](pipeline)
        code = 0 if report.get("passed", True) else 1
    except errors.InputError as exc:
        report, code = _error_report(cfg, exc), 2
    except errors.VerificationError as exc:
        report, code = _error_report(cfg, exc), 1
    if cfg.output_format == "text":
        return code, render_text(jsonable(report)) + "\n"
    return code, dumps(report)


def _error_report(cfg: RunConfig, exc: errors.ToricMirrorError) -> dict:
    return {"command": cfg.command, "passed": False, "error": type(exc).__name__,
            "message": str(exc), "witness": exc.witness}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricmirror",
                                     description="Quantum D-module computations for smooth toric varieties.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="fan file (.toml or .json), or a fixture name with --fixture")
    parser.add_argument("--order", type=int, default=4, help="q truncation order N (default 4)")
    parser.add_argument("--bound", type=int, default=4, help="semigroup slab bound K (default 4)")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--fixture", action="store_true",
                        help=f"treat input as a bundled fixture ({', '.join(FIXTURES)})")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(input=args.input, command=args.command, q_order=args.order,
                        bound=args.bound, output_format=args.format, fixture=args.fixture)
    except errors.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, out = dispatch(cfg)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
