"""JSON interchange encodings used by every CLI subcommand.

Complex scalars are encoded as [re, im] pairs.  A form is
``{"n": int, "d": int, "coeffs": [[re, im], ...]}`` with coefficients in the
canonical monomial order; a decomposition is
``{"d": int, "terms": [{"lambda": [re, im], "L": [[re, im], ...]}, ...]}``.
"""

from __future__ import annotations

import numpy as np

from .forms import Decomposition, HomogeneousForm, LinearForm, num_monomials
from .apolarity import CatalecticantMatrix, ApolarBasis, PolyhedronCertificate
from .decompose import ChainCertificate, PencilResult, VspSample
from .secant import SecantReport


def complex_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(pair) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValueError("complex values must be [re, im] pairs")
    return complex(float(pair[0]), float(pair[1]))


def vector_to_pairs(vec) -> list:
    return [complex_to_pair(z) for z in np.asarray(vec, dtype=complex).ravel()]


def pairs_to_vector(pairs) -> np.ndarray:
    return np.array([pair_to_complex(p) for p in pairs], dtype=complex)


def nested_to_pairs(arr) -> list:
    """[re, im] leaves for an arbitrarily shaped complex array."""
    a = np.asarray(arr, dtype=complex)
    if a.ndim <= 1:
        return vector_to_pairs(a)
    return [nested_to_pairs(row) for row in a]


def form_to_obj(form: HomogeneousForm) -> dict:
    return {"n": form.n, "d": form.degree, "coeffs": vector_to_pairs(form.coeffs)}


def form_from_obj(obj) -> HomogeneousForm:
    try:
        n = int(obj["n"])
        d = int(obj["d"])
        coeffs = pairs_to_vector(obj["coeffs"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed form object: {exc}") from exc
    expected = num_monomials(n, d)
    if coeffs.size != expected:
        raise ValueError(
            f"form of degree {d} in {n + 1} variables needs {expected} "
            f"coefficients, got {coeffs.size}"
        )
    return HomogeneousForm(n + 1, d, coeffs)


def decomposition_to_obj(dec: Decomposition) -> dict:
    return {
        "d": dec.degree,
        "terms": [
            {"lambda": complex_to_pair(w), "L": vector_to_pairs(L.coords)}
            for w, L in dec.terms
        ],
    }


def decomposition_from_obj(obj) -> Decomposition:
    try:
        d = int(obj["d"])
        terms = [
            (pair_to_complex(t["lambda"]), LinearForm(pairs_to_vector(t["L"])))
            for t in obj["terms"]
        ]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed decomposition object: {exc}") from exc
    return Decomposition(d, tuple(terms))


def sample_to_obj(sample: VspSample) -> dict:
    parameter = None
    if sample.parameter is not None:
        parameter = nested_to_pairs(sample.parameter)
    return {
        "parameter": parameter,
        "decomposition": decomposition_to_obj(sample.decomposition),
        "residual": sample.residual,
    }


def pencil_to_obj(result: PencilResult) -> dict:
    return {
        "eigenvalues": vector_to_pairs(result.eigenvalues),
        "vertices": [vector_to_pairs(v.coords) for v in result.vertices],
        "decomposition": decomposition_to_obj(result.decomposition),
        "residual": result.residual,
    }


def catalecticant_to_obj(cat: CatalecticantMatrix) -> dict:
    rows, cols = cat.entries.shape
    return {
        "t": cat.t,
        "d": cat.d,
        "shape": [rows, cols],
        "row_monomials": [list(a) for a in cat.row_exponents],
        "col_monomials": [list(b) for b in cat.col_exponents],
        "entries": vector_to_pairs(cat.entries.ravel()),
    }


def apolar_to_obj(basis: ApolarBasis) -> dict:
    return {
        "t": basis.t,
        "dimension": basis.dimension,
        "basis": [vector_to_pairs(phi.coeffs) for phi in basis.basis],
    }


def certificate_to_obj(cert: PolyhedronCertificate) -> dict:
    return {
        "verdict": cert.verdict,
        "inclusion_defect": cert.inclusion_defect,
        "minimality_witness": cert.minimality_witness,
        "deletion_defects": list(cert.deletion_defects),
    }


def chain_to_obj(cert: ChainCertificate) -> dict:
    return {
        "length": len(cert.sequence),
        "sequence": [decomposition_to_obj(dec) for dec in cert.sequence],
        "links": [list(link) for link in cert.links],
    }


def secant_report_to_obj(report: SecantReport) -> dict:
    return {
        "n": report.n,
        "d": report.d,
        "h": report.h,
        "expected_dim": report.expected_dim,
        "computed_dim": report.computed_dim,
        "defective": report.defective,
        "vsp_dim_formula": report.vsp_dim_formula,
    }
