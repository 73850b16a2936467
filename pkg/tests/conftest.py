"""Shared fixtures: the cross-module scenario suite.

The suite spans p in {1, 2, 3}, kernel exponents {0.6, 1.0, 1.4}, constant
and affine shifts, shared and independent amplitude coupling, theta = 2
(shared only), theta in {3, 4, 5}, and heterogeneous per-component laws for
the independent quadrant case.  One halfspace instance has its minimizing
exit time strictly inside (0, T), off every uniform grid used by the oracle.
"""

from dataclasses import dataclass

import pytest

import exitdecay as ed

T = 1.0


@dataclass(frozen=True)
class SuiteCase:
    name: str
    geometry: str  # 'halfspace' | 'quadrant'
    coupling: str  # 'shared' | 'hadamard'
    kernels: tuple
    exit: object
    laws: tuple  # one law (shared) or p laws (hadamard)

    @property
    def p(self) -> int:
        return self.exit.p

    def compute(self) -> ed.DecayResult:
        if self.geometry == "halfspace":
            if self.coupling == "shared":
                return ed.decay_halfspace_equal(self.exit, self.kernels, self.laws[0])
            return ed.decay_halfspace_indep(self.exit, self.kernels, self.laws[0])
        if self.coupling == "shared":
            return ed.decay_quadrant_equal(self.exit, self.kernels, self.laws[0])
        return ed.decay_quadrant_indep(self.exit, self.kernels, self.laws)

    def model(self) -> ed.PerturbationModel:
        if self.coupling == "shared":
            return ed.PerturbationModel.shared(self.laws[0])
        return ed.PerturbationModel.hadamard(self.laws)


def _k(*alphas):
    return tuple(ed.KernelSpec(alpha=a) for a in alphas)


def build_suite() -> list[SuiteCase]:
    zero1 = ed.Shift.zero(1, T)
    zero2 = ed.Shift.zero(2, T)
    law2 = ed.ScaleLaw(1.0, 2.0)
    law3 = ed.ScaleLaw(0.8, 3.0)
    law4 = ed.ScaleLaw(1.0, 4.0)
    cases = [
        SuiteCase(
            "H-shared-p1-brownian", "halfspace", "shared", _k(1.0),
            ed.ExitHalfspace(xi=[1.0], x=1.0, shift=zero1), (law2,),
        ),
        SuiteCase(
            "H-shared-p2-symmetric", "halfspace", "shared", _k(1.0, 1.0),
            ed.ExitHalfspace(xi=[1.0, 1.0], x=1.0, shift=zero2), (law2,),
        ),
        SuiteCase(
            "H-shared-p2-mixed-alpha", "halfspace", "shared", _k(0.6, 1.4),
            ed.ExitHalfspace(
                xi=[1.0, 0.5], x=1.0, shift=ed.Shift.constant([0.1, -0.2], T)
            ),
            (law3,),
        ),
        SuiteCase(
            "H-shared-p3-affine", "halfspace", "shared", _k(0.6, 1.0, 1.4),
            ed.ExitHalfspace(
                xi=[1.0, 1.0, 2.0], x=1.5,
                shift=ed.Shift.affine([0.1, 0.0, -0.1], [-0.2, 0.1, 0.0], T),
            ),
            (law2,),
        ),
        SuiteCase(
            "H-shared-p1-interior-tstar", "halfspace", "shared", _k(1.0),
            ed.ExitHalfspace(xi=[1.0], x=1.0, shift=ed.Shift.affine([0.0], [-1.7], T)),
            (law2,),
        ),
        SuiteCase(
            "H-hadamard-p1", "halfspace", "hadamard", _k(1.0),
            ed.ExitHalfspace(xi=[1.0], x=1.0, shift=zero1), (law4,),
        ),
        SuiteCase(
            "H-hadamard-p2-symmetric", "halfspace", "hadamard", _k(1.0, 1.0),
            ed.ExitHalfspace(xi=[1.0, 1.0], x=1.0, shift=zero2), (law4, law4),
        ),
        SuiteCase(
            "H-hadamard-p2-affine", "halfspace", "hadamard", _k(0.6, 1.4),
            ed.ExitHalfspace(
                xi=[1.0, 0.5], x=1.0,
                shift=ed.Shift.affine([0.05, 0.1], [-0.1, 0.05], T),
            ),
            (ed.ScaleLaw(2.0, 3.0), ed.ScaleLaw(2.0, 3.0)),
        ),
        SuiteCase(
            "H-hadamard-p3-zero-weight", "halfspace", "hadamard", _k(1.4, 1.4, 1.4),
            ed.ExitHalfspace(
                xi=[1.0, 0.0, 2.0], x=1.0, shift=ed.Shift.constant([0.1, 0.1, 0.1], T)
            ),
            (ed.ScaleLaw(1.0, 5.0),) * 3,
        ),
        SuiteCase(
            "Q-shared-p2-symmetric", "quadrant", "shared", _k(1.0, 1.0),
            ed.ExitQuadrant(levels=[1.0, 1.0], shift=zero2), (law2,),
        ),
        SuiteCase(
            "Q-shared-p2-affine", "quadrant", "shared", _k(0.6, 1.4),
            ed.ExitQuadrant(
                levels=[1.0, 1.5], shift=ed.Shift.affine([0.1, -0.1], [0.2, 0.3], T)
            ),
            (ed.ScaleLaw(0.5, 3.0),),
        ),
        SuiteCase(
            "Q-shared-p3-constant", "quadrant", "shared", _k(0.6, 1.0, 1.4),
            ed.ExitQuadrant(
                levels=[1.0, 0.8, 1.2], shift=ed.Shift.constant([0.2, 0.0, -0.3], T)
            ),
            (law4,),
        ),
        SuiteCase(
            "Q-hadamard-p2-symmetric", "quadrant", "hadamard", _k(1.0, 1.0),
            ed.ExitQuadrant(levels=[1.0, 1.0], shift=zero2), (law4, law4),
        ),
        SuiteCase(
            "Q-hadamard-p2-heterogeneous", "quadrant", "hadamard", _k(1.0, 1.0),
            ed.ExitQuadrant(levels=[1.0, 1.0], shift=zero2),
            (ed.ScaleLaw(1.0, 3.0), ed.ScaleLaw(2.0, 5.0)),
        ),
        SuiteCase(
            "Q-hadamard-p3-affine", "quadrant", "hadamard", _k(1.4, 0.6, 1.0),
            ed.ExitQuadrant(
                levels=[1.0, 1.0, 1.0],
                shift=ed.Shift.affine([0.0, 0.1, -0.2], [0.5, -0.2, 0.3], T),
            ),
            (ed.ScaleLaw(1.0, 3.0), ed.ScaleLaw(0.5, 4.0), ed.ScaleLaw(2.0, 5.0)),
        ),
    ]
    return cases


@pytest.fixture(scope="session")
def suite():
    return build_suite()
