"""Poisson brackets, Dirac's constraint chain, and the Dirac bracket.

Everything here is exact symbolic computation on PhaseExpr values.  The
canonical pairs are (x, p_x), (y, p_y), (z, p_z) and (lam, p_lam); the
Minkowski metric diag(1, 1, -1) enters through index raising/lowering of
the coordinate and momentum triples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import PhaseExpr, parse_expr

CANONICAL_PAIRS = (("x", "p_x"), ("y", "p_y"), ("z", "p_z"), ("lam", "p_lam"))

# metric diag(1,1,-1); index i in {1,2,3} maps to coordinates (x,y,z)
METRIC = (1, 1, -1)
COORD_NAMES = ("x", "y", "z")
MOMENTUM_NAMES = ("p_x", "p_y", "p_z")


class ConstraintError(Exception):
    pass


def poisson(f: PhaseExpr, g: PhaseExpr) -> PhaseExpr:
    """Canonical Poisson bracket {f, g}."""
    out = PhaseExpr.const(0)
    for q, p in CANONICAL_PAIRS:
        out = out + f.diff(q) * g.diff(p) - f.diff(p) * g.diff(q)
    return out


def _perm_sign(i, j, k):
    if (i, j, k) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        return 1
    if (i, j, k) in ((3, 2, 1), (1, 3, 2), (2, 1, 3)):
        return -1
    return 0


def eps_lower(i, j, k, flip_sign=False):
    """epsilon_{ijk} with epsilon_{123} = 1 (indices 1..3)."""
    s = _perm_sign(i, j, k)
    return -s if flip_sign else s


def eps_upper(i, j, k, flip_sign=False):
    """epsilon^{ijk} with epsilon^{123} = -1."""
    return -eps_lower(i, j, k, flip_sign=flip_sign)


def coord(i: int) -> PhaseExpr:
    """x^i (upper index), i in 1..3."""
    return PhaseExpr.var(COORD_NAMES[i - 1])


def coord_lower(i: int) -> PhaseExpr:
    """x_i = g_{ij} x^j."""
    return PhaseExpr.const(METRIC[i - 1]) * coord(i)


def momentum(i: int) -> PhaseExpr:
    """p_i (lower index), i in 1..3."""
    return PhaseExpr.var(MOMENTUM_NAMES[i - 1])


def momentum_upper(i: int) -> PhaseExpr:
    return PhaseExpr.const(METRIC[i - 1]) * momentum(i)


def momentum_square() -> PhaseExpr:
    """p^i p_i = p_x^2 + p_y^2 - p_z^2."""
    return parse_expr("p_x^2 + p_y^2 - p_z^2")


def angular_j(i: int, flip_sign=False) -> PhaseExpr:
    """J^i = -epsilon^{ijk} x_j p_k."""
    out = PhaseExpr.const(0)
    for j in range(1, 4):
        for k in range(1, 4):
            s = eps_upper(i, j, k, flip_sign=flip_sign)
            if s:
                out = out - PhaseExpr.const(s) * coord_lower(j) * momentum(k)
    return out


def angular_j_lower(i: int, flip_sign=False) -> PhaseExpr:
    return PhaseExpr.const(METRIC[i - 1]) * angular_j(i, flip_sign=flip_sign)


def free_hamiltonian() -> PhaseExpr:
    return parse_expr("(p_x^2 + p_y^2 - p_z^2)/(2*m)")


def extended_hamiltonian() -> PhaseExpr:
    return parse_expr("(p_x^2 + p_y^2 - p_z^2)/(2*m) + lam*(x^2 + y^2 - z^2 + a^2)")


# -- on-shell reduction ------------------------------------------------

# lam is fixed on the constraint surface: C4 = 0 with C2 = 0 gives
# lam*a^2 = -H, i.e. lam = -(p_x^2+p_y^2-p_z^2)/(2*m*a^2)
_LAM_ON_SHELL = parse_expr("-(p_x^2 + p_y^2 - p_z^2)/(2*m*a^2)")
_Z_SQ_RULE = parse_expr("x^2 + y^2 + a^2")
_ZPZ_RULE = parse_expr("-(x*p_x + y*p_y)")

from .expr import Poly, VAR_INDEX, VARS  # noqa: E402

_ZI = VAR_INDEX["z"]
_PZI = VAR_INDEX["p_z"]


def _reduce_poly(p: Poly, use_zsq=True, use_zpz=True) -> PhaseExpr:
    """Rewrite z^2 -> x^2+y^2+a^2 and z*p_z -> -(x p_x + y p_y) to fixpoint."""
    e = PhaseExpr(p)
    while True:
        poly = e.num
        target = None
        for exps in poly.terms:
            if (use_zsq and exps[_ZI] >= 2) or (
                use_zpz and exps[_ZI] >= 1 and exps[_PZI] >= 1
            ):
                target = exps
                break
        if target is None:
            return e
        c = poly.terms[target]
        rest = list(target)
        if use_zsq and target[_ZI] >= 2:
            rest[_ZI] -= 2
            replacement = _Z_SQ_RULE
        else:
            rest[_ZI] -= 1
            rest[_PZI] -= 1
            replacement = _ZPZ_RULE
        mono = PhaseExpr(Poly({tuple(rest): c}))
        original_term = PhaseExpr(Poly({target: c}))
        e = e - original_term + mono * replacement


def reduce_on_shell(e: PhaseExpr) -> PhaseExpr:
    """Normal form modulo the constraint ideal.

    p_lam and lam are eliminated first (C1 = 0 and the on-shell value of
    lam fixed by C4), then each monomial is rewritten by
    z^2 -> x^2 + y^2 + a^2 and z*p_z -> -(x p_x + y p_y) until no rule
    applies; the z-degree strictly decreases so the rewrite terminates.
    """
    e = e.subs("p_lam", PhaseExpr.const(0))
    e = e.subs("lam", _LAM_ON_SHELL)
    num = _reduce_poly(e.num)
    den = _reduce_poly(e.den)
    return num / den


_PZ_ON_SHELL = parse_expr("-(x*p_x + y*p_y)/z")


def is_zero_on_shell(e: PhaseExpr) -> bool:
    """Exact test whether e vanishes identically on the constraint surface.

    The two-rule rewrite in reduce_on_shell is not confluent for every
    ideal member (z*C3 is a counterexample), so identity checks use a
    complete decision procedure instead: solve C3 for p_z, reduce z^2 by
    C2, and demand the z-linear remainder A + B*z vanish coefficientwise
    (z is a degree-2 algebraic element over the remaining variables).
    """
    e = e.subs("p_lam", PhaseExpr.const(0))
    e = e.subs("lam", _LAM_ON_SHELL)
    e = e.subs("p_z", _PZ_ON_SHELL)
    reduced = _reduce_poly(e.num, use_zpz=False)
    return reduced.is_zero()


def _reduce_partial(e: PhaseExpr, stage: int) -> PhaseExpr:
    """Reduce modulo only the first `stage` constraints (chain termination test)."""
    if stage >= 1:
        e = e.subs("p_lam", PhaseExpr.const(0))
    if stage >= 4:
        e = e.subs("lam", _LAM_ON_SHELL)
    num = _reduce_poly(e.num, use_zsq=stage >= 2, use_zpz=stage >= 3)
    den = _reduce_poly(e.den, use_zsq=stage >= 2, use_zpz=stage >= 3)
    return num / den


# -- constraint chain --------------------------------------------------


@dataclass(frozen=True)
class ConstraintSet:
    """The four second-class constraints, with raw chain derivatives.

    constraints holds the rescaled forms used to build the bracket
    matrix; raw_derivatives[k] is {C_k, H_tilde} before rescaling
    (raw_derivatives[0] is the derivative of C1, etc.).
    """

    constraints: tuple
    raw_derivatives: tuple
    rescale_factors: tuple
    h_tilde: PhaseExpr

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]


def constraint_chain(h_tilde: PhaseExpr | None = None, max_length: int = 8) -> ConstraintSet:
    """Run Dirac's consistency algorithm starting from C1 = p_lam.

    Each new constraint is the bracket of the previous one with the
    extended Hamiltonian, rescaled to the conventional form; the chain
    stops when the next bracket reduces to zero on-shell.
    """
    if h_tilde is None:
        h_tilde = extended_hamiltonian()
    c1 = PhaseExpr.var("p_lam")
    constraints = [c1]
    raw = []
    factors = []
    while len(constraints) < max_length:
        dot = poisson(constraints[-1], h_tilde)
        raw.append(dot)
        if _reduce_partial(dot, len(constraints)).is_zero():
            factors.append(None)
            break
        k = len(constraints)  # producing constraint number k+1
        if k == 1:
            nxt, fac = dot, PhaseExpr.const(1)
        elif k == 2:
            fac = parse_expr("-m/2")
            nxt = fac * dot
        elif k == 3:
            fac = PhaseExpr.const(Fraction(1, 2))
            nxt = fac * dot
        else:
            raise ConstraintError(
                f"unexpected constraint structure: chain did not close after {k} steps"
            )
        factors.append(fac)
        constraints.append(nxt)
    else:
        raise ConstraintError(f"constraint chain exceeded cap {max_length}")
    if len(constraints) != 4:
        raise ConstraintError(
            f"expected 4 constraints, found {len(constraints)}"
        )
    return ConstraintSet(
        tuple(constraints), tuple(raw), tuple(factors), h_tilde
    )


# -- bracket matrix and its exact inverse ------------------------------


@dataclass(frozen=True)
class BracketMatrix:
    entries: tuple          # 4x4 tuple of PhaseExpr, reduced on-shell
    inverse: tuple          # 4x4 tuple of PhaseExpr

    def entry(self, i, j):
        return self.entries[i][j]

    def inv_entry(self, i, j):
        return self.inverse[i][j]


def _bareiss_det(rows):
    """Fraction-free Bareiss determinant of a matrix of Polys."""
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Poly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                q = num.exact_div(prev)
                assert q is not None, "Bareiss division not exact"
                m[i][j] = q
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def invert_matrix(entries) -> tuple:
    """Exact inverse of a matrix of PhaseExpr over the rational-function field.

    Denominators are cleared per entry, the adjugate is assembled from
    fraction-free Bareiss minors, and each entry is normalized back to a
    reduced rational function.
    """
    n = len(entries)
    # common denominator D: product is overkill; use entrywise num/den directly
    # Build polynomial matrix P with P_ij = num_ij * (D_i / den_ij) by rows.
    from .expr import poly_gcd

    poly_rows = []
    row_scales = []
    for row in entries:
        # lcm of denominators in the row
        lcm = Poly.const(1)
        for e in row:
            g = poly_gcd(lcm, e.den)
            lcm = lcm * e.den.exact_div(g)
        prow = []
        for e in row:
            prow.append(e.num * lcm.exact_div(e.den))
        poly_rows.append(prow)
        row_scales.append(lcm)
    det = _bareiss_det(poly_rows)
    if det.is_zero():
        raise ConstraintError("bracket matrix is singular: constraints not second-class")
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [poly_rows[r][c] for c in range(n) if c != j]
                for r in range(n) if r != i
            ]
            cof = _bareiss_det(minor) if minor else Poly.const(1)
            if (i + j) % 2:
                cof = -cof
            # inverse of scaled matrix, then undo row scaling on the right:
            # (P)^-1 = adj(P)/det, M = diag(1/s_i) P  =>  M^-1 = P^-1 diag(s_i)
            inv[j][i] = PhaseExpr(cof * row_scales[i], det)
    return tuple(tuple(r) for r in inv)


def bracket_matrix(cs: ConstraintSet) -> BracketMatrix:
    """M_ij = {C_i, C_j}, reduced on-shell, with exact inverse."""
    n = len(cs)
    entries = tuple(
        tuple(reduce_on_shell(poisson(cs[i], cs[j])) for j in range(n))
        for i in range(n)
    )
    for i in range(n):
        for j in range(n):
            if entries[i][j] != -entries[j][i]:
                raise ConstraintError(f"bracket matrix not antisymmetric at ({i},{j})")
    inverse = invert_matrix(entries)
    return BracketMatrix(entries, inverse)


# -- Dirac bracket -----------------------------------------------------

_matrix_cache: dict = {}


def _matrix_for(cs: ConstraintSet) -> BracketMatrix:
    key = tuple(str(c) for c in cs)
    bm = _matrix_cache.get(key)
    if bm is None:
        bm = bracket_matrix(cs)
        _matrix_cache[key] = bm
    return bm


def dirac_bracket(a: PhaseExpr, b: PhaseExpr, cs: ConstraintSet | None = None) -> PhaseExpr:
    """{A, B}_M = {A, B} - {A, C_i} Minv_ij {C_j, B}, reduced on-shell."""
    if cs is None:
        cs = constraint_chain()
    bm = _matrix_for(cs)
    out = poisson(a, b)
    n = len(cs)
    ac = [reduce_on_shell(poisson(a, cs[i])) for i in range(n)]
    cb = [reduce_on_shell(poisson(cs[j], b)) for j in range(n)]
    for i in range(n):
        if ac[i].is_zero():
            continue
        for j in range(n):
            if cb[j].is_zero():
                continue
            out = out - ac[i] * bm.inv_entry(i, j) * cb[j]
    return reduce_on_shell(out)


# -- ISO(1,2) verification ---------------------------------------------


@dataclass
class IdentityCheck:
    name: str
    residual: PhaseExpr  # two-rule on-shell normal form, for display
    passed: bool


@dataclass
class Iso12Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def verify_iso12(cs: ConstraintSet | None = None, flip_epsilon_sign: bool = False) -> Iso12Report:
    """Check the full Dirac-bracket algebra of (x^i, J^i) symbolically.

    flip_epsilon_sign injects a deliberate sign error into the epsilon
    tensor (negative-control hook for the verification CLI).
    """
    if cs is None:
        cs = constraint_chain()
    flip = flip_epsilon_sign
    report = Iso12Report()

    def add(name, residual):
        report.checks.append(
            IdentityCheck(name, reduce_on_shell(residual), is_zero_on_shell(residual))
        )

    xs = {i: coord(i) for i in range(1, 4)}
    js = {i: angular_j(i) for i in range(1, 4)}

    # {x^i, x^j}_M = 0
    for i in range(1, 4):
        for j in range(1, 4):
            add(f"dirac(x{i},x{j})=0", dirac_bracket(xs[i], xs[j], cs))

    # {x^i, p_j}_M = delta^i_j + x^i x_j / a^2
    a2 = parse_expr("a^2")
    for i in range(1, 4):
        for j in range(1, 4):
            expected = xs[i] * coord_lower(j) / a2
            if i == j:
                expected = expected + 1
            add(
                f"dirac(x{i},p{j})=delta+xx/a^2",
                dirac_bracket(xs[i], momentum(j), cs) - expected,
            )

    # {p_i, p_j}_M = (x_i p_j - x_j p_i)/a^2
    for i in range(1, 4):
        for j in range(1, 4):
            expected = (coord_lower(i) * momentum(j) - coord_lower(j) * momentum(i)) / a2
            add(
                f"dirac(p{i},p{j})=(xp-xp)/a^2",
                dirac_bracket(momentum(i), momentum(j), cs) - expected,
            )

    # {J^i, x^j}_M = -eps^{ijk} x_k
    for i in range(1, 4):
        for j in range(1, 4):
            expected = PhaseExpr.const(0)
            for k in range(1, 4):
                s = eps_upper(i, j, k, flip_sign=flip)
                if s:
                    expected = expected - PhaseExpr.const(s) * coord_lower(k)
            add(
                f"dirac(J{i},x{j})=-eps*x",
                dirac_bracket(js[i], xs[j], cs) - expected,
            )

    # {J^i, J^j}_M = -eps^{ijk} J_k
    for i in range(1, 4):
        for j in range(1, 4):
            expected = PhaseExpr.const(0)
            for k in range(1, 4):
                s = eps_upper(i, j, k, flip_sign=flip)
                if s:
                    expected = expected - PhaseExpr.const(s) * angular_j_lower(k)
            add(
                f"dirac(J{i},J{j})=-eps*J",
                dirac_bracket(js[i], js[j], cs) - reduce_on_shell(expected),
            )

    # Casimir centrality: {x.x, f}_M = 0 and {x.J, f}_M = 0 for every generator
    xx = sum((coord(i) * coord_lower(i) for i in range(1, 4)), PhaseExpr.const(0))
    xj = sum((coord(i) * angular_j_lower(i) for i in range(1, 4)), PhaseExpr.const(0))
    generators = [(f"x{i}", xs[i]) for i in range(1, 4)] + [
        (f"J{i}", js[i]) for i in range(1, 4)
    ]
    for gname, g in generators:
        add(f"dirac(x.x,{gname})=0", dirac_bracket(xx, g, cs))
        add(f"dirac(x.J,{gname})=0", dirac_bracket(xj, g, cs))

    # momentum recovery p_i = eps_{ijk} x^j J^k / a^2 on-shell
    for i in range(1, 4):
        rec = PhaseExpr.const(0)
        for j in range(1, 4):
            for k in range(1, 4):
                s = eps_lower(i, j, k, flip_sign=flip)
                if s:
                    rec = rec + PhaseExpr.const(s) * xs[j] * js[k]
        rec = rec / a2
        add(f"p{i}=eps*x*J/a^2", reduce_on_shell(rec - momentum(i)))

    return report
