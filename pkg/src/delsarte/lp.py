"""Linear programming over exact scalar contexts, with a float fallback.

Exact problems (rationals or a real cyclotomic field) run on a dense
two-phase simplex with Bland's rule, so runs are deterministic and cycling is
impossible.  A float run first proposes an optimal basis; the basis is then
*verified* exactly (basic solution, dual vector, reduced costs).  Only when
verification fails does the solver fall back to a full exact pivot sequence.
This keeps exact solves near float speed on non-degenerate instances without
ever trusting floating point for the answer.

Float-context problems are handed to HiGHS (via scipy): the hand-rolled
tableau has no business competing with a production solver on the large,
ill-conditioned systems that dense quadrature grids produce.

Row duals are returned with the convention that ``sum_i duals[i] * rhs[i]``
equals the optimal objective value in the problem's own sense.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalars import FloatContext, ScalarContext

REL_LE = "<="
REL_GE = ">="
REL_EQ = "=="


@dataclass
class LpProblem:
    """min/max ``objective . x`` subject to rows ``coeffs . x rel rhs``.

    ``var_signs[j]`` is +1 for x_j >= 0 (the default), -1 for x_j <= 0,
    0 for a free variable.
    """

    sense: str
    objective: list
    rows: list
    var_signs: list | None = None

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', not {self.sense!r}")
        n = len(self.objective)
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != n:
                raise ValueError("row length does not match objective length")
            if rel not in (REL_LE, REL_GE, REL_EQ):
                raise ValueError(f"unknown relation {rel!r}")
        if self.var_signs is not None and len(self.var_signs) != n:
            raise ValueError("var_signs length does not match objective length")


@dataclass
class LpSolution:
    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    value: object = None
    x: list | None = None
    duals: list | None = None
    iterations: int = 0
    path: str = ""  # 'tableau' | 'verified-basis'


class _Standard:
    """Standard form: min c.x, A x rel b with b >= 0, x >= 0 componentwise."""

    __slots__ = (
        "ctx", "c", "cols", "b", "rels", "rowflip", "colmap",
        "maxing", "n_real", "n_total", "ident", "kinds",
    )

    def __init__(self, prob: LpProblem, ctx: ScalarContext):
        self.ctx = ctx
        self.maxing = prob.sense == "max"
        zero, one = ctx.zero, ctx.one
        signs = prob.var_signs or [1] * len(prob.objective)

        # variable substitution: x_j <= 0 becomes -y, free becomes y+ - y-
        self.colmap = []  # per standard column: (orig var index, multiplier)
        for j, s in enumerate(signs):
            if s >= 0:
                self.colmap.append((j, one))
            if s <= 0:
                self.colmap.append((j, -one))

        obj = [ctx.coerce(v) for v in prob.objective]
        if self.maxing:
            obj = [-v for v in obj]
        self.c = [obj[j] * m for j, m in self.colmap]
        self.n_real = len(self.c)

        self.b, self.rels, self.rowflip, rows = [], [], [], []
        for coeffs, rel, rhs in prob.rows:
            co = [ctx.coerce(v) for v in coeffs]
            rv = ctx.coerce(rhs)
            if ctx.sign(rv) < 0:
                co = [-v for v in co]
                rv = -rv
                rel = {REL_LE: REL_GE, REL_GE: REL_LE, REL_EQ: REL_EQ}[rel]
                self.rowflip.append(-1)
            else:
                self.rowflip.append(1)
            rows.append([co[j] * m for j, m in self.colmap])
            self.b.append(rv)
            self.rels.append(rel)

        # column layout: real | slack/surplus | artificial
        m_rows = len(rows)
        n = self.n_real
        slack_of, art_of = {}, {}
        for i, rel in enumerate(self.rels):
            if rel == REL_LE:
                slack_of[i] = n
                n += 1
            elif rel == REL_GE:
                slack_of[i] = n  # surplus, coefficient -1
                n += 1
        for i, rel in enumerate(self.rels):
            if rel != REL_LE:
                art_of[i] = n
                n += 1
        self.n_total = n

        self.kinds = ["real"] * self.n_real
        self.cols = [[zero] * m_rows for _ in range(n)]
        for j in range(self.n_real):
            col = self.cols[j]
            for i in range(m_rows):
                col[i] = rows[i][j]
        self.ident = [None] * m_rows  # initial identity column per row
        for i, rel in enumerate(self.rels):
            if rel == REL_LE:
                j = slack_of[i]
                self.cols[j][i] = one
                self.kinds.append("slack")
                self.ident[i] = j
            elif rel == REL_GE:
                self.cols[slack_of[i]][i] = -one
                self.kinds.append("slack")
        for i, rel in enumerate(self.rels):
            if rel != REL_LE:
                j = art_of[i]
                self.cols[j][i] = one
                self.ident[i] = j
        self.kinds += ["art"] * len(art_of)

    @property
    def m_rows(self):
        return len(self.b)

    def initial_basis(self):
        return list(self.ident)

    def column(self, j):
        return self.cols[j]

    def cost(self, j):
        return self.c[j] if j < self.n_real else self.ctx.zero


def _pivot(T, cost, basis, r, jc, ctx):
    piv = T[r][jc]
    inv = ctx.one / piv
    row = T[r]
    for k in range(len(row)):
        row[k] = row[k] * inv
    for i, other in enumerate(T):
        if i != r:
            f = other[jc]
            if not ctx.is_zero(f):
                for k in range(len(other)):
                    other[k] = other[k] - f * row[k]
    f = cost[jc]
    if not ctx.is_zero(f):
        for k in range(len(cost)):
            cost[k] = cost[k] - f * row[k]
    basis[r] = jc


def _bland_step(T, cost, basis, allowed, ctx, trace, phase):
    """One simplex iteration; returns 'optimal', 'unbounded' or 'pivoted'."""
    enter = None
    for j in allowed:
        if ctx.sign(cost[j]) < 0:
            enter = j
            break
    if enter is None:
        return "optimal"
    leave, best = None, None
    for i, row in enumerate(T):
        a = row[enter]
        if ctx.sign(a) > 0:
            ratio = row[-1] / a
            if best is None or ctx.sign(ratio - best) < 0 or (
                ctx.is_zero(ratio - best) and basis[i] < basis[leave]
            ):
                leave, best = i, ratio
    if leave is None:
        return "unbounded"
    if trace is not None:
        trace.append(f"phase{phase} pivot: enter col {enter}, leave row {leave} (basis {basis[leave]})")
    _pivot(T, cost, basis, leave, enter, ctx)
    return "pivoted"


def _solve_standard(std: _Standard, ctx, trace):
    m, n = std.m_rows, std.n_total
    T = [[std.cols[j][i] for j in range(n)] + [std.b[i]] for i in range(m)]
    basis = std.initial_basis()
    iters = 0

    # phase 1: minimize the sum of artificial variables
    has_art = any(k == "art" for k in std.kinds)
    if has_art:
        cost = [ctx.one if std.kinds[j] == "art" else ctx.zero for j in range(n)]
        cost.append(ctx.zero)
        for i in range(m):
            if std.kinds[basis[i]] == "art":
                for k in range(n + 1):
                    cost[k] = cost[k] - T[i][k]
        allowed = range(n)
        while True:
            step = _bland_step(T, cost, basis, allowed, ctx, trace, 1)
            if step == "pivoted":
                iters += 1
                continue
            break
        if ctx.sign(-cost[-1]) > 0:
            return LpSolution(status="infeasible", iterations=iters), basis
        # drive artificials out of the basis when a real pivot exists
        for i in range(m):
            if std.kinds[basis[i]] == "art":
                for j in range(n):
                    if std.kinds[j] != "art" and not ctx.is_zero(T[i][j]):
                        _pivot(T, cost, basis, i, j, ctx)
                        iters += 1
                        break

    # phase 2
    cost = [std.cost(j) for j in range(n)] + [ctx.zero]
    for i in range(m):
        cb = cost[basis[i]]
        if not ctx.is_zero(cb):
            for k in range(n + 1):
                cost[k] = cost[k] - cb * T[i][k]
    allowed = [j for j in range(n) if std.kinds[j] != "art"]
    while True:
        step = _bland_step(T, cost, basis, allowed, ctx, trace, 2)
        if step == "pivoted":
            iters += 1
            continue
        if step == "unbounded":
            return LpSolution(status="unbounded", iterations=iters), basis
        break

    x_std = [ctx.zero] * n
    for i in range(m):
        x_std[basis[i]] = T[i][-1]
    y = [-cost[std.ident[i]] for i in range(m)]
    z = -cost[-1]
    sol = _assemble(std, x_std, y, z, ctx, iters, "tableau")
    return sol, basis


def _assemble(std: _Standard, x_std, y, z, ctx, iters, path):
    n_orig = max(j for j, _ in std.colmap) + 1 if std.colmap else 0
    x = [ctx.zero] * n_orig
    for col, (j, mult) in enumerate(std.colmap):
        x[j] = x[j] + mult * x_std[col]
    sense_m = -ctx.one if std.maxing else ctx.one
    duals = [sense_m * std.rowflip[i] * y[i] for i in range(std.m_rows)]
    value = sense_m * z
    return LpSolution(
        status="optimal", value=value, x=x, duals=duals, iterations=iters, path=path
    )


def _verify_basis(std: _Standard, basis, ctx):
    """Exact optimality check of a proposed basis; LpSolution or None."""
    m = len(basis)
    if len(set(basis)) != m:
        return None
    B_cols = [std.column(j) for j in basis]  # each is a length-m column
    sols = _exact_solve_square_cols(B_cols, [std.b], ctx)
    if sols is None:
        return None
    x_B = sols[0]
    for j, v in zip(basis, x_B):
        if ctx.sign(v) < 0:
            return None
        if std.kinds[j] == "art" and not ctx.is_zero(v):
            return None
    # dual vector: B^T y = c_B
    Bt_cols = [[std.column(j)[i] for j in basis] for i in range(m)]
    c_B = [std.cost(j) for j in basis]
    ysol = _exact_solve_square_cols(Bt_cols, [c_B], ctx)
    if ysol is None:
        return None
    y = ysol[0]
    basis_set = set(basis)
    for j in range(std.n_total):
        if j in basis_set or std.kinds[j] == "art":
            continue
        col = std.column(j)
        r = std.cost(j)
        for i in range(m):
            if not ctx.is_zero(col[i]):
                r = r - y[i] * col[i]
        if ctx.sign(r) < 0:
            return None
    x_std = [ctx.zero] * std.n_total
    z = ctx.zero
    for j, v, cb in zip(basis, x_B, c_B):
        x_std[j] = v
        z = z + cb * v
    return _assemble(std, x_std, y, z, ctx, 0, "verified-basis")


def _exact_solve_square_cols(columns, rhs_list, ctx):
    """Solve B x = rhs where B is given by columns; None if singular."""
    m = len(columns)
    aug = [[columns[j][i] for j in range(m)] + [r[i] for r in rhs_list] for i in range(m)]
    width = m + len(rhs_list)
    for k in range(m):
        p = next((i for i in range(k, m) if not ctx.is_zero(aug[i][k])), None)
        if p is None:
            return None
        if p != k:
            aug[k], aug[p] = aug[p], aug[k]
        inv = ctx.one / aug[k][k]
        for t in range(k, width):
            aug[k][t] = aug[k][t] * inv
        for i in range(m):
            if i != k:
                f = aug[i][k]
                if not ctx.is_zero(f):
                    for t in range(k, width):
                        aug[i][t] = aug[i][t] - f * aug[k][t]
    return [[aug[i][m + s] for i in range(m)] for s in range(len(rhs_list))]


def _solve_highs(prob: LpProblem, trace):
    from scipy.optimize import linprog

    n = len(prob.objective)
    signs = prob.var_signs or [1] * n
    minimizing = prob.sense == "min"
    c = [float(v) for v in prob.objective]
    if not minimizing:
        c = [-v for v in c]
    A_ub, b_ub, ub_map = [], [], []  # (original row, rhs sign under conversion)
    A_eq, b_eq, eq_map = [], [], []
    for i, (coeffs, rel, rhs) in enumerate(prob.rows):
        fc = [float(v) for v in coeffs]
        fr = float(rhs)
        if rel == REL_LE:
            A_ub.append(fc)
            b_ub.append(fr)
            ub_map.append((i, 1.0))
        elif rel == REL_GE:
            A_ub.append([-v for v in fc])
            b_ub.append(-fr)
            ub_map.append((i, -1.0))
        else:
            A_eq.append(fc)
            b_eq.append(fr)
            eq_map.append(i)
    bounds = [(0, None) if s > 0 else (None, 0) if s < 0 else (None, None)
              for s in signs]
    res = linprog(c, A_ub=A_ub or None, b_ub=b_ub or None,
                  A_eq=A_eq or None, b_eq=b_eq or None,
                  bounds=bounds, method="highs")
    iters = int(getattr(res, "nit", 0) or 0)
    if res.status == 2:
        return LpSolution(status="infeasible", iterations=iters, path="highs")
    if res.status == 3:
        return LpSolution(status="unbounded", iterations=iters, path="highs")
    if res.status != 0:
        raise RuntimeError(f"float LP solve failed: {res.message}")
    if trace is not None:
        trace.append(f"highs: optimal in {iters} iterations")
    # marginals are d(min objective)/d(rhs); fold back sense and row flips
    sense_m = 1.0 if minimizing else -1.0
    duals = [0.0] * len(prob.rows)
    if ub_map:
        for (i, mult), marg in zip(ub_map, res.ineqlin.marginals):
            duals[i] = sense_m * mult * marg
    if eq_map:
        for i, marg in zip(eq_map, res.eqlin.marginals):
            duals[i] = sense_m * marg
    x = list(res.x)
    for j, s in enumerate(signs):  # clamp round-off that crosses a sign bound
        if (s > 0 and x[j] < 0) or (s < 0 and x[j] > 0):
            x[j] = 0.0
    value = res.fun if minimizing else -res.fun
    return LpSolution(status="optimal", value=value, x=x, duals=duals,
                      iterations=iters, path="highs")


def solve_lp(prob: LpProblem, ctx: ScalarContext, *, trace=None, float_guide=True):
    """Solve an LP over the given scalar context.

    Exact contexts try a float-guided basis verification first and fall back
    to a fully exact pivot sequence when the proposed basis does not verify.
    """
    if not ctx.exact:
        return _solve_highs(prob, trace)

    if float_guide:
        fctx = FloatContext()
        fstd = _Standard(prob, fctx)
        fsol, fbasis = _solve_standard(fstd, fctx, None)
        if fsol.status == "optimal":
            std = _Standard(prob, ctx)
            verified = None
            if len(fbasis) == std.m_rows and all(j < std.n_total for j in fbasis):
                verified = _verify_basis(std, fbasis, ctx)
            if verified is not None:
                if trace is not None:
                    trace.append("float-guided basis verified exactly")
                return verified

    std = _Standard(prob, ctx)
    sol, _ = _solve_standard(std, ctx, trace)
    return sol
