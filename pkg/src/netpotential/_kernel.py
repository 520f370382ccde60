"""Compiled inner loop for long balayage runs.

Performs exactly the same floating-point operations, in the same order, as
``balayage._sweep_index``; the test suite holds the two to identical states.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _local_residual(v, u, mu, mu0, nb_ptr, nb_idx, deg, normalized):
    uv = u[v]
    s = 0.0
    for p in range(nb_ptr[v], nb_ptr[v + 1]):
        s += u[nb_idx[p]] - uv
    if normalized:
        s /= deg[v]
    return -s - (mu0[v] - mu[v])


@njit(cache=True)
def sweep_block(seq, greedy, nsteps, tol, interior, step0,
                mu, u, acc, comp, mu0, res,
                nb_ptr, nb_idx, deg, in_dom, in_bd, wd, wb, normalized,
                record, offset, t_step, t_vertex, t_mass, t_interior, t_boundary, t_residual,
                t_swept):
    """Run up to ``nsteps`` sweeps, stopping early once interior mass < tol.

    Returns ``(steps_done, interior_mass)``.
    """
    n = mu.shape[0]
    done = 0
    while done < nsteps:
        if interior < tol:
            break
        if greedy:
            k = 0
            best = mu[0]
            for v in range(1, n):
                if mu[v] > best:
                    best = mu[v]
                    k = v
        else:
            k = seq[done]
        m = mu[k]
        mu[k] = 0.0
        if normalized:
            u[k] += m
            for p in range(nb_ptr[k], nb_ptr[k + 1]):
                w = nb_idx[p]
                mu[w] += m / deg[w]
        else:
            share = m / deg[k]
            u[k] += share
            for p in range(nb_ptr[k], nb_ptr[k + 1]):
                mu[nb_idx[p]] += share
        for p in range(nb_ptr[k], nb_ptr[k + 1]):
            w = nb_idx[p]
            if in_bd[w]:
                x = mu[w]
                a = acc[w]
                t = a + x
                if abs(a) >= abs(x):
                    comp[w] += (a - t) + x
                else:
                    comp[w] += (x - t) + a
                acc[w] = t
                mu[w] = 0.0

        res[k] = _local_residual(k, u, mu, mu0, nb_ptr, nb_idx, deg, normalized)
        for p in range(nb_ptr[k], nb_ptr[k + 1]):
            w = nb_idx[p]
            if in_dom[w]:
                res[w] = _local_residual(w, u, mu, mu0, nb_ptr, nb_idx, deg, normalized)

        interior = 0.0
        bmass = 0.0
        worst = 0.0
        for v in range(n):
            interior += mu[v] * wd[v]
            bmass += (acc[v] + comp[v]) * wb[v]
            r = abs(res[v])
            if r > worst:
                worst = r
        done += 1
        if record:
            j = offset + done - 1
            t_step[j] = step0 + done
            t_vertex[j] = k
            t_mass[j] = m
            t_interior[j] = interior
            t_boundary[j] = bmass
            t_residual[j] = worst
            t_swept[j] = mu[k]
    return done, interior


def csr_neighbors(G):
    ptr = np.zeros(G.n + 1, dtype=np.int64)
    np.cumsum(G.degrees, out=ptr[1:])
    return ptr, np.ascontiguousarray(G._adj_cols, dtype=np.int64)
