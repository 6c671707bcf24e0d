"""Train connection network: pairwise connection times and depot eligibility.

Two trains can connect only when the first arrives where the second departs.
The connection time is the departure-minus-arrival gap, pushed to the next
service day (+1440 min) whenever the same-day gap falls below the minimum
turnaround. Pairs meeting at the depot-adjacent station may additionally
carry a maintenance arc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timetable import MINUTES_PER_DAY, TimetableInstance, Train

# Sentinel for "these trains cannot connect". Deliberately not a large finite
# number: arithmetic on None raises immediately instead of producing a
# plausible-looking total.
INFEASIBLE = None


def connection_time(vi: Train, vj: Train, t_connect: int) -> int | None:
    """Minutes an EMU waits between serving vi and then vj, or INFEASIBLE.

    Same-station pairs always connect: gaps shorter than t_connect roll over
    to the following day, so the result lies in [t_connect, t_connect + 1440).
    """
    if vi.arr_station != vj.dep_station:
        return INFEASIBLE
    gap = vj.dep_time - vi.arr_time
    if gap >= t_connect:
        return gap
    return gap + MINUTES_PER_DAY


def maintenance_eligible(vi: Train, vj: Train, maint_stations: frozenset[str]) -> int:
    """1 when a maintenance slot may separate vi and vj, else 0.

    Requires the handover station (vi's arrival = vj's departure) to be the
    depot-adjacent one.
    """
    if vi.arr_station == vj.dep_station and vj.dep_station in maint_stations:
        return 1
    return 0


@dataclass(frozen=True)
class ConnectionMatrices:
    """Dense n x n connection data, indexed by train id - 1.

    conn_time is float64 with NaN marking infeasible pairs (including the
    diagonal); theta is int8 in {0, 1}. Use feasible()/time() for scalar
    access; time() refuses infeasible entries.
    """

    conn_time: np.ndarray
    theta: np.ndarray
    n: int

    def feasible(self, i: int, j: int) -> bool:
        return not np.isnan(self.conn_time[i, j])

    def time(self, i: int, j: int) -> int:
        v = self.conn_time[i, j]
        if np.isnan(v):
            raise ValueError(f"trains {i + 1} and {j + 1} cannot connect")
        return int(v)

    def time_by_id(self, id_i: int, id_j: int) -> int:
        return self.time(id_i - 1, id_j - 1)

    def dump_tsv(self, which: str = "conn") -> str:
        """Tab-separated dump with 'INF' in place of infeasible entries."""
        if which == "conn":
            rows = [
                "\t".join("INF" if np.isnan(v) else str(int(v)) for v in row)
                for row in self.conn_time
            ]
        elif which == "theta":
            rows = ["\t".join(str(int(v)) for v in row) for row in self.theta]
        else:
            raise ValueError("which must be 'conn' or 'theta'")
        return "\n".join(rows) + "\n"

    def conn_rows(self) -> list[list[int | None]]:
        """Connection times as plain nested lists (None = infeasible), cached.

        Scalar lookups in the constructive inner loop are several times
        faster on lists than on the ndarray.
        """
        cached = getattr(self, "_conn_rows", None)
        if cached is None:
            cached = [
                [None if v != v else int(v) for v in row] for row in self.conn_time.tolist()
            ]
            object.__setattr__(self, "_conn_rows", cached)
        return cached

    def theta_rows(self) -> list[list[int]]:
        cached = getattr(self, "_theta_rows", None)
        if cached is None:
            cached = [[int(v) for v in row] for row in self.theta.tolist()]
            object.__setattr__(self, "_theta_rows", cached)
        return cached


def build_matrices(instance: TimetableInstance) -> ConnectionMatrices:
    """Evaluate connection time and maintenance eligibility for every pair."""
    n = instance.n
    conn = np.full((n, n), np.nan)
    theta = np.zeros((n, n), dtype=np.int8)
    t_connect = instance.params.t_connect
    maint = instance.maint_stations
    for i, vi in enumerate(instance.trains):
        for j, vj in enumerate(instance.trains):
            if i == j:
                continue
            c = connection_time(vi, vj, t_connect)
            if c is not INFEASIBLE:
                conn[i, j] = c
            theta[i, j] = maintenance_eligible(vi, vj, maint)
    conn.setflags(write=False)
    theta.setflags(write=False)
    return ConnectionMatrices(conn_time=conn, theta=theta, n=n)
