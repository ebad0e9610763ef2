"""Transmitter->RIS and RIS->receiver assignment matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ga import BeamTask


@dataclass
class Assignment:
    """Binary matrices ``x[m, u]`` (UE u transmits via RIS m) and ``z[m, r]``
    (RIS m reflects towards UE r), plus the beam task each RIS was designed for."""

    x: np.ndarray
    z: np.ndarray
    beams: list = field(default_factory=list)

    @classmethod
    def empty(cls, num_ris: int, num_ues: int) -> "Assignment":
        return cls(np.zeros((num_ris, num_ues), dtype=int), np.zeros((num_ris, num_ues), dtype=int),
                   [None] * num_ris)

    @property
    def num_ris(self) -> int:
        return self.x.shape[0]

    def copy(self) -> "Assignment":
        return Assignment(self.x.copy(), self.z.copy(), list(self.beams))

    def transmitter(self, m: int) -> int | None:
        idx = np.flatnonzero(self.x[m])
        return int(idx[0]) if idx.size else None

    def receivers(self, m: int) -> list[int]:
        return [int(r) for r in np.flatnonzero(self.z[m])]

    def transmitters(self) -> list[tuple[int, int]]:
        """(ris, tx) for every RIS that has a transmitter."""
        return [(m, u) for m in range(self.num_ris) if (u := self.transmitter(m)) is not None]

    def triples(self) -> list[tuple[int, int, int]]:
        """All (tx, ris, rx) links."""
        out = []
        for m, u in self.transmitters():
            out.extend((u, m, r) for r in self.receivers(m))
        return out

    def has_triple(self, u: int, m: int, r: int) -> bool:
        return 0 <= m < self.num_ris and bool(self.x[m, u]) and bool(self.z[m, r])

    def assign(self, m: int, u: int, receivers, beam: BeamTask | None = None) -> None:
        self.x[m] = 0
        self.z[m] = 0
        self.x[m, u] = 1
        self.z[m, list(receivers)] = 1
        self.beams[m] = beam

    def clear(self, m: int) -> None:
        self.x[m] = 0
        self.z[m] = 0
        self.beams[m] = None

    def check_constraints(self, um: int) -> None:
        """Raise if the per-receiver, budget or per-RIS capacity constraints fail."""
        M = self.num_ris
        if np.any(self.z.sum(axis=0) > 1):
            raise AssertionError("a receiver is served by more than one RIS")
        if self.x.sum() > M:
            raise AssertionError("more transmitter-RIS links than RISs")
        if np.any(self.x.sum(axis=1) > 1):
            raise AssertionError("a RIS serves more than one transmitter")
        if np.any(self.x.sum(axis=0) > 1):
            raise AssertionError("a transmitter uses more than one RIS")
        if np.any(self.z.sum(axis=1) > um):
            raise AssertionError("a RIS reflects to more than U_m receivers")
        if np.any((self.z.sum(axis=1) > 0) & (self.x.sum(axis=1) == 0)):
            raise AssertionError("a RIS has receivers but no transmitter")
        if np.any(self.x * self.z):
            raise AssertionError("a RIS reflects back to its own transmitter")
        if len(self.triples()) > um * M:
            raise AssertionError("more than U_m * M RIS-aided links")

    def to_json(self) -> dict:
        beams = []
        for m, u in self.transmitters():
            task = self.beams[m]
            targets = [] if task is None else [float(np.degrees(t)) for t in task.targets]
            beams.append({"ris": m, "tx": u, "targets_deg": targets})
        return {"x": self.x.tolist(), "z": self.z.tolist(), "beams": beams}
