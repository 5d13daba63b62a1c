"""Estimator-side error mitigation.

The probe tomogram (X/Y/Z counts reduced to probe bit x system-flag cells)
feeds three estimators of increasing strength: raw interference expectations,
post-selected verification (unbiased by <Z>_0), and its purified variant.
Renormalization against a depth-matched reference and readout confusion
inversion complete the set; Pauli twirling randomizes coherent gate errors
into stochastic ones at the circuit level.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .circuits import Circuit, Gate, MeasurementCounts, FIXED_MATRICES
from .paulis import PauliString
from .states import DensityMatrix

CELLS = ("00", "01", "10", "11")  # probe bit then system-nonzero flag
REFERENCE_FLOOR = 0.05
_PAULI_1Q = {p: PauliString(p).to_matrix() for p in "IXYZ"}


@dataclass(frozen=True)
class MomentEstimate:
    """Complex moment value with uncertainties and circuit diagnostics."""

    value: complex
    sigma_re: float = 0.0
    sigma_im: float = 0.0
    purity: float = 1.0
    p0_success: float = 1.0
    renorm_factor: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not (np.isfinite(self.sigma_re) and np.isfinite(self.sigma_im)):
            raise ValueError("sigmas must be finite")
        if self.sigma_re < 0 or self.sigma_im < 0:
            raise ValueError("sigmas must be nonnegative")


def as_estimate(value) -> MomentEstimate:
    if isinstance(value, MomentEstimate):
        return value
    return MomentEstimate(value=complex(value))


@dataclass(frozen=True)
class AncillaTomogram:
    """Per-basis records of (probe bit, system-all-zeros flag) outcomes.

    Each record is a MeasurementCounts on two virtual wires, or any mapping
    from the labels 00/01/10/11 to nonnegative weights (fractional weights
    appear after readout mitigation).  Label convention: first char is the
    probe bit, second is 0 exactly when the system read back all zeros.
    """

    counts_x: MeasurementCounts | Mapping[str, float]
    counts_y: MeasurementCounts | Mapping[str, float]
    counts_z: MeasurementCounts | Mapping[str, float]
    flipped: bool = False

    def record(self, basis: str) -> Mapping[str, float]:
        rec = {"X": self.counts_x, "Y": self.counts_y, "Z": self.counts_z}[basis]
        if isinstance(rec, MeasurementCounts):
            return rec.counts
        return rec

    def cells(self, basis: str) -> np.ndarray:
        rec = self.record(basis)
        return np.array([float(rec.get(c, 0)) for c in CELLS])

    def shots(self, basis: str) -> float:
        return float(self.cells(basis).sum())


def reduce_counts(counts: MeasurementCounts, probe: int) -> MeasurementCounts:
    """Fold a full register record down to (probe bit, system flag) cells."""
    out: dict[str, int] = {}
    for label, n in counts.counts.items():
        probe_bit = label[probe]
        system = label[:probe] + label[probe + 1:]
        flag = "0" if set(system) <= {"0"} else "1"
        key = probe_bit + flag
        out[key] = out.get(key, 0) + n
    return MeasurementCounts(out, 2, counts.shots)


def reduce_weights(weights: Mapping[str, float], probe: int) -> dict[str, float]:
    out = {c: 0.0 for c in CELLS}
    for label, w in weights.items():
        probe_bit = label[probe]
        system = label[:probe] + label[probe + 1:]
        flag = "0" if set(system) <= {"0"} else "1"
        out[probe_bit + flag] += w
    return out


def tomogram_cells_from_density(rhos: Mapping[str, DensityMatrix], probe: int,
                                flipped: bool = False) -> AncillaTomogram:
    """Analytic tomogram: exact outcome probabilities as the cell weights."""
    records = {}
    for basis, rho in rhos.items():
        probs = rho.probabilities()
        n = rho.num_qubits
        cells = {c: 0.0 for c in CELLS}
        for idx, p in enumerate(probs):
            if p == 0.0:
                continue
            bits = format(idx, f"0{n}b")
            probe_bit = bits[probe]
            system = bits[:probe] + bits[probe + 1:]
            flag = "0" if set(system) <= {"0"} else "1"
            cells[probe_bit + flag] += float(p)
        records[basis] = cells
    return AncillaTomogram(records["X"], records["Y"], records["Z"], flipped)


def _marginal(cells: np.ndarray) -> float:
    total = cells.sum()
    if total <= 0:
        raise ValueError("empty basis record")
    return float((cells[0] + cells[1] - cells[2] - cells[3]) / total)


def _conditional(cells: np.ndarray) -> tuple[float, float]:
    """(post-selected expectation, success fraction) of one basis record."""
    kept = cells[0] + cells[2]
    total = cells.sum()
    if total <= 0:
        raise ValueError("empty basis record")
    if kept <= 0:
        raise ValueError("post-selection kept no shots")
    return float((cells[0] - cells[2]) / kept), float(kept / total)


def raw_estimate(t: AncillaTomogram) -> MomentEstimate:
    """Interference expectations without post-selection or unbiasing."""
    bx = _marginal(t.cells("X"))
    by = _marginal(t.cells("Y"))
    bz = _marginal(t.cells("Z"))
    if t.flipped:
        by, bz = -by, -bz
    _, p0x = _conditional_safe(t.cells("X"))
    _, p0y = _conditional_safe(t.cells("Y"))
    _, p0z = _conditional_safe(t.cells("Z"))
    purity = min(1.0, 0.5 * (1.0 + bx * bx + by * by + bz * bz))
    return MomentEstimate(complex(bx, by), purity=purity,
                          p0_success=float(np.mean([p0x, p0y, p0z])))


def _conditional_safe(cells: np.ndarray) -> tuple[float, float]:
    try:
        return _conditional(cells)
    except ValueError:
        return 0.0, 0.0


def _bloch(t: AncillaTomogram) -> tuple[np.ndarray, float]:
    pairs = [_conditional(t.cells(b)) for b in "XYZ"]
    b = np.array([p[0] for p in pairs])
    p0 = float(np.mean([p[1] for p in pairs]))
    return b, p0


def _alpha_from_bloch(b: np.ndarray, flipped: bool) -> tuple[complex, bool]:
    """Invert the post-selected Bloch components to the moment alpha.

    Returns (alpha, ok); ok is False on a vanishing denominator, which is
    the <Z>_0 = -1 blow-up (or +1 for the flipped convention).
    """
    bx, by, bz = b
    denom = (1.0 - bz) if flipped else (1.0 + bz)
    if abs(denom) < 1e-12:
        return 0j, False
    if flipped:
        return complex(bx / denom, -by / denom), True
    return complex(bx / denom, by / denom), True


def ev_estimate(t: AncillaTomogram) -> MomentEstimate:
    """Post-selected estimate: Re = <X>_0 / (1 + <Z>_0), likewise Im."""
    b, p0 = _bloch(t)
    purity = min(1.0, 0.5 * (1.0 + float(b @ b)))
    alpha, ok = _alpha_from_bloch(b, t.flipped)
    flags = () if ok else ("invalid-denominator",)
    return MomentEstimate(alpha, purity=purity, p0_success=p0, flags=flags)


def pev_estimate(t: AncillaTomogram) -> MomentEstimate:
    """Purified estimate: project the tomographic state to the closest pure
    state (unit Bloch vector, same direction) before inverting."""
    b, p0 = _bloch(t)
    r = float(np.sqrt(b @ b))
    purity = min(1.0, 0.5 * (1.0 + r * r))
    if r < 1e-12:
        est = ev_estimate(t)
        return replace(est, flags=est.flags + ("purification-fallback",))
    alpha, ok = _alpha_from_bloch(b / r, t.flipped)
    flags = () if ok else ("invalid-denominator",)
    return MomentEstimate(alpha, purity=purity, p0_success=p0, flags=flags)


def estimate_with_sigma(t: AncillaTomogram,
                        estimator: Callable[[AncillaTomogram], MomentEstimate],
                        resamples: int = 200,
                        seed: int | np.random.Generator = 0) -> MomentEstimate:
    """Attach posterior-resampling error bars to a tomogram estimator.

    Each basis record gets an independent flat-prior Dirichlet posterior over
    its four cells; synthetic records (posterior draw x shots) are pushed
    through the estimator and the spread of the results is the sigma.
    Resamples where the estimator fails are dropped.
    """
    central = estimator(t)
    if resamples < 2:
        return central
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = {}
    for basis in "XYZ":
        cells = t.cells(basis)
        draws[basis] = rng.dirichlet(1.0 + cells, size=resamples) * cells.sum()
    values = []
    for i in range(resamples):
        synthetic = AncillaTomogram(
            dict(zip(CELLS, draws["X"][i])),
            dict(zip(CELLS, draws["Y"][i])),
            dict(zip(CELLS, draws["Z"][i])),
            t.flipped)
        try:
            values.append(estimator(synthetic).value)
        except ValueError:
            continue
    flags = central.flags
    if len(values) < resamples:
        flags = flags + (f"dropped-resamples:{resamples - len(values)}",)
    if len(values) < 2:
        return replace(central, flags=flags + ("no-sigma",))
    arr = np.array(values)
    return replace(central, sigma_re=float(np.std(arr.real)),
                   sigma_im=float(np.std(arr.imag)), flags=flags)


def probe_z_estimate(counts: MeasurementCounts | Mapping[str, float], probe: int,
                     resamples: int = 200,
                     seed: int | np.random.Generator = 0) -> MomentEstimate:
    """<Z> of the probe wire from a full-register record, with Beta sigma."""
    rec = counts.counts if isinstance(counts, MeasurementCounts) else counts
    n0 = sum(float(w) for label, w in rec.items() if label[probe] == "0")
    n1 = sum(float(w) for label, w in rec.items() if label[probe] == "1")
    total = n0 + n1
    if total <= 0:
        raise ValueError("empty record")
    value = (n0 - n1) / total
    sigma = 0.0
    if resamples >= 2:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        p0 = rng.beta(1.0 + n0, 1.0 + n1, size=resamples)
        sigma = float(np.std(2.0 * p0 - 1.0))
    return MomentEstimate(complex(value, 0.0), sigma_re=sigma, sigma_im=sigma)


def combine_flip_estimates(plain: MomentEstimate,
                           flipped: MomentEstimate) -> MomentEstimate:
    """Average a probe-flip pair: (value - value_flipped) / 2."""
    return MomentEstimate(
        (plain.value - flipped.value) / 2.0,
        sigma_re=0.5 * float(np.hypot(plain.sigma_re, flipped.sigma_re)),
        sigma_im=0.5 * float(np.hypot(plain.sigma_im, flipped.sigma_im)),
        purity=plain.purity, p0_success=plain.p0_success,
        flags=plain.flags + flipped.flags)


def odr_correct(signal, reference, reference_truth: float = 1.0,
                floor: float = REFERENCE_FLOOR) -> MomentEstimate:
    """Rescale a signal by truth/measured of the reference circuit.

    Exact when the noise acts as a global depolarizing factor common to both
    circuits.  A reference magnitude under ``floor`` flags the correction as
    unstable; out-of-scale results are clamped to +-1 per component, which is
    the plotting convention for diverged points.
    """
    signal = as_estimate(signal)
    reference = as_estimate(reference)
    ref = float(reference.value.real)
    flags = signal.flags + reference.flags
    if abs(ref) < floor:
        flags = flags + ("unstable-reference",)
    if ref == 0.0:
        re, im = np.inf * np.sign(signal.value.real), np.inf * np.sign(signal.value.imag)
        sre = sim = 0.0
    else:
        factor = reference_truth / ref
        re = signal.value.real * factor
        im = signal.value.imag * factor
        sre = float(np.hypot(signal.sigma_re * factor, re / ref * reference.sigma_re))
        sim = float(np.hypot(signal.sigma_im * factor, im / ref * reference.sigma_re))
    if abs(re) > 1.0 or abs(im) > 1.0 or not (np.isfinite(re) and np.isfinite(im)):
        flags = flags + ("clamped",)
    re = float(np.clip(np.nan_to_num(re, nan=0.0, posinf=1.0, neginf=-1.0), -1.0, 1.0))
    im = float(np.clip(np.nan_to_num(im, nan=0.0, posinf=1.0, neginf=-1.0), -1.0, 1.0))
    return MomentEstimate(complex(re, im), sigma_re=sre, sigma_im=sim,
                          purity=signal.purity, p0_success=signal.p0_success,
                          renorm_factor=ref, flags=flags)


def readout_mitigate(counts: MeasurementCounts | Mapping[str, float],
                     confusion: np.ndarray | list[np.ndarray]) -> dict[str, float]:
    """Invert per-qubit confusion matrices on the joint outcome record.

    Returns corrected outcome probabilities, clipped to the simplex (negative
    entries from sampling noise zeroed, then renormalized).
    """
    if isinstance(counts, MeasurementCounts):
        rec, n = counts.counts, counts.num_qubits
    else:
        rec = counts
        n = len(next(iter(counts)))
    mats = [confusion] * n if isinstance(confusion, np.ndarray) else list(confusion)
    if len(mats) != n:
        raise ValueError("need one confusion matrix per qubit")
    tensor = np.zeros([2] * n)
    total = sum(rec.values())
    if total <= 0:
        raise ValueError("empty record")
    for label, w in rec.items():
        tensor[tuple(int(b) for b in label)] += w / total
    for q, mat in enumerate(mats):
        inv = np.linalg.inv(np.asarray(mat, dtype=float))
        tensor = np.moveaxis(np.tensordot(inv, tensor, axes=([1], [q])), 0, q)
    np.clip(tensor, 0.0, None, out=tensor)
    s = tensor.sum()
    if s <= 0:
        raise ValueError("mitigation collapsed the record")
    tensor /= s
    out = {}
    for idx in np.ndindex(*tensor.shape):
        if tensor[idx] > 0.0:
            out["".join(str(b) for b in idx)] = float(tensor[idx])
    return out


def _twirl_table(gate_matrix: np.ndarray) -> dict[tuple[str, str], tuple[str, str]]:
    """(P_c, P_t) -> letters of G (P_c x P_t) G^dag, signs dropped."""
    table = {}
    letters = "IXYZ"
    for a in letters:
        for b in letters:
            m = gate_matrix @ np.kron(_PAULI_1Q[a], _PAULI_1Q[b]) @ gate_matrix.conj().T
            for c in letters:
                done = False
                for d in letters:
                    target = np.kron(_PAULI_1Q[c], _PAULI_1Q[d])
                    for sign in (1.0, -1.0):
                        if np.allclose(m, sign * target, atol=1e-12):
                            table[(a, b)] = (c, d)
                            done = True
                            break
                    if done:
                        break
                if done:
                    break
            else:
                raise AssertionError("conjugation left the Pauli group")
    return table


_TWIRL_TABLES = {kind: _twirl_table(FIXED_MATRICES[kind]) for kind in ("CNOT", "CZ")}


def pauli_twirl(circuit: Circuit, count: int, seed: int = 0) -> list[Circuit]:
    """Randomly compiled copies: every CNOT/CZ dressed with Pauli pairs.

    Each copy equals the input unitary up to global phase (conjugation signs
    are dropped).  Other two-qubit gate kinds are rejected; lower them first.
    """
    if count < 1:
        raise ValueError("need at least one twirl")
    for g in circuit.gates:
        if len(g.sites) == 2 and g.kind not in _TWIRL_TABLES:
            raise ValueError(f"cannot twirl {g.kind}; lower to CNOT/CZ first")
        if len(g.sites) > 2:
            raise ValueError(f"cannot twirl {g.kind}; lower to CNOT/CZ first")
    rng = np.random.default_rng(seed)
    letters = "IXYZ"
    out = []
    for _ in range(count):
        twirled = Circuit(circuit.num_qubits)
        for g in circuit.gates:
            if g.kind not in _TWIRL_TABLES:
                twirled.add(g)
                continue
            a, b = rng.choice(4), rng.choice(4)
            pa, pb = letters[a], letters[b]
            ca, cb = _TWIRL_TABLES[g.kind][(pa, pb)]
            control, target = g.sites
            for q, letter in ((control, pa), (target, pb)):
                if letter != "I":
                    twirled.add(Gate(letter, (q,)))
            twirled.add(g)
            for q, letter in ((control, ca), (target, cb)):
                if letter != "I":
                    twirled.add(Gate(letter, (q,)))
        out.append(twirled)
    return out
