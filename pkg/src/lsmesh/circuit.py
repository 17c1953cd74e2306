"""Circuit IR, text/OpenQASM parsing, gate-set decomposition and benchmark generators."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

# Universal gate set handled by the scheduler.
GATE_SET = ("cnot", "h", "s", "t", "x", "y", "z")
SINGLE_QUBIT = ("h", "s", "t", "x", "y", "z")
PAULI = ("x", "y", "z")
# Accepted on input, rewritten by decompose_to_gateset.
EXTENDED = ("sdg", "tdg", "toffoli")

_ARITY = {"cnot": 2, "toffoli": 3, **{k: 1 for k in SINGLE_QUBIT + ("sdg", "tdg")}}
_MNEMONIC = {"cx": "cnot", "cnot": "cnot", "ccx": "toffoli", "toffoli": "toffoli"}


class CircuitError(ValueError):
    """Malformed or unsupported circuit input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    seq: int = 0

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def target(self) -> int:
        return self.qubits[-1]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for i, g in enumerate(self.gates):
            if g.seq != i:
                raise CircuitError(f"gate {i} carries seq {g.seq}")
            if g.kind not in GATE_SET:
                raise CircuitError(f"gate kind {g.kind!r} is not in the gate set")
            _check_operands(g.kind, g.qubits, self.num_qubits)

    @classmethod
    def from_ops(cls, num_qubits: int, ops: Iterable[tuple[str, Sequence[int]]]) -> "Circuit":
        """Build a circuit from (kind, qubits) pairs, assigning sequence numbers."""
        gates = tuple(Gate(k, tuple(q), i) for i, (k, q) in enumerate(ops))
        return cls(num_qubits, gates)

    def __len__(self) -> int:
        return len(self.gates)

    def ops(self) -> list[tuple[str, tuple[int, ...]]]:
        return [(g.kind, g.qubits) for g in self.gates]

    def to_text(self) -> str:
        lines = [f"qubits {self.num_qubits}"]
        for g in self.gates:
            name = "cx" if g.kind == "cnot" else g.kind
            lines.append(" ".join([name, *map(str, g.qubits)]))
        return "\n".join(lines) + "\n"

    def kind_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(GATE_SET, 0)
        for g in self.gates:
            counts[g.kind] += 1
        return counts


def _check_operands(kind: str, qubits: Sequence[int], num_qubits: int, line: int | None = None):
    if len(qubits) != _ARITY[kind]:
        raise CircuitError(f"{kind} takes {_ARITY[kind]} operand(s), got {len(qubits)}", line)
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise CircuitError(f"qubit index {q} out of range [0, {num_qubits})", line)
    if len(set(qubits)) != len(qubits):
        if kind == "cnot":
            raise CircuitError("CNOT control equals target", line)
        raise CircuitError(f"{kind} operands must be distinct", line)


# --------------------------------------------------------------------------
# decomposition

def _toffoli(a: int, b: int, c: int) -> list[tuple[str, tuple[int, ...]]]:
    # Standard 15-gate Clifford+T network; controls a, b, target c.
    return [
        ("h", (c,)), ("cnot", (b, c)), ("tdg", (c,)), ("cnot", (a, c)),
        ("t", (c,)), ("cnot", (b, c)), ("tdg", (c,)), ("cnot", (a, c)),
        ("t", (b,)), ("t", (c,)), ("h", (c,)), ("cnot", (a, b)),
        ("t", (a,)), ("tdg", (b,)), ("cnot", (a, b)),
    ]


def decompose_to_gateset(
    ops: Iterable[tuple[str, Sequence[int]]],
    expand_adjoints: bool = True,
) -> list[tuple[str, tuple[int, ...]]]:
    """Rewrite Sdg, Tdg and Toffoli into the universal gate set.

    Sdg becomes [Z, S] and Tdg becomes [Z, S, T]; both are exact since all
    three factors are diagonal. With ``expand_adjoints=False`` Toffoli is
    unrolled but its Tdg gates are left in place.
    """
    out: list[tuple[str, tuple[int, ...]]] = []
    for kind, qubits in ops:
        qubits = tuple(qubits)
        if kind in GATE_SET:
            out.append((kind, qubits))
        elif kind == "sdg":
            out += [("z", qubits), ("s", qubits)]
        elif kind == "tdg":
            if expand_adjoints:
                out += [("z", qubits), ("s", qubits), ("t", qubits)]
            else:
                out.append((kind, qubits))
        elif kind == "toffoli":
            inner = _toffoli(*qubits)
            out += decompose_to_gateset(inner) if expand_adjoints else inner
        else:
            raise CircuitError(f"unsupported gate {kind!r}")
    return out


# --------------------------------------------------------------------------
# parsing

_QASM_HEADER = re.compile(r"^OPENQASM\s+2(\.0)?$")
_QREG = re.compile(r"^qreg\s+(\w+)\s*\[\s*(\d+)\s*\]$")
_QASM_GATE = re.compile(r"^(\w+)\s+(.+)$")
_QASM_ARG = re.compile(r"^(\w+)\s*\[\s*(\d+)\s*\]$")


def parse_circuit(text: str) -> Circuit:
    """Parse the line format (``qubits n`` header) or the OpenQASM 2 subset."""
    body = [ln.split("#", 1)[0].split("//", 1)[0].strip() for ln in text.splitlines()]
    first = next((ln for ln in body if ln), "")
    if first.startswith("OPENQASM"):
        return _parse_qasm(body)
    return _parse_lines(body)


def _mnemonic(name: str, line: int) -> str:
    kind = _MNEMONIC.get(name, name)
    if kind not in _ARITY:
        raise CircuitError(f"unsupported gate {name!r}", line)
    return kind


def _finish(num_qubits: int, raw: list[tuple[str, tuple[int, ...], int]]) -> Circuit:
    ops: list[tuple[str, tuple[int, ...]]] = []
    for kind, qubits, line in raw:
        _check_operands(kind, qubits, num_qubits, line)
        ops += decompose_to_gateset([(kind, qubits)])
    return Circuit.from_ops(num_qubits, ops)


def _parse_lines(body: list[str]) -> Circuit:
    num_qubits = None
    raw = []
    for lineno, ln in enumerate(body, 1):
        if not ln:
            continue
        tokens = ln.split()
        if num_qubits is None:
            if tokens[0] != "qubits" or len(tokens) != 2 or not tokens[1].isdigit():
                raise CircuitError("expected header 'qubits <n>'", lineno)
            num_qubits = int(tokens[1])
            continue
        kind = _mnemonic(tokens[0].lower(), lineno)
        try:
            qubits = tuple(int(t) for t in tokens[1:])
        except ValueError:
            raise CircuitError(f"non-integer operand in {ln!r}", lineno) from None
        raw.append((kind, qubits, lineno))
    if num_qubits is None:
        raise CircuitError("missing 'qubits <n>' header")
    return _finish(num_qubits, raw)


def _parse_qasm(body: list[str]) -> Circuit:
    reg = None
    num_qubits = 0
    raw = []
    for lineno, ln in enumerate(body, 1):
        for stmt in filter(None, (s.strip() for s in ln.split(";"))):
            if _QASM_HEADER.match(stmt) or stmt.startswith("include"):
                continue
            m = _QREG.match(stmt)
            if m:
                if reg is not None:
                    raise CircuitError("only a single qreg is supported", lineno)
                reg, num_qubits = m.group(1), int(m.group(2))
                continue
            m = _QASM_GATE.match(stmt)
            if not m:
                raise CircuitError(f"cannot parse statement {stmt!r}", lineno)
            name = m.group(1).lower()
            if name in ("creg", "measure", "if", "reset", "barrier", "gate", "opaque"):
                raise CircuitError(f"unsupported statement {name!r}", lineno)
            kind = _mnemonic(name, lineno)
            if reg is None:
                raise CircuitError("gate before qreg declaration", lineno)
            qubits = []
            for arg in m.group(2).split(","):
                a = _QASM_ARG.match(arg.strip())
                if not a or a.group(1) != reg:
                    raise CircuitError(f"bad operand {arg.strip()!r}", lineno)
                qubits.append(int(a.group(2)))
            raw.append((kind, tuple(qubits), lineno))
    if reg is None:
        raise CircuitError("missing qreg declaration")
    return _finish(num_qubits, raw)


# --------------------------------------------------------------------------
# generators

def mix_profile(name: str) -> dict[str, float]:
    """Named gate-probability profiles.

    ``"60/40"`` style names split the one-qubit mass evenly over H, S, T and
    the Paulis; ``"uniform"`` weights all seven gate kinds equally.
    """
    if name == "uniform":
        return {k: 1 / len(GATE_SET) for k in GATE_SET}
    m = re.fullmatch(r"(\d+)/(\d+)", name)
    if not m or int(m.group(1)) + int(m.group(2)) != 100:
        raise ValueError(f"unknown mix profile {name!r}")
    one = int(m.group(1)) / 100
    prof = {k: one / len(SINGLE_QUBIT) for k in SINGLE_QUBIT}
    prof["cnot"] = int(m.group(2)) / 100
    return prof


@dataclass(frozen=True)
class ClusteredMix:
    """First half of the qubits draws from ``pool_a``, the second from ``pool_b``."""

    pool_a: Mapping[str, float]
    pool_b: Mapping[str, float]


def _probs(mix: Mapping[str, float]) -> np.ndarray:
    unknown = set(mix) - set(GATE_SET)
    if unknown:
        raise ValueError(f"unknown gate kinds in mix: {sorted(unknown)}")
    p = np.array([float(mix.get(k, 0.0)) for k in GATE_SET])
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"gate probabilities must be nonnegative and sum to 1, got {p.sum()!r}")
    return p


def generate_random_circuit(
    num_qubits: int,
    num_gates: int,
    mix: Mapping[str, float] | ClusteredMix | str = "60/40",
    seed: int = 0,
) -> Circuit:
    """Random gate-set circuit drawn with numpy's PCG64 generator.

    The acting qubit is drawn uniformly first; the gate kind then comes from
    that qubit's profile. A CNOT's partner is uniform over the other qubits.
    """
    if isinstance(mix, str):
        mix = mix_profile(mix)
    if isinstance(mix, ClusteredMix):
        pa, pb = _probs(mix.pool_a), _probs(mix.pool_b)
    else:
        pa = pb = _probs(mix)
    cnot = GATE_SET.index("cnot")
    if num_gates and num_qubits < 2 and max(pa[cnot], pb[cnot]) > 0:
        raise ValueError("CNOTs require at least two qubits")
    if num_gates and num_qubits < 1:
        raise ValueError("num_qubits must be positive")

    rng = np.random.Generator(np.random.PCG64(seed))
    half = num_qubits // 2
    ops = []
    for _ in range(num_gates):
        q = int(rng.integers(num_qubits))
        p = pa if q < half else pb
        kind = GATE_SET[int(rng.choice(len(GATE_SET), p=p))]
        if kind == "cnot":
            other = int(rng.integers(num_qubits - 1))
            ops.append((kind, (q, other + (other >= q))))
        else:
            ops.append((kind, (q,)))
    return Circuit.from_ops(num_qubits, ops)


def cuccaro_ops(bits: int) -> tuple[int, list[tuple[str, tuple[int, ...]]]]:
    """Pre-decomposition ripple-carry adder (CNOT + Toffoli).

    Register layout: ``[cin, b0, a0, b1, a1, ..., b_{n-1}, a_{n-1}, cout]``.
    Computes b <- a + b mod 2**bits and cout ^= carry; a and cin are restored.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    cin, cout = 0, 2 * bits + 1
    b = [1 + 2 * i for i in range(bits)]
    a = [2 + 2 * i for i in range(bits)]
    carry = [cin] + a[:-1]
    ops: list[tuple[str, tuple[int, ...]]] = []
    for i in range(bits):  # MAJ
        ops += [("cnot", (a[i], b[i])), ("cnot", (a[i], carry[i])), ("toffoli", (carry[i], b[i], a[i]))]
    ops.append(("cnot", (a[-1], cout)))
    for i in reversed(range(bits)):  # UMA
        ops += [("toffoli", (carry[i], b[i], a[i])), ("cnot", (a[i], carry[i])), ("cnot", (carry[i], b[i]))]
    return 2 * bits + 2, ops


def generate_cuccaro_adder(bits: int) -> Circuit:
    num_qubits, ops = cuccaro_ops(bits)
    return Circuit.from_ops(num_qubits, decompose_to_gateset(ops))
