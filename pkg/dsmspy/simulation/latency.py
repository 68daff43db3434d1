from enum import Enum
from fractions import Fraction
import random
from typing import Any, Dict, Iterable, Tuple

from ..network.hst import Hst
from ..utilities import fraction_to_json, parse_fraction

HopKey = Tuple[int, int, int]


class LatencyKind(Enum):
    SYNCHRONOUS = 'synchronous'
    RANDOM_FRACTION = 'random-fraction'
    SCRIPTED = 'scripted'


class LatencyModel:
    """
    per-hop message latency, always within ``(0, w]`` for an edge of weight ``w``
    """

    def __init__(
        self,
        kind: LatencyKind = LatencyKind.SYNCHRONOUS,
        seed: int = 0,
        denominator: int = 16,
        script: Dict[HopKey, Any] = None,
    ):
        """
        :param kind: latency model
        :param seed: random seed of the random-fraction model
        :param denominator: random-fraction latencies are multiples of ``w / denominator``
        :param script: map of ``(message id, from, to)`` to latency; unscripted hops take the full edge weight
        """

        if not isinstance(kind, LatencyKind):
            kind = LatencyKind(kind)
        if denominator < 1:
            raise ValueError(f'denominator must be positive, not {denominator}')
        self.kind = kind
        self.seed = seed
        self.denominator = denominator
        self.script = {
            (int(message), int(u), int(v)): parse_fraction(latency)
            for (message, u, v), latency in (script if script is not None else {}).items()
        }
        self.__rng = random.Random(seed)

    @classmethod
    def synchronous(cls) -> 'LatencyModel':
        return cls(LatencyKind.SYNCHRONOUS)

    @classmethod
    def random_fraction(cls, seed: int, denominator: int = 16) -> 'LatencyModel':
        return cls(LatencyKind.RANDOM_FRACTION, seed=seed, denominator=denominator)

    @classmethod
    def adversarial(
        cls,
        hst: Hst,
        message_ids: Iterable[int],
        seed: int,
        denominator: int = 16,
        bimodal: bool = False,
    ) -> 'LatencyModel':
        """
        script a latency for every message on every directed tree edge

        :param hst: overlay tree
        :param message_ids: ids of the messages that may be sent
        :param seed: random seed
        :param denominator: latencies are multiples of ``w / denominator``
        :param bimodal: draw every latency as either ``w / denominator`` or ``w``, which maximizes overtaking
        :return: scripted latency model
        """

        rng = random.Random(seed)
        script = {}
        for message in sorted(message_ids):
            for parent, child in hst.edges:
                for u, v in ((parent, child), (child, parent)):
                    weight = hst.edge_weight(u, v)
                    if bimodal:
                        steps = rng.choice([1, denominator])
                    else:
                        steps = rng.randint(1, denominator)
                    script[(message, u, v)] = weight * Fraction(steps, denominator)
        return cls(LatencyKind.SCRIPTED, seed=seed, denominator=denominator, script=script)

    def validate(self, hst: Hst):
        """
        reject scripted latencies on non-edges or outside ``(0, w]``
        """

        for (message, u, v), latency in self.script.items():
            if u not in hst or v not in hst or not hst.is_edge(u, v):
                raise ValueError(f'scripted hop ({u}, {v}) of message {message} is not a tree edge')
            weight = hst.edge_weight(u, v)
            if not 0 < latency <= weight:
                raise ValueError(
                    f'scripted latency {latency} of message {message} on ({u}, {v}) is outside (0, {weight}]'
                )

    def latency(self, message: int, u: int, v: int, weight: Fraction) -> Fraction:
        if self.kind == LatencyKind.RANDOM_FRACTION:
            return weight * Fraction(self.__rng.randint(1, self.denominator), self.denominator)
        elif self.kind == LatencyKind.SCRIPTED:
            return self.script.get((message, u, v), weight)
        return Fraction(weight)

    def fresh(self) -> 'LatencyModel':
        return LatencyModel(self.kind, self.seed, self.denominator, self.script)

    def to_json(self) -> Dict[str, Any]:
        data = {'kind': self.kind.value}
        if self.kind == LatencyKind.RANDOM_FRACTION:
            data.update(seed=self.seed, denominator=self.denominator)
        elif self.kind == LatencyKind.SCRIPTED:
            data['script'] = [
                {'msg': message, 'edge': [u, v], 'latency': fraction_to_json(latency)}
                for (message, u, v), latency in sorted(self.script.items())
            ]
        return data

    @classmethod
    def from_json(cls, data: Any) -> 'LatencyModel':
        if isinstance(data, str):
            data = {'kind': data}
        script = {}
        for entry in data.get('script', []):
            u, v = entry['edge']
            script[(int(entry['msg']), int(u), int(v))] = parse_fraction(entry['latency'])
        kind = data.get('kind', LatencyKind.SCRIPTED.value if len(script) > 0 else 'synchronous')
        return cls(
            kind,
            seed=int(data.get('seed', 0)),
            denominator=int(data.get('denominator', 16)),
            script=script,
        )

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.kind.value!r}, seed={self.seed})'
