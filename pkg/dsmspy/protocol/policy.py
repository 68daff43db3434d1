from abc import ABC, abstractmethod
from enum import Enum
from fractions import Fraction
import random
from typing import Any, Dict, List, Sequence, Tuple

from .base import Message


class TiePolicyKind(Enum):
    LOWEST_ID = 'lowest-id'
    SEEDED_RANDOM = 'seeded-random'
    SCRIPTED = 'scripted'


class TiePolicy(ABC):
    """
    resolves the choices the protocol leaves open: which child a message is sent to, and the order of simultaneous arrivals
    """

    kind: TiePolicyKind = NotImplemented

    @abstractmethod
    def select_child(self, node: int, candidates: Sequence[int], message: Message) -> int:
        raise NotImplementedError

    @abstractmethod
    def order_arrivals(self, node: int, time: Fraction, messages: Sequence[Message]) -> List[Message]:
        raise NotImplementedError

    def fresh(self) -> 'TiePolicy':
        """
        copy of this policy in its initial state, so that repeated runs make the same choices
        """

        return TiePolicy.from_json(self.to_json())

    def to_json(self) -> Dict[str, Any]:
        return {'kind': self.kind.value}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'TiePolicy':
        if isinstance(data, str):
            data = {'kind': data}
        kind = TiePolicyKind(data.get('kind', TiePolicyKind.LOWEST_ID.value))
        if kind == TiePolicyKind.LOWEST_ID:
            return LowestIdPolicy()
        elif kind == TiePolicyKind.SEEDED_RANDOM:
            return SeededRandomPolicy(int(data.get('seed', 0)))
        else:
            return ScriptedPolicy(
                child_choices={
                    (int(entry['msg']), int(entry['node'])): int(entry['child'])
                    for entry in data.get('child_choices', [])
                },
                arrival_orders={
                    int(entry['node']): [int(message) for message in entry['order']]
                    for entry in data.get('arrival_orders', [])
                },
            )

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}()'


class LowestIdPolicy(TiePolicy):
    kind = TiePolicyKind.LOWEST_ID

    def select_child(self, node: int, candidates: Sequence[int], message: Message) -> int:
        return min(candidates)

    def order_arrivals(self, node: int, time: Fraction, messages: Sequence[Message]) -> List[Message]:
        return sorted(messages, key=lambda message: message.id)


class SeededRandomPolicy(TiePolicy):
    """
    uniformly random choices from a private generator; a fresh instance replays the same choices
    """

    kind = TiePolicyKind.SEEDED_RANDOM

    def __init__(self, seed: int):
        self.seed = seed
        self.__rng = random.Random(seed)

    def select_child(self, node: int, candidates: Sequence[int], message: Message) -> int:
        return self.__rng.choice(sorted(candidates))

    def order_arrivals(self, node: int, time: Fraction, messages: Sequence[Message]) -> List[Message]:
        messages = sorted(messages, key=lambda message: message.id)
        self.__rng.shuffle(messages)
        return messages

    def to_json(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'seed': self.seed}

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.seed})'


class ScriptedPolicy(TiePolicy):
    """
    adversary-chosen ties; anything the script leaves out falls back to ``fallback``
    """

    kind = TiePolicyKind.SCRIPTED

    def __init__(
        self,
        child_choices: Dict[Tuple[int, int], int] = None,
        arrival_orders: Dict[int, List[int]] = None,
        fallback: TiePolicy = None,
    ):
        """
        :param child_choices: map of ``(message id, node)`` to the child the message is sent to
        :param arrival_orders: map of node to the preferred processing order of message ids arriving together
        :param fallback: policy for unscripted choices
        """

        self.child_choices = child_choices if child_choices is not None else {}
        self.arrival_orders = arrival_orders if arrival_orders is not None else {}
        self.fallback = fallback if fallback is not None else LowestIdPolicy()

    def select_child(self, node: int, candidates: Sequence[int], message: Message) -> int:
        choice = self.child_choices.get((message.id, node))
        if choice is not None and choice in candidates:
            return choice
        return self.fallback.select_child(node, candidates, message)

    def order_arrivals(self, node: int, time: Fraction, messages: Sequence[Message]) -> List[Message]:
        messages = self.fallback.order_arrivals(node, time, messages)
        order = self.arrival_orders.get(node)
        if order is None:
            return messages
        rank = {message_id: index for index, message_id in enumerate(order)}
        return sorted(messages, key=lambda message: rank.get(message.id, len(rank)))

    def fresh(self) -> 'ScriptedPolicy':
        return ScriptedPolicy(self.child_choices, self.arrival_orders, self.fallback.fresh())

    def to_json(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'child_choices': [
                {'msg': message, 'node': node, 'child': child}
                for (message, node), child in sorted(self.child_choices.items())
            ],
            'arrival_orders': [
                {'node': node, 'order': order} for node, order in sorted(self.arrival_orders.items())
            ],
        }


def tie_policy(kind: Any, seed: int = 0) -> TiePolicy:
    """
    :param kind: policy kind or its string value
    :param seed: seed for the seeded-random policy
    :return: fresh policy instance
    """

    if isinstance(kind, TiePolicy):
        return kind
    kind = TiePolicyKind(kind.value if isinstance(kind, TiePolicyKind) else kind)
    if kind == TiePolicyKind.SEEDED_RANDOM:
        return SeededRandomPolicy(seed)
    elif kind == TiePolicyKind.SCRIPTED:
        return ScriptedPolicy()
    return LowestIdPolicy()
