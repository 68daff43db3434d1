import inspect
import json
import logging
from os import PathLike
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from typepigeon import convert_value

from ..analysis.checks import CheckMode
from ..network.graph import GraphModel, normalize_weights, WeightedGraph
from ..network.hst import build_explicit_hst, Hst
from ..protocol.policy import TiePolicyKind
from ..utilities import fraction_to_json, parse_fraction

LOGGER = logging.getLogger(__name__)

EXPERIMENT_LATENCIES = ['synchronous', 'random-fraction', 'adversarial']


def parse_check_mode(value: Any) -> Tuple[CheckMode, int]:
    """
    parse ``off``, ``inline``, ``sampled`` or ``sampled:N``

    :return: check mode and sampling interval
    """

    if isinstance(value, CheckMode):
        return value, 64
    value = str(value).strip().lower()
    interval = 64
    if value.startswith(f'{CheckMode.SAMPLED.value}:'):
        value, interval = value.split(':', 1)
        try:
            interval = convert_value(interval, int)
        except ValueError:
            raise ValueError(f'sampling interval "{interval}" is not an integer')
        if interval < 1:
            raise ValueError(f'sampling interval must be positive, not {interval}')
    try:
        return CheckMode(value), interval
    except ValueError:
        raise ValueError(f'"{value}" not in {[mode.value for mode in CheckMode]}')


def _load_json(filename: Path) -> Any:
    if not filename.exists():
        raise FileNotFoundError(f'referenced file "{filename}" does not exist')
    with open(filename) as input_file:
        return json.load(input_file)


class ExperimentConfig:
    """
    description of a sweep of repetitions over one network; every random choice derives from ``seed``
    """

    def __init__(
        self,
        graph: Union[WeightedGraph, Dict[str, Any]] = None,
        hst: Union[Hst, Dict[str, Any]] = None,
        alpha: Any = 2,
        servers: Union[int, List[int]] = 1,
        requests: int = 1,
        placement: Union[str, List[int]] = 'uniform',
        latency: Union[str, Dict[str, Any]] = 'synchronous',
        tie_policy: str = 'lowest-id',
        repetitions: int = 1,
        seed: int = 0,
        one_shot: bool = True,
        horizon: Any = 1,
        bruteforce_limit: int = 12,
        check_mode: Any = 'off',
        output: PathLike = None,
    ):
        """
        :param graph: network graph, or a generator spec ``{"n", "model", "max_weight", "probability"}``
        :param hst: overlay tree, or an explicit spec ``{"alpha", "depth", "branching"}``; exclusive with ``graph``
        :param alpha: level ratio of the embedding
        :param servers: number of servers placed on random leaves, or explicit server locations
        :param requests: number of requests per repetition
        :param placement: ``uniform`` over leaves, or explicit request locations
        :param latency: ``synchronous``, ``random-fraction`` or ``adversarial``, optionally as ``{"kind", "denominator", "bimodal"}``
        :param tie_policy: ``lowest-id`` or ``seeded-random``
        :param repetitions: number of repetitions
        :param seed: base seed
        :param one_shot: invoke every request at time 0; otherwise draw times from ``[0, horizon]``
        :param horizon: latest invocation time of requests invoked over time
        :param bruteforce_limit: largest request count solved exactly by exhaustive search
        :param check_mode: ``off``, ``inline``, ``sampled`` or ``sampled:N``
        :param output: output directory
        """

        if (graph is None) == (hst is None):
            raise ValueError('exactly one of "graph" and "hst" must be given')

        if isinstance(graph, dict) and 'n' in graph:
            graph = {
                'n': convert_value(graph['n'], int),
                'model': GraphModel(graph.get('model', GraphModel.COMPLETE_UNIFORM.value)).value,
                'max_weight': convert_value(graph.get('max_weight', 1), int),
                'probability': convert_value(graph['probability'], float)
                if graph.get('probability') is not None
                else None,
            }
        elif isinstance(graph, dict):
            graph = normalize_weights(WeightedGraph.from_json(graph))
        self.graph = graph

        if isinstance(hst, dict) and 'depth' in hst and 'branching' in hst:
            hst = build_explicit_hst(
                parse_fraction(hst.get('alpha', alpha)),
                convert_value(hst['depth'], int),
                convert_value(hst['branching'], [int]),
            )
        elif isinstance(hst, dict):
            hst = Hst.from_json(hst)
        self.hst = hst

        self.alpha = parse_fraction(alpha)
        self.servers = convert_value(servers, [int] if isinstance(servers, (list, tuple)) else int)
        self.placement = (
            convert_value(placement, [int]) if isinstance(placement, (list, tuple)) else str(placement)
        )
        if isinstance(self.placement, str) and self.placement != 'uniform':
            raise ValueError(f'placement "{self.placement}" must be "uniform" or a list of locations')
        self.requests = (
            len(self.placement) if isinstance(self.placement, list) else convert_value(requests, int)
        )

        if isinstance(latency, str):
            latency = {'kind': latency}
        if latency.get('kind') not in EXPERIMENT_LATENCIES:
            raise ValueError(f'"{latency.get("kind")}" not in {EXPERIMENT_LATENCIES}')
        self.latency = {
            'kind': latency['kind'],
            'denominator': convert_value(latency.get('denominator', 16), int),
            'bimodal': convert_value(latency.get('bimodal', False), bool),
        }

        self.tie_policy = TiePolicyKind(tie_policy)
        if self.tie_policy == TiePolicyKind.SCRIPTED:
            raise ValueError('experiments draw tie policies; scripted policies belong to scenario files')

        self.repetitions = convert_value(repetitions, int)
        self.seed = convert_value(seed, int)
        self.one_shot = convert_value(one_shot, bool)
        self.horizon = parse_fraction(horizon)
        self.bruteforce_limit = convert_value(bruteforce_limit, int)
        self.check_mode, self.sample_every = parse_check_mode(check_mode)
        self.output = convert_value(output, Path) if output is not None else None

        if self.repetitions < 1:
            raise ValueError(f'repetitions must be positive, not {self.repetitions}')
        if self.requests < 0:
            raise ValueError(f'request count must not be negative, not {self.requests}')
        if isinstance(self.servers, int) and self.servers < 1:
            raise ValueError(f'at least one server is required, not {self.servers}')
        if self.horizon < 0:
            raise ValueError(f'horizon must not be negative, not {self.horizon}')

    @classmethod
    def from_json(cls, data: Dict[str, Any], base_directory: PathLike = None) -> 'ExperimentConfig':
        """
        read a configuration; paths are resolved against ``base_directory``
        """

        base_directory = Path(base_directory) if base_directory is not None else Path.cwd()
        data = dict(data)
        for key in ('graph', 'hst'):
            if isinstance(data.get(key), str):
                data[key] = _load_json(base_directory / data[key])
        if data.get('output') is not None:
            data['output'] = base_directory / data['output']
        unknown = set(data) - set(inspect.signature(cls).parameters)
        if len(unknown) > 0:
            raise KeyError(f'"{sorted(unknown)}" not in experiment configuration keys')
        return cls(**data)

    @classmethod
    def from_file(cls, filename: PathLike) -> 'ExperimentConfig':
        filename = Path(filename)
        LOGGER.debug(f'reading experiment configuration "{filename}"')
        return cls.from_json(_load_json(filename), filename.parent)

    def to_json(self) -> Dict[str, Any]:
        if isinstance(self.graph, WeightedGraph):
            graph = self.graph.to_json()
        else:
            graph = self.graph
        return {
            'graph': graph,
            'hst': self.hst.to_json() if self.hst is not None else None,
            'alpha': fraction_to_json(self.alpha),
            'servers': self.servers,
            'requests': self.requests,
            'placement': self.placement,
            'latency': self.latency,
            'tie_policy': self.tie_policy.value,
            'repetitions': self.repetitions,
            'seed': self.seed,
            'one_shot': self.one_shot,
            'horizon': fraction_to_json(self.horizon),
            'bruteforce_limit': self.bruteforce_limit,
            'check_mode': self.check_mode.value
            if self.check_mode != CheckMode.SAMPLED
            else f'{self.check_mode.value}:{self.sample_every}',
            'output': str(self.output) if self.output is not None else None,
        }

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(**{self.to_json()!r})'
