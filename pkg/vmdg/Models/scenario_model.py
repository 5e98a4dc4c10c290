from typing import Callable, Dict, Optional, Sequence, Tuple


class Scenario:
    """Initial data, optional exact solution and manufactured sources of one verification case.

    Callables are vectorized: ``f0(x, *v)``, ``exact_f(t, x, *v)``,
    ``source_f(t, x, *v)``, and per component ``em0[name](x)``,
    ``exact_em[name](t, x)``, ``source_em[name](t, x)``.
    """

    def __init__(self, name: str, d_v: int, active: Sequence[str],
                 x_domain: Tuple[float, float], v_domain: Sequence[Tuple[float, float]],
                 f0: Callable, em0: Dict[str, Callable] = None,
                 exact_f: Optional[Callable] = None, exact_em: Dict[str, Callable] = None,
                 source_f: Optional[Callable] = None, source_em: Dict[str, Callable] = None,
                 mapping: str = "classical", evolve_kinetic: bool = True,
                 evolve_fields: bool = True, n_x: int = 8, n_v: Sequence[int] = (8,),
                 t_final: float = 1.0, description: str = "", params: dict = None):
        self.name = name
        self.d_v = d_v
        self.active = tuple(active)
        self.x_domain = tuple(x_domain)
        self.v_domain = [tuple(v) for v in v_domain]
        self.f0 = f0
        self.em0 = dict(em0 or {})
        self.exact_f = exact_f
        self.exact_em = dict(exact_em or {})
        self.source_f = source_f
        self.source_em = dict(source_em or {})
        self.mapping = mapping
        self.evolve_kinetic = evolve_kinetic
        self.evolve_fields = evolve_fields
        self.n_x = n_x
        self.n_v = list(n_v)
        self.t_final = t_final
        self.description = description
        self.params = dict(params or {})

    def __repr__(self):
        return (f"Scenario(name={self.name!r}, d_v={self.d_v}, active={list(self.active)}, "
                f"mapping={self.mapping}, exact={self.has_exact_solution})")

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_f is not None or bool(self.exact_em)

    @property
    def has_sources(self) -> bool:
        return self.source_f is not None or bool(self.source_em)

    def exact_distribution(self, t: float) -> Optional[Callable]:
        if self.exact_f is None:
            return None
        return lambda x, *v: self.exact_f(t, x, *v)

    def exact_component(self, name: str, t: float) -> Optional[Callable]:
        func = self.exact_em.get(name)
        if func is None:
            return None
        return lambda x: func(t, x)

    def to_dict(self):
        return {
            "name": self.name,
            "d_x": 1,
            "d_v": self.d_v,
            "active": list(self.active),
            "x_domain": list(self.x_domain),
            "v_domain": [list(v) for v in self.v_domain],
            "mapping": self.mapping,
            "evolve_kinetic": self.evolve_kinetic,
            "evolve_fields": self.evolve_fields,
            "exact_solution": self.has_exact_solution,
            "sources": self.has_sources,
            "n_x": self.n_x,
            "n_v": list(self.n_v),
            "t_final": self.t_final,
            "params": dict(self.params),
        }
