from importlib.resources import files

from .io import parse_dimacs, parse_program

DATA_REGISTRY = {
    "example2": "example2.lp",
    "example3": "example3.lp",
    "stable_demo": "stable_demo.lp",
    "shift_counterexample": "shift_counterexample.lp",
    "one_clause": "one_clause.cnf",
    "all_shapes": "all_shapes.cnf",
}

DATA_LOADER = {
    "example2": parse_program,
    "example3": parse_program,
    "stable_demo": parse_program,
    "shift_counterexample": parse_program,
    "one_clause": parse_dimacs,
    "all_shapes": parse_dimacs,
}


def example_path(name):
    """
    Path of a bundled example file.

    Parameters
    ----------
    name : str
        Key of `DATA_REGISTRY`.

    Returns
    -------
    importlib.resources.abc.Traversable
    """
    if name not in DATA_REGISTRY:
        raise ValueError(
            f"Unknown example {name!r}. Must be one of {sorted(DATA_REGISTRY)}"
        )
    return files("hefcheck") / "data" / DATA_REGISTRY[name]


def load_example(name):
    """
    Load a bundled example: a Program for `.lp` files, a Cnf3 for `.cnf` files.
    """
    return DATA_LOADER[name](example_path(name).read_text(encoding="utf-8"))
