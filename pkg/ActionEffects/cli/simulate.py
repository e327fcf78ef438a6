import logging
from pathlib import Path

from ..dataset import write_table
from ..synthlab import Scenario, generate, get_scenario, true_estimands, write_counterfactuals
from ..utils import to_json

__all__ = ['simulate_command', 'resolve_scenario']

logger = logging.getLogger(__name__)


def resolve_scenario(scenario):
    """
    Returns a Scenario from a scenario file path or a suite scenario name.

    :raises ScenarioError for an unknown suite name or an invalid file.
    :rtype: Scenario
    """
    if isinstance(scenario, Scenario):
        return scenario
    if Path(scenario).is_file():
        return Scenario.from_config(scenario)
    return get_scenario(str(scenario))


def simulate_command(scenario, out_dir):
    """
    Generates a synthetic data set and writes it with its truth files:

        data.csv             observed table (treatment, outcome, covariates)
        counterfactuals.csv  unit_id, Y0, Y1, e_true
        truth.json           {ate, att, atnt}
        schema.ini           schema for loading data.csv
        scenario.ini         the scenario that generated it

    :param scenario: Scenario, scenario file path or suite scenario name.
    :param out_dir: Output directory (created if missing).
    :rtype: dict of pathlib.Path
    """
    scenario = resolve_scenario(scenario)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    table, units = generate(scenario)
    paths = {name: out / filename for name, filename in (
        ('data', 'data.csv'), ('counterfactuals', 'counterfactuals.csv'), ('truth', 'truth.json'),
        ('schema', 'schema.ini'), ('scenario', 'scenario.ini'))}
    write_table(table, paths['data'])
    write_counterfactuals(units, paths['counterfactuals'])
    to_json(paths['truth'], true_estimands(units).as_dict())
    table.schema.to_config(paths['schema'])
    scenario.to_config(paths['scenario'])
    logger.info("Wrote scenario '%s' to %s.", scenario.name, out)
    return paths
