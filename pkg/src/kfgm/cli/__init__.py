from .config import Scenario, load_scenario
from .report import InvariantReport, ReportRow
