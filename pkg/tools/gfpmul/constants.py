from pathlib import Path

PACKAGE_DIR = Path(__file__).resolve().parent
TEMPLATES_DIR = PACKAGE_DIR / 'templates'
DATA_DIR = PACKAGE_DIR / 'data'
DEFAULT_COST_PRIMES = DATA_DIR / 'cost_primes.txt'

OUTPUT_FORMATS = ('text', 'records')
BUDGET_OPTIONS = ('coefficient', 'strict')
DENSITY_LAMBDAS = (2, 3, 4, 5)
DEFAULT_SEED = 0
