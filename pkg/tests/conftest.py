import pytest

from iietlab.partition import default_config
from iietlab.subst import load_system, parse_substitution

RULES = {
    "pd": "A -> AB\nB -> AA\n",
    "fib": "A -> AB\nB -> A\n",
    "tm": "A -> AB\nB -> BA\n",
    "trib": "A -> AB\nB -> AC\nC -> A\n",
    "chacon": "0 -> 0010\n1 -> 1\n",
    "rs": "A -> AB\nB -> AC\nC -> DB\nD -> DC\n",
}

# the five rules used by the exhaustive and approximant suites
FIVE = ("pd", "fib", "tm", "trib", "chacon")


def rule_of(name):
    return parse_substitution(RULES[name])


def system_of(name):
    return load_system(rule_of(name), assume_minimal=(name == "chacon"))


def config_of(name, **kw):
    s = system_of(name)
    return default_config(s.rule, s.perron, **kw)


@pytest.fixture
def pd():
    return config_of("pd")


@pytest.fixture(params=FIVE)
def any_config(request):
    return config_of(request.param)


@pytest.fixture
def rule_file(tmp_path):
    def make(name_or_text, filename="rule.txt"):
        text = RULES.get(name_or_text, name_or_text)
        path = tmp_path / filename
        path.write_text(text)
        return str(path)

    return make
