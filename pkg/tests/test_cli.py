"""Command line interface: golden outputs, exit codes, error channel
discipline, and byte-level determinism.

Expected strings are frozen from hand derivations; the underlying
semantics (normal forms, verdicts, orbit counts, ranks) are pinned
independently in the per-module test files, so these tests freeze the
presentation layer on top of already-verified values.
"""

import subprocess
import sys

import pytest

from omegacat.cfpo import alt
from omegacat.cli import main
from omegacat.posets import dump_poset, load_poset

Q1 = "T = spine Q(1)\n"
OMEGA_SPEC = "T = spine 1 with omega x T at orbit 0\n"
DENSE = "T = spine Q(1) with omega x T at orbit 0\n"
VSPEC = "R = spine 1 with 2 x L at orbit 0\nL = spine 1\n"
CHAIN3_SPEC = "T = spine 1^1^1\n"

CHAIN3_POSET = "node 0\nnode 1\nnode 2\nedge 0 1\nedge 1 2\n"
V_POSET = "node a\nnode b\nnode r\nedge r a\nedge r b\n"
DIAMOND_POSET = (
    "node a\nnode b\nnode r\nnode t\n"
    "edge r a\nedge r b\nedge a t\nedge b t\n"
)
BOWTIE_POSET = (
    "node a\nnode b\nnode x\nnode y\n"
    "edge a x\nedge a y\nedge b x\nedge b y\n"
)
DISJOINT_POSET = "node 0\nnode 1\nnode 2\nnode 3\nedge 0 1\nedge 2 3\n"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


# ---------------------------------------------------------------------------
# term subcommands


def test_term_normalize_golden(capsys):
    code, out, err = run(capsys, "term", "normalize", "Q(1,1)")
    assert (code, out, err) == (0, "Q(1)\n", "")


@pytest.mark.parametrize(
    "expr", ["Q(1,1)", "Q(1,Q(1))", "Q(1)^Q(1)", "Q(1)^1^Q(1)"]
)
def test_term_normalize_collapses_to_q1(capsys, expr):
    code, out, _ = run(capsys, "term", "normalize", expr)
    assert code == 0
    assert out == "Q(1)\n"


def test_term_normalize_fixed_point(capsys):
    code, out, _ = run(capsys, "term", "normalize", "a^b")
    assert (code, out) == (0, "a^b\n")


def test_term_normalize_parse_error(capsys):
    code, out, err = run(capsys, "term", "normalize", "Q(")
    assert code == 2
    assert out == ""
    assert err.startswith("error: parse:")
    assert err.count("\n") == 1 and err.endswith("\n")


def test_term_eq_equivalent(capsys):
    code, out, _ = run(capsys, "term", "eq", "Q(1)^Q(1)", "Q(1)")
    assert (code, out) == (0, "equivalent\n")


def test_term_eq_distinct(capsys):
    code, out, _ = run(capsys, "term", "eq", "Q(1)", "Q(a)")
    assert (code, out) == (1, "distinct\n")


def test_term_orbits_golden(capsys):
    code, out, _ = run(capsys, "term", "orbits", "Q(a,b)^1")
    assert code == 0
    assert out == (
        "orbit 0: path=0.0 leaf=a\n"
        "orbit 1: path=0.1 leaf=b\n"
        "orbit 2: path=1 leaf=1\n"
    )


def test_term_orbits_singleton(capsys):
    code, out, _ = run(capsys, "term", "orbits", "1")
    assert (code, out) == (0, "orbit 0: path=() leaf=1\n")


def test_term_sample_is_a_coloured_chain(capsys):
    code, out, err = run(
        capsys, "term", "sample", "Q(a,b)", "--size", "6", "--seed", "1"
    )
    assert code == 0 and err == ""
    p = load_poset(out)
    assert len(p) == 6
    for x in p.elements:
        for y in p.elements:
            assert p.comparable(x, y)
    colours = {p.label(x)[0] for x in p.elements}
    assert colours == {"a", "b"}


def test_term_sample_deterministic(capsys):
    a = run(capsys, "term", "sample", "Q(a,b)", "--size", "6", "--seed", "1")
    b = run(capsys, "term", "sample", "Q(a,b)", "--size", "6", "--seed", "1")
    assert a == b
    assert a[1].encode() == b[1].encode()


def test_term_sample_budget_error(capsys):
    code, out, err = run(capsys, "term", "sample", "1^1", "--size", "1")
    assert code == 3
    assert out == ""
    assert err.startswith("error: budget:")
    assert err.count("\n") == 1


def test_term_sample_dot_format(capsys):
    code, out, _ = run(
        capsys, "term", "sample", "1^1", "--size", "2", "--format", "dot"
    )
    assert code == 0
    assert out.startswith("digraph")
    assert "->" in out


# ---------------------------------------------------------------------------
# tree subcommands


def test_tree_check_dense_golden(capsys, files):
    f = files("dense.spec", DENSE)
    code, out, err = run(capsys, "tree", "check", f)
    assert code == 0 and err == ""
    assert out == (
        "categorical: yes\n"
        "condition finite-ramification: pass\n"
        "condition chains-categorical: pass\n"
        "condition finite-chain-family: pass\n"
    )


def test_tree_check_omega_golden(capsys, files):
    f = files("omega.spec", OMEGA_SPEC)
    code, out, err = run(capsys, "tree", "check", f)
    assert code == 1 and err == ""
    assert out == (
        "categorical: no — chain [] * [1] w is not a term\n"
        "condition finite-ramification: fail witness [] * [1] w\n"
        "condition chains-categorical: fail witness [] * [1] w\n"
        "condition finite-chain-family: pass\n"
    )


def test_tree_check_single_q_yes(capsys, files):
    f = files("q1.spec", Q1)
    code, out, _ = run(capsys, "tree", "check", f)
    assert code == 0
    assert out.startswith("categorical: yes\n")


def test_tree_check_missing_file(capsys, tmp_path):
    code, out, err = run(capsys, "tree", "check", str(tmp_path / "nope.spec"))
    assert code == 2
    assert out == ""
    assert err.startswith("error: io:")
    assert err.count("\n") == 1


def test_tree_check_dangling_child_is_spec_error(capsys, files):
    f = files("bad.spec", "T = spine 1 with 2 x U at orbit 0\n")
    code, out, err = run(capsys, "tree", "check", f)
    assert code == 2
    assert out == ""
    assert err.startswith("error: spec:")


def test_tree_chains_golden(capsys, files):
    f = files("q1.spec", Q1)
    code, out, _ = run(capsys, "tree", "chains", f)
    assert (code, out) == (0, "[Q(1)]\n")


def test_tree_chains_v(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, _ = run(capsys, "tree", "chains", f)
    assert (code, out) == (0, "[1^1]\n")


def test_tree_table_v_golden(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, _ = run(capsys, "tree", "table", f)
    assert code == 0
    assert out == (
        "cap: 3\n"
        "type 0: [1^1]\n"
        "cell type=0 pos=0 count=2\n"
        "cell type=0 pos=1 count=1\n"
    )


def test_tree_table_dense_reports_omega(capsys, files):
    f = files("dense.spec", DENSE)
    code, out, _ = run(capsys, "tree", "table", f)
    assert code == 0
    assert "cell type=0 pos=0 count=omega\n" in out


def test_tree_table_omega_reports_unbounded(capsys, files):
    f = files("omega.spec", OMEGA_SPEC)
    code, out, _ = run(capsys, "tree", "table", f)
    assert code == 0
    assert "unbounded type=0\n" in out


def test_tree_sample_v_golden(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, err = run(
        capsys, "tree", "sample", f, "--depth", "1", "--width", "2"
    )
    assert code == 0 and err == ""
    assert out == "node 0\nnode 1\nnode 2\nedge 0 1\nedge 0 2\n"


def test_tree_sample_deterministic(capsys, files):
    f = files("dense.spec", DENSE)
    argv = ("tree", "sample", f, "--depth", "2", "--width", "2", "--seed", "5")
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and a[0] == 0
    assert a[1].encode() == b[1].encode()


def test_tree_sample_dot_format(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, _ = run(
        capsys, "tree", "sample", f, "--depth", "1", "--width", "2",
        "--format", "dot",
    )
    assert code == 0
    assert out.startswith("digraph")


def test_tree_sample_depth_budget(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, err = run(capsys, "tree", "sample", f, "--depth", "0")
    assert code == 3
    assert err.startswith("error: budget:")


def test_tree_orbit2_v_golden(capsys, files):
    f = files("v.spec", VSPEC)
    code, out, err = run(
        capsys, "tree", "orbit2", f, "0", "1", "0", "2",
        "--depth", "1", "--width", "2",
    )
    assert code == 0 and err == ""
    assert out == "equivalent\nbase 0 -> 0\nbase 1 -> 2\nodd 2 -> 1\n"


def test_tree_orbit2_rigid_chain_inequivalent(capsys, files):
    f = files("chain3.spec", CHAIN3_SPEC)
    code, out, _ = run(capsys, "tree", "orbit2", f, "0", "1", "0", "2")
    assert (code, out) == (1, "inequivalent\n")


def test_tree_orbit2_identity(capsys, files):
    f = files("chain3.spec", CHAIN3_SPEC)
    code, out, _ = run(capsys, "tree", "orbit2", f, "1", "2", "1", "2")
    assert code == 0
    assert out.splitlines()[0] == "equivalent"


# ---------------------------------------------------------------------------
# poset subcommands


def test_poset_validate_tree_ok(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "poset", "validate", "--tree", f)
    assert (code, out) == (0, "ok\n")


def test_poset_validate_tree_rejects_diamond(capsys, files):
    f = files("diamond.poset", DIAMOND_POSET)
    code, out, _ = run(capsys, "poset", "validate", "--tree", f)
    assert code == 1
    assert out.startswith("not a tree:")


def test_poset_validate_cfpo_rejects_diamond(capsys, files):
    f = files("diamond.poset", DIAMOND_POSET)
    code, out, _ = run(capsys, "poset", "validate", "--cfpo", f)
    assert (code, out) == (1, "not cycle-free: pair a b\n")


def test_poset_validate_cfpo_ok(capsys, files):
    f = files("v.poset", V_POSET)
    code, out, _ = run(capsys, "poset", "validate", "--cfpo", f)
    assert (code, out) == (0, "ok\n")


def test_poset_validate_requires_mode(capsys, files):
    f = files("v.poset", V_POSET)
    code, out, err = run(capsys, "poset", "validate", f)
    assert code == 2
    assert err.startswith("error: usage:")


def test_poset_orbits_chain_golden(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "poset", "orbits", f, "-n", "1")
    assert code == 0
    assert out == "3 orbits\norbit 0: 0\norbit 1: 1\norbit 2: 2\n"


def test_poset_orbits_pairs_on_rigid_chain(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "poset", "orbits", f, "-n", "2")
    assert code == 0
    assert out.splitlines()[0] == "9 orbits"


def test_poset_orbits_budget(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, err = run(
        capsys, "poset", "orbits", f, "-n", "1", "--budget-nodes", "2"
    )
    assert code == 3
    assert err.startswith("error: budget:")


def test_poset_auts_chain_golden(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "poset", "auts", f)
    assert (code, out) == (0, "1 automorphisms\n0->0 1->1 2->2\n")


def test_poset_auts_v_golden(capsys, files):
    f = files("v.poset", V_POSET)
    code, out, _ = run(capsys, "poset", "auts", f)
    assert code == 0
    assert out == "2 automorphisms\na->a b->b r->r\na->b b->a r->r\n"


# ---------------------------------------------------------------------------
# cfpo subcommands


def test_cfpo_alt_rank_golden(capsys, files):
    f = files("alt6.poset", dump_poset(alt(6)))
    code, out, _ = run(capsys, "cfpo", "alt-rank", f)
    assert (code, out) == (0, "6\n")


def test_cfpo_alt_rank_chain(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "cfpo", "alt-rank", f)
    assert (code, out) == (0, "2\n")


def test_cfpo_path_diamond_ambiguous(capsys, files):
    f = files("diamond.poset", DIAMOND_POSET)
    code, out, _ = run(capsys, "cfpo", "path", f, "r", "t")
    assert (code, out) == (1, "ambiguous (not a CFPO)\n")


def test_cfpo_path_v_golden(capsys, files):
    f = files("v.poset", V_POSET)
    code, out, _ = run(capsys, "cfpo", "path", f, "a", "b")
    assert (code, out) == (0, "a b r\n")


def test_cfpo_path_chain(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, _ = run(capsys, "cfpo", "path", f, "0", "2")
    assert (code, out) == (0, "0 1 2\n")


def test_cfpo_path_disconnected(capsys, files):
    f = files("disjoint.poset", DISJOINT_POSET)
    code, out, _ = run(capsys, "cfpo", "path", f, "0", "2")
    assert (code, out) == (1, "no path\n")


def test_cfpo_path_through_completion_point(capsys, files):
    f = files("bowtie.poset", BOWTIE_POSET)
    code, out, _ = run(capsys, "cfpo", "path", f, "a", "x")
    assert (code, out) == (0, "a i0 x\n")


def test_cfpo_path_unknown_node(capsys, files):
    f = files("chain3.poset", CHAIN3_POSET)
    code, out, err = run(capsys, "cfpo", "path", f, "0", "zz")
    assert code == 2
    assert err.startswith("error: value:")


# ---------------------------------------------------------------------------
# usage and process-level behaviour


def test_no_arguments_is_usage_error(capsys):
    code, out, err = run(capsys)
    assert code == 2
    assert err.startswith("error: usage:")
    assert err.count("\n") == 1


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, err = run(capsys, "term", "bogus")
    assert code == 2
    assert err.startswith("error: usage:")


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "usage" in out.lower()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "omegacat.cli", "term", "normalize", "Q(1,1)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "Q(1)\n"
    assert proc.stderr == ""
