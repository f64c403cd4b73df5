from bfflab.cli import main
from bfflab.fixture_access import fixture_path

AP = str(fixture_path("ap.otm"))
F35 = str(fixture_path("f35.orc"))


def invoke(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_smash_fixture(capsys):
    code, out, err = invoke(
        capsys, "eval", str(fixture_path("smash.bff")), "--args", "2", "3"
    )
    assert (code, out, err) == (0, "16\n", "")


def test_eval_length_fixture_with_report(capsys):
    code, out, _ = invoke(
        capsys, "eval", str(fixture_path("length.bff")), "--args", "13", "--report"
    )
    assert code == 0
    assert "value\t4" in out


def test_eval_rank_mismatch_is_domain_error(capsys):
    code, out, err = invoke(
        capsys, "eval", str(fixture_path("smash.bff")), "--args", "2"
    )
    assert code == 1
    assert out == ""
    assert "rank" in err


def test_sop_depth_fixture(capsys):
    code, out, err = invoke(capsys, "sop", "depth", str(fixture_path("norm_depth1.sop")))
    assert (code, out, err) == (0, "1\n", "")


def test_sop_witness_len_fixture(capsys):
    code, out, _ = invoke(capsys, "sop", "witness", str(fixture_path("len_x0.sop")))
    assert code == 0
    assert out == "(comp monus (comp smash 1 (x 0)) 1)\n"


def test_sop_witness_const0_fixture(capsys):
    code, out, _ = invoke(capsys, "sop", "witness", str(fixture_path("const0.sop")))
    assert (code, out) == (0, "0\n")


def test_sop_witness_check_reports_agreement(capsys):
    code, out, _ = invoke(
        capsys,
        "sop",
        "witness-check",
        str(fixture_path("norm_depth1.sop")),
        "--oracle",
        str(fixture_path("identity8.orc")),
        "--args",
        "5",
        "--u-max",
        "255",
    )
    assert code == 0
    assert "disagreements\t0" in out


def test_bound_infer_and_check(capsys, tmp_path):
    code, out, _ = invoke(capsys, "bound", "infer", str(fixture_path("smash.bff")))
    assert code == 0
    assert out.strip() == "(+ (* (lx 0) (lx 1)) (c 1))"
    sopfile = tmp_path / "b.sop"
    sopfile.write_text(out)
    code, out, _ = invoke(
        capsys, "bound", "check", str(fixture_path("smash.bff")), str(sopfile),
        "--samples", "50",
    )
    assert code == 0
    assert "violations\t0" in out


def test_bound_check_flags_bad_bound(capsys, tmp_path):
    sopfile = tmp_path / "tiny.sop"
    sopfile.write_text("(c 1)\n")
    code, out, _ = invoke(
        capsys, "bound", "check", str(fixture_path("smash.bff")), str(sopfile),
        "--samples", "20",
    )
    assert code == 1
    assert "violations\t0" not in out


def test_scheme_mlrn_run(capsys):
    code, out, _ = invoke(
        capsys, "scheme", "mlrn-run", str(fixture_path("length_power.mlrn")),
        "--u", "13",
    )
    assert code == 0
    assert "f1\t4" in out and "f2\t16" in out


def test_scheme_pbrn_run(capsys):
    code, out, _ = invoke(
        capsys, "scheme", "pbrn-run", str(fixture_path("length.pbrn")),
        "--y", "13", "--oracle", F35,
    )
    assert (code, out) == (0, "4\n")


def test_scheme_pbrpl_run(capsys):
    code, out, _ = invoke(
        capsys, "scheme", "pbrpl-run", str(fixture_path("chain.pbrpl")),
        "--oracle", str(fixture_path("chain.orc")), "--args", "5",
    )
    assert code == 0
    assert "value\t1" in out
    assert "abort\tclock" in out


def test_scheme_pbrpl_validate(capsys):
    code, out, _ = invoke(
        capsys, "scheme", "pbrpl-validate", str(fixture_path("chain.pbrpl")),
        "--oracle", str(fixture_path("chain.orc")), "--args", "5",
    )
    assert code == 0
    assert "stabilization_violations\t0" in out


def test_otm_run_ap(capsys):
    code, out, _ = invoke(
        capsys, "otm", "run", AP, "--oracle", F35, "--input", "3", "--cost", "unit"
    )
    assert code == 0
    assert "output\t5" in out
    assert "cost\t7" in out
    assert "t_len\t9" in out


def test_otm_run_len_cost_selector(capsys):
    code, out, _ = invoke(
        capsys, "otm", "run", AP, "--oracle", F35, "--input", "3", "--cost", "len"
    )
    assert code == 0
    assert "cost\t9" in out


def test_otm_run_missing_file_is_usage_error(capsys):
    code, out, err = invoke(capsys, "otm", "run", "missing.otm", "--input", "3")
    assert code == 2
    assert out == ""
    assert "missing.otm" in err


def test_otm_check_fixture_bound(capsys):
    code, out, _ = invoke(
        capsys, "otm", "check", AP, "--bound", str(fixture_path("ap_bound.sop")),
        "--samples", "40",
    )
    assert code == 0
    assert "time_violations\t0" in out


def test_otm_check_const_bound_fails(capsys):
    code, out, _ = invoke(
        capsys, "otm", "check", AP, "--bound", str(fixture_path("one.sop")),
        "--samples", "10",
    )
    assert code == 1


def test_unknown_flag_is_usage_error(capsys):
    code, out, err = invoke(capsys, "eval", "--bogus")
    assert code == 2
    assert out == ""


def test_byte_identical_reports(capsys):
    args = (
        "otm", "check", AP, "--bound", str(fixture_path("ap_bound.sop")),
        "--samples", "25",
    )
    _, first, _ = invoke(capsys, *args)
    _, second, _ = invoke(capsys, *args)
    assert first == second


def test_plot_dir_writes_figure(capsys, tmp_path):
    code, out, _ = invoke(
        capsys, "otm", "check", AP, "--bound", str(fixture_path("ap_bound.sop")),
        "--samples", "10", "--plot-dir", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "otm_check.png").exists()
    assert "figure\t" in out


def test_norm_cap_env_override(capsys, monkeypatch, tmp_path):
    # a cap of zero forces the sampled bound evaluation to skip everything
    monkeypatch.setenv("BFFLAB_NORM_CAP", "0")
    term = tmp_path / "t.bff"
    term.write_text("(ap 0 (x 0))\n")
    bound = tmp_path / "b.sop"
    bound.write_text("(nf 0 (lx 0))\n")
    code, out, _ = invoke(
        capsys, "bound", "check", str(term), str(bound), "--samples", "5"
    )
    assert code == 0
    assert "skipped_norm_cap\t5" in out

    monkeypatch.setenv("BFFLAB_NORM_CAP", "64")
    code, out, _ = invoke(
        capsys, "bound", "check", str(term), str(bound), "--samples", "5"
    )
    assert code == 0
    assert "skipped_norm_cap\t0" in out


def test_selftest_single_fast_criterion(capsys):
    code, out, _ = invoke(capsys, "selftest", "--only", "2")
    assert code == 0
    assert "PASS criterion 2" in out


def test_eval_spec_invocation_with_oracle_present(capsys):
    # extra oracle arguments are fine: first-order pieces adapt to any
    # function arity
    code, out, err = invoke(
        capsys, "eval", str(fixture_path("smash.bff")), "--oracle", F35,
        "--args", "2", "3",
    )
    assert (code, out, err) == (0, "16\n", "")


def test_sop_regularize_cli(capsys, tmp_path):
    sopfile = tmp_path / "p.sop"
    sopfile.write_text("(+ (nf 0 (lx 0)) (nf 0 (lx 1)))\n")
    code, out, _ = invoke(capsys, "sop", "regularize", str(sopfile))
    assert code == 0
    assert out.strip() == "(+ (nf 0 (+ (lx 0) (lx 1))) (nf 0 (+ (lx 0) (lx 1))))"


def test_witness_check_with_external_sabotaged_terms(capsys, tmp_path):
    termsfile = tmp_path / "w.terms"
    termsfile.write_text("(comp monus (comp smash 1 (x 0)) 1)\n0\n")
    code, out, _ = invoke(
        capsys,
        "sop",
        "witness-check",
        str(fixture_path("norm_depth1.sop")),
        "--terms",
        str(termsfile),
        "--oracle",
        str(fixture_path("identity8.orc")),
        "--args",
        "1",
        "--u-max",
        "3",
    )
    assert code == 1
    assert "disagreement\tu=1" in out


def test_negative_argument_rejected(capsys):
    code, out, err = invoke(
        capsys, "eval", str(fixture_path("smash.bff")), "--args", "-2", "3"
    )
    assert code == 2
    assert "natural" in err


def test_bare_builtin_atoms_evaluate_from_files(capsys, tmp_path):
    cases = [("msp", ["13", "2"], "3"), ("msp", ["13", "0"], "0"),
             ("msp", ["13", "7"], "13"), ("len", ["0"], "0")]
    for name, argv, expect in cases:
        termfile = tmp_path / f"{name}.bff"
        termfile.write_text(name + "\n")
        code, out, _ = invoke(capsys, "eval", str(termfile), "--args", *argv)
        assert (code, out) == (0, expect + "\n")


def test_pbrpl_validate_missing_args_is_usage_error(capsys):
    code, out, err = invoke(
        capsys, "scheme", "pbrpl-validate", str(fixture_path("chain.pbrpl")),
        "--oracle", str(fixture_path("chain.orc")),
    )
    assert code == 2
    assert out == ""


def test_sop_witness_rejects_irregular_input(capsys, tmp_path):
    sopfile = tmp_path / "irr.sop"
    sopfile.write_text("(+ (nf 0 (lx 0)) (nf 0 (lx 1)))\n")
    code, out, err = invoke(capsys, "sop", "witness", str(sopfile))
    assert code == 1
    assert "NotRegular" in err
