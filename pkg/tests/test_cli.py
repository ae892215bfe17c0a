"""CLI tests driven through run(argv), covering every subcommand, the
exit-code contract and output determinism."""

import pytest

from giftsmith.bank import open_bank
from giftsmith.cli import run


@pytest.fixture()
def bank_path(tmp_path):
    return str(tmp_path / "bank.giftsmith")


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInitAndCourses:
    def test_init_creates_bank(self, capsys, bank_path):
        code, out, _ = invoke(capsys, "--bank", bank_path, "init")
        assert code == 0
        assert "initialized" in out
        assert open_bank(bank_path).courses == ()

    def test_init_refuses_existing(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        code, _, err = invoke(capsys, "--bank", bank_path, "init")
        assert code == 2
        assert "exists" in err

    def test_course_add_and_list(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        code, out, _ = invoke(capsys, "--bank", bank_path,
                              "course", "add", "C300", "Chemistry")
        assert code == 0
        code, out, _ = invoke(capsys, "--bank", bank_path, "course", "list")
        assert code == 0
        assert out == "C300  Chemistry\n"

    def test_duplicate_course_is_hard_error(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C300", "Chemistry")
        code, _, err = invoke(capsys, "--bank", bank_path,
                              "course", "add", "C300", "Chemistry")
        assert code == 2
        assert "exists" in err


class TestAdd:
    def setup_bank(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C300", "Chemistry")

    def test_add_choices_via_opt_flags(self, capsys, bank_path):
        self.setup_bank(capsys, bank_path)
        code, out, _ = invoke(
            capsys, "--bank", bank_path, "add", "--course", "C300",
            "--stem", "Water is a compound of two different elements. They are:",
            "--opt", "Nitrogen:wrong", "--opt", "Oxygen:correct",
            "--opt", "Carbon Di-Oxide:wrong", "--opt", "Hydrogen:correct",
            "--feedback", "Oxygen and Hydrogen")
        assert code == 0
        assert "added record 1 (type 3 multiple-response)" in out
        assert "~ Nitrogen" in out and "= Oxygen" in out
        record = open_bank(bank_path).record(1)
        assert record.qtype_code == 3

    def test_add_other_bodies(self, capsys, bank_path):
        self.setup_bank(capsys, bank_path)
        assert invoke(capsys, "--bank", bank_path, "add", "--course", "C300",
                      "--stem", "1+1=2", "--tf", "true", "--title", "Q1")[0] == 0
        assert invoke(capsys, "--bank", bank_path, "add", "--course", "C300",
                      "--stem", "Two plus", "--suffix", "equals four.",
                      "--answer", "two", "--answer", "2")[0] == 0
        assert invoke(capsys, "--bank", bank_path, "add", "--course", "C300",
                      "--stem", "Which animal eats which food?",
                      "--pair", "cat -> cat food", "--pair", "dog -> dog food")[0] == 0
        assert invoke(capsys, "--bank", bank_path, "add", "--course", "C300",
                      "--stem", "What is a number from 1 to 5?",
                      "--numeric", "3:2")[0] == 0
        bank = open_bank(bank_path)
        assert sorted(r.qtype_code for r in bank.records) == [1, 4, 5, 6]

    def test_declared_type_mismatch(self, capsys, bank_path):
        self.setup_bank(capsys, bank_path)
        code, _, err = invoke(capsys, "--bank", bank_path, "add",
                              "--course", "C300", "--stem", "s",
                              "--tf", "true", "--type", "2")
        assert code == 2
        assert "classifies" in err

    def test_invalid_question_exits_one(self, capsys, bank_path):
        self.setup_bank(capsys, bank_path)
        code, _, err = invoke(capsys, "--bank", bank_path, "add",
                              "--course", "C300", "--stem", "pick",
                              "--opt", "a:wrong", "--opt", "b:wrong")
        assert code == 1
        assert "no correct answer" in err
        assert open_bank(bank_path).records == ()

    def test_exactly_one_body_kind(self, capsys, bank_path):
        self.setup_bank(capsys, bank_path)
        code, _, err = invoke(capsys, "--bank", bank_path, "add",
                              "--course", "C300", "--stem", "s",
                              "--tf", "true", "--numeric", "1")
        assert code == 2
        assert "exactly one" in err


class TestImportExportValidate:
    def setup_bank(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C300", "Chemistry")

    def test_validate_section3(self, capsys, bank_path, section3_path):
        code, out, err = invoke(capsys, "validate", str(section3_path))
        assert code == 0
        assert out == "5 questions, 0 errors\n"
        assert err == ""

    def test_validate_reports_errors(self, capsys, tmp_path):
        bad = tmp_path / "bad.gift"
        bad.write_text("fine {T}\n\nbroken {oops\n", encoding="utf-8")
        code, out, err = invoke(capsys, "validate", str(bad))
        assert code == 1
        assert out == "1 questions, 1 errors\n"
        assert "unterminated" in err

    def test_import_section3(self, capsys, bank_path, section3_path):
        self.setup_bank(capsys, bank_path)
        code, out, _ = invoke(capsys, "--bank", bank_path, "import",
                              str(section3_path), "--course", "C300")
        assert code == 0
        assert "imported 5 questions into C300, 0 errors" in out
        assert len(open_bank(bank_path).records) == 5

    def test_import_unknown_course(self, capsys, bank_path, section3_path):
        invoke(capsys, "--bank", bank_path, "init")
        code, _, err = invoke(capsys, "--bank", bank_path, "import",
                              str(section3_path), "--course", "NOPE")
        assert code == 2
        assert "unknown course" in err

    def test_export_stdout_and_file(self, capsys, bank_path, section3_path, tmp_path):
        self.setup_bank(capsys, bank_path)
        invoke(capsys, "--bank", bank_path, "import", str(section3_path),
               "--course", "C300")
        code, out, _ = invoke(capsys, "--bank", bank_path, "export")
        assert code == 0
        assert "// Course ID: C300" in out
        assert "$CATEGORY: C300/Chemistry" in out
        out_file = tmp_path / "dump.gift"
        code, _, _ = invoke(capsys, "--bank", bank_path, "export",
                            "--out", str(out_file))
        assert code == 0
        assert out_file.read_text(encoding="utf-8") == out

    def test_export_unknown_course(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        code, _, err = invoke(capsys, "--bank", bank_path, "export",
                              "--course", "NOPE")
        assert code == 2
        assert "unknown course" in err

    def test_export_type_filter(self, capsys, bank_path, section3_path):
        self.setup_bank(capsys, bank_path)
        invoke(capsys, "--bank", bank_path, "import", str(section3_path),
               "--course", "C300")
        code, out, _ = invoke(capsys, "--bank", bank_path, "export", "--type", "1")
        assert code == 0
        assert "{T}" in out and "cat food" not in out


class TestLookupTableAndStats:
    def test_lookup_table_rows(self, capsys):
        code, out, _ = invoke(capsys, "lookup-table")
        assert code == 0
        lines = out.strip("\n").split("\n")
        assert len(lines) == 16
        assert "FTFT  ~ = ~ =" in lines[5]
        assert "TTTT  = = = =" in lines[15]

    def test_stats(self, capsys, bank_path, section3_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C300", "Chemistry")
        invoke(capsys, "--bank", bank_path, "import", str(section3_path),
               "--course", "C300")
        code, out, _ = invoke(capsys, "--bank", bank_path, "stats")
        assert code == 0
        assert "courses: 1" in out
        assert "records: 5" in out
        assert "type 1 true-false: 1" in out


class TestDeterminismAndEndToEnd:
    def test_repeated_invocations_byte_identical(self, capsys, bank_path,
                                                 section3_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C300", "Chemistry")
        invoke(capsys, "--bank", bank_path, "import", str(section3_path),
               "--course", "C300")
        outputs = {invoke(capsys, "--bank", bank_path, "export")[1] for _ in range(3)}
        assert len(outputs) == 1
        summaries = {invoke(capsys, "validate", str(section3_path))[1]
                     for _ in range(3)}
        assert len(summaries) == 1

    def test_full_workflow_round_trip(self, capsys, tmp_path, section3_path):
        bank_a = str(tmp_path / "a.giftsmith")
        bank_b = str(tmp_path / "b.giftsmith")
        export_a = tmp_path / "a.gift"
        export_b = tmp_path / "b.gift"

        assert invoke(capsys, "--bank", bank_a, "init")[0] == 0
        assert invoke(capsys, "--bank", bank_a, "course", "add",
                      "C300", "Chemistry")[0] == 0
        assert invoke(capsys, "--bank", bank_a, "import", str(section3_path),
                      "--course", "C300")[0] == 0
        code, out, _ = invoke(capsys, "validate", str(section3_path))
        assert code == 0 and "5 questions" in out
        assert invoke(capsys, "--bank", bank_a, "export",
                      "--out", str(export_a))[0] == 0

        assert invoke(capsys, "--bank", bank_b, "init")[0] == 0
        assert invoke(capsys, "--bank", bank_b, "course", "add",
                      "C300", "Chemistry")[0] == 0
        assert invoke(capsys, "--bank", bank_b, "import", str(export_a),
                      "--course", "C300")[0] == 0
        assert invoke(capsys, "--bank", bank_b, "export",
                      "--out", str(export_b))[0] == 0

        assert export_a.read_text(encoding="utf-8") == \
            export_b.read_text(encoding="utf-8")


class TestArgumentErrors:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_missing_bank_file(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "--bank", str(tmp_path / "nope"), "stats")
        assert code == 2

    def test_bad_opt_format(self, capsys, bank_path):
        invoke(capsys, "--bank", bank_path, "init")
        invoke(capsys, "--bank", bank_path, "course", "add", "C1", "S")
        code, _, err = invoke(capsys, "--bank", bank_path, "add", "--course", "C1",
                              "--stem", "s", "--opt", "no flag here")
        assert code == 2
        assert "--opt" in err
