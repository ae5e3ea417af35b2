import json

import pytest

from orthotoric import cli


@pytest.fixture(scope="session")
def report_all_run(tmp_path_factory):
    """One shared battery run over the bundled corpus.

    Returns (exit_code, parsed_report, recorded_ops). Session-scoped because
    the battery solves every bundled problem and takes ~15 s.
    """
    out = tmp_path_factory.mktemp("battery") / "report.json"
    cfg = cli.RunConfig(
        command="report-all",
        output_path=str(out),
        tolerances=dict(cli.DEFAULT_TOLERANCES),
        no_timestamp=True,
    )
    code = cli.run(cfg)
    report = json.loads(out.read_text())
    return code, report, set(cli.RECORDED_OPS)
