from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest


def run_command(
    args: list[str],
    repo_root: Path,
    env: dict[str, str],
    input_text: str | None = None,
    timeout: float = 30.0,
) -> subprocess.CompletedProcess:
    try:
        return subprocess.run(
            args,
            capture_output=True,
            input=input_text,
            text=True,
            cwd=repo_root,
            env=env,
            check=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        stdout = exc.stdout or ""
        stderr = exc.stderr or ""
        pytest.fail(
            "Command timed out after "
            f"{timeout} seconds: {' '.join(map(str, args))}\n"
            f"stdout:\n{stdout}\n"
            f"stderr:\n{stderr}"
        )


def shim_env(repo_root: Path) -> dict[str, str]:
    env = os.environ.copy()
    env["PYTHONPATH"] = str(repo_root / "src")
    return env


@pytest.mark.slow
def test_cli_shim_simulates_and_checks(tmp_path):
    repo_root = Path(__file__).resolve().parents[1]
    env = shim_env(repo_root)
    shim = str(repo_root / "tools" / "cli_shims" / "ipt_cli.py")
    tree = tmp_path / "tree.json"

    run_command(
        [sys.executable, shim, "simulate", "--model", "fat_cantor", "--steps", "5", "--out", str(tree)],
        repo_root,
        env,
    )
    result = run_command([sys.executable, shim, "check", str(tree)], repo_root, env)

    assert json.loads(result.stdout)["ok"] is True
    assert "IP tree: yes" in result.stderr


@pytest.mark.slow
def test_cli_shim_reports_failures_through_exit_codes(tmp_path):
    repo_root = Path(__file__).resolve().parents[1]
    env = shim_env(repo_root)
    shim = str(repo_root / "tools" / "cli_shims" / "ipt_cli.py")
    with pytest.raises(subprocess.CalledProcessError) as excinfo:
        run_command([sys.executable, shim, "check", str(tmp_path / "nope.json")], repo_root, env)
    assert excinfo.value.returncode == 3


@pytest.mark.slow
def test_fuzz_cli_shim_runs():
    repo_root = Path(__file__).resolve().parents[1]
    result = run_command(
        [sys.executable, str(repo_root / "tools" / "cli_shims" / "ipt_fuzz.py"), "--rounds", "1", "--steps", "8"],
        repo_root,
        shim_env(repo_root),
        timeout=120.0,
    )

    assert "[OK]" in result.stdout
    assert "[FAIL]" not in result.stdout
