from anonpal.cli import run

run()
