# app.py
import typer
from typer.core import TyperGroup
from event_fusion.cli.reconstruct import reconstruct
from event_fusion.cli.simulate import simulate
from event_fusion.cli.calibrate import calibrate
from event_fusion.cli.evaluate import evaluate


class FusionGroup(TyperGroup):
    """Bad or missing option values are validation errors and exit 1, not click's 2."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except typer.BadParameter as e:
            e.exit_code = 1
            raise


app = typer.Typer(cls=FusionGroup, no_args_is_help=True)
app.command("reconstruct")(reconstruct)
app.command("simulate")(simulate)
app.command("calibrate")(calibrate)
app.command("evaluate")(evaluate)

if __name__ == "__main__":
    app()
