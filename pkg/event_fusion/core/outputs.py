# core/outputs.py
from rich.console import Console
from rich.table import Table


def print_table(df, title=None, float_format="{:.6g}"):
    """Render a DataFrame as a rich table on standard error."""
    console = Console(stderr=True)
    table = Table(title=title or "", header_style="bold cyan", row_styles=["none", "dim"])

    show_index = df.index.name is not None or not df.index.equals(df.index.to_series().reset_index(drop=True))
    if show_index:
        table.add_column("")
    for col in df.columns:
        table.add_column(str(col), justify="right")

    for label, row in zip(df.index, df.itertuples(index=False)):
        cells = [float_format.format(c) if isinstance(c, float) else str(c) for c in row]
        if show_index:
            cells.insert(0, str(label))
        table.add_row(*cells)

    console.print(table)


def print_calibration(result):

    from typer import style, echo
    from typer.colors import GREEN, YELLOW

    echo(style(f"{'-'*18} CALIBRATION {'-'*18}", bold=True), err=True)
    echo(style(f"• c_on  = {result.c_on:.6f}", fg=GREEN), err=True)
    echo(style(f"• c_off = {result.c_off:.6f}", fg=GREEN), err=True)
    echo(
        f"rms residual {result.residual:.5f} over"
        + style(f" {result.n_intervals} intervals,", fg=YELLOW)
        + style(f" {result.n_samples} samples", fg=YELLOW),
        err=True,
    )


def print_report(report, title="Evaluation"):
    print_table(report.summary(), title=title)
