from faregraph.cli import main

main(prog_name="faregraph")
