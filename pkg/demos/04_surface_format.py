"""The .htsplit surface format and the command-line front end.

Everything the library does is reachable from text files: declarations,
rules and first-order sentences, intensionality statements, named partition
members, named theory groups, contexts, and formulas for the transform
inspector.  This script parses a file built inline, reprints it canonically,
and shows the equivalent command-line invocations.
"""

from htsplit import format_atom_set, parse_problem, print_problem
from htsplit.cli import main as cli_main

TEXT = """
% a two-sorted toy: items may be picked, picking defines ownership
sort item.
domain item = {hammer, nail}.
pred picked(item).
pred owned(item).

owned(X) :- picked(X).

#intensional owned(X) : #true.

#part mine { owned(X) : #true }.
#group base { owned(X) :- picked(X). }.
"""


def main() -> None:
    problem = parse_problem(TEXT)
    print("Canonical form of the inline file:")
    print(print_problem(problem))

    print("Stable models (picked is an input, owned is defined):")
    from htsplit import enumerate_lambda_stable_models

    for interp in enumerate_lambda_stable_models(
        problem.theory(), problem.default_lambda, problem.domains()
    ):
        print("   ", format_atom_set(interp.true_atoms))

    print("\nThe same through the command line (see also --format json):")
    print("   htsplit models FILE")
    print("   htsplit graph FILE --partition mine")
    print("   htsplit split FILE --parts base --partition mine --verify")
    print("   htsplit transform FILE --formula NAME --occurrence p#1 --variant pnn")
    print("   htsplit selftest --count 200")

    import os
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".htsplit", delete=False) as handle:
        handle.write(TEXT)
        path = handle.name
    try:
        print("\nRunning `htsplit models` on the temporary file:")
        cli_main(["models", path])
    finally:
        os.unlink(path)


if __name__ == "__main__":
    main()
