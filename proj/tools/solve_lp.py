"""Solve an exported LP file with HiGHS and print the objective value."""

import sys

import highspy


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: solve_lp.py MODEL.lp", file=sys.stderr)
        return 2
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print("cannot read " + sys.argv[1], file=sys.stderr)
        return 1
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print("status: " + h.modelStatusToString(h.getModelStatus()), file=sys.stderr)
        return 1
    print("%.9f" % h.getInfo().objective_function_value)
    return 0


if __name__ == "__main__":
    sys.exit(main())
