import sys

import bubblesort_prog as prog


def main():
    sys.stdin.reconfigure(encoding="utf-8")
    sys.stdout.reconfigure(encoding="utf-8")
    try:
        in1 = prog._read(prog._next_line(), ("list", "integer"))
        result = prog.bubblesort(in1)
        print("O list " + prog._render(result[0]))
    except prog._Fault as fault:
        print("E " + fault.kind)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
