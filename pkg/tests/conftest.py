import sys

# the evaluators bound call depth themselves; give the host interpreter
# enough frames for the bounded worst case
sys.setrecursionlimit(12000)
